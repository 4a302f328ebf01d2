"""Ray-based 3D channel synthesis for planar BS arrays.

Each ray ``n`` is a sum of ``M_sub`` sub-paths.  For a receive element
``u`` and a transmit element ``s`` a sub-path contributes::

    F_rx(u)^T . K . F_tx(s) . exp(j2pi r_rx.d_rx/lambda) . exp(j2pi r_tx.d_tx/lambda) . exp(j2pi nu t)

with ``K`` the 2x2 polarization coupling matrix built from the four random
initial phases and the cross-polarization ratio.  The ray sum is scaled by
``sqrt(P_n / M_sub)``.  An optional line-of-sight component is blended in
with the Ricean K-factor and only touches the first ray.

Large-scale parameters (pathloss, shadowing, correlated spreads) are not
modelled; :func:`draw_user_geometry` produces a synthetic, statistically
plausible set of rays instead.  Frequency selectivity inside a precoding
unit comes from per-ray delays: subcarrier offset ``f`` rotates ray ``n``
by ``exp(-j2pi f tau_n)``.

Angles are in degrees throughout.  Element locations are kept in units of
wavelength and converted to metres only inside the phase terms.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError
from .numerics import derive_rng, rng_stream

__all__ = [
    "SPEED_OF_LIGHT",
    "ArrayConfig",
    "ue_array",
    "RayClusterParams",
    "LosParams",
    "PuChannelSet",
    "ScenarioConfig",
    "unit_direction_vector",
    "element_position",
    "ray_matrix",
    "los_matrix",
    "nlos_ray_coefficient",
    "los_ray_coefficient",
    "subcarrier_offsets",
    "channels_from_rays",
    "draw_user_geometry",
    "build_pu_channels",
    "build_drop",
]

SPEED_OF_LIGHT = 299_792_458.0

POLARIZATIONS = ("single", "cross_0_90")


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform planar array, optionally dual-polarized.

    Elements are indexed ``(elevation_row * n_azimuth + azimuth_col) * n_pol
    + pol``, so the two polarizations of one physical location are
    neighbours.  Azimuth columns run along x and elevation rows along z.

    `element_pattern` is an amplitude gain ``A(zenith_deg, azimuth_deg)``
    (vectorized); ``None`` means isotropic.  A slant angle ``zeta`` turns it
    into the field pair ``(A cos zeta, A sin zeta)``; the cross-polarized
    layout uses slants 0 and 90 degrees.
    """

    n_azimuth: int
    n_elevation: int = 1
    element_spacing: float = 0.5
    polarization: str = "cross_0_90"
    carrier_wavelength: float = SPEED_OF_LIGHT / 2e9
    element_pattern: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n_azimuth < 1 or self.n_elevation < 1:
            raise ValueError("array needs at least one element in each direction")
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be one of {POLARIZATIONS}, got {self.polarization!r}")
        if not self.element_spacing > 0 or not self.carrier_wavelength > 0:
            raise ValueError("element spacing and wavelength must be positive")

    @property
    def n_pol(self):
        return 2 if self.polarization == "cross_0_90" else 1

    @property
    def n_elements(self):
        return self.n_azimuth * self.n_elevation * self.n_pol

    def positions(self):
        """(n_elements, 3) element locations in wavelengths."""
        idx = np.arange(self.n_elements) // self.n_pol
        col = idx % self.n_azimuth
        row = idx // self.n_azimuth
        pos = np.zeros((self.n_elements, 3))
        pos[:, 0] = col * self.element_spacing
        pos[:, 2] = row * self.element_spacing
        return pos

    def slants_deg(self):
        if self.n_pol == 1:
            return np.zeros(self.n_elements)
        return np.where(np.arange(self.n_elements) % 2 == 0, 0.0, 90.0)

    def field_patterns(self, zenith_deg, azimuth_deg):
        """Field components for every element along the given directions.

        Returns an array of shape ``(n_elements,) + angles.shape + (2,)``
        holding ``(F_theta, F_phi)``.
        """
        zen = np.asarray(zenith_deg, dtype=float)
        az = np.asarray(azimuth_deg, dtype=float)
        if self.element_pattern is None:
            gain = np.ones(np.broadcast(zen, az).shape)
        else:
            gain = np.broadcast_to(np.asarray(self.element_pattern(zen, az), dtype=float),
                                   np.broadcast(zen, az).shape)
        zeta = np.deg2rad(self.slants_deg()).reshape((-1,) + (1,) * gain.ndim)
        return np.stack([gain * np.cos(zeta), gain * np.sin(zeta)], axis=-1)


def ue_array(n_antennas, element_spacing=0.5, carrier_wavelength=SPEED_OF_LIGHT / 2e9):
    """Linear user array: dual-polarized pairs when the count is even."""
    if n_antennas % 2 == 0:
        return ArrayConfig(n_antennas // 2, 1, element_spacing, "cross_0_90", carrier_wavelength)
    return ArrayConfig(n_antennas, 1, element_spacing, "single", carrier_wavelength)


def element_position(config, element_index):
    """Location of one element in wavelengths."""
    if not 0 <= element_index < config.n_elements:
        raise IndexError(f"element index {element_index} out of range [0, {config.n_elements})")
    return config.positions()[element_index]


def unit_direction_vector(zenith_deg, azimuth_deg):
    """Spherical unit vector ``[sin t cos p, sin t sin p, cos t]``.

    Broadcasts over array inputs; the trailing axis has length 3.
    """
    t = np.deg2rad(np.asarray(zenith_deg, dtype=float))
    p = np.deg2rad(np.asarray(azimuth_deg, dtype=float))
    return np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1)


@dataclass
class RayClusterParams:
    """Small-scale parameters of one ray and its sub-paths.

    Per-sub-path fields are 1-D arrays of length ``n_subpaths``, except
    `init_phases` which is ``(n_subpaths, 4)`` ordered
    ``(theta-theta, theta-phi, phi-theta, phi-phi)``.  `xpr` is linear and
    may be ``inf`` (no cross-polar leakage).
    """

    power: float
    zoa: np.ndarray
    aoa: np.ndarray
    zod: np.ndarray
    aod: np.ndarray
    init_phases: np.ndarray
    xpr: np.ndarray
    doppler: np.ndarray
    delay: float = 0.0

    def __post_init__(self):
        self.zoa, self.aoa, self.zod, self.aod = (
            np.atleast_1d(np.asarray(x, dtype=float)) for x in (self.zoa, self.aoa, self.zod, self.aod))
        n = self.zoa.size
        self.init_phases = np.asarray(self.init_phases, dtype=float).reshape(n, 4)
        self.xpr = np.broadcast_to(np.asarray(self.xpr, dtype=float), (n,)).copy()
        self.doppler = np.broadcast_to(np.asarray(self.doppler, dtype=float), (n,)).copy()
        if any(x.shape != (n,) for x in (self.aoa, self.zod, self.aod)):
            raise DimensionError("sub-path angle arrays must share one length")
        if not self.power >= 0:
            raise ValueError(f"ray power must be >= 0, got {self.power}")
        if np.any(~(self.xpr > 0)):
            raise ValueError("XPR must be strictly positive")
        angles = np.concatenate([self.zoa, self.aoa, self.zod, self.aod])
        if not np.all(np.isfinite(angles)):
            raise ValueError("angles must be finite")
        if np.any((self.zoa < 0) | (self.zoa > 180) | (self.zod < 0) | (self.zod > 180)):
            raise ValueError("zenith angles must lie in [0, 180] degrees")

    @property
    def n_subpaths(self):
        return self.zoa.size


@dataclass(frozen=True)
class LosParams:
    """Direct path parameters (angles in degrees, phase in radians)."""

    k_factor: float
    zoa: float
    aoa: float
    zod: float
    aod: float
    phase: float = 0.0
    doppler: float = 0.0

    def __post_init__(self):
        if not self.k_factor >= 0:
            raise ValueError(f"Ricean K-factor must be >= 0, got {self.k_factor}")


def _array_phase(config, directions):
    # exp(j 2 pi / lambda * r^T d) with d in metres
    d = config.positions() * config.carrier_wavelength
    return np.exp(2j * np.pi / config.carrier_wavelength * (d @ np.moveaxis(directions, -1, 0).reshape(3, -1)))


def ray_matrix(ray, rx, tx, t=0.0):
    """NLOS coefficients of one ray for all element pairs, shape (M, Nt)."""
    if np.any(~(ray.xpr > 0)):
        raise ValueError("XPR must be strictly positive")
    n = ray.n_subpaths
    f_rx = rx.field_patterns(ray.zoa, ray.aoa)          # (M, n, 2)
    f_tx = tx.field_patterns(ray.zod, ray.aod)          # (Nt, n, 2)
    leak = np.sqrt(1.0 / ray.xpr)
    ph = np.exp(1j * ray.init_phases)
    coupling = np.empty((n, 2, 2), dtype=complex)
    coupling[:, 0, 0] = ph[:, 0]
    coupling[:, 0, 1] = leak * ph[:, 1]
    coupling[:, 1, 0] = leak * ph[:, 2]
    coupling[:, 1, 1] = ph[:, 3]
    rx_phase = _array_phase(rx, unit_direction_vector(ray.zoa, ray.aoa))  # (M, n)
    tx_phase = _array_phase(tx, unit_direction_vector(ray.zod, ray.aod))  # (Nt, n)
    dop = np.exp(2j * np.pi * ray.doppler * t)
    left = np.einsum("uma,mab->umb", f_rx, coupling) * (rx_phase * dop)[:, :, None]
    right = f_tx * tx_phase[:, :, None]
    return np.sqrt(ray.power / n) * np.einsum("umb,smb->us", left, right)


def los_matrix(los, rx, tx, t=0.0):
    """Unscaled LOS term for all element pairs, shape (M, Nt)."""
    f_rx = rx.field_patterns(los.zoa, los.aoa)          # (M, 2)
    f_tx = tx.field_patterns(los.zod, los.aod)          # (Nt, 2)
    e = np.exp(1j * los.phase)
    pol = np.outer(f_rx[:, 0], f_tx[:, 0]) * e - np.outer(f_rx[:, 1], f_tx[:, 1]) * e
    rx_phase = _array_phase(rx, unit_direction_vector(los.zoa, los.aoa))[:, 0]
    tx_phase = _array_phase(tx, unit_direction_vector(los.zod, los.aod))[:, 0]
    return pol * np.outer(rx_phase, tx_phase) * np.exp(2j * np.pi * los.doppler * t)


def nlos_ray_coefficient(u, s, ray, rx, tx, t=0.0):
    """NLOS coefficient of `ray` from transmit element `s` to receive element `u`."""
    return complex(ray_matrix(ray, rx, tx, t)[u, s])


def los_ray_coefficient(u, s, nlos_value, ray_index, los, rx, tx, t=0.0):
    """Blend an NLOS coefficient with the LOS term (rays are 1-indexed)."""
    k = los.k_factor
    value = np.sqrt(1.0 / (k + 1.0)) * nlos_value
    if ray_index == 1:
        value = value + np.sqrt(k / (k + 1.0)) * los_matrix(los, rx, tx, t)[u, s]
    return complex(value)


def subcarrier_offsets(n_rb, n_sc, subcarrier_spacing=15e3, sc_per_rb=12):
    """Frequency offsets (Hz) of the marked subcarriers of a precoding unit.

    `n_sc` marked subcarriers are spread evenly over each of `n_rb` resource
    blocks; offsets are relative to the first subcarrier of the unit.
    """
    if n_rb < 1 or n_sc < 1 or n_sc > sc_per_rb:
        raise ValueError(f"need n_rb >= 1 and 1 <= n_sc <= {sc_per_rb}")
    step = sc_per_rb // n_sc
    idx = (np.arange(n_rb)[:, None] * sc_per_rb + np.arange(n_sc)[None, :] * step).ravel()
    return idx * float(subcarrier_spacing)


def channels_from_rays(rays, rx, tx, freqs, los=None, t=0.0):
    """Per-subcarrier M x Nt channels, shape (len(freqs), M, Nt)."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    k = 0.0 if los is None else los.k_factor
    nlos_scale = np.sqrt(1.0 / (k + 1.0))
    h = np.zeros((freqs.size, rx.n_elements, tx.n_elements), dtype=complex)
    for n, ray in enumerate(rays, start=1):
        coeff = nlos_scale * ray_matrix(ray, rx, tx, t)
        if n == 1 and los is not None and k > 0:
            coeff = coeff + np.sqrt(k / (k + 1.0)) * los_matrix(los, rx, tx, t)
        rot = np.exp(-2j * np.pi * freqs * ray.delay)
        h += rot[:, None, None] * coeff[None]
    return h


@dataclass
class PuChannelSet:
    """Channels of one user over one precoding unit, shape (n_sub, M, Nt)."""

    per_subcarrier: np.ndarray
    user_id: int = 0
    pu_id: int = 0

    def __post_init__(self):
        h = np.asarray(self.per_subcarrier, dtype=complex)
        if h.ndim == 2:
            h = h[None]
        if h.ndim != 3 or h.shape[0] < 1:
            raise DimensionError(f"expected a non-empty stack of M x Nt matrices, got shape {h.shape}")
        self.per_subcarrier = h

    def __len__(self):
        return self.per_subcarrier.shape[0]

    @property
    def m(self):
        return self.per_subcarrier.shape[1]

    @property
    def nt(self):
        return self.per_subcarrier.shape[2]


@dataclass(frozen=True)
class ScenarioConfig:
    """Geometry and synthetic small-scale statistics of a drop.

    Defaults follow a dual-polarized 8H x 8V BS (128 elements) at 2 GHz
    with 8-antenna users moving at 3 km/h.
    """

    bs_n_azimuth: int = 8
    bs_n_elevation: int = 8
    bs_polarization: str = "cross_0_90"
    ue_antennas: int = 8
    element_spacing: float = 0.5
    carrier_frequency: float = 2e9
    n_rays: int = 12
    n_subpaths: int = 20
    delay_spread: float = 100e-9
    delay_scaling: float = 3.0
    ray_shadowing_db: float = 3.0
    sector_half_width_deg: float = 60.0
    zod_range_deg: tuple = (90.0, 110.0)
    ray_aod_spread_deg: float = 8.0
    ray_zod_spread_deg: float = 3.0
    ray_aoa_spread_deg: float = 30.0
    ray_zoa_spread_deg: float = 8.0
    subpath_departure_spread_deg: float = 2.0
    subpath_arrival_spread_deg: float = 10.0
    xpr_mean_db: float = 8.0
    xpr_std_db: float = 3.0
    k_factor: float = 0.0
    max_doppler_hz: float = (3 / 3.6) * 2e9 / SPEED_OF_LIGHT
    n_rb: int = 1
    n_sc: int = 1
    subcarrier_spacing: float = 15e3
    time: float = 0.0

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self):
        out = []
        for name in ("bs_n_azimuth", "bs_n_elevation", "ue_antennas", "n_rays", "n_subpaths", "n_rb", "n_sc"):
            if int(getattr(self, name)) < 1:
                out.append(f"{name} must be >= 1")
        if self.n_sc > 12:
            out.append("n_sc must be <= 12 (subcarriers per RB)")
        if self.bs_polarization not in POLARIZATIONS:
            out.append(f"bs_polarization must be one of {POLARIZATIONS}")
        for name in ("element_spacing", "carrier_frequency", "delay_spread", "subcarrier_spacing"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0")
        if self.k_factor < 0:
            out.append("k_factor must be >= 0")
        if self.max_doppler_hz < 0:
            out.append("max_doppler_hz must be >= 0")
        lo, hi = self.zod_range_deg
        if not 0 <= lo <= hi <= 180:
            out.append("zod_range_deg must satisfy 0 <= lo <= hi <= 180")
        return out

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def nt(self):
        return self.bs_array().n_elements

    def bs_array(self):
        return ArrayConfig(self.bs_n_azimuth, self.bs_n_elevation, self.element_spacing,
                           self.bs_polarization, self.wavelength)

    def ue_array(self):
        return ue_array(self.ue_antennas, self.element_spacing, self.wavelength)

    def subcarrier_offsets(self):
        return subcarrier_offsets(self.n_rb, self.n_sc, self.subcarrier_spacing)


def _wrap_azimuth(a):
    return (np.asarray(a) + 180.0) % 360.0 - 180.0


def draw_user_geometry(scenario, rng):
    """Synthetic rays (and LOS parameters if ``k_factor > 0``) for one user.

    The user sits at a random azimuth inside the sector seen from the array
    broadside (+y, azimuth 90 deg).  Ray delays are exponential, ray powers
    decay with delay under log-normal shadowing and are normalized to sum
    to one.
    """
    rng = rng_stream(rng)
    sc = scenario
    n, m = sc.n_rays, sc.n_subpaths

    tau = -sc.delay_scaling * sc.delay_spread * np.log(rng.uniform(size=n))
    tau = np.sort(tau - tau.min())
    power = np.exp(-tau * (sc.delay_scaling - 1) / (sc.delay_scaling * sc.delay_spread))
    power *= 10 ** (-rng.normal(0.0, sc.ray_shadowing_db, size=n) / 10)
    power /= power.sum()

    mean_aod = 90.0 + rng.uniform(-sc.sector_half_width_deg, sc.sector_half_width_deg)
    mean_zod = rng.uniform(*sc.zod_range_deg)
    mean_aoa = rng.uniform(-180.0, 180.0)
    mean_zoa = 90.0

    rays = []
    for k in range(n):
        aod = mean_aod + rng.normal(0, sc.ray_aod_spread_deg)
        zod = mean_zod + rng.normal(0, sc.ray_zod_spread_deg)
        aoa = mean_aoa + rng.normal(0, sc.ray_aoa_spread_deg)
        zoa = mean_zoa + rng.normal(0, sc.ray_zoa_spread_deg)
        dep = sc.subpath_departure_spread_deg
        arr = sc.subpath_arrival_spread_deg
        rays.append(RayClusterParams(
            power=float(power[k]),
            zoa=np.clip(zoa + rng.normal(0, arr, m), 0.0, 180.0),
            aoa=_wrap_azimuth(aoa + rng.normal(0, arr, m)),
            zod=np.clip(zod + rng.normal(0, dep, m), 0.0, 180.0),
            aod=_wrap_azimuth(aod + rng.normal(0, dep, m)),
            init_phases=rng.uniform(-np.pi, np.pi, (m, 4)),
            xpr=10 ** (rng.normal(sc.xpr_mean_db, sc.xpr_std_db, m) / 10),
            doppler=sc.max_doppler_hz * np.cos(rng.uniform(0, 2 * np.pi, m)),
            delay=float(tau[k]),
        ))

    los = None
    if sc.k_factor > 0:
        los = LosParams(
            k_factor=sc.k_factor, zoa=mean_zoa, aoa=float(_wrap_azimuth(mean_aoa)),
            zod=float(np.clip(mean_zod, 0, 180)), aod=float(_wrap_azimuth(mean_aod)),
            phase=rng.uniform(-np.pi, np.pi),
            doppler=sc.max_doppler_hz * np.cos(rng.uniform(0, 2 * np.pi)),
        )
    return rays, los


def build_pu_channels(scenario, rng, user_id=0, pu_id=0):
    """Draw one user's geometry and synthesize its precoding-unit channels."""
    rays, los = draw_user_geometry(scenario, rng)
    h = channels_from_rays(rays, scenario.ue_array(), scenario.bs_array(),
                           scenario.subcarrier_offsets(), los=los, t=scenario.time)
    return PuChannelSet(h, user_id=user_id, pu_id=pu_id)


def build_drop(scenario, n_users, seed, pu_id=0):
    """Channels for `n_users` users, each from its own derived stream."""
    return [build_pu_channels(scenario, derive_rng(seed, 0, k), user_id=k, pu_id=pu_id)
            for k in range(n_users)]
