"""Multi-user downlink evaluation with ZF precoding and MMSE-IRC reception.

The received signal of user ``k`` is::

    x_k = sqrt(rho) E_k H_k sum_l W_l s_l + E_k n_k,    n_k ~ CN(0, sigma^2 I_M)

``W`` is the zero-forcing precoder of the stacked effective channels,
scaled so that ``||W||_F^2 = K * S``; ``rho`` therefore acts as a
per-stream transmit power.  ``E_k`` is the linear MMSE combiner with the
true interference-plus-noise covariance.  Throughput is reported as the
Shannon sum rate ``sum log2(1 + SINR)`` in bits/s/Hz.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel3d import build_drop
from .errors import DimensionError, IllConditionedError
from .numerics import derive_rng
from .reconstruct import (
    DIRECT_SVD,
    METHOD1,
    average_channel,
    average_correlation,
    direct_svd_reconstruct,
    randomized_reconstruct,
)

__all__ = [
    "LinkConfig",
    "MethodSpec",
    "PrecodeResult",
    "DropReport",
    "stack_effective_channels",
    "zf_precoder",
    "mmse_combiner",
    "per_stream_sinr",
    "reconstruct_users",
    "evaluate_drop",
    "simulate_drop",
    "run_drop",
]

MAX_GRAM_CONDITION = 1e12


@dataclass(frozen=True)
class LinkConfig:
    """Users, streams, transmit power scale and noise variance (linear)."""

    num_users: int
    streams_per_user: int
    tx_power: float = 1.0
    noise_var: float = 1.0

    def __post_init__(self):
        if self.num_users < 1 or self.streams_per_user < 1:
            raise ValueError("need at least one user and one stream")
        if not self.tx_power > 0 or not self.noise_var > 0:
            raise ValueError("tx_power and noise_var must be positive")

    @classmethod
    def from_snr_db(cls, num_users, streams_per_user, snr_db, tx_power=1.0):
        return cls(num_users, streams_per_user, tx_power, tx_power / 10 ** (snr_db / 10))

    @property
    def snr_db(self):
        return 10 * np.log10(self.tx_power / self.noise_var)

    @property
    def total_streams(self):
        return self.num_users * self.streams_per_user

    def check_nt(self, nt):
        if self.total_streams > nt:
            raise DimensionError(f"ZF needs K*S <= Nt, got {self.num_users}*{self.streams_per_user} > {nt}")


@dataclass(frozen=True)
class MethodSpec:
    """A reconstruction method: ``direct_svd`` or ``method1`` with sketch width ``l``."""

    name: str
    l: int = None

    def __post_init__(self):
        if self.name not in (DIRECT_SVD, METHOD1):
            raise ValueError(f"unknown method {self.name!r}")
        if self.name == METHOD1 and (self.l is None or self.l < 1):
            raise ValueError("method1 needs a sketch width l >= 1")

    @property
    def label(self):
        return self.name if self.name == DIRECT_SVD else f"{self.name}_L{self.l}"


@dataclass
class PrecodeResult:
    """Normalized ZF precoder; ``w_unnormalized = w / scale`` satisfies H W = I."""

    w: np.ndarray
    w_unnormalized: np.ndarray
    scale: float
    per_user_blocks: list = field(default_factory=list)

    def block(self, k):
        return self.w[:, self.per_user_blocks[k]]


@dataclass
class DropReport:
    """Per-stream SINRs (subcarrier, user, stream) and the resulting sum rate.

    ``sum_rate`` is the mean over the unit's subcarriers of
    ``sum_{k,i} log2(1 + sinr)``.
    """

    method: str
    l: int
    sinr: np.ndarray
    sum_rate: float
    config: LinkConfig

    @property
    def per_user_per_stream_sinr(self):
        return self.sinr


def stack_effective_channels(outputs):
    """Stack the users' effective channels, user by user, into (K*S) x Nt."""
    if not outputs:
        raise DimensionError("no effective channels to stack")
    nts = {o.h_eff.shape[1] for o in outputs}
    if len(nts) != 1:
        raise DimensionError(f"effective channels disagree on Nt: {sorted(nts)}")
    h = np.vstack([o.h_eff for o in outputs])
    if h.shape[0] > h.shape[1]:
        raise DimensionError(f"ZF needs K*S <= Nt, got {h.shape[0]} > {h.shape[1]}")
    return h


def zf_precoder(h, block_sizes=None):
    """``W = H^H (H H^H)^{-1}`` scaled to ``||W||_F^2 = rows(H)``.

    Parameters
    ----------
    h : (K*S, Nt) ndarray
    block_sizes : sequence of int, optional
        Streams per user, in row order.  Defaults to one row per user.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    if n > h.shape[1]:
        raise DimensionError(f"ZF needs rows <= columns, got {h.shape}")
    gram = h @ h.conj().T
    cond = np.linalg.cond(gram)
    if not cond < MAX_GRAM_CONDITION:
        raise IllConditionedError(cond)
    w_un = h.conj().T @ np.linalg.inv(gram)
    scale = float(np.sqrt(n / np.sum(np.abs(w_un) ** 2)))
    sizes = [1] * n if block_sizes is None else list(block_sizes)
    if sum(sizes) != n:
        raise DimensionError(f"block sizes {sizes} do not add up to {n} rows")
    edges = np.concatenate([[0], np.cumsum(sizes)])
    blocks = [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
    return PrecodeResult(w=scale * w_un, w_unnormalized=w_un, scale=scale, per_user_blocks=blocks)


def mmse_combiner(h_user, pre, k, cfg):
    """MMSE-IRC combiner ``(H_k W_k)^H (rho H_k W W^H H_k^H + sigma^2 I)^{-1}``.

    Returned without the ``sqrt(rho)`` factor; SINR does not depend on the
    row scaling of the combiner.
    """
    h_user = np.asarray(h_user, dtype=complex)
    if h_user.shape[1] != pre.w.shape[0]:
        raise DimensionError(f"channel has {h_user.shape[1]} columns, precoder {pre.w.shape[0]} rows")
    a_all = h_user @ pre.w
    a_k = a_all[:, pre.per_user_blocks[k]]
    cov = cfg.tx_power * (a_all @ a_all.conj().T) + cfg.noise_var * np.eye(h_user.shape[0])
    return np.linalg.solve(cov, a_k).conj().T


def per_stream_sinr(h_user, pre, e, k, cfg):
    """SINR of every stream of user ``k`` after combining with ``e``."""
    g = np.asarray(e) @ np.asarray(h_user) @ pre.w                   # S x (K*S)
    own = g[:, pre.per_user_blocks[k]]
    s = own.shape[0]
    signal = cfg.tx_power * np.abs(own[np.arange(s), np.arange(s)]) ** 2
    total = cfg.tx_power * np.sum(np.abs(g) ** 2, axis=1)
    noise = cfg.noise_var * np.sum(np.abs(e) ** 2, axis=1)
    return signal / (total - signal + noise)


def reconstruct_users(pus, method, s, seed):
    """Effective channels of every user with one method.

    Sketches use streams derived from ``seed`` and the user id, so results
    do not depend on the order users are processed in.
    """
    outs = []
    for pu in pus:
        if method.name == DIRECT_SVD:
            outs.append(direct_svd_reconstruct(average_correlation(pu), s))
        else:
            rng = derive_rng(seed, 1, pu.user_id, method.l)
            outs.append(randomized_reconstruct(average_channel(pu), method.l, s, rng))
    return outs


def evaluate_drop(pus, pre, cfg):
    """SINRs (n_sub, K, S) and mean sum rate for true channels `pus`."""
    n_sub = len(pus[0])
    sinr = np.empty((n_sub, cfg.num_users, cfg.streams_per_user))
    for k, pu in enumerate(pus):
        for n in range(n_sub):
            h = pu.per_subcarrier[n]
            e = mmse_combiner(h, pre, k, cfg)
            sinr[n, k] = per_stream_sinr(h, pre, e, k, cfg)
    rate = float(np.mean(np.sum(np.log2(1 + sinr), axis=(1, 2))))
    return sinr, rate


def simulate_drop(scenario, methods, cfgs, seed):
    """One channel drop evaluated for every method and link config.

    Channels are generated once and shared by all methods.  Returns a dict
    keyed by ``(cfg_index, method_label)``.
    """
    cfgs = list(cfgs)
    k = cfgs[0].num_users
    s = cfgs[0].streams_per_user
    if any(c.num_users != k or c.streams_per_user != s for c in cfgs):
        raise ValueError("all link configs of a drop must share K and S")
    cfgs[0].check_nt(scenario.nt)
    if s > scenario.ue_antennas:
        raise DimensionError(f"S={s} exceeds the {scenario.ue_antennas} user antennas")
    pus = build_drop(scenario, k, seed)
    reports = {}
    for method in methods:
        outs = reconstruct_users(pus, method, s, seed)
        pre = zf_precoder(stack_effective_channels(outs), [s] * k)
        for i, cfg in enumerate(cfgs):
            sinr, rate = evaluate_drop(pus, pre, cfg)
            reports[(i, method.label)] = DropReport(method.name, method.l, sinr, rate, cfg)
    return reports


def run_drop(scenario, methods, cfg, seed):
    """One drop at a single link config; dict of method label -> DropReport."""
    reports = simulate_drop(scenario, methods, [cfg], seed)
    return {label: rep for (_, label), rep in reports.items()}
