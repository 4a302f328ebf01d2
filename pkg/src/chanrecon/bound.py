"""Expected residual of the randomized range finder: bound and Monte Carlo check.

For an ``Nt x M`` matrix with singular values ``sigma_1 >= ... >= sigma_M``
and a sketch of width ``L = d + p``::

    E ||Hbar - Q Q^H Hbar||_F^2 <= (1 + d / (p - 1)) * sum_{i > d} sigma_i^2

The check draws matrices with a prescribed spectrum and a fresh Gaussian
sketch per trial and compares the sample mean of the residual with the
bound, allowing a relative slack plus three standard errors.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, RankDeficiencyWarning
from .numerics import gaussian_matrix, rng_stream
from .reconstruct import approximation_residual

__all__ = [
    "SpectrumSpec",
    "BoundCheckReport",
    "standard_spectra",
    "theorem1_bound",
    "random_matrix_with_spectrum",
    "empirical_residual_mean",
    "bound_grid",
]


@dataclass(frozen=True)
class SpectrumSpec:
    """Prescribed singular values of an ``nt x m`` test matrix."""

    singular_values: tuple
    nt: int
    name: str = ""

    def __post_init__(self):
        sv = tuple(float(x) for x in self.singular_values)
        object.__setattr__(self, "singular_values", sv)
        if not sv:
            raise ValueError("spectrum must not be empty")
        if any(x < 0 or not np.isfinite(x) for x in sv):
            raise ValueError("singular values must be finite and non-negative")
        if any(b > a for a, b in zip(sv, sv[1:])):
            raise ValueError("singular values must be non-increasing")
        if len(sv) > self.nt:
            raise ValueError(f"m={len(sv)} exceeds nt={self.nt}")

    @property
    def m(self):
        return len(self.singular_values)

    def tail_energy(self, d):
        return float(sum(x * x for x in self.singular_values[d:]))


def standard_spectra(m=8):
    """Named spectra covering flat, decaying and rank-deficient cases."""
    i = np.arange(m)
    two_level = np.where(i < 2, 1.0, 0.1)
    rank_def = np.where(i < max(1, m // 2 - 1), 1.0, 0.0)
    return {
        "flat": np.ones(m),
        "geometric": 0.5**i,
        "harmonic": 1.0 / (i + 1),
        "two_level": two_level,
        "rank_deficient": rank_def,
    }


def theorem1_bound(spec, d, p):
    """``(1 + d/(p-1)) * sum_{i>d} sigma_i^2``.

    Only ``p >= 2`` and ``0 <= d <= m`` are required here so the empty-tail
    case ``d = m`` evaluates to zero; sketching itself still needs
    ``d + p <= m``.
    """
    if p < 2:
        raise ConstraintError(f"oversampling p must be >= 2 for a finite bound, got {p}")
    if not 0 <= d <= spec.m:
        raise ConstraintError(f"target rank d must lie in [0, {spec.m}], got {d}")
    return (1.0 + d / (p - 1.0)) * spec.tail_energy(d)


def _haar_columns(rows, cols, rng):
    q, r = np.linalg.qr(gaussian_matrix(rows, cols, rng))
    # fix the phase of R's diagonal so Q is Haar distributed
    dg = np.diag(r)
    return q * (dg / np.abs(dg))


def random_matrix_with_spectrum(spec, rng):
    """``U diag(sigma) V^H`` with Haar-random orthonormal ``U`` and unitary ``V``."""
    rng = rng_stream(rng)
    u = _haar_columns(spec.nt, spec.m, rng)
    v = _haar_columns(spec.m, spec.m, rng)
    return (u * np.asarray(spec.singular_values)) @ v.conj().T


@dataclass(frozen=True)
class BoundCheckReport:
    spectrum: str
    d: int
    p: int
    l: int
    bound: float
    empirical_mean: float
    stderr: float
    max_residual: float
    trials: int
    slack: float
    passed: bool


def empirical_residual_mean(spec, d, p, trials, rng, slack=0.05):
    """Monte Carlo mean residual for sketch width ``d + p``.

    Passes when ``mean <= bound * (1 + slack) + 3 * stderr``.
    """
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    l = d + p
    if l > spec.m:
        raise ConstraintError(f"M >= L violated (M={spec.m}, L={l})")
    bound = theorem1_bound(spec, d, p)
    rng = rng_stream(rng)
    res = np.empty(trials)
    with warnings.catch_warnings():
        # rank-deficient spectra legitimately give rank-deficient sketches
        warnings.simplefilter("ignore", RankDeficiencyWarning)
        for t in range(trials):
            h_bar = random_matrix_with_spectrum(spec, rng)
            res[t] = approximation_residual(h_bar, l, rng)
    mean = float(res.mean())
    stderr = float(res.std(ddof=1) / np.sqrt(trials))
    return BoundCheckReport(
        spectrum=spec.name, d=int(d), p=int(p), l=int(l), bound=bound,
        empirical_mean=mean, stderr=stderr, max_residual=float(res.max()),
        trials=int(trials), slack=float(slack),
        passed=bool(mean <= bound * (1.0 + slack) + 3.0 * stderr),
    )


def bound_grid(m):
    """All ``(d, p)`` with ``d >= 0``, ``p >= 2`` and ``d + p <= m``."""
    return [(d, p) for d in range(0, m - 1) for p in range(2, m - d + 1)]
