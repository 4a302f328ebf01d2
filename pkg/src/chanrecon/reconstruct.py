"""Effective-channel reconstruction: direct eigen-beamforming vs randomized SVD.

Both pipelines turn the ``N_RB * N_SC`` per-subcarrier ``M x Nt`` channels of
one user into an ``S x Nt`` effective channel whose rows are the dominant
transmit directions.

*Direct SVD* averages the correlation ``R = mean(H^H H)`` and keeps the top
``S`` eigenvectors of the ``Nt x Nt`` matrix.

*Method I* averages the channel itself, ``Hbar = mean(H^H)`` (``Nt x M``),
sketches it with an ``M x L`` Gaussian, orthonormalizes ``Y = Hbar G`` into
``Q``, takes the SVD of the small ``L x M`` matrix ``C = Q^H Hbar`` and keeps
``Q U_S``.  It needs ``M >= L >= S``.

The randomized rows are emitted as ``(Q U_S)^H`` by default.  Since the
columns of ``Q U_S`` are the dominant right singular vectors of ``H``, this
matches the direct rows ``v^H`` up to a per-row phase.  The plain transpose
``(Q U_S)^T`` is available via ``convention="transpose"``; it yields the
complex conjugate directions and is only useful for studying that choice.
"""

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel3d import PuChannelSet
from .errors import (
    ConstraintError,
    DegenerateSubspaceWarning,
    DimensionError,
    RankDeficiencyError,
    RankDeficiencyWarning,
)
from .numerics import (
    as_matrix,
    gaussian_matrix,
    frobenius_norm_sq,
    hermitian_evd,
    qr_orthonormal,
    rng_stream,
    svd,
)

__all__ = [
    "DIRECT_SVD",
    "METHOD1",
    "ReconstructionOutput",
    "average_correlation",
    "average_channel",
    "direct_svd_reconstruct",
    "randomized_range",
    "randomized_reconstruct",
    "approximation_residual",
    "steering_basis",
]

DIRECT_SVD = "direct_svd"
METHOD1 = "method1"
CONVENTIONS = ("conjugate", "transpose")

DEGENERACY_TOL = 1e-10
RANGE_RANK_TOL = 1e-12


@dataclass
class ReconstructionOutput:
    """Effective channel of one user plus provenance.

    Attributes
    ----------
    h_eff : (S, Nt) ndarray
        Orthonormal rows.
    method : str
        ``"direct_svd"`` or ``"method1"``.
    l_used : int or None
        Sketch width for the randomized method.
    seed : int or None
        Seed of the sketch, when an integer seed was supplied.
    singular_values : ndarray
        The S retained values: eigenvalues of R for the direct method,
        singular values of C for the randomized one.
    convention : str
        How rows were formed from the basis (``"conjugate"`` rows are
        ``basis^H``, ``"transpose"`` rows are ``basis^T``).
    degenerate : bool
        Retained and discarded spectrum are tied at the boundary.
    rank_deficient : bool
        The sketch had lower rank than ``L``.
    """

    h_eff: np.ndarray
    method: str
    l_used: Optional[int] = None
    seed: Optional[int] = None
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    convention: str = "conjugate"
    degenerate: bool = False
    rank_deficient: bool = False

    @property
    def s(self):
        return self.h_eff.shape[0]

    @property
    def nt(self):
        return self.h_eff.shape[1]

    @property
    def label(self):
        return self.method if self.l_used is None else f"{self.method}_L{self.l_used}"


def _stack(pu):
    h = pu.per_subcarrier if isinstance(pu, PuChannelSet) else np.asarray(pu, dtype=complex)
    if h.ndim == 2:
        h = h[None]
    if h.ndim != 3 or h.shape[0] == 0:
        raise DimensionError("precoding unit must contain at least one M x Nt channel")
    return h


def average_correlation(pu):
    """``R = mean_n H_n^H H_n`` over the subcarriers of a precoding unit."""
    h = _stack(pu)
    r = np.einsum("nmi,nmj->ij", h.conj(), h) / h.shape[0]
    # exact Hermitian symmetry for the EVD
    return 0.5 * (r + r.conj().T)


def average_channel(pu):
    """``Hbar = mean_n H_n^H``, shape (Nt, M)."""
    h = _stack(pu)
    return h.conj().transpose(0, 2, 1).mean(axis=0)


def direct_svd_reconstruct(r, s):
    """Top-`s` eigenvectors of the averaged correlation as rows ``v^H``.

    A :class:`DegenerateSubspaceWarning` is emitted (and the output
    flagged) when ``lambda_s - lambda_{s+1} < 1e-10 * lambda_1``; the returned
    subspace is still a valid choice in that case.
    """
    r = as_matrix(r, "r")
    nt = r.shape[0]
    if not 1 <= s <= nt:
        raise ConstraintError(f"number of streams must satisfy 1 <= S <= Nt={nt}, got {s}")
    w, v = hermitian_evd(r)
    degenerate = False
    if s < nt and (w[s - 1] - w[s]) < DEGENERACY_TOL * max(abs(w[0]), np.finfo(float).tiny):
        degenerate = True
        warnings.warn(f"eigenvalues {s} and {s + 1} are tied; subspace choice is arbitrary",
                      DegenerateSubspaceWarning, stacklevel=2)
    return ReconstructionOutput(h_eff=v[:, :s].conj().T, method=DIRECT_SVD,
                                singular_values=w[:s].copy(), degenerate=degenerate)


def _check_mls(m, l, s=None):
    if s is None:
        ok = m >= l >= 1
        rule = f"M >= L >= 1 violated (M={m}, L={l})"
    else:
        ok = m >= l >= s >= 1
        rule = f"M >= L >= S violated (M={m}, L={l}, S={s})"
    if not ok:
        raise ConstraintError(rule)


def _range_basis(y):
    """Orthonormal basis of range(y) and whether it had to be truncated."""
    try:
        return qr_orthonormal(y), False
    except RankDeficiencyError:
        res = svd(y)
        top = res.sigma[0] if res.sigma.size else 0.0
        rank = int(np.count_nonzero(res.sigma > RANGE_RANK_TOL * top)) if top > 0 else 0
        if rank == 0:
            raise
        return res.u[:, :rank], True


def _sketch(h_bar, l, rng):
    h_bar = as_matrix(h_bar, "h_bar")
    _check_mls(h_bar.shape[1], l)
    g = gaussian_matrix(h_bar.shape[1], l, rng)
    q, truncated = _range_basis(h_bar @ g)
    if truncated:
        warnings.warn(f"sketch of width {l} only reached rank {q.shape[1]}",
                      RankDeficiencyWarning, stacklevel=3)
    return h_bar, q, truncated


def randomized_range(h_bar, l, rng):
    """Orthonormal ``Q`` (Nt x L) spanning ``range(Hbar G)``, G ~ CN(0,1)^{M x L}.

    If the sketch is rank deficient a :class:`RankDeficiencyWarning` is
    issued and ``Q`` has as many columns as the achieved rank.
    """
    return _sketch(h_bar, l, rng)[1]


def randomized_reconstruct(h_bar, l, s, rng, convention="conjugate"):
    """Randomized effective channel from the averaged channel ``Hbar``.

    Parameters
    ----------
    h_bar : (Nt, M) array_like
        Averaged channel (see :func:`average_channel`).
    l : int
        Sketch width, ``M >= l >= s``.
    s : int
        Number of streams.
    rng : int or numpy.random.Generator
        Seed or stream for the Gaussian sketch.
    convention : {"conjugate", "transpose"}
        Row formation from ``Q U_S``.

    Returns
    -------
    ReconstructionOutput
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    h_bar = as_matrix(h_bar, "h_bar")
    _check_mls(h_bar.shape[1], l, s)
    seed = None if isinstance(rng, np.random.Generator) else int(rng)
    h_bar, q, truncated = _sketch(h_bar, l, rng_stream(rng))
    if q.shape[1] < s:
        raise RankDeficiencyError(q.shape[1], f"sketch rank {q.shape[1]} is below the {s} requested streams")
    c = q.conj().T @ h_bar
    res = svd(c)
    basis = q @ res.u[:, :s]
    rows = basis.conj().T if convention == "conjugate" else basis.T
    return ReconstructionOutput(h_eff=rows, method=METHOD1, l_used=int(l), seed=seed,
                                singular_values=res.sigma[:s].copy(), convention=convention,
                                rank_deficient=truncated)


def approximation_residual(h_bar, l, rng):
    """``||(I - Q Q^H) Hbar||_F^2`` for a fresh sketch of width `l`."""
    h_bar, q, _ = _sketch(h_bar, l, rng_stream(rng))
    return frobenius_norm_sq(h_bar - q @ (q.conj().T @ h_bar))


def steering_basis(out):
    """Nt x S orthonormal column basis of the transmit directions in `out`.

    Undoes the row convention so outputs of both methods can be compared in
    the same space.
    """
    if out.convention == "transpose":
        return out.h_eff.T
    return out.h_eff.conj().T
