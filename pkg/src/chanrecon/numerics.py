"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The helpers
here add the validation, ordering and phase conventions the rest of the
package relies on:

* singular values and eigenvalues are returned non-increasing;
* every singular/eigen vector is rotated so that its largest-modulus entry
  is real and positive, which makes results reproducible across LAPACK
  drivers;
* random streams are ``numpy.random.Generator`` objects (PCG64) seeded from
  64-bit integers, so equal seeds give bit-identical samples.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    NonHermitianError,
    RankDeficiencyError,
)

__all__ = [
    "SvdResult",
    "as_matrix",
    "matmul",
    "qr_orthonormal",
    "svd",
    "hermitian_evd",
    "gaussian_matrix",
    "frobenius_norm_sq",
    "rng_stream",
    "derive_rng",
    "derive_seed",
    "projector_distance",
    "canonicalize_phase",
]

ORTHONORMAL_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
QR_RANK_TOL = 1e-12
HERMITIAN_TOL = 1e-10


def as_matrix(a, name="matrix"):
    """Return `a` as a finite 2-D complex128 array.

    Raises
    ------
    DimensionError
        If `a` is not 2-D or has an empty dimension.
    ValueError
        If any entry is NaN or infinite.
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def matmul(a, b):
    """Complex matrix product ``a @ b`` with a shape check."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def canonicalize_phase(vectors):
    """Rotate each column so its largest-modulus entry is real positive.

    Returns the rotated copy and the unit-modulus factors applied, so a
    caller can apply the same rotation to a paired factor.
    """
    vectors = np.array(vectors, dtype=np.complex128, copy=True)
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    mags = np.abs(pivots)
    phases = np.ones_like(pivots)
    nz = mags > 0
    phases[nz] = np.conj(pivots[nz]) / mags[nz]
    return vectors * phases, phases


def qr_orthonormal(a):
    """Orthonormal basis for the column span of a tall full-rank matrix.

    Parameters
    ----------
    a : (n, k) array_like, n >= k

    Returns
    -------
    q : (n, k) ndarray
        Columns are orthonormal and span ``range(a)``.

    Raises
    ------
    RankDeficiencyError
        When the smallest ``|R_ii|`` is below ``1e-12`` times the largest.
        The exception carries the detected rank.
    """
    a = as_matrix(a, "a")
    n, k = a.shape
    if n < k:
        raise DimensionError(f"qr_orthonormal needs rows >= cols, got {a.shape}")
    q, r = np.linalg.qr(a, mode="reduced")
    diag = np.abs(np.diag(r))
    top = diag.max()
    if top == 0.0:
        raise RankDeficiencyError(0)
    rank = int(np.count_nonzero(diag >= QR_RANK_TOL * top))
    if rank < k:
        raise RankDeficiencyError(rank)
    return q


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``a = u @ diag(sigma) @ v.conj().T``.

    `sigma` is non-increasing.  Columns of `u` and `v` are orthonormal and
    phase-canonicalized on `u`.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        return (self.u * self.sigma) @ self.v.conj().T


def svd(a):
    """Thin singular value decomposition with canonical phases."""
    a = as_matrix(a, "a")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    u, phases = canonicalize_phase(u)
    # keep u diag(s) v^H unchanged: v picks up the same rotation
    v = vh.conj().T * phases
    return SvdResult(u=u, sigma=s, v=v)


def hermitian_evd(r):
    """Eigen-decomposition of a Hermitian matrix, largest eigenvalue first.

    Returns
    -------
    eigenvalues : (n,) ndarray of float, non-increasing
    eigenvectors : (n, n) ndarray, column ``i`` pairs with ``eigenvalues[i]``

    Raises
    ------
    NonHermitianError
        If ``||r - r^H||_F > 1e-10 * max(1, ||r||_F)``.
    """
    r = as_matrix(r, "r")
    if r.shape[0] != r.shape[1]:
        raise DimensionError(f"hermitian_evd needs a square matrix, got {r.shape}")
    scale = max(1.0, float(np.linalg.norm(r)))
    asym = float(np.linalg.norm(r - r.conj().T))
    if asym > HERMITIAN_TOL * scale:
        raise NonHermitianError(f"matrix is not Hermitian (||R - R^H||_F = {asym:.3e})")
    try:
        w, v = np.linalg.eigh(r)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"EVD did not converge: {exc}") from exc
    w = w[::-1].copy()
    v, _ = canonicalize_phase(v[:, ::-1])
    return w, v


def rng_stream(seed):
    """Deterministic generator for a 64-bit seed (PCG64).

    A ``numpy.random.Generator`` passes through unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def derive_rng(master_seed, *keys):
    """Independent stream derived from a master seed and integer keys.

    Streams for different key tuples are statistically independent, and the
    result does not depend on the order in which streams are requested.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(master_seed, *keys):
    """A 63-bit integer seed derived like :func:`derive_rng`."""
    return int(derive_rng(master_seed, *keys).integers(0, 2**63))


def gaussian_matrix(rows, cols, rng):
    """I.i.d. circular complex normal CN(0, 1) entries.

    Real and imaginary parts are independent N(0, 1/2).
    """
    if rows < 1 or cols < 1:
        raise DimensionError(f"gaussian_matrix needs positive dimensions, got ({rows}, {cols})")
    rng = rng_stream(rng)
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) * np.sqrt(0.5)


def frobenius_norm_sq(a):
    """Sum of squared moduli of all entries."""
    a = np.asarray(a)
    return float(np.sum(a.real**2 + a.imag**2))


def projector_distance(a, b):
    """Spectral-norm distance between orthogonal projectors onto two spans.

    `a` and `b` hold orthonormal column bases in the same ambient space.
    The result is the sine of the largest principal angle when the spans
    have equal dimension, and lies in ``[0, 1]``.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"bases live in different spaces: {a.shape} vs {b.shape}")
    pa = a @ a.conj().T
    pb = b @ b.conj().T
    return float(np.linalg.norm(pa - pb, 2))
