"""Symbolic FLOP model for the two reconstruction pipelines.

Every scalar complex addition or multiplication counts as one FLOP.  The
atoms below are the classic dense-matrix counts for an ``M x N`` operand
(``B`` is ``N x L``)::

    A A^H                 M^2 N + M (N - M/2) - M/2
    A B                   2 M N L - M L
    alpha A, A + C        M N
    QR, Q required        4 (M^2 N - M N^2 + N^3 / 3)
    SVD, Sigma and U      4 M^2 N + 13 N^3
    SVD, Sigma and V      2 M N^2 + 13 N^3

Counts are kept exact as :class:`fractions.Fraction` because the QR term is
not an integer.  Gaussian sampling and data movement cost nothing.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConstraintError

__all__ = [
    "ATOM_ARITY",
    "FlopAtom",
    "FlopTotal",
    "atom_flops",
    "flops_direct_svd",
    "flops_method1",
    "ratio_sweep",
]

ATOM_ARITY = {
    "gram_aah": 2,
    "matmul_ab": 3,
    "scale": 2,
    "sum": 2,
    "qr_q": 2,
    "svd_sigma_u": 2,
    "svd_sigma_v": 2,
}


@dataclass(frozen=True)
class FlopAtom:
    kind: str
    dims: tuple

    def __post_init__(self):
        if self.kind not in ATOM_ARITY:
            raise ValueError(f"unknown FLOP atom {self.kind!r}")
        if len(self.dims) != ATOM_ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {ATOM_ARITY[self.kind]} dimensions, got {len(self.dims)}")
        if any(int(d) != d or d < 1 for d in self.dims):
            raise ValueError(f"dimensions must be positive integers, got {self.dims}")


def atom_flops(atom):
    """Exact FLOP count of one atom."""
    d = [Fraction(int(x)) for x in atom.dims]
    kind = atom.kind
    if kind == "gram_aah":
        m, n = d
        return m * m * n + m * (n - m / 2) - m / 2
    if kind == "matmul_ab":
        m, n, l = d
        return 2 * m * n * l - m * l
    if kind in ("scale", "sum"):
        m, n = d
        return m * n
    if kind == "qr_q":
        m, n = d
        return 4 * (m * m * n - m * n * n + n**3 / 3)
    if kind == "svd_sigma_u":
        m, n = d
        return 4 * m * m * n + 13 * n**3
    m, n = d
    return 2 * m * n * n + 13 * n**3


@dataclass
class FlopTotal:
    """Itemized cost; ``value`` is always the sum of ``breakdown``."""

    breakdown: list = field(default_factory=list)

    def add(self, label, atom, times=1):
        if times:
            self.breakdown.append((label, atom, times * atom_flops(atom)))
        return self

    @property
    def value(self):
        return sum((v for _, _, v in self.breakdown), Fraction(0))

    def __float__(self):
        return float(self.value)


def _positive(**dims):
    bad = [k for k, v in dims.items() if int(v) != v or v < 1]
    if bad:
        raise ValueError(f"dimensions must be positive integers: {', '.join(bad)}")


def flops_direct_svd(nt, m, s, n_sub=1):
    """Averaged correlation over `n_sub` subcarriers plus its Nt x Nt EVD.

    The EVD is costed as an SVD returning singular values and vectors of an
    Nt x Nt matrix.  `s` does not change the cost (all eigenvectors come
    out of the decomposition) but is validated.
    """
    _positive(nt=nt, m=m, s=s, n_sub=n_sub)
    if s > nt:
        raise ConstraintError(f"S={s} exceeds Nt={nt}")
    total = FlopTotal()
    total.add("correlation H^H H", FlopAtom("gram_aah", (nt, m)), n_sub)
    total.add("accumulate correlations", FlopAtom("sum", (nt, nt)), n_sub - 1)
    total.add("average 1/N", FlopAtom("scale", (nt, nt)))
    total.add("EVD of R", FlopAtom("svd_sigma_u", (nt, nt)))
    return total


def flops_method1(nt, m, l, s, n_sub=1):
    """Randomized pipeline cost; needs ``m >= l >= s``.

    The SVD of the L x M matrix C is costed through its M x L conjugate
    transpose with the (Sigma, V) row, i.e. ``2 M L^2 + 13 L^3``.
    """
    _positive(nt=nt, m=m, l=l, s=s, n_sub=n_sub)
    if not m >= l >= s:
        raise ConstraintError(f"M >= L >= S violated (M={m}, L={l}, S={s})")
    total = FlopTotal()
    total.add("accumulate channels", FlopAtom("sum", (nt, m)), n_sub - 1)
    total.add("average 1/N", FlopAtom("scale", (nt, m)))
    total.add("sketch Y = Hbar G", FlopAtom("matmul_ab", (nt, m, l)))
    total.add("QR of Y", FlopAtom("qr_q", (nt, l)))
    total.add("C = Q^H Hbar", FlopAtom("matmul_ab", (l, nt, m)))
    total.add("SVD of C", FlopAtom("svd_sigma_v", (m, l)))
    total.add("Q U_S", FlopAtom("matmul_ab", (nt, l, s)))
    return total


def ratio_sweep(nt_range, m, l, s, n_sub=1):
    """Rows ``(nt, direct, method1, ratio)`` with ``ratio = method1 / direct``."""
    rows = []
    for nt in nt_range:
        direct = flops_direct_svd(nt, m, s, n_sub).value
        rand = flops_method1(nt, m, l, s, n_sub).value
        rows.append((int(nt), direct, rand, rand / direct))
    return rows
