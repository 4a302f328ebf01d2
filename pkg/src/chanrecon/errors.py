"""Exception hierarchy shared by all modules."""


class ChanReconError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(ChanReconError, ValueError):
    """Matrix shapes do not line up."""


class NumericalError(ChanReconError):
    """A numerical kernel could not produce a trustworthy answer."""


class RankDeficiencyError(NumericalError):
    """Input does not have the full column rank an operation requires.

    Attributes
    ----------
    rank : int
        Detected numerical rank.
    """

    def __init__(self, rank, message=None):
        self.rank = int(rank)
        super().__init__(message or f"matrix is rank deficient (detected rank {self.rank})")


class NonHermitianError(NumericalError, ValueError):
    """Matrix is not Hermitian within tolerance."""


class ConvergenceError(NumericalError):
    """An iterative decomposition failed to converge."""


class IllConditionedError(NumericalError):
    """Gram matrix too ill-conditioned to invert.

    Attributes
    ----------
    condition : float
        Estimated 2-norm condition number.
    """

    def __init__(self, condition, message=None):
        self.condition = float(condition)
        super().__init__(message or f"ill-conditioned matrix (cond ~ {self.condition:.3e})")


class ConstraintError(ChanReconError, ValueError):
    """A parameter constraint such as M >= L >= S is violated."""


class ConfigError(ChanReconError):
    """Configuration could not be parsed or validated.

    Attributes
    ----------
    problems : list of str
        Every diagnostic found, not just the first.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class RankDeficiencyWarning(UserWarning):
    """A range basis had to fall back to its achieved rank."""


class DegenerateSubspaceWarning(UserWarning):
    """Eigenvalues at the retained/discarded boundary are (nearly) tied."""
