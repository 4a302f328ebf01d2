"""Channel reconstruction for SVD-ZF precoding in massive 3D-MIMO.

Submodules
----------
numerics
    Complex matrix kernel (QR, SVD, Hermitian EVD) and seeded random streams.
channel3d
    Ray-based 3D channel model with dual-polarized planar arrays.
reconstruct
    Direct SVD and randomized (sketch + QR + small SVD) effective channels.
link
    ZF precoding, MMSE-IRC combining and sum-rate evaluation.
flops
    FLOP accounting for both reconstruction methods.
bound
    Monte Carlo check of the expected sketching residual bound.
config, cli
    INI run configuration and the ``chanrecon`` command.
"""

from . import bound, channel3d, flops, link, numerics, reconstruct
from .errors import (
    ChanReconError,
    ConfigError,
    ConstraintError,
    DimensionError,
    NumericalError,
    RankDeficiencyError,
)

__version__ = "0.1.0"

__all__ = [
    "bound",
    "channel3d",
    "flops",
    "link",
    "numerics",
    "reconstruct",
    "ChanReconError",
    "ConfigError",
    "ConstraintError",
    "DimensionError",
    "NumericalError",
    "RankDeficiencyError",
]
