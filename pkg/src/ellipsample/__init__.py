"""Uniform random sampling from n-dimensional hyperellipsoids.

Points drawn uniformly from the unit n-ball stay uniform under any
invertible affine map, so an ellipsoid sample costs one ball sample and a
matrix-vector product.  This package provides the geometry (constructors
for the common matrix conventions, membership, exact densities), the
samplers (transform-based, rejection oracles, a biased negative control),
and the statistical machinery to certify uniformity.
"""

from .errors import (
    DimensionMismatch,
    DimensionOutOfRange,
    EllipsampleError,
    InsufficientSamples,
    NonpositiveRadius,
    NotARotation,
    NotPositiveDefinite,
    NotSymmetric,
    PointOutsideEllipsoid,
    SingularShape,
)
from .geometry import BallPoint, Ellipsoid, centre_from_foci, unit_ball_volume
from .sampling import (
    RngStream,
    SampleBatch,
    biased_ellipsoid_sampler,
    random_rotation,
    sample_batch,
    sample_ellipsoid,
    sample_ellipsoid_rejection,
    sample_unit_ball,
    sample_unit_ball_rejection,
)
from .validation import (
    BinPartition,
    TestReport,
    chi_square_two_sample,
    chi_square_uniformity,
    mc_volume,
    proof_identity_check,
    radial_ks,
    wilson_hilferty_critical,
)

__version__ = "0.1.0"

__all__ = [
    "BallPoint",
    "BinPartition",
    "DimensionMismatch",
    "DimensionOutOfRange",
    "Ellipsoid",
    "EllipsampleError",
    "InsufficientSamples",
    "NonpositiveRadius",
    "NotARotation",
    "NotPositiveDefinite",
    "NotSymmetric",
    "PointOutsideEllipsoid",
    "RngStream",
    "SampleBatch",
    "SingularShape",
    "TestReport",
    "biased_ellipsoid_sampler",
    "centre_from_foci",
    "chi_square_two_sample",
    "chi_square_uniformity",
    "mc_volume",
    "proof_identity_check",
    "radial_ks",
    "random_rotation",
    "sample_batch",
    "sample_ellipsoid",
    "sample_ellipsoid_rejection",
    "sample_unit_ball",
    "sample_unit_ball_rejection",
    "unit_ball_volume",
    "wilson_hilferty_critical",
]
