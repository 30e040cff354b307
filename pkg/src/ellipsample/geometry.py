"""Hyperellipsoid geometry: constructors, membership, transforms, densities.

An ellipsoid is stored as the affine image of the closed unit ball,

    E = { shape @ u + centre : ||u||_2 <= 1 },

with the invertible shape matrix as the single source of truth.  Because
the literature parameterizes ellipsoids both by a quadratic-form matrix M
(membership (x-c)^T M (x-c) <= 1) and by a Cholesky factor of a matrix S
(shape L with L L^T = S), and the two conventions describe reciprocal radii,
both constructors are provided and each documents the membership set it
produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    DimensionOutOfRange,
    NonpositiveRadius,
    NotARotation,
    SingularShape,
)

# Samples on the boundary must test as contained despite rounding.
MEMBERSHIP_SLACK = 1e-12

ROTATION_TOL = 1e-9

_SPEC_KEYS = frozenset({"dim", "centre", "foci", "shape", "quadratic", "radii", "rotation"})


def unit_ball_volume(n: int) -> float:
    """Volume of the unit n-ball, pi^(n/2) / Gamma(n/2 + 1).

    Evaluated through the log-gamma function so large n stays stable.
    """
    if not 1 <= n <= linalg.DIM_MAX:
        raise DimensionOutOfRange(f"dimension {n} outside supported range 1..{linalg.DIM_MAX}")
    return math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0))


def centre_from_foci(f1, f2) -> np.ndarray:
    """Centre of an ellipsoid given its two focal points: the midpoint."""
    a = linalg.as_vector(f1)
    b = linalg.as_vector(f2)
    if a.size != b.size:
        raise DimensionMismatch(f"foci have lengths {a.size} and {b.size}")
    return 0.5 * (a + b)


def _lock(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class BallPoint:
    """A point of the closed unit ball (Euclidean norm <= 1, tiny slack)."""

    coords: np.ndarray

    def __post_init__(self):
        coords = linalg.as_vector(self.coords).copy()
        norm = float(np.linalg.norm(coords))
        if norm > 1.0 + MEMBERSHIP_SLACK:
            raise ValueError(f"norm {norm!r} exceeds 1 + {MEMBERSHIP_SLACK}")
        object.__setattr__(self, "coords", _lock(coords))

    @property
    def dim(self) -> int:
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.coords
        return self.coords.astype(dtype)


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """An n-dimensional hyperellipsoid, image of the unit ball under x -> shape @ x + centre.

    ``shape`` must be invertible but need not be triangular or symmetric;
    ``abs_det_shape`` caches |det shape|, the volume scale factor.
    Instances are immutable and safe to share across threads.
    """

    shape: np.ndarray
    centre: np.ndarray
    abs_det_shape: float = field(init=False)

    def __post_init__(self):
        shape = linalg.as_square(self.shape).copy()
        centre = linalg.as_vector(self.centre).copy()
        n = centre.size
        if shape.shape[0] != n:
            raise DimensionMismatch(
                f"shape is {shape.shape[0]}x{shape.shape[0]} but centre has length {n}"
            )
        det = float(np.linalg.det(shape))
        scale = float(np.abs(shape).max())
        if abs(det) <= n * 1e-12 * scale**n:
            raise SingularShape(f"|det| = {abs(det):.3e} is numerically singular")
        object.__setattr__(self, "shape", _lock(shape))
        object.__setattr__(self, "centre", _lock(centre))
        object.__setattr__(self, "abs_det_shape", abs(det))

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_shape(cls, shape, centre) -> "Ellipsoid":
        """Build from an invertible transform matrix.

        Membership set: { shape @ u + centre : ||u|| <= 1 }.
        """
        return cls(shape, centre)

    @classmethod
    def from_quadratic(cls, m, centre) -> "Ellipsoid":
        """Build from a symmetric positive definite quadratic-form matrix.

        Membership set: { x : (x - centre)^T m (x - centre) <= 1 }.  The
        stored shape is R^-T where m = R R^T, so shape @ shape^T = m^-1 and
        no second factorization is needed; the result is upper triangular.
        """
        r = linalg.cholesky(m)
        n = r.shape[0]
        eye = np.eye(n)
        shape = np.empty((n, n))
        for j in range(n):
            shape[:, j] = linalg.solve_upper(r.T, eye[j])
        return cls(shape, centre)

    @classmethod
    def from_cholesky_convention(cls, s, centre) -> "Ellipsoid":
        """Build with shape = cholesky(s), the literal L L^T = s recipe.

        Membership set: { x : (x - centre)^T s^-1 (x - centre) <= 1 }, so the
        radii are the square roots of s's eigenvalues, the *reciprocal* of
        the from_quadratic convention.  The two agree only when all radii
        are 1; pick the constructor matching your matrix's meaning.
        """
        return cls(linalg.cholesky(s), centre)

    @classmethod
    def from_radii_rotation(cls, radii, rotation, centre) -> "Ellipsoid":
        """Build from per-axis radii and a proper rotation.

        Membership set: the axis-aligned ellipsoid with the given radii,
        rotated by ``rotation`` about ``centre``; shape = rotation @ diag(radii).
        Reflections (determinant -1) are rejected even though they would
        preserve uniformity; fold them into the radii ordering instead.
        """
        r = linalg.as_vector(radii)
        if np.any(r <= 0.0):
            raise NonpositiveRadius(f"radii must be strictly positive, got {r.tolist()}")
        rot = linalg.as_square(rotation)
        if rot.shape[0] != r.size:
            raise DimensionMismatch(
                f"rotation is {rot.shape[0]}x{rot.shape[0]} but there are {r.size} radii"
            )
        if not linalg.is_rotation(rot, ROTATION_TOL):
            raise NotARotation("matrix is not orthogonal with determinant +1")
        return cls(rot * r, centre)

    @classmethod
    def from_spec(cls, spec: Mapping) -> "Ellipsoid":
        """Build from the JSON ellipsoid spec (shared with the CLI).

        Keys: "dim"; exactly one shape definition among "shape", "quadratic",
        and "radii" (the latter with optional "rotation", identity by
        default); "centre" (default origin) or "foci" [f1, f2], which
        overrides centre via the midpoint.
        """
        unknown = set(spec) - _SPEC_KEYS
        if unknown:
            raise ValueError(f"unknown spec keys: {sorted(unknown)}")
        defining = [k for k in ("shape", "quadratic", "radii") if k in spec]
        if len(defining) != 1:
            raise ValueError(
                "exactly one of 'shape', 'quadratic', 'radii' must be given, "
                f"got {defining or 'none'}"
            )
        if "rotation" in spec and defining[0] != "radii":
            raise ValueError("'rotation' is only valid together with 'radii'")
        if "dim" not in spec:
            raise ValueError("spec requires 'dim'")
        n = int(spec["dim"])
        if n < 1:
            raise ValueError(f"dim must be positive, got {n}")

        if "foci" in spec:
            foci = spec["foci"]
            if len(foci) != 2:
                raise ValueError("'foci' must hold exactly two points")
            centre = centre_from_foci(foci[0], foci[1])
        else:
            centre = np.asarray(spec.get("centre", np.zeros(n)), dtype=float)
        if centre.shape != (n,):
            raise ValueError(f"centre has shape {centre.shape}, expected ({n},)")

        kind = defining[0]
        if kind in ("shape", "quadratic"):
            mat = np.asarray(spec[kind], dtype=float)
            if mat.shape != (n, n):
                raise ValueError(f"'{kind}' has shape {mat.shape}, expected ({n}, {n})")
            if kind == "shape":
                return cls.from_shape(mat, centre)
            return cls.from_quadratic(mat, centre)
        radii = np.asarray(spec["radii"], dtype=float)
        if radii.shape != (n,):
            raise ValueError(f"'radii' has shape {radii.shape}, expected ({n},)")
        rotation = np.asarray(spec.get("rotation", np.eye(n)), dtype=float)
        if rotation.shape != (n, n):
            raise ValueError(f"'rotation' has shape {rotation.shape}, expected ({n}, {n})")
        return cls.from_radii_rotation(radii, rotation, centre)

    # -- queries ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.centre.size

    def _check_point(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.dim,):
            raise DimensionMismatch(f"point has shape {arr.shape}, expected ({self.dim},)")
        return arr

    def forward(self, u) -> np.ndarray:
        """Map a unit-ball point into the ellipsoid: shape @ u + centre."""
        return self.shape @ self._check_point(u) + self.centre

    def inverse(self, x) -> np.ndarray:
        """Pull an ellipsoid point back to ball coordinates.

        Solves shape @ u = x - centre; the inverse matrix is never formed.
        """
        return np.linalg.solve(self.shape, self._check_point(x) - self.centre)

    def pullback(self, points: np.ndarray) -> np.ndarray:
        """Vectorized inverse for an (N, dim) array of points."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DimensionMismatch(f"points have shape {pts.shape}, expected (N, {self.dim})")
        return np.linalg.solve(self.shape, (pts - self.centre).T).T

    def contains(self, x) -> bool:
        """True iff x pulls back into the closed unit ball (with slack)."""
        return float(np.linalg.norm(self.inverse(x))) <= 1.0 + MEMBERSHIP_SLACK

    def contains_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized membership test; returns a boolean mask."""
        u = self.pullback(points)
        return (u * u).sum(axis=1) <= (1.0 + MEMBERSHIP_SLACK) ** 2

    def volume(self) -> float:
        """Volume of the membership set: unit-ball volume times |det shape|."""
        return unit_ball_volume(self.dim) * self.abs_det_shape

    def pdf(self, x) -> float:
        """Uniform density over the ellipsoid: 1 / volume inside, 0 outside."""
        if not self.contains(x):
            return 0.0
        return 1.0 / (unit_ball_volume(self.dim) * self.abs_det_shape)

    def bounding_halfwidths(self) -> np.ndarray:
        """Axis-aligned bounding-box halfwidths: Euclidean norms of shape's rows.

        The box [centre - w, centre + w] contains the ellipsoid and each
        face touches it (w_i = max of e_i . (shape @ u) over the unit ball).
        """
        return np.sqrt((self.shape * self.shape).sum(axis=1))

    def spec_dict(self) -> dict:
        """Resolved provenance spec; feeding it to from_spec rebuilds this ellipsoid."""
        return {
            "dim": self.dim,
            "shape": self.shape.tolist(),
            "centre": self.centre.tolist(),
        }
