"""Random point generation for balls and hyperellipsoids.

The primary sampler draws a uniform unit-ball point (Gaussian direction,
radius u^(1/n)) and pushes it through the ellipsoid's affine map, which
preserves uniformity.  Rejection samplers over the cube and the bounding
box are kept as independent oracles, and a deliberately centre-biased
sampler (radius u instead of u^(1/n)) serves as the negative control that
proves the validation suite can detect non-uniformity.

Batches are generated from fixed-size chunks, each filled from its own
derived child stream, so the result is bit-identical no matter how many
worker threads participate.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DimensionOutOfRange
from .geometry import BallPoint, Ellipsoid, unit_ball_volume
from .linalg import DIM_MAX

# Cube/box rejection beyond this dimension wastes almost every draw.
REJECTION_DIM_MAX = 12

# Fixed batch chunking; one derived stream per chunk index.
CHUNK_SIZE = 8192

# Memory cap for a single vectorized rejection proposal block.
_MAX_PROPOSALS = 500_000

METHODS = ("transform", "ball_rejection", "ellipsoid_rejection", "biased")


class RngStream:
    """Seedable, deterministic variate stream with index-based child derivation.

    Equal seeds (and derivation paths) reproduce identical sequences.
    ``derive(i)`` returns an independent child stream without consuming any
    state, so chunked or parallel code can hand out children freely; the
    stream itself is single-owner and must not be shared across threads.
    """

    __slots__ = ("seed", "spawn_key", "_gen")

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        self.spawn_key = tuple(int(k) for k in spawn_key)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=self.spawn_key))
        )

    def derive(self, child_index: int) -> "RngStream":
        """Independent child stream for the given non-negative index."""
        if child_index < 0:
            raise ValueError("child_index must be non-negative")
        return RngStream(self.seed, self.spawn_key + (int(child_index),))

    def uniform(self) -> float:
        """One uniform variate in [0, 1)."""
        return float(self._gen.random())

    def uniforms(self, size) -> np.ndarray:
        return self._gen.random(size)

    def normal(self) -> float:
        """One standard Gaussian variate."""
        return float(self._gen.standard_normal())

    def normals(self, size) -> np.ndarray:
        return self._gen.standard_normal(size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, spawn_key={self.spawn_key})"


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Points plus the provenance needed to regenerate them exactly."""

    dim: int
    points: np.ndarray
    seed: int
    method: str
    ellipsoid_spec: dict

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        pts = np.ascontiguousarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DimensionMismatch(f"points have shape {pts.shape}, expected (N, {self.dim})")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "ellipsoid_spec", dict(self.ellipsoid_spec))

    @property
    def count(self) -> int:
        return self.points.shape[0]


def _check_dim(n: int, cap: int) -> None:
    if not 1 <= n <= cap:
        raise DimensionOutOfRange(f"dimension {n} outside supported range 1..{cap}")


def _ball_chunk(n: int, m: int, rng: RngStream, radius_exponent: float) -> np.ndarray:
    """m points of the unit n-ball: Gaussian directions, radii u**radius_exponent.

    Exponent 1/n gives the uniform law; exponent 1 gives the centre-biased
    negative control.  A Gaussian vector with exactly zero norm is redrawn.
    """
    g = np.asarray(rng.normals((m, n)), dtype=float)
    norms = np.linalg.norm(g, axis=1)
    while True:
        stuck = norms == 0.0
        if not stuck.any():
            break
        g[stuck] = rng.normals((int(stuck.sum()), n))
        norms[stuck] = np.linalg.norm(g[stuck], axis=1)
    radii = rng.uniforms(m) ** radius_exponent
    return g * (radii / norms)[:, None]


def _ball_rejection_chunk(n: int, m: int, rng: RngStream) -> tuple[np.ndarray, int, int]:
    """m unit-ball points by rejection from [-1, 1]^n.

    Returns (points, attempts, accepted); accepted counts every proposal
    that landed inside, including surplus beyond m, so accepted/attempts is
    an unbiased binomial estimate of the acceptance rate.
    """
    rate = unit_ball_volume(n) / 2.0**n
    out = np.empty((m, n))
    filled = 0
    attempts = 0
    accepted = 0
    while filled < m:
        need = m - filled
        draw = min(_MAX_PROPOSALS, max(16, int(1.25 * need / rate) + 1))
        props = 2.0 * rng.uniforms((draw, n)) - 1.0
        keep = props[(props * props).sum(axis=1) <= 1.0]
        take = min(need, keep.shape[0])
        out[filled : filled + take] = keep[:take]
        filled += take
        attempts += draw
        accepted += keep.shape[0]
    return out, attempts, accepted


def _box_rejection_chunk(e: Ellipsoid, m: int, rng: RngStream) -> tuple[np.ndarray, int, int]:
    """m ellipsoid points by rejection from the bounding box.

    Same (points, attempts, accepted) contract as _ball_rejection_chunk.
    """
    widths = e.bounding_halfwidths()
    box_volume = float(np.prod(2.0 * widths))
    rate = e.volume() / box_volume
    out = np.empty((m, e.dim))
    filled = 0
    attempts = 0
    accepted = 0
    while filled < m:
        need = m - filled
        draw = min(_MAX_PROPOSALS, max(16, int(1.25 * need / rate) + 1))
        props = (2.0 * rng.uniforms((draw, e.dim)) - 1.0) * widths + e.centre
        keep = props[e.contains_many(props)]
        take = min(need, keep.shape[0])
        out[filled : filled + take] = keep[:take]
        filled += take
        attempts += draw
        accepted += keep.shape[0]
    return out, attempts, accepted


def sample_unit_ball(n: int, rng: RngStream) -> BallPoint:
    """One point uniform over the closed unit n-ball.

    Direction comes from n independent standard Gaussians normalized to
    unit length; the radius is u^(1/n) with u uniform in [0, 1).
    """
    _check_dim(n, DIM_MAX)
    return BallPoint(_ball_chunk(n, 1, rng, 1.0 / n)[0])


def sample_unit_ball_rejection(n: int, rng: RngStream) -> BallPoint:
    """One unit-ball point by cube rejection; exact by construction.

    Only practical for n <= REJECTION_DIM_MAX (acceptance decays like
    unit-ball volume over 2^n).
    """
    _check_dim(n, REJECTION_DIM_MAX)
    return BallPoint(_ball_rejection_chunk(n, 1, rng)[0][0])


def sample_ellipsoid(e: Ellipsoid, rng: RngStream) -> np.ndarray:
    """One point uniform over the ellipsoid: forward-mapped ball sample."""
    return e.forward(sample_unit_ball(e.dim, rng))


def sample_ellipsoid_rejection(e: Ellipsoid, rng: RngStream) -> np.ndarray:
    """One ellipsoid point by bounding-box rejection; independent oracle."""
    _check_dim(e.dim, REJECTION_DIM_MAX)
    return _box_rejection_chunk(e, 1, rng)[0][0]


def biased_ellipsoid_sampler(e: Ellipsoid, rng: RngStream) -> np.ndarray:
    """Deliberately NON-uniform ellipsoid sampler (negative control).

    Uses ball radius u instead of u^(1/n), which piles samples toward the
    centre for n >= 2 (for n = 1 it coincides with the uniform sampler).
    Exists to prove the uniformity tests have power; never use it for real
    sampling.
    """
    u = _ball_chunk(e.dim, 1, rng, 1.0)[0]
    return e.forward(u)


def random_rotation(n: int, rng: RngStream) -> np.ndarray:
    """A random n-dimensional proper rotation (QR of a Gaussian matrix).

    The R-diagonal sign fix makes the distribution Haar over the orthogonal
    group; a final column flip lands it in the determinant +1 component.
    """
    _check_dim(n, DIM_MAX)
    a = np.asarray(rng.normals((n, n)), dtype=float)
    q, r = np.linalg.qr(a)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    q = q * signs
    if float(np.linalg.det(q)) < 0.0:
        q[:, 0] = -q[:, 0]
    return q


def _chunk_points(e: Ellipsoid, method: str, m: int, rng: RngStream) -> np.ndarray:
    if method == "transform":
        u = _ball_chunk(e.dim, m, rng, 1.0 / e.dim)
    elif method == "biased":
        u = _ball_chunk(e.dim, m, rng, 1.0)
    elif method == "ball_rejection":
        u = _ball_rejection_chunk(e.dim, m, rng)[0]
    elif method == "ellipsoid_rejection":
        return _box_rejection_chunk(e, m, rng)[0]
    else:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    return u @ e.shape.T + e.centre


def sample_batch(
    e: Ellipsoid,
    count: int,
    seed: int,
    method: str = "transform",
    workers: int = 1,
) -> SampleBatch:
    """Generate a reproducible batch of ``count`` points from ``e``.

    The batch is split into fixed CHUNK_SIZE chunks; chunk i is filled from
    the child stream derive(i) of the root stream for ``seed``.  Because the
    chunk layout never depends on ``workers``, the same (seed, spec, method,
    count) yields bit-identical batches at any thread count.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if method in ("ball_rejection", "ellipsoid_rejection"):
        _check_dim(e.dim, REJECTION_DIM_MAX)
    root = RngStream(seed)
    sizes = [CHUNK_SIZE] * (count // CHUNK_SIZE)
    if count % CHUNK_SIZE:
        sizes.append(count % CHUNK_SIZE)

    def fill(index: int) -> np.ndarray:
        return _chunk_points(e, method, sizes[index], root.derive(index))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(fill, range(len(sizes))))
    else:
        chunks = [fill(i) for i in range(len(sizes))]
    points = np.vstack(chunks)
    return SampleBatch(
        dim=e.dim,
        points=points,
        seed=int(seed),
        method=method,
        ellipsoid_spec=e.spec_dict(),
    )
