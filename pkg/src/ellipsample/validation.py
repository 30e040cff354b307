"""Statistical certification that transformed ball samples are uniform.

All tests work in pulled-back ball coordinates, where uniformity over the
ellipsoid is equivalent to uniformity over the unit ball and equal-probability
cells exist in closed form: K radial shells with cut radii (k/K)^(1/n) each
hold probability 1/K, and the 2^n sign orthants are equal by symmetry.  The
radial Kolmogorov-Smirnov test uses the fact that ||u||^n of a uniform ball
point is Uniform(0, 1).

Chi-square critical values come from the Wilson-Hilferty cube-root
approximation (no quantile tables); its error is negligible at the degrees
of freedom used here.  The KS critical value is the asymptotic 1.95/sqrt(N)
at alpha ~ 0.001.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionOutOfRange,
    InsufficientSamples,
    PointOutsideEllipsoid,
)
from .geometry import Ellipsoid, unit_ball_volume
from .sampling import REJECTION_DIM_MAX, RngStream, SampleBatch, sample_ellipsoid

# Upper-tail standard normal quantiles for the supported significance levels.
_Z_UPPER = {0.01: 2.3263478740408408, 0.001: 3.090232306167813}

KS_CRITICAL_SCALE = 1.95  # asymptotic Kolmogorov quantile at alpha ~ 0.001
KS_MIN_SAMPLES = 100

MIN_EXPECTED_PER_BIN = 5.0

# Pull-back norms above this signal a corrupted batch, not rounding.
PULLBACK_SLACK = 1e-9

_MC_MIN_COUNT = 10_000
_MC_CHUNK = 262_144


@dataclass(frozen=True)
class BinPartition:
    """Equal-probability partition of the unit ball: radial shells x sign orthants.

    Shell k (0-based) holds ||u||^n in [k/shells, (k+1)/shells); each of the
    shells * 2^dim bins has probability exactly 1 / (shells * 2^dim) under
    the uniform ball law.
    """

    dim: int
    shells: int

    def __post_init__(self):
        # bit-shifted orthant indices must fit in int64; far past usable
        # bin counts anyway (expected counts need N >= 5 * shells * 2^dim)
        if not 1 <= self.dim <= 62:
            raise ValueError("dim must be in 1..62")
        if self.shells < 1:
            raise ValueError("shells must be positive")

    @property
    def bin_count(self) -> int:
        return self.shells * 2**self.dim

    def shell_cut_radii(self) -> np.ndarray:
        """The shells + 1 shell boundaries (k/shells)^(1/dim), k = 0..shells."""
        return (np.arange(self.shells + 1) / self.shells) ** (1.0 / self.dim)

    def assign(self, pulled_back: np.ndarray) -> np.ndarray:
        """Bin index for each pulled-back (ball-coordinate) point."""
        u = np.asarray(pulled_back, dtype=float)
        if u.ndim != 2 or u.shape[1] != self.dim:
            raise DimensionMismatch(f"points have shape {u.shape}, expected (N, {self.dim})")
        t = ((u * u).sum(axis=1)) ** (self.dim / 2.0)
        shell = np.minimum((t * self.shells).astype(int), self.shells - 1)
        orthant = (u < 0.0) @ (1 << np.arange(self.dim))
        return shell * 2**self.dim + orthant


@dataclass(frozen=True)
class TestReport:
    """Outcome of one distributional test; passes iff statistic < critical."""

    __test__ = False  # not a pytest class, despite the name

    test_name: str
    statistic: float
    dof: int | None
    critical_value: float
    alpha: float
    sample_count: int

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical_value

    def as_dict(self) -> dict:
        return {
            "test": self.test_name,
            "statistic": self.statistic,
            "dof": self.dof,
            "critical": self.critical_value,
            "alpha": self.alpha,
            "pass": self.passed,
            "n_samples": self.sample_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def wilson_hilferty_critical(dof: int, alpha: float) -> float:
    """Chi-square upper-alpha critical value via the cube-root normal approximation."""
    if dof < 1:
        raise ValueError("dof must be positive")
    try:
        z = _Z_UPPER[alpha]
    except KeyError:
        raise ValueError(f"alpha must be one of {sorted(_Z_UPPER)}, got {alpha}") from None
    h = 2.0 / (9.0 * dof)
    return dof * (1.0 - h + z * math.sqrt(h)) ** 3


def _pullback_checked(batch: SampleBatch, e: Ellipsoid) -> np.ndarray:
    if batch.dim != e.dim:
        raise DimensionMismatch(f"batch dim {batch.dim} != ellipsoid dim {e.dim}")
    u = e.pullback(batch.points)
    worst = float(np.sqrt((u * u).sum(axis=1).max()))
    if worst > 1.0 + PULLBACK_SLACK:
        raise PointOutsideEllipsoid(f"pull-back norm {worst!r} exceeds 1 + {PULLBACK_SLACK}")
    return u


def chi_square_uniformity(
    batch: SampleBatch,
    e: Ellipsoid,
    shells: int = 4,
    alpha: float = 0.001,
) -> TestReport:
    """Goodness-of-fit of a batch against the uniform law over ``e``.

    Under uniformity the pulled-back bin counts are multinomial with equal
    cell probabilities, so sum (obs - exp)^2 / exp is chi-square with
    shells * 2^dim - 1 degrees of freedom.
    """
    part = BinPartition(e.dim, shells)
    expected = batch.count / part.bin_count
    if expected < MIN_EXPECTED_PER_BIN:
        raise InsufficientSamples(
            f"{batch.count} samples give {expected:.2f} expected per bin; "
            f"need at least {MIN_EXPECTED_PER_BIN}"
        )
    dof = part.bin_count - 1
    critical = wilson_hilferty_critical(dof, alpha)
    u = _pullback_checked(batch, e)
    observed = np.bincount(part.assign(u), minlength=part.bin_count)
    statistic = float(((observed - expected) ** 2 / expected).sum())
    return TestReport("chi_square_uniformity", statistic, dof, critical, alpha, batch.count)


def chi_square_two_sample(
    batch_a: SampleBatch,
    batch_b: SampleBatch,
    e: Ellipsoid,
    shells: int = 4,
    alpha: float = 0.001,
) -> TestReport:
    """Two-sample chi-square: do two batches share one distribution over ``e``?

    Bin counts a_i, b_i over the pulled-back partition are compared with the
    statistic sum (sqrt(Nb/Na) a_i - sqrt(Na/Nb) b_i)^2 / (a_i + b_i); empty
    bins are skipped and each reduces the degrees of freedom by one.
    """
    part = BinPartition(e.dim, shells)
    ua = _pullback_checked(batch_a, e)
    ub = _pullback_checked(batch_b, e)
    counts_a = np.bincount(part.assign(ua), minlength=part.bin_count).astype(float)
    counts_b = np.bincount(part.assign(ub), minlength=part.bin_count).astype(float)
    na, nb = batch_a.count, batch_b.count
    occupied = (counts_a + counts_b) > 0
    dof = int(occupied.sum()) - 1
    if dof < 1:
        raise InsufficientSamples("fewer than two occupied bins")
    scale_a = math.sqrt(nb / na)
    scale_b = math.sqrt(na / nb)
    num = (scale_a * counts_a[occupied] - scale_b * counts_b[occupied]) ** 2
    statistic = float((num / (counts_a[occupied] + counts_b[occupied])).sum())
    critical = wilson_hilferty_critical(dof, alpha)
    return TestReport("chi_square_two_sample", statistic, dof, critical, alpha, na + nb)


def radial_ks(batch: SampleBatch, e: Ellipsoid) -> TestReport:
    """One-sample Kolmogorov-Smirnov test of the pulled-back radii.

    Uniformity over the ellipsoid makes t = ||pullback(x)||^n exactly
    Uniform(0, 1); the statistic is the empirical-CDF sup gap D, passed
    against the asymptotic critical value 1.95/sqrt(N) (alpha ~ 0.001).
    """
    n = batch.count
    if n < KS_MIN_SAMPLES:
        raise InsufficientSamples(f"KS needs at least {KS_MIN_SAMPLES} samples, got {n}")
    u = _pullback_checked(batch, e)
    t = np.sort(((u * u).sum(axis=1)) ** (e.dim / 2.0))
    grid = np.arange(1, n + 1) / n
    d_plus = float((grid - t).max())
    d_minus = float((t - (grid - 1.0 / n)).max())
    statistic = max(d_plus, d_minus)
    critical = KS_CRITICAL_SCALE / math.sqrt(n)
    return TestReport("radial_ks", statistic, None, critical, 0.001, n)


def mc_volume(e: Ellipsoid, count: int, rng: RngStream) -> tuple[float, float]:
    """Monte Carlo volume estimate by bounding-box rejection.

    Returns (estimate, stderr): box volume times the acceptance fraction,
    with the standard error from the binomial variance of that fraction.
    Independent of the closed-form determinant route, so the two can be
    cross-checked.
    """
    if not 1 <= e.dim <= REJECTION_DIM_MAX:
        raise DimensionOutOfRange(
            f"dimension {e.dim} outside supported range 1..{REJECTION_DIM_MAX}"
        )
    if count < _MC_MIN_COUNT:
        raise InsufficientSamples(f"need at least {_MC_MIN_COUNT} draws, got {count}")
    widths = e.bounding_halfwidths()
    box_volume = float(np.prod(2.0 * widths))
    accepted = 0
    done = 0
    chunk_index = 0
    while done < count:
        m = min(_MC_CHUNK, count - done)
        child = rng.derive(chunk_index)
        props = (2.0 * child.uniforms((m, e.dim)) - 1.0) * widths + e.centre
        accepted += int(e.contains_many(props).sum())
        done += m
        chunk_index += 1
    frac = accepted / count
    estimate = box_volume * frac
    stderr = box_volume * math.sqrt(frac * (1.0 - frac) / count)
    return estimate, stderr


# Tolerances for the exact-identity checks below.
_PDF_IDENTITY_RTOL = 1e-10
_JACOBIAN_ATOL = 1e-4
_FD_STEP = 1e-6


def proof_identity_check(e: Ellipsoid, trials: int, rng: RngStream) -> TestReport:
    """Numerical verification of the change-of-variables identities.

    At random interior points this checks that (a) the density equals
    (1/unit-ball-volume) * |det shape|^-1 with the determinant recomputed
    from scratch, and (b) the Jacobian of the pull-back map, estimated by
    central finite differences, matches the linear solve entrywise.

    The reported statistic is the worst error over all trials, normalized
    by its tolerance ((a) relative to 1e-10, (b) absolute to 1e-4), so the
    report passes iff statistic < 1.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = e.dim
    det = abs(float(np.linalg.det(np.asarray(e.shape))))
    expected_pdf = (1.0 / det) / unit_ball_volume(n)
    inverse_map = np.linalg.solve(np.asarray(e.shape), np.eye(n))
    worst = 0.0
    for _ in range(trials):
        x = sample_ellipsoid(e, rng)
        pdf_err = abs(e.pdf(x) - expected_pdf) / expected_pdf
        jac = np.empty((n, n))
        for j in range(n):
            step = np.zeros(n)
            step[j] = _FD_STEP
            jac[:, j] = (e.inverse(x + step) - e.inverse(x - step)) / (2.0 * _FD_STEP)
        jac_err = float(np.abs(jac - inverse_map).max())
        worst = max(worst, pdf_err / _PDF_IDENTITY_RTOL, jac_err / _JACOBIAN_ATOL)
    return TestReport("proof_identity", worst, None, 1.0, 0.0, trials)
