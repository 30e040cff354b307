"""Command-line front end: ``sample``, ``check``, and ``volume``.

Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 statistical
failure.  A seed is always required; there is no silent time-based seeding,
so identical command lines produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import DimensionOutOfRange, EllipsampleError, InsufficientSamples
from .geometry import Ellipsoid, centre_from_foci
from .linalg import parse_matrix_text
from .sampling import RngStream, SampleBatch, sample_batch
from .validation import (
    chi_square_uniformity,
    mc_volume,
    proof_identity_check,
    radial_ks,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_STATISTICAL = 3

_METHOD_BY_FLAG = {"transform": "transform", "reject": "ellipsoid_rejection", "biased": "biased"}
_CHECK_NAMES = ("chi2", "ks", "identity")
_IDENTITY_TRIALS = 20
# Child-stream index for the identity check; far above any batch chunk index.
_IDENTITY_STREAM = 2**31 - 1


class ConfigError(Exception):
    """Invalid command-line configuration; maps to exit code 2."""


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _add_shared_flags(sub: argparse.ArgumentParser) -> None:
    src = sub.add_argument_group("ellipsoid definition (exactly one source)")
    src.add_argument("--spec", metavar="FILE.json", help="ellipsoid spec JSON file")
    src.add_argument("--shape", metavar="FILE", help="transform matrix, text format")
    src.add_argument("--quadratic", metavar="FILE", help="quadratic-form matrix, text format")
    src.add_argument("--radii", type=_parse_float_list, metavar="a,b,...", help="per-axis radii")
    src.add_argument("--rotation", metavar="FILE", help="rotation matrix (with --radii only)")
    src.add_argument("--dim", type=int, metavar="N", help="unit n-ball of this dimension")
    src.add_argument("--centre", type=_parse_float_list, metavar="c1,...", help="centre point")
    src.add_argument("--foci", metavar="FILE.json", help="JSON [f1, f2]; centre is the midpoint")
    sub.add_argument("--count", type=int, default=10_000, metavar="N", help="number of points")
    sub.add_argument("--seed", type=int, required=True, metavar="U64", help="RNG seed (required)")
    sub.add_argument(
        "--method",
        choices=sorted(_METHOD_BY_FLAG),
        default="transform",
        help="point generator: transform (default), reject (bounding box), biased (negative control)",
    )
    sub.add_argument("--format", choices=("csv", "json", "svg"), default="csv", help="output format")
    sub.add_argument("--out", metavar="FILE", help="output file (default standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellipsample",
        description="Uniform random points from n-dimensional hyperellipsoids.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_sample = subs.add_parser("sample", help="generate a sample batch")
    _add_shared_flags(p_sample)
    p_sample.set_defaults(func=cmd_sample)

    p_check = subs.add_parser("check", help="run uniformity certification tests")
    _add_shared_flags(p_check)
    p_check.add_argument("--alpha", type=float, choices=(0.01, 0.001), default=0.001)
    p_check.add_argument("--shells", type=int, default=4, metavar="K")
    p_check.add_argument(
        "--tests",
        default=",".join(_CHECK_NAMES),
        metavar="LIST",
        help="comma list from chi2,ks,identity (default all)",
    )
    p_check.set_defaults(func=cmd_check)

    p_volume = subs.add_parser("volume", help="closed-form volume, optional MC cross-check")
    _add_shared_flags(p_volume)
    p_volume.add_argument("--mc", type=int, metavar="N", help="Monte Carlo draws for the cross-check")
    p_volume.set_defaults(func=cmd_volume)

    return parser


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _resolve_centre(args, dim: int) -> np.ndarray:
    if args.centre is not None and args.foci is not None:
        raise ConfigError("--centre and --foci are mutually exclusive")
    if args.foci is not None:
        foci = json.loads(_read_text(args.foci))
        if not isinstance(foci, list) or len(foci) != 2:
            raise ConfigError("--foci file must hold a JSON list [f1, f2]")
        return centre_from_foci(foci[0], foci[1])
    if args.centre is not None:
        return np.asarray(args.centre, dtype=float)
    return np.zeros(dim)


def resolve_ellipsoid(args) -> Ellipsoid:
    """Build the ellipsoid described by the command line (exactly one source)."""
    sources = [
        name
        for name in ("spec", "shape", "quadratic", "radii", "dim")
        if getattr(args, name) is not None
    ]
    if len(sources) != 1:
        raise ConfigError(
            "exactly one of --spec/--shape/--quadratic/--radii/--dim is required, "
            f"got {sources or 'none'}"
        )
    kind = sources[0]
    if args.rotation is not None and kind != "radii":
        raise ConfigError("--rotation is only valid together with --radii")

    try:
        if kind == "spec":
            if args.centre is not None or args.foci is not None:
                raise ConfigError("--spec files carry their own centre/foci")
            return Ellipsoid.from_spec(json.loads(_read_text(args.spec)))
        if kind == "shape":
            shape = parse_matrix_text(_read_text(args.shape))
            return Ellipsoid.from_shape(shape, _resolve_centre(args, shape.shape[0]))
        if kind == "quadratic":
            quad = parse_matrix_text(_read_text(args.quadratic))
            return Ellipsoid.from_quadratic(quad, _resolve_centre(args, quad.shape[0]))
        if kind == "radii":
            n = len(args.radii)
            rotation = (
                parse_matrix_text(_read_text(args.rotation))
                if args.rotation is not None
                else np.eye(n)
            )
            return Ellipsoid.from_radii_rotation(args.radii, rotation, _resolve_centre(args, n))
        return Ellipsoid.from_shape(np.eye(args.dim), _resolve_centre(args, args.dim))
    except (EllipsampleError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc)) from exc


def _render_csv(batch: SampleBatch) -> str:
    lines = [",".join(f"x{i + 1}" for i in range(batch.dim))]
    for row in batch.points:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _render_json(batch: SampleBatch) -> str:
    doc = {
        "dim": batch.dim,
        "count": batch.count,
        "seed": batch.seed,
        "method": batch.method,
        "ellipsoid": batch.ellipsoid_spec,
        "points": batch.points.tolist(),
    }
    return json.dumps(doc) + "\n"


def _render_svg(batch: SampleBatch, e: Ellipsoid) -> str:
    # Data coordinates with y negated so the picture's y axis points up;
    # vector-effect keeps the outline one device pixel at any scale.
    if e.dim != 2:
        raise ConfigError("svg output requires dimension 2")
    half = 1.08 * e.bounding_halfwidths()
    hx, hy = float(half[0]), float(half[1])
    cx, cy = float(e.centre[0]), float(e.centre[1])
    view = (cx - hx, -(cy + hy), 2.0 * hx, 2.0 * hy)
    dot = 0.004 * max(2.0 * hx, 2.0 * hy)

    theta = np.linspace(0.0, 2.0 * np.pi, 257)[:-1]
    ring = np.column_stack([np.cos(theta), np.sin(theta)]) @ np.asarray(e.shape).T + e.centre
    outline = " ".join(f"{float(x)!r},{float(-y)!r}" for x, y in ring)

    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="640" height="640" '
        f'viewBox="{view[0]!r} {view[1]!r} {view[2]!r} {view[3]!r}">',
        f'<polygon points="{outline}" fill="none" stroke="black" stroke-width="1" '
        'vector-effect="non-scaling-stroke"/>',
    ]
    for x, y in batch.points:
        lines.append(f'<circle cx="{float(x)!r}" cy="{float(-y)!r}" r="{dot!r}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_sample(args) -> int:
    e = resolve_ellipsoid(args)
    if args.count < 1:
        raise ConfigError("--count must be at least 1")
    if args.format == "svg" and e.dim != 2:
        raise ConfigError("svg output requires dimension 2")
    batch = sample_batch(e, args.count, args.seed, _METHOD_BY_FLAG[args.method])
    if args.format == "csv":
        text = _render_csv(batch)
    elif args.format == "json":
        text = _render_json(batch)
    else:
        text = _render_svg(batch, e)
    _emit(text, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    e = resolve_ellipsoid(args)
    selected = [name for name in args.tests.split(",") if name.strip()]
    unknown = set(selected) - set(_CHECK_NAMES)
    if unknown or not selected:
        raise ConfigError(f"--tests entries must be among {_CHECK_NAMES}, got {selected}")
    batch = sample_batch(e, args.count, args.seed, _METHOD_BY_FLAG[args.method])
    reports = []
    for name in selected:
        if name == "chi2":
            reports.append(chi_square_uniformity(batch, e, shells=args.shells, alpha=args.alpha))
        elif name == "ks":
            reports.append(radial_ks(batch, e))
        else:
            rng = RngStream(args.seed).derive(_IDENTITY_STREAM)
            reports.append(proof_identity_check(e, _IDENTITY_TRIALS, rng))
    _emit("".join(r.to_json() + "\n" for r in reports), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_STATISTICAL


def cmd_volume(args) -> int:
    e = resolve_ellipsoid(args)
    closed_form = e.volume()
    lines = [f"volume {closed_form!r}"]
    status = EXIT_OK
    if args.mc is not None:
        estimate, stderr = mc_volume(e, args.mc, RngStream(args.seed))
        agree = abs(estimate - closed_form) <= 3.0 * stderr
        lines.append(f"mc_estimate {estimate!r}")
        lines.append(f"mc_stderr {stderr!r}")
        lines.append(f"verdict {'agree' if agree else 'disagree'}")
        if not agree:
            status = EXIT_STATISTICAL
    _emit("\n".join(lines) + "\n", args.out)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, InsufficientSamples, DimensionOutOfRange, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
