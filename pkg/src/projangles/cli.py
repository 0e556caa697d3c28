"""Command-line front end.

All results go to stdout as JSON, diagnostics to stderr.  Exit codes:

  0  success
  1  gallery: at least one non-flagged claim failed
  2  unreadable input, or unknown gallery id
  3  invalid geometry (zero subspace, non-complementary pair, not a projection)
  4  oppenheim: the pair admits no consistency projection
  5  oppenheim: the supplied --p12 is not admissible
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import gallery
from .errors import (
    ComplementarityError,
    DimensionMismatchError,
    InconsistentPairError,
    NotAProjectionError,
    ProjAnglesError,
    ZeroSubspaceError,
)
from .oppenheim import (
    NormSpec,
    check_consistency_projection,
    consistency_family,
    oppenheim_cos_given,
    oppenheim_cos_inf,
)
from .projections import (
    essential_spectral_radius,
    iterate_product,
    make_projection,
    predict_radius,
    projection_from_matrix,
    spectral_radius_numeric,
)
from .subspaces import directed_distance, friedrichs_cosine, from_columns, principal_angles, sine_between


class InputError(Exception):
    pass


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def load_matrix(path: str) -> np.ndarray:
    """Read ``{"rows": r, "cols": c, "data": [...]}`` (row-major)."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: expected keys rows, cols, data") from exc
    if rows < 1 or cols < 0 or not isinstance(data, list) or len(data) != rows * cols:
        raise InputError(f"{path}: data length {len(data) if isinstance(data, list) else '?'} != rows*cols")
    try:
        arr = np.array(data, dtype=np.float64).reshape(rows, cols)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: non-numeric entries") from exc
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{path}: entries must be finite")
    return arr


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")


def cmd_angles(args):
    a, b = load_matrix(args.s1), load_matrix(args.s2)
    if a.shape[0] != b.shape[0]:
        raise InputError("subspaces live in spaces of different dimension")
    s1, s2 = from_columns(a), from_columns(b)
    try:
        angles = principal_angles(s1, s2)
        out = {
            "ambient_dim": s1.ambient_dim,
            "dims": [s1.dim, s2.dim],
            "principal_angles": angles.tolist(),
            "friedrichs_cosine": friedrichs_cosine(s1, s2),
            "sine": sine_between(s1, s2),
            "directed_distances": {
                "s1_to_s2": directed_distance(s1, s2),
                "s2_to_s1": directed_distance(s2, s1),
            },
        }
    except ZeroSubspaceError as exc:
        raise CommandError(str(exc), 3) from exc
    _emit(out)
    return 0


def _projection_from_files(range_path, kernel_path):
    r, k = load_matrix(range_path), load_matrix(kernel_path)
    if r.shape[0] != k.shape[0]:
        raise InputError("range and kernel files disagree on the dimension")
    try:
        return make_projection(from_columns(r), from_columns(k))
    except ComplementarityError as exc:
        raise CommandError(str(exc), 3) from exc


def _limit_json(m):
    return None if m is None else gallery.matrix_json(m)


def cmd_iterate(args):
    p1 = _projection_from_files(args.range1, args.kernel1)
    p2 = _projection_from_files(args.range2, args.kernel2)
    if p1.n != p2.n:
        raise InputError("the two projections act on spaces of different dimension")
    case, predicted = predict_radius(p1, p2)
    prod = p1.matrix @ p2.matrix
    rep = iterate_product(p1, p2, max_steps=args.max_steps, tol=args.tol)
    _emit(
        {
            "case": case,
            "predicted_rho": predicted,
            "numeric_rho": spectral_radius_numeric(prod),
            "numeric_rho_off_fixed_space": essential_spectral_radius(prod),
            "verdict": rep.verdict,
            "steps": rep.steps,
            "radius_estimate": rep.radius_estimate,
            "limit": _limit_json(rep.limit),
            "P1": gallery.matrix_json(p1.matrix),
            "P2": gallery.matrix_json(p2.matrix),
        }
    )
    return 0


def _load_projection(path):
    m = load_matrix(path)
    try:
        return projection_from_matrix(m, tol=1e-8)
    except (NotAProjectionError, DimensionMismatchError) as exc:
        raise CommandError(f"{path}: {exc}", 3) from exc


def cmd_oppenheim(args):
    p1, p2 = _load_projection(args.p1), _load_projection(args.p2)
    if p1.n != p2.n:
        raise InputError("P1 and P2 have different sizes")
    norm = NormSpec(args.norm)
    if args.p12:
        p12 = load_matrix(args.p12)
        check = check_consistency_projection(p12, p1, p2, tol=1e-8)
        if not check:
            raise CommandError(f"--p12 is not admissible: {check.reason}", 5)
        _emit({"norm": norm.kind, "admissible": True, "cos": oppenheim_cos_given(p1, p2, p12, norm)})
        return 0
    try:
        fam = consistency_family(p1, p2)
    except InconsistentPairError as exc:
        raise CommandError(str(exc), 4) from exc
    res = oppenheim_cos_inf(p1, p2, norm)
    _emit(
        {
            "norm": norm.kind,
            "intersection_dim": fam.intersection.dim,
            "forced_kernel_dim": fam.forced_kernel.dim,
            "free_dim": fam.free_dim,
            "base_cos": res.base_value,
            "inf_cos": res.value,
            "start_index": res.start_index,
            "minimizer": gallery.matrix_json(res.minimizer),
        }
    )
    return 0


def cmd_gallery(args):
    try:
        reports = gallery.run_all(args.only)
    except KeyError:
        raise InputError(f"unknown example id {args.only!r}; choose from {', '.join(gallery.RUNNERS)}")
    _emit([r.to_json() for r in reports])
    failures = [(r.example_id, c) for r in reports for c in r.failures]
    for ex, c in failures:
        print(f"FAIL {c.tag}: expected {c.expected!r}, computed {c.computed!r}", file=sys.stderr)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="projangles", description="Angles, projections and alternating iterations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("angles", help="principal angles and related invariants of two subspaces")
    p.add_argument("s1", help="matrix file whose columns span the first subspace")
    p.add_argument("s2", help="matrix file whose columns span the second subspace")
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("iterate", help="iterate (P1 P2)^n for P_i = P(range_i, kernel_i)")
    for name in ("range1", "kernel1", "range2", "kernel2"):
        p.add_argument(name)
    p.add_argument("--max-steps", type=int, default=10000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("oppenheim", help="Oppenheim cosine of two projections")
    p.add_argument("p1")
    p.add_argument("p2")
    p.add_argument("--norm", choices=("euclidean", "l1", "mixed"), default="euclidean")
    p.add_argument("--p12", help="candidate consistency projection")
    p.set_defaults(func=cmd_oppenheim)

    p = sub.add_parser("gallery", help="reproduce the worked examples")
    p.add_argument("--only", help=f"one of: {', '.join(gallery.RUNNERS)}")
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ProjAnglesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
