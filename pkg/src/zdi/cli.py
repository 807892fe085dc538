"""``zdi`` command-line interface.

Subcommands: ``compute``, ``range``, ``analyze``, ``certify`` and ``oracle``.
Exit codes: 0 success, 1 unreadable/invalid input, 2 certificate search
failed, 3 internal inconsistency (disagreeing formulations or a violated
structural guarantee).
"""

import argparse
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .certificates import (
    construct_diagonal_normal,
    construct_hermitian,
    construct_search,
    residuals,
    verify,
)
from .engine import SweepConfig, _jsonable, zdi_bruteforce_oracle, zdi_general
from .errors import (
    InconsistentFormulations,
    NotOnBoundary,
    ParseError,
    SearchFailed,
    TheoremViolation,
    ValidationError,
)
from .geometry import contains_zero, range_polygon, to_csv, to_svg
from .io import certificate_document, load_matrix
from .special_forms import (
    NormalSpectrum,
    classify_normal_extremal,
    decompose_weighted_permutation,
    is_hermitian,
    is_normal,
    is_weighted_permutation,
    zdi_hermitian,
    zdi_normal,
    zdi_weighted_permutation,
)
from .structure import boundary_extreme_analysis, characterize_n_minus_1, deflate_zero

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_INPUT, EXIT_SEARCH, EXIT_INTERNAL = 0, 1, 2, 3


class FastPathMismatch(InconsistentFormulations):
    pass


def _config(args):
    return SweepConfig(grid_points=args.grid, zero_tol=args.tol)


def _header(args, doc, command):
    out = {"command": command, "input": args.path}
    if doc.name:
        out["name"] = doc.name
    out["n"] = doc.n
    out["config"] = {"grid": args.grid, "tol": args.tol, "seed": args.seed}
    if not args.no_timestamp:
        out["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return out


def cmd_compute(args, doc):
    res = zdi_general(doc.matrix, _config(args))
    return {"d": res.d, "result": res.to_dict()}


def cmd_oracle(args, doc):
    cfg = _config(args)
    d_oracle = zdi_bruteforce_oracle(doc.matrix, tol=args.tol)
    d_sweep = zdi_general(doc.matrix, cfg).d
    if d_oracle != d_sweep:
        raise InconsistentFormulations(f"oracle gives {d_oracle}, sweep gives {d_sweep}")
    return {"d": d_oracle, "d_sweep": d_sweep, "agree": True}


def cmd_range(args, doc):
    A = doc.matrix
    k = args.k or 1
    if not 1 <= k <= doc.n:
        raise ValidationError(f"--k must be in [1, {doc.n}]")
    poly = range_polygon(A, k, args.points)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(to_svg(poly, eigenvalues=np.linalg.eigvals(A)))
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(to_csv(poly))
    return {
        "k": k,
        "points": args.points,
        "empty": poly.empty,
        "vertex_count": int(poly.vertices.size),
        "area": poly.area,
        "diameter": poly.diameter,
        "contains_zero": bool(contains_zero(A, k, _config(args))),
        **({"svg": args.svg} if args.svg else {}),
        **({"csv": args.csv} if args.csv else {}),
    }


def _fast_paths(A, d_general):
    """Every applicable fast path, in order hermitian, weighted-permutation, normal."""
    out = {}
    if is_hermitian(A):
        out["hermitian"] = zdi_hermitian(A).d
    if is_weighted_permutation(A):
        out["weighted-permutation"] = zdi_weighted_permutation(decompose_weighted_permutation(A)).d
    if is_normal(A):
        out["normal"] = zdi_normal(NormalSpectrum.from_matrix(A)[0]).d
    bad = {k: v for k, v in out.items() if v != d_general}
    if bad:
        raise FastPathMismatch(f"general sweep gives d={d_general} but fast paths give {bad}")
    return out


def _certificate_for(A, d, seed):
    if d == 0:
        return {"k": 0, "method": "none"}
    try:
        if is_hermitian(A):
            cert = construct_hermitian(A)
        elif is_normal(A):
            spec, Z, eigs = NormalSpectrum.from_matrix(A)
            cert = construct_diagonal_normal(spec, Z, eigs)
            if cert.k < d:
                cert = construct_search(A, d, seed=seed)
        else:
            cert = construct_search(A, d, seed=seed)
    except SearchFailed as exc:
        return {"k": 0, "method": "search", "failed": True,
                "best_residual": exc.best_residual, "target": d}
    ver = verify(A, cert.V)
    return {"k": cert.k, "method": cert.method, "verified": ver.ok,
            "residual_iso": ver.residual_iso, "residual_zero": ver.residual_zero}


def cmd_analyze(args, doc):
    A, n = doc.matrix, doc.n
    cfg = _config(args)
    general = zdi_general(A, cfg)
    d = general.d
    report = {"d": d, "general": general.to_dict(), "fast_paths": _fast_paths(A, d)}
    if "weighted-permutation" in report["fast_paths"]:
        res = zdi_weighted_permutation(decompose_weighted_permutation(A))
        report["weighted_permutation"] = {k: res.extras[k] for k in ("d_low", "p", "q", "r")}
    if "normal" in report["fast_paths"]:
        spec = NormalSpectrum.from_matrix(A)[0]
        report["normal_class"] = classify_normal_extremal(spec)
    deflation = deflate_zero(A, cfg, d=d)
    report["deflation"] = (deflation.to_dict() if deflation.reducing_multiplicity
                           else {"applied": False, "guaranteed_lower_bound":
                                 deflation.guaranteed_lower_bound})
    if n >= 3:
        report["characterization"] = characterize_n_minus_1(A, cfg).to_dict()
    try:
        report["boundary"] = boundary_extreme_analysis(A, cfg).to_dict()
    except NotOnBoundary as exc:
        report["boundary"] = {"on_boundary": False, "reason": str(exc)}
    report["certificate"] = _certificate_for(A, d, args.seed)
    report["tolerances"] = {"zero_tol": general.tol, "grid": cfg.grid_points}
    return report


def cmd_certify(args, doc):
    A = doc.matrix
    k = args.k if args.k is not None else zdi_general(A, _config(args)).d
    if k == 0:
        raise ValidationError("nothing to certify: target dimension is 0")
    cert = construct_search(A, k, seed=args.seed)
    ver = verify(A, cert.V)
    _, zero_t = residuals(A, cert.V, order="transposed")
    out = {"k": cert.k, "verified": ver.ok, "residual_iso": ver.residual_iso,
           "residual_zero": ver.residual_zero, "residual_zero_transposed": zero_t,
           "restart": cert.notes.get("restart")}
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(certificate_document(A, cert, doc.name), fh)
        out["output"] = args.output
    return out


COMMANDS = {
    "compute": cmd_compute,
    "range": cmd_range,
    "analyze": cmd_analyze,
    "certify": cmd_certify,
    "oracle": cmd_oracle,
}


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("path", help="matrix JSON document")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--grid", type=_positive_int, default=720,
                        help="angle grid size for the sweep (default 720)")
    common.add_argument("--tol", type=float, default=None,
                        help="zero tolerance (default 1e-8 * max(1, ||A||_F))")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp so reports are byte-identical")

    parser = argparse.ArgumentParser(prog="zdi", description="Zero-dilation index toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="index by the angle sweep")
    p = sub.add_parser("range", parents=[common], help="polygon for the rank-k numerical range")
    p.add_argument("--k", type=_positive_int, default=1)
    p.add_argument("--points", type=_positive_int, default=720)
    p.add_argument("--svg", metavar="PATH")
    p.add_argument("--csv", metavar="PATH")
    sub.add_parser("analyze", parents=[common], help="full structural report")
    p = sub.add_parser("certify", parents=[common], help="search for an isotropic isometry")
    p.add_argument("--k", type=_positive_int, default=None, help="target dimension (default d)")
    p.add_argument("--output", metavar="PATH", help="write the certificate as JSON")
    sub.add_parser("oracle", parents=[common], help="dense brute-force cross-check")
    return parser


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and all(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def format_text(report):
    rows = list(_flatten(report))
    width = max(len(k) for k, _ in rows)
    lines = []
    for k, v in rows:
        if isinstance(v, float):
            v = f"{v:.6g}"
        elif isinstance(v, list):
            v = ", ".join(f"{x:.6g}" if isinstance(x, float) else str(x) for x in v)
        lines.append(f"{k:<{width}}  {v}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.tol is not None and args.tol < 0:
            raise ValidationError("--tol must be nonnegative")
        if args.command == "range" and args.points < 8:
            raise ValidationError("--points must be at least 8")
        doc = load_matrix(args.path)
        report = _header(args, doc, args.command)
        report.update(COMMANDS[args.command](args, doc))
    except (ParseError, ValidationError, OSError) as exc:
        print(f"zdi: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SearchFailed as exc:
        print(f"zdi: search failed: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except (InconsistentFormulations, TheoremViolation) as exc:
        print(f"zdi: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    report = _jsonable(report)
    if args.format == "json":
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
    else:
        sys.stdout.write(format_text(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
