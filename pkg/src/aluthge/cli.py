"""Command-line front end.

Exit codes: 0 when everything was computed and every check passed, 1 when
a law or condition is violated (reports are still written), 2 for usage
and input errors.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import laws as lawmod
from . import mapanalysis as ma
from .ensembles import EnsembleSpec
from .errors import AluthgeError, ConditionViolated, MalformedDocument, NonUnitaryResult
from .matcore import ToleranceConfig, is_hermitian, is_psd, numerical_rank, polar, spec_norm
from .oppred import (
    bottleneck_distance,
    is_fixed_point,
    is_normal,
    is_orthogonal_projection,
    is_partial_isometry,
    is_quasinormal,
    normality_residual,
    numerical_range,
    quasinormality_residual,
    spectrum,
)
from .serialize import dumps, load_json, load_matrix, matrix_to_doc, to_jsonable
from .transform import aluthge, aluthge_iterate, fixed_point_residual

DEFAULT_SEED = 0xA17A
OPEN_LAMBDA = {"laws", "map-check", "map-extract"}


class UsageError(Exception):
    pass


def _int(text):
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (np.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be a positive number: {text!r}")
    return value


def _positive_int(text):
    value = _int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def default_seed():
    env = os.environ.get("ALUTHGE_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env, 0)
    except ValueError:
        raise UsageError(f"ALUTHGE_SEED is not an integer: {env!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=float, default=0.5,
                        help="transform parameter (default 0.5)")
    common.add_argument("--seed", type=_int, default=None,
                        help="random seed (default 0xA17A, or $ALUTHGE_SEED)")
    common.add_argument("--trials", type=_positive_int, default=None)
    common.add_argument("--input", "-i")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "pretty"), default="json")
    for name in ("rank", "eq", "psd", "law"):
        common.add_argument(f"--tol-{name}", type=_positive_float, default=None)

    parser = argparse.ArgumentParser(prog="aluthge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("transform", parents=[common], help="lambda-Aluthge transform of a matrix")
    sub.add_parser("polar", parents=[common], help="canonical polar factors")
    it = sub.add_parser("iterate", parents=[common], help="iterate the transform")
    it.add_argument("--max-steps", type=_positive_int, default=50)
    it.add_argument("--stop-tol", type=_positive_float, default=1e-12)
    sub.add_parser("check", parents=[common], help="predicate battery on one matrix")
    sub.add_parser("spectrum", parents=[common], help="eigenvalue multiset")
    nr = sub.add_parser("numrange", parents=[common], help="numerical range polygon")
    nr.add_argument("--angles", type=_positive_int, default=360)
    lw = sub.add_parser("laws", parents=[common], help="run the law suites")
    lw.add_argument("--law", choices=lawmod.LAW_IDS)
    sub.add_parser("map-check", parents=[common], help="sample the product-commuting condition")
    sub.add_parser("map-extract", parents=[common], help="rebuild the conjugating unitary")
    gl = sub.add_parser("gallery", parents=[common], help="list or emit counterexample artifacts")
    gl.add_argument("--name", help="emit one gallery document")
    gl.add_argument("--output-dir", help="write every gallery file into this directory")
    return parser


def _config(args):
    overrides = {f"tol_{k}": getattr(args, f"tol_{k}") for k in ("rank", "eq", "psd", "law")
                 if getattr(args, f"tol_{k}") is not None}
    return ToleranceConfig(**overrides)


def _validate(args):
    lam = args.lam
    if not np.isfinite(lam):
        raise UsageError("--lambda must be finite")
    if args.command in OPEN_LAMBDA:
        if not 0.0 < lam < 1.0:
            raise UsageError(f"--lambda must lie in (0, 1) for {args.command}, got {lam}")
    elif not 0.0 <= lam <= 1.0:
        raise UsageError(f"--lambda must lie in [0, 1], got {lam}")
    needs_input = args.command not in ("laws", "gallery")
    if needs_input and not args.input:
        raise UsageError(f"{args.command} requires --input")
    if args.command == "numrange" and args.angles < 8:
        raise UsageError("--angles must be at least 8")
    if args.seed is None:
        args.seed = default_seed()


# -- pretty printing --------------------------------------------------------------

def _pretty(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict) and set(obj) == {"n", "rows"}:
        m = np.array([[complex(*z) for z in row] for row in obj["rows"]])
        body = np.array2string(m, precision=6, suppress_small=True)
        return "\n".join(pad + line for line in body.splitlines())
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_pretty(v, indent) if isinstance(v, (dict, list)) else f"{pad}- {v}"
                         for v in obj)
    return f"{pad}{obj}"


def _flat(v):
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and len(x) == 2
                   and all(isinstance(y, float) for y in x)) for x in v)
    return False


def _emit(payload, args):
    text = dumps(payload) if args.format == "json" else _pretty(to_jsonable(payload)) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands ------------------------------------------------------------------

def cmd_transform(args, cfg):
    _emit(matrix_to_doc(aluthge(load_matrix(args.input), args.lam, cfg)), args)
    return 0


def cmd_polar(args, cfg):
    pol = polar(load_matrix(args.input), cfg)
    _emit({"V": pol.V, "P": pol.P, "rank": pol.rank, "rank_cutoff": pol.cutoff}, args)
    return 0


def cmd_iterate(args, cfg):
    t = load_matrix(args.input)
    trace = aluthge_iterate(t, args.lam, args.max_steps, args.stop_tol, cfg)
    base = spectrum(t)
    tol = cfg.tol_spectrum * max(1.0, spec_norm(t))
    gaps = [bottleneck_distance(base, spectrum(m)) for m in trace.iterates]
    ok = max(gaps) <= tol
    _emit({"iterates": trace.iterates, "residuals": trace.residuals,
           "converged": trace.converged, "steps": trace.steps,
           "spectrum_gap": max(gaps), "spectrum_preserved": ok}, args)
    return 0 if ok else 1


def cmd_check(args, cfg):
    t = load_matrix(args.input)
    qn = is_quasinormal(t, cfg)
    fixed = is_fixed_point(t, args.lam if 0 < args.lam < 1 else 0.5, cfg)
    report = {
        "n": t.shape[0],
        "rank": numerical_rank(t, cfg),
        "hermitian": is_hermitian(t, cfg),
        "psd": is_psd(t, cfg),
        "normal": is_normal(t, cfg),
        "quasinormal": qn,
        "fixed_point": fixed,
        "partial_isometry": is_partial_isometry(t, cfg),
        "orthogonal_projection": is_orthogonal_projection(t, cfg),
        "residuals": {
            "normality": normality_residual(t),
            "quasinormality": quasinormality_residual(t),
            "fixed_point": fixed_point_residual(t, args.lam, cfg),
        },
        "consistent": qn == fixed == is_normal(t, cfg),
    }
    _emit(report, args)
    return 0 if report["consistent"] else 1


def cmd_spectrum(args, cfg):
    t = load_matrix(args.input)
    _emit({"eigenvalues": spectrum(t, cfg).eigenvalues}, args)
    return 0


def cmd_numrange(args, cfg):
    poly = numerical_range(load_matrix(args.input), args.angles, cfg)
    _emit(poly, args)
    return 0


def cmd_laws(args, cfg):
    trials = args.trials or 100
    reports = lawmod.run_laws(args.seed, trials, args.lam, cfg, only=args.law)
    passed = all(r.passed for r in reports)
    _emit({"seed": args.seed, "lambda": args.lam, "tolerances": cfg.as_dict(),
           "passed": passed, "reports": reports}, args)
    return 0 if passed else 1


def _load_map(path):
    try:
        return ma.map_from_doc(load_json(path))
    except MalformedDocument as exc:
        raise MalformedDocument(str(exc), str(path)) from exc


def cmd_map_check(args, cfg):
    desc = _load_map(args.input)
    rep = ma.check_condition(desc, args.lam, EnsembleSpec(trials=args.trials or 200, seed=args.seed), cfg)
    _emit(rep, args)
    return 1 if rep.verdict == ma.VIOLATED else 0


def cmd_map_extract(args, cfg):
    desc = _load_map(args.input)
    try:
        res = ma.extract_unitary(desc, cfg=cfg, seed=args.seed, lam=args.lam)
    except ConditionViolated as exc:
        _emit({"error": "ConditionViolated", "message": str(exc)}, args)
        return 1
    except NonUnitaryResult as exc:
        _emit({"error": "NonUnitaryResult", "message": str(exc), "result": exc.result}, args)
        return 1
    _emit(res, args)
    return 0


def cmd_gallery(args, cfg):
    index = lawmod.gallery_index()
    if args.output_dir:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for entry in index:
            (out / entry["file"]).write_text(dumps(lawmod.gallery_document(entry["id"])),
                                             encoding="utf-8")
    if args.name:
        try:
            doc = lawmod.gallery_document(args.name)
        except KeyError as exc:
            raise UsageError(str(exc))
        _emit(doc, args)
    else:
        _emit({"entries": index}, args)
    return 0


HANDLERS = {
    "transform": cmd_transform, "polar": cmd_polar, "iterate": cmd_iterate, "check": cmd_check,
    "spectrum": cmd_spectrum, "numrange": cmd_numrange, "laws": cmd_laws,
    "map-check": cmd_map_check, "map-extract": cmd_map_extract, "gallery": cmd_gallery,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(args)
        cfg = _config(args)
        return HANDLERS[args.command](args, cfg)
    except (UsageError, AluthgeError, OSError, ValueError) as exc:
        print(f"aluthge {args.command}: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
