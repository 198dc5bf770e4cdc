"""Command-line front end.

Subcommands: families, build, validate, invariant, transition, classify,
simulate, factorize, diagram.  JSON is the canonical output format; CSV and
DOT are projections.  Exit codes: 0 success, 2 usage error, 3 domain error
(JSON body), 4 numeric validation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .errors import DomainError, UsageError, NumericError, ModelIntegrityError
from .families import (
    FAMILY_KINDS,
    PARAM_NAMES,
    FamilySpec,
    family_spec,
    block_coefficients,
)
from .blockmat import build_axis, truncate, structural_checks, truncation_size, unflatten
from .qbd import (
    FAMILY_KIND,
    DISCRETE,
    combine,
    tau_bounds,
    empirical_tau_bounds,
    invariant_pi,
    invariant_measure,
    stationarity_residual,
    classify_recurrence,
    deficit_vector,
)
from .spectral import TransitionQuery, km_entry, spectral_cross_check
from .simulate import estimate_empirical
from .factorize import verify_factorization, triangle_lu, urn_consistency_check


def _num_threads() -> int:
    raw = os.environ.get("QBD_NUM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"QBD_NUM_THREADS={raw!r} is not an integer")


def _write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".qbdpoly-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        _write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _json_default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def _spec_from_args(args) -> FamilySpec:
    if args.family is None:
        raise UsageError("--family is required")
    if args.family not in FAMILY_KINDS:
        raise UsageError(f"unknown family {args.family!r}; choose from {FAMILY_KINDS}")
    names = PARAM_NAMES[args.family]
    params = {}
    for name in names:
        value = getattr(args, name, None)
        if value is None:
            raise UsageError(f"--{name} is required for family {args.family}")
        params[name] = value
    extra = [n for n in ("alpha", "beta", "gamma", "delta")
             if n not in names and getattr(args, n, None) is not None]
    if extra:
        raise UsageError(f"family {args.family} does not take {extra}")
    return family_spec(args.family, variant=getattr(args, "variant", None), **params)


def _tau_from_args(args):
    if args.tau is None:
        raise UsageError("--tau is required")
    if len(args.tau) == 1:
        return args.tau[0]
    if len(args.tau) == 2:
        return (args.tau[0], args.tau[1])
    raise UsageError("--tau takes one or two values")


def _model_from_args(args):
    return combine(_spec_from_args(args), _tau_from_args(args))


def _config_header(args) -> None:
    doc = {"command": args.command}
    for name in ("family", "alpha", "beta", "gamma", "delta", "variant", "tau", "N",
                 "seed", "paths", "output", "format", "steps", "time", "precision",
                 "mode", "axis"):
        value = getattr(args, name, None)
        if value is not None:
            doc[name] = value
    doc["threads"] = _num_threads()
    sys.stderr.write("config: " + json.dumps(doc, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_families(args) -> int:
    out = []
    for kind in FAMILY_KINDS:
        entry = {
            "kind": kind,
            "params": list(PARAM_NAMES[kind]),
            "model_kind": FAMILY_KIND[kind],
        }
        if args.family in (None, kind):
            try:
                if args.family == kind:
                    spec = _spec_from_args(args)
                    entry["tau"] = tau_bounds(spec).as_dict()
            except (UsageError, DomainError) as exc:
                entry["tau_error"] = str(exc)
        out.append(entry)
    if args.family:
        out = [e for e in out if e["kind"] == args.family]
    _emit(args, _json({"families": out}))
    return 0


def _matrix_csv(T, N: int) -> str:
    lines = [f"# N={N} size={T.entries.shape[0]}"]
    for row in T.entries:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _cmd_build(args) -> int:
    spec = _spec_from_args(args)
    N = args.N
    if args.axis in (1, 2):
        T = truncate(build_axis(spec, N, args.axis), N)
    else:
        T = _model_from_args(args).dense(N)
    if args.format == "csv":
        _emit(args, _matrix_csv(T, N))
    else:
        _emit(args, _json(T.as_dict()))
    return 0


def _cmd_validate(args) -> int:
    spec = _spec_from_args(args)
    model = _model_from_args(args)
    N = args.N
    report = {"structural": structural_checks(spec, max(N, 2))}
    M = model.dense(N).entries
    interior = truncation_size(N - 1)
    if model.kind == DISCRETE:
        row_dev = float(np.abs(M[:interior].sum(axis=1) - 1.0).max())
        neg = float(min(0.0, M.min()))
        report["kind"] = {"row_sum_deviation": row_dev, "most_negative_entry": neg,
                          "pass": row_dev <= 1e-12 and neg >= -1e-12}
    else:
        off = M - np.diag(np.diag(M))
        neg = float(min(0.0, off.min()))
        deficits = deficit_vector(model, N)
        rs = M[:interior].sum(axis=1) + deficits[:interior]
        report["kind"] = {"most_negative_offdiag": neg,
                          "balance_deviation": float(np.abs(rs).max()),
                          "pass": neg >= -1e-14 and np.abs(rs).max() <= 1e-12}
    report["stationarity_residual"] = stationarity_residual(model, max(N, 2))
    report["stationarity_pass"] = report["stationarity_residual"] <= 1e-10
    if spec.kind in ("triangle01", "triangle00"):
        cf, em = tau_bounds(spec), empirical_tau_bounds(spec)
        if cf.form == "interval":
            dev = max(abs(cf.lower - em.lower), abs(cf.upper - em.upper))
        else:
            dev = abs(cf.threshold - em.threshold)
        report["tau_bound_scan_deviation"] = float(dev)
    ok = report["structural"]["all_pass"] and report["kind"]["pass"] \
        and report["stationarity_pass"]
    report["pass"] = bool(ok)
    _emit(args, _json(report))
    return 0 if ok else 4


def _cmd_invariant(args) -> int:
    model = _model_from_args(args)
    N = args.N
    pi = invariant_measure(model, N)
    doc = {
        "blocks": [b.tolist() for b in pi.blocks],
        "stationarity_residual": stationarity_residual(model, max(N, 2)),
        "recursion_deviation": float(max(
            np.abs(a - b).max() / max(1.0, np.abs(a).max())
            for a, b in zip(invariant_pi(model.spec, min(N, 10), "closed-form"),
                            invariant_pi(model.spec, min(N, 10), "recursion")))),
    }
    _emit(args, _json(doc))
    return 0


def _cmd_transition(args) -> int:
    model = _model_from_args(args)
    q = TransitionQuery(tuple(args.from_state), tuple(args.to_state),
                        steps=args.steps, time=args.time)
    value = km_entry(model, q)
    doc = {"query": {"from": list(q.from_state), "to": list(q.to_state),
                     "steps": q.steps, "time": q.time},
           "probability": value}
    if args.steps is not None:
        N = max(args.N, q.from_state[0] + args.steps, q.to_state[0] + 1)
        doc["cross_check"] = spectral_cross_check(
            model, N, steps=args.steps,
            max_level=min(max(q.from_state[0], q.to_state[0]), N - args.steps))
    else:
        doc["cross_check"] = spectral_cross_check(
            model, args.N, time=args.time,
            max_level=max(q.from_state[0], q.to_state[0]))
    _emit(args, _json(doc))
    return 0


def _cmd_classify(args) -> int:
    model = _model_from_args(args)
    _emit(args, _json(classify_recurrence(model).as_dict()))
    return 0


def _cmd_simulate(args) -> int:
    model = _model_from_args(args)
    q = TransitionQuery(tuple(args.from_state), tuple(args.to_state),
                        steps=args.steps, time=args.time)
    est = estimate_empirical(model, q, args.paths, args.seed, workers=_num_threads())
    doc = est.as_dict()
    doc["query"] = {"from": list(q.from_state), "to": list(q.to_state),
                    "steps": q.steps, "time": q.time}
    doc["seed"] = args.seed
    _emit(args, _json(doc))
    return 0


def _cmd_factorize(args) -> int:
    spec = _spec_from_args(args)
    if spec.kind != "triangle01":
        raise UsageError("factorize applies to the triangle01 family")
    al, be, ga = spec.params
    N = args.N
    fac = triangle_lu(al, be, ga, N)
    doc = {
        "factors": {
            "X": [m.tolist() for m in fac.X],
            "Y": [m.tolist() for m in fac.Y],
            "S": [m.tolist() for m in fac.S],
            "R": [m.tolist() for m in fac.R],
        },
        "lu": verify_factorization(al, be, ga, N, mode="LU"),
        "urn_consistency": urn_consistency_check(
            "TriangleComposed", {"alpha": al, "beta": be, "gamma": ga}, min(N, 12)),
    }
    if args.mode == "UL-shift":
        doc["ul_shift"] = verify_factorization(al, be, ga, N, mode="UL-shift")
    _emit(args, _json(doc))
    return 0


def _cmd_diagram(args) -> int:
    model = _model_from_args(args)
    N = args.N
    M = model.dense(N).entries
    prec = args.precision
    lines = ["digraph qbd {", "  rankdir=LR;"]
    size = truncation_size(N)
    for i in range(size):
        n, k = unflatten(i)
        lines.append(f'  {n}_{k} [label="({n},{k})"];')
    for i in range(size):
        ni, ki = unflatten(i)
        for j in range(size):
            v = M[i, j]
            if v != 0.0:
                nj, kj = unflatten(j)
                lines.append(f'  {ni}_{ki} -> {nj}_{kj} [label="{v:.{prec}f}"];')
    lines.append("}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser / dispatch
# ---------------------------------------------------------------------------


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILY_KINDS)
    for name in ("alpha", "beta", "gamma", "delta"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--variant", choices=("endpoint-binomial", "endpoint-one"))
    p.add_argument("--tau", type=float, nargs="+")
    p.add_argument("-N", type=int, default=10)
    p.add_argument("--output")


def _add_query_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--from", dest="from_state", type=int, nargs=2, metavar=("LEVEL", "PHASE"),
                   required=True)
    p.add_argument("--to", dest="to_state", type=int, nargs=2, metavar=("LEVEL", "PHASE"),
                   required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--time", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbdpoly")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("families", help="list families and admissible tau sets")
    _add_family_flags(p)
    p.set_defaults(func=_cmd_families)

    p = sub.add_parser("build", help="emit a truncated matrix")
    _add_family_flags(p)
    p.add_argument("--axis", type=int, choices=(1, 2))
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("validate", help="run structural and probabilistic checks")
    _add_family_flags(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("invariant", help="invariant measure and stationarity residual")
    _add_family_flags(p)
    p.set_defaults(func=_cmd_invariant)

    p = sub.add_parser("transition", help="Karlin-McGregor transition probability")
    _add_family_flags(p)
    _add_query_flags(p)
    p.set_defaults(func=_cmd_transition)

    p = sub.add_parser("classify", help="recurrence classification")
    _add_family_flags(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("simulate", help="Monte Carlo transition estimate")
    _add_family_flags(p)
    _add_query_flags(p)
    p.add_argument("--paths", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("factorize", help="stochastic LU factors and urn checks")
    _add_family_flags(p)
    p.add_argument("--mode", choices=("LU", "UL-shift"), default="LU")
    p.set_defaults(func=_cmd_factorize)

    p = sub.add_parser("diagram", help="DOT graph of allowed transitions")
    _add_family_flags(p)
    p.add_argument("--precision", type=int, default=4)
    p.set_defaults(func=_cmd_diagram)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        _config_header(args)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except DomainError as exc:
        sys.stdout.write(_json({"error": "domain", "message": str(exc)}))
        return 3
    except (NumericError, ModelIntegrityError) as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
