"""Command-line workbench: qcoha {info,mul,delta,check,dt,count}."""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections.abc import Sequence

from . import __version__
from .coha import CohaElem, alphabet_of, coh_degree, shuffle_mul
from .coproduct import (
    DEFAULT,
    SampleSpec,
    SwapConvention,
    delta_split,
    run_check,
)
from .dimred import DEFAULT_BUDGET, BudgetExceeded, NonSquareInvertible, build_reduced, count_points, count_series
from .dt import NonSymmetricQuiver, TruncationTooSmall, coha_character, default_t_order, extract_dt, positivity_report
from .polyalg import InconsistentData, SymPoly, format_poly
from .quiver import (
    Cut,
    InvalidCut,
    QuiverError,
    b_matrix,
    is_symmetric,
)
from .specio import Spec, SpecError, load_spec, parse_dim, parse_element

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=("table", "json"), default=d("table"))
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--workers", type=int, default=d(None),
                        help="worker processes (default: available CPUs)")
    parser.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET),
                        help="maximum candidate tuples enumerated per point count")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _common(common, suppress=True)
    p = argparse.ArgumentParser(prog="qcoha", description=__doc__)
    p.add_argument("--version", action="version", version=f"qcoha {__version__}")
    _common(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", parents=[common], help="B matrix, symmetry, cut and relations")
    s.add_argument("spec")

    s = sub.add_parser("mul", parents=[common], help="shuffle product of two elements")
    s.add_argument("spec")
    s.add_argument("gamma1")
    s.add_argument("expr1")
    s.add_argument("gamma2")
    s.add_argument("expr2")

    s = sub.add_parser("delta", parents=[common], help="localised coproduct components")
    s.add_argument("spec")
    s.add_argument("gamma")
    s.add_argument("expr")
    s.add_argument("--split", help="only this first-slot dimension vector")
    _convention(s)

    s = sub.add_parser("check", parents=[common], help="randomised axiom checks")
    s.add_argument("spec")
    for name in ("bialgebra", "coassoc", "counit", "involution", "linearity"):
        s.add_argument(f"--{name}", action="store_true")
    s.add_argument("--max-dim", type=int, default=2)
    s.add_argument("--max-deg", type=int, default=2)
    s.add_argument("--max-total", type=int, default=None,
                   help="resample until the summed dimension of the sampled elements is at most this")
    s.add_argument("--trials", type=int, default=100)
    _convention(s)

    s = sub.add_parser("dt", parents=[common], help="DT invariants of a symmetric quiver with W = 0")
    s.add_argument("spec")
    s.add_argument("--gamma-max", type=int, default=3)
    s.add_argument("--t-order", type=int, default=None)
    s.add_argument("--variable", choices=("t", "q+", "q-"), default="t",
                   help="print in t, or in q^(1/2) with t = q^(1/2) (q+) or t = -q^(1/2) (q-)")

    s = sub.add_parser("count", parents=[common], help="finite-field point counts of the reduced variety")
    s.add_argument("spec")
    s.add_argument("--gamma", required=True)
    s.add_argument("--primes", default="2,3,5")
    s.add_argument("--holdout", type=int, default=None)
    s.add_argument("--interpolate", action="store_true")
    return p


def _convention(s: argparse.ArgumentParser) -> None:
    s.add_argument("--sign-rule", choices=("none", "l0", "chi"), default=DEFAULT.sign_rule)
    s.add_argument("--delta-kernel", choices=("naive", "eue-ratio"), default="naive")


def _conv(args) -> SwapConvention:
    return SwapConvention(args.sign_rule, args.delta_kernel.replace("-", "_"))


# -- output --------------------------------------------------------------------------

def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.format == "json":
        print(json.dumps({"seed": args.seed, **payload}, sort_keys=True))
    else:
        print(f"# seed: {args.seed}")
        for line in lines:
            print(line)


def _table(rows: Sequence[tuple[str, str]]) -> list[str]:
    width = max((len(k) for k, _ in rows), default=0)
    return [f"{k.ljust(width)}  {v}" for k, v in rows]


# -- subcommands -----------------------------------------------------------------------

def cmd_info(args, spec: Spec) -> int:
    q = spec.quiver
    info = {
        "spec": spec.name,
        "vertices": list(q.vertices),
        "arrows": [{"name": a.name, "from": a.source, "to": a.target} for a in q.arrows],
        "b_matrix": b_matrix(q),
        "symmetric": is_symmetric(q),
        "potential": str(spec.potential) if spec.potential else None,
        "cut": sorted(spec.cut.arrows) if spec.cut is not None else None,
        "cut_valid": None,
        "relations": None,
        "invertible": sorted(spec.sp.invertible_arrows),
    }
    if spec.potential is not None and spec.cut is not None:
        try:
            v = build_reduced(q, spec.potential, spec.cut, spec.sp)
            info["cut_valid"] = True
            info["relations"] = {a: str(r) for a, r in v.relations.items()}
        except InvalidCut as e:
            info["cut_valid"] = False
            info["cut_error"] = str(e)
    rows = [("spec", spec.name), ("vertices", " ".join(q.vertices)),
            ("arrows", " ".join(f"{a.name}:{a.source}->{a.target}" for a in q.arrows) or "-"),
            ("B", str(info["b_matrix"])), ("symmetric", str(info["symmetric"]).lower())]
    if info["potential"]:
        rows.append(("potential", info["potential"]))
    if info["cut"] is not None:
        rows.append(("cut", "{" + ",".join(info["cut"]) + "}"
                     + (" valid" if info["cut_valid"] else " INVALID" if info["cut_valid"] is False else "")))
    for a, r in (info["relations"] or {}).items():
        rows.append((f"p_{a}", r))
    if info["invertible"]:
        rows.append(("invertible", " ".join(info["invertible"])))
    _emit(args, {"command": "info", **info}, _table(rows))
    return EXIT_OK


def _element(spec: Spec, gamma: str, expr: str) -> CohaElem:
    q = spec.quiver
    g = parse_dim(q, gamma)
    p = parse_element(expr, alphabet_of(q, g))
    return CohaElem(q, g, SymPoly.of(p, check=False))


def cmd_mul(args, spec: Spec) -> int:
    a = _element(spec, args.gamma1, args.expr1)
    b = _element(spec, args.gamma2, args.expr2)
    m = shuffle_mul(a, b)
    payload = {"command": "mul", "gamma": str(m.gamma), "product": format_poly(m.poly)}
    lines = _table([("gamma", str(m.gamma)), ("product", format_poly(m.poly))])
    if is_symmetric(spec.quiver) and not m.is_zero():
        payload["coh_degrees"] = sorted(coh_degree(m))
        lines += _table([("degrees", " ".join(map(str, payload["coh_degrees"])))])
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_delta(args, spec: Spec) -> int:
    f = _element(spec, args.gamma, args.expr)
    conv = _conv(args)
    splits = [g1 for g1, _ in f.gamma.splittings()]
    if args.split:
        g1 = parse_dim(spec.quiver, args.split)
        if not g1 <= f.gamma:
            raise InputError(f"split {g1} does not fit into {f.gamma}")
        splits = [g1]
    comps = [delta_split(f, g1, conv).to_json() for g1 in splits]
    lines = []
    for c in comps:
        lines.append(f"{c['slots'][0]} | {c['slots'][1]}")
        lines.append(f"  numerator    {c['numerator']}")
        lines.append(f"  denominator  {c['denominator']}")
    _emit(args, {"command": "delta", "convention": conv.to_json(), "components": comps}, lines)
    return EXIT_OK


CHECKS = ("bialgebra", "coassoc", "counit", "involution", "linearity")


def cmd_check(args, spec: Spec) -> int:
    chosen = [c for c in CHECKS if getattr(args, c)] or list(CHECKS)
    sample = SampleSpec(args.max_dim, args.max_deg, args.trials, args.seed, args.max_total)
    conv = _conv(args)
    reports = [run_check(name, spec.quiver, sample, conv, args.workers, label=spec.name) for name in chosen]
    ok = all(r.passed for r in reports)
    lines = []
    for name, rep in zip(chosen, reports):
        lines.append(f"{'PASS' if rep.passed else 'FAIL'} {name} quiver={spec.name} trials={rep.trials} "
                     f"failures={len(rep.failures)} sign_rule={conv.sign_rule} "
                     f"delta_kernel={conv.delta_kernel} seed={args.seed}")
        lines += [f"  {k}: {v}" for k, v in (rep.minimal() or {}).items()]
    _emit(args, {"command": "check", "passed": ok, "results": [r.to_json() for r in reports]}, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dt(args, spec: Spec) -> int:
    q = spec.quiver
    gmax = q.dim([args.gamma_max] * q.n)
    order = args.t_order if args.t_order is not None else default_t_order(gmax)
    H = coha_character(q, gmax, order)
    om = extract_dt(H, order)
    pos = positivity_report(om)
    rendered = om.rendered(args.variable)
    payload = {"command": "dt", "gamma_max": args.gamma_max, "t_order": order, "variable": args.variable,
               "omega": rendered, "positivity": pos.to_json()}
    lines = _table([(f"Omega{g}", v) for g, v in rendered.items()])
    lines.append(f"t-order {order}; positivity {'clean' if pos.clean else 'VIOLATED'}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_count(args, spec: Spec) -> int:
    q = spec.quiver
    g = parse_dim(q, args.gamma)
    try:
        primes = [int(x) for x in args.primes.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--primes {args.primes!r} is not a comma-separated list") from None
    cut = spec.cut if spec.cut is not None else Cut.of([])
    V = build_reduced(q, spec.potential if cut.arrows else None, cut, spec.sp)
    workers = args.workers
    if args.interpolate or args.holdout is not None:
        series = count_series(V, g, primes, args.holdout, args.budget, workers)
        payload = {"command": "count", **series.to_json()}
        lines = _table([(f"q={r.q}", f"raw {r.raw_count}  |G| {r.group_order}  stack {r.to_json()['stack_count']}")
                        for r in series.records])
        lines += _table([("interpolant", str(series.polynomial)),
                         ("integral", str(series.integral).lower())])
        if series.holdout:
            lines += _table([("holdout", f"q={series.holdout.q} raw {series.holdout.raw_count} "
                                         f"{'predicted' if series.holdout_ok else 'MISPREDICTED'}")])
        _emit(args, payload, lines)
        return EXIT_OK if series.holdout_ok in (None, True) else EXIT_FAIL
    recs = [count_points(V, g, p, args.budget, workers) for p in primes]
    payload = {"command": "count", "gamma": str(g), "records": [r.to_json() for r in recs]}
    lines = _table([(f"q={r.q}", f"raw {r.raw_count}  |G| {r.group_order}  stack {r.to_json()['stack_count']}")
                    for r in recs])
    _emit(args, payload, lines)
    return EXIT_OK


COMMANDS = {"info": cmd_info, "mul": cmd_mul, "delta": cmd_delta, "check": cmd_check,
            "dt": cmd_dt, "count": cmd_count}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = os.cpu_count() or 1
    try:
        spec = load_spec(args.spec)
        return COMMANDS[args.command](args, spec)
    except (SpecError, InputError, QuiverError, BudgetExceeded, NonSquareInvertible,
            NonSymmetricQuiver, TruncationTooSmall, InconsistentData, ValueError) as e:
        print(f"qcoha: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
