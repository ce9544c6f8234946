"""Command-line interface: ``qli compute | decompose | check-category | oracle | bench``.

Exit codes
----------
0  success
1  PD parse or diagram error (also unreadable input files)
2  category file error or failing axiom
3  no realizable carving tree (fallback chain exhausted)
4  internal error (plan validation, bound violation, interpolation)
5  oracle check disagreed or could not run
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from qli.carving import NotRealizable, realizable_roots, realize
from qli.category import CategoryError, axiom_check, load_category
from qli.diagram import DiagramError, LinkDiagram, parse_pd, split_components, writhe
from qli.engine import (
    STRATEGIES,
    BoundViolation,
    Prepared,
    choose_tree,
    compute_invariant,
    loop_value,
    prepare,
)
from qli.planner import PlanError, build_plan, estimate_cost, validate_plan
from qli.ring import LaurentPoly

SCHEMA_VERSION = 1

EXIT_OK, EXIT_PARSE, EXIT_CATEGORY, EXIT_REALIZE, EXIT_INTERNAL, EXIT_ORACLE = range(6)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# -- helpers ----------------------------------------------------------------

def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_PARSE) from None


def read_diagram(path: str) -> LinkDiagram:
    return parse_pd(read_text(path))


def parse_colours(items: list[str] | None) -> dict[int, str]:
    out = {}
    for item in items or []:
        comp, sep, name = item.partition("=")
        if not sep or not comp.strip().isdigit() or not name.strip():
            raise CliError(f"--color expects i=NAME, got {item!r}", EXIT_PARSE)
        out[int(comp)] = name.strip()
    return out


def jones_text(value: LaurentPoly, cat) -> str | None:
    """Normalized sl2 value divided by the loop, written in ``t = A^-4``.

    Returns None when the quotient is not a polynomial in ``A^4`` (for
    example links with an even number of components need ``t^(1/2)``).
    """
    try:
        q = value.exact_div(loop_value(cat))
    except ValueError:
        return None
    if any(e % 4 for e, _ in q.items()):
        return None
    return str(LaurentPoly({-e // 4: c for e, c in q.items()}, "t"))


def dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _cheapest(d: LinkDiagram, cat, colouring) -> list[Prepared]:
    """Per piece, the plan with the smallest estimated peak length then op count."""
    out = []
    for piece in split_components(d) if d.n_vertices else []:
        best = None
        for strategy in ("exact", "heuristic", "sweep"):
            try:
                tree, _ = choose_tree(piece, strategy)
            except NotRealizable:
                continue
            for edge in realizable_roots(tree, piece) or [tree.root_edge]:
                t = tree.reroot(edge)
                plan = build_plan(piece, t, realize(t, piece), cat, _sub_colouring(d, piece, colouring))
                validate_plan(plan, cat)
                est = estimate_cost(plan, cat)
                key = (est.peak_len, est.scalar_ops)
                if best is None or key < best[0]:
                    best = (key, Prepared(piece, t, plan))
        if best is None:
            raise NotRealizable("no realizable tree for any strategy")
        out.append(best[1])
    return out


def _sub_colouring(d, piece, colouring):
    from qli.engine import _piece_colouring
    return _piece_colouring(d, piece, colouring)


def run_oracles(d: LinkDiagram, cat, colouring) -> dict:
    """Values of the available oracles; Kauffman only applies to the sl2 colouring."""
    from qli.oracle import kauffman_unnormalized, morse_evaluate

    out: dict[str, str] = {}
    if cat.name == "sl2" and not colouring and not d.colors:
        try:
            out["kauffman"] = str(kauffman_unnormalized(d, cat.variable))
        except ValueError as exc:
            out["kauffman_error"] = str(exc)
    try:
        out["morse"] = str(morse_evaluate(d, cat, colouring or None))
    except ValueError as exc:
        out["morse_error"] = str(exc)
    return out


# -- subcommands ------------------------------------------------------------

def cmd_compute(args) -> int:
    d = read_diagram(args.pd)
    cat = load_category(args.category)
    colouring = parse_colours(args.color)
    t0 = time.perf_counter()
    if args.cheapest:
        prepared = _cheapest(d, cat, colouring)
    else:
        prepared = prepare(d, cat, colouring, args.decomposition, args.root_edge)
    report: dict = {
        "schema_version": SCHEMA_VERSION,
        "category": cat.name,
        "backend": args.backend,
        "writhe": writhe(d),
        "normalized": args.normalize_framing,
        "strategy": [p.tree.strategy for p in prepared],
    }
    if args.backend == "modular":
        from qli.modular_pipeline import compute_via_modular

        res = compute_via_modular(d, cat, colouring, normalize=args.normalize_framing,
                                  jobs=args.jobs, extra_primes=args.primes_extra,
                                  prepared=prepared)
        value, raw = res.value, res.raw
        report["modular"] = {"points": res.points, "primes": res.primes,
                             "max_residue_bits": res.max_residue_bits, "runs": res.runs}
        stats = compute_invariant(d, cat, colouring, prepared=prepared).stats
    else:
        r = compute_invariant(d, cat, colouring, normalize=args.normalize_framing, prepared=prepared)
        value, raw, stats = r.value, r.raw, r.stats
    report["seconds"] = round(time.perf_counter() - t0, 6)
    if args.reduce:
        try:
            value = value.exact_div(loop_value(cat))
        except ValueError:
            raise CliError("value is not divisible by the loop value", EXIT_INTERNAL) from None
    report["invariant"] = str(value)
    report["raw"] = str(raw)
    report["stats"] = stats.to_json()
    jones = None
    if cat.name == "sl2" and args.normalize_framing and not args.reduce and not colouring:
        jones = jones_text(value, cat)
        if jones is not None:
            report["jones"] = jones
    if args.emit_plan:
        report["plans"] = [{"plan": p.plan.to_json(), "cost": estimate_cost(p.plan, cat).to_json()}
                           for p in prepared]
    code = EXIT_OK
    if args.oracle_check:
        vals = run_oracles(d, cat, colouring)
        got = [v for k, v in vals.items() if not k.endswith("_error")]
        verdict = "agree" if got and all(v == str(raw) for v in got) else (
            "disagree" if got else "unavailable")
        report["oracle"] = dict(vals, verdict=verdict)
        if verdict != "agree":
            code = EXIT_ORACLE
    if args.json or args.emit_plan:
        print(dump(report))
    else:
        print(report["invariant"])
        if jones is not None:
            print(f"jones: {jones}")
        if args.verbose:
            print("stats: " + " ".join(f"{k}={v}" for k, v in report["stats"].items()))
            if "modular" in report:
                m = report["modular"]
                print(f"modular: points={m['points']} primes={len(m['primes'])} "
                      f"max_residue_bits={m['max_residue_bits']}")
        if args.oracle_check:
            print(f"oracle: {report['oracle']['verdict']}")
    return code


def cmd_decompose(args) -> int:
    d = read_diagram(args.pd)
    pieces = []
    realizable = True
    for piece in split_components(d) if d.n_vertices else []:
        try:
            tree, _ = choose_tree(piece, args.decomposition)
        except NotRealizable as exc:
            realizable = False
            pieces.append({"realizable": False, "error": str(exc)})
            continue
        if args.root_edge is not None and tree.edges:
            roots = realizable_roots(tree, piece)
            tree = tree.reroot(roots[args.root_edge % len(roots)])
        pieces.append({
            "realizable": True,
            "strategy": tree.strategy,
            "congestion": tree.congestion(),
            "root_edge": list(tree.root_edge) if tree.root_edge else None,
            "weights": [{"edge": list(e), "weight": w} for e, w in sorted(tree.weights.items())],
            "text": tree.to_text(piece),
        })
    report = {
        "schema_version": SCHEMA_VERSION,
        "realizable": realizable,
        "congestion": max((p.get("congestion", 0) for p in pieces), default=0),
        "strategy": [p.get("strategy") for p in pieces],
        "pieces": pieces,
    }
    if args.json:
        print(dump(report))
    else:
        for p in pieces:
            if p["realizable"]:
                print(p["text"])
        slim = {k: v for k, v in report.items() if k != "pieces"}
        slim["weights"] = [p.get("weights") for p in pieces]
        print(dump(slim))
    return EXIT_OK if realizable else EXIT_REALIZE


def cmd_check_category(args) -> int:
    cat = load_category(args.category, check=False)
    rep = axiom_check(cat)
    summary = rep.summary()
    if args.json:
        print(dump({"schema_version": SCHEMA_VERSION, "category": cat.name, "ok": rep.ok,
                    "families": summary, "failures": rep.failures()}))
    else:
        for fam, ok in summary.items():
            print(f"{fam:12} {'pass' if ok else 'FAIL'}")
        for f in rep.failures():
            print(f"  {f}")
        print("all axioms pass" if rep.ok else "axiom check failed")
    return EXIT_OK if rep.ok else EXIT_CATEGORY


def cmd_oracle(args) -> int:
    d = read_diagram(args.pd)
    cat = load_category(args.category)
    colouring = parse_colours(args.color)
    vals = run_oracles(d, cat, colouring)
    got = [v for k, v in vals.items() if not k.endswith("_error")]
    agree = bool(got) and len(set(got)) == 1
    if args.json:
        print(dump(dict(vals, schema_version=SCHEMA_VERSION, agree=agree)))
    else:
        for k, v in vals.items():
            print(f"{k}: {v}")
        print(f"agreement: {'yes' if agree else 'no'}")
    return EXIT_OK if agree else EXIT_ORACLE


def bench_rows(k_min: int, k_max: int, cat) -> list[dict]:
    from qli.corpus import torus2

    rows = []
    N = cat.max_dim
    for k in range(k_min, k_max + 1):
        d = parse_pd(torus2(k))
        t0 = time.perf_counter()
        r = compute_invariant(d, cat)
        dt = time.perf_counter() - t0
        cw = r.stats.congestion
        n = d.n_vertices
        rows.append({
            "k": k, "n": n, "cw": cw, "scalar_ops": r.stats.scalar_ops,
            "bound": n * N ** math.ceil(1.5 * cw), "ops_per_n": r.stats.scalar_ops / n,
            "peak_len": r.stats.peak_len, "seconds": round(dt, 6),
        })
    return rows


def cmd_bench(args) -> int:
    if args.family != "torus2":
        raise CliError(f"unknown family {args.family!r}", EXIT_PARSE)
    cat = load_category(args.category)
    rows = bench_rows(args.min, args.max, cat)
    monotone = all(a["scalar_ops"] <= b["scalar_ops"] for a, b in zip(rows, rows[1:]))
    if args.json:
        print(dump({"schema_version": SCHEMA_VERSION, "family": args.family, "rows": rows,
                    "monotone": monotone}))
    else:
        print(f"{'k':>3} {'n':>3} {'cw':>3} {'ops':>10} {'bound':>10} {'ops/n':>9} {'sec':>8}")
        for r in rows:
            print(f"{r['k']:>3} {r['n']:>3} {r['cw']:>3} {r['scalar_ops']:>10} {r['bound']:>10} "
                  f"{r['ops_per_n']:>9.1f} {r['seconds']:>8.3f}")
        print(f"monotone: {'yes' if monotone else 'no'}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qli", description="Quantum link invariants from PD diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, category=True):
        sp.add_argument("pd", help="PD file, or - for stdin")
        if category:
            sp.add_argument("--category", default="sl2", help="built-in name or JSON file (default sl2)")
            sp.add_argument("--color", action="append", metavar="i=NAME",
                            help="colour component i (1-based) with object NAME; repeatable")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    c = sub.add_parser("compute", help="evaluate the invariant")
    common(c)
    c.add_argument("--backend", choices=("exact", "modular"), default="exact")
    c.add_argument("--decomposition", choices=STRATEGIES, default="auto")
    c.add_argument("--normalize-framing", action="store_true",
                   help="divide by phi^writhe (framing independent value)")
    c.add_argument("--reduce", action="store_true", help="divide by the value of a plain loop")
    c.add_argument("--emit-plan", action="store_true", help="include the plan and cost estimate")
    c.add_argument("--root-edge", type=int, default=None, metavar="k",
                   help="root at the k-th realizable tree edge")
    c.add_argument("--cheapest", action="store_true",
                   help="compare strategies and roots by estimated cost")
    c.add_argument("--oracle-check", action="store_true")
    c.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    c.add_argument("--primes-extra", type=int, default=0, metavar="k")
    c.add_argument("-v", "--verbose", action="store_true")
    c.set_defaults(func=cmd_compute)

    dc = sub.add_parser("decompose", help="carving tree and its weights")
    common(dc, category=False)
    dc.add_argument("--decomposition", choices=STRATEGIES, default="auto")
    dc.add_argument("--root-edge", type=int, default=None, metavar="k")
    dc.set_defaults(func=cmd_decompose)

    cc = sub.add_parser("check-category", help="run the ribbon axiom suite")
    cc.add_argument("category", help="built-in name or JSON file")
    cc.add_argument("--json", action="store_true")
    cc.set_defaults(func=cmd_check_category)

    o = sub.add_parser("oracle", help="brute-force reference values")
    common(o)
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="operation counts on a diagram family")
    b.add_argument("--family", default="torus2")
    b.add_argument("--min", type=int, default=3)
    b.add_argument("--max", type=int, default=11)
    b.add_argument("--category", default="sl2")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DiagramError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CategoryError as exc:
        print(f"category error: {exc}", file=sys.stderr)
        if exc.report is not None:
            for f in exc.report.failures():
                print(f"  {f}", file=sys.stderr)
        return EXIT_CATEGORY
    except NotRealizable as exc:
        print(f"realization failed: {exc}", file=sys.stderr)
        return EXIT_REALIZE
    except (PlanError, BoundViolation, ArithmeticError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
