"""Command-line front end.

Subcommands: integrate (one quadrature run), lattice (rule construction
and quality), transform (point / grid export), bench (suite runner), and
fit (power-law cost fits on a suite CSV). Exit codes: 0 success, 1 usage
error, 2 numerical failure, 3 infeasible under the desk-scale caps.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

from . import bench, corpus, exprcore
from .bench import CSV_COLUMNS, MDI_DIM_CAP, MODELS, SUITES, DegenerateDataError, RunRecord
from .exprcore import BudgetExceededError, ParseError, UnassignedVariableError
from .lattice import WeightModel, cbc_construct, korobov_search, korobov_vector, p_alpha
from .mdi import DIRECT_CAP, GridCapError, MdiConfig
from .quad import implr_integrate, mc_integrate, mdilr_integrate, slr_integrate
from .transform import forward_transform, grid_completion

__all__ = ["cli_main", "main"]


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _weight_model(spec, d):
    """Parse a --weights spec: 'default', 'anchored[:c]', or 'g1,g2,...'."""
    if spec is None or spec == "default":
        return WeightModel.default(d)
    if spec.startswith("anchored"):
        _, _, c = spec.partition(":")
        gamma = tuple(1.0 / j ** 2 for j in range(1, d + 1))
        return WeightModel.anchored(gamma, c=float(c) if c else 1.0)
    gamma = tuple(float(tok) for tok in spec.split(","))
    if len(gamma) != d:
        raise ValueError(f"--weights lists {len(gamma)} values for dimension {d}")
    return WeightModel.unanchored(gamma)


def _resolve_integrand(text, d):
    if text in corpus.all_ids():
        return corpus.corpus_expr(text, d), corpus.reference_value(text, d)
    return exprcore.parse(text, d), None


def _append_csv(record, path):
    path = Path(path)
    fresh = not path.exists()
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(CSV_COLUMNS)
        row = []
        for col in CSV_COLUMNS:
            v = getattr(record, col)
            row.append("" if v is None else (repr(v) if isinstance(v, float) else str(v)))
        writer.writerow(row)


def _cmd_integrate(args):
    d = args.dim
    expr, ref = _resolve_integrand(args.integrand, d)
    n, a = args.n, args.a
    if n is None and a is None:
        raise ValueError("provide --n, --a, or both")
    if n is None:
        n = a ** d + 1
    if a is None and args.method != "mc":
        a = 1 if d == 1 else int(round(n ** (1.0 / d)))

    cap = math.inf if args.unbounded else DIRECT_CAP
    if args.method == "mc":
        if n > cap:
            raise GridCapError(f"{n} samples exceed the direct cap {DIRECT_CAP}")
        res = mc_integrate(expr, d, n, seed=args.seed, reference=ref)
    elif args.method == "slr":
        if n > cap:
            raise GridCapError(f"{n} lattice points exceed the direct cap {DIRECT_CAP}")
        res = slr_integrate(expr, korobov_vector(a, n, d), reference=ref)
    elif args.method == "implr":
        res = implr_integrate(expr, d, a, n, cap=cap, reference=ref)
    else:
        if d > MDI_DIM_CAP and not args.unbounded:
            raise GridCapError(f"dimension {d} exceeds the cap {MDI_DIM_CAP}; pass --unbounded")
        cfg = MdiConfig(m=args.m, budget=args.budget)
        res = mdilr_integrate(expr, d, a, n, cfg=cfg, reference=ref)

    if not math.isfinite(res.value):
        _err(f"non-finite result {res.value}")
        return 2
    print(f"method={res.method} integrand={args.integrand} d={d} n={n}" +
          (f" a={a}" if a is not None else ""))
    print(f"value={res.value!r}")
    if ref is not None:
        print(f"reference={ref!r}")
        print(f"rel_error={res.rel_error:.6e}")
    print(f"seconds={res.seconds:.6f}")
    if args.csv:
        name = args.integrand if ref is not None else "expr"
        _append_csv(RunRecord(method=res.method, integrand=name, d=d, n=n, a=a,
                              value=res.value, reference=ref, rel_error=res.rel_error,
                              seconds=res.seconds,
                              seed=args.seed if args.method == "mc" else None),
                    args.csv)
    return 0


def _search_rule(n, d, weights, criterion="p2"):
    model = _weight_model(weights, d)
    return korobov_search(n, d, weights=model, criterion=criterion)


def _cmd_lattice(args):
    d = args.dim
    if args.action == "gen":
        if args.a is None:
            rule = _search_rule(args.n, d, args.weights)
        else:
            rule = korobov_vector(args.a, args.n, d)
        print(f"n={rule.n} d={rule.d} z={rule.z}")
    elif args.action == "quality":
        if args.a is None:
            rule = _search_rule(args.n, d, args.weights)
        else:
            rule = korobov_vector(args.a, args.n, d)
        value = p_alpha(rule, args.alpha)
        print(f"n={rule.n} d={rule.d} z={rule.z}")
        print(f"P_{args.alpha}={value!r}")
    elif args.action == "cbc":
        model = _weight_model(args.weights, d)
        rule = cbc_construct(args.n, d, model)
        print(f"n={rule.n} d={rule.d} z={rule.z}")
    else:
        rule = _search_rule(args.n, d, args.weights, criterion=args.criterion)
        print(f"n={rule.n} d={rule.d} a={rule.z[1] if d > 1 else 1} z={rule.z}")
    return 0


def _cmd_transform(args):
    d = args.dim
    rule = korobov_vector(args.a, args.n, d)
    if args.action == "points":
        count = rule.n if args.limit is None else min(rule.n, args.limit)
        out = open(args.out, "w", newline="") if args.out else sys.stdout
        try:
            writer = csv.writer(out)
            writer.writerow(["j"] + [f"y{i + 1}" for i in range(d)])
            for j in range(count):
                writer.writerow([j] + [repr(float(v)) for v in forward_transform(rule, j)])
        finally:
            if args.out:
                out.close()
    else:
        grids, missing = grid_completion(rule)
        print(f"n={rule.n} d={rule.d} z={rule.z}")
        print(f"counts={grids.counts} total={grids.total} completion={missing}")
        if args.out:
            with open(args.out, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["axis", "index", "node"])
                for i, nodes in enumerate(grids.nodes, start=1):
                    for t, v in enumerate(nodes):
                        writer.writerow([i, t, repr(v)])
    return 0


def _cmd_bench(args):
    out = args.out or f"{args.suite}.csv"
    records = bench.run_suite(args.suite, out, seed=args.seed,
                              unbounded=args.unbounded,
                              figures=not args.no_figures, verbose=True)
    ok = sum(1 for r in records if r.status == "ok")
    skipped = len(records) - ok
    print(f"suite={args.suite} rows={len(records)} ok={ok} skipped={skipped}")
    print(f"csv={out}")
    return 0


def _cmd_fit(args):
    rows = bench.read_rows(args.infile)
    if args.integrand:
        rows = [r for r in rows if r["integrand"] == args.integrand]
    if args.method:
        rows = [r for r in rows if r["method"] == args.method]
    if args.dim:
        rows = [r for r in rows if r["d"] == args.dim]
    if args.model == "all":
        results = bench.fit_all(rows)
        for res in results:
            print(res.formatted())
        print(f"best={results[0].model}")
    else:
        print(bench.fit_power_law(rows, args.model).formatted())
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="latquad",
        description="Lattice-rule quadrature engine: rank-one rules, the "
                    "transformed tensor-grid rule, and dimension iteration.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="run one quadrature evaluation")
    p.add_argument("--integrand", required=True,
                   help="corpus id (see README) or an expression in x[1..d]")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--a", type=int, help="Korobov parameter; default round(n^(1/d))")
    p.add_argument("--n", type=int, help="rule size; default a^dim + 1")
    p.add_argument("--method", choices=("mc", "slr", "implr", "mdilr"), default="mdilr")
    p.add_argument("--m", type=int, default=1, help="axes folded per iteration level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=exprcore.DEFAULT_NODE_BUDGET,
                   help="symbolic node budget before numeric fallback")
    p.add_argument("--csv", help="append the run as a CSV row to this path")
    p.add_argument("--unbounded", action="store_true",
                   help="lift the desk-scale caps (may run for a long time)")
    p.set_defaults(func=_cmd_integrate)

    p = sub.add_parser("lattice", help="construct and assess rank-one rules")
    p.add_argument("action", choices=("gen", "quality", "cbc", "search"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--a", type=int, help="Korobov parameter (gen/quality)")
    p.add_argument("--alpha", type=int, default=2, choices=(2, 4))
    p.add_argument("--weights", help="'default', 'anchored[:c]', or g1,g2,...")
    p.add_argument("--criterion", choices=("wce", "p2"), default="wce")
    p.set_defaults(func=_cmd_lattice)

    p = sub.add_parser("transform", help="export transformed points or axis grids")
    p.add_argument("action", choices=("points", "grid"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--limit", type=int, help="max points to export (points action)")
    p.add_argument("--out", help="write CSV here instead of stdout (points) / summary only (grid)")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("bench", help="run a benchmark suite to CSV + figures")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--out", help="CSV path; default <suite>.csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unbounded", action="store_true")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("fit", help="power-law cost fit over a suite CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--model", choices=MODELS + ("all",), default="all")
    p.add_argument("--integrand", help="restrict rows to one integrand id")
    p.add_argument("--method", help="restrict rows to one method")
    p.add_argument("--dim", type=int, help="restrict rows to one dimension")
    p.set_defaults(func=_cmd_fit)
    return parser


def cli_main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except DegenerateDataError as exc:
        _err(exc)
        return 2
    except (GridCapError, BudgetExceededError) as exc:
        _err(exc)
        return 3
    except (ParseError, UnassignedVariableError, ValueError, KeyError, OSError) as exc:
        _err(exc)
        return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
