"""Command-line front end: generate, solve, verify, bench, curves.

Rationals cross the CLI boundary as 'p/q' strings so nothing is ever
rounded.  Exit codes: 0 success, 1 failed verification or benchmark rows,
2 usage or parameter errors.  Report-style commands (bench, curves) render
companion figures next to their data files unless told not to.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis
from .errors import McTspError, SchemaError
from .graph import Tour, total_weight, validate_tour
from .instances import (
    GenSpec,
    generate,
    instance_digest,
    instance_to_dict,
    parse_fraction,
    read_instance,
    write_instance,
)
from .oracles import oracle_tours
from .pareto import ParetoSet, coverage_beta

ALGORITHMS = ("tree-doubling", "christofides", "cycle-cover")


def _frac(text: str) -> Fraction:
    try:
        return parse_fraction(text, field="argument")
    except SchemaError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mctsp",
        description="Approximate Pareto curves for multi-criteria TSP variants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--variant", required=True, help="instance family, e.g. gamma_metric_undirected")
    g.add_argument("--gamma", type=_frac, default=None, help="strength parameter as p/q")
    g.add_argument("--scale", type=int, default=20)
    g.add_argument("--one-fraction", type=_frac, default=Fraction(1, 2))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None, help="instance file (default: stdout)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run an algorithm (or the exact oracle) on an instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--algorithm", choices=ALGORITHMS, default=None)
    s.add_argument("--oracle", action="store_true", help="emit the exact tour front instead")
    s.add_argument("--eps", type=_frac, default=Fraction(1, 10))
    s.add_argument("--beta-cap", type=_frac, default=None, help="declared weight-spread cap")
    s.add_argument("--policy", default="aggregate-heaviest")
    s.add_argument("--join", default="canonical")
    s.add_argument("--seed", type=int, default=0, help="recorded in the output for provenance")
    s.add_argument("--out", default=None, help="solution file (default: stdout)")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a solution file against the exact oracle")
    v.add_argument("--instance", required=True)
    v.add_argument("--solution", required=True)
    v.add_argument("--oracle", choices=("tours",), default="tours")
    v.add_argument("--out", default=None, help="report file (default: stdout)")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run an experiment config, emit JSON-lines reports")
    b.add_argument("--config", required=True)
    b.add_argument("--out", default=None, help="JSONL file (default: stdout)")
    b.add_argument("--no-plot", action="store_true")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("curves", help="tabulate guarantee formulas over a gamma grid")
    c.add_argument("--grid-start", type=_frac, default=Fraction(1, 2))
    c.add_argument("--grid-end", type=_frac, default=Fraction(1))
    c.add_argument("--grid-step", type=_frac, default=Fraction(1, 100))
    c.add_argument("--out", default=None, help="CSV file (default: stdout)")
    c.add_argument("--no-plot", action="store_true")
    c.add_argument("--plot-dir", default=None)
    c.set_defaults(func=cmd_curves)
    return parser


def cmd_generate(args) -> int:
    spec = GenSpec(
        n=args.n,
        k=args.k,
        variant=args.variant,
        seed=args.seed,
        gamma=args.gamma,
        scale=args.scale,
        one_fraction=args.one_fraction,
    )
    inst = generate(spec)
    if args.out:
        write_instance(inst, args.out)
    else:
        json.dump(instance_to_dict(inst), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _front_to_dict(front: ParetoSet, inst, meta: dict) -> dict:
    items = []
    for it in front:
        tour: Tour = it.solution
        items.append(
            {
                "weight": list(it.weight),
                "order": list(tour.order),
                "edges": [list(e) for e in tour.edges()],
                "source": [[label, [list(e) for e in key]] for label, key in it.source],
            }
        )
    return {
        "version": 1,
        "instance_digest": instance_digest(inst),
        "count": len(items),
        "items": items,
        **meta,
    }


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    if args.oracle:
        front = oracle_tours(inst)
        meta = {
            "algorithm": "oracle-tours",
            "eps": "0",
            "seed": args.seed,
            "model": {"variant": "exact"},
            "bound": None,
            "subroutine_contract": "exhaustive enumeration",
        }
    else:
        if args.algorithm is None:
            raise McTspError("pick --algorithm or pass --oracle")
        kwargs = {}
        if args.algorithm == "cycle-cover":
            kwargs = {"beta_cap": args.beta_cap, "policy": args.policy, "join": args.join}
        front = analysis.run_algorithm(inst, args.algorithm, args.eps, **kwargs)
        model = analysis.model_for_algorithm(inst, args.algorithm, args.eps, args.beta_cap)
        meta = {
            "algorithm": args.algorithm,
            "eps": str(args.eps),
            "seed": args.seed,
            "model": {
                "variant": model.variant,
                "gamma": None if model.gamma is None else str(model.gamma),
                "eps": str(model.eps),
                "alpha": None if model.alpha is None else str(model.alpha),
                "beta": None if model.beta is None else str(model.beta),
            },
            "bound": str(analysis.ratio_bound(model)),
            "subroutine_contract": (
                "randomized (1+eps)-approximate Pareto curve, success >= 1 - 1/(2p); "
                "backed here by deterministic enumeration"
            ),
        }
    doc = _front_to_dict(front, inst, meta)
    payload = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return 0


def cmd_verify(args) -> int:
    inst = read_instance(args.instance)
    with open(args.solution, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != 1:
        raise SchemaError(f"solution version: expected 1, got {doc.get('version')!r}")
    if doc.get("instance_digest") != instance_digest(inst):
        raise SchemaError(
            "solution was produced for a different instance "
            f"(digest {doc.get('instance_digest')!r} vs {instance_digest(inst)})"
        )
    problems = []
    from .pareto import ParetoItem, filter_dominated
    from .graph import WeightVector

    items = []
    for i, raw in enumerate(doc.get("items", [])):
        tour = Tour(tuple(raw["order"]), inst.directed)
        validate_tour(inst, tour)
        w = total_weight(inst, tour.edges())
        if list(w) != list(raw["weight"]):
            problems.append(
                f"item {i}: stored weight {raw['weight']} != recomputed {list(w)}"
            )
        items.append(ParetoItem(WeightVector(raw["weight"]), tour))
    front = ParetoSet("tour", tuple(items))
    beta = coverage_beta(front, oracle_tours(inst)).beta if items else None
    model_raw = doc.get("model", {})
    if model_raw.get("variant") == "exact" or "bound" not in doc or doc["bound"] is None:
        bound = Fraction(1)
    else:
        bound = parse_fraction(doc["bound"], field="bound")
    passed = not problems and beta is not None and beta <= bound
    report = {
        "algorithm": doc.get("algorithm"),
        "bound": str(bound),
        "empirical_beta": None if beta is None else str(beta),
        "instance": {"digest": instance_digest(inst), "n": inst.n, "k": inst.k},
        "passed": passed,
        "problems": problems,
        "variant": model_raw.get("variant"),
    }
    payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return 0 if passed else 1


def cmd_bench(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        config = json.load(fh)
    rows = analysis.run_experiment(config)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            analysis.write_reports(rows, fh)
        if not args.no_plot:
            from .figures import render_bench_betas

            png = str(Path(args.out).with_suffix(".png"))
            if render_bench_betas(rows, png):
                print(f"figure: {png}", file=sys.stderr)
    else:
        analysis.write_reports(rows, sys.stdout)
    print(analysis.summarize(rows), file=sys.stderr)
    return 1 if any(not r.passed for r in rows) else 0


def cmd_curves(args) -> int:
    grid = []
    g = args.grid_start
    while g <= args.grid_end:
        grid.append(g)
        g += args.grid_step
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            rows = analysis.emit_curves(grid, fh)
        if not args.no_plot:
            from .figures import render_ratio_curves

            base = Path(args.out)
            plot_dir = Path(args.plot_dir) if args.plot_dir else base.parent
            plot_dir.mkdir(parents=True, exist_ok=True)
            out_stsp = str(plot_dir / (base.stem + "_stsp.png"))
            out_atsp = str(plot_dir / (base.stem + "_atsp.png"))
            for name in render_ratio_curves(rows, out_stsp, out_atsp):
                print(f"figure: {name}", file=sys.stderr)
    else:
        analysis.emit_curves(grid, sys.stdout)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except McTspError as exc:
        print(f"mctsp: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"mctsp: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
