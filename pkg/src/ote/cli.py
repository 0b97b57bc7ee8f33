"""Command-line interface: simulate / bench / sweep-m.

Experiment settings come from flags, from a flat key=value config file
(--config), or both; flags override file values. Output is a per-repetition
CSV plus an aligned summary table on stdout, with figures rendered next to
the CSV unless --no-figures is given. Exit code 0 on success, 1 on any
error (with a one-line reason on stderr).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    ALL_METHODS,
    CsvSource,
    ExperimentConfig,
    ScenarioSource,
    aggregate,
    format_summary,
    format_sweep,
    run,
    sweep_m,
    write_results_csv,
    write_sweep_csv,
)
from .dataset import write_csv
from .simgen import ScenarioSpec, SimConfig, generate
from .tree import GrowParams

_DEFAULTS = {
    "label_column": "y",
    "k": 1,
    "sim_seed": 0,
    "theta1": 0.5,
    "theta2": 15.0,
    "methods": ",".join(ALL_METHODS),
    "split_fraction": 0.7,
    "reps": 100,
    "trees": 1500,
    "m_fraction": 0.2,
    "min_node_size": 1,
    "min_impurity_decrease": 0.0,
    "seed": 0,
    "workers": 1,
    "figures": True,
}

_CASTS = {
    "csv": str,
    "label_column": str,
    "positive_label": str,
    "scenario": int,
    "k": int,
    "n": int,
    "sim_seed": int,
    "theta1": float,
    "theta2": float,
    "methods": str,
    "split_fraction": float,
    "reps": int,
    "trees": int,
    "m_fraction": float,
    "v_fraction": float,
    "sub_fraction": float,
    "mtry": int,
    "min_node_size": int,
    "max_depth": int,
    "min_impurity_decrease": float,
    "seed": int,
    "workers": int,
    "out": str,
    "figures": bool,
    "dump_splits": str,
    "m_fractions": str,
}


def _parse_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CASTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        cast = _CASTS[key]
        if cast is bool:
            if value.lower() not in ("true", "false"):
                raise ValueError(f"{path}:{lineno}: {key} must be true or false")
            values[key] = value.lower() == "true"
        else:
            values[key] = cast(value)
    return values


def _effective(args: argparse.Namespace) -> dict:
    eff = dict(_DEFAULTS)
    if getattr(args, "config", None):
        eff.update(_parse_config_file(args.config))
    for key in _CASTS:
        flag = getattr(args, key, None)
        if flag is not None:
            eff[key] = flag
    if getattr(args, "no_figures", False):
        eff["figures"] = False
    return eff


def _experiment_config(eff: dict) -> ExperimentConfig:
    has_csv = "csv" in eff
    has_scenario = "scenario" in eff
    if has_csv and has_scenario:
        raise ValueError("give either a --csv or a --scenario source, not both")
    if has_csv:
        if "positive_label" not in eff:
            raise ValueError("--positive-label is required with a CSV source")
        source = CsvSource(eff["csv"], eff["label_column"], eff["positive_label"])
    elif has_scenario:
        if "n" not in eff:
            raise ValueError("--n (rows to generate) is required with a scenario source")
        source = ScenarioSource(
            scenario=eff["scenario"],
            k=eff["k"],
            n=eff["n"],
            seed=eff["sim_seed"],
            theta1=eff["theta1"],
            theta2=eff["theta2"],
        )
    else:
        raise ValueError("no data source: give --csv PATH or --scenario N")
    methods = tuple(m.strip() for m in eff["methods"].split(",") if m.strip())
    params = GrowParams(
        mtry=eff.get("mtry"),
        min_node_size=eff["min_node_size"],
        max_depth=eff.get("max_depth"),
        min_impurity_decrease=eff["min_impurity_decrease"],
    )
    return ExperimentConfig(
        source=source,
        methods=methods,
        split_fraction=eff["split_fraction"],
        repetitions=eff["reps"],
        n_trees=eff["trees"],
        top_m_fraction=eff["m_fraction"],
        v_fraction=eff.get("v_fraction"),
        sub_fraction=eff.get("sub_fraction"),
        params=params,
        base_seed=eff["seed"],
        workers=eff["workers"],
    )


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec = ScenarioSpec(args.scenario, args.k)
    config = SimConfig(n=args.n, theta1=args.theta1, theta2=args.theta2, seed=args.seed)
    data = generate(spec, config)
    write_csv(data, args.out, label_column=args.label_column)
    print(f"wrote {data.n} rows x {data.d} features to {args.out}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    eff = _effective(args)
    if "out" not in eff:
        raise ValueError("--out CSV path is required")
    config = _experiment_config(eff)
    rows = run(config, dump_splits_dir=eff.get("dump_splits"))
    out = Path(eff["out"])
    write_results_csv(rows, out)
    summaries = aggregate(rows)
    print(format_summary(summaries))
    print(f"results: {out}")
    if eff["figures"]:
        from .plots import render_bench_figure

        fig = render_bench_figure(summaries, out.with_name(out.stem + "_metrics.png"))
        print(f"figure: {fig}")
    return 0


def _cmd_sweep_m(args: argparse.Namespace) -> int:
    eff = _effective(args)
    if "out" not in eff:
        raise ValueError("--out CSV path is required")
    if "m_fractions" not in eff:
        raise ValueError("--m-fractions is required (comma-separated, e.g. 0.1,0.2,0.4)")
    fractions = [float(v) for v in eff["m_fractions"].split(",") if v.strip()]
    config = _experiment_config(eff)
    blocks = sweep_m(config, fractions)
    out = Path(eff["out"])
    write_sweep_csv(blocks, out)
    print(format_sweep(blocks))
    print(f"results: {out}")
    if eff["figures"]:
        from .plots import render_sweep_figure

        fig = render_sweep_figure(blocks, out.with_name(out.stem + "_sweep.png"))
        print(f"figure: {fig}")
    return 0


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    src = p.add_argument_group("data source")
    src.add_argument("--csv", help="CSV file with a header row")
    src.add_argument("--label-column", dest="label_column", help="label column name (default y)")
    src.add_argument("--positive-label", dest="positive_label",
                     help="label value mapped to class 1")
    src.add_argument("--scenario", type=int, help="synthetic scenario 1..4")
    src.add_argument("--k", type=int, help="scenario complexity variant 1..4 (default 1)")
    src.add_argument("--n", type=int, help="rows to generate per repetition")
    src.add_argument("--sim-seed", dest="sim_seed", type=int, help="generator seed (default 0)")
    src.add_argument("--theta1", type=float)
    src.add_argument("--theta2", type=float)
    proto = p.add_argument_group("protocol")
    proto.add_argument("--methods", help=f"comma list from {','.join(ALL_METHODS)}")
    proto.add_argument("--split-fraction", dest="split_fraction", type=float,
                       help="train fraction per repetition (default 0.7)")
    proto.add_argument("--reps", type=int, help="repetitions (default 100)")
    proto.add_argument("--trees", type=int, help="trees grown per forest (default 1500)")
    proto.add_argument("--m-fraction", dest="m_fraction", type=float,
                       help="candidate pool as a fraction of trees (default 0.2)")
    proto.add_argument("--v-fraction", dest="v_fraction", type=float,
                       help="validation share carved off by ote (default 0.1)")
    proto.add_argument("--sub-fraction", dest="sub_fraction", type=float,
                       help="sub-sample size share for ote_sub (default 0.9)")
    proto.add_argument("--mtry", type=int, help="features tried per split (default ceil(sqrt(d)))")
    proto.add_argument("--min-node-size", dest="min_node_size", type=int)
    proto.add_argument("--max-depth", dest="max_depth", type=int)
    proto.add_argument("--min-impurity-decrease", dest="min_impurity_decrease", type=float)
    proto.add_argument("--seed", type=int, help="base seed (default 0)")
    proto.add_argument("--workers", type=int, help="worker processes (default 1)")
    outg = p.add_argument_group("output")
    outg.add_argument("--out", help="result CSV path")
    outg.add_argument("--no-figures", dest="no_figures", action="store_true",
                      help="skip figure rendering")
    outg.add_argument("--dump-splits", dest="dump_splits",
                      help="directory for per-repetition train/test index files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ote", description="Optimal-tree ensemble benchmarks and data generation"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="emit a synthetic scenario dataset as CSV")
    sim.add_argument("--scenario", type=int, required=True, help="scenario 1..4")
    sim.add_argument("--k", type=int, default=1, help="complexity variant 1..4")
    sim.add_argument("--n", type=int, required=True, help="rows to generate")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--theta1", type=float, default=0.5)
    sim.add_argument("--theta2", type=float, default=15.0)
    sim.add_argument("--label-column", dest="label_column", default="y")
    sim.add_argument("--out", required=True, help="CSV path to write")
    sim.set_defaults(func=_cmd_simulate)

    bench = sub.add_parser("bench", help="run a benchmark experiment")
    _add_experiment_flags(bench)
    bench.set_defaults(func=_cmd_bench)

    sweep = sub.add_parser("sweep-m", help="benchmark across candidate-pool fractions")
    _add_experiment_flags(sweep)
    sweep.add_argument("--m-fractions", dest="m_fractions",
                       help="comma-separated fractions, e.g. 0.1,0.2,0.4")
    sweep.set_defaults(func=_cmd_sweep_m)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # one-line reason, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
