"""Command line interface: ``guitestgen {run,explore,report,verify}``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import harness
from .explorer import RunLog, Strategy, replay_log, run_strategy
from .presets import app_preset, PRESETS
from .reporting import generate_report, render
from .taxonomy import TABLE_CLASSES
from .testplan import coverage_table, load_plan, oracle_table, triage, triage_text, verify_oracles

ENV_OUT = "GUITESTGEN_OUT"
DEFAULT_OUT = "out"


def output_dir(arg: Optional[str]) -> Path:
    """--out wins over the environment, which wins over the default."""
    return Path(arg or os.environ.get(ENV_OUT) or DEFAULT_OUT)


def _experiment_flags(p: argparse.ArgumentParser, multi_strategy: bool) -> None:
    p.add_argument("--config", help="JSON file with experiment settings; flags override it")
    p.add_argument("--app-preset", choices=PRESETS)
    if multi_strategy:
        p.add_argument("--strategy", action="append", choices=[s.value for s in Strategy],
                       help="strategy to run (repeatable; default: all four)")
        p.add_argument("--repetitions", type=int)
    else:
        p.add_argument("--strategy", choices=[s.value for s in Strategy], default=None)
    p.add_argument("--episodes", type=int)
    p.add_argument("--actions-per-episode", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--pcomplex", type=float)
    p.add_argument("--pi", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--catalog", help="catalog file (default: the preset's catalog)")
    p.add_argument("--plan", help="test plan directory or file (default: the preset's plan, if any)")


def _config(args) -> harness.ExperimentConfig:
    cfg = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    strategies = args.strategy
    if isinstance(strategies, str):
        strategies = [strategies]
    return cfg.with_overrides(
        app_preset=args.app_preset,
        strategies=tuple(strategies) if strategies else None,
        repetitions=getattr(args, "repetitions", None),
        episodes=args.episodes,
        actions_per_episode=args.actions_per_episode,
        epsilon=args.epsilon,
        p_complex=args.pcomplex,
        pi=args.pi,
        seed=args.seed,
        catalog=args.catalog,
        plan=args.plan,
    )


def cmd_run(args) -> int:
    cfg = _config(args)
    out = output_dir(args.out)
    res = harness.run_experiment(cfg, out)
    print(f"{len(res.runs)} runs of {cfg.app_preset}, artifacts in {out}")
    print(harness.stats_table(res), end="")
    return 0


def cmd_explore(args) -> int:
    cfg = _config(args)
    strategy = args.strategy or Strategy.SSRLS.value
    cfg = cfg.with_overrides(strategies=(strategy,), repetitions=1)
    app, catalog = harness.resolve_inputs(cfg)
    tests, model, run_log = run_strategy(app, catalog, cfg.explorer(strategy, cfg.seed))
    out = output_dir(args.out)
    stem = f"{strategy}-seed{cfg.seed}"
    (out / "logs").mkdir(parents=True, exist_ok=True)
    (out / "logs" / f"{stem}.tsv").write_text(run_log.to_text(), encoding="utf-8")
    report, index = generate_report(tests)
    render(report, index, out / "reports" / stem)
    auto = harness.build_automaton(run_log)
    (out / "automata").mkdir(parents=True, exist_ok=True)
    (out / "automata" / f"{strategy}.dot").write_text(harness.automaton_dot(auto, strategy), encoding="utf-8")
    counts = harness.class_counts(run_log)
    print(f"{len(tests)} test cases, {len(model.states)} model states, {model.divergences} divergences")
    print(", ".join(f"{c.value}={counts[c]}" for c in TABLE_CLASSES))
    return 0


def _load_log(path: str) -> RunLog:
    try:
        return RunLog.from_text(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise SystemExit(f"guitestgen: cannot read run log {path}: {exc.strerror}")


def _replayed(args, path: str):
    run_log = _load_log(path)
    preset = args.app_preset or run_log.app
    tests = replay_log(app_preset(preset), run_log)
    return run_log, tests


def cmd_report(args) -> int:
    out = output_dir(args.out)
    for path in args.log:
        _, tests = _replayed(args, path)
        report, index = generate_report(tests)
        target = out / "reports" / Path(path).stem
        render(report, index, target)
        print(f"{len(tests)} test cases rendered to {target}")
    return 0


def cmd_verify(args) -> int:
    out = output_dir(args.out)
    results = {}
    plan = None
    for path in args.log:
        run_log, tests = _replayed(args, path)
        if plan is None:
            plan_arg = args.plan or str(harness.plan_path(args.app_preset or run_log.app))
            plan = load_plan(plan_arg)
        results[Path(path).stem] = verify_oracles(plan, tests)
    tables = out / "tables"
    tables.mkdir(parents=True, exist_ok=True)
    (tables / "coverage.csv").write_text(coverage_table(results), encoding="utf-8")
    for name, cov in results.items():
        (tables / f"oracles-{name}.csv").write_text(oracle_table(cov), encoding="utf-8")
        (tables / f"triage-{name}.txt").write_text(triage_text(triage(plan, cov)), encoding="utf-8")
    print(coverage_table(results), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="guitestgen", description="Q-learning GUI test generation experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the full experiment")
    _experiment_flags(p, multi_strategy=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("explore", help="run a single strategy once")
    _experiment_flags(p, multi_strategy=False)
    p.add_argument("--out")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("report", help="render test reports from run logs")
    p.add_argument("--log", action="append", required=True)
    p.add_argument("--app-preset", choices=PRESETS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("verify", help="check run logs against a test plan")
    p.add_argument("--log", action="append", required=True)
    p.add_argument("--plan")
    p.add_argument("--app-preset", choices=PRESETS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ValueError, harness.ExperimentError, OSError) as exc:
        print(f"guitestgen: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
