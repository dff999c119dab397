"""Experiment driver: strategies x seeds, class statistics, automata and artifacts.

Output layout under the chosen directory::

    tables/    action-class statistics, Wilcoxon p-values, coverage, triage
    reports/   per-run test reports (one CSV per menu plus index.html)
    automata/  one interaction automaton per strategy (Graphviz dot)
    logs/      one run log per strategy and seed

Class statistics count the actions each strategy selected; the prefix
replayed to reach an episode's start state is logged but not counted.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import warnings
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .app import AppSpec
from .catalog import Catalog, load_catalog
from .explorer import ExplorerConfig, QModel, RunLog, Strategy, TestCase, run_strategy
from .presets import app_preset, catalog_preset, plan_path
from .reporting import generate_report, render
from .stats import summarize, wilcoxon_paired_one_tail
from .taxonomy import TABLE_CLASSES, ActionClass
from .testplan import (
    CoverageResult,
    coverage_from_flags,
    coverage_table,
    load_plan,
    oracle_table,
    reference_flags,
    triage,
    triage_text,
    verify_oracles,
)

log = logging.getLogger(__name__)

STRATEGIES = tuple(s.value for s in Strategy)


class ExperimentError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Counting and automata
# ---------------------------------------------------------------------------


def class_counts(run_log: RunLog) -> dict[ActionClass, int]:
    """Selected actions per class, Other included, prefix replays excluded."""
    out = {c: 0 for c in ActionClass}
    for e in run_log.entries:
        if e.phase != "prefix":
            out[e.action_class] += 1
    return out


@dataclass
class InteractionAutomaton:
    nodes: dict[ActionClass, int] = field(default_factory=dict)
    edges: dict[tuple[ActionClass, ActionClass], int] = field(default_factory=dict)
    ends: dict[ActionClass, int] = field(default_factory=dict)

    def scaled(self, factor: float) -> dict:
        return {
            "nodes": {k: v * factor for k, v in self.nodes.items()},
            "edges": {k: v * factor for k, v in self.edges.items()},
        }


def build_automaton(run_logs: Union[RunLog, Iterable[RunLog]]) -> InteractionAutomaton:
    """Class frequencies and consecutive-pair frequencies within episodes."""
    logs = [run_logs] if isinstance(run_logs, RunLog) else list(run_logs)
    auto = InteractionAutomaton({c: 0 for c in TABLE_CLASSES})
    for rl in logs:
        for episode in rl.episodes():
            seq = [e.action_class for e in episode if e.phase != "prefix" and e.action_class in TABLE_CLASSES]
            for c in seq:
                auto.nodes[c] += 1
            for a, b in zip(seq, seq[1:]):
                auto.edges[(a, b)] = auto.edges.get((a, b), 0) + 1
            if seq:
                auto.ends[seq[-1]] = auto.ends.get(seq[-1], 0) + 1
    return auto


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:.1f}"


def automaton_dot(auto: InteractionAutomaton, name: str, runs: int = 1) -> str:
    """Graphviz text with mean node and edge weights over ``runs`` runs."""
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    for c in TABLE_CLASSES:
        lines.append(f'  "{c.value}" [label="{c.value}\\n{_fmt(auto.nodes.get(c, 0) / runs)}"];')
    for (a, b), w in sorted(auto.edges.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)):
        lines.append(f'  "{a.value}" -> "{b.value}" [label="{_fmt(w / runs)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    app_preset: str = "erp-like"
    strategies: tuple[str, ...] = STRATEGIES
    repetitions: int = 5
    seed: int = 0
    episodes: int = 50
    actions_per_episode: int = 30
    epsilon: float = 0.7
    p_complex: float = 0.5
    pi: float = 0.5
    alpha: float = 0.9
    gamma: float = 0.9
    catalog: Optional[str] = None
    plan: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(Strategy(s).value for s in self.strategies))
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        self.explorer(Strategy.RLS, 0)  # validates the explorer settings

    @property
    def seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.repetitions)]

    def explorer(self, strategy, seed: int) -> ExplorerConfig:
        return ExplorerConfig(
            epsilon=self.epsilon, p_complex=self.p_complex, pi=self.pi, episodes=self.episodes,
            actions_per_episode=self.actions_per_episode, alpha=self.alpha, gamma=self.gamma,
            strategy=Strategy(strategy), seed=seed,
        )

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown experiment settings: {sorted(unknown)}")
        data = dict(data)
        if "strategies" in data:
            data["strategies"] = tuple(data["strategies"])
        return cls(**data)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from None
    return ExperimentConfig.from_dict(data)


@dataclass
class RunResult:
    strategy: str
    seed: int
    tests: list[TestCase]
    log: RunLog
    counts: dict[ActionClass, int]
    model: Optional[QModel] = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list[RunResult] = field(default_factory=list)
    summary: dict[str, dict[ActionClass, tuple[float, Optional[float]]]] = field(default_factory=dict)
    wilcoxon: dict[str, dict[ActionClass, float]] = field(default_factory=dict)
    automata: dict[str, InteractionAutomaton] = field(default_factory=dict)
    coverage: dict[str, CoverageResult] = field(default_factory=dict)

    def runs_of(self, strategy: str) -> list[RunResult]:
        return [r for r in self.runs if r.strategy == strategy]

    def counts(self, strategy: str, klass: ActionClass) -> list[int]:
        return [r.counts[klass] for r in self.runs_of(strategy)]

    def mean(self, strategy: str, klass: ActionClass) -> float:
        c = self.counts(strategy, klass)
        return sum(c) / len(c)


def resolve_inputs(cfg: ExperimentConfig) -> tuple[AppSpec, Catalog]:
    app = app_preset(cfg.app_preset)
    catalog = load_catalog(cfg.catalog) if cfg.catalog else catalog_preset(cfg.app_preset)
    return app, catalog


def resolve_plan(cfg: ExperimentConfig):
    if cfg.plan:
        return load_plan(cfg.plan)
    p = plan_path(cfg.app_preset)
    return load_plan(p) if p.is_dir() else None


def suite(runs: Sequence[RunResult]) -> list[TestCase]:
    """All tests of several runs, renamed ``S<seed>T<k>`` to keep ids unique."""
    out = []
    for r in runs:
        for t in r.tests:
            out.append(TestCase(f"S{r.seed}{t.id}", t.steps, t.strategy, t.seed, t.prefix_length))
    return out


def run_experiment(cfg: ExperimentConfig, out_dir: Union[str, Path, None] = None) -> ExperimentResult:
    """Run every strategy for every seed, aggregate, and optionally write artifacts."""
    app, catalog = resolve_inputs(cfg)
    res = ExperimentResult(cfg)
    for strategy in cfg.strategies:
        for seed in cfg.seeds:
            log.info("running %s seed %d", strategy, seed)
            try:
                tests, model, run_log = run_strategy(app, catalog, cfg.explorer(strategy, seed))
            except Exception as exc:
                raise ExperimentError(f"run {strategy} seed {seed} failed: {exc}") from exc
            res.runs.append(RunResult(strategy, seed, tests, run_log, class_counts(run_log), model))
    for strategy in cfg.strategies:
        runs = res.runs_of(strategy)
        res.automata[strategy] = build_automaton([r.log for r in runs])
        res.summary[strategy] = {}
        for c in TABLE_CLASSES:
            values = [r.counts[c] for r in runs]
            if len(values) >= 2:
                res.summary[strategy][c] = summarize(values)
            else:
                res.summary[strategy][c] = (float(values[0]), None)
    if cfg.repetitions < 2:
        warnings.warn("a single repetition gives no standard deviation and no Wilcoxon test")
    elif Strategy.RLS.value in cfg.strategies:
        for strategy in cfg.strategies:
            if strategy == Strategy.RLS.value:
                continue
            res.wilcoxon[strategy] = {
                c: wilcoxon_paired_one_tail(res.counts(Strategy.RLS.value, c), res.counts(strategy, c))
                for c in TABLE_CLASSES
            }
    plan = resolve_plan(cfg)
    if plan is not None:
        for strategy in cfg.strategies:
            res.coverage[strategy] = verify_oracles(plan, suite(res.runs_of(strategy)))
    if out_dir is not None:
        write_artifacts(res, Path(out_dir), plan)
    return res


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------


def _csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def stats_table(res: ExperimentResult) -> str:
    header = ["Strategy"]
    for c in TABLE_CLASSES:
        header += [f"{c.value} m", f"{c.value} s"]
    rows = [header]
    for strategy, per in res.summary.items():
        row = [strategy]
        for c in TABLE_CLASSES:
            m, s = per[c]
            row += [f"{m:.1f}", "" if s is None else f"{s:.1f}"]
        rows.append(row)
    return _csv(rows)


def runs_table(res: ExperimentResult) -> str:
    rows = [["Strategy", "Seed"] + [c.value for c in ActionClass] + ["Divergences"]]
    for r in res.runs:
        rows.append([r.strategy, r.seed] + [r.counts[c] for c in ActionClass] + [r.log.divergences])
    return _csv(rows)


def wilcoxon_table(res: ExperimentResult) -> str:
    rows = [["Alternative: RLS < strategy"] + [c.value for c in TABLE_CLASSES]]
    for strategy, per in res.wilcoxon.items():
        rows.append([strategy] + [f"{per[c]:.4f}" for c in TABLE_CLASSES])
    return _csv(rows)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def write_artifacts(res: ExperimentResult, out: Path, plan=None) -> None:
    cfg = res.config
    try:
        _write(out / "tables" / "action_classes.csv", stats_table(res))
        _write(out / "tables" / "runs.csv", runs_table(res))
        if res.wilcoxon:
            _write(out / "tables" / "wilcoxon.csv", wilcoxon_table(res))
        if res.coverage:
            _write(out / "tables" / "coverage.csv", coverage_table(res.coverage))
            for strategy, cov in res.coverage.items():
                _write(out / "tables" / f"oracles-{strategy}.csv", oracle_table(cov))
                _write(out / "tables" / f"triage-{strategy}.txt", triage_text(triage(plan, cov)))
            sat, ver = reference_flags(plan)
            ref = coverage_from_flags(plan, sat, ver)
            _write(out / "tables" / "triage-reference.txt", triage_text(triage(plan, ref)))
        for strategy, auto in res.automata.items():
            _write(out / "automata" / f"{strategy}.dot", automaton_dot(auto, strategy, cfg.repetitions))
        for r in res.runs:
            _write(out / "logs" / f"{r.strategy}-seed{r.seed}.tsv", r.log.to_text())
            report, index = generate_report(r.tests)
            render(report, index, out / "reports" / f"{r.strategy}-seed{r.seed}")
        _write(out / "config.json", json.dumps(_config_dict(cfg), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ExperimentError(f"cannot write artifacts under {out}: {exc}") from exc


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    d["strategies"] = list(d["strategies"])
    # keep the artifact tree free of machine-specific paths
    for key in ("catalog", "plan"):
        if d[key]:
            d[key] = Path(d[key]).name
    return d
