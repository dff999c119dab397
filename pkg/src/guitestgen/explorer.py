"""Q-learning GUI exploration: the RLS strategy and its semi-systematic variants.

RLS selects actions epsilon-greedily over a Q-model whose rewards measure
how much an action changes the GUI. The SSRLS variants add two constraints
on top of it:

* menu partitioning: every episode performs exactly one graphical-menu
  action, first, and menu actions are disabled for the rest of the episode;
* fill forms: on an input form, with probability ``pi``, every empty field
  on every tab is filled from the catalog and the form is submitted.
"""
from __future__ import annotations

import enum
import hashlib
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Optional, Sequence, Union

from .app import (
    ROLE_SUBMIT,
    ROLE_TAB,
    Action,
    AppSpec,
    GuiState,
    OutputEvent,
    Widget,
    WidgetKind,
    WorldState,
    build_app,
    diff_widgets,
    enabled_actions,
    execute,
)
from .catalog import Catalog, lookup
from .taxonomy import ActionClass, classify_action

HOME = "Home"


class Strategy(str, enum.Enum):
    RLS = "RLS"
    SSRLS_PARTITIONING = "SSRLS_partitioning"
    SSRLS_FILLFORMS = "SSRLS_fillForms"
    SSRLS = "SSRLS"

    @property
    def partitioning(self) -> bool:
        return self in (Strategy.SSRLS, Strategy.SSRLS_PARTITIONING)

    @property
    def fill_forms(self) -> bool:
        return self in (Strategy.SSRLS, Strategy.SSRLS_FILLFORMS)


class PreconditionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExplorerConfig:
    epsilon: float = 0.7
    p_complex: float = 0.5
    pi: float = 0.5
    episodes: int = 50
    actions_per_episode: int = 30
    # Q-learning constants; not given by the method description, chosen here.
    alpha: float = 0.9
    gamma: float = 0.9
    strategy: Strategy = Strategy.RLS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        for name in ("epsilon", "p_complex", "pi"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.episodes < 0 or self.actions_per_episode < 0:
            raise ValueError("episodes and actions_per_episode must be >= 0")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExplorerConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown explorer settings: {sorted(unknown)}")
        return cls(**data)


# ---------------------------------------------------------------------------
# State abstraction and reward
# ---------------------------------------------------------------------------


def _value_class(w: Widget) -> str:
    if w.kind in (WidgetKind.TEXT, WidgetKind.LIST, WidgetKind.COMBO):
        return "non-empty" if w.value else "empty"
    if w.kind is WidgetKind.GRID:
        return "non-empty" if w.value not in (None, "", "0") else "empty"
    return ""


def abstract_state(gui: GuiState) -> str:
    """Hash of the foreground title and the abstracted widget tuples."""
    items = sorted((w.kind.value, w.label, w.state, _value_class(w)) for w in gui.widgets)
    digest = hashlib.sha1(repr((gui.foreground.label, items)).encode()).hexdigest()
    return digest[:16]


def reward(prev: GuiState, nxt: GuiState, model: "QModel") -> float:
    """Fraction of widgets changed by a transition, halved for known targets."""
    added, removed, changed, union = diff_widgets(prev, nxt)
    if not union:
        return 0.0
    frac = len(added | removed | changed) / len(union)
    novelty = 0.5 if abstract_state(nxt) in model.states else 1.0
    return novelty * frac


# ---------------------------------------------------------------------------
# Q-model
# ---------------------------------------------------------------------------


@dataclass
class Transition:
    successor: str
    q: float = 0.0
    visits: int = 0


@dataclass(frozen=True)
class WitnessStep:
    action: Action
    state: Optional[str]  # None inside complex actions, where no state is learned


class QModel:
    """Learned state graph: Q-values per (abstract state, action signature)."""

    def __init__(self):
        self.initial: Union[str, None] = None
        self.states: set[str] = set()
        self.table: dict[str, dict[str, Transition]] = {}
        self.witness_paths: dict[str, tuple[WitnessStep, ...]] = {}
        self.divergences = 0

    def __len__(self):
        return len(self.states)

    @property
    def transitions(self) -> dict[tuple[str, str], Transition]:
        return {(s, a): t for s, row in self.table.items() for a, t in row.items()}

    def add_state(self, state: str, witness: Sequence[WitnessStep] = ()) -> None:
        if self.initial is None:
            self.initial = state
        self.states.add(state)
        known = self.witness_paths.get(state)
        if known is None or len(witness) < len(known):
            self.witness_paths[state] = tuple(witness)

    def q(self, state: str, signature: str) -> float:
        t = self.table.get(state, {}).get(signature)
        return t.q if t is not None else 0.0

    def max_q(self, state: str) -> float:
        row = self.table.get(state)
        if not row:
            return 0.0
        return max(0.0, max(t.q for t in row.values()))


def q_update(model: QModel, s: str, a: str, r: float, s_next: str, cfg: ExplorerConfig) -> QModel:
    """One Q-learning step on ``(s, a)``; adds ``s_next`` and the transition if new."""
    if s not in model.states:
        raise PreconditionError(f"state {s} is not in the model")
    target = r + cfg.gamma * model.max_q(s_next)
    row = model.table.setdefault(s, {})
    t = row.get(a)
    if t is None:
        t = row[a] = Transition(s_next)
    t.successor = s_next
    t.q = t.q + cfg.alpha * (target - t.q)
    t.visits += 1
    if s_next not in model.states:
        model.states.add(s_next)
    return model


def epsilon_greedy_select(
    model: QModel, state: str, candidates: Sequence[Action], cfg: ExplorerConfig, rng: random.Random
) -> Action:
    if not candidates:
        raise ValueError("no candidate actions")
    if state not in model.states or rng.random() < cfg.epsilon:
        return rng.choice(candidates)
    row = model.table.get(state, {})

    def score(a: Action):
        t = row.get(a.signature)
        return (-(t.q if t is not None else 0.0), a.signature)

    return min(candidates, key=score)


# ---------------------------------------------------------------------------
# Executed steps and test cases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    action: Action
    events: tuple[OutputEvent, ...]
    target: Widget
    menu: str
    phase: str = "loop"
    state_from: str = ""
    state_to: str = ""
    reward: Union[float, None] = None

    @property
    def operation(self) -> str:
        """Menu-qualified operation name, e.g. ``Invoices.Save``."""
        if self.target.kind is WidgetKind.MENU:
            return self.target.label
        return f"{self.menu}.{self.target.label}"

    @property
    def action_class(self) -> ActionClass:
        return classify_action(self)


@dataclass
class TestCase:
    id: str
    steps: list[Step] = field(default_factory=list)
    strategy: str = ""
    seed: int = 0
    prefix_length: int = 0

    __test__ = False  # not a pytest class

    @property
    def actions(self) -> list[Action]:
        return [s.action for s in self.steps]


def run_step(world: WorldState, action: Action, menu: str, phase: str = "loop") -> Step:
    """Execute one bound action and wrap it with its context."""
    gui = world.gui
    target = gui.by_id()[action.target]
    _, events = execute(world, action)
    if target.kind is WidgetKind.MENU:
        menu = target.label
    return Step(action, tuple(events), target, menu, phase)


class _Episode:
    """Book-keeping for one episode: the world, the learned model and the trace."""

    def __init__(self, world, model, catalog, cfg, rng, prefix, path):
        self.world = world
        self.model = model
        self.catalog = catalog
        self.cfg = cfg
        self.rng = rng
        self.steps: list[Step] = list(prefix)
        self.path: list[WitnessStep] = list(path)
        self.menu = prefix[-1].menu if prefix else HOME
        self.state = abstract_state(world.gui)
        self.budget_used = 0
        model.add_state(self.state, self.path)

    def bind(self, action: Action) -> Action:
        if action.bound:
            return action
        widget = self.world.gui.by_id()[action.target]
        return action.bind(lookup(self.catalog, widget, self.rng))

    def do(self, action: Action, phase: str, learn: bool = True) -> Step:
        """Execute one primitive action; ``learn=False`` inside complex actions."""
        action = self.bind(action)
        prev_gui = self.world.gui
        step = run_step(self.world, action, self.menu, phase)
        nxt_gui = self.world.gui
        s_next = abstract_state(nxt_gui)
        r = None
        if learn:
            r = reward(prev_gui, nxt_gui, self.model)
            q_update(self.model, self.state, action.signature, r, s_next, self.cfg)
            self.path.append(WitnessStep(action, s_next))
            self.model.add_state(s_next, self.path)
        else:
            self.path.append(WitnessStep(action, None))
        step = Step(step.action, step.events, step.target, step.menu, phase, self.state, s_next, r)
        self.steps.append(step)
        self.menu = step.menu
        self.state = s_next
        if phase in ("loop", "complex", "fill"):
            self.budget_used += 1
        return step

    def candidates(self, menus_disabled: bool) -> list[Action]:
        acts = enabled_actions(self.world)
        if menus_disabled:
            widgets = self.world.gui.by_id()
            acts = [a for a in acts if not widgets[a.target].is_menu_action]
        return acts

    def fill_and_submit(self, phase: str) -> None:
        """Run the complex action; the model learns it as a single transition."""
        s0, gui0 = self.state, self.world.gui
        signature = f"{gui0.foreground.id}|fill_and_submit"
        for action in fill_and_submit_actions(self.world, self.catalog, self.rng):
            self.do(action, phase, learn=False)
        r = reward(gui0, self.world.gui, self.model)
        q_update(self.model, s0, signature, r, self.state, self.cfg)
        self.path[-1] = WitnessStep(self.path[-1].action, self.state)
        self.model.add_state(self.state, self.path)
        last = self.steps[-1]
        self.steps[-1] = Step(last.action, last.events, last.target, last.menu, last.phase,
                              last.state_from, last.state_to, r)

    def rls_action(self, menus_disabled: bool) -> bool:
        """One RLS decision: the ABT complex action or an epsilon-greedy pick."""
        complex_action = maybe_complex_action(self.world, self.cfg, self.rng)
        if complex_action is not None:
            self.fill_and_submit("complex")
            return True
        cands = self.candidates(menus_disabled)
        if not cands:
            return False
        self.do(epsilon_greedy_select(self.model, self.state, cands, self.cfg, self.rng), "loop")
        return True


# ---------------------------------------------------------------------------
# Complex action
# ---------------------------------------------------------------------------


def fill_and_submit_actions(world: WorldState, catalog: Catalog, rng: random.Random) -> Iterator[Action]:
    """Yield the fill-and-submit actions one at a time.

    Reads the world again after every yield, so the caller must execute each
    action before asking for the next one. Visits the active tab first, then
    the others in order; fills every empty text field from the catalog and
    picks a value for every empty list or combo field, then clicks Save.
    """
    gui = world.gui
    if not gui.is_input_form:
        raise PreconditionError("fill_and_submit needs an input form in the foreground")
    tabs = [w for w in gui.widgets if w.role == ROLE_TAB and w.window == gui.foreground.label]
    active = [w for w in tabs if w.state == "disabled"]
    order = active + [w for w in tabs if w.state != "disabled"] if tabs else [None]
    for tab in order:
        if tab is not None and tab.state != "disabled":
            yield Action(tab.id, "click")
        for w in [w for w in world.gui.widgets if w.window == gui.foreground.label]:
            if w.value:
                continue
            if w.kind is WidgetKind.TEXT and w.state == "editable":
                yield Action(w.id, "fill", lookup(catalog, w, rng))
            elif w.kind in (WidgetKind.LIST, WidgetKind.COMBO) and w.state == "selectable":
                yield Action(w.id, "pick", rng.choice(w.values))
    save = [w for w in world.gui.widgets if w.role == ROLE_SUBMIT]
    yield Action(save[0].id, "click")


def fill_and_submit(
    world: WorldState, catalog: Catalog, rng: random.Random
) -> tuple[WorldState, list[tuple[Action, list[OutputEvent]]]]:
    """Fill every empty field of the foreground form, then submit it."""
    out = []
    for action in fill_and_submit_actions(world, catalog, rng):
        _, events = execute(world, action)
        out.append((action, events))
    return world, out


def maybe_complex_action(world: WorldState, cfg: ExplorerConfig, rng: random.Random) -> Union[Callable, None]:
    """The ABT complex action, chosen with probability ``p_complex`` when admissible.

    It is admissible only on input forms whose fields all sit on one page;
    the tab-aware variant belongs to the fill-forms constraint.
    """
    if not world.gui.single_page_form:
        return None
    if rng.random() < cfg.p_complex:
        return fill_and_submit
    return None


# ---------------------------------------------------------------------------
# Episodes
# ---------------------------------------------------------------------------


WorldFactory = Callable[[], WorldState]


def go_to_random_state(
    model: QModel, world_factory: WorldFactory, rng: random.Random
) -> tuple[WorldState, list[Step]]:
    """Reset the world and replay the witness path of a random model state.

    Falls back to the initial page (and counts a divergence) when the replay
    does not reproduce the recorded abstract states.
    """
    world = world_factory()
    if not model.states:
        return world, []
    target = rng.choice(sorted(model.states))
    path = model.witness_paths.get(target, ())
    steps: list[Step] = []
    menu, state = HOME, abstract_state(world.gui)
    for ws in path:
        enabled = {a.signature for a in enabled_actions(world)}
        if ws.action.signature not in enabled:
            break
        step = run_step(world, ws.action, menu, "prefix")
        menu, s_next = step.menu, abstract_state(world.gui)
        if ws.state is not None and s_next != ws.state:
            break
        steps.append(Step(step.action, step.events, step.target, menu, "prefix", state, s_next))
        state = s_next
    else:
        return world, steps
    model.divergences += 1
    return world_factory(), []


def _start(model, world_factory, catalog, cfg, rng) -> _Episode:
    if model.initial is None:
        model.add_state(abstract_state(world_factory().gui), ())
    world, prefix = go_to_random_state(model, world_factory, rng)
    path = [WitnessStep(s.action, s.state_to) for s in prefix]
    return _Episode(world, model, catalog, cfg, rng, prefix, path)


def run_episode_rls(world_factory, model, catalog, cfg, rng, test_id="T1") -> tuple[TestCase, QModel]:
    ep = _start(model, world_factory, catalog, cfg, rng)
    prefix_len = len(ep.steps)
    while ep.budget_used < cfg.actions_per_episode:
        if not ep.rls_action(menus_disabled=False):
            break
    return TestCase(test_id, ep.steps, cfg.strategy.value, cfg.seed, prefix_len), model


def run_episode_ssrls(world_factory, model, catalog, cfg, rng, test_id="T1") -> tuple[TestCase, QModel]:
    strategy = cfg.strategy
    if strategy is Strategy.RLS:
        raise PreconditionError("run_episode_ssrls needs an SSRLS strategy")
    ep = _start(model, world_factory, catalog, cfg, rng)
    prefix_len = len(ep.steps)
    if strategy.partitioning:
        menu_done = any(s.target.is_menu_action for s in ep.steps)
        if not menu_done:
            menus = [a for a in enabled_actions(ep.world) if ep.world.gui.by_id()[a.target].kind is WidgetKind.MENU]
            ep.do(epsilon_greedy_select(model, ep.state, menus, cfg, rng), "menu")
    while ep.budget_used < cfg.actions_per_episode:
        if strategy.fill_forms and ep.world.gui.is_input_form and rng.random() < cfg.pi:
            ep.fill_and_submit("fill")
            continue
        if not ep.rls_action(menus_disabled=strategy.partitioning):
            break
    return TestCase(test_id, ep.steps, strategy.value, cfg.seed, prefix_len), model


def run_episode(world_factory, model, catalog, cfg, rng, test_id="T1") -> tuple[TestCase, QModel]:
    if cfg.strategy is Strategy.RLS:
        return run_episode_rls(world_factory, model, catalog, cfg, rng, test_id)
    return run_episode_ssrls(world_factory, model, catalog, cfg, rng, test_id)


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogEntry:
    episode: int
    index: int
    phase: str
    signature: str
    value: Union[str, None]
    action_class: ActionClass
    reward: Union[float, None]
    state_from: str
    state_to: str


@dataclass
class RunLog:
    app: str = ""
    strategy: str = ""
    seed: int = 0
    entries: list[LogEntry] = field(default_factory=list)
    divergences: int = 0

    HEADER = ("episode", "step", "phase", "action", "value", "class", "reward", "from", "to")

    def episodes(self) -> list[list[LogEntry]]:
        out: dict[int, list[LogEntry]] = {}
        for e in self.entries:
            out.setdefault(e.episode, []).append(e)
        return [out[k] for k in sorted(out)]

    def to_text(self) -> str:
        lines = [
            "# guitestgen run log",
            f"# app={self.app} strategy={self.strategy} seed={self.seed} divergences={self.divergences}",
            "\t".join(self.HEADER),
        ]
        for e in self.entries:
            lines.append(
                "\t".join(
                    [
                        str(e.episode),
                        str(e.index),
                        e.phase,
                        e.signature,
                        _escape(e.value) if e.value is not None else "-",
                        e.action_class.value,
                        f"{e.reward:.6f}" if e.reward is not None else "-",
                        e.state_from or "-",
                        e.state_to or "-",
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunLog":
        log = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            if line.startswith("# app="):
                meta = dict(kv.split("=", 1) for kv in line[2:].split())
                log.app = meta.get("app", "")
                log.strategy = meta.get("strategy", "")
                log.seed = int(meta.get("seed", 0))
                log.divergences = int(meta.get("divergences", 0))
                continue
            if not line or line.startswith("#") or line.startswith("episode\t"):
                continue
            parts = line.split("\t")
            if len(parts) != len(cls.HEADER):
                raise ValueError(f"run log line {lineno}: expected {len(cls.HEADER)} columns, got {len(parts)}")
            ep, idx, phase, sig, value, klass, rew, s0, s1 = parts
            log.entries.append(
                LogEntry(
                    int(ep), int(idx), phase, sig,
                    None if value == "-" else _unescape(value),
                    ActionClass(klass),
                    None if rew == "-" else float(rew),
                    "" if s0 == "-" else s0,
                    "" if s1 == "-" else s1,
                )
            )
        return log

    def actions(self) -> list[list[Action]]:
        """Per-episode concrete actions, for replaying the run."""
        out = []
        for entries in self.episodes():
            acts = []
            for e in entries:
                target, verb = e.signature.split("|")[:2]
                acts.append(Action(target, verb, e.value))
            out.append(acts)
        return out


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(s: str) -> str:
    out, i = [], 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s):
            out.append({"t": "\t", "n": "\n", "\\": "\\"}.get(s[i + 1], s[i + 1]))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def log_test(log: RunLog, episode: int, test: TestCase) -> None:
    for i, step in enumerate(test.steps, 1):
        log.entries.append(
            LogEntry(
                episode, i, step.phase, step.action.signature, step.action.value,
                step.action_class, step.reward, step.state_from, step.state_to,
            )
        )


def run_strategy(app_spec: AppSpec, catalog: Catalog, cfg: ExplorerConfig) -> tuple[list[TestCase], QModel, RunLog]:
    """Run ``cfg.episodes`` episodes of ``cfg.strategy`` from a fresh model."""
    rng = random.Random(cfg.seed)
    model = QModel()
    tests = []
    log = RunLog(app_spec.name, cfg.strategy.value, cfg.seed)

    def factory():
        return build_app(app_spec)

    for k in range(1, cfg.episodes + 1):
        test, model = run_episode(factory, model, catalog, cfg, rng, f"T{k}")
        tests.append(test)
        log_test(log, k, test)
    log.divergences = model.divergences
    return tests, model, log


def replay_log(app_spec: AppSpec, log: RunLog) -> list[TestCase]:
    """Rebuild the test cases of a run by replaying its logged actions."""
    tests = []
    for k, actions in enumerate(log.actions(), 1):
        world = build_app(app_spec)
        steps, menu = [], HOME
        for a in actions:
            step = run_step(world, a, menu)
            menu = step.menu
            steps.append(step)
        tests.append(TestCase(f"T{k}", steps, log.strategy, log.seed))
    return tests
