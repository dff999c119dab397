"""Seeded simulator of menu-driven business applications.

The simulated application has a top bar of permanently enabled actions
(one graphical menu per entity type plus decoy buttons), an entity page
per entity type with CRUD buttons and a data grid, multi-tab input forms
and a small in-memory database whose mutations are recorded in a change
log.
"""
from __future__ import annotations

import enum
import hashlib
import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, Union

VALUE_KINDS = ("text", "list", "combo", "date", "email", "numeric-id")
DATE_RE = re.compile(r"^(0[1-9]|[12][0-9]|3[01])-(0[1-9]|1[0-2])-[0-9]{4}$")


class AppSpecError(ValueError):
    """Raised when an application definition violates one of its invariants."""


class ActionNotEnabled(RuntimeError):
    """Raised when executing an action that the current GUI does not offer."""


class WidgetKind(str, enum.Enum):
    MENU = "GraphicalMenu"
    BUTTON = "Button"
    TEXT = "TextField"
    LIST = "ListField"
    COMBO = "ComboBoxField"
    GRID = "DataGrid"
    WINDOW = "Window"


WIDGET_STATES = {
    WidgetKind.MENU: ("enabled", "disabled"),
    WidgetKind.BUTTON: ("enabled", "disabled"),
    WidgetKind.TEXT: ("editable", "blocked"),
    WidgetKind.LIST: ("selectable", "blocked"),
    WidgetKind.COMBO: ("selectable", "blocked"),
    WidgetKind.GRID: ("",),
    WidgetKind.WINDOW: ("foreground", "background"),
}

# Widget roles used by the explorer and the action classifier.
ROLE_MENU = "menu"
ROLE_TOPBAR = "topbar"
ROLE_CRUD = "crud"
ROLE_SUBMIT = "submit"
ROLE_CANCEL = "cancel"
ROLE_CLOSE = "close"
ROLE_TAB = "tab"
ROLE_FIELD = "field"

VERBS = ("click", "select", "fill", "pick")


# ---------------------------------------------------------------------------
# Declarative definition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    label: str
    kind: str = "text"
    required: bool = False
    tab: int = 0
    values: tuple[str, ...] = ()
    default: Union[str, tuple[str, ...], None] = None
    column: Union[str, None] = ""

    @property
    def db_column(self) -> Union[str, None]:
        """Database column name; ``None`` when the field is not persisted."""
        if self.column is None:
            return None
        if self.column:
            return self.column
        return re.sub(r"[^A-Z0-9]+", "_", self.label.upper()).strip("_")


@dataclass(frozen=True)
class EntityTypeSpec:
    name: str
    fields: tuple[FieldSpec, ...]
    tabs: int = 1
    tab_names: tuple[str, ...] = ()
    singular: str = ""
    table: str = ""
    has_view: bool = True
    has_edit: bool = True
    has_delete: bool = True
    has_new: bool = True
    initial_records: int = 0

    @property
    def item(self) -> str:
        if self.singular:
            return self.singular
        return self.name[:-1] if self.name.endswith("s") else self.name

    @property
    def table_name(self) -> str:
        return self.table or re.sub(r"[^A-Z0-9]+", "_", self.name.upper())

    def tab_label(self, index: int) -> str:
        if index < len(self.tab_names):
            return self.tab_names[index]
        return f"{self.item} - Tab {index + 1}"

    @property
    def required_count(self) -> int:
        return sum(f.required for f in self.fields)

    @property
    def min_save_length(self) -> int:
        """Length of the shortest action sequence that inserts a record.

        Menu, CRUD button, one fill per required field, the tab switches
        needed to reach them, and Save.
        """
        tabs = {f.tab for f in self.fields if f.required} - {0}
        return 2 + self.required_count + len(tabs) + 1


@dataclass(frozen=True)
class AppSpec:
    entity_types: tuple[EntityTypeSpec, ...]
    global_menu_actions: int
    seed: int = 0
    name: str = "app"
    decoy_labels: tuple[str, ...] = ()

    def entity(self, name: str) -> EntityTypeSpec:
        for e in self.entity_types:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def decoys(self) -> tuple[str, ...]:
        n = self.global_menu_actions - len(self.entity_types)
        labels = list(self.decoy_labels[:n])
        labels += [f"Shortcut {i + 1:02d}" for i in range(len(labels), n)]
        return tuple(labels)


def validate_spec(spec: AppSpec) -> None:
    """Raise :class:`AppSpecError` naming the first violated invariant."""
    if not spec.entity_types:
        raise AppSpecError("AppSpec: at least one entity type is required")
    names = [e.name for e in spec.entity_types]
    if len(set(names)) != len(names):
        raise AppSpecError(f"AppSpec: entity type names must be unique, got {names}")
    if spec.global_menu_actions < len(spec.entity_types):
        raise AppSpecError(
            "AppSpec: global_menu_actions "
            f"({spec.global_menu_actions}) < number of entity types ({len(names)})"
        )
    if not 0 <= spec.seed < 2**64:
        raise AppSpecError("AppSpec: seed must be an unsigned 64-bit integer")
    for e in spec.entity_types:
        if e.tabs < 1:
            raise AppSpecError(f"{e.name}: tabs must be >= 1")
        if e.initial_records < 0:
            raise AppSpecError(f"{e.name}: initial_records must be >= 0")
        if not re.fullmatch(r"[A-Za-z0-9_]+", e.table_name):
            raise AppSpecError(f"{e.name}: table name {e.table_name!r} is not an identifier")
        labels = [f.label for f in e.fields]
        if len(set(labels)) != len(labels):
            raise AppSpecError(f"{e.name}: field labels must be unique")
        for f in e.fields:
            if f.kind not in VALUE_KINDS:
                raise AppSpecError(f"{e.name}.{f.label}: unknown value kind {f.kind!r}")
            if not 0 <= f.tab < e.tabs:
                raise AppSpecError(
                    f"{e.name}.{f.label}: field must belong to exactly one tab in [0, {e.tabs})"
                )
            if f.kind in ("list", "combo") and not f.values:
                raise AppSpecError(f"{e.name}.{f.label}: {f.kind} field needs values")


def is_valid_value(kind: str, value: Union[str, tuple[str, ...]]) -> bool:
    """Value-kind consistency used by Save; empty values are always consistent."""
    if not value:
        return True
    if kind == "email":
        return "@" in value
    if kind == "numeric-id":
        try:
            int(value)
        except (TypeError, ValueError):
            return False
        return True
    if kind == "date":
        return bool(DATE_RE.match(value))
    return True


# ---------------------------------------------------------------------------
# Observable GUI
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Widget:
    id: str
    kind: WidgetKind
    label: str
    state: str
    value: Union[str, tuple[str, ...], None] = None
    values: tuple[str, ...] = ()
    window: str = ""
    role: str = ""

    @property
    def column_labels(self) -> tuple[str, ...]:
        return self.values if self.kind is WidgetKind.GRID else ()

    @property
    def is_menu_action(self) -> bool:
        return self.role in (ROLE_MENU, ROLE_TOPBAR)

    def as_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "label": self.label,
            "state": self.state,
            "value": list(self.value) if isinstance(self.value, tuple) else self.value,
            "values": list(self.values),
            "window": self.window,
            "role": self.role,
        }


@dataclass(frozen=True)
class GuiState:
    windows: tuple[Widget, ...]
    widgets: tuple[Widget, ...]
    is_input_form: bool = False
    single_page_form: bool = False

    @property
    def foreground(self) -> Widget:
        return self.windows[0]

    def by_id(self) -> dict[str, Widget]:
        return {w.id: w for w in self.widgets}

    def grouped(self) -> dict[str, list[Widget]]:
        out: dict[str, list[Widget]] = {}
        for w in self.widgets:
            out.setdefault(w.window, []).append(w)
        return out


@dataclass(frozen=True)
class Action:
    target: str
    verb: str
    value: Union[str, None] = None

    @property
    def signature(self) -> str:
        if self.verb == "pick":
            return f"{self.target}|pick|{self.value}"
        return f"{self.target}|{self.verb}"

    def bind(self, value: str) -> "Action":
        return Action(self.target, self.verb, value)

    @property
    def bound(self) -> bool:
        return self.verb not in ("fill", "pick") or self.value is not None


@dataclass(frozen=True)
class GuiEvent:
    widget: Widget
    change: str  # added / changed / removed


@dataclass(frozen=True)
class DbChangeEvent:
    kind: str  # insert / delete / update
    table: str
    record: Mapping[str, str]
    prior_record: Union[Mapping[str, str], None] = None

    def __post_init__(self):
        if self.kind not in ("insert", "delete", "update"):
            raise ValueError(f"unknown db event kind {self.kind!r}")
        if (self.kind == "update") != (self.prior_record is not None):
            raise ValueError("update events carry a prior record, insert/delete do not")

    def as_dict(self) -> dict[str, Any]:
        d = {"kind": self.kind, "table": self.table, "record": dict(self.record)}
        if self.prior_record is not None:
            d["prior_record"] = dict(self.prior_record)
        return d


OutputEvent = Union[GuiEvent, DbChangeEvent]


# ---------------------------------------------------------------------------
# Live state
# ---------------------------------------------------------------------------


@dataclass
class _Screen:
    kind: str  # home / page / form / view / info
    entity: str = ""
    label: str = ""
    mode: str = ""
    record: int = -1
    tab: int = 0
    values: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "entity": self.entity,
            "label": self.label,
            "mode": self.mode,
            "record": self.record,
            "tab": self.tab,
            "values": {k: list(v) if isinstance(v, tuple) else v for k, v in self.values.items()},
        }


class WorldState:
    """Live state of one simulated application instance.

    Mutated in place by :func:`execute`; one owner at a time.
    """

    def __init__(self, spec: AppSpec):
        validate_spec(spec)
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.db: dict[str, list[dict[str, str]]] = {}
        self.change_log: list[DbChangeEvent] = []
        self.stack: list[_Screen] = [_Screen("home")]
        self._gui: Union[GuiState, None] = None
        self._topbar = self._build_topbar()
        self._entities = {e.name: e for e in spec.entity_types}
        for e in spec.entity_types:
            self.db[e.table_name] = [self._synthetic_record(e, i) for i in range(e.initial_records)]

    # -- construction helpers -------------------------------------------------

    def _build_topbar(self) -> tuple[Widget, ...]:
        out = []
        for i, e in enumerate(self.spec.entity_types):
            out.append(Widget(f"~top/{i:03d}", WidgetKind.MENU, e.name, "enabled", role=ROLE_MENU))
        base = len(out)
        for j, label in enumerate(self.spec.decoys):
            out.append(
                Widget(f"~top/{base + j:03d}", WidgetKind.BUTTON, label, "enabled", role=ROLE_TOPBAR)
            )
        return tuple(out)

    def _synthetic_record(self, e: EntityTypeSpec, i: int) -> dict[str, str]:
        rec = {}
        for f in e.fields:
            col = f.db_column
            if col is None:
                continue
            rec[col] = _encode(_synthetic_value(f, i, self.rng))
        return rec

    # -- GUI ------------------------------------------------------------------

    @property
    def gui(self) -> GuiState:
        if self._gui is None:
            self._gui = self._render()
        return self._gui

    def _window_title(self, s: _Screen) -> str:
        if s.kind == "home":
            return "Home"
        if s.kind == "page":
            return s.entity
        e = self._entities.get(s.entity)
        if s.kind == "form":
            return e.item
        if s.kind == "view":
            return f"View {e.item}"
        return s.label

    def _render(self) -> GuiState:
        windows = []
        for pos, s in enumerate(self.stack):
            title = self._window_title(s)
            windows.append(
                Widget(
                    f"{_key(s)}/000",
                    WidgetKind.WINDOW,
                    title,
                    "foreground" if pos == 0 else "background",
                    window=title,
                )
            )
        top = self.stack[0]
        content = self._content(top, windows[0].label)
        is_form = top.kind == "form"
        single = False
        if is_form:
            single = self._entities[top.entity].tabs == 1
        widgets = tuple(windows) + tuple(content) + self._topbar
        return GuiState(tuple(windows), widgets, is_input_form=is_form, single_page_form=single)

    def _content(self, s: _Screen, title: str) -> list[Widget]:
        k = _key(s)
        if s.kind == "home":
            return []
        if s.kind == "info":
            return [Widget(f"{k}/001", WidgetKind.BUTTON, "Close", "enabled", window=title, role=ROLE_CLOSE)]
        e = self._entities[s.entity]
        if s.kind == "page":
            n = len(self.db[e.table_name])
            rec_state = "enabled" if n else "disabled"
            out = []
            if e.has_new:
                out.append(Widget(f"{k}/001", WidgetKind.BUTTON, f"New {e.item}", "enabled", window=title, role=ROLE_CRUD))
            out.append(
                Widget(f"{k}/002", WidgetKind.GRID, f"{e.name} grid", "", value=str(n),
                       values=("ID", "Name", "Data", "Action"), window=title)
            )
            for idx, (flag, label) in enumerate(((e.has_view, "View"), (e.has_edit, "Edit"), (e.has_delete, "Delete"))):
                if flag:
                    out.append(Widget(f"{k}/{3 + idx:03d}", WidgetKind.BUTTON, label, rec_state, window=title, role=ROLE_CRUD))
            return out
        # form / view
        editable = s.kind == "form"
        out = []
        if editable:
            out.append(Widget(f"{k}/001", WidgetKind.BUTTON, "Save", "enabled", window=title, role=ROLE_SUBMIT))
            out.append(Widget(f"{k}/002", WidgetKind.BUTTON, "Close", "enabled", window=title, role=ROLE_CANCEL))
        else:
            out.append(Widget(f"{k}/002", WidgetKind.BUTTON, "Close", "enabled", window=title, role=ROLE_CLOSE))
        if e.tabs > 1:
            for t in range(e.tabs):
                out.append(
                    Widget(f"{k}/{10 + t:03d}", WidgetKind.BUTTON, e.tab_label(t),
                           "disabled" if t == s.tab else "enabled", window=title, role=ROLE_TAB)
                )
        for i, f in enumerate(e.fields):
            if f.tab != s.tab:
                continue
            out.append(_field_widget(f"{k}/{100 + i:03d}", f, s.values[f.label], editable, title))
        return out

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        rng_digest = hashlib.sha256(repr(self.rng.getstate()).encode()).hexdigest()
        return {
            "app": self.spec.name,
            "seed": self.spec.seed,
            "stack": [s.as_dict() for s in self.stack],
            "db": self.db,
            "change_log": [ev.as_dict() for ev in self.change_log],
            "rng_state": rng_digest,
        }

    def serialize(self) -> str:
        """Canonical text form (sorted-key JSON)."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _key(s: _Screen) -> str:
    if s.kind == "home":
        return "home"
    if s.kind == "info":
        return f"info:{s.label}"
    return f"{s.kind}:{s.entity}"


def _field_widget(wid: str, f: FieldSpec, value, editable: bool, window: str) -> Widget:
    if f.kind == "list":
        return Widget(wid, WidgetKind.LIST, f.label, "selectable" if editable else "blocked",
                      value=value, values=f.values, window=window, role=ROLE_FIELD)
    if f.kind == "combo":
        return Widget(wid, WidgetKind.COMBO, f.label, "selectable" if editable else "blocked",
                      value=tuple(value), values=f.values, window=window, role=ROLE_FIELD)
    return Widget(wid, WidgetKind.TEXT, f.label, "editable" if editable else "blocked",
                  value=value, window=window, role=ROLE_FIELD)


def _synthetic_value(f: FieldSpec, i: int, rng: random.Random):
    if f.kind == "list":
        return rng.choice(f.values)
    if f.kind == "combo":
        return (rng.choice(f.values),)
    if f.kind == "date":
        return f"{rng.randint(1, 28):02d}-{rng.randint(1, 12):02d}-{rng.randint(2010, 2019)}"
    if f.kind == "email":
        return f"user{i + 1}@example.com"
    if f.kind == "numeric-id":
        return str(rng.randint(1000, 9999))
    return f"{f.label} {i + 1}"


def _empty(f: FieldSpec):
    if f.default is not None:
        return tuple(f.default) if f.kind == "combo" else f.default
    return () if f.kind == "combo" else ""


def _encode(value) -> str:
    return ", ".join(value) if isinstance(value, tuple) else value


def _decode(f: FieldSpec, text: str):
    if f.kind == "combo":
        return tuple(v for v in text.split(", ") if v)
    return text


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def build_app(spec: AppSpec) -> WorldState:
    """Fresh world on the home page with the initial records loaded."""
    return WorldState(spec)


def enabled_actions(world: WorldState) -> list[Action]:
    """All executable actions, sorted by widget id then verb.

    ``fill`` actions are returned unbound (``value=None``); the caller binds
    a value before executing. ``pick`` actions come one per selectable value.
    """
    out = []
    for w in world.gui.widgets:
        if w.kind is WidgetKind.MENU and w.state == "enabled":
            out.append(Action(w.id, "select"))
        elif w.kind is WidgetKind.BUTTON and w.state == "enabled":
            out.append(Action(w.id, "click"))
        elif w.kind is WidgetKind.TEXT and w.state == "editable":
            out.append(Action(w.id, "fill"))
        elif w.kind in (WidgetKind.LIST, WidgetKind.COMBO) and w.state == "selectable":
            out.extend(Action(w.id, "pick", v) for v in w.values)
    out.sort(key=lambda a: (a.target, a.verb, a.value or ""))
    return out


def execute(world: WorldState, action: Action) -> tuple[WorldState, list[OutputEvent]]:
    """Apply ``action`` and return the world with the ordered output events.

    The world is updated in place and returned for convenience.
    """
    if action.verb not in VERBS:
        raise ActionNotEnabled(f"unknown verb {action.verb!r}")
    if action.verb in ("click", "select") and action.value is not None:
        raise ActionNotEnabled(f"{action.verb} takes no input value")
    if not action.bound:
        raise ActionNotEnabled(f"{action.verb} on {action.target} requires an input value")
    prev = world.gui
    widget = prev.by_id().get(action.target)
    if widget is None or not _offers(widget, action):
        raise ActionNotEnabled(f"action {action.signature} is not enabled in the current state")
    n_log = len(world.change_log)
    _apply(world, widget, action)
    world._gui = None
    nxt = world.gui
    events: list[OutputEvent] = _gui_diff(prev, nxt)
    events.extend(world.change_log[n_log:])
    return world, events


def drain_change_log(world: WorldState) -> list[DbChangeEvent]:
    """Return and clear the db events recorded since the last drain."""
    out = list(world.change_log)
    world.change_log.clear()
    return out


def _offers(w: Widget, a: Action) -> bool:
    if a.verb == "select":
        return w.kind is WidgetKind.MENU and w.state == "enabled"
    if a.verb == "click":
        return w.kind is WidgetKind.BUTTON and w.state == "enabled"
    if a.verb == "fill":
        return w.kind is WidgetKind.TEXT and w.state == "editable"
    return w.kind in (WidgetKind.LIST, WidgetKind.COMBO) and w.state == "selectable" and a.value in w.values


def _apply(world: WorldState, w: Widget, a: Action) -> None:
    top = world.stack[0]
    if w.role == ROLE_MENU:
        world.stack = [_Screen("page", entity=w.label)]
        return
    if w.role == ROLE_TOPBAR:
        # info windows are modal: a new one replaces the one on top
        if top.kind == "info":
            world.stack.pop(0)
        world.stack.insert(0, _Screen("info", label=w.label))
        return
    if top.kind == "info" or (top.kind == "view" and w.role == ROLE_CLOSE):
        world.stack.pop(0)
        return
    e = world._entities[top.entity]
    rows = world.db[e.table_name]
    if top.kind == "page":
        if w.label == f"New {e.item}":
            vals = {f.label: _empty(f) for f in e.fields}
            world.stack.insert(0, _Screen("form", entity=e.name, mode="new", values=vals))
        elif w.label in ("View", "Edit"):
            idx = world.rng.randrange(len(rows))
            vals = {}
            for f in e.fields:
                col = f.db_column
                vals[f.label] = _decode(f, rows[idx][col]) if col is not None else _empty(f)
            kind = "view" if w.label == "View" else "form"
            world.stack.insert(0, _Screen(kind, entity=e.name, mode="edit", record=idx, values=vals))
        elif w.label == "Delete":
            idx = world.rng.randrange(len(rows))
            rec = rows.pop(idx)
            world.change_log.append(DbChangeEvent("delete", e.table_name, dict(rec)))
        return
    # input form
    if w.role == ROLE_TAB:
        top.tab = _tab_index(e, w.label)
    elif a.verb == "fill":
        top.values[w.label] = a.value
    elif a.verb == "pick":
        f = _field(e, w.label)
        if f.kind == "combo":
            marked = set(top.values[w.label]) ^ {a.value}
            top.values[w.label] = tuple(v for v in f.values if v in marked)
        else:
            top.values[w.label] = a.value
    elif w.role == ROLE_SUBMIT:
        _submit(world, e, top, rows)
        world.stack.pop(0)
    elif w.role == ROLE_CANCEL:
        world.stack.pop(0)


def _submit(world: WorldState, e: EntityTypeSpec, form: _Screen, rows: list) -> None:
    for f in e.fields:
        v = form.values[f.label]
        if f.required and not v:
            return
        if not is_valid_value(f.kind, v):
            return
    rec = {}
    for f in e.fields:
        col = f.db_column
        if col is not None:
            rec[col] = _encode(form.values[f.label])
    if form.mode == "new":
        rows.append(rec)
        world.change_log.append(DbChangeEvent("insert", e.table_name, dict(rec)))
    else:
        prior = rows[form.record]
        if prior == rec:
            return
        rows[form.record] = rec
        world.change_log.append(DbChangeEvent("update", e.table_name, dict(rec), dict(prior)))


def _field(e: EntityTypeSpec, label: str) -> FieldSpec:
    for f in e.fields:
        if f.label == label:
            return f
    raise KeyError(label)


def _tab_index(e: EntityTypeSpec, label: str) -> int:
    for t in range(e.tabs):
        if e.tab_label(t) == label:
            return t
    raise KeyError(label)


def _gui_diff(prev: GuiState, nxt: GuiState) -> list[GuiEvent]:
    before = prev.by_id()
    after = nxt.by_id()
    order_next = {w.label: i for i, w in enumerate(nxt.windows)}
    order_prev = {w.label: i for i, w in enumerate(prev.windows)}
    top = len(nxt.windows) + len(prev.windows)
    events = []
    for wid, w in after.items():
        old = before.get(wid)
        if old is None:
            events.append(GuiEvent(w, "added"))
        elif old != w:
            events.append(GuiEvent(w, "changed"))
    for wid, w in before.items():
        if wid not in after:
            events.append(GuiEvent(w, "removed"))

    def key(ev: GuiEvent):
        # window events first, then contents by stack order, top bar last
        w = ev.widget
        is_content = w.kind is not WidgetKind.WINDOW
        if not w.window:
            return (1, top + 1, w.id)
        if ev.change == "removed":
            return (is_content, len(nxt.windows) + order_prev.get(w.window, 0), w.id)
        return (is_content, order_next.get(w.window, top), w.id)

    events.sort(key=key)
    return events


def diff_widgets(prev: GuiState, nxt: GuiState) -> tuple[set[str], set[str], set[str], set[str]]:
    """(added, removed, changed, union) widget-id sets between two GUI states."""
    before = prev.by_id()
    after = nxt.by_id()
    added = after.keys() - before.keys()
    removed = before.keys() - after.keys()
    changed = {k for k in after.keys() & before.keys() if after[k] != before[k]}
    return set(added), set(removed), changed, set(after.keys() | before.keys())


# ---------------------------------------------------------------------------
# Configuration files
# ---------------------------------------------------------------------------


def app_spec_from_dict(data: Mapping[str, Any]) -> AppSpec:
    entities = []
    for ed in data["entity_types"]:
        fields = []
        for fd in ed["fields"]:
            default = fd.get("default")
            if isinstance(default, list):
                default = tuple(default)
            fields.append(
                FieldSpec(
                    label=fd["label"],
                    kind=fd.get("kind", "text"),
                    required=bool(fd.get("required", False)),
                    tab=int(fd.get("tab", 0)),
                    values=tuple(fd.get("values", ())),
                    default=default,
                    column=fd.get("column", ""),
                )
            )
        entities.append(
            EntityTypeSpec(
                name=ed["name"],
                fields=tuple(fields),
                tabs=int(ed.get("tabs", 1)),
                tab_names=tuple(ed.get("tab_names", ())),
                singular=ed.get("singular", ""),
                table=ed.get("table", ""),
                has_view=ed.get("has_view", True),
                has_edit=ed.get("has_edit", True),
                has_delete=ed.get("has_delete", True),
                has_new=ed.get("has_new", True),
                initial_records=int(ed.get("initial_records", 0)),
            )
        )
    spec = AppSpec(
        entity_types=tuple(entities),
        global_menu_actions=int(data.get("global_menu_actions", len(entities))),
        seed=int(data.get("seed", 0)),
        name=data.get("name", "app"),
        decoy_labels=tuple(data.get("decoy_labels", ())),
    )
    validate_spec(spec)
    return spec


def app_spec_to_dict(spec: AppSpec) -> dict[str, Any]:
    def fdict(f: FieldSpec):
        d = {"label": f.label, "kind": f.kind, "required": f.required, "tab": f.tab}
        if f.values:
            d["values"] = list(f.values)
        if f.default is not None:
            d["default"] = list(f.default) if isinstance(f.default, tuple) else f.default
        if f.column != "":
            d["column"] = f.column
        return d

    return {
        "name": spec.name,
        "seed": spec.seed,
        "global_menu_actions": spec.global_menu_actions,
        "decoy_labels": list(spec.decoy_labels),
        "entity_types": [
            {
                "name": e.name,
                "singular": e.singular,
                "table": e.table,
                "tabs": e.tabs,
                "tab_names": list(e.tab_names),
                "has_view": e.has_view,
                "has_edit": e.has_edit,
                "has_delete": e.has_delete,
                "has_new": e.has_new,
                "initial_records": e.initial_records,
                "fields": [fdict(f) for f in e.fields],
            }
            for e in spec.entity_types
        ],
    }


def load_app_spec(path: Union[str, Path]) -> AppSpec:
    """Load an application definition from a JSON file."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        return app_spec_from_dict(data)
    except KeyError as exc:
        raise AppSpecError(f"{path}: missing key {exc}") from None


def replay(spec: AppSpec, actions: Iterable[Action]) -> tuple[WorldState, list[list[OutputEvent]]]:
    """Execute ``actions`` from a fresh world; returns the world and per-step events."""
    world = build_app(spec)
    out = []
    for a in actions:
        _, ev = execute(world, a)
        out.append(ev)
    return world, out


def field_specs(world: WorldState, entity: str) -> Sequence[FieldSpec]:
    return world._entities[entity].fields
