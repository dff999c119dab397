"""Test reports: output strings, grouped report rows and the unique-operation index.

Every output line instantiates one of ten closed templates::

    GUI: Menu "M" enabled
    GUI: Button "B" disabled
    GUI: Text field "T" as ⟨empty⟩ enabled
    GUI: List field "L" ("a", "b") as "a" enabled
    GUI: Combo-box field "C" ("a", "b") marked at ("b") blocked
    GUI: Grid with columns "ID", "Name" as 3 items
    GUI: Window "W" in foreground
    DB: new record in Table T ⟨K=V, ...⟩
    DB: deleted record in Table T ⟨K=V, ...⟩
    DB: update in Table T ⟨K=old⟩ → ⟨K=new⟩

Quoted strings escape ``\\`` and ``"`` with a backslash; record keys and
values escape ``\\ , = ⟨ ⟩`` the same way.
"""
from __future__ import annotations

import csv
import html
import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, Union

from .app import DbChangeEvent, GuiEvent, OutputEvent, WidgetKind
from .explorer import Step, TestCase

EMPTY = "⟨empty⟩"
NONE = "⟨none⟩"
ARROW = "→"

_STATE_WORD = {"editable": "enabled", "selectable": "enabled"}
_DB_WORDS = {"insert": "new record", "delete": "deleted record", "update": "update"}


class ReportFormatError(ValueError):
    pass


@dataclass(frozen=True)
class OutputEntry:
    channel: str  # GUI / DB
    text: str

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class ParsedEntry:
    channel: str
    kind: str
    fields: Mapping[str, Any]


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _qlist(items: Sequence[str]) -> str:
    return "(" + ", ".join(quote(v) for v in items) + ")"


def _rec_escape(s: str) -> str:
    return re.sub(r"([\\,=⟨⟩])", r"\\\1", s)


def format_record(record: Mapping[str, str]) -> str:
    return "⟨" + ", ".join(f"{_rec_escape(k)}={_rec_escape(v)}" for k, v in record.items()) + "⟩"


def _state(s: str) -> str:
    return _STATE_WORD.get(s, s)


def format_output_entry(event: OutputEvent) -> OutputEntry:
    if isinstance(event, DbChangeEvent):
        head = f"DB: {_DB_WORDS[event.kind]} in Table {event.table} "
        if event.kind == "update":
            return OutputEntry("DB", head + f"{format_record(event.prior_record)} {ARROW} {format_record(event.record)}")
        return OutputEntry("DB", head + format_record(event.record))
    if not isinstance(event, GuiEvent):
        raise ReportFormatError(f"not an output event: {event!r}")
    w = event.widget
    k = w.kind
    if k is WidgetKind.MENU:
        text = f"Menu {quote(w.label)} {w.state}"
    elif k is WidgetKind.BUTTON:
        text = f"Button {quote(w.label)} {w.state}"
    elif k is WidgetKind.TEXT:
        text = f"Text field {quote(w.label)} as {quote(w.value) if w.value else EMPTY} {_state(w.state)}"
    elif k is WidgetKind.LIST:
        text = (f"List field {quote(w.label)} {_qlist(w.values)} as "
                f"{quote(w.value) if w.value else EMPTY} {_state(w.state)}")
    elif k is WidgetKind.COMBO:
        text = (f"Combo-box field {quote(w.label)} {_qlist(w.values)} marked at "
                f"{_qlist(w.value) if w.value else EMPTY} {_state(w.state)}")
    elif k is WidgetKind.GRID:
        cols = ", ".join(quote(c) for c in w.values) if w.values else NONE
        text = f"Grid with columns {cols} as {int(w.value or 0)} items"
    elif k is WidgetKind.WINDOW:
        text = f"Window {quote(w.label)} in {w.state}"
    else:  # pragma: no cover - the enum is closed
        raise ReportFormatError(f"no template for widget kind {k!r}")
    return OutputEntry("GUI", "GUI: " + text)


def describe_action(step: Step) -> str:
    a, label = step.action, quote(step.target.label)
    if a.verb == "select":
        return f"Select menu {label}"
    if a.verb == "click":
        return f"Click button {label}"
    if a.verb == "fill":
        return f"Fill field {label} as {quote(a.value)}"
    return f"Pick {quote(a.value)} in field {label}"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_QS = r'"(?:[^"\\]|\\.)*"'
_QL = rf"\((?:{_QS}(?:, {_QS})*)?\)"
_REC = r"⟨(?:[^⟨⟩\\]|\\.)*⟩"
_GUI_PATTERNS = [
    ("Menu", re.compile(rf"^Menu ({_QS}) (enabled|disabled)$")),
    ("Button", re.compile(rf"^Button ({_QS}) (enabled|disabled)$")),
    ("Text field", re.compile(rf"^Text field ({_QS}) as ({_QS}|{EMPTY}) (enabled|blocked)$")),
    ("List field", re.compile(rf"^List field ({_QS}) ({_QL}) as ({_QS}|{EMPTY}) (enabled|blocked)$")),
    ("Combo-box field", re.compile(rf"^Combo-box field ({_QS}) ({_QL}) marked at ({_QL}|{EMPTY}) (enabled|blocked)$")),
    ("Grid", re.compile(rf"^Grid with columns ({_QS}(?:, {_QS})*|{NONE}) as (\d+) items$")),
    ("Window", re.compile(rf"^Window ({_QS}) in (foreground|background)$")),
]
_DB_PATTERNS = [
    ("insert", re.compile(rf"^DB: new record in Table (\w+) ({_REC})$")),
    ("delete", re.compile(rf"^DB: deleted record in Table (\w+) ({_REC})$")),
    ("update", re.compile(rf"^DB: update in Table (\w+) ({_REC}) {ARROW} ({_REC})$")),
]


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def _unqlist(s: str) -> tuple[str, ...]:
    return tuple(_unquote(m) for m in re.findall(_QS, s))


def _split_unescaped(s: str, sep: str) -> list[str]:
    parts, cur, i = [], [], 0
    while i < len(s):
        if s[i] == "\\" and i + 1 < len(s):
            cur.append(s[i:i + 2])
            i += 2
            continue
        if s.startswith(sep, i):
            parts.append("".join(cur))
            cur = []
            i += len(sep)
            continue
        cur.append(s[i])
        i += 1
    parts.append("".join(cur))
    return parts


def parse_record(text: str) -> dict[str, str]:
    body = text[1:-1]
    if not body:
        return {}
    out = {}
    for item in _split_unescaped(body, ", "):
        k, v = _split_unescaped(item, "=")
        out[re.sub(r"\\(.)", r"\1", k)] = re.sub(r"\\(.)", r"\1", v)
    return out


def parse_output_entry(text: str) -> ParsedEntry:
    """Inverse of :func:`format_output_entry` on the template fields."""
    if text.startswith("DB: "):
        for kind, pat in _DB_PATTERNS:
            m = pat.match(text)
            if m:
                f = {"table": m.group(1), "record": parse_record(m.group(len(m.groups())))}
                if kind == "update":
                    f["prior_record"] = parse_record(m.group(2))
                return ParsedEntry("DB", kind, f)
    elif text.startswith("GUI: "):
        body = text[5:]
        for kind, pat in _GUI_PATTERNS:
            m = pat.match(body)
            if not m:
                continue
            g = m.groups()
            if kind in ("Menu", "Button"):
                f = {"label": _unquote(g[0]), "state": g[1]}
            elif kind == "Text field":
                f = {"label": _unquote(g[0]), "value": "" if g[1] == EMPTY else _unquote(g[1]), "state": g[2]}
            elif kind == "List field":
                f = {"label": _unquote(g[0]), "values": _unqlist(g[1]),
                     "value": "" if g[2] == EMPTY else _unquote(g[2]), "state": g[3]}
            elif kind == "Combo-box field":
                f = {"label": _unquote(g[0]), "values": _unqlist(g[1]),
                     "value": () if g[2] == EMPTY else _unqlist(g[2]), "state": g[3]}
            elif kind == "Grid":
                f = {"columns": () if g[0] == NONE else _unqlist(g[0]), "items": int(g[1])}
            else:
                f = {"label": _unquote(g[0]), "state": g[1]}
            return ParsedEntry("GUI", kind, f)
    raise ReportFormatError(f"output line matches no template: {text!r}")


# ---------------------------------------------------------------------------
# Rows and grouping
# ---------------------------------------------------------------------------


@dataclass
class ReportRow:
    id: str
    actions: list[str]
    outputs: list[OutputEntry]
    steps: list[Step] = field(default_factory=list)

    @property
    def operation(self) -> str:
        return self.steps[-1].operation if self.steps else ""

    @property
    def menu(self) -> str:
        return self.steps[-1].menu if self.steps else ""


def _is_input(step: Step) -> bool:
    return step.action.verb in ("fill", "pick")


def _row(test_id: str, n: int, steps: list[Step]) -> ReportRow:
    outputs = []
    for s in steps:
        for ev in s.events:
            if isinstance(ev, GuiEvent) and ev.change == "removed":
                continue
            outputs.append(format_output_entry(ev))
    return ReportRow(f"{test_id}.{n}", [describe_action(s) for s in steps], outputs, list(steps))


def group_input_actions(steps: Sequence[Step], test_id: str = "T1") -> list[ReportRow]:
    """One row per step, except that a run of fills/picks joins the click ending it."""
    rows: list[ReportRow] = []
    run: list[Step] = []
    for step in steps:
        if _is_input(step):
            run.append(step)
            continue
        if run and step.action.verb == "click":
            rows.append(_row(test_id, len(rows) + 1, run + [step]))
            run = []
            continue
        if run:
            rows.append(_row(test_id, len(rows) + 1, run))
            run = []
        rows.append(_row(test_id, len(rows) + 1, [step]))
    if run:
        rows.append(_row(test_id, len(rows) + 1, run))
    return rows


@dataclass
class UniqueOperationIndex:
    tests_per_menu: dict[str, int] = field(default_factory=dict)
    operations: dict[str, list[str]] = field(default_factory=dict)
    operation_menu: dict[str, str] = field(default_factory=dict)

    def occurrences(self, operation: str) -> int:
        return len(self.operations.get(operation, ()))

    def operations_for(self, menu: str) -> list[str]:
        return sorted(op for op, m in self.operation_menu.items() if m == menu)

    def menus(self) -> list[str]:
        return sorted(set(self.tests_per_menu) | set(self.operation_menu.values()))


@dataclass
class Report:
    rows: dict[str, list[ReportRow]] = field(default_factory=dict)

    def all_rows(self) -> list[ReportRow]:
        return [r for rows in self.rows.values() for r in rows]

    def row(self, row_id: str) -> ReportRow:
        test_id = row_id.split(".")[0]
        for r in self.rows.get(test_id, ()):
            if r.id == row_id:
                return r
        raise KeyError(row_id)


def generate_report(tests: Iterable[TestCase]) -> tuple[Report, UniqueOperationIndex]:
    """Rows for every test plus the operation index keyed by menu."""
    report = Report()
    index = UniqueOperationIndex()
    for test in tests:
        rows = group_input_actions(test.steps, test.id)
        report.rows[test.id] = rows
        menus = set()
        for row in rows:
            op = row.operation
            index.operations.setdefault(op, []).append(row.id)
            index.operation_menu[op] = row.menu
            menus.add(row.menu)
        for m in menus:
            index.tests_per_menu[m] = index.tests_per_menu.get(m, 0) + 1
    return report, index


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def escape_cell(lines: Sequence[str]) -> str:
    """Join cell lines with the two-character sequence ``\\n``.

    Newlines inside a line become line breaks too, so a cell never spans
    two records.
    """
    return "\\n".join(s.replace("\\", "\\\\").replace("\n", "\\n") for s in lines)


def unescape_cell(cell: str) -> list[str]:
    out, cur, i = [], [], 0
    while i < len(cell):
        if cell[i] == "\\" and i + 1 < len(cell):
            nxt = cell[i + 1]
            if nxt == "n":
                out.append("".join(cur))
                cur = []
            else:
                cur.append(nxt)
            i += 2
            continue
        cur.append(cell[i])
        i += 1
    out.append("".join(cur))
    return out if cell else []


def sheet_name(menu: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", menu) or "_"


def _menu_rows(report: Report) -> dict[str, list[ReportRow]]:
    out: dict[str, list[ReportRow]] = {}
    for row in report.all_rows():
        out.setdefault(row.menu, []).append(row)
    return out


def render_index(report: Report, index: UniqueOperationIndex) -> str:
    e = html.escape
    lines = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8"><title>Unique operations</title></head><body>',
        "<h1>Unique operations</h1>",
    ]
    for menu in index.menus():
        lines.append(f'<h2 id="menu-{e(sheet_name(menu))}">{e(menu)} '
                     f"({index.tests_per_menu.get(menu, 0)} test cases)</h2>")
        lines.append("<ul>")
        for op in index.operations_for(menu):
            ids = index.operations[op]
            links = ", ".join(f'<a href="#{e(i)}">{e(i)}</a>' for i in ids)
            lines.append(f"<li>{e(op)}: {len(ids)} occurrences: {links}</li>")
        lines.append("</ul>")
    lines.append("<h1>Test reports</h1>")
    for menu, rows in sorted(_menu_rows(report).items()):
        lines.append(f"<h2>{e(menu)}</h2>")
        lines.append("<table><tr><th>ID</th><th>Actions</th><th>Outputs</th></tr>")
        for r in rows:
            acts = "<br>".join(e(a) for a in r.actions)
            outs = "<br>".join(e(o.text) for o in r.outputs)
            lines.append(f'<tr id="{e(r.id)}"><td>{e(r.id)}</td><td>{acts}</td><td>{outs}</td></tr>')
        lines.append("</table>")
    lines.append("</body></html>")
    return "\n".join(lines) + "\n"


def render_sheet(rows: Sequence[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ID", "Actions", "Outputs"])
    for r in rows:
        w.writerow([r.id, escape_cell(r.actions), escape_cell([o.text for o in r.outputs])])
    return buf.getvalue()


def render(report: Report, index: UniqueOperationIndex, out_dir: Union[str, Path]) -> list[Path]:
    """Write one CSV sheet per menu plus ``index.html``; returns the written paths."""
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for menu, rows in sorted(_menu_rows(report).items()):
            p = out / f"{sheet_name(menu)}.csv"
            p.write_text(render_sheet(rows), encoding="utf-8")
            written.append(p)
        p = out / "index.html"
        p.write_text(render_index(report, index), encoding="utf-8")
        written.append(p)
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    return written
