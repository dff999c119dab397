"""Test plans: objectives with oracle checks, satisfaction, verification and triage.

A plan is a directory with one CSV file per functional area (the file stem
names the area), or a single CSV file with an extra ``area`` column. Columns:

``id``            objective identifier, e.g. ``8.3``
``description``   free text
``interactions``  operation patterns joined by `` > ``; shell wildcards allowed
``checks``        oracle checks joined by `` ; ``

A check is ``<data class> <kind> key=value ...`` for tracked data classes,
for example ``gui_tracked window label=Invoice state=foreground``, and
``<data class> "free text"`` for the others.
"""
from __future__ import annotations

import csv
import fnmatch
import functools
import io
import re
import shlex
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .app import AppSpec, EntityTypeSpec
from .explorer import TestCase
from .reporting import Report, ReportRow, generate_report, parse_output_entry

TRACKED = ("gui_tracked", "db_tracked")
UNTRACKED = ("grid_content", "graphical_attribute", "db_untracked", "external")
DATA_CLASSES = TRACKED + UNTRACKED
CHECK_KINDS = {
    "window": "Window",
    "button": "Button",
    "menu": "Menu",
    "text": "Text field",
    "list": "List field",
    "combo": "Combo-box field",
    "grid": "Grid",
    "insert": "insert",
    "delete": "delete",
    "update": "update",
}
COLUMNS = ("id", "description", "interactions", "checks")


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class OracleCheck:
    id: str
    data_class: str
    kind: str = ""
    constraints: Mapping[str, str] = field(default_factory=dict)
    text: str = ""

    @property
    def verifiable(self) -> bool:
        return self.data_class in TRACKED

    def to_text(self) -> str:
        if not self.verifiable:
            return f"{self.data_class} {shlex.quote(self.text)}"
        parts = [self.data_class, self.kind]
        parts += [f"{k}={shlex.quote(v)}" for k, v in self.constraints.items()]
        return " ".join(parts)

    def matches(self, outputs: Iterable) -> bool:
        """True when some output entry has this kind and meets every constraint."""
        if not self.verifiable:
            return False
        want = CHECK_KINDS[self.kind]
        for entry in outputs:
            parsed = parse_output_entry(entry.text if hasattr(entry, "text") else entry)
            if parsed.kind == want and all(_field_ok(parsed, k, p) for k, p in self.constraints.items()):
                return True
        return False


def _field_ok(parsed, key: str, pattern: str) -> bool:
    key = "label" if key == "title" else key
    if key in parsed.fields:
        v = parsed.fields[key]
    elif parsed.channel == "DB" and key in parsed.fields["record"]:
        v = parsed.fields["record"][key]
    else:
        return False
    if isinstance(v, tuple):
        v = ", ".join(v)
    return fnmatch.fnmatchcase(str(v), pattern)


@dataclass(frozen=True)
class TestObjective:
    id: str
    functional_area: str
    interactions: tuple[str, ...]
    checks: tuple[OracleCheck, ...] = ()
    description: str = ""

    __test__ = False


def parse_check(text: str, check_id: str) -> OracleCheck:
    tokens = shlex.split(text)
    if not tokens:
        raise PlanError("empty check")
    cls = tokens[0]
    if cls not in DATA_CLASSES:
        raise PlanError(f"unknown data class {cls!r}")
    if cls not in TRACKED:
        return OracleCheck(check_id, cls, text=" ".join(tokens[1:]))
    if len(tokens) < 2 or tokens[1] not in CHECK_KINDS:
        raise PlanError(f"tracked check needs a kind out of {sorted(CHECK_KINDS)}")
    constraints = {}
    for tok in tokens[2:]:
        if "=" not in tok:
            raise PlanError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        constraints[k] = v
    return OracleCheck(check_id, cls, tokens[1], constraints)


def _split_checks(cell: str) -> list[str]:
    lex = shlex.shlex(cell, posix=True, punctuation_chars=";")
    lex.whitespace_split = True
    groups, cur = [], []
    for tok in lex:
        if tok == ";":
            groups.append(cur)
            cur = []
        else:
            cur.append(tok)
    groups.append(cur)
    return [" ".join(shlex.quote(t) for t in g) for g in groups if g]


def _objective_from_row(row: Mapping[str, str], area: str) -> TestObjective:
    oid = (row.get("id") or "").strip()
    if not oid:
        raise PlanError("missing objective id")
    inter = tuple(p.strip() for p in (row.get("interactions") or "").split(" > ") if p.strip())
    checks = tuple(
        parse_check(t, f"{oid}#{i}") for i, t in enumerate(_split_checks(row.get("checks") or ""), 1)
    )
    return TestObjective(oid, area, inter, checks, (row.get("description") or "").strip())


def _read_rows(path: Path, area: Optional[str]) -> list[TestObjective]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise PlanError(f"{path}:1: missing columns {sorted(missing)}")
        if area is None and "area" not in reader.fieldnames:
            raise PlanError(f"{path}:1: a single-file plan needs an 'area' column")
        for rownum, row in enumerate(reader, 2):
            try:
                out.append(_objective_from_row(row, area or row["area"].strip()))
            except (PlanError, ValueError) as exc:
                raise PlanError(f"{path}:{rownum}: {exc}") from None
    return out


def load_plan(path: Union[str, Path]) -> list[TestObjective]:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.csv"))
        if not files:
            raise PlanError(f"{p}: no plan files")
        plan = [o for f in files for o in _read_rows(f, f.stem)]
    else:
        plan = _read_rows(p, None)
    seen = set()
    for o in plan:
        if o.id in seen:
            raise PlanError(f"{p}: duplicate objective id {o.id!r}")
        seen.add(o.id)
    return plan


def plan_areas(plan: Sequence[TestObjective]) -> list[str]:
    out = []
    for o in plan:
        if o.functional_area not in out:
            out.append(o.functional_area)
    return out


def format_plan_sheet(objectives: Sequence[TestObjective]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for o in objectives:
        w.writerow([o.id, o.description, " > ".join(o.interactions), " ; ".join(c.to_text() for c in o.checks)])
    return buf.getvalue()


def write_plan(plan: Sequence[TestObjective], out_dir: Union[str, Path]) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for area in plan_areas(plan):
        p = out / f"{area}.csv"
        p.write_text(format_plan_sheet([o for o in plan if o.functional_area == area]), encoding="utf-8")
        written.append(p)
    return written


# ---------------------------------------------------------------------------
# Satisfaction and verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    test_id: str
    first_step: int  # 1-based, inclusive
    last_step: int


def _partitions(test: TestCase) -> list[tuple[int, int]]:
    """(start, end) index ranges of maximal runs sharing the same menu."""
    out, start = [], 0
    steps = test.steps
    for i in range(1, len(steps) + 1):
        if i == len(steps) or steps[i].menu != steps[start].menu:
            out.append((start, i))
            start = i
    return out


@functools.lru_cache(maxsize=None)
def _matcher(pattern: str):
    if any(ch in pattern for ch in "*?["):
        return re.compile(fnmatch.translate(pattern)).match
    return pattern.__eq__


def _match_in(ops: Sequence[str], patterns: Sequence[str]) -> Optional[tuple[int, int]]:
    matchers = [_matcher(p) for p in patterns]
    j, first = 0, None
    for i, op in enumerate(ops):
        if matchers[j](op):
            if first is None:
                first = i
            j += 1
            if j == len(matchers):
                return first, i
    return None


def _prepare(tests: Sequence[TestCase]) -> list[tuple[str, list[tuple[int, list[str]]]]]:
    """Per test: its id and the operation lists of its menu partitions."""
    out = []
    for test in tests:
        if not test.steps:
            continue
        ops = [s.operation for s in test.steps]
        out.append((test.id, [(a, ops[a:b]) for a, b in _partitions(test)]))
    return out


def objective_satisfied(obj: TestObjective, tests: Sequence[TestCase], _prepared=None) -> Optional[Witness]:
    """First test containing the interaction pattern as a subsequence of one menu partition."""
    prepared = _prepare(tests) if _prepared is None else _prepared
    for test_id, parts in prepared:
        if not obj.interactions:
            return Witness(test_id, 1, 1)
        for a, ops in parts:
            hit = _match_in(ops, obj.interactions)
            if hit is not None:
                return Witness(test_id, a + hit[0] + 1, a + hit[1] + 1)
    return None


def row_for_step(rows: Sequence[ReportRow], step_index: int) -> ReportRow:
    n = 0
    for r in rows:
        n += len(r.steps)
        if step_index <= n:
            return r
    raise IndexError(step_index)


def percent(part: int, whole: int) -> int:
    """Integer percentage rounded half up; 0 for an empty whole."""
    return (part * 200 + whole) // (2 * whole) if whole else 0


@dataclass
class AreaCoverage:
    area: str
    objectives: int = 0
    satisfied: int = 0
    checks: int = 0
    reached: int = 0
    verifiable: int = 0
    verified: int = 0


@dataclass
class CoverageResult:
    areas: dict[str, AreaCoverage] = field(default_factory=dict)
    witnesses: dict[str, Witness] = field(default_factory=dict)
    verified_checks: set = field(default_factory=set)

    @property
    def total(self) -> AreaCoverage:
        t = AreaCoverage("Total")
        for a in self.areas.values():
            for name in ("objectives", "satisfied", "checks", "reached", "verifiable", "verified"):
                setattr(t, name, getattr(t, name) + getattr(a, name))
        return t


def coverage_from_flags(plan: Sequence[TestObjective], satisfied: Iterable[str],
                        verified: Iterable[str]) -> CoverageResult:
    """Coverage bookkeeping given which objectives are satisfied and which checks verified."""
    sat, ver = set(satisfied), set(verified)
    res = CoverageResult()
    for o in plan:
        a = res.areas.setdefault(o.functional_area, AreaCoverage(o.functional_area))
        a.objectives += 1
        a.checks += len(o.checks)
        if o.id not in sat:
            continue
        a.satisfied += 1
        a.reached += len(o.checks)
        for c in o.checks:
            if c.verifiable:
                a.verifiable += 1
                if c.id in ver:
                    a.verified += 1
                    res.verified_checks.add(c.id)
    return res


def verify_oracles(plan: Sequence[TestObjective], tests: Sequence[TestCase],
                   report: Optional[Report] = None) -> CoverageResult:
    """Satisfy objectives against ``tests`` and check their oracles on the report rows."""
    if report is None:
        report, _ = generate_report(tests)
    witnesses, verified = {}, set()
    prepared = _prepare(tests)
    for o in plan:
        w = objective_satisfied(o, tests, prepared)
        if w is None:
            continue
        witnesses[o.id] = w
        row = row_for_step(report.rows[w.test_id], w.last_step)
        for c in o.checks:
            if c.matches(row.outputs):
                verified.add(c.id)
    res = coverage_from_flags(plan, witnesses, verified)
    res.witnesses = witnesses
    return res


@dataclass(frozen=True)
class TriageSummary:
    manual_design: int
    manual_replay: int
    browse: int


def triage(plan: Sequence[TestObjective], coverage: CoverageResult) -> TriageSummary:
    t = coverage.total
    return TriageSummary(t.objectives - t.satisfied, t.reached - t.verified, t.verified)


def coverage_table(results: Mapping[str, CoverageResult]) -> str:
    """Objectives per area and how many each strategy satisfied."""
    names = list(results)
    first = next(iter(results.values()))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Functional area", "Test objectives"] + [f"Satisfied w/ {n}" for n in names])
    rows = [(a, [results[n].areas[a] for n in names]) for a in first.areas]
    rows.append(("Total", [results[n].total for n in names]))
    for area, covs in rows:
        total = covs[0].objectives
        w.writerow([area, total] + [f"{c.satisfied} ({percent(c.satisfied, total)}%)" for c in covs])
    return buf.getvalue()


def oracle_table(result: CoverageResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Functional area", "Oracles reached", "Verifiable", "Verified", "Verified (%)"])
    for a in list(result.areas.values()) + [result.total]:
        w.writerow([a.area, a.reached, a.verifiable, a.verified, f"{percent(a.verified, a.reached)}%"])
    return buf.getvalue()


def triage_text(summary: TriageSummary) -> str:
    return (
        f"objectives needing manual test design: {summary.manual_design}\n"
        f"oracles needing manual replay: {summary.manual_replay}\n"
        f"oracles closed by browsing reports: {summary.browse}\n"
    )


# ---------------------------------------------------------------------------
# Synthetic plan
# ---------------------------------------------------------------------------

# area: (objectives, objectives carrying checks, checks, tracked checks,
#        grid_content, graphical_attribute, db_untracked, external)
ERP_PLAN_COUNTS = {
    "Projects": (73, 51, 81, 65, 6, 1, 2, 7),
    "Orders": (119, 82, 132, 100, 11, 2, 4, 15),
    "Invoices": (52, 32, 56, 41, 5, 1, 2, 7),
    "Tickets": (21, 20, 38, 28, 4, 1, 1, 4),
    "Modules": (10, 9, 16, 9, 3, 0, 1, 3),
    "Offers": (75, 57, 85, 67, 6, 1, 2, 9),
}

DESK_PLAN_COUNTS = {
    "Contacts": (8, 6, 9, 7, 1, 0, 0, 1),
    "Orders": (12, 8, 11, 8, 1, 1, 0, 1),
    "Tasks": (8, 6, 8, 6, 0, 0, 1, 1),
}

_UNTRACKED_TEXT = {
    "grid_content": ("The grid lists the expected {item} records", "The grid shows the updated {item} totals",
                     "The grid is sorted by {item} identifier"),
    "graphical_attribute": ("Mandatory fields of the {item} form are highlighted",
                            "The {item} form uses the corporate colours"),
    "db_untracked": ("Related records of the {item} are consistent", "The {item} history table is updated"),
    "external": ("The {item} report is sent to the accounting system", "The {item} notification email is delivered",
                 "The {item} is exported to the data warehouse"),
}


def _field_check(f, **cons) -> tuple[str, str, dict]:
    kind = {"list": "list", "combo": "combo"}.get(f.kind, "text")
    return ("gui_tracked", kind, {"label": f.label, **cons})


def _article(word: str) -> str:
    return ("an " if word[:1].lower() in "aeiou" else "a ") + word


def _objective_pool(e: EntityTypeSpec) -> list[tuple[str, tuple[str, ...], list]]:
    """Candidate (description, interactions, tracked checks) rows, shallow first."""
    m, item = e.name, e.item
    one = _article(item.lower())
    new, save, close = f"{m}.New {item}", f"{m}.Save", f"{m}.Close"
    cols = [f.db_column for f in e.fields if f.required and f.db_column]

    def win(label, state="foreground"):
        return ("gui_tracked", "window", {"label": label, "state": state})

    def db(kind):
        return [("db_tracked", kind, {"table": e.table_name})] + [
            ("db_tracked", kind, {"table": e.table_name, c: "?*"}) for c in cols[:3]
        ]

    first_tab = [f for f in e.fields if f.tab == 0]
    form = [win(item), ("gui_tracked", "button", {"label": "Save", "state": "enabled"})]
    form += [_field_check(f, state="enabled") for f in first_tab[:3]]
    page = [win(m), ("gui_tracked", "button", {"label": f"New {item}", "state": "enabled"}),
            ("gui_tracked", "grid", {"columns": "ID, Name, Data, Action"})]
    view = [win(f"View {item}"), ("gui_tracked", "button", {"label": "Close", "state": "enabled"})]
    view += [_field_check(f, state="blocked") for f in first_tab[:2]]
    pool = [
        (f"Access the {m} area", (m,), page),
        (f"Correctness of the form when adding new {m.lower()}", (m, new), form),
        (f"Add {one}", (m, new, save), db("insert")),
        (f"Cancel the creation of {one}", (m, new, close), page),
        (f"View {one}", (m, f"{m}.View"), view),
        (f"Edit {one}", (m, f"{m}.Edit"), form),
        (f"Delete {one}", (m, f"{m}.Delete"), db("delete")),
        (f"Close the {item.lower()} view", (m, f"{m}.View", close), page),
        (f"Cancel the edit of {one}", (m, f"{m}.Edit", close), page),
        (f"Save an edited {item.lower()}", (m, f"{m}.Edit", save), page),
    ]
    for t in range(1, e.tabs):
        label = e.tab_label(t)
        checks = [("gui_tracked", "button", {"label": label, "state": "disabled"})]
        checks += [_field_check(f, state="enabled") for f in e.fields if f.tab == t]
        pool.append((f"Open the {label} tab of a new {item.lower()}", (m, new, f"{m}.{label}"), checks))
    for f in e.fields:
        pool.append((f"Enter {f.label} of a new {item.lower()}", (m, new, f"{m}.{f.label}"),
                     [_field_check(f, value="?*"), _field_check(f, state="enabled")]))
    for t in range(1, e.tabs):
        label = e.tab_label(t)
        checks = [("gui_tracked", "button", {"label": label, "state": "disabled"})]
        checks += [_field_check(f, state="enabled") for f in e.fields if f.tab == t]
        pool.append((f"Open the {label} tab of an existing {item.lower()}", (m, f"{m}.Edit", f"{m}.{label}"), checks))
    for f in e.fields:
        pool.append((f"Change {f.label} of an existing {item.lower()}", (m, f"{m}.Edit", f"{m}.{f.label}"),
                     [_field_check(f, state="enabled"), _field_check(f, value="?*")]))
    for f in e.fields:
        pool.append((f"Save a new {item.lower()} with {f.label}", (m, new, f"{m}.{f.label}", save), db("insert")))
    for f in e.fields:
        pool.append((f"Save an edited {item.lower()} after changing {f.label}",
                     (m, f"{m}.Edit", f"{m}.{f.label}", save), db("update")))
    for f in e.fields:
        pool.append((f"Discard a new {item.lower()} after entering {f.label}",
                     (m, new, f"{m}.{f.label}", close), page))
    return pool


def synthetic_plan(app: AppSpec, counts: Mapping[str, tuple] = ERP_PLAN_COUNTS) -> list[TestObjective]:
    """Plan whose per-area objective and check counts follow ``counts``.

    Within each area the first objectives carry all checks; the remaining
    ones carry none. Tracked checks come first in each area.
    """
    plan = []
    for k, e in enumerate(app.entity_types, 1):
        if e.name not in counts:
            continue
        n_obj, n_with, n_checks, n_tracked, *split = counts[e.name]
        if n_tracked + sum(split) != n_checks or n_with > n_obj or n_checks < n_with:
            raise PlanError(f"{e.name}: inconsistent plan counts {counts[e.name]}")
        pool = _objective_pool(e)
        if len(pool) < n_obj:
            raise PlanError(f"{e.name}: only {len(pool)} distinct objectives available, {n_obj} requested")
        untracked = [c for c, n in zip(UNTRACKED, split) for _ in range(n)]
        # each checked objective gets one check; the surplus goes round-robin
        per_obj = [1] * n_with
        for i in range(n_checks - n_with):
            per_obj[i % n_with] += 1
        kinds = ["t"] * n_tracked + untracked
        pos = 0
        for n, (desc, inter, candidates) in enumerate(pool[:n_obj], 1):
            oid = f"{k}.{n}"
            checks = []
            if n <= n_with:
                for j in range(per_obj[n - 1]):
                    kind = kinds[pos]
                    pos += 1
                    cid = f"{oid}#{j + 1}"
                    if kind == "t":
                        cls, ck, cons = candidates[j % len(candidates)]
                        checks.append(OracleCheck(cid, cls, ck, dict(cons)))
                    else:
                        texts = _UNTRACKED_TEXT[kind]
                        checks.append(OracleCheck(cid, kind, text=texts[j % len(texts)].format(item=e.item.lower())))
            plan.append(TestObjective(oid, e.name, inter, tuple(checks), desc))
    return plan


def reference_flags(plan: Sequence[TestObjective]) -> tuple[set[str], set[str]]:
    """Satisfied objectives and verified checks recorded for a synthetic plan.

    By construction of :func:`synthetic_plan`, the objectives carrying checks
    are the satisfied ones and every tracked check is verified.
    """
    sat = {o.id for o in plan if o.checks}
    ver = {c.id for o in plan for c in o.checks if c.verifiable}
    return sat, ver
