import csv
import io
import re

import pytest
from hypothesis import given, settings, strategies as st

from guitestgen.app import Action, DbChangeEvent, GuiEvent, Widget, WidgetKind
from guitestgen.explorer import Step, TestCase
from guitestgen.reporting import (
    EMPTY,
    ReportFormatError,
    escape_cell,
    format_output_entry,
    generate_report,
    group_input_actions,
    parse_output_entry,
    render,
    render_index,
    sheet_name,
    unescape_cell,
)

from conftest import INVOICE_FILLS, invoice_scenario


def _gui(kind, label="L", state="enabled", value=None, values=()):
    return GuiEvent(Widget("w", kind, label, state, value=value, values=values, window="W"), "changed")


@pytest.mark.parametrize(
    "event, text",
    [
        (_gui(WidgetKind.WINDOW, "Invoices", "foreground"), 'GUI: Window "Invoices" in foreground'),
        (_gui(WidgetKind.WINDOW, "Invoices", "background"), 'GUI: Window "Invoices" in background'),
        (_gui(WidgetKind.MENU, "Orders"), 'GUI: Menu "Orders" enabled'),
        (_gui(WidgetKind.BUTTON, "Delete", "disabled"), 'GUI: Button "Delete" disabled'),
        (_gui(WidgetKind.TEXT, "Name", "editable", ""), f'GUI: Text field "Name" as {EMPTY} enabled'),
        (_gui(WidgetKind.TEXT, "Name", "blocked", "Paul"), 'GUI: Text field "Name" as "Paul" blocked'),
        (
            _gui(WidgetKind.LIST, "State", "selectable", "Sent", ("not Sent", "Sent", "Replied")),
            'GUI: List field "State" ("not Sent", "Sent", "Replied") as "Sent" enabled',
        ),
        (
            _gui(WidgetKind.COMBO, "Tags", "selectable", ("a", "c"), ("a", "b", "c")),
            'GUI: Combo-box field "Tags" ("a", "b", "c") marked at ("a", "c") enabled',
        ),
        (
            _gui(WidgetKind.COMBO, "Tags", "blocked", (), ("a",)),
            f'GUI: Combo-box field "Tags" ("a") marked at {EMPTY} blocked',
        ),
        (
            _gui(WidgetKind.GRID, "g", "", "3", ("ID", "Name", "Data", "Action")),
            'GUI: Grid with columns "ID", "Name", "Data", "Action" as 3 items',
        ),
        (_gui(WidgetKind.GRID, "g", "", "0", ()), "GUI: Grid with columns ⟨none⟩ as 0 items"),
        (DbChangeEvent("insert", "T", {"A": "1", "B": "x"}), "DB: new record in Table T ⟨A=1, B=x⟩"),
        (DbChangeEvent("delete", "T", {"A": "1"}), "DB: deleted record in Table T ⟨A=1⟩"),
        (DbChangeEvent("update", "T", {"A": "2"}, {"A": "1"}), "DB: update in Table T ⟨A=1⟩ → ⟨A=2⟩"),
    ],
)
def test_templates(event, text):
    entry = format_output_entry(event)
    assert entry.text == text
    assert entry.channel == text.split(":")[0]


def test_quotes_and_record_separators_are_escaped():
    entry = format_output_entry(_gui(WidgetKind.BUTTON, 'Say "hi"'))
    assert entry.text == r'GUI: Button "Say \"hi\"" enabled'
    assert parse_output_entry(entry.text).fields["label"] == 'Say "hi"'
    rec = {"K=1": "a, b", "X": "⟨y⟩"}
    text = format_output_entry(DbChangeEvent("insert", "T", rec)).text
    assert parse_output_entry(text).fields["record"] == rec


def test_format_rejects_non_events():
    with pytest.raises(ReportFormatError):
        format_output_entry("nope")


def test_parse_rejects_unknown_text():
    with pytest.raises(ReportFormatError):
        parse_output_entry("GUI: Calendar \"Date\" as 05/06/2015 enabled")


_label = st.text(st.characters(blacklist_categories=("Cs",)), max_size=12)
_values = st.lists(_label, min_size=1, max_size=4).map(tuple)


@settings(max_examples=300, deadline=None)
@given(label=_label, value=_label, values=_values)
def test_text_and_list_round_trip(label, value, values):
    parsed = parse_output_entry(format_output_entry(_gui(WidgetKind.TEXT, label, "editable", value)).text)
    assert parsed.fields == {"label": label, "value": value, "state": "enabled"}
    parsed = parse_output_entry(format_output_entry(_gui(WidgetKind.LIST, label, "blocked", value, values)).text)
    assert parsed.fields == {"label": label, "values": values, "value": value, "state": "blocked"}


# -- steps and grouping -------------------------------------------------------------


def _step(verb, label="x", menu="M", value=None, events=()):
    kind = {"select": WidgetKind.MENU, "click": WidgetKind.BUTTON, "fill": WidgetKind.TEXT, "pick": WidgetKind.LIST}[verb]
    target = Widget(f"id:{label}", kind, label, "enabled", window="W")
    return Step(Action(target.id, verb, value or ("v" if verb in ("fill", "pick") else None)), tuple(events), target, menu)


def test_grouping_examples():
    steps = [_step("select", "M"), _step("click", "New"), _step("select", "M")]
    assert [r.id for r in group_input_actions(steps, "T1")] == ["T1.1", "T1.2", "T1.3"]
    steps = [_step("click", "New")] + [_step("fill") for _ in range(6)] + [_step("click", "Save")]
    rows = group_input_actions(steps, "T3")
    assert [len(r.actions) for r in rows] == [1, 7]
    rows = group_input_actions([_step("click", "New"), _step("fill"), _step("pick")], "T1")
    assert [len(r.steps) for r in rows] == [1, 2]


def test_fill_run_before_menu_is_its_own_row():
    rows = group_input_actions([_step("fill"), _step("select", "M")], "T1")
    assert [len(r.steps) for r in rows] == [1, 1]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(["select", "click", "fill", "pick"]), max_size=40))
def test_grouping_is_a_partition(verbs):
    steps = [_step(v, f"w{i}") for i, v in enumerate(verbs)]
    rows = group_input_actions(steps, "T9")
    assert [s for r in rows for s in r.steps] == steps
    assert [r.id for r in rows] == [f"T9.{i}" for i in range(1, len(rows) + 1)]


def test_action_descriptions():
    d = invoice_scenario()
    report, _ = generate_report([d.test_case("T3")])
    rows = report.rows["T3"]
    assert rows[0].actions == ['Select menu "Invoices"']
    assert rows[1].actions == ['Click button "New Invoice"']
    assert rows[2].actions == [f'Fill field "{k}" as "{v}"' for k, v in INVOICE_FILLS] + ['Click button "Save"']
    pick = _step("pick", "State", value="Sent")
    assert group_input_actions([pick])[0].actions == ['Pick "Sent" in field "State"']


def test_removed_widgets_are_not_reported():
    gone = GuiEvent(Widget("w", WidgetKind.BUTTON, "Gone", "enabled"), "removed")
    row = group_input_actions([_step("click", events=(gone,))])[0]
    assert row.outputs == []


# -- index ------------------------------------------------------------------------


def _invoice_suite():
    t3 = invoice_scenario().test_case("T3")
    d = invoice_scenario()
    for _ in range(2):
        d.do("New Invoice", "click")
        for label, value in INVOICE_FILLS:
            d.do(label, "fill", value)
        d.do("Save", "click")
    return [t3, d.test_case("T4")]


def test_index_counts_operations():
    report, index = generate_report(_invoice_suite())
    assert index.occurrences("Invoices.Save") == 4
    assert index.operations["Invoices.Save"][0] == "T3.3"
    assert index.tests_per_menu == {"Invoices": 2}
    assert index.menus() == ["Invoices"]
    for op, ids in index.operations.items():
        for rid in ids:
            assert report.row(rid).operation == op
    assert sum(index.occurrences(op) for op in index.operations_for("Invoices")) >= 2


def test_empty_report():
    report, index = generate_report([])
    assert report.all_rows() == [] and index.operations == {} and index.menus() == []


def test_report_row_lookup():
    report, _ = generate_report(_invoice_suite())
    assert report.row("T4.5").id == "T4.5"
    with pytest.raises(KeyError):
        report.row("T4.99")


# -- rendering ----------------------------------------------------------------------


@given(st.lists(st.text(st.characters(blacklist_categories=("Cs",))), min_size=1, max_size=5))
def test_cell_escaping_round_trip(lines):
    cell = escape_cell(lines)
    assert "\n" not in cell
    expected = "\n".join(lines).split("\n")
    assert unescape_cell(cell) == (expected if cell else [])


def test_sheet_name():
    assert sheet_name("Invoices") == "Invoices"
    assert sheet_name("A/B c") == "A_B_c"


def test_render_files(tmp_path):
    report, index = generate_report(_invoice_suite())
    written = render(report, index, tmp_path / "r")
    assert sorted(p.name for p in written) == ["Invoices.csv", "index.html"]
    rows = list(csv.reader(io.StringIO((tmp_path / "r" / "Invoices.csv").read_text(encoding="utf-8"))))
    assert rows[0] == ["ID", "Actions", "Outputs"]
    assert rows[3][0] == "T3.3"
    assert unescape_cell(rows[3][1])[-1] == 'Click button "Save"'
    assert all(len(r) == 3 for r in rows)
    html = (tmp_path / "r" / "index.html").read_text(encoding="utf-8")
    assert '<a href="#T3.3">T3.3</a>' in html
    assert '<tr id="T3.3">' in html
    anchors = set(re.findall(r'<tr id="([^"]+)"', html))
    assert set(re.findall(r'href="#([^"]+)"', html)) <= anchors


def test_render_is_deterministic(tmp_path):
    report, index = generate_report(_invoice_suite())
    render(report, index, tmp_path / "a")
    render(report, index, tmp_path / "b")
    for name in ("Invoices.csv", "index.html"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_render_one_sheet_per_menu(tmp_path):
    tests = [TestCase(f"T{i}", [_step("select", m, menu=m)]) for i, m in enumerate("ABCDEF", 1)]
    report, index = generate_report(tests)
    written = render(report, index, tmp_path)
    assert len(written) == 7
    assert "A (1 test cases)" in render_index(report, index)


def test_render_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    report, index = generate_report(_invoice_suite())
    with pytest.raises(OSError, match="file"):
        render(report, index, blocker / "sub")
