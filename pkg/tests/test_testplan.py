import dataclasses
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from guitestgen.explorer import TestCase
from guitestgen.presets import app_preset, plan_path
from guitestgen.reporting import generate_report
from guitestgen.testplan import (
    DESK_PLAN_COUNTS,
    ERP_PLAN_COUNTS,
    OracleCheck,
    PlanError,
    TestObjective,
    TriageSummary,
    Witness,
    coverage_from_flags,
    coverage_table,
    load_plan,
    objective_satisfied,
    oracle_table,
    parse_check,
    percent,
    plan_areas,
    reference_flags,
    synthetic_plan,
    triage,
    triage_text,
    verify_oracles,
    write_plan,
)

from conftest import invoice_scenario

HEADER = "id,description,interactions,checks\n"


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def _obj(oid, *interactions, checks=(), area="Invoices"):
    return TestObjective(oid, area, tuple(interactions), tuple(checks))


def test_load_plan_row(tmp_path):
    _write(tmp_path / "Invoices.csv", HEADER + (
        '8.3,Correctness of the form when adding new invoices,Invoices > Invoices.New Invoice,'
        '"gui_tracked window label=Invoice state=foreground ; gui_tracked text label=\'Invoice *\'"\n'))
    (obj,) = load_plan(tmp_path)
    assert obj.id == "8.3" and obj.functional_area == "Invoices"
    assert obj.interactions == ("Invoices", "Invoices.New Invoice")
    assert len(obj.checks) == 2
    assert obj.checks[1].constraints == {"label": "Invoice *"}
    assert [c.id for c in obj.checks] == ["8.3#1", "8.3#2"]


def test_load_objective_without_checks(tmp_path):
    _write(tmp_path / "A.csv", HEADER + "1.1,just browse,A,\n")
    (obj,) = load_plan(tmp_path)
    assert obj.checks == ()
    assert coverage_from_flags([obj], {"1.1"}, set()).total.verifiable == 0


def test_single_file_plan_needs_area(tmp_path):
    p = _write(tmp_path / "plan.csv", HEADER + "1,x,A,\n")
    with pytest.raises(PlanError, match="area"):
        load_plan(p)
    p = _write(tmp_path / "plan2.csv", "area," + HEADER + "A,1,x,A,\n")
    assert load_plan(p)[0].functional_area == "A"


@pytest.mark.parametrize(
    "row, message",
    [
        (",x,A,\n", ":2: missing objective id"),
        ("1,x,A,bogus_class thing\n", ":2: unknown data class"),
        ("1,x,A,gui_tracked sparkle\n", ":2: tracked check needs a kind"),
        ("1,x,A,gui_tracked window label\n", ":2: expected key=value"),
    ],
)
def test_malformed_rows_report_line(tmp_path, row, message):
    _write(tmp_path / "A.csv", HEADER + row)
    with pytest.raises(PlanError, match=message):
        load_plan(tmp_path)


def test_duplicate_ids_and_missing_columns(tmp_path):
    _write(tmp_path / "A.csv", HEADER + "1,x,A,\n")
    _write(tmp_path / "B.csv", HEADER + "1,y,B,\n")
    with pytest.raises(PlanError, match="duplicate"):
        load_plan(tmp_path)
    _write(tmp_path / "C.csv", "id,checks\n")
    with pytest.raises(PlanError, match="missing columns"):
        load_plan(tmp_path / "C.csv")
    (tmp_path / "empty").mkdir()
    with pytest.raises(PlanError, match="no plan files"):
        load_plan(tmp_path / "empty")


def test_check_text_round_trip():
    for text in ["gui_tracked window label='New Invoice' state=foreground",
                 "db_tracked insert table=INVOICES NUMBER='?*'",
                 "external 'The invoice is emailed'"]:
        c = parse_check(text, "x#1")
        assert parse_check(c.to_text(), "x#1") == c


def test_untracked_checks_never_verify():
    c = parse_check("grid_content 'The grid lists three invoices'", "c")
    assert not c.verifiable
    assert not c.matches(['GUI: Grid with columns "ID" as 3 items'])


def test_check_matching():
    c = parse_check("gui_tracked window title=Invoice state=foreground", "c")
    assert c.matches(['GUI: Window "Invoice" in foreground'])
    assert not c.matches(['GUI: Window "Invoice" in background', 'GUI: Button "Invoice" enabled'])
    db = parse_check("db_tracked insert table=INVOICES EMAIL=*@red.it", "d")
    assert db.matches(["DB: new record in Table INVOICES ⟨NUMBER=1, EMAIL=paul@red.it⟩"])
    assert not db.matches(["DB: deleted record in Table INVOICES ⟨EMAIL=paul@red.it⟩"])
    assert not parse_check("gui_tracked text missing=1", "e").matches(['GUI: Text field "A" as ⟨empty⟩ enabled'])


# -- satisfaction -------------------------------------------------------------------


def test_invoice_witness():
    t3 = invoice_scenario().test_case("T3")
    assert objective_satisfied(_obj("8.3", "Invoices", "Invoices.New Invoice"), [t3]) == Witness("T3", 1, 2)
    assert objective_satisfied(_obj("8.4", "Invoices", "Invoices.Save"), [t3]) == Witness("T3", 1, 9)
    assert objective_satisfied(_obj("8.5", "Invoices.Save", "Invoices"), [t3]) is None
    assert objective_satisfied(_obj("8.6", "Invoices.Client Data - *"), [t3]) == Witness("T3", 5, 5)


def test_empty_pattern_is_vacuous():
    t3 = invoice_scenario().test_case("T3")
    assert objective_satisfied(_obj("1"), [TestCase("T0"), t3]) == Witness("T3", 1, 1)
    assert objective_satisfied(_obj("1"), [TestCase("T0")]) is None


def test_match_stays_within_one_menu_partition():
    d = invoice_scenario()
    d.do("Invoices", "select")
    d.do("New Invoice", "click")
    t = d.test_case("T1")
    pattern = _obj("1", "Invoices.Save", "Invoices.New Invoice")
    # re-selecting the same menu keeps a single partition
    assert objective_satisfied(pattern, [t]) == Witness("T1", 9, 11)
    # relabel the tail as another menu: the pattern now spans two partitions
    tail = [dataclasses.replace(s, menu="Other") for s in t.steps[9:]]
    assert objective_satisfied(pattern, [TestCase("T2", t.steps[:9] + tail)]) is None


def test_verify_invoice_checks():
    t3 = invoice_scenario().test_case("T3")
    plan = [
        _obj("8.3", "Invoices", "Invoices.New Invoice", checks=(
            parse_check("gui_tracked window label=Invoice state=foreground", "8.3#1"),
            parse_check("gui_tracked text label='Invoice Number' value=''", "8.3#2"),
            parse_check("grid_content 'grid is empty'", "8.3#3"),
        )),
        _obj("8.4", "Invoices", "Invoices.Save", checks=(
            parse_check("db_tracked insert table=INVOICES NAME=Paul", "8.4#1"),
        )),
        _obj("8.5", "Invoices", "Invoices.Delete", checks=(
            parse_check("db_tracked delete table=INVOICES", "8.5#1"),
        )),
    ]
    res = verify_oracles(plan, [t3])
    a = res.areas["Invoices"]
    assert (a.objectives, a.satisfied, a.checks, a.reached, a.verifiable, a.verified) == (3, 2, 5, 4, 3, 3)
    assert res.verified_checks == {"8.3#1", "8.3#2", "8.4#1"}
    report, _ = generate_report([t3])
    assert verify_oracles(plan, [t3], report).verified_checks == res.verified_checks


def test_all_tracked_matching_checks_are_100_percent():
    t3 = invoice_scenario().test_case("T3")
    plan = [_obj("1", "Invoices", checks=(parse_check("gui_tracked window label=Invoices", "1#1"),))]
    res = verify_oracles(plan, [t3])
    assert "100%" in oracle_table(res)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 12))
def test_monotonicity(k):
    from guitestgen.explorer import ExplorerConfig, run_strategy
    from guitestgen.presets import catalog_preset

    spec = app_preset("desk")
    tests, _, _ = run_strategy(spec, catalog_preset("desk"), ExplorerConfig(strategy="SSRLS", episodes=12, seed=1))
    plan = synthetic_plan(spec, DESK_PLAN_COUNTS)
    small = verify_oracles(plan, tests[:k]).total
    big = verify_oracles(plan, tests).total
    assert small.satisfied <= big.satisfied
    assert small.verified <= big.verified


# -- bookkeeping -------------------------------------------------------------------


@pytest.mark.parametrize("part, whole, pct", [(1, 2, 50), (1, 3, 33), (2, 3, 67), (1, 8, 13), (0, 0, 0), (5, 5, 100)])
def test_percent_rounds_half_up(part, whole, pct):
    assert percent(part, whole) == pct


def test_synthetic_plan_counts():
    plan = synthetic_plan(app_preset("erp-like"))
    assert len(plan) == 350
    per_area = Counter(o.functional_area for o in plan)
    assert per_area == {"Projects": 73, "Orders": 119, "Invoices": 52, "Tickets": 21, "Modules": 10, "Offers": 75}
    checks = [c for o in plan for c in o.checks]
    assert len(checks) == 408
    assert Counter(c.data_class for c in checks if not c.verifiable) == {
        "grid_content": 35, "graphical_attribute": 6, "db_untracked": 12, "external": 45}
    assert sum(c.verifiable for c in checks) == 310
    assert len({(o.functional_area, o.description) for o in plan}) == 350
    for o in plan:
        assert len({c.to_text() for c in o.checks}) == len(o.checks)


@pytest.mark.parametrize("name, counts", [("erp-like", ERP_PLAN_COUNTS), ("desk", DESK_PLAN_COUNTS)])
def test_shipped_plans_match_generator(name, counts):
    shipped = sorted(load_plan(plan_path(name)), key=lambda o: o.id)
    regenerated = sorted(synthetic_plan(app_preset(name), counts), key=lambda o: o.id)
    assert shipped == regenerated


def test_write_plan_round_trip(tmp_path):
    plan = synthetic_plan(app_preset("desk"), DESK_PLAN_COUNTS)
    written = write_plan(plan, tmp_path)
    assert [p.name for p in written] == ["Contacts.csv", "Orders.csv", "Tasks.csv"]
    assert load_plan(tmp_path) == plan
    assert plan_areas(plan) == ["Contacts", "Orders", "Tasks"]


def test_inconsistent_counts_rejected():
    with pytest.raises(PlanError, match="inconsistent"):
        synthetic_plan(app_preset("desk"), {"Contacts": (3, 2, 5, 1, 0, 0, 0, 0)})
    with pytest.raises(PlanError, match="distinct objectives"):
        synthetic_plan(app_preset("desk"), {"Contacts": (500, 1, 1, 1, 0, 0, 0, 0)})


def test_reference_triage():
    plan = synthetic_plan(app_preset("erp-like"))
    sat, ver = reference_flags(plan)
    res = coverage_from_flags(plan, sat, ver)
    assert (res.total.satisfied, res.total.reached, res.total.verified) == (251, 408, 310)
    assert triage(plan, res) == TriageSummary(99, 98, 310)
    assert "99" in triage_text(triage(plan, res))


def test_triage_edge_cases():
    plan = synthetic_plan(app_preset("desk"), DESK_PLAN_COUNTS)
    empty = verify_oracles(plan, [])
    assert triage(plan, empty) == TriageSummary(len(plan), 0, 0)
    all_sat = {o.id for o in plan}
    all_ver = {c.id for o in plan for c in o.checks}
    full = coverage_from_flags(plan, all_sat, all_ver)
    tracked = sum(c.verifiable for o in plan for c in o.checks)
    n_checks = sum(len(o.checks) for o in plan)
    assert triage(plan, full) == TriageSummary(0, n_checks - tracked, tracked)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_bucket_conservation(data):
    plan = synthetic_plan(app_preset("desk"), DESK_PLAN_COUNTS)
    sat = data.draw(st.sets(st.sampled_from([o.id for o in plan])))
    ver = data.draw(st.sets(st.sampled_from([c.id for o in plan for c in o.checks])))
    res = coverage_from_flags(plan, sat, ver)
    t, tri = res.total, triage(plan, res)
    assert tri.manual_design + t.satisfied == t.objectives
    assert tri.manual_replay + tri.browse == t.reached
    assert t.verified <= t.verifiable <= t.reached <= t.checks
    for a in res.areas.values():
        assert a.satisfied <= a.objectives and a.verified <= a.verifiable


def test_coverage_table_format():
    plan = synthetic_plan(app_preset("erp-like"))
    sat, ver = reference_flags(plan)
    res = coverage_from_flags(plan, sat, ver)
    lines = coverage_table({"SSRLS": res}).splitlines()
    assert lines[0] == "Functional area,Test objectives,Satisfied w/ SSRLS"
    assert lines[1] == "Projects,73,51 (70%)"
    assert lines[-1] == "Total,350,251 (72%)"
    assert oracle_table(res).splitlines()[-1] == "Total,408,310,310,76%"


def test_oracle_check_defaults():
    c = OracleCheck("x", "external", text="t")
    assert c.to_text() == "external t" and not c.verifiable
