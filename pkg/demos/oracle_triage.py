"""Show how test plan coverage turns into manual work.

Checks a short SSRLS run on the desk preset against its shipped plan, then
repeats the triage with the reference satisfaction flags on the erp-like plan.
"""
from guitestgen.explorer import ExplorerConfig, run_strategy
from guitestgen.presets import app_preset, catalog_preset, plan_path
from guitestgen.testplan import (
    coverage_from_flags,
    load_plan,
    oracle_table,
    reference_flags,
    synthetic_plan,
    triage,
    triage_text,
    verify_oracles,
)


def main():
    app = app_preset("desk")
    tests, _, _ = run_strategy(app, catalog_preset("desk"), ExplorerConfig(strategy="SSRLS", episodes=20, seed=7))
    plan = load_plan(plan_path("desk"))
    cov = verify_oracles(plan, tests)
    print(f"desk: {cov.total.satisfied} of {cov.total.objectives} objectives satisfied by 20 SSRLS episodes")
    for oid, w in sorted(cov.witnesses.items())[:5]:
        print(f"  objective {oid}: steps {w.first_step}-{w.last_step} of {w.test_id}")
    print(oracle_table(cov))
    print(triage_text(triage(plan, cov)))

    erp_plan = synthetic_plan(app_preset("erp-like"))
    sat, ver = reference_flags(erp_plan)
    print("erp-like plan with the reference flags:")
    print(triage_text(triage(erp_plan, coverage_from_flags(erp_plan, sat, ver))))


if __name__ == "__main__":
    main()
