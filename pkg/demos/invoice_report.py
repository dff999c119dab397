"""Walk through one invoice insertion and print the resulting report rows.

Run with ``python demos/invoice_report.py``.
"""
from guitestgen.app import Action, WidgetKind, build_app
from guitestgen.explorer import HOME, TestCase, run_step
from guitestgen.presets import app_preset
from guitestgen.reporting import generate_report, parse_output_entry

FILLS = [
    ("Invoice Number", "2015.2"),
    ("Invoice Name", "Payment"),
    ("Client Data - Name", "Paul"),
    ("Client Data - Surname", "Red"),
    ("Client Data - Email", "paul@red.it"),
    ("Client Data - Country", "Italy"),
]


def main():
    world = build_app(app_preset("invoice-demo"))
    steps, menu = [], HOME

    def do(label, verb, value=None):
        nonlocal menu
        widgets = sorted(world.gui.widgets, key=lambda w: w.kind is WidgetKind.WINDOW)
        target = next(w for w in widgets if w.label == label)
        step = run_step(world, Action(target.id, verb, value), menu)
        menu = step.menu
        steps.append(step)

    do("Invoices", "select")
    do("New Invoice", "click")
    for label, value in FILLS:
        do(label, "fill", value)
    do("Save", "click")

    report, index = generate_report([TestCase("T3", steps)])
    for row in report.rows["T3"]:
        print(f"== {row.id}")
        for action in row.actions:
            print(f"   > {action}")
        for entry in row.outputs:
            print(f"   {entry.text}")

    # every output line parses back into its fields
    db_line = report.rows["T3"][-1].outputs[-1].text
    print("\nparsed:", parse_output_entry(db_line).fields)
    print("operations:", ", ".join(f"{op} x{index.occurrences(op)}" for op in sorted(index.operations)))


if __name__ == "__main__":
    main()
