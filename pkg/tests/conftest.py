from __future__ import annotations

import pytest

from guitestgen.app import Action, WidgetKind, WorldState, build_app
from guitestgen.explorer import HOME, Step, TestCase, run_step
from guitestgen.harness import ExperimentConfig, run_experiment
from guitestgen.presets import app_preset


class Driver:
    """Drives a world by widget label and records the executed steps."""

    def __init__(self, world: WorldState):
        self.world = world
        self.steps: list[Step] = []
        self.menu = HOME

    def widget(self, label):
        """The widget titled ``label``; windows only when nothing else matches."""
        widgets = sorted(self.world.gui.widgets, key=lambda w: w.kind is WidgetKind.WINDOW)
        return next(w for w in widgets if w.label == label)

    def do(self, label, verb, value=None) -> Step:
        step = run_step(self.world, Action(self.widget(label).id, verb, value), self.menu)
        self.menu = step.menu
        self.steps.append(step)
        return step

    def test_case(self, test_id="T1") -> TestCase:
        return TestCase(test_id, list(self.steps))


INVOICE_FILLS = [
    ("Invoice Number", "2015.2"),
    ("Invoice Name", "Payment"),
    ("Client Data - Name", "Paul"),
    ("Client Data - Surname", "Red"),
    ("Client Data - Email", "paul@red.it"),
    ("Client Data - Country", "Italy"),
]


def invoice_scenario() -> Driver:
    d = Driver(build_app(app_preset("invoice-demo")))
    d.do("Invoices", "select")
    d.do("New Invoice", "click")
    for label, value in INVOICE_FILLS:
        d.do(label, "fill", value)
    d.do("Save", "click")
    return d


@pytest.fixture
def desk_world():
    return build_app(app_preset("desk"))


@pytest.fixture
def driver(desk_world):
    return Driver(desk_world)


@pytest.fixture(scope="session")
def erp_experiment():
    """Default experiment on the erp-like preset: 4 strategies x 5 seeds."""
    return run_experiment(ExperimentConfig())
