"""Label-to-value catalog used to fill input widgets.

Catalog files hold one record per line: a label followed by tab-separated
values. The label ``*`` declares the default values used for unknown
labels. Blank lines and lines starting with ``#`` are ignored.
"""
from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence, Union

from .app import Widget

DEFAULT_VALUES = ("abc", "test value", "12345", "lorem ipsum")


class CatalogError(ValueError):
    pass


def normalize(label: str) -> str:
    return " ".join(label.split()).lower()


@dataclass(frozen=True)
class Catalog:
    entries: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    default_values: tuple[str, ...] = DEFAULT_VALUES
    rng_seed: int = 0

    def __post_init__(self):
        if not self.default_values:
            raise CatalogError("a catalog needs at least one default value")
        norm = {}
        for label, values in self.entries.items():
            if not values:
                raise CatalogError(f"entry {label!r} has no values")
            norm[normalize(label)] = tuple(values)
        object.__setattr__(self, "entries", norm)
        object.__setattr__(self, "default_values", tuple(self.default_values))

    def __len__(self) -> int:
        return len(self.entries)

    def values_for(self, label: str) -> tuple[str, ...]:
        return self.entries.get(normalize(label), self.default_values)


def lookup(catalog: Catalog, widget: Union[Widget, str], rng: Union[random.Random, None] = None) -> str:
    """Pick a value for an input widget.

    Values come from the entry matching the widget's normalized title label,
    or from the default values when no entry matches. ``rng`` is the caller's
    generator; without one a generator seeded from ``catalog.rng_seed`` is used.
    """
    label = widget if isinstance(widget, str) else widget.label
    if rng is None:
        rng = random.Random(catalog.rng_seed)
    return rng.choice(catalog.values_for(label))


def parse_catalog(lines: Sequence[str], source: str = "<catalog>", seed: int = 0) -> Catalog:
    entries: dict[str, tuple[str, ...]] = {}
    defaults: list[str] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        label = parts[0].strip()
        values = [v for v in (p.strip() for p in parts[1:]) if v]
        if not label:
            raise CatalogError(f"{source}:{lineno}: field 'label' is empty")
        if not values:
            raise CatalogError(f"{source}:{lineno}: field 'values' is empty for label {label!r}")
        if label == "*":
            defaults.extend(values)
            continue
        key = normalize(label)
        if key in entries:
            warnings.warn(f"{source}:{lineno}: duplicate label {label!r}, keeping the last entry")
        entries[key] = tuple(values)
    return Catalog(entries, tuple(defaults) or DEFAULT_VALUES, seed)


def load_catalog(path: Union[str, Path], seed: int = 0) -> Catalog:
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(fh.readlines(), str(path), seed)


def dump_catalog(catalog: Catalog) -> str:
    lines = ["*\t" + "\t".join(catalog.default_values)]
    for label in sorted(catalog.entries):
        lines.append(label + "\t" + "\t".join(catalog.entries[label]))
    return "\n".join(lines) + "\n"
