"""Meteorologist-provided domain rules.

Each rule links a trigger phrase (an event description used in the articles)
to physical implications: wind speed, rain rate, river state, or the reach of
the event around a point. Rules drive query expansion and fill missing event
attributes, always with provenance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .textnorm import fold, normalize_term

ATTRIBUTES = ("wind_speed_kmh", "rain_mmh", "reach_km", "river_state")
COMPARATORS = (">", ">=", "<", "<=", "=", "between")

DEFAULT_UNITS = {
    "wind_speed_kmh": "km/h",
    "rain_mmh": "mm/h",
    "reach_km": "km",
    "river_state": None,
}


@dataclass(frozen=True)
class Implication:
    attribute: str
    comparator: str
    value: float | tuple[float, float] | str
    unit: str | None = None
    note: str | None = None

    def __post_init__(self) -> None:
        if self.attribute not in ATTRIBUTES:
            raise ValidationError(f"unknown attribute {self.attribute!r}")
        if self.comparator not in COMPARATORS:
            raise ValidationError(f"unknown comparator {self.comparator!r}")
        if self.comparator == "between" and not (
            isinstance(self.value, tuple) and len(self.value) == 2
        ):
            raise ValidationError("between needs a (low, high) value")


@dataclass(frozen=True)
class DomainRule:
    id: str
    trigger: str  # normalized phrase
    implications: tuple[Implication, ...]
    note: str | None = None

    def matches_phrase(self, phrase_tokens: list[str]) -> bool:
        """True when every trigger token occurs in the phrase
        (order-insensitive, accent-folded)."""
        phrase = {fold(t) for t in phrase_tokens}
        return all(fold(t) in phrase for t in self.trigger.split())


def load_rules(path: str | Path) -> list[DomainRule]:
    """One JSON rule per line: id, trigger, implications, optional note."""
    rules: list[DomainRule] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            record = json.loads(line)
            implications = []
            for imp in record.get("implications", []):
                value = imp["value"]
                if isinstance(value, list):
                    value = (float(value[0]), float(value[1]))
                elif isinstance(value, (int, float)):
                    value = float(value)
                implications.append(
                    Implication(
                        attribute=imp["attribute"],
                        comparator=imp["comparator"],
                        value=value,
                        unit=imp.get("unit", DEFAULT_UNITS.get(imp["attribute"])),
                        note=imp.get("note"),
                    )
                )
            rules.append(
                DomainRule(
                    id=str(record["id"]),
                    trigger=normalize_term(str(record["trigger"])),
                    implications=tuple(implications),
                    note=record.get("note"),
                )
            )
    return rules
