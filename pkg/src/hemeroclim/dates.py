"""Partial calendar dates for historical material.

Newspaper issues and events are often dated only to a year or a month, so
dates carry an explicit precision. A partial date denotes the full range of
days it could mean; range logic (ordering, intersection) is defined on those
bounds.
"""

from __future__ import annotations

import calendar
import datetime as dt
import re
from dataclasses import dataclass

from .errors import ValidationError

_DATE_RE = re.compile(r"^(\d{1,4})(?:-(\d{1,2})(?:-(\d{1,2}))?)?$")

# Century notation ("XIX c.") used by analysts; century N spans years
# 100*(N-1)+1 .. 100*N.
_ROMAN = {"M": 1000, "D": 500, "C": 100, "L": 50, "X": 10, "V": 5, "I": 1}
_CENTURY_RE = re.compile(r"^([MDCLXVI]+)\s*(?:c\.?|century|siglo)?$", re.IGNORECASE)


@dataclass(frozen=True, order=True)
class PartialDate:
    year: int
    month: int | None = None
    day: int | None = None

    def __post_init__(self) -> None:
        if self.day is not None and self.month is None:
            raise ValidationError("day requires month")
        if self.month is not None and not 1 <= self.month <= 12:
            raise ValidationError(f"invalid month {self.month}")
        if self.day is not None:
            last = calendar.monthrange(self.year, self.month)[1]
            if not 1 <= self.day <= last:
                raise ValidationError(f"invalid day {self.day} for {self.year}-{self.month:02d}")
        if not 1 <= self.year <= 9999:
            raise ValidationError(f"invalid year {self.year}")

    @property
    def precision(self) -> str:
        if self.day is not None:
            return "day"
        if self.month is not None:
            return "month"
        return "year"

    def bounds(self) -> tuple[dt.date, dt.date]:
        """Earliest and latest calendar day this partial date can denote."""
        if self.precision == "day":
            d = dt.date(self.year, self.month, self.day)
            return d, d
        if self.precision == "month":
            last = calendar.monthrange(self.year, self.month)[1]
            return dt.date(self.year, self.month, 1), dt.date(self.year, self.month, last)
        return dt.date(self.year, 1, 1), dt.date(self.year, 12, 31)

    def sort_key(self) -> dt.date:
        return self.bounds()[0]

    def intersects(self, other: "PartialDate") -> bool:
        a0, a1 = self.bounds()
        b0, b1 = other.bounds()
        return a0 <= b1 and b0 <= a1

    def __str__(self) -> str:
        if self.precision == "day":
            return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"
        if self.precision == "month":
            return f"{self.year:04d}-{self.month:02d}"
        return f"{self.year:04d}"

    @classmethod
    def parse(cls, text: str) -> "PartialDate":
        m = _DATE_RE.match(text.strip())
        if not m:
            raise ValidationError(f"invalid date {text!r} (expected YYYY, YYYY-MM or YYYY-MM-DD)")
        year, month, day = m.groups()
        return cls(int(year), int(month) if month else None, int(day) if day else None)


def range_intersects(
    start: PartialDate, end: PartialDate, other_start: PartialDate, other_end: PartialDate
) -> bool:
    return start.bounds()[0] <= other_end.bounds()[1] and other_start.bounds()[0] <= end.bounds()[1]


def _roman_to_int(text: str) -> int | None:
    total = 0
    prev = 0
    for ch in reversed(text.upper()):
        value = _ROMAN.get(ch)
        if value is None:
            return None
        if value < prev:
            total -= value
        else:
            total += value
            prev = value
    return total if total > 0 else None


def parse_year_range(text: str) -> tuple[int, int]:
    """Parse an analyst-facing period: "1800-1810", "1805", or "XIX c."."""
    text = text.strip()
    m = re.match(r"^(\d{3,4})\s*[-–]\s*(\d{3,4})$", text)
    if m:
        start, end = int(m.group(1)), int(m.group(2))
        if start > end:
            raise ValidationError(f"period start {start} after end {end}")
        return start, end
    if re.match(r"^\d{3,4}$", text):
        year = int(text)
        return year, year
    m = _CENTURY_RE.match(text)
    if m:
        century = _roman_to_int(m.group(1))
        if century:
            return 100 * (century - 1) + 1, 100 * century
    raise ValidationError(f"cannot parse period {text!r}")
