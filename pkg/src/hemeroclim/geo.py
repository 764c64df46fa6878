"""Gazetteer storage, toponym resolution and great-circle distance.

Resolution never decides: it returns every candidate for a name (accent- and
case-insensitively) in a deterministic order, and ranking only reorders.
The final choice between, say, Montevideo in Uruguay and Montevideo in the
United States belongs to the analyst.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .textnorm import fold, normalize_term

EARTH_RADIUS_KM = 6371.0

FEATURE_RANK = {"city": 0, "town": 1, "village": 2, "region": 3, "river": 4, "other": 5}


@dataclass(frozen=True)
class GazetteerEntry:
    name: str  # normalized (lowercase, accents kept)
    display_name: str
    lat: float
    lon: float
    country: str
    feature: str

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"latitude {self.lat} out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise ValidationError(f"longitude {self.lon} out of range")
        if self.feature not in FEATURE_RANK:
            raise ValidationError(f"unknown feature {self.feature!r}")


@dataclass(frozen=True)
class GeoContext:
    newspaper_country: str | None = None
    nearby_confirmed_points: tuple[tuple[float, float], ...] = ()


def distance_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance between (lat, lon) pairs, spherical Earth."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def rank_candidates(
    candidates: list[GazetteerEntry], context: GeoContext | None = None
) -> list[GazetteerEntry]:
    """Reorder candidates: newspaper-country entries first, then nearest to
    the centroid of confirmed points, then feature importance, then
    lexicographic. A permutation of the input; nothing is filtered."""
    context = context or GeoContext()
    centroid = None
    if context.nearby_confirmed_points:
        pts = context.nearby_confirmed_points
        centroid = (
            sum(p[0] for p in pts) / len(pts),
            sum(p[1] for p in pts) / len(pts),
        )

    def key(entry: GazetteerEntry):
        same_country = 0 if context.newspaper_country and entry.country == context.newspaper_country.upper() else 1
        dist = distance_km(centroid, (entry.lat, entry.lon)) if centroid else 0.0
        return (
            same_country,
            dist,
            FEATURE_RANK[entry.feature],
            entry.display_name,
            entry.country,
            entry.lat,
            entry.lon,
        )

    return sorted(candidates, key=key)


class Gazetteer:
    """Lookup table of place names; read-only after load."""

    def __init__(self, entries: list[GazetteerEntry] | None = None):
        self._by_key: dict[str, list[GazetteerEntry]] = {}
        self._entries: list[GazetteerEntry] = []
        self._identities: set[tuple[str, str, float, float]] = set()
        for entry in entries or []:
            self.add(entry)

    def add(self, entry: GazetteerEntry) -> None:
        identity = (entry.name, entry.country, entry.lat, entry.lon)
        if identity in self._identities:
            raise ValidationError(f"duplicate gazetteer entry {identity}")
        self._identities.add(identity)
        self._entries.append(entry)
        self._by_key.setdefault(fold(entry.name), []).append(entry)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def contains_name(self, name: str) -> bool:
        return fold(name) in self._by_key

    def resolve(self, name: str, context: GeoContext | None = None) -> list[GazetteerEntry]:
        """All entries matching the name (case/accent-insensitive), ordered
        by rank_candidates."""
        return rank_candidates(list(self._by_key.get(fold(name), [])), context)

    @classmethod
    def from_file(cls, path: str | Path) -> "Gazetteer":
        gaz = cls()
        with open(path, encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                gaz.add(
                    GazetteerEntry(
                        name=normalize_term(row["name"]),
                        display_name=row["display_name"],
                        lat=float(row["lat"]),
                        lon=float(row["lon"]),
                        country=row["country"].upper(),
                        feature=row["feature"],
                    )
                )
        return gaz
