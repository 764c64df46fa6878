"""The climatologic event history.

Validated events persist in an append-log store and support spatio-temporal
queries (country, bounding box, radius around a point, time range), fame
ranking by article provenance, heat-map grid aggregation over Latin America,
domain-rule attribute inference, and term-evolution series over the corpus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .corpus import ArticleFilter, DocumentStore
from .dates import PartialDate, range_intersects
from .errors import NotFoundError, ValidationError
from .geo import distance_km
from .locks import ReadWriteLock
from .rules import DomainRule
from .textnorm import flat_tokens, fold, normalize_term
from .vocab import Vocabulary

# Default heat-map extent: Latin America.
LATAM_BBOX = (-120.0, -60.0, -30.0, 35.0)  # (lon_min, lat_min, lon_max, lat_max)
DEFAULT_CELL_DEG = 1.0
MERGE_RADIUS_KM = 50.0
# preset time filter for "the last years of the XIX century" heat maps
XIX_LAST_YEARS = (1890, 1900)


@dataclass(frozen=True)
class ScopePoint:
    location_name: str
    lon: float
    lat: float
    country: str | None = None


@dataclass(frozen=True)
class AttributeValue:
    """A meteorological attribute with provenance: reported in an article or
    inferred by a domain rule (which is then cited)."""

    value: float | tuple[float, float] | str
    comparator: str = "="
    unit: str | None = None
    provenance: str = "reported"
    rule_id: str | None = None

    def __post_init__(self) -> None:
        if self.provenance == "inferred_by_rule" and not self.rule_id:
            raise ValidationError("inferred attribute must cite a rule id")


@dataclass(frozen=True)
class ClimateEvent:
    id: str
    date: PartialDate
    scope: tuple[ScopePoint, ...]
    duration: tuple[PartialDate, PartialDate] | None = None
    name: str | None = None
    damages: frozenset[str] = frozenset()
    attributes: dict[str, AttributeValue] = field(default_factory=dict)
    articles: frozenset[str] = frozenset()
    terms: frozenset[str] = frozenset()  # validated trigger terms

    def __post_init__(self) -> None:
        if not self.scope:
            raise ValidationError("event scope must be non-empty")
        if self.duration is not None:
            init, end = self.duration
            if init.bounds()[0] > end.bounds()[1]:
                raise ValidationError("duration init after end")
            if not range_intersects(init, end, self.date, self.date):
                raise ValidationError("event date outside duration")

    def time_bounds(self) -> tuple[PartialDate, PartialDate]:
        if self.duration is not None:
            return self.duration
        return (self.date, self.date)


def event_to_record(event: ClimateEvent) -> dict:
    record: dict[str, object] = {
        "id": event.id,
        "date": str(event.date),
        "scope": [
            {
                "locationName": p.location_name,
                "lon": p.lon,
                "lat": p.lat,
                **({"country": p.country} if p.country else {}),
            }
            for p in sorted(event.scope, key=lambda p: (p.location_name, p.lat, p.lon))
        ],
        "damages": sorted(event.damages),
        "articles": sorted(event.articles),
        "terms": sorted(event.terms),
    }
    if event.duration:
        record["duration"] = {"init": str(event.duration[0]), "end": str(event.duration[1])}
    if event.name:
        record["name"] = event.name
    if event.attributes:
        record["attributes"] = {
            attr: {
                "value": list(v.value) if isinstance(v.value, tuple) else v.value,
                "comparator": v.comparator,
                **({"unit": v.unit} if v.unit else {}),
                "provenance": v.provenance,
                **({"rule_id": v.rule_id} if v.rule_id else {}),
            }
            for attr, v in sorted(event.attributes.items())
        }
    return record


def event_from_record(record: dict) -> ClimateEvent:
    duration = None
    if record.get("duration"):
        duration = (
            PartialDate.parse(record["duration"]["init"]),
            PartialDate.parse(record["duration"]["end"]),
        )
    attributes = {}
    for attr, payload in (record.get("attributes") or {}).items():
        value = payload["value"]
        if isinstance(value, list):
            value = (float(value[0]), float(value[1]))
        attributes[attr] = AttributeValue(
            value=value,
            comparator=payload.get("comparator", "="),
            unit=payload.get("unit"),
            provenance=payload.get("provenance", "reported"),
            rule_id=payload.get("rule_id"),
        )
    return ClimateEvent(
        id=record["id"],
        date=PartialDate.parse(str(record["date"])),
        scope=tuple(
            ScopePoint(
                location_name=p["locationName"],
                lon=float(p["lon"]),
                lat=float(p["lat"]),
                country=p.get("country"),
            )
            for p in record["scope"]
        ),
        duration=duration,
        name=record.get("name"),
        damages=frozenset(record.get("damages", ())),
        attributes=attributes,
        articles=frozenset(record.get("articles", ())),
        terms=frozenset(record.get("terms", ())),
    )


@dataclass(frozen=True)
class EventFilter:
    country: str | None = None
    bbox: tuple[float, float, float, float] | None = None  # lon_min, lat_min, lon_max, lat_max
    center: tuple[float, float] | None = None  # (lat, lon)
    radius_km: float | None = None
    time_range: tuple[int, int] | None = None  # inclusive years
    name: str | None = None
    damage_term: str | None = None

    def __post_init__(self) -> None:
        if self.radius_km is not None and self.center is None:
            raise ValidationError("radius requires a center")
        if self.bbox is not None:
            if len(self.bbox) != 4:
                raise ValidationError("bbox must be (lon_min, lat_min, lon_max, lat_max)")
            lon_min, lat_min, lon_max, lat_max = self.bbox
            if lon_min > lon_max or lat_min > lat_max:
                raise ValidationError("malformed bbox: min exceeds max")

    def matches(self, event: ClimateEvent) -> bool:
        if self.country:
            country = self.country.upper()
            if not any(p.country == country for p in event.scope):
                return False
        if self.bbox:
            lon_min, lat_min, lon_max, lat_max = self.bbox
            if not any(
                lon_min <= p.lon <= lon_max and lat_min <= p.lat <= lat_max
                for p in event.scope
            ):
                return False
        if self.center is not None and self.radius_km is not None:
            if not any(
                distance_km(self.center, (p.lat, p.lon)) <= self.radius_km
                for p in event.scope
            ):
                return False
        if self.time_range:
            start, end = self.time_range
            e0, e1 = event.time_bounds()
            if not range_intersects(e0, e1, PartialDate(max(1, start)), PartialDate(max(1, end))):
                return False
        if self.name:
            if not event.name or normalize_term(event.name) != normalize_term(self.name):
                return False
        if self.damage_term:
            folded = fold(self.damage_term)
            ok = any(
                folded == fold(d) or folded in {fold(w) for w in d.split()}
                for d in event.damages
            )
            if not ok:
                return False
        return True


class EventStore:
    """Append-log event store with periodic compaction; canonical export is
    sorted by id for reproducible diffs."""

    def __init__(self, root: str | Path | None = None, compact_every: int = 200):
        self.root = Path(root) if root else None
        self._events: dict[str, ClimateEvent] = {}
        self._lock = ReadWriteLock()
        self._appends = 0
        self._compact_every = compact_every
        if self.root:
            self._load()

    def _log_path(self) -> Path:
        return self.root / "events.log"

    def _load(self) -> None:
        path = self._log_path()
        if not path.is_file():
            return
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            event = event_from_record(json.loads(line))
            self._events[event.id] = event

    def _append(self, event: ClimateEvent) -> None:
        if not self.root:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        with self._log_path().open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event_to_record(event), ensure_ascii=False, sort_keys=True) + "\n")
        self._appends += 1
        if self._appends >= self._compact_every:
            self._compact()

    def _compact(self) -> None:
        records = [
            json.dumps(event_to_record(e), ensure_ascii=False, sort_keys=True)
            for e in sorted(self._events.values(), key=lambda e: e.id)
        ]
        self._log_path().write_text("\n".join(records) + ("\n" if records else ""), encoding="utf-8")
        self._appends = 0

    def put(self, event: ClimateEvent) -> ClimateEvent:
        """Insert or replace (last write per id wins in the log)."""
        with self._lock.write():
            self._events[event.id] = event
            self._append(event)
        return event

    def get(self, event_id: str) -> ClimateEvent:
        with self._lock.read():
            event = self._events.get(event_id)
        if event is None:
            raise NotFoundError(f"unknown event {event_id!r}")
        return event

    def all_events(self) -> list[ClimateEvent]:
        with self._lock.read():
            return sorted(self._events.values(), key=lambda e: e.id)

    def __len__(self) -> int:
        return len(self._events)

    def next_id(self) -> str:
        with self._lock.read():
            return f"ev-{len(self._events) + 1:05d}"

    def find_mergeable(
        self,
        name: str | None,
        time_bounds: tuple[PartialDate, PartialDate],
        scope: Iterable[ScopePoint],
    ) -> ClimateEvent | None:
        """An existing event this one duplicates: same validated name (or
        both unnamed), overlapping time ranges, nearest scope points within
        the merge radius."""
        scope = list(scope)
        wanted = normalize_term(name) if name else None
        with self._lock.read():
            for event in sorted(self._events.values(), key=lambda e: e.id):
                existing = normalize_term(event.name) if event.name else None
                if existing != wanted:
                    continue
                e0, e1 = event.time_bounds()
                if not range_intersects(e0, e1, *time_bounds):
                    continue
                close = any(
                    distance_km((a.lat, a.lon), (b.lat, b.lon)) <= MERGE_RADIUS_KM
                    for a in event.scope
                    for b in scope
                )
                if close:
                    return event
        return None


def query_events(store: EventStore, event_filter: EventFilter | None = None) -> list[ClimateEvent]:
    """Conjunctive filter semantics; time ranges match intersecting
    durations, radii use great-circle distance against any scope point."""
    flt = event_filter or EventFilter()
    return [e for e in store.all_events() if flt.matches(e)]


def most_reported(
    store: EventStore, event_filter: EventFilter | None = None, k: int = 10
) -> list[tuple[ClimateEvent, int]]:
    """Events by article-provenance count descending (the only fame signal
    in the data model), ties by date ascending."""
    if k <= 0:
        return []
    events = query_events(store, event_filter)
    ranked = sorted(events, key=lambda e: (-len(e.articles), e.date.sort_key(), e.id))
    return [(e, len(e.articles)) for e in ranked[:k]]


# -- heat map -------------------------------------------------------------------


@dataclass
class HeatmapGrid:
    bbox: tuple[float, float, float, float]
    cell_deg: float
    cells: dict[tuple[int, int], int]

    @property
    def n_rows(self) -> int:
        return max(1, int(-(-(self.bbox[3] - self.bbox[1]) // self.cell_deg)))

    @property
    def n_cols(self) -> int:
        return max(1, int(-(-(self.bbox[2] - self.bbox[0]) // self.cell_deg)))

    def cell_of(self, lat: float, lon: float) -> tuple[int, int] | None:
        lon_min, lat_min, lon_max, lat_max = self.bbox
        if not (lon_min <= lon <= lon_max and lat_min <= lat <= lat_max):
            return None
        row = min(int((lat - lat_min) // self.cell_deg), self.n_rows - 1)
        col = min(int((lon - lon_min) // self.cell_deg), self.n_cols - 1)
        return (row, col)


def heatmap(
    store: EventStore,
    event_filter: EventFilter | None = None,
    cell_deg: float = DEFAULT_CELL_DEG,
    bbox: tuple[float, float, float, float] = LATAM_BBOX,
) -> HeatmapGrid:
    """Count events per grid cell. An event increments every distinct cell
    holding at least one of its scope points, once per cell, so multi-point
    events may contribute to several cells."""
    if cell_deg <= 0:
        raise ValidationError("cell_deg must be positive")
    grid = HeatmapGrid(bbox=bbox, cell_deg=cell_deg, cells={})
    for event in query_events(store, event_filter):
        hit: set[tuple[int, int]] = set()
        for point in event.scope:
            cell = grid.cell_of(point.lat, point.lon)
            if cell is not None:
                hit.add(cell)
        for cell in hit:
            grid.cells[cell] = grid.cells.get(cell, 0) + 1
    return grid


def export_heatmap(grid: HeatmapGrid) -> dict:
    """GeoJSON feature collection of cell polygons with count properties,
    row-major order."""
    lon_min, lat_min, _, _ = grid.bbox
    features = []
    for (row, col) in sorted(grid.cells):
        count = grid.cells[(row, col)]
        south = lat_min + row * grid.cell_deg
        west = lon_min + col * grid.cell_deg
        north = south + grid.cell_deg
        east = west + grid.cell_deg
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[
                        [west, south], [east, south], [east, north], [west, north], [west, south],
                    ]],
                },
                "properties": {"row": row, "col": col, "count": count},
            }
        )
    return {"type": "FeatureCollection", "features": features}


# -- attribute inference -----------------------------------------------------------


def infer_attributes(event: ClimateEvent, rules: list[DomainRule]) -> ClimateEvent:
    """Fill missing attributes from rules whose trigger appears among the
    event's validated trigger terms or damages. Monotone (only blanks are
    filled, reported values never overwritten) and idempotent."""
    phrases = [list(t.split()) for t in event.terms] + [d.split() for d in event.damages]
    attributes = dict(event.attributes)
    for rule in rules:
        if not any(rule.matches_phrase(p) for p in phrases):
            continue
        for implication in rule.implications:
            if implication.attribute == "reach_km":
                continue  # reach is a query-time notion, not an event attribute
            if implication.attribute in attributes:
                continue
            attributes[implication.attribute] = AttributeValue(
                value=implication.value,
                comparator=implication.comparator,
                unit=implication.unit,
                provenance="inferred_by_rule",
                rule_id=rule.id,
            )
    if attributes == event.attributes:
        return event
    return replace(event, attributes=attributes)


# -- analytics ----------------------------------------------------------------------


def term_evolution(
    store: DocumentStore,
    vocab: Vocabulary,
    term: str,
    buckets: list[tuple[int, int]],
    countries: Iterable[str] | None = None,
) -> dict[str, list[int]]:
    """Occurrences per period bucket and country of a concept: the term plus
    that country's cultural equivalents."""
    term = normalize_term(term)
    if countries is None:
        countries = sorted(vocab.supported_countries())
    series: dict[str, list[int]] = {}
    for country in countries:
        country = country.upper()
        concept = {term} | vocab.cultural_equivalents(term, country)
        folded = {fold(t) for t in concept if " " not in t}
        counts: list[int] = []
        for start, end in buckets:
            total = 0
            for article in store.list_articles(country=country, date_range=(start, end)):
                for token in flat_tokens(article.raw_text):
                    if not token.is_punct and fold(token.normalized) in folded:
                        total += 1
            counts.append(total)
        series[country] = counts
    return series


def decade_buckets(start_year: int, end_year: int, width: int = 10) -> list[tuple[int, int]]:
    buckets = []
    year = start_year
    while year <= end_year:
        buckets.append((year, min(year + width - 1, end_year)))
        year += width
    return buckets


# -- export / import ------------------------------------------------------------------


def export_events(
    store: EventStore, event_filter: EventFilter | None = None, format: str = "jsonl"
) -> str:
    """Canonical export in the event record format, sorted by id."""
    events = query_events(store, event_filter)
    if format == "jsonl":
        return "".join(
            json.dumps(event_to_record(e), ensure_ascii=False, sort_keys=True) + "\n"
            for e in events
        )
    if format == "json":
        return json.dumps(
            [event_to_record(e) for e in events], ensure_ascii=False, sort_keys=True, indent=2
        )
    raise ValidationError(f"unsupported export format {format!r}")


def import_events(text: str, store: EventStore) -> int:
    count = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        store.put(event_from_record(json.loads(line)))
        count += 1
    return count
