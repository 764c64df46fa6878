"""Human-in-the-loop curation of event candidates.

Machine-proposed candidates queue up as tasks carrying ranked geo proposals
and date parses. Analysts apply the validation actions (correct trigger
terms, name the event from a personal name, confirm or reject locations, set
date/duration, record damages, or reject the article as a metaphor); every
action appends to a log, and replaying the log over the initial candidate
reproduces the task's derived state exactly. Confirmed tasks promote into
the climatologic event history.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .corpus import DocumentStore
from .dates import PartialDate, parse_year_range
from .errors import (
    NotFoundError,
    TaskClosedError,
    UnknownSpanError,
    ValidationError,
    VersionConflictError,
)
from .events import ClimateEvent, EventStore, ScopePoint
from .geo import Gazetteer, GazetteerEntry, GeoContext, rank_candidates
from .locks import ReadWriteLock
from .pipeline import EntitySpan, EventCandidate, Span
from .textnorm import normalize_term

ACTION_KINDS = (
    "correct_term",
    "set_event_name",
    "confirm_location",
    "reject_location",
    "set_date",
    "set_duration",
    "add_damage",
    "reject_metaphor",
)


@dataclass(frozen=True)
class AnalystAction:
    kind: str
    payload: dict
    timestamp: str

    @classmethod
    def make(cls, kind: str, payload: dict | None = None) -> "AnalystAction":
        if kind not in ACTION_KINDS:
            raise ValidationError(f"unknown action kind {kind!r}")
        return cls(kind, dict(payload or {}), datetime.now(timezone.utc).isoformat())


@dataclass
class TaskState:
    """Derived state of a task: a pure function of (candidate, action log)."""

    validated_triggers: dict[str, str] = field(default_factory=dict)  # span key -> term
    dropped_triggers: set[str] = field(default_factory=set)
    event_name: str | None = None
    confirmed_locations: dict[str, GazetteerEntry] = field(default_factory=dict)
    rejected_locations: set[str] = field(default_factory=set)
    event_date: PartialDate | None = None
    event_duration: tuple[PartialDate, PartialDate] | None = None
    damages: list[str] = field(default_factory=list)
    metaphor_rejected: bool = False

    def snapshot(self) -> dict:
        """Canonical JSON form, used by the replay-determinism checks."""
        return {
            "validated_triggers": dict(sorted(self.validated_triggers.items())),
            "dropped_triggers": sorted(self.dropped_triggers),
            "event_name": self.event_name,
            "confirmed_locations": {
                key: _entry_to_json(entry)
                for key, entry in sorted(self.confirmed_locations.items())
            },
            "rejected_locations": sorted(self.rejected_locations),
            "event_date": str(self.event_date) if self.event_date else None,
            "event_duration": [str(d) for d in self.event_duration] if self.event_duration else None,
            "damages": sorted(self.damages),
            "metaphor_rejected": self.metaphor_rejected,
        }


@dataclass
class CurationTask:
    id: str
    candidate: EventCandidate
    proposed_geo: dict[str, list[GazetteerEntry]]  # span key -> ranked candidates
    proposed_dates: list[PartialDate]
    article_date: PartialDate
    newspaper_country: str
    actions: list[AnalystAction] = field(default_factory=list)
    status: str = "pending"
    promoted_event_id: str | None = None

    @property
    def version(self) -> int:
        return len(self.actions)

    def derived_state(self) -> TaskState:
        return derive_state(self.candidate, self.actions)


def derive_state(candidate: EventCandidate, actions: list[AnalystAction]) -> TaskState:
    """Replay the action log over the initial candidate."""
    state = TaskState()
    for action in actions:
        payload = action.payload
        if action.kind == "correct_term":
            key = payload["span"]
            term = _trigger_term(candidate, key)
            if payload.get("keep", True):
                state.validated_triggers[key] = payload.get("replacement", term)
                state.dropped_triggers.discard(key)
            else:
                state.dropped_triggers.add(key)
                state.validated_triggers.pop(key, None)
        elif action.kind == "set_event_name":
            state.event_name = payload["name"]
        elif action.kind == "confirm_location":
            key = payload["span"]
            state.confirmed_locations[key] = _entry_from_json(payload["entry"])
            state.rejected_locations.discard(key)
        elif action.kind == "reject_location":
            key = payload["span"]
            state.rejected_locations.add(key)
            state.confirmed_locations.pop(key, None)
        elif action.kind == "set_date":
            state.event_date = PartialDate.parse(payload["date"])
        elif action.kind == "set_duration":
            state.event_duration = _duration_from_payload(payload)
        elif action.kind == "add_damage":
            term = normalize_term(payload["term"])
            if term not in state.damages:
                state.damages.append(term)
        elif action.kind == "reject_metaphor":
            state.metaphor_rejected = True
    return state


def _trigger_term(candidate: EventCandidate, span_key: str) -> str:
    for term, span in candidate.trigger_terms:
        if span.as_key() == span_key:
            return term
    raise UnknownSpanError(f"unknown span {span_key}")


def _duration_from_payload(payload: dict) -> tuple[PartialDate, PartialDate]:
    """Durations come as start/end partial dates or as a period, including
    century notation ("XIX c.")."""
    if payload.get("period"):
        start_year, end_year = parse_year_range(str(payload["period"]))
        return (PartialDate(start_year), PartialDate(end_year))
    return (
        PartialDate.parse(str(payload.get("start", ""))),
        PartialDate.parse(str(payload.get("end", ""))),
    )


def _entry_to_json(entry: GazetteerEntry) -> dict:
    return {
        "name": entry.name,
        "display_name": entry.display_name,
        "lat": entry.lat,
        "lon": entry.lon,
        "country": entry.country,
        "feature": entry.feature,
    }


def _entry_from_json(data: dict) -> GazetteerEntry:
    return GazetteerEntry(
        name=data["name"],
        display_name=data["display_name"],
        lat=float(data["lat"]),
        lon=float(data["lon"]),
        country=data["country"],
        feature=data.get("feature", "other"),
    )


def _span_to_json(span: Span) -> list[int]:
    return [span.sentence, span.start, span.end]


def _candidate_to_json(candidate: EventCandidate) -> dict:
    return {
        "article_id": candidate.article_id,
        "trigger_terms": [[t, _span_to_json(s)] for t, s in candidate.trigger_terms],
        "locations": [_entity_to_json(e) for e in candidate.locations],
        "dates": [_entity_to_json(e) for e in candidate.dates],
        "persons": [_entity_to_json(e) for e in candidate.persons],
        "damages_hints": [[t, _span_to_json(s)] for t, s in candidate.damages_hints],
        "status": candidate.status,
    }


def _entity_to_json(entity: EntitySpan) -> dict:
    return {"kind": entity.kind, "span": _span_to_json(entity.span), "canonical": entity.canonical}


def _span_from_json(data: list) -> Span:
    return Span(int(data[0]), int(data[1]), int(data[2]))


def _entity_from_json(data: dict) -> EntitySpan:
    return EntitySpan(data["kind"], _span_from_json(data["span"]), data["canonical"])


def _candidate_from_json(data: dict) -> EventCandidate:
    return EventCandidate(
        article_id=data["article_id"],
        trigger_terms=[(t, _span_from_json(s)) for t, s in data["trigger_terms"]],
        locations=[_entity_from_json(e) for e in data["locations"]],
        dates=[_entity_from_json(e) for e in data["dates"]],
        persons=[_entity_from_json(e) for e in data["persons"]],
        damages_hints=[(t, _span_from_json(s)) for t, s in data["damages_hints"]],
        status=data.get("status", "pending"),
    )


class CurationQueue:
    """Task queue with append-only persistence; tasks survive restarts by
    replaying the log."""

    def __init__(
        self,
        store: DocumentStore,
        gazetteer: Gazetteer,
        root: str | Path | None = None,
    ):
        self.store = store
        self.gazetteer = gazetteer
        self.root = Path(root) if root else None
        self._tasks: dict[str, CurationTask] = {}
        self._order: list[str] = []
        self._lock = ReadWriteLock()
        self._replaying = False
        if self.root:
            self._load()

    # -- persistence ---------------------------------------------------------

    def _log_path(self) -> Path:
        return self.root / "tasks.log"

    def _log(self, record: dict) -> None:
        if not self.root or self._replaying:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        with self._log_path().open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _load(self) -> None:
        path = self._log_path()
        if not path.is_file():
            return
        self._replaying = True
        try:
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = json.loads(line)
                if record["op"] == "enqueue":
                    task = CurationTask(
                        id=record["task_id"],
                        candidate=_candidate_from_json(record["candidate"]),
                        proposed_geo={
                            key: [_entry_from_json(e) for e in entries]
                            for key, entries in record["proposed_geo"].items()
                        },
                        proposed_dates=[PartialDate.parse(d) for d in record["proposed_dates"]],
                        article_date=PartialDate.parse(record["article_date"]),
                        newspaper_country=record["newspaper_country"],
                    )
                    self._tasks[task.id] = task
                    self._order.append(task.id)
                elif record["op"] == "action":
                    task = self._tasks[record["task_id"]]
                    action = AnalystAction(
                        record["kind"], record["payload"], record["timestamp"]
                    )
                    task.actions.append(action)
                    task.status = record["status"]
                elif record["op"] == "promoted":
                    task = self._tasks[record["task_id"]]
                    task.promoted_event_id = record["event_id"]
                    task.status = "confirmed"
        finally:
            self._replaying = False

    # -- queue ops -----------------------------------------------------------

    def enqueue(self, candidates: list[EventCandidate]) -> list[CurationTask]:
        """Wrap candidates with geo proposals (newspaper-country context) and
        date parses; FIFO ordering by article date then id."""
        with self._lock.write():
            ordered = sorted(
                candidates,
                key=lambda c: (self._article_date(c.article_id).sort_key(), c.article_id),
            )
            tasks: list[CurationTask] = []
            for candidate in ordered:
                if candidate.status != "pending":
                    raise ValidationError(f"candidate for {candidate.article_id} not pending")
                article = self.store.get(candidate.article_id)
                context = GeoContext(newspaper_country=article.newspaper.country)
                proposed_geo = {
                    entity.span.as_key(): self.gazetteer.resolve(entity.canonical, context)
                    for entity in candidate.locations
                }
                proposed_dates = []
                for entity in candidate.dates:
                    try:
                        parsed = PartialDate.parse(entity.canonical)
                    except ValidationError:
                        continue
                    if parsed not in proposed_dates:
                        proposed_dates.append(parsed)
                task = CurationTask(
                    id=f"task-{len(self._tasks) + 1:05d}",
                    candidate=candidate,
                    proposed_geo=proposed_geo,
                    proposed_dates=proposed_dates,
                    article_date=article.publication_date,
                    newspaper_country=article.newspaper.country,
                )
                self._tasks[task.id] = task
                self._order.append(task.id)
                tasks.append(task)
                self._log(
                    {
                        "op": "enqueue",
                        "task_id": task.id,
                        "candidate": _candidate_to_json(candidate),
                        "proposed_geo": {
                            key: [_entry_to_json(e) for e in entries]
                            for key, entries in proposed_geo.items()
                        },
                        "proposed_dates": [str(d) for d in proposed_dates],
                        "article_date": str(task.article_date),
                        "newspaper_country": task.newspaper_country,
                    }
                )
            return tasks

    def _article_date(self, article_id: str) -> PartialDate:
        return self.store.get(article_id).publication_date

    def get(self, task_id: str) -> CurationTask:
        with self._lock.read():
            task = self._tasks.get(task_id)
        if task is None:
            raise NotFoundError(f"unknown task {task_id!r}")
        return task

    def next_tasks(self, status: str | None = "pending", limit: int = 50) -> list[CurationTask]:
        """Tasks in stable FIFO order (article date, then id)."""
        with self._lock.read():
            tasks = [self._tasks[tid] for tid in self._order]
        if status:
            tasks = [t for t in tasks if t.status == status]
        tasks.sort(key=lambda t: (t.article_date.sort_key(), t.id))
        return tasks[:limit]

    def all_tasks(self) -> list[CurationTask]:
        return self.next_tasks(status=None, limit=len(self._tasks))

    # -- actions ---------------------------------------------------------------

    def apply_action(
        self,
        task_id: str,
        action: AnalystAction,
        expected_version: int | None = None,
    ) -> CurationTask:
        """Append one analyst action. Serialized per task; a stale
        expected_version is rejected so the analyst re-reads."""
        with self._lock.write():
            task = self._tasks.get(task_id)
            if task is None:
                raise NotFoundError(f"unknown task {task_id!r}")
            if task.status in ("confirmed", "rejected"):
                raise TaskClosedError("task closed")
            if expected_version is not None and expected_version != task.version:
                raise VersionConflictError(
                    f"task {task_id} is at version {task.version}, not {expected_version}"
                )
            self._validate_action(task, action)
            task.actions.append(action)
            if action.kind == "reject_metaphor":
                task.status = "rejected"
            elif task.status == "pending":
                task.status = "in_review"
            self._log(
                {
                    "op": "action",
                    "task_id": task_id,
                    "kind": action.kind,
                    "payload": action.payload,
                    "timestamp": action.timestamp,
                    "status": task.status,
                }
            )
            return task

    def _validate_action(self, task: CurationTask, action: AnalystAction) -> None:
        if action.kind not in ACTION_KINDS:
            raise ValidationError(f"unknown action kind {action.kind!r}")
        payload = action.payload
        candidate = task.candidate
        if action.kind == "correct_term":
            key = _require_span(payload)
            if not any(s.as_key() == key for _, s in candidate.trigger_terms):
                raise UnknownSpanError(f"unknown span {key}")
        elif action.kind in ("confirm_location", "reject_location"):
            key = _require_span(payload)
            if not any(e.span.as_key() == key for e in candidate.locations):
                raise UnknownSpanError(f"unknown span {key}")
            if action.kind == "confirm_location":
                entry = payload.get("entry")
                if not isinstance(entry, dict):
                    raise ValidationError("confirm_location needs an entry")
                proposals = task.proposed_geo.get(key, [])
                chosen = _entry_from_json(entry)
                if chosen not in proposals:
                    raise ValidationError("entry is not among the proposed candidates")
        elif action.kind == "set_event_name":
            if not payload.get("name"):
                raise ValidationError("set_event_name needs a name")
            key = payload.get("span")
            if key is not None and not any(
                e.span.as_key() == key for e in candidate.persons
            ):
                raise UnknownSpanError(f"unknown span {key}")
        elif action.kind == "set_date":
            PartialDate.parse(str(payload.get("date", "")))
            key = payload.get("span")
            if key is not None and not any(e.span.as_key() == key for e in candidate.dates):
                raise UnknownSpanError(f"unknown span {key}")
        elif action.kind == "set_duration":
            start, end = _duration_from_payload(payload)
            if start.bounds()[0] > end.bounds()[1]:
                raise ValidationError("duration start after end")
        elif action.kind == "add_damage":
            if not payload.get("term"):
                raise ValidationError("add_damage needs a term")
            key = payload.get("span")
            if key is not None and not _span_in_candidate(candidate, key):
                raise UnknownSpanError(f"unknown span {key}")

    # -- promotion ---------------------------------------------------------------

    def promote(self, task_id: str, events: EventStore) -> ClimateEvent:
        """Promote a fully validated task into the event history.

        Requires at least one validated trigger term, one confirmed location
        and a validated date; otherwise the error lists the missing slots.
        Idempotent per task, and duplicate events (same name, overlapping
        dates, scope within the merge radius) merge article provenance
        instead of multiplying."""
        with self._lock.write():
            task = self._tasks.get(task_id)
            if task is None:
                raise NotFoundError(f"unknown task {task_id!r}")
            if task.status == "rejected":
                raise TaskClosedError("task closed")
            if task.promoted_event_id is not None:
                return events.get(task.promoted_event_id)
            state = task.derived_state()
            missing = []
            if not state.validated_triggers:
                missing.append("trigger")
            if not state.confirmed_locations:
                missing.append("location")
            if state.event_date is None:
                missing.append("date")
            if missing:
                raise ValidationError(
                    "cannot promote, missing: " + ", ".join(missing), details=missing
                )
            scope = tuple(
                ScopePoint(
                    location_name=entry.display_name,
                    lon=entry.lon,
                    lat=entry.lat,
                    country=entry.country,
                )
                for _, entry in sorted(state.confirmed_locations.items())
            )
            terms = frozenset(state.validated_triggers.values())
            damages = frozenset(state.damages)
            duration = state.event_duration
            time_bounds = duration if duration else (state.event_date, state.event_date)
            existing = events.find_mergeable(state.event_name, time_bounds, scope)
            if existing is not None:
                merged = ClimateEvent(
                    id=existing.id,
                    date=existing.date,
                    scope=existing.scope,
                    duration=existing.duration,
                    name=existing.name,
                    damages=existing.damages | damages,
                    attributes=existing.attributes,
                    articles=existing.articles | {task.candidate.article_id},
                    terms=existing.terms | terms,
                )
                events.put(merged)
                event = merged
            else:
                event = ClimateEvent(
                    id=events.next_id(),
                    date=state.event_date,
                    scope=scope,
                    duration=duration,
                    name=state.event_name,
                    damages=damages,
                    attributes={},
                    articles=frozenset({task.candidate.article_id}),
                    terms=terms,
                )
                events.put(event)
            task.promoted_event_id = event.id
            task.status = "confirmed"
            self._log({"op": "promoted", "task_id": task_id, "event_id": event.id})
            return event


def _require_span(payload: dict) -> str:
    key = payload.get("span")
    if not key:
        raise ValidationError("action needs a span")
    return str(key)


def _span_in_candidate(candidate: EventCandidate, key: str) -> bool:
    try:
        span = Span.from_key(key)
    except (ValueError, AttributeError):
        return False
    return candidate.span_exists(span)


def task_to_json(task: CurationTask, collapse_geo: bool = True) -> dict:
    """API/CLI view of a task; confirmed spans show their chosen gazetteer
    entry only."""
    state = task.derived_state()
    geo_view: dict[str, list[dict]] = {}
    for key, entries in task.proposed_geo.items():
        if collapse_geo and key in state.confirmed_locations:
            geo_view[key] = [_entry_to_json(state.confirmed_locations[key])]
        else:
            geo_view[key] = [_entry_to_json(e) for e in entries]
    return {
        "id": task.id,
        "status": task.status,
        "version": task.version,
        "article_id": task.candidate.article_id,
        "article_date": str(task.article_date),
        "newspaper_country": task.newspaper_country,
        "candidate": _candidate_to_json(task.candidate),
        "proposed_geo": geo_view,
        "proposed_dates": [str(d) for d in task.proposed_dates],
        "state": state.snapshot(),
        "promoted_event_id": task.promoted_event_id,
        "actions": [
            {"kind": a.kind, "payload": a.payload, "timestamp": a.timestamp}
            for a in task.actions
        ],
    }
