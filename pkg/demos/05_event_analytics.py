"""Spatio-temporal analytics over the curated event history.

With events in the store, the history answers the classic questions: locate
events in the XIX century, rank the most reported ones, draw a heat map of
Latin America, trace how vocabulary use evolved per country, and infer
missing physical attributes from meteorologist rules.
"""

import json
import random

from hemeroclim.dates import PartialDate, parse_year_range
from hemeroclim.events import (
    ClimateEvent,
    EventFilter,
    EventStore,
    ScopePoint,
    decade_buckets,
    export_events,
    export_heatmap,
    heatmap,
    infer_attributes,
    most_reported,
    query_events,
    term_evolution,
)
from hemeroclim.workspace import Workspace, sample_corpus_lines

ws = Workspace.open()
ws.store.ingest(sample_corpus_lines())

# Seed the history with events at real gazetteer coordinates.
rng = random.Random(3)
places = [e for e in ws.gazetteer if e.country in {"MX", "CO", "EC", "UY"} and e.feature == "city"]
store = EventStore()
for i, place in enumerate(rng.sample(places, 25)):
    store.put(
        ClimateEvent(
            id=f"ev-{i:03d}",
            date=PartialDate(rng.randint(1780, 1900)),
            scope=(ScopePoint(place.display_name, place.lon, place.lat, place.country),),
            articles=frozenset(f"a{i}-{j}" for j in range(rng.randint(1, 4))),
            terms=frozenset({"tormenta"}),
            damages=frozenset({"desborde del río"} if i % 3 == 0 else set()),
        )
    )

# Q1-style: locate events of the XIX century.
century = parse_year_range("XIX c.")
xix = query_events(store, EventFilter(time_range=century))
print(f"{len(xix)} events in the XIX century ({century[0]}-{century[1]})")

# Q2-style: the most famous events, fame proxied by article provenance.
for event, count in most_reported(store, k=3):
    print(f"  {count} articles: {event.id} at {event.scope[0].location_name}")

# Q3-style: heat map of the last years of the XIX century, 1-degree cells.
grid = heatmap(store, EventFilter(time_range=(1890, 1900)))
print(f"heat map cells: {dict(sorted(grid.cells.items()))}")
print(json.dumps(export_heatmap(grid), ensure_ascii=False)[:160], "...")

# Radius query: events within 500 km of Mexico City.
near = query_events(store, EventFilter(center=(19.4326, -99.1332), radius_km=500))
print(f"within 500 km of Mexico City: {[e.scope[0].location_name for e in near]}")

# Rule inference: a river overflow implies wind and rain figures, with the
# rule cited as provenance. Reported values are never overwritten.
flooded = next(e for e in store.all_events() if e.damages)
completed = infer_attributes(flooded, ws.rules)
for attribute, value in completed.attributes.items():
    print(f"  inferred {attribute} {value.comparator} {value.value} (rule {value.rule_id})")

# Vocabulary evolution: how storm words (and their per-country colloquial
# equivalents) appear across the decades of the corpus.
series = term_evolution(ws.store, ws.vocab, "tormenta", decade_buckets(1780, 1889, 10))
for country, counts in sorted(series.items()):
    print(f"  {country}: {counts}")

# The export is canonical (sorted by id) so diffs are reproducible.
print(export_events(store).splitlines()[0][:120], "...")
