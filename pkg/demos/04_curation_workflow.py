"""The human-in-the-loop curation loop, end to end.

The pipeline proposes event candidates; the analyst validates trigger
terms, disambiguates toponyms (Montevideo in Uruguay, not Minnesota), sets
the date, records damages, and promotes the task into the event history.
Metaphors (a political storm in the senate) are rejected by hand, because
no automatic process can tell them apart reliably.
"""

from hemeroclim.curation import AnalystAction
from hemeroclim.workspace import Workspace, sample_corpus_lines

ws = Workspace.open()
ws.store.ingest(sample_corpus_lines())
print(ws.run_pipeline())

tasks = {t.candidate.article_id: t for t in ws.queue.all_tasks()}

# --- a real storm: the 1805 Montevideo article -----------------------------
task = tasks["uy-001"]
print(f"\n{task.id}: triggers {[t for t, _ in task.candidate.trigger_terms]}")
location_key = task.candidate.locations[0].span.as_key()
for entry in task.proposed_geo[location_key]:
    print(f"  proposal: {entry.display_name}, {entry.country} ({entry.lat}, {entry.lon})")
print("  proposed dates:", [str(d) for d in task.proposed_dates])

# The analyst keeps the trigger, picks the Uruguayan Montevideo, takes the
# proposed date, and records the flooding.
trigger_key = task.candidate.trigger_terms[0][1].as_key()
chosen = task.proposed_geo[location_key][0]
ws.queue.apply_action(task.id, AnalystAction.make("correct_term", {"span": trigger_key, "keep": True}))
ws.queue.apply_action(
    task.id,
    AnalystAction.make(
        "confirm_location",
        {
            "span": location_key,
            "entry": {
                "name": chosen.name, "display_name": chosen.display_name,
                "lat": chosen.lat, "lon": chosen.lon,
                "country": chosen.country, "feature": chosen.feature,
            },
        },
    ),
)
ws.queue.apply_action(task.id, AnalystAction.make("set_date", {"date": str(task.proposed_dates[0])}))
ws.queue.apply_action(task.id, AnalystAction.make("add_damage", {"term": "inundación"}))

event = ws.queue.promote(task.id, ws.events)
print(f"\npromoted -> {event.id}: {sorted(event.terms)} at {[p.location_name for p in event.scope]} on {event.date}")

# --- the stormy senate: a metaphor, not a climatologic event ----------------
metaphor = tasks["ec-001"]
ws.queue.apply_action(metaphor.id, AnalystAction.make("reject_metaphor"))
print(f"{metaphor.id} is now {ws.queue.get(metaphor.id).status}; events in history: {len(ws.events)}")

# The action log is the source of truth: replaying it reproduces the task
# state, and promoting twice never duplicates the event.
again = ws.queue.promote(task.id, ws.events)
print(f"promote is idempotent: {again.id == event.id}, events: {len(ws.events)}")
