"""Query morphing: one query in, a set of alternatives out.

Instead of one long expression, the engine offers the analyst a set of
rewritten queries to choose among: thesaurus-extended (synonyms and more
general terms), culturally localized (each country's colloquial
vocabulary), and domain-rule expanded (physical attribute constraints from
meteorologist knowledge).
"""

import json

from hemeroclim.query import (
    GeoQueryContext,
    build_rewrite_plan,
    evaluate_set,
    extend_with_thesaurus,
    parse_query,
    render_query,
)
from hemeroclim.workspace import Workspace, sample_corpus_lines

ws = Workspace.open()
ws.store.ingest(sample_corpus_lines())

plan = build_rewrite_plan(
    parse_query("tormenta fuerte"),
    ws.vocab,
    ws.rules,
    geo_context=GeoQueryContext("Mexico City", 500),
    gazetteer=ws.gazetteer,
)
print(json.dumps(plan.to_json(), indent=2, ensure_ascii=False))

# Extension is recall-safe by construction: the extended query can only
# match more articles, never fewer.
base = parse_query("tormenta")
extended = extend_with_thesaurus(base, ws.vocab)
base_hits = evaluate_set(base, ws.store.index)
wide_hits = evaluate_set(extended, ws.store.index)
print(f"\n{render_query(base)} matched {len(base_hits)} docs")
print(f"{render_query(extended)} matched {len(wide_hits)} docs (superset: {base_hits <= wide_hits})")

# The conjunctive-hypernym mode conjoins general terms instead, which narrows
# results; both behaviors are available.
literal = extend_with_thesaurus(parse_query("chubasco"), ws.vocab, conjunctive_hypernyms=True)
print("\nconjunctive extension of chubasco:", render_query(literal))

# Localization substitutes-as-disjunction per country.
for country in ("MX", "UY", "CO", "EC"):
    from hemeroclim.query import localize_query

    localized = localize_query(base, country, ws.vocab)
    print(f"{country}: {render_query(localized)}")
