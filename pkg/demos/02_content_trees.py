"""Content trees: the linguistic view of an article.

The preprocessing pipeline (sentence segmentation, tokenization, POS
tagging, entity detection) turns each article into a tree whose leaves are
the article's terms and whose nodes carry POS tags; toponyms, person names,
organizations and dates group under entity nodes. Analysts explore these
trees instead of reading the full text.
"""

from hemeroclim.pipeline import Leaf, extract_event_candidates
from hemeroclim.workspace import Workspace, sample_corpus_lines

ws = Workspace.open()
ws.store.ingest(sample_corpus_lines())

tree = ws.content_tree("uy-001")


def show(node, indent=0):
    if isinstance(node, Leaf):
        print("  " * indent + repr(node.term))
        return
    label = node.tag + (f" [{node.canonical}]" if node.canonical else "")
    print("  " * indent + label)
    for child in node.children:
        show(child, indent + 1)


for index, sentence in enumerate(tree.sentences):
    print(f"--- sentence {index}")
    show(sentence.root)

# The in-order leaves reproduce the token stream exactly; nothing is lost.
print("\nleaves:", " ".join(tree.leaf_surfaces()))

# Entity spans: where the pipeline found places and dates.
for span in tree.entity_spans():
    print(f"{span.kind:6s} {span.canonical!r} at sentence {span.span.sentence}, tokens {span.span.start}..{span.span.end}")

# Event candidates bundle trigger terms with co-occurring locations, dates
# and person names. The machine proposes; the human validates later.
candidates = extract_event_candidates(
    tree, ws.vocab.meteorological_terms(), ws.vocab.damage_terms()
)
for candidate in candidates:
    print("\ncandidate for", candidate.article_id)
    print("  triggers:", [term for term, _ in candidate.trigger_terms])
    print("  locations:", [e.canonical for e in candidate.locations])
    print("  dates:", [e.canonical for e in candidate.dates])
    print("  damage hints:", [term for term, _ in candidate.damages_hints])
