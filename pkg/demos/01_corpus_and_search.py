"""Ingesting newspaper articles and searching the inverted index.

Everything runs in memory on the packaged demonstration corpus: 36 articles
from Mexican, Colombian, Ecuadorian and Uruguayan newspapers of the late
XVIII and XIX centuries.
"""

from hemeroclim.query import evaluate, parse_query, render_query
from hemeroclim.workspace import Workspace, sample_corpus_lines

ws = Workspace.open()

# Ingest: line-delimited JSON records, one article per line. Rejections are
# reported per line, never silently dropped.
report = ws.store.ingest(sample_corpus_lines())
print(f"accepted {report.accepted} articles, rejected {len(report.rejected)}")

# Factual filtering: Uruguayan articles between 1800 and 1810.
for article in ws.store.list_articles(country="UY", date_range=(1800, 1810)):
    print(f"  {article.id}  {article.publication_date}  {article.newspaper.name}")

# The index is positional, so quoted phrases require adjacency: the two
# queries below match different articles.
for text in ('"fuertes tormentas"', '"tormentas fuertes"'):
    query = parse_query(text)
    results = evaluate(query, ws.store.index, store=ws.store)
    print(f"{render_query(query):30s} -> {[doc for doc, _ in results]}")

# Accent-stripped shadow keys make matching robust to OCR-era orthography:
# the unaccented query still finds the accented text.
print("rio ->", [doc for doc, _ in evaluate(parse_query("rio"), ws.store.index)][:5])

# Boolean combinations rank by the number of distinct matched terms, then by
# publication date.
combined = parse_query("tormenta AND montevideo OR granizada")
for doc, score in evaluate(combined, ws.store.index, store=ws.store):
    print(f"  score {score}: {doc}")
