"""Per-country meteorological vocabularies and the thesaurus.

Folksonomies link the colloquial terms each country's newspapers use
(chaparrón in Mexico, chubasco in Uruguay) to pan-regional scientific terms;
the embedded thesaurus carries synonym/hypernym relations for the core
meteorological concepts. Term-frequency surfaces for corpus exploration live
here too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .corpus import ArticleFilter, DocumentStore
from .errors import ConflictError, CycleError, ValidationError
from .locks import ReadWriteLock
from .textnorm import flat_tokens, fold, normalize_term

PAN_REGIONAL = "*"

RELATION_KINDS = ("synonym", "hypernym", "cultural_equivalent", "scientific_equivalent")
REGISTERS = ("colloquial", "scientific")


@dataclass(frozen=True)
class VocabEntry:
    term: str
    country: str  # ISO code or "*" for pan-regional
    register: str
    added_by: str = "analyst"


@dataclass(frozen=True)
class TermRelation:
    source: str
    target: str
    kind: str
    country: str | None = None


class Vocabulary:
    """Vocabulary store: entries, relations, and their lookup surfaces.

    Reads are concurrent; add/link mutations serialize through a writer
    lock and optionally append to a journal file so analyst additions
    survive restarts.
    """

    def __init__(self, journal: str | Path | None = None):
        self._entries: dict[tuple[str, str], VocabEntry] = {}
        self._relations: list[TermRelation] = []
        self._relation_keys: set[tuple] = set()
        self._synonyms: dict[str, set[str]] = {}
        self._hypernyms: dict[str, set[str]] = {}
        self._hyponyms: dict[str, set[str]] = {}
        # (colloquial, scientific, country) triples backing cultural lookups
        self._cultural: set[tuple[str, str, str]] = set()
        self._damage_terms: set[str] = set()
        self._lock = ReadWriteLock()
        self._journal = Path(journal) if journal else None
        self._replaying = False
        if self._journal and self._journal.is_file():
            self._replay_journal()

    # -- persistence ---------------------------------------------------------

    def _journal_write(self, record: dict) -> None:
        if self._journal is None or self._replaying:
            return
        self._journal.parent.mkdir(parents=True, exist_ok=True)
        with self._journal.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _replay_journal(self) -> None:
        self._replaying = True
        try:
            for line in self._journal.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = json.loads(line)
                if record["op"] == "term":
                    self.add_term(
                        record["term"], record["country"], record["register"],
                        added_by=record.get("added_by", "analyst"),
                    )
                elif record["op"] == "link":
                    self.link_terms(
                        record["source"], record["target"], record["kind"],
                        country=record.get("country"),
                    )
        finally:
            self._replaying = False

    # -- mutations -----------------------------------------------------------

    def add_term(
        self, term: str, country: str, register: str, added_by: str = "analyst"
    ) -> VocabEntry:
        term = normalize_term(term).strip()
        if not term:
            raise ValidationError("empty term")
        country = country.upper() if country != PAN_REGIONAL else country
        if register not in REGISTERS:
            raise ValidationError(f"unknown register {register!r}")
        with self._lock.write():
            existing = self._entries.get((term, country))
            if existing is not None:
                if existing.register != register:
                    raise ConflictError(
                        f"{term!r} already registered as {existing.register} in {country}"
                    )
                return existing
            entry = VocabEntry(term, country, register, added_by)
            self._entries[(term, country)] = entry
            self._journal_write(
                {"op": "term", "term": term, "country": country,
                 "register": register, "added_by": added_by}
            )
            return entry

    def link_terms(
        self, source: str, target: str, kind: str, country: str | None = None
    ) -> TermRelation:
        source = normalize_term(source).strip()
        target = normalize_term(target).strip()
        if not source or not target:
            raise ValidationError("empty term in relation")
        if kind not in RELATION_KINDS:
            raise ValidationError(f"unknown relation kind {kind!r}")
        if source == target:
            raise ValidationError("cannot relate a term to itself")
        if kind == "cultural_equivalent" and not country:
            raise ValidationError("cultural_equivalent requires a target country")
        country = country.upper() if country else None
        with self._lock.write():
            key = self._relation_key(source, target, kind, country)
            if key in self._relation_keys:
                return TermRelation(source, target, kind, country)
            if kind == "hypernym" and self._would_cycle(source, target):
                raise CycleError(f"hypernym cycle {source} -> {target}")
            relation = TermRelation(source, target, kind, country)
            self._relations.append(relation)
            self._relation_keys.add(key)
            self._index_relation(relation)
            self._journal_write(
                {"op": "link", "source": source, "target": target,
                 "kind": kind, "country": country}
            )
            return relation

    @staticmethod
    def _relation_key(source: str, target: str, kind: str, country: str | None) -> tuple:
        if kind == "synonym":  # stored once, queried both ways
            return (kind, country) + tuple(sorted((source, target)))
        return (kind, country, source, target)

    def _index_relation(self, relation: TermRelation) -> None:
        source, target = relation.source, relation.target
        if relation.kind == "synonym":
            self._synonyms.setdefault(source, set()).add(target)
            self._synonyms.setdefault(target, set()).add(source)
        elif relation.kind == "hypernym":
            self._hypernyms.setdefault(source, set()).add(target)
            self._hyponyms.setdefault(target, set()).add(source)
        elif relation.kind == "scientific_equivalent":
            # colloquial -> scientific; scoped to the colloquial's country
            country = relation.country or self._entry_country(source)
            self._cultural.add((source, target, country))
        elif relation.kind == "cultural_equivalent":
            # term used in `country` equivalent to source
            self._cultural.add((target, source, relation.country))

    def _entry_country(self, term: str) -> str:
        for (t, country), _ in self._entries.items():
            if t == term and country != PAN_REGIONAL:
                return country
        return PAN_REGIONAL

    def _would_cycle(self, source: str, target: str) -> bool:
        """True if target already reaches source through hypernym edges."""
        stack = [target]
        seen = set()
        while stack:
            term = stack.pop()
            if term == source:
                return True
            if term in seen:
                continue
            seen.add(term)
            stack.extend(self._hypernyms.get(term, ()))
        return False

    # -- lookups --------------------------------------------------------------

    def entries(self, country: str | None = None) -> list[VocabEntry]:
        with self._lock.read():
            values = list(self._entries.values())
        if country:
            country = country.upper()
            values = [e for e in values if e.country == country]
        return sorted(values, key=lambda e: (e.country, e.term))

    def relations(self) -> list[TermRelation]:
        with self._lock.read():
            return list(self._relations)

    def expand_term(self, term: str, kinds: Iterable[str] | None = None) -> dict[str, set[str]]:
        """One-hop closure per requested relation kind; the term itself is
        excluded. Unknown terms yield empty sets."""
        term = normalize_term(term)
        wanted = set(kinds) if kinds else {"synonym", "hypernym"}
        with self._lock.read():
            result = {
                "synonyms": set(self._synonyms.get(term, ())) if "synonym" in wanted else set(),
                "hypernyms": set(self._hypernyms.get(term, ())) if "hypernym" in wanted else set(),
                "hyponyms": set(self._hyponyms.get(term, ())) if {"hypernym", "hyponym"} & wanted else set(),
            }
        for values in result.values():
            values.discard(term)
        return result

    def cultural_equivalents(self, term: str, target_country: str) -> set[str]:
        """Terms used in the target country for the same concept, pivoting
        through the pan-regional scientific term."""
        term = normalize_term(term)
        target_country = target_country.upper()
        with self._lock.read():
            pivots = {term} | {sci for (colloq, sci, _) in self._cultural if colloq == term}
            result: set[str] = set()
            for pivot in pivots:
                result |= {
                    colloq for (colloq, sci, country) in self._cultural
                    if sci == pivot and country == target_country
                }
                if pivot != term:
                    result.add(pivot)
        result.discard(term)
        return result

    def supported_countries(self) -> set[str]:
        with self._lock.read():
            return {c for (_, c) in self._entries} - {PAN_REGIONAL}

    def meteorological_terms(self) -> set[str]:
        """Every term of the vocabulary: entries plus relation endpoints."""
        with self._lock.read():
            terms = {t for (t, _) in self._entries}
            for relation in self._relations:
                terms.add(relation.source)
                terms.add(relation.target)
        return terms

    def damage_terms(self) -> set[str]:
        with self._lock.read():
            return set(self._damage_terms)

    def add_damage_terms(self, terms: Iterable[str]) -> None:
        with self._lock.write():
            self._damage_terms.update(normalize_term(t) for t in terms)

    def contains(self, term: str) -> bool:
        folded = fold(term)
        return any(folded == fold(t) for t in self.meteorological_terms())


# -- seed file loaders ---------------------------------------------------------


def load_thesaurus(path: str | Path, vocab: Vocabulary) -> int:
    """`term<TAB>relation<TAB>term[<TAB>country]` lines."""
    count = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 3:
                raise ValidationError(f"bad thesaurus line: {line!r}")
            source, kind, target = parts[0], parts[1], parts[2]
            country = parts[3] if len(parts) > 3 else None
            vocab.link_terms(source, target, kind, country=country)
            count += 1
    return count


def load_folksonomy(path: str | Path, country: str, vocab: Vocabulary) -> int:
    """`term<TAB>register[<TAB>scientific_term]` lines for one country."""
    count = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            term, register = parts[0], parts[1]
            vocab.add_term(term, country, register, added_by="seed")
            if len(parts) > 2 and parts[2]:
                scientific = parts[2]
                vocab.add_term(scientific, PAN_REGIONAL, "scientific", added_by="seed")
                vocab.link_terms(term, scientific, "scientific_equivalent", country=country.upper())
            count += 1
    return count


def load_stoplist(path: str | Path) -> set[str]:
    stop = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                stop.add(fold(line))
    return stop


# -- term frequency surfaces ----------------------------------------------------


@dataclass
class TermFrequencyMatrix:
    docs: list[str]
    terms: list[str]
    counts: np.ndarray  # shape (len(docs), len(terms)), dtype int64
    doc_lengths: list[int]

    def total(self, term: str) -> int:
        try:
            column = self.terms.index(normalize_term(term))
        except ValueError:
            return 0
        return int(self.counts[:, column].sum())


def build_tf_matrix(
    store: DocumentStore,
    article_filter: ArticleFilter | None = None,
    stop_terms: set[str] | None = None,
) -> TermFrequencyMatrix:
    """Exact occurrence counts of normalized word tokens per article.

    The stoplist (folded comparison) applies to this exploration surface
    only, never to the index. Docs are ordered by publication date then id,
    terms lexicographically.
    """
    flt = article_filter or ArticleFilter()
    articles = store.list_articles(
        country=flt.country, date_range=flt.date_range, newspaper=flt.newspaper
    )
    stop = stop_terms or set()
    per_doc: list[dict[str, int]] = []
    doc_lengths: list[int] = []
    vocabulary: set[str] = set()
    for article in articles:
        counts: dict[str, int] = {}
        tokens = flat_tokens(article.raw_text)
        doc_lengths.append(len(tokens))
        for token in tokens:
            if token.is_punct or fold(token.normalized) in stop:
                continue
            counts[token.normalized] = counts.get(token.normalized, 0) + 1
        vocabulary.update(counts)
        per_doc.append(counts)
    terms = sorted(vocabulary)
    column = {term: i for i, term in enumerate(terms)}
    matrix = np.zeros((len(articles), len(terms)), dtype=np.int64)
    for row, counts in enumerate(per_doc):
        for term, count in counts.items():
            matrix[row, column[term]] = count
    return TermFrequencyMatrix(
        docs=[a.id for a in articles], terms=terms, counts=matrix, doc_lengths=doc_lengths
    )


def top_terms(matrix: TermFrequencyMatrix, k: int) -> list[tuple[str, int]]:
    """Terms by total count descending, ties broken lexicographically."""
    if not matrix.terms or k <= 0:
        return []
    totals = matrix.counts.sum(axis=0)
    ranked = sorted(zip(matrix.terms, totals), key=lambda pair: (-int(pair[1]), pair[0]))
    return [(term, int(total)) for term, total in ranked[:k]]


def heat_grid(matrix: TermFrequencyMatrix) -> np.ndarray:
    """Per-row normalized counts (count / doc token count) for heat-map
    rendering; rendering itself is the UI's job."""
    if matrix.counts.size == 0:
        return matrix.counts.astype(np.float64)
    lengths = np.asarray(matrix.doc_lengths, dtype=np.float64)
    lengths[lengths == 0] = 1.0
    return matrix.counts / lengths[:, None]


def export_tf_csv(matrix: TermFrequencyMatrix, normalized: bool = False) -> str:
    """Delimited grid with a header row of terms; rows keyed by article id."""
    grid = heat_grid(matrix) if normalized else matrix.counts
    lines = ["doc," + ",".join(matrix.terms)]
    for row, doc in enumerate(matrix.docs):
        if normalized:
            values = ",".join(f"{v:.6f}" for v in grid[row])
        else:
            values = ",".join(str(int(v)) for v in grid[row])
        lines.append(f"{doc},{values}")
    return "\n".join(lines) + "\n"
