"""Linguistic preprocessing: the five-step pipeline turning an article into
a part-of-speech content tree and machine-proposed event candidates.

Steps: sentence segmentation, tokenization, POS tagging, entity detection,
and relation detection (realized as article-level bundling of trigger terms
with co-occurring locations, dates and persons). The tagger is lexicon +
suffix-rule based; there is no statistical model, so the same input and
resources always produce the same output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ValidationError
from .geo import Gazetteer
from .textnorm import Token, fold, normalize_term, segment_sentences, tokenize

POS_TAGS = frozenset(
    {"NNP", "NNS", "NN", "MD", "VB", "JJ", "CD", "DT", "IN",
     "GPE", "PERSON", "ORG", "DATE", "OTHER"}
)
ENTITY_KINDS = ("GPE", "PERSON", "ORG", "DATE")

MONTHS = {
    "enero": 1, "febrero": 2, "marzo": 3, "abril": 4, "mayo": 5, "junio": 6,
    "julio": 7, "agosto": 8, "septiembre": 9, "setiembre": 9, "octubre": 10,
    "noviembre": 11, "diciembre": 12,
}

# Bare year numerals only count as dates inside the collections' period.
BARE_YEAR_RANGE = (1500, 1950)

_DIGITS = re.compile(r"^\d+$")


class TagLexicon:
    """term -> tag lookup backed by a one-`term<TAB>tag`-per-line file."""

    def __init__(self, entries: dict[str, str] | None = None):
        self.entries: dict[str, str] = {}
        for term, tag in (entries or {}).items():
            self.set(term, tag)

    def set(self, term: str, tag: str) -> None:
        if tag not in POS_TAGS:
            raise ValidationError(f"unknown tag {tag!r}")
        self.entries[normalize_term(term)] = tag

    def lookup(self, term: str) -> str | None:
        return self.entries.get(normalize_term(term))

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_file(cls, path: str | Path) -> "TagLexicon":
        lexicon = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                term, _, tag = line.partition("\t")
                lexicon.set(term, tag.strip())
        return lexicon


@dataclass(frozen=True)
class NameLists:
    """Person and organization name lists (one name per line each)."""

    persons: frozenset[str] = frozenset()
    orgs: frozenset[str] = frozenset()

    @classmethod
    def from_files(cls, persons_path: str | Path | None, orgs_path: str | Path | None = None) -> "NameLists":
        return cls(
            persons=frozenset(_read_names(persons_path)),
            orgs=frozenset(_read_names(orgs_path)),
        )


def _read_names(path: str | Path | None) -> set[str]:
    if not path:
        return set()
    names = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                names.add(fold(line))
    return names


def pos_tag(tokens: Sequence[Token], lexicon: TagLexicon) -> list[tuple[Token, str]]:
    """Tag every token of one sentence.

    Precedence: punctuation -> OTHER; lexicon hit; all-digit -> CD;
    capitalized non-sentence-initial unknown -> NNP; suffix rules (plurals
    when the stem is a known noun, gerunds, -mente adverbs); default NN.
    """
    tagged: list[tuple[Token, str]] = []
    for token in tokens:
        tagged.append((token, _tag_one(token, lexicon)))
    return tagged


def _tag_one(token: Token, lexicon: TagLexicon) -> str:
    if token.is_punct:
        return "OTHER"
    hit = lexicon.lookup(token.normalized)
    if hit:
        return hit
    if _DIGITS.match(token.normalized):
        return "CD"
    if token.position > 0 and token.surface[:1].isupper():
        return "NNP"
    term = token.normalized
    if term.endswith("mente") and len(term) > 6:
        return "OTHER"
    if term.endswith("es") and lexicon.lookup(term[:-2]) == "NN":
        return "NNS"
    if term.endswith("s") and lexicon.lookup(term[:-1]) == "NN":
        return "NNS"
    if term.endswith(("ando", "iendo", "yendo")):
        return "VB"
    return "NN"


@dataclass(frozen=True)
class Span:
    """Contiguous token range inside one sentence; end is exclusive."""

    sentence: int
    start: int
    end: int

    def overlaps(self, other: "Span") -> bool:
        return self.sentence == other.sentence and self.start < other.end and other.start < self.end

    def as_key(self) -> str:
        return f"{self.sentence}:{self.start}:{self.end}"

    @classmethod
    def from_key(cls, key: str) -> "Span":
        sentence, start, end = (int(p) for p in key.split(":"))
        return cls(sentence, start, end)


@dataclass(frozen=True)
class EntitySpan:
    kind: str
    span: Span
    canonical: str


_KIND_PRIORITY = {"GPE": 0, "PERSON": 1, "ORG": 2, "DATE": 3}


def detect_entities(
    tagged: Sequence[tuple[Token, str]],
    gazetteer: Gazetteer,
    name_lists: NameLists | None = None,
    max_phrase: int = 4,
) -> list[EntitySpan]:
    """Entity spans for one tagged sentence.

    Maximal contiguous NNP runs are matched against the gazetteer (GPE),
    the person list (PERSON) and the organization list (ORG); date phrases
    and period year numerals become DATE spans. Longest match wins and
    overlaps resolve left-to-right longest-first.
    """
    name_lists = name_lists or NameLists()
    if not tagged:
        return []
    sentence = tagged[0][0].sentence_index
    candidates: list[EntitySpan] = []

    for run_start, run_end in _nnp_runs(tagged):
        for start in range(run_start, run_end):
            for end in range(min(run_end, start + max_phrase), start, -1):
                phrase = " ".join(tok.normalized for tok, _ in tagged[start:end])
                span = Span(sentence, start, end)
                if gazetteer.contains_name(phrase):
                    candidates.append(EntitySpan("GPE", span, phrase))
                if fold(phrase) in name_lists.persons:
                    candidates.append(EntitySpan("PERSON", span, phrase))
                if fold(phrase) in name_lists.orgs:
                    candidates.append(EntitySpan("ORG", span, phrase))

    candidates.extend(_date_spans(tagged, sentence))

    candidates.sort(key=lambda e: (e.span.start, -(e.span.end - e.span.start), _KIND_PRIORITY[e.kind]))
    chosen: list[EntitySpan] = []
    for candidate in candidates:
        if not any(candidate.span.overlaps(c.span) for c in chosen):
            chosen.append(candidate)
    return chosen


def _nnp_runs(tagged: Sequence[tuple[Token, str]]) -> list[tuple[int, int]]:
    runs = []
    start = None
    for i, (_, tag) in enumerate(tagged):
        if tag == "NNP":
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(tagged)))
    return runs


def _date_spans(tagged: Sequence[tuple[Token, str]], sentence: int) -> list[EntitySpan]:
    terms = [tok.normalized for tok, _ in tagged]
    spans: list[EntitySpan] = []
    n = len(terms)
    for i in range(n):
        # "12 de enero de 1805"
        if (
            i + 5 <= n
            and _is_day(terms[i])
            and terms[i + 1] == "de"
            and terms[i + 2] in MONTHS
            and terms[i + 3] in ("de", "del")
            and _is_year(terms[i + 4])
        ):
            canonical = f"{int(terms[i + 4]):04d}-{MONTHS[terms[i + 2]]:02d}-{int(terms[i]):02d}"
            spans.append(EntitySpan("DATE", Span(sentence, i, i + 5), canonical))
            continue
        # "enero de 1805"
        if (
            i + 3 <= n
            and terms[i] in MONTHS
            and terms[i + 1] in ("de", "del")
            and _is_year(terms[i + 2])
        ):
            canonical = f"{int(terms[i + 2]):04d}-{MONTHS[terms[i]]:02d}"
            spans.append(EntitySpan("DATE", Span(sentence, i, i + 3), canonical))
            continue
        # bare year numerals only within the collections' period
        if _DIGITS.match(terms[i]) and BARE_YEAR_RANGE[0] <= int(terms[i]) <= BARE_YEAR_RANGE[1]:
            spans.append(EntitySpan("DATE", Span(sentence, i, i + 1), f"{int(terms[i]):04d}"))
    return spans


def _is_day(term: str) -> bool:
    return bool(_DIGITS.match(term)) and 1 <= int(term) <= 31


def _is_year(term: str) -> bool:
    return bool(_DIGITS.match(term)) and 1000 <= int(term) <= 2099


# -- content trees ----------------------------------------------------------


@dataclass(eq=False)
class Leaf:
    """A term of the article; the parent node carries its POS tag."""

    term: str
    parent: "Node | None" = field(default=None, repr=False)


@dataclass(eq=False)
class Node:
    tag: str
    children: list["Node | Leaf"] = field(default_factory=list)
    parent: "Node | None" = field(default=None, repr=False)
    # entity nodes keep the canonical form computed at detection time
    # (gazetteer key for GPE, ISO date for DATE)
    canonical: str | None = None

    def __post_init__(self) -> None:
        if self.tag not in POS_TAGS:
            raise ValidationError(f"unknown tag {self.tag!r}")
        for child in self.children:
            child.parent = self

    def add(self, child: "Node | Leaf") -> None:
        child.parent = self
        self.children.append(child)


@dataclass(eq=False)
class SentenceTree:
    root: Node

    def leaves(self) -> list[Leaf]:
        out: list[Leaf] = []

        def walk(node: Node | Leaf) -> None:
            if isinstance(node, Leaf):
                out.append(node)
                return
            for child in node.children:
                walk(child)

        walk(self.root)
        return out


@dataclass(eq=False)
class ContentTree:
    article_id: str
    sentences: list[SentenceTree]

    def leaf_surfaces(self) -> list[str]:
        return [leaf.term for sent in self.sentences for leaf in sent.leaves()]

    def entity_spans(self) -> list[EntitySpan]:
        """Entity nodes of the tree with their token spans, reconstructed by
        an in-order walk."""
        spans: list[EntitySpan] = []
        for s_index, sentence in enumerate(self.sentences):
            position = 0
            for node in sentence.root.children:
                width = len(node.children) if isinstance(node, Node) else 1
                if isinstance(node, Node) and node.tag in ENTITY_KINDS:
                    surface = " ".join(
                        leaf.term for leaf in node.children if isinstance(leaf, Leaf)
                    )
                    spans.append(
                        EntitySpan(
                            node.tag,
                            Span(s_index, position, position + width),
                            node.canonical or normalize_term(surface),
                        )
                    )
                position += width
        return spans


def build_content_tree(
    article,
    lexicon: TagLexicon,
    gazetteer: Gazetteer,
    name_lists: NameLists | None = None,
) -> ContentTree:
    """Run segment -> tokenize -> tag -> entities and assemble the tree.

    Sentence roots carry the OTHER tag (the tag inventory has no dedicated
    sentence symbol); each non-entity token hangs as a Leaf under a Node for
    its tag, and entity spans group their member leaves under one
    GPE/PERSON/ORG/DATE node. In-order leaves reproduce the token stream.
    """
    raw = article.raw_text if hasattr(article, "raw_text") else str(article)
    article_id = getattr(article, "id", "")
    if not raw.strip():
        raise ValidationError("nothing to parse")
    trees: list[SentenceTree] = []
    for s_index, sentence in enumerate(segment_sentences(raw)):
        tokens = tokenize(sentence, s_index)
        tagged = pos_tag(tokens, lexicon)
        entities = {e.span.start: e for e in detect_entities(tagged, gazetteer, name_lists)}
        root = Node("OTHER")
        position = 0
        while position < len(tagged):
            entity = entities.get(position)
            if entity:
                group = Node(entity.kind, canonical=entity.canonical)
                for token, _ in tagged[entity.span.start:entity.span.end]:
                    group.add(Leaf(token.surface))
                root.add(group)
                position = entity.span.end
            else:
                token, tag = tagged[position]
                node = Node(tag)
                node.add(Leaf(token.surface))
                root.add(node)
                position += 1
        trees.append(SentenceTree(root))
    return ContentTree(article_id=article_id, sentences=trees)


# -- event candidates --------------------------------------------------------


@dataclass
class EventCandidate:
    """Machine-proposed annotation bundle awaiting human validation."""

    article_id: str
    trigger_terms: list[tuple[str, Span]]
    locations: list[EntitySpan]
    dates: list[EntitySpan]
    persons: list[EntitySpan]
    damages_hints: list[tuple[str, Span]]
    status: str = "pending"

    def span_exists(self, span: Span) -> bool:
        if any(span == s for _, s in self.trigger_terms):
            return True
        if any(span == e.span for e in self.locations + self.dates + self.persons):
            return True
        return any(span == s for _, s in self.damages_hints)


def _matches_vocab(term: str, folded_vocab: set[str]) -> bool:
    """Vocabulary membership for trigger detection: accent-folded, with the
    Spanish plural suffixes stripped (the vocabulary stores singulars)."""
    folded = fold(term)
    if folded in folded_vocab:
        return True
    if folded.endswith("es") and folded[:-2] in folded_vocab:
        return True
    return folded.endswith("s") and folded[:-1] in folded_vocab


def extract_event_candidates(
    tree: ContentTree,
    meteo_terms: Iterable[str],
    damage_terms: Iterable[str] = (),
) -> list[EventCandidate]:
    """At most one pending candidate per article: produced whenever any leaf
    matches the meteorological vocabulary (accent-insensitively, singular or
    plural). Metaphors are deliberately not filtered here; rejecting them is
    the analyst's job.
    """
    meteo = {fold(t) for t in meteo_terms}
    damages = {fold(t) for t in damage_terms}
    triggers: list[tuple[str, Span]] = []
    hints: list[tuple[str, Span]] = []
    for s_index, sentence in enumerate(tree.sentences):
        position = 0
        for node in sentence.root.children:
            width = len(node.children) if isinstance(node, Node) else 1
            for offset, child in enumerate(node.children if isinstance(node, Node) else []):
                if not isinstance(child, Leaf):
                    continue
                term = normalize_term(child.term)
                span = Span(s_index, position + offset, position + offset + 1)
                if _matches_vocab(term, meteo):
                    triggers.append((term, span))
                if _matches_vocab(term, damages):
                    hints.append((term, span))
            position += width
    if not triggers:
        return []
    entities = tree.entity_spans()
    return [
        EventCandidate(
            article_id=tree.article_id,
            trigger_terms=triggers,
            locations=[e for e in entities if e.kind == "GPE"],
            dates=[e for e in entities if e.kind == "DATE"],
            persons=[e for e in entities if e.kind == "PERSON"],
            damages_hints=hints,
        )
    ]
