"""Article store and inverted index.

Articles arrive as line-delimited JSON records (one per line); each library
exports its own field names, which a MetadataMapping renames onto the
canonical schema. Accepted articles persist one-file-per-article under the
store directory plus a compact index file; rejected records are reported with
their line number and reason, never silently dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .dates import PartialDate
from .errors import NotFoundError, ValidationError
from .locks import ReadWriteLock
from .textnorm import flat_tokens, fold

SUPPORTED_COUNTRIES = {"MX", "CO", "EC", "UY"}

CANONICAL_FIELDS = (
    "id",
    "date",
    "text",
    "ocr_link",
    "source_library",
    "newspaper.name",
    "newspaper.country",
    "newspaper.issue_label",
    "newspaper.pages",
    "newspaper.window_start",
    "newspaper.window_end",
)


@dataclass(frozen=True)
class NewspaperMeta:
    name: str
    country: str
    issue_label: str = ""
    pages: int = 1
    window_start: PartialDate | None = None
    window_end: PartialDate | None = None


@dataclass(frozen=True)
class Article:
    id: str
    newspaper: NewspaperMeta
    publication_date: PartialDate
    raw_text: str
    ocr_link: str | None = None
    source_library: str = ""


@dataclass(frozen=True)
class IngestReport:
    accepted: int
    rejected: list[tuple[int, str]]


class MetadataMapping:
    """Renames a library's export fields onto the canonical record schema.

    Keys are source field paths (dots descend into nested objects), values
    are canonical field paths. Unmapped fields that already use canonical
    names pass through.
    """

    def __init__(self, renames: dict[str, str] | None = None):
        renames = dict(renames or {})
        for target in renames.values():
            if target not in CANONICAL_FIELDS:
                raise ValidationError(f"unknown canonical field {target!r}")
        self.renames = renames

    @classmethod
    def from_file(cls, path: str | Path) -> "MetadataMapping":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def apply(self, record: dict) -> dict:
        flat = _flatten(record)
        out: dict[str, object] = {}
        for key, value in flat.items():
            out[self.renames.get(key, key)] = value
        return _unflatten(out)


def _flatten(record: dict, prefix: str = "") -> dict[str, object]:
    flat: dict[str, object] = {}
    for key, value in record.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{path}."))
        else:
            flat[path] = value
    return flat


def _unflatten(flat: dict[str, object]) -> dict:
    out: dict = {}
    for path, value in flat.items():
        parts = path.split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def article_from_record(record: dict, countries: set[str]) -> Article:
    """Validate one canonical record; raises ValidationError with the
    rejection reason."""
    art_id = record.get("id")
    if not isinstance(art_id, str) or not art_id.strip():
        raise ValidationError("missing id")
    text = record.get("text")
    if not isinstance(text, str) or not text.strip():
        raise ValidationError("empty raw_text")
    if "date" not in record:
        raise ValidationError("missing date")
    date = PartialDate.parse(str(record["date"]))

    news = record.get("newspaper") or {}
    if not isinstance(news, dict):
        raise ValidationError("newspaper must be an object")
    country = str(news.get("country", "")).upper()
    if country not in countries:
        raise ValidationError(f"unsupported country {country!r}")
    pages = news.get("pages", 1)
    if not isinstance(pages, int) or pages <= 0:
        raise ValidationError(f"invalid pages {pages!r}")
    window_start = PartialDate.parse(str(news["window_start"])) if news.get("window_start") else None
    window_end = PartialDate.parse(str(news["window_end"])) if news.get("window_end") else None
    if window_start and window_end and window_start.bounds()[0] > window_end.bounds()[1]:
        raise ValidationError("circulation window start after end")
    if window_start and window_end:
        lo, hi = window_start.bounds()[0], window_end.bounds()[1]
        d0, d1 = date.bounds()
        if d0 < lo or d1 > hi:
            raise ValidationError("date outside circulation window")

    meta = NewspaperMeta(
        name=str(news.get("name", "")),
        country=country,
        issue_label=str(news.get("issue_label", "")),
        pages=pages,
        window_start=window_start,
        window_end=window_end,
    )
    return Article(
        id=art_id.strip(),
        newspaper=meta,
        publication_date=date,
        raw_text=text,
        ocr_link=record.get("ocr_link") or None,
        source_library=str(record.get("source_library", "")),
    )


def article_to_record(article: Article) -> dict:
    news: dict[str, object] = {
        "name": article.newspaper.name,
        "country": article.newspaper.country,
        "issue_label": article.newspaper.issue_label,
        "pages": article.newspaper.pages,
    }
    if article.newspaper.window_start:
        news["window_start"] = str(article.newspaper.window_start)
    if article.newspaper.window_end:
        news["window_end"] = str(article.newspaper.window_end)
    record: dict[str, object] = {
        "id": article.id,
        "newspaper": news,
        "date": str(article.publication_date),
        "text": article.raw_text,
    }
    if article.ocr_link:
        record["ocr_link"] = article.ocr_link
    if article.source_library:
        record["source_library"] = article.source_library
    return record


class InvertedIndex:
    """Positional index over normalized tokens.

    Positions run over the whole document token stream (punctuation tokens
    occupy positions but are not indexed as terms). Each word token is
    indexed under its normalized form and, when different, under its
    accent-stripped shadow key; lookups fold the query term so matching is
    accent- and case-insensitive both ways.
    """

    def __init__(self) -> None:
        self.postings: dict[str, dict[str, list[int]]] = {}
        self.doc_lengths: dict[str, int] = {}

    def add_document(self, article: Article) -> None:
        tokens = flat_tokens(article.raw_text)
        self.doc_lengths[article.id] = len(tokens)
        for position, token in enumerate(tokens):
            if token.is_punct:
                continue
            keys = {token.normalized, fold(token.normalized)}
            for key in keys:
                positions = self.postings.setdefault(key, {}).setdefault(article.id, [])
                if not positions or positions[-1] != position:
                    positions.append(position)

    def term_postings(self, term: str) -> dict[str, list[int]]:
        """Postings for a query term, under fold semantics."""
        return self.postings.get(fold(term), {})

    def term_docs(self, term: str) -> set[str]:
        return set(self.term_postings(term))

    def phrase_docs(self, terms: Iterable[str]) -> set[str]:
        """Documents containing the terms as contiguous tokens, in order."""
        terms = list(terms)
        if not terms:
            return set()
        if len(terms) == 1:
            return self.term_docs(terms[0])
        per_term = [self.term_postings(t) for t in terms]
        candidates = set(per_term[0])
        for postings in per_term[1:]:
            candidates &= set(postings)
        matches: set[str] = set()
        for doc in candidates:
            starts = set(per_term[0][doc])
            for offset, postings in enumerate(per_term[1:], start=1):
                starts &= {p - offset for p in postings[doc]}
                if not starts:
                    break
            if starts:
                matches.add(doc)
        return matches

    def to_json(self) -> dict:
        return {"postings": self.postings, "doc_lengths": self.doc_lengths}

    @classmethod
    def from_json(cls, data: dict) -> "InvertedIndex":
        index = cls()
        index.postings = {
            term: {doc: list(map(int, positions)) for doc, positions in docs.items()}
            for term, docs in data.get("postings", {}).items()
        }
        index.doc_lengths = {doc: int(n) for doc, n in data.get("doc_lengths", {}).items()}
        return index


def build_index(store: "DocumentStore") -> InvertedIndex:
    index = InvertedIndex()
    for article in sorted(store, key=lambda a: a.id):
        index.add_document(article)
    return index


@dataclass(frozen=True)
class ArticleFilter:
    country: str | None = None
    date_range: tuple[int, int] | None = None
    newspaper: str | None = None

    def matches(self, article: Article) -> bool:
        if self.country and article.newspaper.country != self.country.upper():
            return False
        if self.date_range:
            start, end = self.date_range
            d0, d1 = article.publication_date.bounds()
            if d1.year < start or d0.year > end:
                return False
        if self.newspaper and fold(article.newspaper.name) != fold(self.newspaper):
            return False
        return True


class DocumentStore:
    """Append-friendly article store: one JSON file per article plus a
    compact index file, all under one collection directory. With no root the
    store lives in memory (tests, demos)."""

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root else None
        self._articles: dict[str, Article] = {}
        self._index: InvertedIndex | None = None
        self._lock = ReadWriteLock()
        self._countries = set(SUPPORTED_COUNTRIES)
        if self.root:
            self._load()

    # -- persistence -------------------------------------------------------

    def _articles_dir(self) -> Path:
        return self.root / "articles"

    def _index_path(self) -> Path:
        return self.root / "index.json"

    def _countries_path(self) -> Path:
        return self.root / "countries.json"

    def _load(self) -> None:
        # registered country extensions must survive restarts, or persisted
        # articles from those countries would fail validation on reload
        if self._countries_path().is_file():
            extra = json.loads(self._countries_path().read_text(encoding="utf-8"))
            self._countries.update(str(c).upper() for c in extra)
        directory = self._articles_dir()
        if directory.is_dir():
            for path in sorted(directory.glob("*.json")):
                record = json.loads(path.read_text(encoding="utf-8"))
                article = article_from_record(record, self._countries)
                self._articles[article.id] = article
        if self._index_path().is_file():
            self._index = InvertedIndex.from_json(
                json.loads(self._index_path().read_text(encoding="utf-8"))
            )

    def _persist_article(self, article: Article) -> None:
        if not self.root:
            return
        directory = self._articles_dir()
        directory.mkdir(parents=True, exist_ok=True)
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in article.id)
        path = directory / f"{safe}.json"
        path.write_text(
            json.dumps(article_to_record(article), ensure_ascii=False, sort_keys=True),
            encoding="utf-8",
        )

    def _persist_index(self) -> None:
        if not self.root or self._index is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        self._index_path().write_text(
            json.dumps(self._index.to_json(), ensure_ascii=False), encoding="utf-8"
        )

    # -- registry ----------------------------------------------------------

    def register_country(self, code: str) -> None:
        """Extend the supported-country set (beyond MX, CO, EC, UY)."""
        if not (isinstance(code, str) and len(code) == 2 and code.isalpha()):
            raise ValidationError(f"invalid country code {code!r}")
        self._countries.add(code.upper())
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)
            extensions = sorted(self._countries - SUPPORTED_COUNTRIES)
            self._countries_path().write_text(json.dumps(extensions), encoding="utf-8")

    @property
    def countries(self) -> set[str]:
        return set(self._countries)

    # -- ingest ------------------------------------------------------------

    def ingest(
        self, source: Iterable[str], mapping: MetadataMapping | None = None
    ) -> IngestReport:
        """Ingest line-delimited records. Re-ingesting an identical record is
        an accepted no-op (replace semantics); the same id with different
        content is rejected as a conflict. Blank lines are skipped."""
        mapping = mapping or MetadataMapping()
        accepted: dict[str, Article] = {}
        rejected: list[tuple[int, str]] = []
        with self._lock.write():
            for line_no, line in enumerate(source, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                    if not isinstance(raw, dict):
                        raise ValidationError("record must be an object")
                    article = article_from_record(mapping.apply(raw), self._countries)
                except ValidationError as exc:
                    rejected.append((line_no, str(exc)))
                    continue
                except json.JSONDecodeError as exc:
                    rejected.append((line_no, f"malformed record: {exc.msg}"))
                    continue
                existing = accepted.get(article.id) or self._articles.get(article.id)
                if existing is not None and existing != article:
                    rejected.append((line_no, "conflict"))
                    continue
                accepted[article.id] = article
            for article in accepted.values():
                self._articles[article.id] = article
                self._persist_article(article)
            if accepted:
                self._index = build_index(self)
                self._persist_index()
        return IngestReport(accepted=len(accepted), rejected=rejected)

    def rebuild_index(self) -> InvertedIndex:
        with self._lock.write():
            self._index = build_index(self)
            self._persist_index()
            return self._index

    @property
    def index(self) -> InvertedIndex:
        with self._lock.read():
            if self._index is not None:
                return self._index
        return self.rebuild_index()

    # -- reads -------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._articles)

    def __iter__(self) -> Iterator[Article]:
        return iter(list(self._articles.values()))

    def get(self, article_id: str) -> Article:
        with self._lock.read():
            article = self._articles.get(article_id)
        if article is None:
            raise NotFoundError(f"unknown article {article_id!r}")
        return article

    def list_articles(
        self,
        country: str | None = None,
        date_range: tuple[int, int] | None = None,
        newspaper: str | None = None,
    ) -> list[Article]:
        """Articles satisfying every provided filter field, ordered by
        publication date then id."""
        flt = ArticleFilter(country=country, date_range=date_range, newspaper=newspaper)
        with self._lock.read():
            matched = [a for a in self._articles.values() if flt.matches(a)]
        return sorted(matched, key=lambda a: (a.publication_date.sort_key(), a.id))
