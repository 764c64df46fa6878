"""Query expression trees: parsing, rewriting, evaluation.

Queries are conjunctive/disjunctive combinations of terms and quoted phrases.
Rewriting morphs a query into a set of alternatives the analyst chooses
among: thesaurus extension (synonyms and more general terms), cultural
localization (per-country colloquial equivalents), and domain-rule expansion
(physical-attribute constraints, geographic reach). Evaluation is boolean
over the inverted index; constraint leaves evaluate against the curated
event history.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dataclass_field

from .corpus import DocumentStore, InvertedIndex
from .errors import (
    NotFoundError,
    ParseError,
    QueryError,
    UnsupportedCountryError,
    ValidationError,
)
from .geo import Gazetteer, distance_km
from .rules import ATTRIBUTES, DEFAULT_UNITS, DomainRule
from .textnorm import normalize_term
from .vocab import Vocabulary

# -- expression tree ----------------------------------------------------------


@dataclass(frozen=True)
class Term:
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValidationError("empty term")

    @property
    def phrase(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class And:
    children: tuple["QueryExpr", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValidationError("And needs at least two children")


@dataclass(frozen=True)
class Or:
    children: tuple["QueryExpr", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValidationError("Or needs at least two children")


@dataclass(frozen=True)
class Constraint:
    """Attribute constraint over curated events linked to an article.

    `origin` carries the (lat, lon) context point for reach constraints;
    other attributes leave it unset.
    """

    attribute: str
    comparator: str
    value: float | str
    unit: str | None = None
    origin: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.attribute not in ATTRIBUTES:
            raise ValidationError(f"unknown constraint attribute {self.attribute!r}")
        if self.comparator not in _CMP:
            raise ValidationError(f"unknown comparator {self.comparator!r}")
        if self.unit is None:
            object.__setattr__(self, "unit", DEFAULT_UNITS.get(self.attribute))


QueryExpr = Term | And | Or | Constraint


def make_and(children: list["QueryExpr"]) -> "QueryExpr":
    flat: list[QueryExpr] = []
    for child in children:
        if isinstance(child, And):
            flat.extend(child.children)
        else:
            flat.append(child)
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def make_or(children: list["QueryExpr"]) -> "QueryExpr":
    flat: list[QueryExpr] = []
    for child in children:
        if isinstance(child, Or):
            flat.extend(child.children)
        else:
            flat.append(child)
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def terms_of(expr: QueryExpr) -> list[Term]:
    if isinstance(expr, Term):
        return [expr]
    if isinstance(expr, (And, Or)):
        return [t for child in expr.children for t in terms_of(child)]
    return []


def map_terms(expr: QueryExpr, fn) -> QueryExpr:
    """Rebuild the tree applying fn to every Term leaf."""
    if isinstance(expr, Term):
        return fn(expr)
    if isinstance(expr, And):
        return make_and([map_terms(c, fn) for c in expr.children])
    if isinstance(expr, Or):
        return make_or([map_terms(c, fn) for c in expr.children])
    return expr


# -- parsing --------------------------------------------------------------------

_AND_WORDS = {"AND", "Y"}
_OR_WORDS = {"OR", "O"}
_CMP = ("<=", ">=", "<", ">", "=")

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<quoted>"[^"]*")
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<comma>,)
      | (?P<cmp><=|>=|<|>|=)
      | (?P<word>[^\s()",<>=]+)
    )""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    offset: int


def _lex(text: str) -> list[_Tok]:
    tokens: list[_Tok] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match or match.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        for kind in ("quoted", "lparen", "rparen", "comma", "cmp", "word"):
            value = match.group(kind)
            if value is not None:
                tokens.append(_Tok(kind, value, match.start(kind)))
                break
        pos = match.end()
    return tokens


def _check_balance(tokens: list[_Tok], text_length: int) -> None:
    stack: list[_Tok] = []
    for token in tokens:
        if token.kind == "lparen":
            stack.append(token)
        elif token.kind == "rparen":
            if not stack:
                raise ParseError("unbalanced closing parenthesis", token.offset)
            stack.pop()
    if stack:
        raise ParseError("unbalanced opening parenthesis", stack[0].offset)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _lex(text)
        _check_balance(self.tokens, len(text))
        self.pos = 0

    def peek(self) -> _Tok | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Tok:
        token = self.peek()
        if token is None:
            raise ParseError("unexpected end of query", len(self.text))
        self.pos += 1
        return token

    def parse(self) -> QueryExpr:
        if not self.tokens:
            raise ParseError("empty query", 0)
        expr = self.or_expr()
        trailing = self.peek()
        if trailing is not None:
            raise ParseError(f"unexpected {trailing.text!r}", trailing.offset)
        return expr

    def or_expr(self) -> QueryExpr:
        children = [self.and_expr()]
        while True:
            token = self.peek()
            if token and token.kind == "word" and token.text.upper() in _OR_WORDS:
                self.next()
                children.append(self.and_expr())
            else:
                break
        return make_or(children)

    def and_expr(self) -> QueryExpr:
        children = [self.unit()]
        while True:
            token = self.peek()
            if token is None or token.kind == "rparen":
                break
            if token.kind == "word" and token.text.upper() in _OR_WORDS:
                break
            if token.kind == "word" and token.text.upper() in _AND_WORDS:
                self.next()
                children.append(self.unit())
                continue
            # adjacency without an operator is conjunction
            children.append(self.unit())
        return make_and(children)

    def unit(self) -> QueryExpr:
        token = self.peek()
        if token is None:
            raise ParseError("dangling operator", len(self.text))
        if token.kind == "lparen":
            self.next()
            expr = self.or_expr()
            closing = self.peek()
            if closing is None or closing.kind != "rparen":
                raise ParseError("unbalanced opening parenthesis", token.offset)
            self.next()
            return expr
        if token.kind == "quoted":
            self.next()
            words = token.text[1:-1].split()
            if not words:
                raise ParseError("empty phrase", token.offset)
            return Term(tuple(normalize_term(w) for w in words))
        if token.kind == "word":
            upper = token.text.upper()
            if upper in _AND_WORDS | _OR_WORDS:
                raise ParseError("dangling operator", token.offset)
            if token.text.lower() in ATTRIBUTES and self._peek_cmp():
                return self.constraint()
            self.next()
            return Term((normalize_term(token.text),))
        raise ParseError(f"unexpected {token.text!r}", token.offset)

    def _peek_cmp(self) -> bool:
        nxt = self.pos + 1
        return nxt < len(self.tokens) and self.tokens[nxt].kind == "cmp"

    def constraint(self) -> Constraint:
        attr_tok = self.next()
        attribute = attr_tok.text.lower()
        cmp_tok = self.next()
        value_tok = self.next()
        if value_tok.kind != "word":
            raise ParseError("constraint value expected", value_tok.offset)
        value: float | str
        try:
            value = float(value_tok.text)
        except ValueError:
            value = normalize_term(value_tok.text)
        origin = None
        token = self.peek()
        if token and token.kind == "word" and token.text.upper() == "OF":
            self.next()
            origin = self._origin_point()
        return Constraint(attribute, cmp_tok.text, value, origin=origin)

    def _origin_point(self) -> tuple[float, float]:
        lp = self.next()
        if lp.kind != "lparen":
            raise ParseError("expected ( after OF", lp.offset)
        lat = self._number()
        comma = self.next()
        if comma.kind != "comma":
            raise ParseError("expected , in origin point", comma.offset)
        lon = self._number()
        rp = self.next()
        if rp.kind != "rparen":
            raise ParseError("expected ) after origin point", rp.offset)
        return (lat, lon)

    def _number(self) -> float:
        token = self.next()
        try:
            return float(token.text)
        except ValueError:
            raise ParseError(f"expected number, got {token.text!r}", token.offset)


def parse_query(text: str) -> QueryExpr:
    """Parse query text into a canonical expression tree.

    Grammar: bare words and quoted phrases are terms; AND/OR (and Spanish
    Y/O) are case-insensitive; AND binds tighter than OR; adjacency without
    an operator means AND; parentheses group; `attr CMP value [OF (lat,lon)]`
    is an attribute constraint. Same-operator nesting is flattened.
    """
    if not text or not text.strip():
        raise ParseError("empty query", 0)
    return _Parser(text).parse()


_NEEDS_QUOTES = {w.lower() for w in _AND_WORDS | _OR_WORDS} | {"of"} | set(ATTRIBUTES)


def render_query(expr: QueryExpr) -> str:
    """Canonical rendering: uppercase AND/OR, explicit parentheses.
    Re-parsing the rendering yields an identical tree."""
    if isinstance(expr, Term):
        if len(expr.tokens) == 1 and expr.tokens[0] not in _NEEDS_QUOTES:
            return expr.tokens[0]
        return '"' + " ".join(expr.tokens) + '"'
    if isinstance(expr, Constraint):
        value = _render_value(expr.value)
        rendered = f"{expr.attribute} {expr.comparator} {value}"
        if expr.origin is not None:
            rendered += f" OF ({_render_value(expr.origin[0])}, {_render_value(expr.origin[1])})"
        return rendered
    op = " AND " if isinstance(expr, And) else " OR "
    return "(" + op.join(render_query(c) for c in expr.children) + ")"


def _render_value(value: float | str) -> str:
    if isinstance(value, str):
        return value
    if value == int(value):
        return str(int(value))
    return repr(value)


# -- rewriting -------------------------------------------------------------------


def extend_with_thesaurus(
    expr: QueryExpr, vocab: Vocabulary, conjunctive_hypernyms: bool = False, depth: int = 1
) -> QueryExpr:
    """Extend every term with its thesaurus relations.

    Default mode attaches synonyms and more general terms disjunctively, so
    the extended query can only widen the result set. The conjunctive mode
    instead conjoins the general terms with the synonym disjunction, which
    narrows results; it is kept behind this flag.
    """

    def extend(term: Term) -> QueryExpr:
        synonyms: set[str] = set()
        hypernyms: set[str] = set()
        frontier = {term.phrase}
        for _ in range(max(1, depth)):
            next_frontier: set[str] = set()
            for phrase in frontier:
                expansion = vocab.expand_term(phrase)
                next_frontier |= expansion["synonyms"] - synonyms
                synonyms |= expansion["synonyms"]
                hypernyms |= expansion["hypernyms"]
            frontier = next_frontier
        synonyms.discard(term.phrase)
        hypernyms.discard(term.phrase)
        if not synonyms and not hypernyms:
            return term
        syn_terms = [Term(tuple(s.split())) for s in sorted(synonyms)]
        hyper_terms = [Term(tuple(h.split())) for h in sorted(hypernyms)]
        if conjunctive_hypernyms:
            base: QueryExpr = make_or([term, *syn_terms]) if syn_terms else term
            if hyper_terms:
                general = make_or(hyper_terms) if len(hyper_terms) > 1 else hyper_terms[0]
                return make_and([base, general])
            return base
        return make_or([term, *syn_terms, *hyper_terms])

    return map_terms(expr, extend)


def localize_query(expr: QueryExpr, country: str, vocab: Vocabulary) -> QueryExpr:
    """Substitute-as-disjunction with the target country's colloquial
    equivalents, so recall never drops."""
    supported = vocab.supported_countries()
    if country.upper() not in supported:
        raise UnsupportedCountryError(
            f"unknown country {country!r}; supported: {', '.join(sorted(supported))}"
        )

    def localize(term: Term) -> QueryExpr:
        equivalents = vocab.cultural_equivalents(term.phrase, country)
        if not equivalents:
            return term
        return make_or([term, *(Term(tuple(e.split())) for e in sorted(equivalents))])

    return map_terms(expr, localize)


@dataclass(frozen=True)
class GeoQueryContext:
    place: str
    radius_km: float | None = None

    @classmethod
    def parse(cls, text: str) -> "GeoQueryContext":
        """Parse the CLI form "<place>,<radius_km>"."""
        place, _, radius = text.rpartition(",")
        if place and radius.strip():
            try:
                return cls(place.strip(), float(radius))
            except ValueError:
                pass
        return cls(text.strip(), None)


def rule_expand(
    expr: QueryExpr,
    rules: list[DomainRule],
    geo_context: GeoQueryContext | None = None,
    gazetteer: Gazetteer | None = None,
) -> list[QueryExpr]:
    """Domain-rule variants of a query; the original always comes first and
    duplicates are dropped.

    Matching a rule trigger yields one variant per implication: attribute
    constraints attach disjunctively (the "heavy storm OR wind speed > N"
    pattern), and reach rules conjoin a geographic constraint around the
    context point when one is given.
    """
    variants: list[QueryExpr] = [expr]
    seen: set[QueryExpr] = {expr}
    terms = terms_of(expr)
    # a trigger matches one term's phrase or the query's combined term tokens
    # (so `tormenta fuerte`, `"tormenta fuerte"` and `tormenta AND fuerte`
    # all fire the same rules)
    all_tokens = [token for t in terms for token in t.tokens]
    origin = _resolve_origin(geo_context, gazetteer) if geo_context else None
    for rule in rules:
        if not (
            any(rule.matches_phrase(list(t.tokens)) for t in terms)
            or (all_tokens and rule.matches_phrase(all_tokens))
        ):
            continue
        for implication in rule.implications:
            variant = _implication_variant(expr, implication, geo_context, origin)
            if variant is not None and variant not in seen:
                seen.add(variant)
                variants.append(variant)
    return variants


def _resolve_origin(
    geo_context: GeoQueryContext, gazetteer: Gazetteer | None
) -> tuple[float, float] | None:
    if gazetteer is None:
        return None
    candidates = gazetteer.resolve(geo_context.place)
    if not candidates:
        return None
    top = candidates[0]
    return (top.lat, top.lon)


def _implication_variant(
    expr: QueryExpr,
    implication,
    geo_context: GeoQueryContext | None,
    origin: tuple[float, float] | None,
) -> QueryExpr | None:
    if implication.attribute == "reach_km":
        if origin is None:
            return None
        radius = geo_context.radius_km if geo_context and geo_context.radius_km else float(implication.value)
        return make_and([expr, Constraint("reach_km", "<=", radius, origin=origin)])
    if implication.comparator == "between":
        low, high = implication.value
        band = make_and(
            [
                Constraint(implication.attribute, ">=", low),
                Constraint(implication.attribute, "<=", high),
            ]
        )
        return make_or([expr, band])
    return make_or(
        [expr, Constraint(implication.attribute, implication.comparator, implication.value)]
    )


@dataclass
class RewritePlan:
    """The alternatives offered for one query: the extended tree, one
    localized tree per country, and the domain-rule variants."""

    original: QueryExpr
    extended: QueryExpr
    localized: dict[str, QueryExpr]
    rule_variants: list[QueryExpr]

    def to_json(self) -> dict:
        return {
            "original": render_query(self.original),
            "extended": render_query(self.extended),
            "localized": {c: render_query(q) for c, q in sorted(self.localized.items())},
            "rule_variants": [render_query(q) for q in self.rule_variants],
        }


def build_rewrite_plan(
    expr: QueryExpr,
    vocab: Vocabulary,
    rules: list[DomainRule] | None = None,
    countries: list[str] | None = None,
    geo_context: GeoQueryContext | None = None,
    gazetteer: Gazetteer | None = None,
    conjunctive_hypernyms: bool = False,
) -> RewritePlan:
    extended = extend_with_thesaurus(expr, vocab, conjunctive_hypernyms=conjunctive_hypernyms)
    if countries is None:
        countries = sorted(vocab.supported_countries())
    localized = {c.upper(): localize_query(expr, c, vocab) for c in countries}
    variants = rule_expand(expr, rules or [], geo_context, gazetteer)
    return RewritePlan(expr, extended, localized, variants)


# -- evaluation --------------------------------------------------------------------


def evaluate(
    expr: QueryExpr,
    index: InvertedIndex,
    event_history=None,
    store: DocumentStore | None = None,
) -> list[tuple[str, int]]:
    """Boolean evaluation against the index; constraint leaves evaluate
    against the curated event history (articles without a linked satisfying
    event fail the constraint).

    Returns (article id, score) ranked by score (count of distinct matched
    term leaves) descending, then publication date ascending, then id.
    """
    term_matches: dict[Term, set[str]] = {}
    result = _eval_set(expr, index, event_history, term_matches)
    scores: dict[str, int] = {}
    for doc in result:
        scores[doc] = sum(1 for docs in term_matches.values() if doc in docs)

    def rank_key(doc: str):
        date_key = ""
        if store is not None:
            try:
                date_key = store.get(doc).publication_date.sort_key().isoformat()
            except NotFoundError:
                date_key = ""
        return (-scores[doc], date_key, doc)

    return [(doc, scores[doc]) for doc in sorted(result, key=rank_key)]


def evaluate_set(expr: QueryExpr, index: InvertedIndex, event_history=None) -> set[str]:
    """Just the matching article-id set, without ranking."""
    return _eval_set(expr, index, event_history, {})


def _eval_set(
    expr: QueryExpr,
    index: InvertedIndex,
    event_history,
    term_matches: dict,
) -> set[str]:
    if isinstance(expr, Term):
        docs = index.phrase_docs(expr.tokens)
        term_matches.setdefault(expr, set()).update(docs)
        return docs
    if isinstance(expr, And):
        sets = [_eval_set(c, index, event_history, term_matches) for c in expr.children]
        result = sets[0]
        for s in sets[1:]:
            result = result & s
        return result
    if isinstance(expr, Or):
        result: set[str] = set()
        for child in expr.children:
            result |= _eval_set(child, index, event_history, term_matches)
        return result
    return _eval_constraint(expr, index, event_history)


def _eval_constraint(constraint: Constraint, index: InvertedIndex, event_history) -> set[str]:
    if event_history is None:
        raise QueryError("constraints need event history")
    matched: set[str] = set()
    for event in event_history.all_events():
        if _event_satisfies(event, constraint):
            matched.update(event.articles)
    return matched & set(index.doc_lengths)


def _event_satisfies(event, constraint: Constraint) -> bool:
    if constraint.attribute == "reach_km":
        if constraint.origin is None:
            return False
        radius = float(constraint.value)
        return any(
            distance_km(constraint.origin, (p.lat, p.lon)) <= radius for p in event.scope
        )
    stored = event.attributes.get(constraint.attribute)
    if stored is None:
        return False
    if constraint.attribute == "river_state":
        return isinstance(constraint.value, str) and normalize_term(str(stored.value)) == constraint.value
    return _interval_satisfies(stored, constraint.comparator, float(constraint.value))


def _interval_satisfies(stored, comparator: str, bound: float) -> bool:
    """Interval semantics: the stored attribute denotes a set of possible
    values; the constraint passes if any possible value satisfies it."""
    low, high = _stored_interval(stored)
    if comparator == ">":
        return high > bound
    if comparator == ">=":
        return high >= bound
    if comparator == "<":
        return low < bound
    if comparator == "<=":
        return low <= bound
    return low <= bound <= high


_INF = float("inf")


def _stored_interval(stored) -> tuple[float, float]:
    value = stored.value
    comparator = getattr(stored, "comparator", "=")
    if isinstance(value, tuple):
        return float(value[0]), float(value[1])
    value = float(value)
    if comparator == ">":
        return value, _INF
    if comparator == ">=":
        return value, _INF
    if comparator == "<":
        return -_INF, value
    if comparator == "<=":
        return -_INF, value
    return value, value
