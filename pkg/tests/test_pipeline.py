from __future__ import annotations

import pytest

from hemeroclim.errors import ValidationError
from hemeroclim.geo import Gazetteer, GazetteerEntry
from hemeroclim.pipeline import (
    EventCandidate,
    NameLists,
    Node,
    Span,
    TagLexicon,
    build_content_tree,
    detect_entities,
    extract_event_candidates,
    pos_tag,
)
from hemeroclim.textnorm import flat_tokens, tokenize


@pytest.fixture()
def mini_lexicon() -> TagLexicon:
    return TagLexicon({"tormenta": "NN", "en": "IN", "tormentas": "NNS", "la": "DT"})


@pytest.fixture()
def mini_gazetteer() -> Gazetteer:
    return Gazetteer(
        [
            GazetteerEntry("montevideo", "Montevideo", -34.90, -56.19, "UY", "city"),
            GazetteerEntry("santa clara", "Santa Clara", 22.4069, -79.9649, "CU", "city"),
        ]
    )


class FakeArticle:
    def __init__(self, art_id: str, text: str):
        self.id = art_id
        self.raw_text = text


# -- tagging -------------------------------------------------------------------


def test_lexicon_hit_wins(mini_lexicon):
    tagged = pos_tag(tokenize("la tormentas"), mini_lexicon)
    assert tagged[1][1] == "NNS"


def test_sentence_medial_capitalized_unknown_is_nnp(mini_lexicon):
    tagged = pos_tag(tokenize("la tormenta Matías"), mini_lexicon)
    assert tagged[2][1] == "NNP"


def test_unknown_lowercase_defaults_to_nn(mini_lexicon):
    tagged = pos_tag(tokenize("zutano"), mini_lexicon)
    assert tagged[0][1] == "NN"


def test_suffix_rules(mini_lexicon):
    # plural of a known noun stem
    assert pos_tag(tokenize("la tormentitas"), mini_lexicon)[1][1] == "NN"  # unknown stem
    lex = TagLexicon({"nube": "NN", "temporal": "NN"})
    assert pos_tag(tokenize("nubes"), lex)[0][1] == "NNS"
    assert pos_tag(tokenize("temporales"), lex)[0][1] == "NNS"
    # gerunds and -mente adverbs
    assert pos_tag(tokenize("lloviendo"), lex)[0][1] == "VB"
    assert pos_tag(tokenize("rápidamente"), lex)[0][1] == "OTHER"


def test_digits_tag_cd_and_punct_other(mini_lexicon):
    tagged = pos_tag(tokenize("1805 ,"), mini_lexicon)
    assert [t for _, t in tagged] == ["CD", "OTHER"]


def test_tagging_is_deterministic(seeded_workspace):
    ws = seeded_workspace
    article = ws.store.get("uy-001")
    runs = []
    for _ in range(2):
        tags = []
        for s_index, sentence in enumerate(ws.content_tree(article.id).sentences):
            tags.extend(node.tag for node in sentence.root.children)
        runs.append(tags)
    assert runs[0] == runs[1]


# -- entity detection -------------------------------------------------------------


def test_santa_clara_two_token_gpe(mini_lexicon, mini_gazetteer):
    tagged = pos_tag(tokenize("la tormenta en Santa Clara"), mini_lexicon)
    spans = detect_entities(tagged, mini_gazetteer)
    gpe = [e for e in spans if e.kind == "GPE"]
    assert len(gpe) == 1
    assert gpe[0].span == Span(0, 3, 5)
    assert gpe[0].canonical == "santa clara"


def test_montevideo_canonical(mini_lexicon, mini_gazetteer):
    tagged = pos_tag(tokenize("tormenta en Montevideo"), mini_lexicon)
    spans = detect_entities(tagged, mini_gazetteer)
    assert [(e.kind, e.canonical) for e in spans] == [("GPE", "montevideo")]


def test_date_phrase_grammar(mini_lexicon, mini_gazetteer):
    # hand application of the grammar: day "de" month "de" year is one span
    tagged = pos_tag(tokenize("llovió el 12 de enero de 1805 en la villa"), mini_lexicon)
    spans = detect_entities(tagged, mini_gazetteer)
    dates = [e for e in spans if e.kind == "DATE"]
    assert len(dates) == 1
    assert dates[0].span == Span(0, 2, 7)
    assert dates[0].canonical == "1805-01-12"


def test_bare_year_range(mini_lexicon, mini_gazetteer):
    in_range = detect_entities(pos_tag(tokenize("durante 1805"), mini_lexicon), mini_gazetteer)
    out_of_range = detect_entities(pos_tag(tokenize("durante 1980"), mini_lexicon), mini_gazetteer)
    assert [e.canonical for e in in_range if e.kind == "DATE"] == ["1805"]
    assert [e for e in out_of_range if e.kind == "DATE"] == []


def test_person_and_org_lists(mini_lexicon, mini_gazetteer):
    names = NameLists(persons=frozenset({"matias perez"}), orgs=frozenset({"senado"}))
    tagged = pos_tag(tokenize("la casa de Matías Pérez junto al Senado"), mini_lexicon)
    spans = detect_entities(tagged, mini_gazetteer, names)
    kinds = {(e.kind, e.canonical) for e in spans}
    assert ("PERSON", "matías pérez") in kinds
    assert ("ORG", "senado") in kinds


def test_spans_never_overlap_nor_cross_sentences(seeded_workspace):
    ws = seeded_workspace
    for article in ws.store:
        spans = ws.content_tree(article.id).entity_spans()
        for i, a in enumerate(spans):
            assert a.span.start < a.span.end
            for b in spans[i + 1:]:
                assert not a.span.overlaps(b.span)


# -- content trees ------------------------------------------------------------------


def test_single_sentence_tree(mini_lexicon, mini_gazetteer):
    tree = build_content_tree(FakeArticle("a", "tormenta en la villa"), mini_lexicon, mini_gazetteer)
    assert len(tree.sentences) == 1


def test_tree_tags_with_entity_grouping(mini_lexicon, mini_gazetteer):
    tree = build_content_tree(FakeArticle("a", "Tormenta en Montevideo"), mini_lexicon, mini_gazetteer)
    root = tree.sentences[0].root
    assert [child.tag for child in root.children] == ["NN", "IN", "GPE"]
    gpe = root.children[2]
    assert isinstance(gpe, Node)
    assert [leaf.term for leaf in gpe.children] == ["Montevideo"]
    assert gpe.children[0].parent is gpe


def test_empty_article_is_an_error(mini_lexicon, mini_gazetteer):
    with pytest.raises(ValidationError, match="nothing to parse"):
        build_content_tree(FakeArticle("a", "   "), mini_lexicon, mini_gazetteer)


def test_leaf_order_round_trip_over_fixture(seeded_workspace):
    ws = seeded_workspace
    for article in ws.store:
        tree = ws.content_tree(article.id)
        tokens = [t.surface for t in flat_tokens(article.raw_text)]
        assert tree.leaf_surfaces() == tokens, article.id


# -- event candidates ------------------------------------------------------------------


def test_chubasco_triggers_candidate(seeded_workspace):
    ws = seeded_workspace
    tree = ws.content_tree("uy-002")
    candidates = extract_event_candidates(
        tree, ws.vocab.meteorological_terms(), ws.vocab.damage_terms()
    )
    assert len(candidates) == 1
    candidate = candidates[0]
    assert candidate.status == "pending"
    assert any(term == "chubasco" for term, _ in candidate.trigger_terms)


def test_article_without_meteo_terms_yields_nothing(seeded_workspace):
    ws = seeded_workspace
    tree = ws.content_tree("uy-007")
    assert extract_event_candidates(tree, ws.vocab.meteorological_terms()) == []


def test_metaphor_still_produces_candidate(seeded_workspace):
    # the machine cannot tell a political storm from a real one; rejection
    # belongs to the analyst
    ws = seeded_workspace
    tree = ws.content_tree("ec-001")
    candidates = extract_event_candidates(tree, ws.vocab.meteorological_terms())
    assert len(candidates) == 1
    assert candidates[0].status == "pending"


def test_candidate_soundness(seeded_workspace):
    # every trigger is a leaf of the tree and a vocabulary member
    # (accent/plural-folded, per the documented membership rule)
    from hemeroclim.pipeline import _matches_vocab
    from hemeroclim.textnorm import fold, normalize_term

    ws = seeded_workspace
    folded_vocab = {fold(t) for t in ws.vocab.meteorological_terms()}
    for article in ws.store:
        tree = ws.content_tree(article.id)
        leaves = [normalize_term(s) for s in tree.leaf_surfaces()]
        for candidate in extract_event_candidates(tree, ws.vocab.meteorological_terms()):
            for term, span in candidate.trigger_terms:
                assert term in leaves
                assert _matches_vocab(term, folded_vocab)
                assert candidate.span_exists(span)


def test_hyphen_break_trigger_found(seeded_workspace):
    ws = seeded_workspace
    tree = ws.content_tree("uy-008")
    candidates = extract_event_candidates(tree, ws.vocab.meteorological_terms())
    assert any(term == "tormenta" for term, _ in candidates[0].trigger_terms)
