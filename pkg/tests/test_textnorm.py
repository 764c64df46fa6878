from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from hemeroclim.textnorm import (
    Token,
    flat_tokens,
    fold,
    normalize_term,
    segment_sentences,
    strip_accents,
    tokenize,
)


def test_normalize_lowercases_and_keeps_accents():
    assert normalize_term("Llovió") == "llovió"
    assert normalize_term("TORMENTA") == "tormenta"


def test_strip_accents_keeps_enye():
    assert strip_accents("llovió") == "llovio"
    assert strip_accents("año") == "año"
    assert fold("Güemes") == "guemes"


def test_two_terminal_sentences():
    assert segment_sentences("Llovió mucho. El río creció.") == [
        "Llovió mucho.",
        "El río creció.",
    ]


def test_empty_input_yields_no_sentences():
    assert segment_sentences("") == []
    assert segment_sentences("   \n ") == []


def test_abbreviation_guard_keeps_sentence_together():
    text = "El Sr. Pérez habló."
    sentences = segment_sentences(text)
    assert len(sentences) == 1
    # rejoining reproduces the input modulo whitespace
    assert "".join("".join(s.split()) for s in sentences) == "".join(text.split())


def test_semicolon_and_question_boundaries():
    got = segment_sentences("¿Qué pasó? Nadie lo sabe; El agua subió.")
    assert got == ["¿Qué pasó?", "Nadie lo sabe;", "El agua subió."]


@settings(max_examples=60, deadline=None)
@given(
    st.text(
        alphabet="abcdeáéíóúñ .!?;\n,ABCDE",
        min_size=0,
        max_size=120,
    )
)
def test_segmentation_reproduces_input_modulo_whitespace(text):
    sentences = segment_sentences(text)
    assert "".join("".join(s.split()) for s in sentences) == "".join(text.split())
    for sentence in sentences:
        assert sentence in text


def test_tokenize_positions_consecutive():
    tokens = tokenize("fuertes tormentas")
    assert [t.surface for t in tokens] == ["fuertes", "tormentas"]
    assert [t.position for t in tokens] == [0, 1]


def test_punctuation_is_its_own_token():
    tokens = tokenize("Montevideo,")
    assert [t.surface for t in tokens] == ["Montevideo", ","]
    assert tokens[1].is_punct


def test_hyphen_line_break_rejoined():
    # hand computation: "tormen-" + newline + "ta" is one word artifact
    tokens = tokenize("tormen-\nta")
    assert [t.surface for t in tokens] == ["tormenta"]
    # a hyphen without a line break is kept as punctuation
    plain = tokenize("tormen-ta")
    assert [t.surface for t in plain] == ["tormen", "-", "ta"]


def test_flat_tokens_positions_span_sentences():
    tokens = flat_tokens("Llovió mucho. El río creció.")
    assert [t.sentence_index for t in tokens] == [0, 0, 0, 1, 1, 1, 1]
    assert [t.position for t in tokens] == [0, 1, 2, 0, 1, 2, 3]


def test_token_normalization_follows_corpus_rules():
    token = tokenize("Llovió")[0]
    assert token == Token("Llovió", "llovió", 0, 0)
