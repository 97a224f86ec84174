import pytest
from hypothesis import given, strategies as st

from mirth.text import (
    FrequencyTable,
    build_frequency_table,
    extract_ngrams,
    make_document,
    render_tokens,
    tokenize,
)

KERMIT = "Wat is groen en plakt aan de muur? Kermit de sticker!"


def test_tokenize_splitting_rule():
    assert [t.surface for t in tokenize("Kermit de sticker!")] == [
        "Kermit", "de", "sticker", "!",
    ]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_kermit_joke_counts():
    tokens = tokenize(KERMIT)
    assert len(tokens) == 13
    assert sum(t.is_punct for t in tokens) == 2
    assert [t.surface for t in tokens if t.is_punct] == ["?", "!"]


def test_tokenize_joiners_and_numerals():
    tokens = tokenize("z'n e-mail kost 3 euro - echt")
    surfaces = [t.surface for t in tokens]
    assert surfaces == ["z'n", "e-mail", "kost", "3", "euro", "-", "echt"]
    three = tokens[3]
    assert not three.is_word and not three.is_punct
    dash = tokens[5]
    assert dash.is_punct
    assert tokens[0].is_word and tokens[1].is_word


def test_normalized_is_casefolded():
    for tok in tokenize("Kermit DE Sticker"):
        assert tok.normalized == tok.surface.casefold()


def test_spans_reconstruct_exactly():
    doc = make_document("d", "  Wat?  ja,  \tnee!")
    assert render_tokens(doc, [t.surface for t in doc.tokens]) == doc.raw_text


@given(st.text(max_size=120))
def test_roundtrip_property(raw):
    doc = make_document("d", raw)
    assert render_tokens(doc, [t.surface for t in doc.tokens]) == raw
    spans = [t.char_span for t in doc.tokens]
    assert all(s < e for s, e in spans)
    assert all(e0 <= s1 for (_, e0), (s1, _) in zip(spans, spans[1:]))
    for tok in doc.tokens:
        assert raw[tok.char_span[0] : tok.char_span[1]] == tok.surface
        assert not (tok.is_punct and tok.is_word)


def test_frequency_table_simple():
    table = build_frequency_table([make_document("d", "a b a")])
    assert table.counts == {"a": 2, "b": 1}
    assert table.total_tokens == 3


def test_frequency_table_empty():
    table = build_frequency_table([])
    assert table.counts == {} and table.total_tokens == 0


def test_frequency_table_excludes_punctuation():
    table = build_frequency_table([make_document("d", "ha! ha! 7")])
    assert table.counts == {"ha": 2}
    assert table.total_tokens == 2


@given(
    st.lists(st.text(alphabet="abc", min_size=1, max_size=3), max_size=30),
    st.lists(st.text(alphabet="abc", min_size=1, max_size=3), max_size=30),
)
def test_frequency_additivity(words_a, words_b):
    doc_a = make_document("a", " ".join(words_a))
    doc_b = make_document("b", " ".join(words_b))
    merged = build_frequency_table([doc_a, doc_b])
    part_a = build_frequency_table([doc_a])
    part_b = build_frequency_table([doc_b])
    summed = dict(part_a.counts)
    for word, count in part_b.counts.items():
        summed[word] = summed.get(word, 0) + count
    assert merged.counts == summed
    assert merged.total_tokens == part_a.total_tokens + part_b.total_tokens


class TestPercentile:
    def _table(self, values):
        return FrequencyTable(
            counts={f"w{i}": v for i, v in enumerate(values)},
            total_tokens=sum(values),
        )

    def test_nearest_rank_by_hand(self):
        # ceil(0.62 * 5) = 4 -> fourth smallest of [1,1,2,3,5] is 3
        assert self._table([1, 1, 2, 3, 5]).percentile_threshold(0.62) == 3

    def test_single_word(self):
        assert self._table([7]).percentile_threshold(0.62) == 7

    def test_q_one_is_maximum(self):
        assert self._table([1, 2, 3, 4]).percentile_threshold(1.0) == 4

    def test_q_zero_is_minimum(self):
        assert self._table([4, 9, 2]).percentile_threshold(0.0) == 2

    def test_empty_table_errors(self):
        with pytest.raises(ValueError, match="empty frequency table"):
            FrequencyTable(counts={}, total_tokens=0).percentile_threshold(0.5)

    @given(
        st.lists(st.integers(min_value=1, max_value=50), min_size=1, max_size=40),
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=0, max_value=1),
    )
    def test_monotone_in_q(self, values, q1, q2):
        table = self._table(values)
        lo, hi = sorted([q1, q2])
        assert table.percentile_threshold(lo) <= table.percentile_threshold(hi)


class TestNgrams:
    def _tokens(self, text):
        return tokenize(text)

    def test_unigrams(self):
        grams = extract_ngrams(self._tokens("a b c"), 1, 1)
        assert grams == [("a",), ("b",), ("c",)]

    def test_one_to_three(self):
        grams = extract_ngrams(self._tokens("a b c"), 1, 3)
        assert grams == [
            ("a",), ("b",), ("c",),
            ("a", "b"), ("b", "c"),
            ("a", "b", "c"),
        ]

    def test_too_short(self):
        assert extract_ngrams(self._tokens("a"), 2, 3) == []

    def test_punctuation_included(self):
        grams = extract_ngrams(self._tokens("ha!"), 2, 2)
        assert grams == [("ha", "!")]

    def test_invalid_orders(self):
        with pytest.raises(ValueError):
            extract_ngrams(self._tokens("a b"), 0, 2)
        with pytest.raises(ValueError):
            extract_ngrams(self._tokens("a b"), 3, 2)

    @given(st.lists(st.sampled_from("ab"), max_size=12))
    def test_count_formula(self, letters):
        tokens = self._tokens(" ".join(letters))
        count = len(extract_ngrams(tokens, 1, 3))
        n = len(tokens)
        assert count == max(0, n) + max(0, n - 1) + max(0, n - 2)
