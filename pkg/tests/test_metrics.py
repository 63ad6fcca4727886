"""Metric correctness: identities, boundaries, and brute-force oracle
agreement on exhaustive small-vocabulary pairs."""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from c3gen.metrics import cider, gleu, lcs_length, meteor, rouge_l, tokenize
from oracles import bf_cider, bf_gleu, bf_lcs

VOCAB = ["fix", "bug", "parser", "null", "check"]


def all_sequences(vocab, max_len):
    for length in range(max_len + 1):
        yield from (list(p) for p in itertools.product(vocab, repeat=length))


# --- tokenization -----------------------------------------------------------


def test_tokenize_lowercases_and_splits():
    assert tokenize("Fix NULL Check") == ["fix", "null", "check"]


def test_tokenize_strips_outer_punctuation_keeps_interior():
    assert tokenize("(foo.bar), baz!") == ["foo.bar", "baz"]
    assert tokenize("don't stop") == ["don't", "stop"]


def test_tokenize_drops_pure_punctuation_tokens():
    assert tokenize("fix -- the ... bug") == ["fix", "the", "bug"]


def test_tokenize_empty():
    assert tokenize("") == []
    assert tokenize("   \t\n") == []


@given(st.text(max_size=80))
def test_tokenize_is_idempotent(text):
    once = tokenize(text)
    assert tokenize(" ".join(once)) == once


# --- gleu -------------------------------------------------------------------


def test_gleu_identity_is_one():
    tokens = tokenize("fix null check in parser")
    assert gleu(tokens, tokens) == 1.0


def test_gleu_disjoint_vocabulary_is_zero():
    assert gleu(tokenize("alpha beta"), tokenize("gamma delta")) == 0.0


def test_gleu_empty_side_is_zero():
    assert gleu([], tokenize("fix bug")) == 0.0
    assert gleu(tokenize("fix bug"), []) == 0.0


def test_gleu_worked_example_recomputed_by_oracle():
    # candidate "fix the bug" vs reference "fix bug": pooled 1-4 grams give
    # the candidate 6 n-grams (3 uni + 2 bi + 1 tri) and the reference 3;
    # 2 unigrams match, so min(2/6, 2/3) = 1/3. Frozen from bf_gleu.
    cand, ref = tokenize("fix the bug"), tokenize("fix bug")
    expected = bf_gleu(cand, ref)
    assert abs(expected - 1 / 3) < 1e-12
    assert abs(gleu(cand, ref) - expected) < 1e-12


def test_gleu_exhaustive_oracle_small_vocab():
    seqs = list(all_sequences(VOCAB[:3], 3))  # 1 + 3 + 9 + 27 = 40 sequences
    pairs = 0
    for cand in seqs:
        for ref in seqs:
            assert abs(gleu(cand, ref) - bf_gleu(cand, ref)) < 1e-12
            pairs += 1
    assert pairs == 40 * 40


# --- rouge_l ----------------------------------------------------------------


def test_rouge_worked_example():
    score = rouge_l(tokenize("the cat sat"), tokenize("the cat ran"))
    assert score.precision == pytest.approx(2 / 3)
    assert score.recall == pytest.approx(2 / 3)
    assert score.f == pytest.approx(2 / 3)


def test_rouge_identity_is_one():
    tokens = tokenize("improve diff parsing speed")
    assert rouge_l(tokens, tokens).f == 1.0


def test_rouge_no_common_tokens_is_zero():
    assert rouge_l(tokenize("aa bb"), tokenize("cc dd")).f == 0.0


def test_rouge_empty_side_is_all_zeros():
    score = rouge_l([], tokenize("x"))
    assert (score.precision, score.recall, score.f) == (0.0, 0.0, 0.0)


def test_rouge_symmetric_for_equal_lengths():
    a, b = tokenize("one two three"), tokenize("one three two")
    assert rouge_l(a, b).f == pytest.approx(rouge_l(b, a).f)


def test_rouge_respects_order_but_unigram_gleu_would_not():
    cand = ["a", "b", "c"]
    rev = ["c", "b", "a"]
    assert rouge_l(rev, cand).f < 1.0
    assert gleu(rev, cand, max_n=1) == 1.0  # pooled unigrams alone ignore order


def test_lcs_exhaustive_oracle_small_vocab():
    seqs = list(all_sequences(VOCAB[:3], 3))
    for cand in seqs:
        for ref in seqs:
            assert lcs_length(cand, ref) == bf_lcs(cand, ref)


def test_lcs_oracle_on_longer_random_pairs():
    rng = random.Random(99)
    for _ in range(300):
        cand = [rng.choice(VOCAB) for _ in range(rng.randint(0, 8))]
        ref = [rng.choice(VOCAB) for _ in range(rng.randint(0, 8))]
        assert lcs_length(cand, ref) == bf_lcs(cand, ref)


# --- meteor -----------------------------------------------------------------


def test_meteor_identity_formula():
    for m in range(1, 11):
        tokens = [f"w{i}" for i in range(m)]
        assert meteor(tokens, tokens) == pytest.approx(1 - 0.5 / m**3, abs=1e-9)


def test_meteor_single_identical_token_is_half():
    assert meteor(["fix"], ["fix"]) == pytest.approx(0.5)


def test_meteor_zero_matches_is_zero():
    assert meteor(tokenize("alpha beta"), tokenize("gamma delta")) == 0.0
    assert meteor([], ["x"]) == 0.0


def test_meteor_worked_example_two_chunks():
    # "add test" vs "add a test": P=1, R=2/3, F=20/29; the two matches are
    # split by "a" in the reference, so 2 chunks and penalty 0.5
    score = meteor(tokenize("add test"), tokenize("add a test"))
    assert score == pytest.approx((20 / 29) * 0.5, abs=1e-9)


def test_meteor_stemmed_stage_matches_inflections():
    base = meteor(tokenize("adds tests"), tokenize("add test"))
    assert base > 0.0  # exact matching alone would score zero


def test_meteor_monotone_in_matches_for_fixed_chunks():
    # one chunk of growing length against the same 4-token reference
    ref = ["a", "b", "c", "d"]
    scores = [meteor(ref[:k], ref) for k in range(1, 5)]
    assert scores == sorted(scores)


# --- cider ------------------------------------------------------------------


def _two_item_corpus():
    return [
        (tokenize("add retry logic to client"), [tokenize("add retry logic to client")]),
        (tokenize("prune stale imports everywhere today"),
         [tokenize("rework queue draining under pressure")]),
    ]


def test_cider_requires_nonempty_corpus():
    with pytest.raises(ValueError):
        cider([])


def test_cider_single_item_corpus_degenerates_to_zero():
    result = cider([(tokenize("same text here"), [tokenize("same text here")])])
    assert result.per_item == [0.0]
    assert result.degenerate_idf


def test_cider_zero_overlap_scores_zero():
    result = cider(_two_item_corpus())
    assert result.per_item[1] == 0.0


def test_cider_identical_candidate_with_unique_ngrams_scores_ten():
    result = cider(_two_item_corpus())
    assert result.per_item[0] == pytest.approx(10.0, abs=1e-9)


def test_cider_matches_bruteforce_oracle_on_committed_fixture():
    corpus = _two_item_corpus()
    expected = bf_cider(corpus)
    result = cider(corpus)
    for got, want in zip(result.per_item, expected):
        assert got == pytest.approx(want, abs=1e-9)


def test_cider_matches_oracle_on_partial_overlap_corpus():
    corpus = [
        (tokenize("fix crash in parser startup"), [tokenize("fix startup crash in the parser")]),
        (tokenize("update docs for retry flag"), [tokenize("document the retry flag")]),
        (tokenize("fix crash again"), [tokenize("fix the crash again")]),
    ]
    expected = bf_cider(corpus)
    result = cider(corpus)
    for got, want in zip(result.per_item, expected):
        assert got == pytest.approx(want, abs=1e-9)


def test_cider_range_bounds():
    corpus = _two_item_corpus()
    for value in cider(corpus).per_item:
        assert 0.0 <= value <= 10.0


# --- cross-metric properties -------------------------------------------------


@given(
    st.lists(st.sampled_from(VOCAB), max_size=8),
    st.lists(st.sampled_from(VOCAB), max_size=8),
)
def test_metric_ranges_hold_for_arbitrary_pairs(cand, ref):
    assert 0.0 <= gleu(cand, ref) <= 1.0
    assert 0.0 <= rouge_l(cand, ref).f <= 1.0
    assert 0.0 <= meteor(cand, ref) <= 1.0 + 1e-12


@given(
    st.lists(st.sampled_from(VOCAB), min_size=0, max_size=6),
    st.lists(st.sampled_from(VOCAB), min_size=0, max_size=6),
)
def test_gleu_and_lcs_agree_with_oracles_property(cand, ref):
    assert abs(gleu(cand, ref) - bf_gleu(cand, ref)) < 1e-12
    assert lcs_length(cand, ref) == bf_lcs(cand, ref)
