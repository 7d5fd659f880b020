import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from textlayout.metrics import (
    ScoreReport,
    anls,
    anls_sample,
    bleu4,
    extract_list,
    f_score_list,
    lcs_length,
    levenshtein,
    recall_contains,
    rouge_l,
    score_corpus,
    score_sample,
    tokenize,
)


def lev_oracle(a, b):
    # full-table Wagner-Fischer, written independently of the implementation
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[-1][-1]


def lcs_oracle(a, b):
    """Longest common subsequence by enumerating subsequences of ``a``."""
    for k in range(len(a), 0, -1):
        for idx in itertools.combinations(range(len(a)), k):
            sub = [a[i] for i in idx]
            it = iter(b)
            if all(any(x == y for y in it) for x in sub):
                return k
    return 0


class TestExtractList:
    def test_direct(self):
        assert extract_list("Answer: ['lenses', 'footwear']") == ["lenses", "footwear"]

    def test_double_quotes(self):
        assert extract_list('are: ["good morning", "get some food"].') == ["good morning", "get some food"]

    def test_none(self):
        assert extract_list("The list is empty.") is None

    def test_last_group(self):
        assert extract_list("[a] then [b]") == ["b"]

    def test_empty_list(self):
        assert extract_list("[]") == []


class TestFScore:
    def test_exact(self):
        assert f_score_list("['lenses']", ["lenses"]) == 1.0

    def test_extra_item(self):
        assert f_score_list("['lenses','footwear']", ["lenses"]) == pytest.approx(2 / 3)

    def test_word_fallback(self):
        assert f_score_list("The list contains lenses and bulbs", ["lenses", "bulbs"]) == pytest.approx(0.5)

    def test_case_and_space(self):
        assert f_score_list("['Jet  Skis']", ["jet skis"]) == 1.0

    def test_empty_prediction_list(self):
        assert f_score_list("[]", ["a"]) == 0.0

    def test_empty_gold(self):
        with pytest.raises(ValueError):
            f_score_list("[a]", [])

    @given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=6),
           st.lists(st.sampled_from("abcde"), min_size=1, max_size=6))
    def test_symmetric(self, a, b):
        lit = lambda xs: "[" + ", ".join(f"'{x}'" for x in xs) + "]"
        assert f_score_list(lit(a), b) == pytest.approx(f_score_list(lit(b), a))

    @given(st.lists(st.text("abc xy", min_size=1).map(str.strip).filter(bool), min_size=1, max_size=5))
    def test_self_match(self, gold):
        assert f_score_list(repr(gold), gold) == 1.0


class TestTokenize:
    def test_cjk_per_char(self):
        assert tokenize("姓名: 张三 abc12") == ["姓", "名", "张", "三", "abc12"]

    def test_punctuation_dropped(self):
        assert tokenize("Hello, World!") == ["hello", "world"]


class TestANLS:
    def test_examples(self):
        assert anls_sample("Jo Spach", "Jo Spach.") == pytest.approx(1 - 1 / 9)
        assert anls_sample("a", "b") == 0.0
        assert anls_sample("X", "x") == 1.0

    def test_below_threshold_floored(self):
        assert anls_sample("abcd", "abxy") == 0.5
        assert anls_sample("abcde", "abxyz") == 0.0

    def test_best_gold(self):
        assert anls_sample("cat", ["dog", "cat"]) == 1.0

    def test_corpus(self):
        assert anls(["a", "b"], ["a", "c"]) == 0.5
        with pytest.raises(ValueError):
            anls(["a"], [])

    def test_levenshtein_oracle(self):
        rng = random.Random(7)
        for _ in range(300):
            a = "".join(rng.choices("abc", k=rng.randint(0, 8)))
            b = "".join(rng.choices("abc", k=rng.randint(0, 8)))
            assert levenshtein(a, b) == lev_oracle(a, b)


class TestRouge:
    def test_examples(self):
        assert rouge_l("the cat sat", "the cat") == pytest.approx(0.8)
        assert rouge_l("a b", "a b") == 1.0
        assert rouge_l("a b", "c d") == 0.0
        assert rouge_l("", "a") == 0.0

    @given(st.lists(st.sampled_from("abc"), max_size=7), st.lists(st.sampled_from("abc"), max_size=7))
    def test_lcs_oracle(self, a, b):
        assert lcs_length(a, b) == lcs_oracle(a, b)


class TestBleu:
    def test_identical(self):
        s = "one two three four five six seven eight nine ten"
        assert bleu4(s, s) == pytest.approx(1.0)

    def test_short_no_overlap(self):
        assert bleu4("an apple", "the big red dog ran home") < 1e-2

    def test_empty(self):
        assert bleu4("", "a b") == 0.0

    def test_brevity_penalty(self):
        ref = "a b c d e f g h"
        assert bleu4("a b c d", ref) == pytest.approx(math.exp(1 - 8 / 4))

    @given(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=10),
           st.lists(st.sampled_from("abcdef"), min_size=1, max_size=10))
    def test_range(self, a, b):
        assert 0.0 <= bleu4(" ".join(a), " ".join(b)) <= 1.0
        assert 0.0 <= rouge_l(" ".join(a), " ".join(b)) <= 1.0


class TestRecall:
    def test_examples(self):
        assert recall_contains("The value is A.", "A") == 1
        assert recall_contains("unknown", "张三") == 0
        assert recall_contains("张  三", "张三") == 1

    def test_case_preserved(self):
        assert recall_contains("the value is a", "A") == 0


class TestReport:
    def test_aggregate(self):
        r = ScoreReport("x", [1.0, 0.0, 0.5])
        assert r.count == 3 and r.aggregate == 0.5
        assert ScoreReport("x").aggregate == 0.0

    def test_score_sample_dispatch(self):
        assert score_sample("fscore", "['a']", ["a"]) == 1.0
        assert score_sample("recall", "xAy", ["B", "A"]) == 1.0
        assert score_sample("rouge", "a b", ["a", "b"]) == 1.0
        with pytest.raises(ValueError):
            score_sample("meteor", "a", "a")

    def test_corpus(self):
        assert score_corpus("anls", ["a", "b"], ["a", "b"]).aggregate == 1.0
        with pytest.raises(ValueError):
            score_corpus("anls", ["a"], [])
