from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subshiftdim import (
    Alphabet,
    ContractViolation,
    EmptyLanguageError,
    InputError,
    ResourceLimitError,
    build_transition_matrix,
    enumerate_allowed_words,
    normalize_forbidden_set,
)
from subshiftdim.symbolic import is_compatible, star


def _avoids(word, forbidden):
    return not any(tuple(word[i:i + len(f)]) == tuple(f)
                   for f in forbidden for i in range(len(word) - len(f) + 1))


def _prefixes(forbidden, m, n, lookahead=6):
    """Length-n words that extend to a length n+lookahead word avoiding ``forbidden``."""
    out = set()
    for w in itertools.product(range(1, m + 1), repeat=n + lookahead):
        if _avoids(w, forbidden):
            out.add(w[:n])
    return out


class TestAlphabet:
    def test_default_names(self):
        ab = Alphabet(3)
        assert ab.names == ("1", "2", "3")
        assert ab.parse("312") == (3, 1, 2)
        assert ab.format((2, 2, 1)) == "221"

    def test_aliases(self):
        ab = Alphabet(2, ("a", "b"))
        assert ab.parse("ba") == (2, 1)
        assert ab.index("b") == 2

    def test_unknown_letter(self):
        with pytest.raises(InputError):
            Alphabet(2).parse("13")

    def test_words_count(self):
        assert len(list(Alphabet(3).words(4))) == 81


class TestNormalize:
    def test_already_uniform(self, ab2):
        fs = normalize_forbidden_set([(2, 2)], ab2)
        assert fs.words == {(2, 2)} and fs.k == 2

    def test_right_extension(self, ab2):
        fs = normalize_forbidden_set([(2,), (1, 2)], ab2)
        assert fs.words == {(2, 1), (2, 2), (1, 2)} and fs.k == 2

    def test_right_extension_keeps_prefixes(self, ab2):
        raw = [(2,), (1, 2)]
        fs = normalize_forbidden_set(raw, ab2)
        for n in range(1, 11):
            assert _prefixes(raw, 2, n) == _prefixes(fs.words, 2, n)

    def test_uniform_length_three_unchanged(self, ab2):
        raw = [(1, 1, 2), (2, 1, 1), (2, 2, 2)]
        fs = normalize_forbidden_set(raw, ab2)
        assert fs.words == set(raw) and fs.k == 3

    def test_empty_is_full_shift(self, ab2):
        fs = normalize_forbidden_set([], ab2)
        assert fs.words == frozenset() and fs.k == 2

    def test_out_of_alphabet(self, ab2):
        with pytest.raises(InputError):
            normalize_forbidden_set([(1, 3)], ab2)

    def test_everything_forbidden(self, ab2):
        with pytest.raises(EmptyLanguageError):
            normalize_forbidden_set([(1,), (2,)], ab2)

    def test_deduplicates(self, ab2):
        fs = normalize_forbidden_set([(2, 2), (2, 2), (2,)], ab2)
        assert fs.words == {(2, 1), (2, 2)}

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3), st.data())
    def test_idempotent(self, m, data):
        ab = Alphabet(m)
        word = st.lists(st.integers(1, m), min_size=1, max_size=3).map(tuple)
        raw = data.draw(st.lists(word, max_size=5))
        try:
            once = normalize_forbidden_set(raw, ab)
        except EmptyLanguageError:
            return
        assert normalize_forbidden_set(once.words, ab) == once
        assert all(len(w) == once.k for w in once.words)


class TestCompatibility:
    def test_examples(self):
        assert is_compatible((1, 2), (2, 1))
        assert not is_compatible((1, 1), (2, 1))
        assert is_compatible((1,), (2,))

    def test_unequal_lengths(self):
        with pytest.raises(InputError):
            is_compatible((1, 2), (1,))

    def test_star(self):
        assert star((1, 2), (2, 1)) == (1, 2, 1)
        assert star((1, 1), (1, 2)) == (1, 1, 2)
        assert star((2,), (2,)) == (2, 2)

    def test_star_incompatible(self):
        with pytest.raises(ContractViolation):
            star((1, 1), (2, 1))

    @given(st.lists(st.integers(1, 3), min_size=2, max_size=4).map(tuple), st.integers(1, 3))
    def test_star_prefix_suffix(self, omega, letter):
        xi = omega[1:] + (letter,)
        w = star(omega, xi)
        assert w[:len(omega)] == omega and w[-len(xi):] == xi


class TestTransitionMatrix:
    def test_golden(self, golden):
        a = build_transition_matrix(golden)
        assert a.entries.tolist() == [[1, 1], [1, 0]]
        assert a.labels == ((1,), (2,))

    def test_four_by_four(self, four_by_four):
        a = build_transition_matrix(four_by_four)
        assert a.labels == ((1, 1), (1, 2), (2, 1), (2, 2))
        assert a.entries.tolist() == [[1, 0, 0, 0], [0, 0, 1, 1], [0, 1, 0, 0], [0, 0, 1, 0]]

    def test_full_shift(self):
        a = build_transition_matrix(normalize_forbidden_set([], Alphabet(3)))
        assert a.entries.tolist() == np.ones((3, 3), dtype=int).tolist()

    def test_read_only(self, golden):
        a = build_transition_matrix(golden)
        with pytest.raises(ValueError):
            a.entries[0, 0] = 5

    def test_entries_are_binary(self, four_by_four):
        a = build_transition_matrix(four_by_four).entries
        assert set(np.unique(a)) <= {0, 1} and a.shape == (4, 4)


class TestEnumeration:
    def test_golden_n3(self, golden):
        assert enumerate_allowed_words(golden, 3) == [
            (1, 1, 1), (1, 1, 2), (1, 2, 1), (2, 1, 1), (2, 1, 2)]

    def test_full_shift(self):
        words = enumerate_allowed_words(normalize_forbidden_set([], Alphabet(2)), 3)
        assert len(words) == 8

    def test_even_shift(self, even_shift):
        words = enumerate_allowed_words(even_shift, 3)
        assert len(words) == 7
        assert even_shift.alphabet.parse("101") not in words

    def test_fibonacci(self, golden):
        fib = [1, 2]
        for _ in range(12):
            fib.append(fib[-1] + fib[-2])
        for n in range(1, 13):
            assert len(enumerate_allowed_words(golden, n)) == fib[n]

    def test_cap(self):
        fs = normalize_forbidden_set([], Alphabet(2))
        with pytest.raises(ResourceLimitError):
            enumerate_allowed_words(fs, 10, cap=100)

    def test_non_positive_length(self, golden):
        with pytest.raises(InputError):
            enumerate_allowed_words(golden, 0)

    def test_matches_brute_force(self, four_by_four):
        for n in range(1, 9):
            brute = [w for w in Alphabet(2).words(n) if _avoids(w, four_by_four.words)]
            assert enumerate_allowed_words(four_by_four, n) == sorted(brute)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.integers(2, 3), st.data())
    def test_count_matches_matrix_power(self, m, k, data):
        ab = Alphabet(m)
        pool = list(ab.words(k))
        raw = data.draw(st.lists(st.sampled_from(pool), max_size=len(pool) - 1, unique=True))
        fs = normalize_forbidden_set(raw, ab)
        a = build_transition_matrix(fs).entries.astype(object)
        top = 12 if m < 3 else 8
        for n in range(fs.k, top + 1):
            want = int(np.linalg.matrix_power(a, n - fs.k + 1).sum())
            assert len(enumerate_allowed_words(fs, n)) == want

    def test_full_shift_count(self):
        for m in (1, 2, 3):
            fs = normalize_forbidden_set([], Alphabet(m))
            assert len(enumerate_allowed_words(fs, 5)) == m**5
