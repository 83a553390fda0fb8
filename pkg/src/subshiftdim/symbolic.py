"""Words over a finite alphabet and subshifts of finite type.

Letters are the integers ``1..m`` and a word is a plain tuple of letters.
A subshift of finite type is given by a :class:`ForbiddenSet`, which is
always stored in normalized form: every forbidden word has the same
length ``k >= 2``.

The allowed words of length ``n`` of an SFT are the words of length ``n``
that contain no forbidden word as a factor. This is exactly what the
transition matrix counts, so word sums obtained by enumeration and by
matrix products agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ContractViolation,
    EmptyLanguageError,
    InputError,
    ResourceLimitError,
)

Word = tuple[int, ...]

DEFAULT_WORD_CAP = 10**7


@dataclass(frozen=True)
class Alphabet:
    """The letters ``1..size``, with optional display names."""

    size: int
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.size < 1:
            raise InputError(f"alphabet size must be positive, got {self.size}")
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(1, self.size + 1)))
        elif len(self.names) != self.size:
            raise InputError(f"expected {self.size} letter names, got {len(self.names)}")
        elif len(set(self.names)) != self.size:
            raise InputError(f"letter names are not distinct: {self.names}")

    @property
    def letters(self) -> range:
        return range(1, self.size + 1)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name) + 1
        except ValueError:
            raise InputError(f"unknown letter {name!r}; alphabet is {list(self.names)}") from None

    def parse(self, text: str) -> Word:
        """Parse a word written with letter names.

        Single-character names are read character by character; otherwise
        the word must be whitespace separated.
        """
        if all(len(name) == 1 for name in self.names):
            tokens = [ch for ch in text if not ch.isspace()]
        else:
            tokens = text.split()
        return tuple(self.index(tok) for tok in tokens)

    def format(self, word: Sequence[int]) -> str:
        sep = "" if all(len(name) == 1 for name in self.names) else " "
        return sep.join(self.names[a - 1] for a in word)

    def check(self, word: Sequence[int]) -> Word:
        word = tuple(int(a) for a in word)
        for a in word:
            if not 1 <= a <= self.size:
                raise InputError(f"letter {a} outside alphabet 1..{self.size} in word {word}")
        return word

    def words(self, n: int) -> Iterable[Word]:
        """All of Omega_n in lexicographic order."""
        return product(self.letters, repeat=n)


@dataclass(frozen=True)
class ForbiddenSet:
    """A normalized forbidden-word list: all words of length ``k``."""

    alphabet: Alphabet
    words: frozenset[Word]
    k: int

    def __contains__(self, word) -> bool:
        return tuple(word) in self.words

    def __iter__(self):
        return iter(sorted(self.words))

    def __len__(self):
        return len(self.words)

    def avoids(self, word: Sequence[int]) -> bool:
        """True when ``word`` contains no forbidden factor."""
        k = self.k
        word = tuple(word)
        return all(word[i:i + k] not in self.words for i in range(len(word) - k + 1))


def normalize_forbidden_set(raw: Iterable[Sequence[int]], alphabet: Alphabet) -> ForbiddenSet:
    """Rewrite a finite forbidden list so every word has the same length.

    Short words are replaced by all of their right extensions to the
    common length ``k = max(2, longest word)``; this leaves the set of
    one-sided infinite sequences avoiding the list unchanged.
    """
    checked = []
    for w in raw:
        w = alphabet.check(w)
        if not w:
            raise InputError("the empty word cannot be forbidden")
        checked.append(w)
    k = max([2] + [len(w) for w in checked])
    words = set()
    for w in checked:
        for tail in alphabet.words(k - len(w)):
            words.add(w + tail)
    if len(words) == alphabet.size**k:
        raise EmptyLanguageError(f"every word of length {k} is forbidden; the subshift is empty")
    return ForbiddenSet(alphabet, frozenset(words), k)


def is_compatible(omega: Sequence[int], xi: Sequence[int]) -> bool:
    """Whether the last ``k-2`` letters of ``omega`` are the first ``k-2`` of ``xi``.

    For words of length one the overlap is empty and the answer is True.
    """
    if len(omega) != len(xi):
        raise InputError(f"compatibility needs equal lengths, got {len(omega)} and {len(xi)}")
    return tuple(omega[1:]) == tuple(xi[:-1])


def star(omega: Sequence[int], xi: Sequence[int]) -> Word:
    """Glue a compatible pair into the word ``omega_1 xi_1 ... xi_{k-1}``."""
    if not is_compatible(omega, xi):
        raise ContractViolation(f"{tuple(omega)} is not compatible with {tuple(xi)}")
    return tuple(omega) + tuple(xi[-1:])


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Square nonnegative matrix with identical row and column labels.

    For an SFT the labels are the words of length ``k-1`` in lexicographic
    order and ``forbidden`` records the set the matrix was built from.
    """

    entries: np.ndarray
    labels: tuple = ()
    forbidden: ForbiddenSet | None = field(default=None, repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError(f"transition matrix must be square, got shape {a.shape}")
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise InputError("transition matrix entries must be finite and nonnegative")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(1, a.shape[0] + 1)))
        elif len(self.labels) != a.shape[0]:
            raise InputError("one label per row is required")

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.entries, other.entries)

    __hash__ = None


def build_transition_matrix(forbidden: ForbiddenSet) -> TransitionMatrix:
    """The ``m^(k-1)`` square 0/1 matrix of the SFT.

    Entry ``(i, j)`` is 1 exactly when row word ``i`` is compatible with
    column word ``j`` and their star product is not forbidden. Rows for
    dead or unreachable blocks are kept.
    """
    alphabet, k = forbidden.alphabet, forbidden.k
    labels = tuple(alphabet.words(k - 1))
    index = {w: i for i, w in enumerate(labels)}
    a = np.zeros((len(labels), len(labels)))
    for i, w in enumerate(labels):
        for letter in alphabet.letters:
            # the only compatible columns are the one-letter shifts of w
            successor = w[1:] + (letter,)
            if w + (letter,) not in forbidden.words:
                a[i, index[successor]] = 1.0
    return TransitionMatrix(a, labels, forbidden)


def enumerate_allowed_words(presentation, n: int, cap: int = DEFAULT_WORD_CAP) -> list[Word]:
    """All allowed words of length ``n``, sorted lexicographically.

    ``presentation`` is a :class:`ForbiddenSet` or a
    :class:`~subshiftdim.sofic.LabeledGraph`; for a graph the words are
    the distinct label sequences of paths of length ``n``.
    """
    if n < 1:
        raise InputError(f"word length must be positive, got {n}")
    if isinstance(presentation, TransitionMatrix) and presentation.forbidden is not None:
        presentation = presentation.forbidden
    if isinstance(presentation, ForbiddenSet):
        words = _sft_words(presentation, n, cap)
    else:
        from .sofic import LabeledGraph, label_words

        if not isinstance(presentation, LabeledGraph):
            raise InputError(f"unsupported presentation {type(presentation).__name__}")
        words = label_words(presentation, n, cap)
    return sorted(words)


def _sft_words(forbidden: ForbiddenSet, n: int, cap: int) -> list[Word]:
    k = forbidden.k
    letters = tuple(forbidden.alphabet.letters)
    bad = forbidden.words
    out: list[Word] = []
    stack: list[Word] = [()]
    while stack:
        w = stack.pop()
        if len(w) == n:
            out.append(w)
            if len(out) > cap:
                raise ResourceLimitError(f"more than {cap} allowed words of length {n}")
            continue
        for a in reversed(letters):
            v = w + (a,)
            if len(v) >= k and v[-k:] in bad:
                continue
            stack.append(v)
    return out
