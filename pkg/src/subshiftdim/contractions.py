"""Per-letter Lipschitz bounds of an iterated function system."""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real
from typing import Sequence

from .errors import InputError

LOWER = "lower"
UPPER = "upper"


def check_side(side: str) -> str:
    if side not in (LOWER, UPPER):
        raise InputError(f"side must be 'lower' or 'upper', got {side!r}")
    return side


@dataclass(frozen=True)
class ContractionSystem:
    """Constants ``0 < c_i <= cbar_i < 1`` for letters ``i = 1..m``.

    ``lower[i-1]`` and ``upper[i-1]`` bound the contraction of map ``i``
    from below and above. Values may be :class:`fractions.Fraction` for
    exact word weights.
    """

    lower: tuple[Real, ...]
    upper: tuple[Real, ...]

    def __post_init__(self):
        lower, upper = tuple(self.lower), tuple(self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if not lower or len(lower) != len(upper):
            raise InputError("need one lower and one upper constant per letter")
        for i, (c, cb) in enumerate(zip(lower, upper), start=1):
            if not 0 < c <= cb < 1:
                raise InputError(f"letter {i}: need 0 < c <= cbar < 1, got c={c}, cbar={cb}")

    @classmethod
    def uniform(cls, m: int, c: Real, cbar: Real | None = None) -> "ContractionSystem":
        cbar = c if cbar is None else cbar
        return cls((c,) * m, (cbar,) * m)

    @classmethod
    def similarities(cls, ratios: Sequence[Real]) -> "ContractionSystem":
        return cls(tuple(ratios), tuple(ratios))

    @property
    def size(self) -> int:
        return len(self.lower)

    def constants(self, side: str = LOWER) -> tuple[Real, ...]:
        return self.lower if check_side(side) == LOWER else self.upper

    def constant(self, letter: int, side: str = LOWER) -> Real:
        if not 1 <= letter <= self.size:
            raise InputError(f"no contraction constant for letter {letter}")
        return self.constants(side)[letter - 1]

    @property
    def c_min(self) -> Real:
        return min(self.lower)

    @property
    def c_max(self) -> Real:
        return max(self.lower)

    @property
    def cbar_min(self) -> Real:
        return min(self.upper)

    @property
    def cbar_max(self) -> Real:
        return max(self.upper)

    def max_constant(self, side: str = LOWER) -> Real:
        return max(self.constants(side))

    def word_weight(self, word: Sequence[int], t: Real = 1, side: str = LOWER) -> Real:
        """``c_w^t``, the product of the letter constants raised to ``t``."""
        cs = self.constants(side)
        w = 1
        for a in word:
            w *= cs[a - 1]
        return w**t

    def log_constants(self, side: str = LOWER) -> tuple[float, ...]:
        return tuple(math.log(c) for c in self.constants(side))
