"""Quick invariant checks on built-in fixtures, used by ``subshiftdim selftest``."""

from __future__ import annotations

import math
import random
from typing import Callable

import numpy as np

from .contractions import ContractionSystem
from .pressure import PressureFunction, dimension_bounds, word_sum_via_transfer
from .sofic import even_shift_graph, lemma51_sandwich
from .spectral import scc_decompose, spectral_radius
from .symbolic import (
    Alphabet,
    build_transition_matrix,
    enumerate_allowed_words,
    normalize_forbidden_set,
)

PHI = (1 + math.sqrt(5)) / 2
PLASTIC = 1.324717957244746


def golden_sft():
    return normalize_forbidden_set([(2, 2)], Alphabet(2))


def reducible_sft():
    return normalize_forbidden_set([(1, 1, 2), (2, 1, 1), (2, 2, 2)], Alphabet(2))


def _moran():
    for m, c in ((2, 0.5), (3, 0.5), (2, 1 / 3)):
        rep = dimension_bounds(normalize_forbidden_set([], Alphabet(m)), ContractionSystem.uniform(m, c))
        want = math.log(m) / -math.log(c)
        if abs(rep.h - want) > 1e-8 or abs(rep.H - want) > 1e-8:
            return False, f"m={m}, c={c}: got {rep.h}, want {want}"
    return True, "full shifts match the Moran equation"


def _golden():
    rep = dimension_bounds(golden_sft(), ContractionSystem.uniform(2, 1 / 3))
    want = math.log(PHI) / math.log(3)
    return abs(rep.h - want) <= 1e-6, f"h = {rep.h:.10f}, want {want:.10f}"


def _fixture_matrices():
    a1 = build_transition_matrix(golden_sft()).entries
    a2 = build_transition_matrix(reducible_sft()).entries
    ok = (np.array_equal(a1, [[1, 1], [1, 0]])
          and np.array_equal(a2, [[1, 0, 0, 0], [0, 0, 1, 1], [0, 1, 0, 0], [0, 0, 1, 0]]))
    return ok, "2x2 and 4x4 transition matrices"


def _reducible():
    rep = dimension_bounds(reducible_sft(), ContractionSystem.uniform(2, 0.5))
    want = math.log2(PLASTIC)
    comps = sorted(c.vertices for c in rep.per_component)
    ok = comps == [("11",), ("12", "21", "22")] and abs(rep.h - want) <= 1e-5
    return ok, f"components {comps}, h = {rep.h:.8f}"


def _sofic():
    g = even_shift_graph()
    rep = dimension_bounds(g, ContractionSystem.uniform(2, 0.5))
    sandwich = lemma51_sandwich(g, ContractionSystem.uniform(2, 0.5), 0, 3)
    ok = abs(rep.h - math.log2(PHI)) <= 1e-6 and sandwich == (4.0, 7.0, 8.0)
    return ok, f"h = {rep.h:.8f}, sandwich {sandwich}"


def _transfer():
    rng = random.Random(7)
    worst = 0.0
    for fs in (golden_sft(), reducible_sft()):
        a = build_transition_matrix(fs)
        cs = ContractionSystem.uniform(2, rng.uniform(0.2, 0.8))
        for t in (0.0, 0.5, 1.0):
            for n in range(fs.k, 11):
                brute = math.fsum(cs.word_weight(w, t) for w in enumerate_allowed_words(fs, n))
                worst = max(worst, abs(word_sum_via_transfer(a, cs, t, n) - brute) / brute)
    return worst <= 1e-12, f"max relative gap {worst:.2e}"


def _spectral():
    a = build_transition_matrix(reducible_sft()).entries
    ok = (abs(spectral_radius([[1, 1], [1, 0]]).radius - PHI) <= 1e-9
          and abs(spectral_radius(a).radius - PLASTIC) <= 1e-8
          and len(scc_decompose(a).components) == 2)
    return ok, "golden ratio and plastic number"


def _monotone():
    pf = PressureFunction(golden_sft(), ContractionSystem.uniform(2, 1 / 3))
    ts = np.linspace(0, 2, 9)
    values = [pf(t) for t in ts]
    return all(b < a for a, b in zip(values, values[1:])), "pressure strictly decreasing"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("moran-equation", _moran),
    ("golden-sft", _golden),
    ("transition-matrices", _fixture_matrices),
    ("reducible-components", _reducible),
    ("sofic-even-shift", _sofic),
    ("transfer-identity", _transfer),
    ("spectral-radius", _spectral),
    ("pressure-monotone", _monotone),
]


def run_selftest() -> list[tuple[str, bool, str]]:
    results = []
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is reported as a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
