"""Fixed formula corpus and seeded generators used by the acceptance battery."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

from .formula import Formula, FormulaClass, classify, parse
from .translate import TranslationEnv


@dataclass(frozen=True)
class CorpusEntry:
    text: str
    nums: Mapping[str, int] = field(default_factory=dict)
    strs: Mapping[str, int] = field(default_factory=dict)

    @property
    def formula(self) -> Formula:
        return parse(self.text)

    def env(self) -> TranslationEnv:
        return TranslationEnv.make(self.nums, self.strs)


def _e(text, strs, **nums):
    return CorpusEntry(text, nums, strs)


SIGMA_B0_CORPUS: Tuple[CorpusEntry, ...] = (
    _e("X(0)", {"X": 3}),
    _e("X(0) & X(1)", {"X": 2}),
    _e("!X(2) | X(0)", {"X": 3}),
    _e("X(5)", {"X": 3}),
    _e("E x < 3 . X(x)", {"X": 3}),
    _e("A x < 4 . X(x)", {"X": 4}),
    _e("A x < |X| . (X(x) -> Y(x))", {"X": 3, "Y": 3}),
    _e("E x < |X| . (X(x) & !Y(x))", {"X": 4, "Y": 4}),
    _e("A x < |X| . (X(x) <-> Y(x))", {"X": 4, "Y": 4}),
    _e("|X| = 4", {"X": 4}),
    _e("|X| < |Y|", {"X": 2, "Y": 5}),
    _e("2 + 2 = 4", {}),
    _e("3 * 2 <= 5", {}),
    _e("A x < 6 . (x < |X| -> (X(x) | !X(x)))", {"X": 6}),
    _e("E x < 5 . E y < 5 . (x < y & X(x) & X(y))", {"X": 5}),
    _e("A x < 5 . A y < 5 . ((x < y & X(y)) -> X(x))", {"X": 5}),
    _e("E x < 4 . (X(x) & A y < x . !X(y))", {"X": 4}),
    _e("A x < 3 . (X(x) -> X(x+1))", {"X": 4}),
    _e("X(k) & !X(k+1)", {"X": 5}, k=2),
    _e("A x < k . X(x)", {"X": 6}, k=3),
    _e("E x < k . (X(x) & Y(x))", {"X": 4, "Y": 4}, k=4),
    _e("A x < 3 . (X(2*x) <-> X(2*x+1))", {"X": 6}),
    _e("E x < 6 . E y < 6 . (x + y = 5 & X(x) & X(y))", {"X": 6}),
    _e("!(E x < 4 . (X(x) & Y(x)))", {"X": 4, "Y": 4}),
    _e("(A x < 3 . X(x)) -> (E y < 3 . X(y))", {"X": 3}),
    _e("A x < 4 . (Y(x) <-> (X(x) & Z(x)))", {"X": 4, "Y": 4, "Z": 4}),
    _e("E x < 3 . A y < 3 . (X(x) | Y(y))", {"X": 3, "Y": 3}),
    _e("A x < 6 . (X(x) -> x < 3)", {"X": 6}),
    _e("E x < |Y| . (Y(x) & x = k)", {"Y": 5}, k=3),
    _e("X(0) <-> !Y(0)", {"X": 1, "Y": 1}),
    _e("A x < 2 . A y < 2 . (X(x*2+y) -> Y(y*2+x))", {"X": 4, "Y": 4}),
    _e("(X(0) | X(1)) & (!X(0) | !X(1))", {"X": 2}),
    _e("E x < 6 . (X(x) & E y < x . (X(y) & E z < y . X(z)))", {"X": 6}),
    _e("A x < |X| . (x + 1 < |X| -> (X(x) -> X(x+1)))", {"X": 5}),
)


@dataclass(frozen=True)
class InductionEntry:
    """E Z < t . matrix(x, X, Z), induced on x up to a."""

    text: str
    x_length: int
    t: int = 2


INDUCTION_CORPUS: Tuple[InductionEntry, ...] = (
    InductionEntry("Z(0) <-> X(x)", 4),
    InductionEntry("Z(0) & X(x)", 4),
    InductionEntry("A y < x + 1 . X(y)", 5),
    InductionEntry("A y < x . (X(y) -> Z(0))", 3),
    InductionEntry("x < |Z| + 2 & (E y < x + 1 . X(y))", 4, 3),
    InductionEntry("!X(x) & (Z(0) | !Z(0))", 6),
    InductionEntry("(Z(0) <-> X(x)) & (Z(1) <-> X(x+1))", 4, 3),
    InductionEntry("x < 3", 2),
)


def check_corpus() -> List[str]:
    """Entries that are not Sigma^B_0 or exceed bound 6 (expected empty)."""
    bad = []
    for e in SIGMA_B0_CORPUS:
        if classify(e.formula) is not FormulaClass.SigmaB0 or any(v > 6 for v in e.strs.values()):
            bad.append(e.text)
    return bad


def random_formula(rng: random.Random, strs: Mapping[str, int], depth: int = 3,
                   bound: int = 4) -> str:
    """Seeded random Sigma^B_0 formula text over the given strings and a bound."""
    names = sorted(strs)
    counter = [0]

    def index(scope):
        if scope and rng.random() < 0.7:
            v = rng.choice(scope)
            return v if rng.random() < 0.7 else f"{v}+1"
        return str(rng.randrange(bound + 1))

    def gen(d, scope):
        r = rng.random()
        if d == 0 or r < 0.25:
            if scope and rng.random() < 0.15:
                return f"{rng.choice(scope)} < {index(scope)}"
            return f"{rng.choice(names)}({index(scope)})"
        if r < 0.4:
            return f"!({gen(d - 1, scope)})"
        if r < 0.75:
            op = rng.choice(["&", "|", "->", "<->"])
            return f"({gen(d - 1, scope)}) {op} ({gen(d - 1, scope)})"
        counter[0] += 1
        v = f"v{counter[0]}"
        q = rng.choice("AE")
        return f"{q} {v} < {rng.randint(1, bound)} . ({gen(d - 1, scope + [v])})"

    return gen(depth, [])
