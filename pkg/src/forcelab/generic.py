"""Ideals, filters, dense sets and generic filters of the finite algebra.

In the algebra of tables over n variables every complete ideal is principal,
and a point filter at an atom outside an ideal I meets every set that is
dense over I: density below the atom e_A forces e_A itself into the set.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import circuits as cc
from .circuits import AlgebraElement
from .errors import ArityError, BudgetExceeded, InconsistentSetError, LabError, ScaleError
from .formula import Formula, FormulaClass, classify, eval_standard, strings_below, to_text
from .translate import BString, TranslationEnv, bool_value

EXHAUSTIVE_MAX_N = 4


@dataclass(frozen=True)
class Ideal:
    """The principal ideal {X : X <= generator}."""

    generator: AlgebraElement

    def __post_init__(self):
        if self.generator.is_one():
            raise LabError("an ideal cannot contain the one element")

    @property
    def n(self) -> int:
        return self.generator.n

    def __contains__(self, x: AlgebraElement) -> bool:
        return cc.leq_A(x, self.generator)


@dataclass(frozen=True)
class Filter:
    """The principal filter {X : generator <= X}."""

    generator: AlgebraElement

    def __post_init__(self):
        if self.generator.is_zero():
            raise LabError("a filter cannot contain the zero element")

    @property
    def n(self) -> int:
        return self.generator.n

    def __contains__(self, x: AlgebraElement) -> bool:
        return cc.leq_A(self.generator, x)


def zero_ideal(n: int) -> Ideal:
    return Ideal(cc.zero(n))


@dataclass(frozen=True)
class DenseSet:
    name: str
    member: Callable[[AlgebraElement], bool]
    description: str = ""

    def __contains__(self, x: AlgebraElement) -> bool:
        return bool(self.member(x))


def below(x0: AlgebraElement, name: Optional[str] = None) -> DenseSet:
    """The set {Z : Z <= x0}."""
    return DenseSet(name or "below", lambda z: cc.leq_A(z, x0), f"Z <= {x0.table}")


def definable(phi: Formula, var: str = "X", name: Optional[str] = None) -> DenseSet:
    """{X : phi(X)}, with X presented to ``phi`` as its truth-table string."""
    def member(x: AlgebraElement) -> bool:
        return eval_standard(phi, {}, {var: str(x.table)})
    return DenseSet(name or to_text(phi), member, to_text(phi))


@dataclass(frozen=True)
class GenericFilter:
    """The ultrafilter generated by the atom of one assignment."""

    atom_assignment: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "atom_assignment", tuple(int(b) for b in self.atom_assignment))

    @property
    def n(self) -> int:
        return len(self.atom_assignment)

    @property
    def atom(self) -> AlgebraElement:
        return cc.atom(self.n, self.atom_assignment)

    def __contains__(self, x: AlgebraElement) -> bool:
        if x.n != self.n:
            raise ArityError(f"element over n={x.n}, filter over n={self.n}")
        return bool(x.value_at(self.atom_assignment))


@dataclass(frozen=True)
class DensityVerdict:
    dense: Optional[bool]
    witness: Optional[AlgebraElement] = None
    exhaustive: bool = True

    def __bool__(self):
        return bool(self.dense)


def all_elements(n: int) -> Iterable[AlgebraElement]:
    if n > EXHAUSTIVE_MAX_N:
        raise ScaleError(f"exhaustive enumeration needs n <= {EXHAUSTIVE_MAX_N}")
    for bits in range(1 << (1 << n)):
        yield AlgebraElement(n, bits)


def _upward_closure(marks: np.ndarray, width: int) -> np.ndarray:
    """For a boolean array over subsets of ``width`` points, mark all supersets."""
    up = marks.copy()
    for j in range(width):
        shaped = up.reshape(-1, 2, 1 << j)
        shaped[:, 1, :] |= shaped[:, 0, :]
    return up


def is_dense(D: DenseSet, I: Ideal, mode: str = "exhaustive", samples: int = 2000,
             seed: int = 0) -> DensityVerdict:
    """Every X outside I has some X' in D outside I with X' <= X."""
    n = I.n
    if mode == "exhaustive":
        if n > EXHAUSTIVE_MAX_N:
            raise ScaleError(f"exhaustive density check needs n <= {EXHAUSTIVE_MAX_N}")
        size = 1 << (1 << n)
        gen = I.generator.bits
        candidates = np.zeros(size, dtype=bool)
        outside = np.zeros(size, dtype=bool)
        for x in all_elements(n):
            out = x.bits & ~gen != 0
            outside[x.bits] = out
            candidates[x.bits] = out and x in D
        reach = _upward_closure(candidates, 1 << n)
        bad = np.flatnonzero(outside & ~reach)
        if bad.size:
            return DensityVerdict(False, AlgebraElement(n, int(bad[0])))
        return DensityVerdict(True)
    if mode != "sampled":
        raise ValueError(f"unknown density mode {mode!r}")
    rng = random.Random(seed)
    mask = cc.full_mask(n)
    for _ in range(samples):
        x = AlgebraElement(n, rng.getrandbits(1 << n) & mask)
        if x in I:
            continue
        options = [x] + [a for a in _atoms_below(x) if a not in I]
        options += [AlgebraElement(n, x.bits & rng.getrandbits(1 << n)) for _ in range(8)]
        if not any(o in D and o not in I for o in options):
            return DensityVerdict(None, x, exhaustive=False)
    return DensityVerdict(True, exhaustive=False)


def _atoms_below(x: AlgebraElement) -> List[AlgebraElement]:
    out = []
    bits, idx = x.bits, 0
    while bits:
        if bits & 1:
            out.append(cc.atom(x.n, cc.assignment_from_index(idx, x.n)))
        bits >>= 1
        idx += 1
    return out


def admissible_atoms(I: Ideal, seed: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Assignments whose atoms lie outside I, in seeded order (index order if None)."""
    n = I.n
    order = list(range(1 << n))
    if seed is not None:
        random.Random(seed).shuffle(order)
    return [cc.assignment_from_index(i, n) for i in order if not (I.generator.bits >> i) & 1]


def build_generic(I: Ideal, dense: Sequence[DenseSet] = (), seed: int = 0) -> GenericFilter:
    """Point filter at the first admissible atom in the seeded order."""
    choices = admissible_atoms(I, seed)
    if not choices:
        raise LabError("no atom lies outside the ideal")
    G = GenericFilter(choices[0])
    e = G.atom
    for D in dense:
        if e not in D:
            raise LabError(f"{D.name}: generic filter misses D \\ I; is it dense over I?")
    return G


def meets(G: GenericFilter, D: DenseSet, I: Ideal) -> bool:
    """(D \\ I) intersected with G is non-empty (exhaustive, n <= 4)."""
    return any(x in G and x not in I and x in D for x in all_elements(G.n))


def rasiowa_sikorski(I: Ideal, dense: Sequence[DenseSet], seed: int = 0
                     ) -> Tuple[GenericFilter, List[AlgebraElement]]:
    """Descend d_0 >= d_1 >= ... through the listed dense sets, then to an atom.

    Needs n <= 4: each step searches the elements below the current one.
    """
    n = I.n
    if n > EXHAUSTIVE_MAX_N:
        raise ScaleError(f"descent search needs n <= {EXHAUSTIVE_MAX_N}")
    rng = random.Random(seed)
    current = cc.one(n)
    chain = [current]
    for D in dense:
        below_current = [x for x in _sub_elements(current) if x not in I and x in D]
        if not below_current:
            raise LabError(f"{D.name} has no element below {current.table} outside I")
        current = below_current[rng.randrange(len(below_current))]
        chain.append(current)
    candidates = [a for a in _atoms_below(current) if a not in I]
    final = candidates[rng.randrange(len(candidates))]
    idx = final.bits.bit_length() - 1
    return GenericFilter(cc.assignment_from_index(idx, n)), chain


def _sub_elements(x: AlgebraElement) -> Iterable[AlgebraElement]:
    sub = x.bits
    while True:
        yield AlgebraElement(x.n, sub)
        if sub == 0:
            return
        sub = (sub - 1) & x.bits


def i_G(X: BString, G: GenericFilter) -> str:
    if X.n != G.n:
        raise ArityError(f"string over n={X.n}, filter over n={G.n}")
    return "".join("1" if e in G else "0" for e in X.entries)


@dataclass
class GenericStructure:
    strings: Dict[str, str] = field(default_factory=dict)

    def __getitem__(self, name):
        return self.strings[name]


def realize(M: Mapping[str, BString], G: GenericFilter) -> GenericStructure:
    return GenericStructure({name: i_G(X, G) for name, X in M.items()})


@dataclass(frozen=True)
class ForcingVerdict:
    formula: str
    bounds: Dict[str, int]
    assignment: Tuple[int, ...]
    lhs: bool
    rhs: bool

    @property
    def agree(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self):
        return {"formula": self.formula, "bounds": dict(sorted(self.bounds.items())),
                "assignment": "".join(map(str, self.assignment)),
                "lhs": self.lhs, "rhs": self.rhs, "agree": self.agree}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def forcing_check(phi: Formula, env: TranslationEnv, args: Mapping[str, BString],
                  G: GenericFilter, value: Optional[AlgebraElement] = None) -> ForcingVerdict:
    """Compare truth in the realised structure with membership of the Boolean value.

    ``value`` may carry a precomputed Boolean value to share across filters.
    """
    structure = realize(args, G)
    lhs = eval_standard(phi, env.num_values, structure.strings)
    if value is None:
        value = bool_value(phi, env, args, n=G.n)
    rhs = value in G
    bounds = dict(env.num_values)
    bounds.update(env.str_bounds)
    return ForcingVerdict(to_text(phi), bounds, G.atom_assignment, lhs, rhs)


def consistent_set_to_ideal(T: Sequence[AlgebraElement], n: Optional[int] = None) -> Ideal:
    """Principal ideal generated by the complement of the meet of T.

    Every atom filter outside it contains each member of T.
    """
    T = list(T)
    if n is None:
        if not T:
            raise ArityError("cannot infer n from an empty set")
        n = T[0].n
    total = cc.meet_all(T, n)
    if total.is_zero():
        raise InconsistentSetError("the meet of T is zero")
    return Ideal(cc.complement(total))


def ideal_law_failures(I: Ideal) -> List[str]:
    """Exhaustively test the ideal laws (n <= 3 keeps pair loops small)."""
    n = I.n
    if n > 3:
        raise ScaleError("ideal laws are checked exhaustively only for n <= 3")
    elems = list(all_elements(n))
    members = [x for x in elems if x in I]
    failures = []
    if cc.zero(n) not in I:
        failures.append("0 not in I")
    if cc.one(n) in I:
        failures.append("1 in I")
    for x in members:
        for y in members:
            if cc.join(x, y) not in I:
                failures.append(f"join {x.table} v {y.table} escapes I")
        for y in elems:
            if cc.leq_A(y, x) and y not in I:
                failures.append(f"{y.table} <= {x.table} but not in I")
    # joins of indexed families: the join of all members must stay inside
    if cc.join_all(members, n) not in I:
        failures.append("join of the whole ideal escapes I")
    return failures


@dataclass(frozen=True)
class Trichotomy:
    cases: Tuple[str, ...]
    boundary: Optional[int] = None
    witness: Optional[str] = None

    @property
    def case(self) -> str:
        return self.cases[0]


def psi_holds(phi: Formula, xvar: str, x: int, zvar: str, t: int,
              numenv: Mapping[str, int], strings: Mapping[str, str]) -> Optional[str]:
    """Least Z with |Z| < t making phi true at x, or None."""
    nums = dict(numenv)
    nums[xvar] = x
    strs = dict(strings)
    for z in strings_below(t):
        strs[zvar] = z
        if eval_standard(phi, nums, strs):
            return z
    return None


def ind_trichotomy_check(phi: Formula, a: int, args: Mapping[str, BString], G: GenericFilter,
                         xvar: str = "x", zvar: str = "Z", t: int = 2,
                         numenv: Optional[Mapping[str, int]] = None) -> Trichotomy:
    """Which induction clauses hold for psi(x) = E Z<t . phi in realize(args, G).

    (a) psi(0) fails; (b) psi(a) holds; (c) some x < a has psi(x) and not psi(x+1).
    """
    if classify(phi) is not FormulaClass.SigmaB0:
        raise LabError("the induction matrix must be Sigma^B_0")
    strings = realize(args, G).strings
    numenv = dict(numenv or {})
    values = [psi_holds(phi, xvar, x, zvar, t, numenv, strings) for x in range(a + 1)]
    cases = []
    boundary = witness = None
    if values[0] is None:
        cases.append("a")
    if values[a] is not None:
        cases.append("b")
        witness = values[a]
    for x in range(a):
        if values[x] is not None and values[x + 1] is None:
            cases.append("c")
            boundary = x
            witness = values[x] if witness is None else witness
            break
    if not cases:
        raise LabError("induction failed in a finite structure")
    return Trichotomy(tuple(cases), boundary, witness)


def forced_trichotomy(phi: Formula, a: int, args: Mapping[str, BString], G: GenericFilter,
                      xvar: str = "x", zvar: str = "Z", t: int = 2,
                      numenv: Optional[Mapping[str, int]] = None) -> Tuple[str, ...]:
    """The same clauses decided through Boolean values of constant witnesses Z."""
    numenv = dict(numenv or {})
    n = G.n
    str_bounds = {name: X.length for name, X in args.items()}

    def forced(x: int) -> bool:
        for z in strings_below(t):
            env = TranslationEnv.make({**numenv, xvar: x}, {**str_bounds, zvar: len(z)})
            full = dict(args)
            full[zvar] = BString.constant(z, n)
            if bool_value(phi, env, full, n=n) in G:
                return True
        return False

    holds = [forced(x) for x in range(a + 1)]
    cases = []
    if not holds[0]:
        cases.append("a")
    if holds[a]:
        cases.append("b")
    if any(holds[x] and not holds[x + 1] for x in range(a)):
        cases.append("c")
    return tuple(cases)
