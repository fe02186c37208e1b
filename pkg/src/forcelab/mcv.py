"""Monotone circuit value strings and binary-search witnessing.

Edge flags of an MCV instance are stored flat: E(y, x) lives at index x*a + y.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import circuits as cc
from .circuits import AlgebraElement, Circuit
from .config import LIMITS
from .errors import ArityError, BudgetExceeded, ClassError, FormatError, LabError, ScaleError
from .formula import Formula, FormulaClass, classify, eval_standard, parse
from .generic import GenericFilter, i_G
from .translate import BString, TranslationEnv, bool_value, substitute_element

DELTA_MCV = parse(
    "!Y(0) & Y(1) & (A x < a . (2 <= x -> (Y(x) <-> "
    "((C(x) & (A y < x . (E(x*a+y) -> Y(y)))) | (!C(x) & (E y < x . (E(x*a+y) & Y(y))))))))"
)


def edge_index(y: int, x: int, a: int) -> int:
    return x * a + y


@dataclass(frozen=True)
class MCVInstance:
    a: int
    C: BString
    E: BString

    def __post_init__(self):
        if self.a < 2:
            raise ArityError("an MCV instance needs a >= 2 gates")
        if self.C.length != self.a or self.E.length != self.a * self.a:
            raise ArityError(f"need |C| = {self.a} and |E| = {self.a * self.a}")
        if self.C.n != self.E.n:
            raise ArityError("C and E live over different algebras")

    @property
    def n(self) -> int:
        return self.C.n

    def edge(self, y: int, x: int) -> AlgebraElement:
        return self.E.entries[edge_index(y, x, self.a)]

    def decode(self, G: GenericFilter) -> Tuple[str, str]:
        return i_G(self.C, G), i_G(self.E, G)


def build_mcv_Y(inst: MCVInstance) -> BString:
    n = inst.n
    Y = [cc.zero(n), cc.one(n)]
    for x in range(2, inst.a):
        all_inputs = cc.meet_all((cc.implication(inst.edge(y, x), Y[y]) for y in range(x)), n)
        any_input = cc.join_all((cc.meet(inst.edge(y, x), Y[y]) for y in range(x)), n)
        c = inst.C.entries[x]
        Y.append(cc.join(cc.meet(c, all_inputs), cc.meet(cc.complement(c), any_input)))
    return BString(n, tuple(Y))


def cvp_simulate(a: int, gates: str, edges: str) -> str:
    """Gate values of a concrete instance: gate 0 false, gate 1 true, then AND/OR."""
    val = [0, 1]
    for x in range(2, a):
        inputs = [val[y] for y in range(x) if edges[edge_index(y, x, a)] == "1"]
        val.append(int(all(inputs)) if gates[x] == "1" else int(any(inputs)))
    return "".join(map(str, val[:a]))


def mcv_env(a: int) -> TranslationEnv:
    return TranslationEnv.make({"a": a}, {"C": a, "E": a * a, "Y": a}, ["C", "E", "Y"])


def check_delta_mcv(inst: MCVInstance, Y: BString) -> AlgebraElement:
    if Y.length != inst.a:
        raise ArityError(f"|Y| = {Y.length} but a = {inst.a}")
    return bool_value(DELTA_MCV, mcv_env(inst.a), {"C": inst.C, "E": inst.E, "Y": Y})


def random_element(rng: random.Random, n: int, density: float = 0.5) -> AlgebraElement:
    """Seeded random element given by a random-gate circuit (never a bare table)."""
    leaves = [cc.Var(k) for k in range(n)] + [cc.TRUE, cc.FALSE]
    pool = list(leaves)
    for _ in range(rng.randint(0, 4)):
        op = rng.random()
        a, b = rng.choice(pool), rng.choice(pool)
        pool.append(cc.Not(a) if op < 0.2 else cc.And(a, b) if op < 0.6 else cc.Or(a, b))
    node = pool[-1]
    if n and rng.random() < density * 0.4:
        node = cc.Or(node, cc.Var(rng.randrange(n)))
    return AlgebraElement.from_node(node, n)


def random_instance(rng: random.Random, a: int, n: int) -> MCVInstance:
    C = BString(n, tuple(random_element(rng, n) for _ in range(a)))
    E = BString(n, tuple(random_element(rng, n) for _ in range(a * a)))
    return MCVInstance(a, C, E)


def parse_mcv_file(text: str) -> MCVInstance:
    """``mcv a=<a> n=<n>`` header, then blocks ``C <x>`` / ``E <y> <x>`` each
    followed by circuit-format lines up to ``END``.  Missing entries are 0."""
    lines = [ln.split("#", 1)[0].rstrip() for ln in text.splitlines()]
    it = iter(enumerate(lines, 1))
    a = n = None
    for lineno, line in it:
        if not line.strip():
            continue
        parts = line.split()
        if parts[0] != "mcv":
            raise FormatError("expected 'mcv a=<a> n=<n>' header", lineno)
        try:
            opts = dict(p.split("=", 1) for p in parts[1:])
            a, n = int(opts["a"]), int(opts["n"])
        except (KeyError, ValueError):
            raise FormatError("header needs a=<a> and n=<n>", lineno) from None
        break
    if a is None:
        raise FormatError("empty MCV file")
    C = [cc.zero(n) for _ in range(a)]
    E = [cc.zero(n) for _ in range(a * a)]
    for lineno, line in it:
        if not line.strip():
            continue
        parts = line.split()
        body = []
        for _, inner in it:
            if inner.strip() == "END":
                break
            body.append(inner)
        else:
            raise FormatError("entry without END", lineno)
        elem = AlgebraElement.from_circuit(cc.loads("\n".join(body)), n)
        if parts[0] == "C" and len(parts) == 2:
            C[int(parts[1])] = elem
        elif parts[0] == "E" and len(parts) == 3:
            E[edge_index(int(parts[1]), int(parts[2]), a)] = elem
        else:
            raise FormatError("entry header must be 'C <x>' or 'E <y> <x>'", lineno)
    return MCVInstance(a, BString(n, tuple(C)), BString(n, tuple(E)))


def dump_mcv_file(inst: MCVInstance) -> str:
    out = [f"mcv a={inst.a} n={inst.n}"]
    for x, e in enumerate(inst.C.entries):
        out.append(f"C {x}")
        out.append(cc.dumps(e.witness).rstrip())
        out.append("END")
    for x in range(inst.a):
        for y in range(inst.a):
            e = inst.edge(y, x)
            if e.is_zero():
                continue
            out.append(f"E {y} {x}")
            out.append(cc.dumps(e.witness).rstrip())
            out.append("END")
    return "\n".join(out) + "\n"


# -- witnessing ---------------------------------------------------------------

@dataclass(frozen=True)
class WitnessProblem:
    """E Z < t . matrix(x, X, Z) at a fixed number argument x."""

    matrix: Formula
    t: int
    x: int = 0
    xvar: str = "x"
    Xvar: str = "X"
    Zvar: str = "Z"
    numenv: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if classify(self.matrix) is not FormulaClass.SigmaB0:
            raise ClassError("the witnessed matrix must be Sigma^B_0")
        if self.t > LIMITS.max_n:
            raise ScaleError(f"t = {self.t} exceeds {LIMITS.max_n}")

    def at(self, x: int) -> "WitnessProblem":
        return WitnessProblem(self.matrix, self.t, x, self.xvar, self.Xvar, self.Zvar,
                              self.numenv)

    def holds(self, X: str, Z: str) -> bool:
        nums = dict(self.numenv)
        nums[self.xvar] = self.x
        return eval_standard(self.matrix, nums, {self.Xvar: X, self.Zvar: Z})


def _subtree_has_witness(p: WitnessProblem, X: str, length: int, prefix: str) -> bool:
    free = length - len(prefix)
    for rest in itertools.product("01", repeat=free):
        if p.holds(X, prefix + "".join(rest)):
            return True
    return False


def binary_search_witness(p: WitnessProblem, X: str) -> Optional[str]:
    """Least witness (shorter first, then lexicographic) or None.

    Each bit is fixed by asking an exhaustive oracle whether the 0-subtree
    below the current prefix still contains a witness.
    """
    for length in range(p.t):
        if not _subtree_has_witness(p, X, length, ""):
            continue
        prefix = ""
        while len(prefix) < length:
            prefix += "0" if _subtree_has_witness(p, X, length, prefix + "0") else "1"
        return prefix
    return None


@dataclass(frozen=True)
class WitnessFamily:
    """Circuits over X's bits describing F(x, X) for one fixed x.

    ``length_circuits[l]`` flags a witness of length l (index t flags none);
    ``bit_circuits[i]`` gives bit i of the witness (0 past its length).
    """

    t: int
    x_length: int
    bit_circuits: Tuple[Circuit, ...]
    length_circuits: Tuple[Circuit, ...]

    def apply(self, X: BString) -> Tuple[List[AlgebraElement], List[AlgebraElement]]:
        if X.length != self.x_length:
            raise ArityError(f"family built for |X| = {self.x_length}, got {X.length}")
        entries = dict(enumerate(X.entries))
        bits = [substitute_element(c.output, entries, X.n) for c in self.bit_circuits]
        lengths = [substitute_element(c.output, entries, X.n) for c in self.length_circuits]
        return bits, lengths


def build_witness_family(p: WitnessProblem, x_length: int) -> WitnessFamily:
    """Tabulate the binary-search witness over every concrete X of the given length."""
    if x_length > LIMITS.max_n:
        raise ScaleError(f"|X| = {x_length} exceeds {LIMITS.max_n}")
    t = p.t
    bit_tables = [0] * max(t - 1, 0)
    length_tables = [0] * (t + 1)
    for idx in range(1 << x_length):
        X = "".join(map(str, cc.assignment_from_index(idx, x_length)))
        Z = binary_search_witness(p, X)
        if Z is None:
            length_tables[t] |= 1 << idx
            continue
        length_tables[len(Z)] |= 1 << idx
        for i, bit in enumerate(Z):
            if bit == "1":
                bit_tables[i] |= 1 << idx

    def circ(bits):
        return Circuit(cc.table_to_node(x_length, bits), x_length)

    return WitnessFamily(t, x_length, tuple(map(circ, bit_tables)), tuple(map(circ, length_tables)))


def comp_Y_element(p: WitnessProblem, X: BString, family: WitnessFamily) -> AlgebraElement:
    """Boolean value of phi at the family's witness where the family finds one, else 0."""
    bits, lengths = family.apply(X)
    n = X.n
    result = cc.zero(n)
    nums = dict(p.numenv)
    nums[p.xvar] = p.x
    for length in range(p.t):
        if lengths[length].is_zero():
            continue
        env = TranslationEnv.make(nums, {p.Xvar: X.length, p.Zvar: length})
        Z = BString(n, tuple(bits[:length]))
        value = bool_value(p.matrix, env, {p.Xvar: X, p.Zvar: Z}, n=n)
        result = cc.join(result, cc.meet(lengths[length], value))
    return result


def comprehension_string(p: WitnessProblem, X: BString, a: int) -> BString:
    """Y with Y(x) = comp_Y_element at x, for every x < a."""
    entries = []
    for x in range(a):
        px = p.at(x)
        entries.append(comp_Y_element(px, X, build_witness_family(px, X.length)))
    return BString(X.n, tuple(entries))
