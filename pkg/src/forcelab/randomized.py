"""Randomized circuits, threshold evaluation and the dWPHP counting experiments.

A randomized circuit is a plain outer circuit some of whose nodes are marked
as blocks ``R z C(p, z)``.  A block is evaluated by counting the random
assignments Z in 2^m that make it true; counts are exact.
"""
from __future__ import annotations

import enum
import itertools
import random
from dataclasses import asdict, dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from . import circuits as cc
from .circuits import AlgebraElement, Circuit, RVAR, TruthTable
from .config import LIMITS
from .errors import ArityError, BudgetExceeded, ScaleError, UnresolvedError
from .proofs import PremiseSet
from .translate import CircuitFamily


class TriBool(enum.Enum):
    ZERO = 0
    ONE = 1
    UNDEFINED = "undefined"

    def __str__(self):
        return str(self.value)


def threshold(count: int, m: int) -> TriBool:
    """1 at count >= 3/4 * 2^m, 0 at count <= 1/4 * 2^m, undefined in between."""
    total = 1 << m
    if 4 * count >= 3 * total:
        return TriBool.ONE
    if 4 * count <= total:
        return TriBool.ZERO
    return TriBool.UNDEFINED


def _outer_nodes(output: int, blocks: FrozenSet[int]) -> List[int]:
    """Nodes reachable from the output without entering a block."""
    seen, stack = set(), [output]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if node not in blocks:
            stack.extend(cc.children(node))
    return sorted(seen)


@dataclass(frozen=True)
class RandCircuit:
    circuit: Circuit
    blocks: FrozenSet[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "blocks", frozenset(self.blocks))
        reach = set(cc.reachable(self.circuit.output))
        for b in self.blocks:
            if b not in reach:
                raise ValueError(f"block node {b} is not part of the circuit")
            if any(inner in self.blocks for inner in cc.reachable(b) if inner != b):
                raise ValueError("blocks may not be nested")
        for node in _outer_nodes(self.circuit.output, self.blocks):
            if node not in self.blocks and cc.gate(node)[0] == RVAR:
                raise ValueError("random variable outside every block")

    @property
    def n(self) -> int:
        return self.circuit.num_input_vars

    @property
    def m(self) -> int:
        return self.circuit.num_rand_vars

    @classmethod
    def plain(cls, c: Circuit) -> "RandCircuit":
        return cls(c, frozenset())

    @classmethod
    def block(cls, node: int, n: int, m: int) -> "RandCircuit":
        """The single block ``R z node``."""
        return cls(Circuit(node, n, m), frozenset({node}))

    @classmethod
    def from_file(cls, cf: cc.CircuitFile, index: int = 0) -> "RandCircuit":
        return cls(cf.circuit(index), frozenset(cf.blocks))

    def dumps(self) -> str:
        return cc.dump_nodes([self.circuit.output], self.n, self.m, sorted(self.blocks))[0]


def _check_budget(m: int):
    if m > LIMITS.max_n:
        raise ScaleError(f"2^{m} random assignments exceed desk scale")
    if 1 << m > LIMITS.max_expansion:
        raise BudgetExceeded(f"2^{m} random assignments exceed the budget")


def block_count(node: int, n: int, m: int, a: Sequence[int]) -> int:
    """Exact number of Z in 2^m with the block true at input a."""
    table = cc.node_table(node, n, m)
    shift = cc.assignment_index(a) << m
    return bin((table >> shift) & ((1 << (1 << m)) - 1)).count("1")


def eval_R(c: RandCircuit, a: Sequence[int]) -> TriBool:
    if len(a) != c.n:
        raise ArityError(f"assignment has {len(a)} bits, circuit expects {c.n}")
    _check_budget(c.m)
    val: Dict[int, int] = {}
    for node in _outer_nodes(c.circuit.output, c.blocks):
        if node in c.blocks:
            v = threshold(block_count(node, c.n, c.m, a), c.m)
            if v is TriBool.UNDEFINED:
                return v
            val[node] = v.value
            continue
        kind, x, y = cc.gate(node)
        if kind == cc.VAR:
            val[node] = 1 if a[x] else 0
        elif kind == cc.CONST:
            val[node] = x
        elif kind == cc.NOT:
            val[node] = 1 - val[x]
        elif kind == cc.AND:
            val[node] = val[x] & val[y]
        else:
            val[node] = val[x] | val[y]
    return TriBool(val[c.circuit.output])


def is_resolved(c: RandCircuit) -> bool:
    return all(eval_R(c, a) is not TriBool.UNDEFINED for a in cc.all_assignments(c.n))


def resolved_table(c: RandCircuit) -> TruthTable:
    """Canonical form in the resolved fragment; raises on the first gap."""
    cc.check_scale(c.n)
    bits = 0
    for idx, a in enumerate(cc.all_assignments(c.n)):
        v = eval_R(c, a)
        if v is TriBool.UNDEFINED:
            raise UnresolvedError(a)
        if v is TriBool.ONE:
            bits |= 1 << idx
    return TruthTable(c.n, bits)


def resolved_element(c: RandCircuit) -> AlgebraElement:
    t = resolved_table(c)
    return AlgebraElement(t.n, t.bits)


def leq_R(c: RandCircuit, c2: RandCircuit, n: Optional[int] = None) -> bool:
    n = c.n if n is None else n
    if c.n != n or c2.n != n:
        raise ArityError("leq_R compares circuits over the same inputs")
    return cc.leq_A(resolved_element(c), resolved_element(c2))


def eq_R(c: RandCircuit, c2: RandCircuit) -> bool:
    return resolved_table(c) == resolved_table(c2)


# -- dWPHP --------------------------------------------------------------------

@dataclass(frozen=True)
class DWPHPInstance:
    """F: 2^a -> 2^{2a} given by 2a bit circuits over a inputs."""

    a: int
    family: CircuitFamily
    name: str = "F"

    def __post_init__(self):
        if self.a < 2:
            raise ValueError("dWPHP experiments need a >= 2")
        if self.a > 5:
            raise ScaleError("a > 5 exceeds the 2^{3a} pair enumeration")
        if self.family.arity != self.a or self.family.bound_term != 2 * self.a:
            raise ArityError(f"family must map {self.a} bits to {2 * self.a} bits")

    def apply(self, x: Sequence[int]) -> str:
        return self.family.evaluate(x)

    def range(self) -> FrozenSet[str]:
        return frozenset(self.apply(x) for x in cc.all_assignments(self.a))


def family_from_function(a: int, f: Dict[Tuple[int, ...], str]) -> CircuitFamily:
    """Bit circuits built by Shannon expansion from a concrete table."""
    tables = [0] * (2 * a)
    for idx, x in enumerate(cc.all_assignments(a)):
        for i, bit in enumerate(f[x]):
            if bit == "1":
                tables[i] |= 1 << idx
    circuits = tuple(Circuit(cc.table_to_node(a, t), a) for t in tables)
    return CircuitFamily(circuits, 2 * a, (("X", a),))


def make_instance(a: int, kind: str = "random", seed: int = 0) -> DWPHPInstance:
    """Seeded families: ``random``, ``injective`` (X -> XX) or ``constant``."""
    rng = random.Random(seed)
    xs = list(cc.all_assignments(a))
    if kind == "random":
        f = {x: "".join(rng.choice("01") for _ in range(2 * a)) for x in xs}
    elif kind == "injective":
        f = {x: "".join(map(str, x)) * 2 for x in xs}
    elif kind == "constant":
        y = "".join(rng.choice("01") for _ in range(2 * a))
        f = {x: y for x in xs}
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    return DWPHPInstance(a, family_from_function(a, f), kind)


@dataclass(frozen=True)
class RangeReport:
    a: int
    family: str
    range_size: int
    p_prime: int
    identity_value: int
    identity_holds: bool
    bound: int
    bound_holds: bool
    fraction: float
    tight: bool
    m: int
    p_of_A: int
    p_of_A_bound: float
    p_of_A_holds: bool
    block_resolved_one: bool

    @property
    def passed(self) -> bool:
        return (self.identity_holds and self.bound_holds and self.p_of_A_holds
                and self.block_resolved_one)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d


def count_p_prime(inst: DWPHPInstance) -> int:
    """|{(b, c) in 2^{2a} x 2^a : b outside range(F)}| by enumerating every pair."""
    image = inst.range()
    count = 0
    for b in itertools.product("01", repeat=2 * inst.a):
        outside = "".join(b) not in image
        for _ in range(1 << inst.a):
            count += outside
    return count


def range_block(inst: DWPHPInstance) -> RandCircuit:
    """R z (z differs from F(X) for every X), with z of length 2a and no inputs."""
    z = [cc.RVar(i) for i in range(2 * inst.a)]
    parts = []
    for x in cc.all_assignments(inst.a):
        y = inst.apply(x)
        parts.append(cc.big_or(cc.Not(z[i]) if y[i] == "1" else z[i] for i in range(2 * inst.a)))
    node = cc.big_and(parts)
    return RandCircuit.block(node, 0, 2 * inst.a)


def dwphp_range_experiment(inst: DWPHPInstance, m: int = 2) -> RangeReport:
    a = inst.a
    rng_size = len(inst.range())
    p_prime = count_p_prime(inst)
    identity = 2 ** (3 * a) - 2 ** a * rng_size
    bound = 2 ** (3 * a) - 2 ** (2 * a)
    p_of_A = p_prime * 2 ** m
    p_bound = 0.75 * 2 ** (3 * a + m)
    block_value = eval_R(range_block(inst), ())
    return RangeReport(
        a=a, family=inst.name, range_size=rng_size, p_prime=p_prime,
        identity_value=identity, identity_holds=p_prime == identity,
        bound=bound, bound_holds=p_prime >= bound,
        fraction=p_prime / 2 ** (3 * a), tight=p_prime == bound,
        m=m, p_of_A=p_of_A, p_of_A_bound=p_bound, p_of_A_holds=p_of_A >= p_bound,
        block_resolved_one=block_value is TriBool.ONE,
    )


@dataclass(frozen=True)
class SurjectionResult:
    premises: Optional[PremiseSet]
    missing: Tuple[str, ...] = ()
    witnesses: Dict[str, Tuple[int, ...]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.premises is not None


def dwphp_surjection_set(m: int, n: int, C: Sequence[int], D: Sequence[int],
                         k: Optional[int] = None) -> SurjectionResult:
    """Check that x -> C(x) composed with D reaches every Y in 2^m.

    ``C`` holds m circuits reading x_0..x_{n-1} at variables 0..n-1; any other
    variable of C is free and shares the k-variable space of ``D`` (default
    k = m).  For each Y the conjunction of ``Y(i) <-> C_i(D)`` must be
    satisfiable.  Its least satisfying assignment w fixes X_Y = D(w) and the
    free variables of C, and S collects ``AND_i (Y(i) <-> C_i(X_Y))``.
    """
    if n >= m:
        raise ValueError(f"need n < m, got n={n}, m={m}")
    if len(C) != m or len(D) != n:
        raise ArityError(f"need {m} circuits C and {n} circuits D")
    k = m if k is None else k
    cc.check_scale(k)
    composed = [cc.substitute(c, dict(enumerate(D))) for c in C]
    tables = [cc.node_table(c, k) for c in composed]
    full = cc.full_mask(k)
    missing, witnesses, elements = [], {}, []
    for y in cc.all_assignments(m):
        key = "".join(map(str, y))
        sat = full
        for bit, t in zip(y, tables):
            sat &= t if bit else full ^ t
        if not sat:
            missing.append(key)
            continue
        w = cc.assignment_from_index((sat & -sat).bit_length() - 1, k)
        x = tuple(cc.eval_node(d, w) for d in D)
        witnesses[key] = w
        fixed = {v: cc.Const(b) for v, b in enumerate(w)}
        fixed.update((j, cc.Const(b)) for j, b in enumerate(x))
        node = cc.big_and(cc.iff(cc.Const(bit), cc.substitute(c, fixed)) for bit, c in zip(y, C))
        elem = AlgebraElement.from_node(node, k)
        if not elem.is_one():
            raise AssertionError(f"element for Y={key} is not a tautology")
        elements.append(elem)
    if missing:
        return SurjectionResult(None, tuple(missing), witnesses)
    return SurjectionResult(PremiseSet(tuple(elements), k, "S_dWPHP"), (), witnesses)


def fresh_variables(used: Sequence[int], count: int, floor: int = 0) -> Tuple[int, ...]:
    """``count`` variable indices above every used index and ``floor``."""
    start = max([floor - 1, *used], default=-1) + 1
    return tuple(range(start, start + count))
