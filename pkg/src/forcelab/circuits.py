"""Hash-consed Boolean circuits and the quotient algebra of truth tables.

Gates live in a single interning store; a node id is a plain ``int`` and two
structurally identical gates always receive the same id.  Children are
interned before their parents, so ascending id order is a topological order.

Truth tables are Python ints: bit ``i`` holds the value at the assignment whose
lexicographic index is ``i``, with variable 0 as the most significant position.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .config import LIMITS
from .errors import ArityError, FormatError, ScaleError, WrongKindError

VAR, RVAR, CONST, NOT, AND, OR = "VAR", "RVAR", "CONST", "NOT", "AND", "OR"
KINDS = (VAR, RVAR, CONST, NOT, AND, OR)

Gate = Tuple[str, int, int]


class Store:
    """Interning table for gate records."""

    def __init__(self):
        self._nodes: List[Gate] = []
        self._index: Dict[Gate, int] = {}
        self._lock = threading.Lock()
        self._support: Dict[int, Tuple[frozenset, frozenset]] = {}
        self._tables: Dict[Tuple[int, int, int], int] = {}

    def intern(self, kind: str, a: int = 0, b: int = 0) -> int:
        key = (kind, a, b)
        found = self._index.get(key)
        if found is not None:
            return found
        with self._lock:
            found = self._index.get(key)
            if found is None:
                found = len(self._nodes)
                self._nodes.append(key)
                self._index[key] = found
            return found

    def gate(self, node: int) -> Gate:
        return self._nodes[node]

    def __len__(self):
        return len(self._nodes)


STORE = Store()


def Var(k: int) -> int:
    if k < 0:
        raise ValueError("variable index must be non-negative")
    return STORE.intern(VAR, k)


def RVar(k: int) -> int:
    if k < 0:
        raise ValueError("random variable index must be non-negative")
    return STORE.intern(RVAR, k)


def Const(b) -> int:
    return STORE.intern(CONST, 1 if b else 0)


def Not(c: int) -> int:
    return STORE.intern(NOT, c)


def And(c1: int, c2: int) -> int:
    return STORE.intern(AND, c1, c2)


def Or(c1: int, c2: int) -> int:
    return STORE.intern(OR, c1, c2)


TRUE = Const(1)
FALSE = Const(0)


def implies(c1: int, c2: int) -> int:
    return Or(Not(c1), c2)


def iff(c1: int, c2: int) -> int:
    return And(implies(c1, c2), implies(c2, c1))


def xor(c1: int, c2: int) -> int:
    return Or(And(c1, Not(c2)), And(Not(c1), c2))


def big_and(nodes: Iterable[int]) -> int:
    """Left-folded conjunction; the empty conjunction is CONST 1."""
    nodes = list(nodes)
    return reduce(And, nodes) if nodes else TRUE


def big_or(nodes: Iterable[int]) -> int:
    nodes = list(nodes)
    return reduce(Or, nodes) if nodes else FALSE


def gate(node: int) -> Gate:
    return STORE.gate(node)


def children(node: int) -> Tuple[int, ...]:
    kind, a, b = STORE.gate(node)
    if kind == NOT:
        return (a,)
    if kind in (AND, OR):
        return (a, b)
    return ()


def reachable(node: int) -> List[int]:
    """Ids of all nodes below ``node`` (inclusive), in topological order."""
    seen = {node}
    stack = [node]
    while stack:
        for child in children(stack.pop()):
            if child not in seen:
                seen.add(child)
                stack.append(child)
    return sorted(seen)


def support(node: int) -> Tuple[frozenset, frozenset]:
    """(VAR indices, RVAR indices) occurring below ``node``."""
    cached = STORE._support.get(node)
    if cached is not None:
        return cached
    for n in reachable(node):
        if n in STORE._support:
            continue
        kind, a, _ = STORE.gate(n)
        if kind == VAR:
            sup = (frozenset((a,)), frozenset())
        elif kind == RVAR:
            sup = (frozenset(), frozenset((a,)))
        elif kind == CONST:
            sup = (frozenset(), frozenset())
        else:
            parts = [STORE._support[c] for c in children(n)]
            sup = (frozenset().union(*(p[0] for p in parts)),
                   frozenset().union(*(p[1] for p in parts)))
        STORE._support[n] = sup
    return STORE._support[node]


def variables(node: int) -> frozenset:
    return support(node)[0]


def size(node: int) -> int:
    """Number of distinct gates in the DAG below ``node``."""
    return len(reachable(node))


@dataclass(frozen=True)
class Circuit:
    """An output node together with its declared variable counts."""

    output: int
    num_input_vars: int
    num_rand_vars: int = 0

    def __post_init__(self):
        vs, rs = support(self.output)
        if vs and max(vs) >= self.num_input_vars:
            raise ArityError(
                f"VAR {max(vs)} out of range for {self.num_input_vars} input variables")
        if rs and max(rs) >= self.num_rand_vars:
            raise ArityError(
                f"RVAR {max(rs)} out of range for {self.num_rand_vars} random variables")

    @classmethod
    def of(cls, node: int, n: Optional[int] = None, m: Optional[int] = None) -> "Circuit":
        """Wrap ``node``, inferring the smallest variable counts when omitted."""
        vs, rs = support(node)
        if n is None:
            n = max(vs) + 1 if vs else 0
        if m is None:
            m = max(rs) + 1 if rs else 0
        return cls(node, n, m)

    @property
    def nodes(self) -> List[Gate]:
        return [STORE.gate(n) for n in reachable(self.output)]

    @property
    def size(self) -> int:
        return size(self.output)

    def __str__(self):
        return to_infix(self.output)


def to_infix(node: int) -> str:
    kind, a, b = STORE.gate(node)
    if kind == VAR:
        return f"p{a}"
    if kind == RVAR:
        return f"z{a}"
    if kind == CONST:
        return str(a)
    if kind == NOT:
        return "~" + to_infix(a)
    op = "&" if kind == AND else "|"
    return f"({to_infix(a)} {op} {to_infix(b)})"


Assignment = Tuple[int, ...]


def assignment_index(bits: Sequence[int]) -> int:
    idx = 0
    for bit in bits:
        idx = (idx << 1) | (1 if bit else 0)
    return idx


def assignment_from_index(idx: int, n: int) -> Assignment:
    return tuple((idx >> (n - 1 - k)) & 1 for k in range(n))


def all_assignments(n: int) -> Iterable[Assignment]:
    for idx in range(1 << n):
        yield assignment_from_index(idx, n)


def eval_node(node: int, bits: Sequence[int], rbits: Sequence[int] = ()) -> int:
    """Point evaluation of a node under input bits and random bits."""
    val: Dict[int, int] = {}
    for n in reachable(node):
        kind, a, b = STORE.gate(n)
        if kind == VAR:
            val[n] = 1 if bits[a] else 0
        elif kind == RVAR:
            val[n] = 1 if rbits[a] else 0
        elif kind == CONST:
            val[n] = a
        elif kind == NOT:
            val[n] = 1 - val[a]
        elif kind == AND:
            val[n] = val[a] & val[b]
        else:
            val[n] = val[a] | val[b]
    return val[node]


def eval(c: Circuit, a: Sequence[int]) -> int:
    if len(a) != c.num_input_vars:
        raise ArityError(
            f"assignment has {len(a)} bits, circuit expects {c.num_input_vars}")
    if support(c.output)[1]:
        raise WrongKindError("circuit contains random variables; use randomized.eval_R")
    return eval_node(c.output, a)


def full_mask(width: int) -> int:
    return (1 << (1 << width)) - 1


def projection(k: int, width: int) -> int:
    """Truth table of variable ``k`` among ``width`` variables."""
    s = 1 << (width - 1 - k)
    block = ((1 << s) - 1) << s
    return block * (full_mask(width) // ((1 << (2 * s)) - 1))


def eval_tables(node: int, leaf, width: int) -> int:
    """Evaluate ``node`` with every leaf mapped to a whole truth table.

    ``leaf(kind, index)`` returns the table for ``VAR``/``RVAR`` leaves.
    """
    mask = full_mask(width)
    val: Dict[int, int] = {}
    for n in reachable(node):
        kind, a, b = STORE.gate(n)
        if kind in (VAR, RVAR):
            val[n] = leaf(kind, a)
        elif kind == CONST:
            val[n] = mask if a else 0
        elif kind == NOT:
            val[n] = mask ^ val[a]
        elif kind == AND:
            val[n] = val[a] & val[b]
        else:
            val[n] = val[a] | val[b]
    return val[node]


def node_table(node: int, n: int, m: int = 0) -> int:
    """Table over ``n`` inputs followed by ``m`` random variables (cached)."""
    key = (node, n, m)
    cached = STORE._tables.get(key)
    if cached is not None:
        return cached
    width = n + m
    vs, rs = support(node)
    if (vs and max(vs) >= n) or (rs and max(rs) >= m):
        raise ArityError(f"node {node} mentions variables outside n={n}, m={m}")
    tables = STORE._tables
    mask = full_mask(width)
    for g in reachable(node):
        gk = (g, n, m)
        if gk in tables:
            continue
        kind, a, b = STORE.gate(g)
        if kind == VAR:
            t = projection(a, width)
        elif kind == RVAR:
            t = projection(n + a, width)
        elif kind == CONST:
            t = mask if a else 0
        elif kind == NOT:
            t = mask ^ tables[(a, n, m)]
        elif kind == AND:
            t = tables[(a, n, m)] & tables[(b, n, m)]
        else:
            t = tables[(a, n, m)] | tables[(b, n, m)]
        tables[gk] = t
    return tables[key]


def check_scale(n: int):
    if n > LIMITS.max_n:
        raise ScaleError(f"n={n} exceeds configured maximum {LIMITS.max_n}")


@dataclass(frozen=True)
class TruthTable:
    n: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> (1 << self.n):
            raise ValueError(f"table does not fit 2^{self.n} entries")

    def __len__(self):
        return 1 << self.n

    def __getitem__(self, key) -> int:
        idx = key if isinstance(key, int) else assignment_index(key)
        return (self.bits >> idx) & 1

    def __str__(self):
        return "".join(str((self.bits >> i) & 1) for i in range(1 << self.n))

    @classmethod
    def from_string(cls, text: str) -> "TruthTable":
        length = len(text)
        n = length.bit_length() - 1
        if length == 0 or 1 << n != length:
            raise ValueError("table length must be a power of two")
        bits = sum(1 << i for i, ch in enumerate(text) if ch == "1")
        return cls(n, bits)


def truth_table(c: Circuit, n: Optional[int] = None) -> TruthTable:
    if n is None:
        n = c.num_input_vars
    if n < c.num_input_vars:
        raise ArityError(f"n={n} below the circuit's {c.num_input_vars} inputs")
    check_scale(n)
    if support(c.output)[1]:
        raise WrongKindError("circuit contains random variables")
    return TruthTable(n, node_table(c.output, n))


def table_to_node(n: int, bits: int) -> int:
    """Shannon-expansion circuit realising a truth table (shared subcircuits)."""
    memo: Dict[Tuple[int, int], int] = {}

    def build(level: int, t: int) -> int:
        width = n - level
        if t == 0:
            return FALSE
        if t == full_mask(width):
            return TRUE
        key = (level, t)
        if key in memo:
            return memo[key]
        half = 1 << (width - 1)
        lo = t & ((1 << half) - 1)
        hi = t >> half
        v = Var(level)
        if hi == lo:
            out = build(level + 1, lo)
        else:
            h, l = build(level + 1, hi), build(level + 1, lo)
            if h == TRUE:
                out = Or(v, l)
            elif l == FALSE:
                out = And(v, h)
            elif h == FALSE:
                out = And(Not(v), l)
            elif l == TRUE:
                out = Or(Not(v), h)
            else:
                out = Or(And(v, h), And(Not(v), l))
        memo[key] = out
        return out

    return build(0, bits)


def substitute(node: int, var_map: Dict[int, int],
               rvar_map: Optional[Dict[int, int]] = None) -> int:
    """Replace VAR/RVAR leaves by other nodes; unmapped leaves stay put."""
    rvar_map = rvar_map or {}
    new: Dict[int, int] = {}
    for n in reachable(node):
        kind, a, b = STORE.gate(n)
        if kind == VAR:
            new[n] = var_map.get(a, n)
        elif kind == RVAR:
            new[n] = rvar_map.get(a, n)
        elif kind == CONST:
            new[n] = n
        elif kind == NOT:
            new[n] = Not(new[a])
        elif kind == AND:
            new[n] = And(new[a], new[b])
        else:
            new[n] = Or(new[a], new[b])
    return new[node]


class AlgebraElement:
    """An element of the algebra of circuits over ``n`` variables modulo =_A.

    Equality and hashing go through the canonical truth table only; the
    witness circuit is one representative and is synthesised lazily when the
    element was built from a bare table.
    """

    __slots__ = ("n", "bits", "_witness")

    def __init__(self, n: int, bits: int, witness: Optional[Circuit] = None):
        check_scale(n)
        self.n = n
        self.bits = bits
        self._witness = witness

    @classmethod
    def from_circuit(cls, c: Circuit, n: Optional[int] = None) -> "AlgebraElement":
        n = c.num_input_vars if n is None else n
        tt = truth_table(c, n)
        if c.num_input_vars != n:
            c = Circuit(c.output, n)
        return cls(n, tt.bits, c)

    @classmethod
    def from_node(cls, node: int, n: int) -> "AlgebraElement":
        return cls.from_circuit(Circuit(node, n), n)

    @property
    def table(self) -> TruthTable:
        return TruthTable(self.n, self.bits)

    @property
    def witness(self) -> Circuit:
        if self._witness is None:
            self._witness = Circuit(table_to_node(self.n, self.bits), self.n)
        return self._witness

    @property
    def node(self) -> int:
        return self.witness.output

    def value_at(self, assignment: Sequence[int]) -> int:
        return (self.bits >> assignment_index(assignment)) & 1

    def is_zero(self) -> bool:
        return self.bits == 0

    def is_one(self) -> bool:
        return self.bits == full_mask(self.n)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.n == other.n and self.bits == other.bits

    def __hash__(self):
        return hash((self.n, self.bits))

    def __le__(self, other):
        return leq_A(self, other)

    def __and__(self, other):
        return meet(self, other)

    def __or__(self, other):
        return join(self, other)

    def __invert__(self):
        return complement(self)

    def __repr__(self):
        return f"AlgebraElement(n={self.n}, table={self.table})"


def _same_n(x: AlgebraElement, y: AlgebraElement):
    if x.n != y.n:
        raise ArityError(f"elements over different n: {x.n} vs {y.n}")


def leq_A(x: AlgebraElement, y: AlgebraElement) -> bool:
    _same_n(x, y)
    return x.bits & ~y.bits == 0


def _combine(build, *xs: AlgebraElement) -> Optional[Circuit]:
    # witnesses compose only when every operand already has one; table-only
    # operands leave the result lazy instead of forcing a Shannon expansion
    if any(x._witness is None for x in xs):
        return None
    return Circuit(build(*(x._witness.output for x in xs)), xs[0].n)


def meet(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _same_n(x, y)
    return AlgebraElement(x.n, x.bits & y.bits, _combine(And, x, y))


def join(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _same_n(x, y)
    return AlgebraElement(x.n, x.bits | y.bits, _combine(Or, x, y))


def complement(x: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(x.n, full_mask(x.n) ^ x.bits, _combine(Not, x))


def zero(n: int) -> AlgebraElement:
    return AlgebraElement(n, 0, Circuit(FALSE, n))


def one(n: int) -> AlgebraElement:
    return AlgebraElement(n, full_mask(n), Circuit(TRUE, n))


def variable(k: int, n: int) -> AlgebraElement:
    return AlgebraElement(n, projection(k, n), Circuit(Var(k), n))


def meet_all(elements: Iterable[AlgebraElement], n: int) -> AlgebraElement:
    return reduce(meet, elements, one(n))


def join_all(elements: Iterable[AlgebraElement], n: int) -> AlgebraElement:
    return reduce(join, elements, zero(n))


def atom(n: int, assignment: Sequence[int]) -> AlgebraElement:
    """The indicator element of a single assignment."""
    if len(assignment) != n:
        raise ArityError("assignment length differs from n")
    node = big_and(Var(k) if bit else Not(Var(k)) for k, bit in enumerate(assignment))
    return AlgebraElement(n, 1 << assignment_index(assignment), Circuit(node, n))


def atoms(n: int) -> List[AlgebraElement]:
    return [atom(n, a) for a in all_assignments(n)]


# -- text format --------------------------------------------------------------

@dataclass
class CircuitFile:
    """Parsed contents of a circuit text file."""

    num_input_vars: int
    num_rand_vars: int
    ids: Dict[int, int]          # file id -> store node
    outputs: List[int]           # store nodes
    blocks: List[int]            # store nodes marked BLOCK

    def circuit(self, index: int = 0) -> Circuit:
        return Circuit(self.outputs[index], self.num_input_vars, self.num_rand_vars)

    def ref(self, file_id: int) -> Circuit:
        if file_id not in self.ids:
            raise FormatError(f"unknown circuit id {file_id}")
        return Circuit(self.ids[file_id], self.num_input_vars, self.num_rand_vars)


def parse_circuit_file(text: str) -> CircuitFile:
    header = None
    ids: Dict[int, int] = {}
    outputs: List[int] = []
    blocks: List[int] = []
    last_id = -1

    def lookup(token, lineno):
        try:
            return ids[int(token)]
        except (KeyError, ValueError):
            raise FormatError(f"reference to undefined gate {token!r}", lineno) from None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 4 or parts[0] != "nvars" or parts[2] != "nrand":
                raise FormatError("expected header 'nvars <n> nrand <m>'", lineno)
            try:
                header = (int(parts[1]), int(parts[3]))
            except ValueError:
                raise FormatError("non-numeric header", lineno) from None
            continue
        if parts[0] in ("OUTPUT", "BLOCK"):
            if len(parts) != 2:
                raise FormatError(f"{parts[0]} takes one gate id", lineno)
            (outputs if parts[0] == "OUTPUT" else blocks).append(lookup(parts[1], lineno))
            continue
        try:
            gid = int(parts[0])
        except ValueError:
            raise FormatError(f"bad gate id {parts[0]!r}", lineno) from None
        if gid <= last_id:
            raise FormatError("gate ids must be strictly increasing", lineno)
        if len(parts) < 2 or parts[1] not in KINDS:
            raise FormatError("unknown gate kind", lineno)
        kind, args = parts[1], parts[2:]
        arity = {VAR: 1, RVAR: 1, CONST: 1, NOT: 1, AND: 2, OR: 2}[kind]
        if len(args) != arity:
            raise FormatError(f"{kind} takes {arity} argument(s)", lineno)
        try:
            if kind == VAR:
                node = Var(int(args[0]))
            elif kind == RVAR:
                node = RVar(int(args[0]))
            elif kind == CONST:
                if args[0] not in ("0", "1"):
                    raise FormatError("CONST takes 0 or 1", lineno)
                node = Const(int(args[0]))
            elif kind == NOT:
                node = Not(lookup(args[0], lineno))
            elif kind == AND:
                node = And(lookup(args[0], lineno), lookup(args[1], lineno))
            else:
                node = Or(lookup(args[0], lineno), lookup(args[1], lineno))
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(str(exc), lineno) from None
        ids[gid] = node
        last_id = gid
    if header is None:
        raise FormatError("empty circuit file")
    n, m = header
    for node in list(ids.values()):
        vs, rs = support(node)
        if (vs and max(vs) >= n) or (rs and max(rs) >= m):
            raise FormatError("variable index exceeds header counts")
    return CircuitFile(n, m, ids, outputs, blocks)


def loads(text: str) -> Circuit:
    cf = parse_circuit_file(text)
    if len(cf.outputs) != 1:
        raise FormatError(f"expected exactly one OUTPUT line, found {len(cf.outputs)}")
    return cf.circuit(0)


def dump_nodes(roots: Sequence[int], n: int, m: int = 0,
               blocks: Sequence[int] = (), comment: Optional[str] = None) -> Tuple[str, Dict[int, int]]:
    """Serialise several roots into one file; returns (text, store node -> file id)."""
    nodes = sorted(set().union(*(reachable(r) for r in roots))) if roots else []
    renum = {node: i for i, node in enumerate(nodes)}
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"nvars {n} nrand {m}")
    for node in nodes:
        kind, a, b = STORE.gate(node)
        i = renum[node]
        if kind in (VAR, RVAR, CONST):
            lines.append(f"{i} {kind} {a}")
        elif kind == NOT:
            lines.append(f"{i} NOT {renum[a]}")
        else:
            lines.append(f"{i} {kind} {renum[a]} {renum[b]}")
    for blk in blocks:
        lines.append(f"BLOCK {renum[blk]}")
    for r in roots:
        lines.append(f"OUTPUT {renum[r]}")
    return "\n".join(lines) + "\n", renum


def dumps(c: Circuit) -> str:
    return dump_nodes([c.output], c.num_input_vars, c.num_rand_vars)[0]


def biconditional(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _same_n(x, y)
    return AlgebraElement(x.n, full_mask(x.n) ^ (x.bits ^ y.bits), _combine(iff, x, y))


def implication(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _same_n(x, y)
    return AlgebraElement(x.n, (full_mask(x.n) ^ x.bits) | y.bits, _combine(implies, x, y))
