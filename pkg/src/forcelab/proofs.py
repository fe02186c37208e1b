"""Checkers for Extended Frege proofs, proofs from premises, and WF proofs.

The Frege basis is Hilbert style over circuits, with ``A -> B`` encoded as the
gate ``OR(NOT A, B)``.  Modus ponens is the only rule; extension lines
``q <-> D`` introduce a variable q that is new to the proof.  Axiom instances
and modus ponens are matched structurally (node identity), premises
semantically (truth-table equality with an element of the premise set).
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import circuits as cc
from .circuits import AlgebraElement, AND, CONST, NOT, OR, VAR, Circuit
from .errors import FormatError, ProofError

# -- axiom schemes ------------------------------------------------------------


def _imp(a, b):
    return ("or", ("not", a), b)


_A, _B, _C = ("meta", "A"), ("meta", "B"), ("meta", "C")

SCHEMES = {
    "K": _imp(_A, _imp(_B, _A)),
    "S": _imp(_imp(_A, _imp(_B, _C)), _imp(_imp(_A, _B), _imp(_A, _C))),
    "CP": _imp(_imp(("not", _A), ("not", _B)), _imp(_B, _A)),
    "AI": _imp(_A, _imp(_B, ("and", _A, _B))),
    "AE1": _imp(("and", _A, _B), _A),
    "AE2": _imp(("and", _A, _B), _B),
    "OI1": _imp(_A, ("or", _A, _B)),
    "OI2": _imp(_B, ("or", _A, _B)),
    "OE": _imp(_imp(_A, _C), _imp(_imp(_B, _C), _imp(("or", _A, _B), _C))),
    "T": ("const", 1),
    "NF": ("not", ("const", 0)),
}

_KIND = {"not": NOT, "and": AND, "or": OR}


def match(pattern, node: int, binding: Optional[Dict[str, int]] = None) -> Optional[Dict[str, int]]:
    """Bind metavariables so that ``pattern`` becomes ``node``, or None."""
    binding = {} if binding is None else binding
    tag = pattern[0]
    if tag == "meta":
        bound = binding.get(pattern[1])
        if bound is None:
            binding[pattern[1]] = node
            return binding
        return binding if bound == node else None
    kind, a, b = cc.gate(node)
    if tag == "const":
        return binding if kind == CONST and a == pattern[1] else None
    if kind != _KIND[tag]:
        return None
    if tag == "not":
        return match(pattern[1], a, binding)
    if match(pattern[1], a, binding) is None:
        return None
    return match(pattern[2], b, binding)


def instantiate(scheme: str, **metas: int) -> int:
    def build(p):
        tag = p[0]
        if tag == "meta":
            return metas[p[1]]
        if tag == "const":
            return cc.Const(p[1])
        if tag == "not":
            return cc.Not(build(p[1]))
        left, right = build(p[1]), build(p[2])
        return cc.And(left, right) if tag == "and" else cc.Or(left, right)
    return build(SCHEMES[scheme])


# -- proof objects ------------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    scheme: str


@dataclass(frozen=True)
class MP:
    minor: int      # line proving A
    major: int      # line proving A -> B


@dataclass(frozen=True)
class Ext:
    var: int


@dataclass(frozen=True)
class Premise:
    pass


@dataclass(frozen=True)
class DWPHP:
    """Disjunction OR_i NOT(r_i <-> C_i[slots := D_i]) with fresh r_i.

    ``C`` holds m circuits reading their n inputs at the ``slots`` variables;
    ``D`` is an m-by-n array of argument circuits.
    """

    m: int
    n: int
    r: Tuple[int, ...]
    slots: Tuple[int, ...]
    C: Tuple[int, ...]
    D: Tuple[Tuple[int, ...], ...]

    def expected(self) -> int:
        parts = []
        for i in range(self.m):
            applied = cc.substitute(self.C[i], dict(zip(self.slots, self.D[i])))
            parts.append(cc.Not(cc.iff(cc.Var(self.r[i]), applied)))
        return cc.big_or(parts)


Justification = Union[Axiom, MP, Ext, Premise, DWPHP]


@dataclass(frozen=True)
class ProofLine:
    index: int
    circuit: int
    justification: Justification

    @property
    def size(self) -> int:
        return cc.size(self.circuit)


@dataclass(frozen=True)
class Proof:
    lines: Tuple[ProofLine, ...]

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))

    @property
    def conclusion(self) -> int:
        return self.lines[-1].circuit

    @property
    def total_size(self) -> int:
        return sum(line.size for line in self.lines)

    def __len__(self):
        return len(self.lines)

    def variables(self) -> frozenset:
        return frozenset().union(*(cc.variables(l.circuit) for l in self.lines))


@dataclass(frozen=True)
class PremiseSet:
    elements: Tuple[AlgebraElement, ...]
    n: int
    name: str = "S"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for e in self.elements:
            if e.n != self.n:
                raise ValueError(f"premise over n={e.n} in a set over n={self.n}")

    @classmethod
    def of(cls, elements: Iterable[AlgebraElement], n: Optional[int] = None, name="S"):
        elements = tuple(elements)
        if n is None:
            n = elements[0].n
        return cls(elements, n, name)

    def __contains__(self, x: AlgebraElement) -> bool:
        return x in set(self.elements)

    def meet(self) -> AlgebraElement:
        return cc.meet_all(self.elements, self.n)


# -- checking -----------------------------------------------------------------

def _ext_parts(node: int) -> Optional[Tuple[int, int]]:
    """(q, D) when ``node`` is the gate structure of ``q <-> D`` with q a VAR."""
    kind, left, right = cc.gate(node)
    if kind != AND:
        return None
    got = match(_imp(_A, _B), left)
    if got is None:
        return None
    q, d = got["A"], got["B"]
    if cc.gate(q)[0] != VAR or right != cc.implies(d, q):
        return None
    return cc.gate(q)[1], d


def _check(proof: Proof, premises: Optional[PremiseSet] = None, wf: bool = False) -> bool:
    if not proof.lines:
        raise ProofError(0, "empty proof")
    conclusion_vars = cc.variables(proof.conclusion)
    seen_vars = set()
    lines = proof.lines
    for pos, line in enumerate(lines):
        idx = pos + 1
        if line.index != idx:
            raise ProofError(line.index, f"line numbered {line.index}, expected {idx}")
        just = line.justification
        node = line.circuit
        if isinstance(just, Axiom):
            if just.scheme not in SCHEMES:
                raise ProofError(idx, f"unknown axiom scheme {just.scheme!r}")
            if match(SCHEMES[just.scheme], node) is None:
                raise ProofError(idx, f"not an instance of scheme {just.scheme}")
        elif isinstance(just, MP):
            for ref in (just.minor, just.major):
                if not 1 <= ref < idx:
                    raise ProofError(idx, f"reference {ref} does not point to an earlier line")
            minor = lines[just.minor - 1].circuit
            major = lines[just.major - 1].circuit
            if major != cc.implies(minor, node):
                raise ProofError(idx, f"line {just.major} is not line {just.minor} -> this line")
        elif isinstance(just, Ext):
            parts = _ext_parts(node)
            if parts is None or parts[0] != just.var:
                raise ProofError(idx, f"not an extension axiom p{just.var} <-> D")
            q, d = parts
            if q in cc.variables(d):
                raise ProofError(idx, f"extension variable p{q} occurs in its definition")
            if q in seen_vars:
                raise ProofError(idx, f"extension variable p{q} occurs in an earlier line")
            if q in conclusion_vars:
                raise ProofError(idx, f"extension variable p{q} occurs in the conclusion")
            if premises is not None and q < premises.n:
                raise ProofError(idx, f"extension variable p{q} is a premise-algebra variable")
        elif isinstance(just, Premise):
            if premises is None:
                raise ProofError(idx, "premise lines are not allowed here")
            vs = cc.variables(node)
            if vs and max(vs) >= premises.n:
                raise ProofError(idx, "premise mentions variables outside the premise algebra")
            if AlgebraElement.from_node(node, premises.n) not in premises:
                raise ProofError(idx, "premise is not a member of S")
        elif isinstance(just, DWPHP):
            if not wf:
                raise ProofError(idx, "dWPHP lines are only allowed in WF proofs")
            _check_dwphp(idx, just, node, seen_vars)
        else:
            raise ProofError(idx, f"unknown justification {just!r}")
        seen_vars |= cc.variables(node)
    return True


def _check_dwphp(idx: int, just: DWPHP, node: int, seen_vars):
    m, n = just.m, just.n
    if not n < m:
        raise ProofError(idx, f"dWPHP needs n < m, got n={n}, m={m}")
    if len(just.r) != m or len(just.C) != m or len(just.D) != m:
        raise ProofError(idx, "dWPHP needs m variables r, m circuits C and m rows of D")
    if len(just.slots) != n or any(len(row) != n for row in just.D):
        raise ProofError(idx, "dWPHP needs n input slots and n arguments per row")
    if len(set(just.r)) != m:
        raise ProofError(idx, "dWPHP variables r must be distinct")
    if len(set(just.slots)) != n or set(just.slots) & set(just.r):
        raise ProofError(idx, "input slots must be distinct and differ from every r")
    c_vars = frozenset().union(*(cc.variables(c) for c in just.C))
    for i, r in enumerate(just.r):
        if r in seen_vars:
            raise ProofError(idx, f"r{i} = p{r} occurs in an earlier line")
        if r in c_vars:
            raise ProofError(idx, f"r{i} = p{r} occurs in some C circuit")
    if node != just.expected():
        raise ProofError(idx, "line is not the displayed dWPHP disjunction")


def check_ef(p: Proof) -> bool:
    """True for a valid EF proof; raises ProofError naming the first bad line."""
    return _check(p)


def check_ef_s(p: Proof, S: PremiseSet) -> bool:
    return _check(p, premises=S)


def check_wf(p: Proof) -> bool:
    return _check(p, wf=True)


def is_valid(p: Proof, S: Optional[PremiseSet] = None, wf: bool = False) -> bool:
    try:
        return _check(p, S, wf)
    except ProofError:
        return False


def leq_EF(c: AlgebraElement, c2: AlgebraElement, p: Proof) -> bool:
    """Whether ``p`` is an EF proof of witness(c) -> witness(c2)."""
    if not is_valid(p):
        return False
    return p.conclusion == cc.implies(c.node, c2.node)


# -- building proofs ----------------------------------------------------------

class ProofBuilder:
    """Append-only proof under construction; reuses lines for repeated circuits."""

    def __init__(self):
        self.lines: List[ProofLine] = []
        self.where: Dict[int, int] = {}

    def _add(self, node: int, just: Justification) -> int:
        if node in self.where and not isinstance(just, (Ext, DWPHP)):
            return self.where[node]
        idx = len(self.lines) + 1
        self.lines.append(ProofLine(idx, node, just))
        self.where.setdefault(node, idx)
        return idx

    def node(self, idx: int) -> int:
        return self.lines[idx - 1].circuit

    def axiom(self, scheme: str, **metas: int) -> int:
        return self._add(instantiate(scheme, **metas), Axiom(scheme))

    def premise(self, node: int) -> int:
        return self._add(node, Premise())

    def mp(self, minor: int, major: int) -> int:
        kind, neg, concl = cc.gate(self.node(major))
        if kind != OR or cc.gate(neg) != (NOT, self.node(minor), 0):
            raise ValueError("major premise is not an implication from the minor")
        return self._add(concl, MP(minor, major))

    def ext(self, var: int, definition: int) -> int:
        return self._add(cc.iff(cc.Var(var), definition), Ext(var))

    def dwphp(self, just: DWPHP) -> int:
        return self._add(just.expected(), just)

    def identity(self, a: int) -> int:
        """a -> a from K, S and two applications of modus ponens."""
        aa = cc.implies(a, a)
        k1 = self.axiom("K", A=a, B=aa)
        s = self.axiom("S", A=a, B=aa, C=a)
        step = self.mp(k1, s)
        k2 = self.axiom("K", A=a, B=a)
        return self.mp(k2, step)

    def weaken(self, idx: int, b: int) -> int:
        """From A derive b -> A."""
        return self.mp(idx, self.axiom("K", A=self.node(idx), B=b))

    def conjoin(self, i: int, j: int) -> int:
        ai = self.axiom("AI", A=self.node(i), B=self.node(j))
        return self.mp(j, self.mp(i, ai))

    def syllogism(self, i: int, j: int) -> int:
        """From A -> B (line i) and B -> C (line j) derive A -> C."""
        a, b = _split_imp(self.node(i))
        b2, c = _split_imp(self.node(j))
        if b != b2:
            raise ValueError("implications do not chain")
        lifted = self.mp(j, self.axiom("K", A=self.node(j), B=a))
        dist = self.mp(lifted, self.axiom("S", A=a, B=b, C=c))
        return self.mp(i, dist)

    def falsum(self, i: int, j: int) -> int:
        """From A (line i) and NOT A (line j) derive the constant 0."""
        a = self.node(i)
        step = self.mp(j, self.axiom("K", A=self.node(j), B=cc.Not(cc.FALSE)))
        a_to_0 = self.mp(step, self.axiom("CP", A=cc.FALSE, B=a))
        return self.mp(i, a_to_0)

    def ex_falso(self, zero_line: int, goal: int) -> int:
        """From 0 derive any goal."""
        nf = self.axiom("NF")
        lifted = self.mp(nf, self.axiom("K", A=cc.Not(cc.FALSE), B=cc.Not(goal)))
        zero_to_goal = self.mp(lifted, self.axiom("CP", A=goal, B=cc.FALSE))
        return self.mp(zero_line, zero_to_goal)

    def build(self, upto: Optional[int] = None) -> Proof:
        """The proof ending at line ``upto``, pruned to the lines it depends on."""
        upto = upto or len(self.lines)
        needed = set()
        stack = [upto]
        while stack:
            i = stack.pop()
            if i in needed:
                continue
            needed.add(i)
            just = self.lines[i - 1].justification
            if isinstance(just, MP):
                stack.extend((just.minor, just.major))
        # keep every extension line so variable freshness is judged as built
        for line in self.lines[:upto]:
            if isinstance(line.justification, (Ext, DWPHP)):
                needed.add(line.index)
        order = sorted(needed)
        renum = {old: new for new, old in enumerate(order, 1)}
        out = []
        for old in order:
            line = self.lines[old - 1]
            just = line.justification
            if isinstance(just, MP):
                just = MP(renum[just.minor], renum[just.major])
            out.append(ProofLine(renum[old], line.circuit, just))
        return Proof(tuple(out))


def _split_imp(node: int) -> Tuple[int, int]:
    got = match(_imp(_A, _B), node)
    if got is None:
        raise ValueError("not an implication")
    return got["A"], got["B"]


# -- entailment within a size budget ------------------------------------------

class Entailment(enum.Enum):
    ENTAILED = "entailed"
    NOT_FOUND = "not-found"
    REFUTED = "semantically-refuted"


@dataclass(frozen=True)
class EntailmentVerdict:
    status: Entailment
    proof: Optional[Proof] = None
    counterexample: Optional[Tuple[int, ...]] = None


def _first_one(bits: int, n: int) -> Tuple[int, ...]:
    return cc.assignment_from_index((bits & -bits).bit_length() - 1, n)


def search_proof(S: PremiseSet, goal: int, l: int, rounds: int = 4) -> Optional[Proof]:
    """Best-effort forward chaining for an EF(S) proof of ``goal`` with size <= l."""
    b = ProofBuilder()
    if match(SCHEMES["T"], goal) is not None or match(SCHEMES["NF"], goal) is not None:
        b.axiom("T" if goal == cc.TRUE else "NF")
        return _fits(b.build(), l)
    for scheme in SCHEMES:
        if match(SCHEMES[scheme], goal) is not None:
            b.lines.append(ProofLine(1, goal, Axiom(scheme)))
            return _fits(b.build(), l)
    for e in S.elements:
        b.premise(e.node)
    gvars = cc.variables(goal)
    if not gvars or max(gvars) < S.n:
        if AlgebraElement.from_node(goal, S.n) in S:
            return _fits(Proof((ProofLine(1, goal, Premise()),)), l)
    for _ in range(rounds):
        before = len(b.lines)
        known = list(b.where.items())
        for node, idx in known:
            kind, x, y = cc.gate(node)
            if kind == AND:
                b.mp(idx, b.axiom("AE1", A=x, B=y))
                b.mp(idx, b.axiom("AE2", A=x, B=y))
            elif kind == OR and cc.gate(x)[0] == NOT and cc.gate(x)[1] in b.where:
                b.mp(b.where[cc.gate(x)[1]], idx)
        if goal in b.where:
            return _fits(b.build(b.where[goal]), l)
        if len(b.lines) == before or b.build().total_size > 4 * l:
            break
    for node, idx in list(b.where.items()):
        kind, x, _ = cc.gate(node)
        if kind == NOT and x in b.where:
            zero = b.falsum(b.where[x], idx)
            break
        if node == cc.FALSE:
            zero = idx
            break
    else:
        return None
    end = zero if goal == cc.FALSE else b.ex_falso(zero, goal)
    return _fits(b.build(end), l)


def _fits(p: Proof, l: int) -> Optional[Proof]:
    return p if p.total_size <= l else None


def l_entails(S: PremiseSet, C: AlgebraElement, l: int, search: bool = True) -> EntailmentVerdict:
    if l < 1:
        raise ValueError("the size budget l must be at least 1")
    gap = S.meet().bits & ~C.bits
    if gap:
        return EntailmentVerdict(Entailment.REFUTED, counterexample=_first_one(gap, S.n))
    if search:
        proof = search_proof(S, C.node, l)
        if proof is not None:
            check_ef_s(proof, S)
            return EntailmentVerdict(Entailment.ENTAILED, proof)
    return EntailmentVerdict(Entailment.NOT_FOUND)


class Consistency(enum.Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ConsistencyVerdict:
    status: Consistency
    proof: Optional[Proof] = None
    model: Optional[Tuple[int, ...]] = None


def l_consistent(S: PremiseSet, l: int) -> ConsistencyVerdict:
    """Consistent when the premises are jointly satisfiable (sound for every l)."""
    if l < 1:
        raise ValueError("the size budget l must be at least 1")
    total = S.meet()
    if total.bits:
        return ConsistencyVerdict(Consistency.CONSISTENT, model=_first_one(total.bits, S.n))
    proof = search_proof(S, cc.FALSE, l)
    if proof is not None:
        check_ef_s(proof, S)
        return ConsistencyVerdict(Consistency.INCONSISTENT, proof)
    return ConsistencyVerdict(Consistency.UNKNOWN)


# -- semantics of accepted proofs -------------------------------------------

def conclusion_is_tautology(p: Proof) -> bool:
    node = p.conclusion
    vs = cc.variables(node)
    n = max(vs) + 1 if vs else 0
    return cc.node_table(node, n) == cc.full_mask(n)


def premises_imply_conclusion(p: Proof, S: PremiseSet) -> bool:
    node = p.conclusion
    vs = cc.variables(node)
    if vs and max(vs) >= S.n:
        return False
    return S.meet().bits & ~cc.node_table(node, S.n) == 0


# -- random proofs and mutants ------------------------------------------------

def random_formula(rng: random.Random, atoms: Sequence[int], depth: int = 2) -> int:
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(atoms)
    op = rng.random()
    if op < 0.25:
        return cc.Not(random_formula(rng, atoms, depth - 1))
    left = random_formula(rng, atoms, depth - 1)
    right = random_formula(rng, atoms, depth - 1)
    if op < 0.5:
        return cc.implies(left, right)
    return cc.And(left, right) if op < 0.75 else cc.Or(left, right)


def random_ef_proof(rng: random.Random, max_vars: int = 10) -> Proof:
    """A seeded valid EF proof mixing axioms, modus ponens and extension."""
    base = rng.randint(1, 4)
    atoms = [cc.Var(k) for k in range(base)]
    next_var = base
    b = ProofBuilder()
    for _ in range(rng.randint(2, 6)):
        action = rng.random()
        pool = atoms + [b.node(i) for i in range(1, len(b.lines) + 1)
                        if cc.size(b.node(i)) < 12]
        if action < 0.2 and next_var < max_vars:
            definition = random_formula(rng, atoms, 2)
            line = b.ext(next_var, definition)
            atoms.append(cc.Var(next_var))
            next_var += 1
            b.mp(line, b.axiom("AE1", A=cc.implies(cc.Var(next_var - 1), definition),
                               B=cc.implies(definition, cc.Var(next_var - 1))))
        elif action < 0.4:
            b.identity(random_formula(rng, atoms, 1))
        elif action < 0.6 and b.lines:
            b.weaken(rng.randrange(1, len(b.lines) + 1), random_formula(rng, atoms, 1))
        elif action < 0.75 and len(b.lines) >= 2:
            i, j = rng.sample(range(1, len(b.lines) + 1), 2)
            b.conjoin(i, j)
        else:
            scheme = rng.choice([s for s in SCHEMES if s not in ("T", "NF")])
            metas = {k: rng.choice(pool) for k in "ABC"}
            used = {k: v for k, v in metas.items() if ("meta", k) in _metas(SCHEMES[scheme])}
            b.axiom(scheme, **used)
    final = random_formula(rng, [cc.Var(k) for k in range(base)], 2)
    if rng.random() < 0.5 or not b.lines:
        end = b.identity(final)
    else:
        last = b.node(len(b.lines))
        end = b.axiom("K", A=final, B=last) if rng.random() < 0.5 else b.identity(final)
        if cc.variables(b.node(end)) - set(range(base)):
            end = b.identity(final)
    return _all_lines(b, end)


def _all_lines(b: ProofBuilder, end: int) -> Proof:
    """Every line, with line ``end`` repeated last if it was reused."""
    lines = list(b.lines)
    if end != len(lines):
        lines.append(ProofLine(len(lines) + 1, b.node(end), lines[end - 1].justification))
    return Proof(tuple(lines))


def _metas(pattern) -> set:
    if pattern[0] == "meta":
        return {pattern}
    if pattern[0] == "const":
        return set()
    return set().union(*(_metas(p) for p in pattern[1:]))


def mutate(p: Proof, rng: random.Random) -> Tuple[Proof, str]:
    """Change one line so that the proof is certainly invalid.

    Each mutation breaks the rule the line itself claims to follow; the kinds
    are negating the circuit, retargeting or dangling an MP reference, reusing
    a variable in an extension line, and swapping an axiom's scheme for one of
    incompatible top-level shape.
    """
    lines = list(p.lines)
    pos = rng.randrange(len(lines))
    line = lines[pos]
    idx = line.index
    just = line.justification
    kinds = ["negate"]
    if isinstance(just, MP):
        kinds += ["retarget", "dangling"]
    if isinstance(just, Ext):
        kinds.append("stale-var")
    if isinstance(just, Axiom):
        kinds.append("scheme")
    kind = rng.choice(kinds)
    new = None
    if kind == "retarget":
        want = cc.implies(lines[just.minor - 1].circuit, line.circuit)
        options = [j for j in range(1, idx) if lines[j - 1].circuit != want]
        if options:
            new = ProofLine(idx, line.circuit, MP(just.minor, rng.choice(options)))
    elif kind == "dangling":
        new = ProofLine(idx, line.circuit, MP(just.minor, idx + rng.randint(0, 2)))
    elif kind == "stale-var":
        q, d = _ext_parts(line.circuit)
        earlier = sorted(frozenset().union(*(cc.variables(l.circuit) for l in lines[:pos]))
                         | cc.variables(d))
        if earlier:
            v = rng.choice(earlier)
            new = ProofLine(idx, cc.iff(cc.Var(v), d), Ext(v))
    elif kind == "scheme":
        top = cc.gate(line.circuit)[0]
        if top == OR:
            new = ProofLine(idx, line.circuit, Axiom(rng.choice(["T", "NF"])))
        else:
            new = ProofLine(idx, line.circuit, Axiom(rng.choice(["K", "S", "AE1", "OE"])))
    if new is None:
        kind = "negate"
        new = ProofLine(idx, cc.Not(line.circuit), just)
    lines[pos] = new
    return Proof(tuple(lines)), f"{kind}@{idx}"


# -- text format --------------------------------------------------------------

def dump_proof(p: Proof, n: Optional[int] = None) -> Tuple[str, str]:
    """(proof text, companion circuit text); refs are gate ids in the circuit file."""
    roots = []
    for line in p.lines:
        roots.append(line.circuit)
        just = line.justification
        if isinstance(just, DWPHP):
            roots.extend(just.C)
            roots.extend(d for row in just.D for d in row)
    if n is None:
        vs = frozenset().union(*(cc.variables(r) for r in roots))
        n = max(vs) + 1 if vs else 0
    circ_text, renum = cc.dump_nodes(list(dict.fromkeys(roots)), n)
    out = []
    for line in p.lines:
        just = line.justification
        ref = renum[line.circuit]
        if isinstance(just, Axiom):
            out.append(f"{line.index} AXIOM {just.scheme} {ref}")
        elif isinstance(just, MP):
            out.append(f"{line.index} MP {just.minor} {just.major} {ref}")
        elif isinstance(just, Ext):
            out.append(f"{line.index} EXT {just.var} {ref}")
        elif isinstance(just, Premise):
            out.append(f"{line.index} PREMISE {ref}")
        else:
            r = ",".join(map(str, just.r))
            x = ",".join(map(str, just.slots))
            C = ",".join(str(renum[c]) for c in just.C)
            D = ",".join(str(renum[d]) for row in just.D for d in row)
            out.append(f"{line.index} DWPHP m={just.m} n={just.n} r={r} x={x} C={C} D={D} {ref}")
    return "\n".join(out) + "\n", circ_text


def load_proof(proof_text: str, circuit_text: str) -> Proof:
    cf = cc.parse_circuit_file(circuit_text)

    def ref(token, lineno):
        try:
            return cf.ids[int(token)]
        except (KeyError, ValueError):
            raise FormatError(f"unknown circuit ref {token!r}", lineno) from None

    def ints(text):
        return tuple(int(t) for t in text.split(",") if t != "")

    lines = []
    for lineno, raw in enumerate(proof_text.splitlines(), 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        try:
            idx, kind = int(parts[0]), parts[1]
            if kind == "AXIOM" and len(parts) == 4:
                just, node = Axiom(parts[2]), ref(parts[3], lineno)
            elif kind == "MP" and len(parts) == 5:
                just, node = MP(int(parts[2]), int(parts[3])), ref(parts[4], lineno)
            elif kind == "EXT" and len(parts) == 4:
                just, node = Ext(int(parts[2])), ref(parts[3], lineno)
            elif kind == "PREMISE" and len(parts) == 3:
                just, node = Premise(), ref(parts[2], lineno)
            elif kind == "DWPHP":
                opts = dict(p.split("=", 1) for p in parts[2:-1])
                m, n = int(opts["m"]), int(opts["n"])
                C = tuple(ref(t, lineno) for t in opts["C"].split(","))
                flat = [ref(t, lineno) for t in opts["D"].split(",")] if opts.get("D") else []
                if len(flat) != m * n:
                    raise FormatError(f"D needs {m * n} refs", lineno)
                D = tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(m))
                just = DWPHP(m, n, ints(opts["r"]), ints(opts.get("x", "")), C, D)
                node = ref(parts[-1], lineno)
            else:
                raise FormatError(f"malformed {kind} line", lineno)
        except (IndexError, KeyError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"malformed proof line: {exc}", lineno) from None
        lines.append(ProofLine(idx, node, just))
    if not lines:
        raise FormatError("empty proof file")
    return Proof(tuple(lines))
