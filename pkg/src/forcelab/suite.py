"""The acceptance battery: ten seeded property checks with wall-clock limits.

Each check returns a CriterionResult; ``run_suite`` runs the selected ones.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from . import circuits as cc
from . import proofs as pf
from . import randomized as rz
from .circuits import AlgebraElement, Circuit
from .corpus import INDUCTION_CORPUS, SIGMA_B0_CORPUS
from .formula import eval_standard, parse, strings_below
from .generic import (GenericFilter, consistent_set_to_ideal, forcing_check, i_G,
                      ideal_law_failures, ind_trichotomy_check)
from .mcv import (WitnessProblem, binary_search_witness, build_mcv_Y, check_delta_mcv,
                  cvp_simulate, random_element, random_instance)
from .corpus import random_formula
from .translate import BString, bool_value, translate_node


@dataclass
class CriterionResult:
    number: int
    name: str
    cases: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0
    limit: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures and self.seconds < self.limit

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"; first failure: {self.failures[0]}" if self.failures else ""
        return (f"[{status}] criterion {self.number}: {self.name} "
                f"({self.cases} cases, {len(self.failures)} failures, "
                f"{self.seconds:.2f}s / {self.limit:.0f}s){extra}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["failures"] = self.failures[:20]
        d["failure_count"] = len(self.failures)
        d["pass"] = self.passed
        return d


def _timed(number: int, name: str, limit: float):
    def wrap(fn: Callable[[CriterionResult, random.Random], None]):
        def run(seed: int = 0) -> CriterionResult:
            res = CriterionResult(number, name, limit=limit)
            start = time.perf_counter()
            fn(res, random.Random(seed * 1000 + number))
            res.seconds = time.perf_counter() - start
            return res
        run.number = number
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(1, "translation agrees with standard evaluation", 30)
def translation_equivalence(res, rng):
    for entry in SIGMA_B0_CORPUS:
        phi, env = entry.formula, entry.env()
        node = translate_node(phi, env)
        k = env.num_inputs
        table = cc.node_table(node, k)
        for idx, bits in enumerate(cc.all_assignments(k)):
            res.cases += 1
            expected = eval_standard(phi, env.num_values, env.split(bits))
            if bool(table >> idx & 1) != expected or cc.eval_node(node, bits) != expected:
                res.failures.append(f"{entry.text} at {''.join(map(str, bits))}")


@_timed(2, "forcing: truth in M[G] iff Boolean value in G", 60)
def forcing_theorem(res, rng):
    for entry in SIGMA_B0_CORPUS:
        phi, env = entry.formula, entry.env()
        n = rng.randint(1, 6)
        args = {name: BString(n, tuple(random_element(rng, n) for _ in range(b)))
                for name, b in env.str_bounds.items()}
        value = bool_value(phi, env, args, n=n)
        for a in cc.all_assignments(n):
            res.cases += 1
            verdict = forcing_check(phi, env, args, GenericFilter(a), value)
            if not verdict.agree:
                res.failures.append(f"{entry.text} at G_{''.join(map(str, a))}")


@_timed(3, "Boolean algebra laws at n=8", 10)
def algebra_laws(res, rng):
    n = 8
    one, zero = cc.one(n), cc.zero(n)
    for _ in range(1000):
        x, y, z = (AlgebraElement(n, rng.getrandbits(1 << n)) for _ in range(3))
        res.cases += 1
        laws = {
            "meet distributes": x & (y | z) == (x & y) | (x & z),
            "join distributes": x | (y & z) == (x | y) & (x | z),
            "De Morgan meet": ~(x & y) == ~x | ~y,
            "De Morgan join": ~(x | y) == ~x & ~y,
            "complement meet": x & ~x == zero,
            "complement join": x | ~x == one,
            "absorption meet": x & (x | y) == x,
            "absorption join": x | (x & y) == x,
        }
        res.failures.extend(name for name, ok in laws.items() if not ok)


@_timed(4, "MCV: delta is one and decoding simulates the circuit", 60)
def mcv_values(res, rng):
    for _ in range(100):
        a, n = rng.randint(2, 8), rng.randint(1, 4)
        inst = random_instance(rng, a, n)
        Y = build_mcv_Y(inst)
        res.cases += 1
        if not check_delta_mcv(inst, Y).is_one():
            res.failures.append(f"delta not one (a={a}, n={n})")
        for bits in cc.all_assignments(n):
            G = GenericFilter(bits)
            gates, edges = inst.decode(G)
            if cvp_simulate(a, gates, edges) != i_G(Y, G):
                res.failures.append(f"decode mismatch (a={a}, n={n}) at {bits}")


def _random_matrix(rng: random.Random, x_length: int, t: int) -> str:
    body = random_formula(rng, {"X": x_length, "Z": t}, depth=3, bound=max(t, x_length))
    if rng.random() < 0.3:
        body = f"|Z| = {rng.randrange(t)} & ({body})"
    return body


@_timed(5, "binary-search witness is the least witness", 60)
def witnessing(res, rng):
    for _ in range(50):
        t = rng.randint(1, 8)
        x_length = rng.randint(1, 3)
        text = _random_matrix(rng, x_length, t)
        p = WitnessProblem(parse(text), t)
        for X in ("".join(b) for b in itertools.product("01", repeat=x_length)):
            res.cases += 1
            expected = next((z for z in strings_below(t) if p.holds(X, z)), None)
            got = binary_search_witness(p, X)
            if got != expected:
                res.failures.append(f"{text} at X={X}: {got!r} vs {expected!r}")


@_timed(6, "dWPHP range counting", 60)
def dwphp_counting(res, rng):
    for a in (2, 3, 4):
        for k in range(20):
            inst = rz.make_instance(a, "random", rng.randrange(1 << 30))
            rep = rz.dwphp_range_experiment(inst)
            res.cases += 1
            if not rep.passed:
                res.failures.append(f"a={a} family {k}: {rep.to_dict()}")
        for kind in ("injective", "constant"):
            rep = rz.dwphp_range_experiment(rz.make_instance(a, kind, a))
            res.cases += 1
            if not rep.passed:
                res.failures.append(f"a={a} {kind}: {rep.to_dict()}")
    rep = rz.dwphp_range_experiment(rz.make_instance(2, "injective"))
    res.cases += 1
    if not (rep.p_prime == 48 and rep.tight and Fraction(rep.p_prime, 64) == Fraction(3, 4)):
        res.failures.append(f"a=2 injective not tight: {rep.p_prime}")


def _brute_eval_R(c: rz.RandCircuit, a) -> Optional[int]:
    """Re-derive eval_R by looping over Z with point evaluation."""
    m = c.m
    block_vals = {}
    for b in c.blocks:
        count = sum(cc.eval_node(b, a, z) for z in itertools.product((0, 1), repeat=m))
        frac = Fraction(count, 2 ** m)
        if frac >= Fraction(3, 4):
            block_vals[b] = 1
        elif frac <= Fraction(1, 4):
            block_vals[b] = 0
        else:
            return None

    def ev(node):
        if node in block_vals:
            return block_vals[node]
        kind, x, y = cc.gate(node)
        if kind == cc.VAR:
            return a[x]
        if kind == cc.CONST:
            return x
        if kind == cc.NOT:
            return 1 - ev(x)
        return ev(x) & ev(y) if kind == cc.AND else ev(x) | ev(y)

    return ev(c.circuit.output)


def random_composite(rng: random.Random, n: int, m: int) -> rz.RandCircuit:
    """Outer circuit over inputs and 1-3 blocks, each a random circuit in p and z.

    Draws again whenever one block turns up inside another.
    """
    while True:
        blocks = []
        for _ in range(rng.randint(1, 3)):
            leaves = [cc.RVar(k) for k in range(m)] + [cc.Var(k) for k in range(n)]
            node = rng.choice(leaves[:m])
            for _ in range(rng.randint(1, 4)):
                other = rng.choice(leaves)
                node = rng.choice([cc.And, cc.Or])(node, other if rng.random() < 0.8 else cc.Not(other))
            blocks.append(node)
        outer = blocks[0]
        for b in blocks[1:] + [cc.Var(rng.randrange(n))]:
            outer = rng.choice([cc.And, cc.Or])(outer, b if rng.random() < 0.7 else cc.Not(b))
        try:
            return rz.RandCircuit(Circuit(outer, n, m), frozenset(blocks))
        except ValueError:
            continue


@_timed(7, "eval_R thresholds and composition", 30)
def eval_r_thresholds(res, rng):
    z = [cc.RVar(0), cc.RVar(1)]
    for node, want in ((cc.Or(*z), rz.TriBool.ONE), (cc.And(*z), rz.TriBool.ZERO),
                       (z[0], rz.TriBool.UNDEFINED)):
        res.cases += 1
        got = rz.eval_R(rz.RandCircuit.block(node, 0, 2), ())
        if got is not want:
            res.failures.append(f"{cc.to_infix(node)}: {got} instead of {want}")
    for k in range(50):
        n, m = rng.randint(1, 3), rng.randint(1, 10)
        c = random_composite(rng, n, m)
        for a in cc.all_assignments(n):
            res.cases += 1
            want = _brute_eval_R(c, a)
            got = rz.eval_R(c, a)
            if (None if got is rz.TriBool.UNDEFINED else got.value) != want:
                res.failures.append(f"composite {k} at {a}: {got} vs {want}")


def _wf_cases() -> List[tuple]:
    """(label, proof, expected validity) for dWPHP side conditions."""
    p0, p1, p2, p3, x = (cc.Var(k) for k in range(5))
    C = (x, cc.Not(x))
    D = ((p0,), (cc.And(p0, p1),))

    def proof(just, prefix=()):
        lines = [pf.ProofLine(i + 1, node, j) for i, (node, j) in enumerate(prefix)]
        lines.append(pf.ProofLine(len(lines) + 1, just.expected(), just))
        return pf.Proof(tuple(lines))

    ok = pf.DWPHP(2, 1, (2, 3), (4,), C, D)
    t_line = (cc.TRUE, pf.Axiom("T"))
    used_r = (cc.implies(p2, p2), pf.Axiom("K"))
    ident = pf.ProofBuilder()
    ident.identity(p2)
    return [
        ("fresh r, m=2 n=1", proof(ok), True),
        ("fresh r after an axiom", proof(ok, (t_line,)), True),
        ("r may occur inside D", proof(pf.DWPHP(2, 1, (2, 3), (4,), C, ((p2,), (p3,))), (t_line,)), True),
        ("r used in an earlier line", pf.Proof(tuple(ident.lines) + (
            pf.ProofLine(len(ident.lines) + 1, ok.expected(), ok),)), False),
        ("r occurs in C", proof(pf.DWPHP(2, 1, (2, 3), (4,), (cc.And(x, p2), x), D)), False),
        ("n not below m", proof(pf.DWPHP(1, 1, (2,), (4,), (x,), ((p0,),))), False),
        ("repeated r", proof(pf.DWPHP(2, 1, (2, 2), (4,), C, D)), False),
        ("r is an input slot", proof(pf.DWPHP(2, 1, (2, 4), (4,), C, D)), False),
        ("line is not the disjunction", pf.Proof((pf.ProofLine(1, cc.Not(ok.expected()), ok),)), False),
        ("dWPHP rejected by plain EF", None, False),
    ]


@_timed(8, "proof checkers", 120)
def proof_checkers(res, rng):
    for k in range(1000):
        p = pf.random_ef_proof(rng)
        res.cases += 2
        if not pf.is_valid(p):
            try:
                pf.check_ef(p)
            except Exception as exc:  # report the diagnosis
                res.failures.append(f"valid proof {k} rejected: {exc}")
            continue
        if len(p.variables()) > 10 or not pf.conclusion_is_tautology(p):
            res.failures.append(f"proof {k}: conclusion not a tautology")
        mutant, how = pf.mutate(p, rng)
        if pf.is_valid(mutant):
            res.failures.append(f"mutant {how} of proof {k} accepted")
    ok_proof = None
    for label, proof, expected in _wf_cases():
        res.cases += 1
        if proof is None:
            got = pf.is_valid(ok_proof)
        else:
            got = pf.is_valid(proof, wf=True)
            ok_proof = ok_proof or proof
        if got != expected:
            res.failures.append(f"WF case '{label}': accepted={got}")


@_timed(9, "consistent set to ideal", 30)
def consistent_ideal(res, rng):
    n = 3
    made = 0
    while made < 100:
        T = [AlgebraElement(n, rng.getrandbits(8)) for _ in range(rng.randint(1, 4))]
        if cc.meet_all(T, n).is_zero():
            continue
        made += 1
        res.cases += 1
        I = consistent_set_to_ideal(T, n)
        bad = ideal_law_failures(I)
        if bad:
            res.failures.append(f"ideal laws: {bad[0]}")
        for a in cc.all_assignments(n):
            if cc.atom(n, a) in I:
                continue
            if not all(t.value_at(a) for t in T):
                res.failures.append(f"atom filter {a} outside I misses a member of T")


def _direct_psi(phi, x: int, X: str, t: int) -> bool:
    return any(eval_standard(phi, {"x": x}, {"X": X, "Z": z}) for z in strings_below(t))


@_timed(10, "induction trichotomy", 60)
def induction_trichotomy(res, rng):
    for entry in INDUCTION_CORPUS:
        phi = parse(entry.text)
        n = 3
        X = BString(n, tuple(random_element(rng, n) for _ in range(entry.x_length)))
        for a in range(1, 9):
            for bits in cc.all_assignments(n):
                G = GenericFilter(bits)
                res.cases += 1
                tri = ind_trichotomy_check(phi, a, {"X": X}, G, t=entry.t)
                s = i_G(X, G)
                psi = [_direct_psi(phi, x, s, entry.t) for x in range(a + 1)]
                truth = set()
                if not psi[0]:
                    truth.add("a")
                if psi[a]:
                    truth.add("b")
                if any(psi[x] and not psi[x + 1] for x in range(a)):
                    truth.add("c")
                label = f"{entry.text} a={a} G={bits}"
                if set(tri.cases) != truth or not truth:
                    res.failures.append(f"{label}: {tri.cases} vs {sorted(truth)}")
                if tri.boundary is not None and not (psi[tri.boundary] and not psi[tri.boundary + 1]):
                    res.failures.append(f"{label}: boundary {tri.boundary} is wrong")


CRITERIA = (translation_equivalence, forcing_theorem, algebra_laws, mcv_values, witnessing,
            dwphp_counting, eval_r_thresholds, proof_checkers, consistent_ideal,
            induction_trichotomy)


def run_suite(seed: int = 0, only: Optional[Sequence[int]] = None) -> List[CriterionResult]:
    chosen = [c for c in CRITERIA if only is None or c.number in set(only)]
    return [c(seed) for c in chosen]
