"""Propositional translation of Sigma^B_0 formulas and Boolean values.

A string variable X with declared length b is laid out as input variables
p^X_0 .. p^X_{b-1}; ``|X|`` translates to ``b`` and ``X(i)`` with ``i >= b`` to
the constant 0.  Number atoms are decided outright and bounded number
quantifiers unfold into left-folded conjunctions/disjunctions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import circuits as cc
from .circuits import AlgebraElement, Circuit
from .config import LIMITS
from .errors import ArityError, BudgetExceeded, ClassError, ScaleError, UnboundVariableError
from .formula import (Conj, Disj, Eq, Formula, FormulaClass, Imp, Len, Leq, Member, Neg,
                      NumAll, NumEx, NumVar, Plus, StrAll, StrEx, Succ, Term, Times,
                      classify, free_vars, eval_term)


@dataclass(frozen=True)
class TranslationEnv:
    num_values: Mapping[str, int]
    str_bounds: Mapping[str, int]
    var_layout: Mapping[Tuple[str, int], int]

    @classmethod
    def make(cls, num_values=None, str_bounds=None, order: Optional[Sequence[str]] = None):
        """Lay out string variables consecutively (sorted by name unless ``order``)."""
        num_values = dict(num_values or {})
        str_bounds = dict(str_bounds or {})
        names = list(order) if order is not None else sorted(str_bounds)
        if sorted(names) != sorted(str_bounds):
            raise ValueError("layout order must list every bounded string variable once")
        layout = {}
        for name in names:
            for i in range(str_bounds[name]):
                layout[(name, i)] = len(layout)
        return cls(num_values, str_bounds, layout)

    def __post_init__(self):
        if len(set(self.var_layout.values())) != len(self.var_layout):
            raise ValueError("variable layout is not injective")

    @property
    def num_inputs(self) -> int:
        return max(self.var_layout.values()) + 1 if self.var_layout else 0

    def input_var(self, name: str, i: int) -> int:
        return self.var_layout[(name, i)]

    def split(self, bits: Sequence[int]) -> Dict[str, str]:
        """Read standard strings for every declared variable out of an assignment."""
        return {name: "".join(str(bits[self.var_layout[(name, i)]]) for i in range(b))
                for name, b in self.str_bounds.items()}


@dataclass(frozen=True)
class BString:
    """A circuit-valued string: ``length`` entries of one algebra."""

    n: int
    entries: Tuple[AlgebraElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for e in self.entries:
            if e.n != self.n:
                raise ArityError(f"entry over n={e.n} in a string over n={self.n}")
        if len(self.entries) > max(LIMITS.max_n, 64):
            raise ScaleError("string too long for desk scale")

    @property
    def length(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @classmethod
    def of(cls, entries: Iterable[AlgebraElement], n: Optional[int] = None) -> "BString":
        entries = tuple(entries)
        if n is None:
            if not entries:
                raise ArityError("cannot infer n of an empty string")
            n = entries[0].n
        return cls(n, entries)

    @classmethod
    def constant(cls, bits: str, n: int) -> "BString":
        return cls(n, tuple(cc.one(n) if b == "1" else cc.zero(n) for b in bits))

    @classmethod
    def of_vars(cls, indices: Iterable[int], n: int) -> "BString":
        return cls(n, tuple(cc.variable(k, n) for k in indices))


def translate_node(phi: Formula, env: TranslationEnv) -> int:
    """Translated circuit as a bare store node (no class check)."""
    budget = [LIMITS.max_expansion]
    numenv = dict(env.num_values)

    def term(t: Term) -> int:
        return eval_term(t, numenv, _LengthView(env.str_bounds))

    def tr(f: Formula) -> int:
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetExceeded("translation expansion budget exhausted")
        if isinstance(f, Eq):
            return cc.Const(term(f.left) == term(f.right))
        if isinstance(f, Leq):
            return cc.Const(term(f.left) <= term(f.right))
        if isinstance(f, Member):
            if f.name not in env.str_bounds:
                raise UnboundVariableError(f"no length declared for {f.name!r}")
            i = term(f.index)
            if i < env.str_bounds[f.name]:
                return cc.Var(env.input_var(f.name, i))
            return cc.FALSE
        if isinstance(f, Neg):
            return cc.Not(tr(f.body))
        if isinstance(f, Conj):
            return cc.And(tr(f.left), tr(f.right))
        if isinstance(f, Disj):
            return cc.Or(tr(f.left), tr(f.right))
        if isinstance(f, Imp):
            return cc.Or(cc.Not(tr(f.left)), tr(f.right))
        if isinstance(f, (NumAll, NumEx)):
            bound = term(f.bound)
            saved = numenv.get(f.var)
            parts = []
            try:
                for v in range(bound):
                    numenv[f.var] = v
                    parts.append(tr(f.body))
            finally:
                if saved is None:
                    numenv.pop(f.var, None)
                else:
                    numenv[f.var] = saved
            return cc.big_and(parts) if isinstance(f, NumAll) else cc.big_or(parts)
        raise ClassError("string quantifiers have no Sigma^B_0 translation")

    return tr(phi)


class _LengthView(dict):
    """String environment whose only observable is the declared length."""

    def __init__(self, bounds):
        super().__init__()
        self.bounds = bounds

    def __getitem__(self, name):
        try:
            return _Phantom(self.bounds[name])
        except KeyError:
            raise KeyError(name) from None

    def __contains__(self, name):
        return name in self.bounds


class _Phantom:
    __slots__ = ("n",)

    def __init__(self, n):
        self.n = n

    def __len__(self):
        return self.n


def _check_env(phi: Formula, env: TranslationEnv):
    if classify(phi) is not FormulaClass.SigmaB0:
        raise ClassError("translation needs a Sigma^B_0 formula")
    nums, strs = free_vars(phi)
    missing = sorted((nums - set(env.num_values)) | (strs - set(env.str_bounds)))
    if missing:
        raise UnboundVariableError(f"translation environment misses {', '.join(missing)}")


def translate_sigmaB0(phi: Formula, env: TranslationEnv) -> Circuit:
    _check_env(phi, env)
    return Circuit(translate_node(phi, env), env.num_inputs)


def _entry_map(env: TranslationEnv, args: Mapping[str, BString], n: Optional[int]):
    ns = {s.n for s in args.values()}
    if n is not None:
        ns.add(n)
    if len(ns) > 1:
        raise ArityError(f"arguments mix algebras over n in {sorted(ns)}")
    if not ns:
        raise ArityError("cannot determine n: no string arguments and no n given")
    n = ns.pop()
    for name, bound in env.str_bounds.items():
        if name not in args:
            raise UnboundVariableError(f"no circuit-valued string given for {name!r}")
        if args[name].length != bound:
            raise ArityError(
                f"{name} has length {args[name].length} but the declared bound is {bound}")
    entries = {}
    for (name, i), k in env.var_layout.items():
        entries[k] = args[name].entries[i]
    return n, entries


def bool_value(phi: Formula, env: TranslationEnv, args: Mapping[str, BString],
               n: Optional[int] = None) -> AlgebraElement:
    """Boolean value: the translation with string entries substituted for its inputs."""
    _check_env(phi, env)
    n, entries = _entry_map(env, args, n)
    node = translate_node(phi, env)
    return substitute_element(node, entries, n)


def substitute_element(node: int, entries: Mapping[int, AlgebraElement], n: int) -> AlgebraElement:
    """Element obtained by plugging algebra elements into a circuit's inputs."""
    witness = cc.substitute(node, {k: e.node for k, e in entries.items()})
    bits = cc.eval_tables(node, lambda kind, k: entries[k].bits, n)
    return AlgebraElement(n, bits, Circuit(witness, n))


@dataclass(frozen=True)
class CircuitFamily:
    """Bit circuits C_0..C_{t-1} of a function on circuit-valued strings.

    Inputs are laid out by ``signature``: the strings named there, in order,
    each contributing ``length`` consecutive input variables.
    """

    bit_circuits: Tuple[Circuit, ...]
    bound_term: int
    signature: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "bit_circuits", tuple(self.bit_circuits))
        object.__setattr__(self, "signature", tuple(tuple(s) for s in self.signature))
        if self.bound_term < 1:
            raise ValueError("bound term must be at least 1")
        if len(self.bit_circuits) != self.bound_term:
            raise ArityError(f"{len(self.bit_circuits)} bit circuits for bound {self.bound_term}")
        width = self.arity
        for c in self.bit_circuits:
            if c.num_input_vars != width:
                raise ArityError(f"bit circuit over {c.num_input_vars} inputs, family arity {width}")

    @property
    def arity(self) -> int:
        return sum(length for _, length in self.signature)

    def env(self) -> TranslationEnv:
        return TranslationEnv.make({}, dict(self.signature), [name for name, _ in self.signature])

    def apply(self, args: Mapping[str, BString]) -> List[AlgebraElement]:
        """Each C_i with the argument entries plugged in."""
        env = self.env()
        n, entries = _entry_map(env, args, None)
        return [substitute_element(c.output, entries, n) for c in self.bit_circuits]

    def evaluate(self, bits: Sequence[int]) -> str:
        """Standard output string on a concrete input assignment."""
        return "".join(str(cc.eval_node(c.output, bits)) for c in self.bit_circuits)


def bv_pv_equals(F: CircuitFamily, args: Mapping[str, BString], Z: BString) -> AlgebraElement:
    """Boolean value of ``F(args) = Z``; zero unless ``|Z|`` equals the bound."""
    outputs = F.apply(args)
    n = outputs[0].n
    if Z.n != n:
        raise ArityError(f"Z lives over n={Z.n}, arguments over n={n}")
    if Z.length != F.bound_term:
        return cc.zero(n)
    result = cc.one(n)
    for c_i, z_i in zip(outputs, Z.entries):
        result = cc.meet(result, cc.biconditional(c_i, z_i))
    return result


def parse_bounds(text: str) -> Tuple[Dict[str, int], Dict[str, int]]:
    """``"X=3,Y=2,x=1"`` -> (number values, string bounds)."""
    nums, strs = {}, {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ValueError(f"malformed binding {item!r}")
        (strs if name[:1].isupper() else nums)[name] = int(value)
    return nums, strs
