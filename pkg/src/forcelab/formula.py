"""Two-sort bounded-arithmetic formulas: AST, parser, classifier, evaluator.

Surface syntax::

    formula := "!" formula | formula ("&" | "|" | "->" | "<->") formula
             | ("A" | "E") var "<" term "." formula | atom | "(" formula ")"
    atom    := term ("=" | "<=" | "<") term | STRVAR "(" term ")"
    term    := "0" | NAT | numvar | term "+" term | term "*" term
             | "s(" term ")" | "|" STRVAR "|" | "(" term ")"

Uppercase identifiers are string variables, lowercase ones number variables.
``t < u`` is read as ``s(t) <= u`` and ``a <-> b`` as ``(a -> b) & (b -> a)``.
A quantifier body extends as far to the right as possible.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Set, Tuple, Union

from .config import LIMITS
from .errors import BudgetExceeded, ParseError, ScaleError, UnboundVariableError


# -- terms --------------------------------------------------------------------

@dataclass(frozen=True)
class Zero:
    kind = "ZERO"


@dataclass(frozen=True)
class Num:
    value: int
    kind = "NUMLIT"


@dataclass(frozen=True)
class NumVar:
    name: str
    kind = "NUMVAR"


@dataclass(frozen=True)
class Succ:
    arg: "Term"
    kind = "SUCC"


@dataclass(frozen=True)
class Plus:
    left: "Term"
    right: "Term"
    kind = "PLUS"


@dataclass(frozen=True)
class Times:
    left: "Term"
    right: "Term"
    kind = "TIMES"


@dataclass(frozen=True)
class Len:
    name: str
    kind = "LEN"


Term = Union[Zero, Num, NumVar, Succ, Plus, Times, Len]


# -- formulas -----------------------------------------------------------------

@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term
    kind = "EQ"


@dataclass(frozen=True)
class Leq:
    left: Term
    right: Term
    kind = "LEQ"


@dataclass(frozen=True)
class Member:
    name: str
    index: Term
    kind = "MEMBER"


@dataclass(frozen=True)
class Neg:
    body: "Formula"
    kind = "NOT"


@dataclass(frozen=True)
class Conj:
    left: "Formula"
    right: "Formula"
    kind = "AND"


@dataclass(frozen=True)
class Disj:
    left: "Formula"
    right: "Formula"
    kind = "OR"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"
    kind = "IMP"


@dataclass(frozen=True)
class NumAll:
    var: str
    bound: Term
    body: "Formula"
    kind = "BNUMALL"


@dataclass(frozen=True)
class NumEx:
    var: str
    bound: Term
    body: "Formula"
    kind = "BNUMEX"


@dataclass(frozen=True)
class StrAll:
    var: str
    bound: Term
    body: "Formula"
    kind = "BSTRALL"


@dataclass(frozen=True)
class StrEx:
    var: str
    bound: Term
    body: "Formula"
    kind = "BSTREX"


Formula = Union[Eq, Leq, Member, Neg, Conj, Disj, Imp, NumAll, NumEx, StrAll, StrEx]
Quantifier = (NumAll, NumEx, StrAll, StrEx)
Binary = (Conj, Disj, Imp)


def is_str_name(name: str) -> bool:
    return name[:1].isupper()


def term_vars(t: Term) -> Tuple[Set[str], Set[str]]:
    """(number variables, string variables) of a term."""
    if isinstance(t, NumVar):
        return {t.name}, set()
    if isinstance(t, Len):
        return set(), {t.name}
    if isinstance(t, Succ):
        return term_vars(t.arg)
    if isinstance(t, (Plus, Times)):
        a, b = term_vars(t.left), term_vars(t.right)
        return a[0] | b[0], a[1] | b[1]
    return set(), set()


def free_vars(phi: Formula) -> Tuple[Set[str], Set[str]]:
    """(free number variables, free string variables)."""
    if isinstance(phi, (Eq, Leq)):
        a, b = term_vars(phi.left), term_vars(phi.right)
        return a[0] | b[0], a[1] | b[1]
    if isinstance(phi, Member):
        nums, strs = term_vars(phi.index)
        return nums, strs | {phi.name}
    if isinstance(phi, Neg):
        return free_vars(phi.body)
    if isinstance(phi, Binary):
        a, b = free_vars(phi.left), free_vars(phi.right)
        return a[0] | b[0], a[1] | b[1]
    bn, bs = term_vars(phi.bound)
    nums, strs = free_vars(phi.body)
    if isinstance(phi, (NumAll, NumEx)):
        nums = nums - {phi.var}
    else:
        strs = strs - {phi.var}
    return nums | bn, strs | bs


def free_num_vars(phi: Formula) -> Set[str]:
    return free_vars(phi)[0]


def free_str_vars(phi: Formula) -> Set[str]:
    return free_vars(phi)[1]


def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    if isinstance(phi, Neg):
        yield from subformulas(phi.body)
    elif isinstance(phi, Binary):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif isinstance(phi, Quantifier):
        yield from subformulas(phi.body)


def all_names(phi: Formula) -> Set[str]:
    names: Set[str] = set()
    for sub in subformulas(phi):
        nums, strs = free_vars(sub)
        names |= nums | strs
        if isinstance(sub, Quantifier):
            names.add(sub.var)
    return names


# -- printing -----------------------------------------------------------------

def term_to_text(t: Term) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, NumVar):
        return t.name
    if isinstance(t, Succ):
        return f"s({term_to_text(t.arg)})"
    if isinstance(t, Len):
        return f"|{t.name}|"
    op = "+" if isinstance(t, Plus) else "*"
    return f"({term_to_text(t.left)} {op} {term_to_text(t.right)})"


def to_text(phi: Formula) -> str:
    if isinstance(phi, Eq):
        return f"{term_to_text(phi.left)} = {term_to_text(phi.right)}"
    if isinstance(phi, Leq):
        return f"{term_to_text(phi.left)} <= {term_to_text(phi.right)}"
    if isinstance(phi, Member):
        return f"{phi.name}({term_to_text(phi.index)})"
    if isinstance(phi, Neg):
        inner = to_text(phi.body)
        if isinstance(phi.body, (Member, Neg)):
            return "!" + inner
        return f"!({inner})"
    if isinstance(phi, Binary):
        op = {Conj: "&", Disj: "|", Imp: "->"}[type(phi)]
        return f"{_operand(phi.left)} {op} {_operand(phi.right)}"
    q = "A" if isinstance(phi, (NumAll, StrAll)) else "E"
    return f"{q} {phi.var} < {term_to_text(phi.bound)} . {to_text(phi.body)}"


def _operand(phi: Formula) -> str:
    text = to_text(phi)
    if isinstance(phi, (Member, Neg)):
        return text
    return f"({text})"


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><->|->|<=|[()<=.!&|+*])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str       # "num" | "ident" | "op" | "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            chunk = m.group()
            for i, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.positions: Dict[str, Tuple[int, int]] = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message, tok=None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        return ParseError(f"{message}, found {found!r}", tok.line, tok.col)

    def accept(self, text) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            raise self.error(f"expected {text!r}")

    def ident(self) -> str:
        tok = self.tok
        if tok.kind != "ident":
            raise self.error("expected identifier")
        self.i += 1
        self.positions.setdefault(tok.text, (tok.line, tok.col))
        return tok.text

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Imp(left, self.formula())
        if self.accept("<->"):
            right = self.formula()
            return Conj(Imp(left, right), Imp(right, left))
        return left

    def disjunction(self) -> Formula:
        node = self.conjunction()
        while self.accept("|"):
            node = Disj(node, self.conjunction())
        return node

    def conjunction(self) -> Formula:
        node = self.unary()
        while self.accept("&"):
            node = Conj(node, self.unary())
        return node

    def unary(self) -> Formula:
        tok = self.tok
        if self.accept("!"):
            return Neg(self.unary())
        if tok.kind == "ident" and tok.text in ("A", "E") and self.peek().kind == "ident":
            self.i += 1
            var = self.ident()
            self.expect("<")
            bound = self.term()
            self.expect(".")
            body = self.formula()
            universal = tok.text == "A"
            if is_str_name(var):
                return (StrAll if universal else StrEx)(var, bound, body)
            return (NumAll if universal else NumEx)(var, bound, body)
        if tok.kind == "op" and tok.text == "(":
            start = self.i
            try:
                return self.comparison()
            except ParseError as first:
                self.i = start
                self.i += 1
                try:
                    inner = self.formula()
                    self.expect(")")
                except ParseError as second:
                    raise max(first, second, key=lambda e: (e.line, e.column)) from None
                return inner
        if tok.kind == "ident" and is_str_name(tok.text) and self.peek().text == "(":
            name = self.ident()
            self.expect("(")
            index = self.term()
            self.expect(")")
            return Member(name, index)
        return self.comparison()

    def comparison(self) -> Formula:
        left = self.term()
        if self.accept("="):
            return Eq(left, self.term())
        if self.accept("<="):
            return Leq(left, self.term())
        if self.accept("<"):
            return Leq(Succ(left), self.term())
        raise self.error("expected comparison '=', '<=' or '<'")

    def term(self) -> Term:
        node = self.product()
        while self.accept("+"):
            node = Plus(node, self.product())
        return node

    def product(self) -> Term:
        node = self.primary()
        while self.accept("*"):
            node = Times(node, self.primary())
        return node

    def primary(self) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            value = int(tok.text)
            return Zero() if value == 0 else Num(value)
        if self.accept("|"):
            name = self.ident()
            if not is_str_name(name):
                raise ParseError(f"|{name}| needs a string variable", tok.line, tok.col)
            self.expect("|")
            return Len(name)
        if self.accept("("):
            inner = self.term()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            if tok.text == "s" and self.peek().text == "(":
                self.i += 2
                inner = self.term()
                self.expect(")")
                return Succ(inner)
            if is_str_name(tok.text):
                raise self.error("string variable used as a number term")
            return NumVar(self.ident())
        raise self.error("expected term")


def parse(text: str, free: Optional[Set[str]] = None) -> Formula:
    """Parse formula text; bound variables clashing with outer names are renamed.

    When ``free`` is given, every free variable must belong to it.
    """
    p = _Parser(text)
    phi = p.formula()
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    nums, strs = free_vars(phi)
    if free is not None:
        for name in sorted((nums | strs) - set(free)):
            line, col = p.positions.get(name, (None, None))
            raise UnboundVariableError(f"unbound variable {name!r}", line, col)
    return _resolve(phi, nums | strs)


def _resolve(phi: Formula, free: Set[str]) -> Formula:
    taken = all_names(phi)

    def fresh(name):
        for k in itertools.count(1):
            cand = f"{name}_{k}"
            if cand not in taken:
                taken.add(cand)
                return cand

    def term(t: Term, ren: Dict[str, str]) -> Term:
        if isinstance(t, NumVar):
            return NumVar(ren.get(t.name, t.name))
        if isinstance(t, Len):
            return Len(ren.get(t.name, t.name))
        if isinstance(t, Succ):
            return Succ(term(t.arg, ren))
        if isinstance(t, (Plus, Times)):
            return type(t)(term(t.left, ren), term(t.right, ren))
        return t

    def walk(f: Formula, ren: Dict[str, str], scope: Set[str]) -> Formula:
        if isinstance(f, (Eq, Leq)):
            return type(f)(term(f.left, ren), term(f.right, ren))
        if isinstance(f, Member):
            return Member(ren.get(f.name, f.name), term(f.index, ren))
        if isinstance(f, Neg):
            return Neg(walk(f.body, ren, scope))
        if isinstance(f, Binary):
            return type(f)(walk(f.left, ren, scope), walk(f.right, ren, scope))
        bound = term(f.bound, ren)
        var = f.var
        new = fresh(var) if var in free or var in scope else var
        inner = dict(ren)
        inner[var] = new
        return type(f)(new, bound, walk(f.body, inner, scope | {new}))

    return walk(phi, {}, set())


# -- classification -----------------------------------------------------------

class FormulaClass(enum.Enum):
    SigmaB0 = "SigmaB0"
    SigmaB1 = "SigmaB1"
    Other = "Other"


def classify(phi: Formula) -> FormulaClass:
    """Purely syntactic class; polarity flips under ``!`` and left of ``->``."""
    has_str_q = False
    ok = True

    def walk(f: Formula, positive: bool):
        nonlocal has_str_q, ok
        if isinstance(f, Neg):
            walk(f.body, not positive)
        elif isinstance(f, Imp):
            walk(f.left, not positive)
            walk(f.right, positive)
        elif isinstance(f, (Conj, Disj)):
            walk(f.left, positive)
            walk(f.right, positive)
        elif isinstance(f, (NumAll, NumEx)):
            walk(f.body, positive)
        elif isinstance(f, (StrAll, StrEx)):
            has_str_q = True
            if isinstance(f, StrEx) != positive:
                ok = False
            walk(f.body, positive)

    walk(phi, True)
    if not has_str_q:
        return FormulaClass.SigmaB0
    return FormulaClass.SigmaB1 if ok else FormulaClass.Other


# -- standard semantics -------------------------------------------------------

def strings_below(t: int) -> Iterator[str]:
    """All bit strings of length < t, shortest first, then lexicographic."""
    for length in range(t):
        for bits in itertools.product("01", repeat=length):
            yield "".join(bits)


def eval_term(t: Term, numenv: Mapping[str, int], strenv: Mapping[str, str]) -> int:
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Num):
        return t.value
    if isinstance(t, NumVar):
        try:
            return numenv[t.name]
        except KeyError:
            raise UnboundVariableError(f"number variable {t.name!r} has no value") from None
    if isinstance(t, Len):
        try:
            return len(strenv[t.name])
        except KeyError:
            raise UnboundVariableError(f"string variable {t.name!r} has no value") from None
    if isinstance(t, Succ):
        return eval_term(t.arg, numenv, strenv) + 1
    left = eval_term(t.left, numenv, strenv)
    right = eval_term(t.right, numenv, strenv)
    return left + right if isinstance(t, Plus) else left * right


def eval_standard(phi: Formula, numenv: Optional[Mapping[str, int]] = None,
                  strenv: Optional[Mapping[str, str]] = None,
                  budget: Optional[int] = None) -> bool:
    """Truth of ``phi`` in the standard finite two-sort structure.

    Strings are '0'/'1' text; bit i of X reads false when i >= |X|.
    String quantifiers enumerate every string shorter than the bound.
    """
    numenv = dict(numenv or {})
    strenv = {k: _bitstr(v) for k, v in (strenv or {}).items()}
    remaining = [LIMITS.max_expansion if budget is None else budget]

    def spend(k=1):
        remaining[0] -= k
        if remaining[0] < 0:
            raise BudgetExceeded("evaluation budget exhausted")

    def ev(f: Formula) -> bool:
        spend()
        if isinstance(f, Eq):
            return eval_term(f.left, numenv, strenv) == eval_term(f.right, numenv, strenv)
        if isinstance(f, Leq):
            return eval_term(f.left, numenv, strenv) <= eval_term(f.right, numenv, strenv)
        if isinstance(f, Member):
            try:
                s = strenv[f.name]
            except KeyError:
                raise UnboundVariableError(f"string variable {f.name!r} has no value") from None
            i = eval_term(f.index, numenv, strenv)
            return i < len(s) and s[i] == "1"
        if isinstance(f, Neg):
            return not ev(f.body)
        if isinstance(f, Conj):
            return ev(f.left) and ev(f.right)
        if isinstance(f, Disj):
            return ev(f.left) or ev(f.right)
        if isinstance(f, Imp):
            return (not ev(f.left)) or ev(f.right)
        bound = eval_term(f.bound, numenv, strenv)
        universal = isinstance(f, (NumAll, StrAll))
        if isinstance(f, (NumAll, NumEx)):
            env, values = numenv, range(bound)
        else:
            if bound > LIMITS.max_n:
                raise ScaleError(f"string quantifier bound {bound} exceeds {LIMITS.max_n}")
            spend((1 << bound) - 1)
            env, values = strenv, strings_below(bound)
        saved = env.get(f.var, _MISSING)
        try:
            for v in values:
                env[f.var] = v
                if ev(f.body) != universal:
                    return not universal
            return universal
        finally:
            if saved is _MISSING:
                env.pop(f.var, None)
            else:
                env[f.var] = saved

    return ev(phi)


_MISSING = object()


def _bitstr(value) -> str:
    if isinstance(value, str):
        if set(value) - {"0", "1"}:
            raise ValueError(f"not a bit string: {value!r}")
        return value
    return "".join("1" if b else "0" for b in value)
