import itertools

import pytest

from forcelab import circuits as cc
from forcelab.circuits import AlgebraElement, Circuit
from forcelab.corpus import SIGMA_B0_CORPUS
from forcelab.errors import ArityError, ClassError, UnboundVariableError
from forcelab.formula import eval_standard, parse
from forcelab.translate import (BString, CircuitFamily, TranslationEnv, bool_value, bv_pv_equals,
                                parse_bounds, translate_sigmaB0)

p0, p1, p2 = cc.Var(0), cc.Var(1), cc.Var(2)


def env(**strs):
    return TranslationEnv.make({}, strs)


def test_translate_conjunction():
    assert translate_sigmaB0(parse("X(0)&X(1)"), env(X=2)).output == cc.And(p0, p1)


def test_translate_existential_expands_to_disjunction():
    c = translate_sigmaB0(parse("E x<3 . X(x)"), env(X=3))
    assert c.output == cc.Or(cc.Or(p0, p1), p2)


def test_closed_numeric_sentence():
    assert translate_sigmaB0(parse("2+2=4"), env()).output == cc.TRUE
    assert translate_sigmaB0(parse("3*3 <= 8"), env()).output == cc.FALSE


def test_length_is_declared_bound():
    assert translate_sigmaB0(parse("|X| = 3"), env(X=3)).output == cc.TRUE


def test_member_past_bound_is_false():
    assert translate_sigmaB0(parse("X(4)"), env(X=2)).output == cc.FALSE


def test_translate_rejects_string_quantifier():
    with pytest.raises(ClassError):
        translate_sigmaB0(parse("E Z<2 . Z(0)"), env())


def test_translate_needs_bounds():
    with pytest.raises(UnboundVariableError):
        translate_sigmaB0(parse("X(0)"), env())


def test_translation_agrees_exhaustively_on_corpus():
    # the translation soundness property, independently of the suite code
    for entry in SIGMA_B0_CORPUS:
        phi, e = entry.formula, entry.env()
        c = translate_sigmaB0(phi, e)
        for bits in itertools.product((0, 1), repeat=e.num_inputs):
            strs = {name: "".join(str(bits[e.input_var(name, i)]) for i in range(b))
                    for name, b in e.str_bounds.items()}
            assert cc.eval(c, bits) == eval_standard(phi, dict(entry.nums), strs), entry.text


# Boolean values

def test_bval_single_member_is_entry():
    x = cc.variable(1, 3)
    v = bool_value(parse("X(0)"), env(X=1), {"X": BString(3, (x,))})
    assert v == x


def test_bval_contradiction_is_zero():
    x = AlgebraElement(2, 0b0110)
    v = bool_value(parse("X(0) & !X(0)"), env(X=1), {"X": BString(2, (x,))})
    assert v.is_zero()


def test_bval_forall_is_meet():
    X = BString.of_vars([0, 1], 2)
    v = bool_value(parse("A x<2 . X(x)"), env(X=2), {"X": X})
    assert v.table == cc.truth_table(Circuit(cc.And(p0, p1), 2))


def test_bval_length_mismatch():
    with pytest.raises(ArityError):
        bool_value(parse("X(0)"), env(X=2), {"X": BString.of_vars([0], 2)})


def test_bval_mixed_algebras_rejected():
    with pytest.raises(ArityError):
        bool_value(parse("X(0) & Y(0)"), env(X=1, Y=1),
                   {"X": BString.of_vars([0], 1), "Y": BString.of_vars([0], 2)})


# PV equality

def identity_family(k):
    return CircuitFamily(tuple(Circuit(cc.Var(i), k) for i in range(k)), k, (("X", k),))


def test_pv_identity_equals_self():
    X = BString.of_vars([0, 1], 2)
    assert bv_pv_equals(identity_family(2), {"X": X}, X).is_one()


def test_pv_wrong_length_is_zero():
    X = BString.of_vars([0, 1], 2)
    assert bv_pv_equals(identity_family(2), {"X": X}, BString.of_vars([0], 2)).is_zero()


def test_pv_bitwise_not():
    fam = CircuitFamily(tuple(Circuit(cc.Not(cc.Var(i)), 2) for i in range(2)), 2, (("X", 2),))
    X = BString.of_vars([0, 1], 2)
    Z = BString(2, tuple(cc.complement(e) for e in X.entries))
    assert bv_pv_equals(fam, {"X": X}, Z).is_one()
    assert not bv_pv_equals(fam, {"X": X}, X).is_one()


def test_pv_one_iff_rows_agree():
    fam = CircuitFamily((Circuit(cc.And(p0, p1), 2),), 1, (("X", 2),))
    X = BString.of_vars([0, 1], 2)
    for bits in range(16):
        Z = BString(2, (AlgebraElement(2, bits),))
        assert bv_pv_equals(fam, {"X": X}, Z).is_one() == (bits == 0b1000)


def test_parse_bounds():
    assert parse_bounds("X=3, k=2,Y=1") == ({"k": 2}, {"X": 3, "Y": 1})
    with pytest.raises(ValueError):
        parse_bounds("X")
