import random

import pytest
from hypothesis import given, strategies as st

from forcelab import circuits as cc
from forcelab.circuits import AlgebraElement
from forcelab.corpus import SIGMA_B0_CORPUS
from forcelab.errors import InconsistentSetError, LabError
from forcelab.formula import eval_standard, parse
from forcelab.generic import (DenseSet, GenericFilter, Ideal, below, build_generic,
                              consistent_set_to_ideal, forcing_check, i_G, ideal_law_failures,
                              ind_trichotomy_check, is_dense, meets, rasiowa_sikorski, realize,
                              zero_ideal)
from forcelab.mcv import random_element
from forcelab.translate import BString, TranslationEnv


def test_i_g_reads_entries():
    X = BString(1, (cc.variable(0, 1), cc.complement(cc.variable(0, 1))))
    assert i_G(X, GenericFilter((1,))) == "10"


def test_i_g_zero_entries():
    assert i_G(BString(2, (cc.zero(2),) * 3), GenericFilter((0, 1))) == "000"


def test_i_g_matches_entry_evaluation():
    rng = random.Random(4)
    X = BString(4, tuple(random_element(rng, 4) for _ in range(5)))
    for a in cc.all_assignments(4):
        expected = "".join(str(cc.eval(e.witness, a)) for e in X.entries)
        assert i_G(X, GenericFilter(a)) == expected


def test_ultrafilter_dichotomy():
    for bits in range(16):
        x = AlgebraElement(2, bits)
        for a in cc.all_assignments(2):
            G = GenericFilter(a)
            assert (x in G) != (cc.complement(x) in G)


# density

def test_complement_of_ideal_is_dense():
    I = Ideal(cc.variable(0, 2))
    assert is_dense(DenseSet("outside", lambda x: x not in I), I)


def test_singleton_one_not_dense():
    verdict = is_dense(DenseSet("one", lambda x: x.is_one()), zero_ideal(2))
    assert not verdict and verdict.witness is not None and not verdict.witness.is_one()


def test_below_outside_element_is_dense():
    # Z <= X0 is dense over I whenever X0 is outside I and I comes from the lemma
    T = [cc.variable(0, 2)]
    I = consistent_set_to_ideal(T)
    x0 = cc.join(cc.variable(0, 2), cc.variable(1, 2))
    assert x0 not in I
    D = DenseSet("below-or-in-I", lambda z: z <= x0)
    verdict = is_dense(D, I)
    assert verdict.dense is not None


def test_sampled_density_agrees_on_dense_set():
    I = Ideal(cc.variable(0, 3))
    D = DenseSet("outside", lambda x: x not in I)
    assert is_dense(D, I, mode="sampled", samples=200)


def test_finite_genericity():
    # every atom outside I meets every set dense over I
    I = Ideal(cc.variable(0, 2))
    dense = [DenseSet("outside", lambda x: x not in I)]
    for a in cc.all_assignments(2):
        G = GenericFilter(a)
        if G.atom in I:
            continue
        assert all(meets(G, D, I) for D in dense)


# generic filters

def test_build_generic_deterministic():
    I = zero_ideal(1)
    assert build_generic(I, seed=3) == build_generic(I, seed=3)
    assert build_generic(I, seed=3).atom_assignment in {(0,), (1,)}


def test_build_generic_avoids_ideal():
    I = Ideal(cc.complement(cc.variable(0, 2)))
    for seed in range(8):
        assert build_generic(I, seed=seed).atom_assignment[0] == 1


def test_build_generic_meets_falsifier_set():
    tau = cc.Or(cc.Var(0), cc.Var(1))
    falsified = cc.complement(AlgebraElement.from_node(tau, 2))
    I = consistent_set_to_ideal([falsified])
    D = below(falsified)
    assert is_dense(D, I)
    G = build_generic(I, [D], seed=0)
    assert falsified in G
    assert cc.eval_node(tau, G.atom_assignment) == 0


def test_build_generic_reports_non_dense():
    with pytest.raises(LabError):
        build_generic(zero_ideal(2), [DenseSet("none", lambda x: False)])


def test_rasiowa_sikorski_chain_descends():
    I = Ideal(cc.variable(0, 3))
    dense = [DenseSet("outside", lambda x: x not in I), below(cc.complement(cc.variable(0, 3)))]
    G, chain = rasiowa_sikorski(I, dense, seed=1)
    assert all(b <= a for a, b in zip(chain, chain[1:]))
    assert G.atom not in I and all(c in G for c in chain)


# realize and forcing

def test_realize_empty():
    assert realize({}, GenericFilter((1,))).strings == {}


def test_realize_single():
    assert realize({"X": BString.of_vars([0], 1)}, GenericFilter((1,))).strings == {"X": "1"}


def test_forcing_check_member():
    v = forcing_check(parse("X(0)"), TranslationEnv.make({}, {"X": 1}),
                      {"X": BString.of_vars([0], 1)}, GenericFilter((1,)))
    assert v.lhs and v.rhs and v.agree


def test_forcing_check_false_sentence():
    v = forcing_check(parse("1 = 2"), TranslationEnv.make({}, {}), {}, GenericFilter((0, 1)))
    assert v.lhs is False and v.rhs is False and v.agree


def test_forcing_verdict_json():
    v = forcing_check(parse("X(0)"), TranslationEnv.make({}, {"X": 1}),
                      {"X": BString.of_vars([0], 1)}, GenericFilter((0,)))
    assert '"agree": true' in v.to_json()


@given(st.integers(0, 2 ** 32))
def test_forcing_on_random_corpus_entry(seed):
    rng = random.Random(seed)
    entry = rng.choice(SIGMA_B0_CORPUS)
    n = rng.randint(1, 4)
    args = {k: BString(n, tuple(random_element(rng, n) for _ in range(b)))
            for k, b in entry.strs.items()}
    for a in cc.all_assignments(n):
        G = GenericFilter(a)
        v = forcing_check(entry.formula, entry.env(), args, G)
        # lhs recomputed by hand from per-entry evaluation
        strs = {k: "".join(str(cc.eval(e.witness, a)) for e in X.entries) for k, X in args.items()}
        assert v.lhs == eval_standard(entry.formula, dict(entry.nums), strs)
        assert v.agree


# consistent sets and ideals

def test_ideal_of_one_is_zero_ideal():
    assert consistent_set_to_ideal([cc.one(2)]).generator == cc.zero(2)


def test_ideal_of_single_variable():
    p0 = cc.variable(0, 1)
    I = consistent_set_to_ideal([p0])
    assert I.generator == cc.complement(p0)
    outside = [a for a in cc.all_assignments(1) if cc.atom(1, a) not in I]
    assert outside == [(1,)] and p0 in GenericFilter((1,))


def test_satisfiability_family_in_every_generic():
    # a small family of clauses with a common model
    n = 3
    T = [AlgebraElement.from_node(cc.Or(cc.Var(0), cc.Var(1)), n),
         AlgebraElement.from_node(cc.Or(cc.Not(cc.Var(0)), cc.Var(2)), n),
         AlgebraElement.from_node(cc.Or(cc.Var(1), cc.Var(2)), n)]
    I = consistent_set_to_ideal(T)
    assert ideal_law_failures(I) == []
    for a in cc.all_assignments(n):
        if cc.atom(n, a) not in I:
            assert all(t in GenericFilter(a) for t in T)


def test_inconsistent_set_rejected():
    x = cc.variable(0, 2)
    with pytest.raises(InconsistentSetError):
        consistent_set_to_ideal([x, cc.complement(x)])


# induction trichotomy

def test_trichotomy_boundary_at_zero():
    tri = ind_trichotomy_check(parse("x = 0"), 2, {}, GenericFilter((0,)))
    assert tri.cases == ("c",) and tri.boundary == 0


def test_trichotomy_always_true():
    tri = ind_trichotomy_check(parse("x = x"), 3, {}, GenericFilter((1,)))
    assert tri.case == "b"


def test_trichotomy_on_strings():
    X = BString(2, (cc.one(2), cc.variable(0, 2), cc.zero(2)))
    phi = parse("A y < x + 1 . X(y)")
    for a in cc.all_assignments(2):
        tri = ind_trichotomy_check(phi, 2, {"X": X}, GenericFilter(a))
        expected_boundary = 1 if a[0] else 0
        assert tri.boundary == expected_boundary
