import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from forcelab import circuits as cc
from forcelab import randomized as rz
from forcelab.circuits import Circuit
from forcelab.errors import UnresolvedError
from forcelab.randomized import RandCircuit, TriBool, eval_R
from forcelab.suite import random_composite

z0, z1, z2 = cc.RVar(0), cc.RVar(1), cc.RVar(2)
p0, p1 = cc.Var(0), cc.Var(1)


def test_three_quarters_is_one():
    assert eval_R(RandCircuit.block(cc.Or(z0, z1), 0, 2), ()) is TriBool.ONE


def test_one_quarter_is_zero():
    assert eval_R(RandCircuit.block(cc.And(z0, z1), 0, 2), ()) is TriBool.ZERO


def test_half_is_undefined():
    assert eval_R(RandCircuit.block(z0, 0, 2), ()) is TriBool.UNDEFINED


def test_threshold_is_exact():
    # m=3: 6/8 is 1, 5/8 undefined, 2/8 is 0, 3/8 undefined
    assert rz.threshold(6, 3) is TriBool.ONE
    assert rz.threshold(5, 3) is TriBool.UNDEFINED
    assert rz.threshold(2, 3) is TriBool.ZERO
    assert rz.threshold(3, 3) is TriBool.UNDEFINED


def test_plain_circuit_defers_to_eval():
    c = Circuit(cc.Or(cc.And(p0, cc.Not(p1)), p1), 2)
    for a in cc.all_assignments(2):
        assert eval_R(RandCircuit.plain(c), a).value == cc.eval(c, a)


def test_undefined_block_propagates():
    outer = cc.Or(p0, z0)
    c = RandCircuit(Circuit(outer, 1, 2), frozenset({z0}))
    assert eval_R(c, (1,)) is TriBool.UNDEFINED


def test_random_variable_outside_block_rejected():
    with pytest.raises(ValueError):
        RandCircuit(Circuit(cc.And(p0, z0), 1, 1), frozenset())


def test_block_reads_inputs():
    blk = cc.Or(cc.And(p0, z0), cc.And(p0, z1))
    c = RandCircuit.block(blk, 1, 2)
    assert eval_R(c, (0,)) is TriBool.ZERO
    assert eval_R(c, (1,)) is TriBool.ONE


def test_unused_random_variables_leave_value_unchanged():
    blk = cc.Or(cc.And(p0, z0), z1)
    for m in (2, 3, 5):
        c = RandCircuit.block(blk, 1, m)
        counts = [rz.block_count(blk, 1, m, a) for a in cc.all_assignments(1)]
        assert counts == [2 ** (m - 2) * k for k in (2, 3)]
        assert [eval_R(c, a) for a in cc.all_assignments(1)] == [TriBool.UNDEFINED, TriBool.ONE]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_composite_matches_brute_force(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 3), rng.randint(1, 6)
    c = random_composite(rng, n, m)
    for a in cc.all_assignments(n):
        vals = {}
        for b in c.blocks:
            frac = Fraction(sum(cc.eval_node(b, a, z) for z in itertools.product((0, 1), repeat=m)), 2 ** m)
            vals[b] = 1 if frac >= Fraction(3, 4) else 0 if frac <= Fraction(1, 4) else None
        got = eval_R(c, a)
        if None in vals.values():
            assert got is TriBool.UNDEFINED
            continue
        consts = {cc.Var(k): cc.Const(a[k]) for k in range(n)}
        consts.update((b, cc.Const(v)) for b, v in vals.items())
        assert got.value == _eval_replacing(c.circuit.output, consts)


def _eval_replacing(node, consts):
    if node in consts:
        return cc.gate(consts[node])[1]
    kind, x, y = cc.gate(node)
    if kind == cc.CONST:
        return x
    if kind == cc.NOT:
        return 1 - _eval_replacing(x, consts)
    l, r = _eval_replacing(x, consts), _eval_replacing(y, consts)
    return l & r if kind == cc.AND else l | r


# the resolved algebra

def test_leq_r_on_plain_circuits_is_leq_a():
    x, y = Circuit(cc.And(p0, p1), 2), Circuit(p0, 2)
    assert rz.leq_R(RandCircuit.plain(x), RandCircuit.plain(y))
    assert not rz.leq_R(RandCircuit.plain(y), RandCircuit.plain(x))


def test_majority_block_equals_true():
    assert rz.eq_R(RandCircuit.block(cc.Or(z0, z1), 0, 2), RandCircuit.plain(Circuit(cc.TRUE, 0)))


def test_unresolved_raises_with_assignment():
    with pytest.raises(UnresolvedError) as info:
        rz.resolved_table(RandCircuit.block(cc.And(p0, z0), 1, 1))
    assert info.value.assignment == (1,)


def test_seeded_resolved_pair_against_double_loop():
    rng = random.Random(21)
    n, m = 4, 3
    found = 0
    while found < 5:
        c1, c2 = random_composite(rng, n, m), random_composite(rng, n, m)
        if not (rz.is_resolved(c1) and rz.is_resolved(c2)):
            continue
        found += 1

        def brute(c, a):
            vals = {}
            for b in c.blocks:
                cnt = sum(cc.eval_node(b, a, z) for z in itertools.product((0, 1), repeat=m))
                vals[b] = int(4 * cnt >= 3 * 2 ** m)
            consts = {cc.Var(k): cc.Const(a[k]) for k in range(n)}
            consts.update((b, cc.Const(v)) for b, v in vals.items())
            return _eval_replacing(c.circuit.output, consts)

        expected = all(brute(c1, a) <= brute(c2, a) for a in cc.all_assignments(n))
        assert rz.leq_R(c1, c2) == expected


def test_resolved_fragment_laws():
    rng = random.Random(2)
    elems = []
    while len(elems) < 6:
        c = random_composite(rng, 3, 3)
        if rz.is_resolved(c):
            elems.append(rz.resolved_element(c))
    for x, y, z in itertools.product(elems, repeat=3):
        assert x & (y | z) == (x & y) | (x & z)
        assert ~(x & y) == ~x | ~y


# dWPHP counting

def brute_p_prime(inst):
    a = inst.a
    image = {inst.apply(x) for x in itertools.product((0, 1), repeat=a)}
    return sum(1 for b in itertools.product("01", repeat=2 * a)
               for _ in itertools.product((0, 1), repeat=a) if "".join(b) not in image)


def test_injective_a2_is_tight():
    r = rz.dwphp_range_experiment(rz.make_instance(2, "injective"))
    assert r.range_size == 4 and r.p_prime == 48 and r.tight
    assert Fraction(r.p_prime, 64) == Fraction(3, 4)


def test_constant_a2():
    r = rz.dwphp_range_experiment(rz.make_instance(2, "constant", 5))
    assert r.range_size == 1 and r.p_prime == 60 and r.passed and not r.tight


def test_seeded_a3_family():
    r = rz.dwphp_range_experiment(rz.make_instance(3, "random", 13))
    assert r.p_prime >= 448 and r.fraction >= 7 / 8
    assert r.p_prime == brute_p_prime(rz.make_instance(3, "random", 13))


@pytest.mark.parametrize("a", [2, 3, 4, 5])
def test_bound_and_equality_only_when_injective(a):
    for seed in range(4):
        inst = rz.make_instance(a, "random", seed)
        r = rz.dwphp_range_experiment(inst)
        assert r.bound_holds and r.identity_holds
        injective = r.range_size == 2 ** a
        assert r.tight == injective


def test_family_circuits_compute_the_table():
    inst = rz.make_instance(3, "random", 4)
    rng = random.Random(4)
    table = {x: "".join(rng.choice("01") for _ in range(6)) for x in cc.all_assignments(3)}
    assert all(inst.apply(x) == table[x] for x in table)


def test_surjection_hypothesis_fails():
    res = rz.dwphp_surjection_set(2, 1, [p0, cc.Not(p0)], [p0])
    assert not res.ok and "11" in res.missing


def test_surjection_needs_n_below_m():
    with pytest.raises(ValueError):
        rz.dwphp_surjection_set(2, 2, [p0, p1], [p0, p1])


def test_surjection_with_free_block():
    res = rz.dwphp_surjection_set(2, 1, [cc.Var(1), cc.Var(2)], [cc.Var(0)], k=3)
    assert res.ok and len(res.premises.elements) == 4
    assert all(e.is_one() for e in res.premises.elements)
    assert not res.premises.meet().is_zero()


def test_fresh_variables():
    assert rz.fresh_variables([0, 3, 1], 2) == (4, 5)
    assert rz.fresh_variables([], 2, floor=10) == (10, 11)


def test_rand_circuit_file_round_trip():
    blk = cc.Or(cc.And(p0, z0), z1)
    c = RandCircuit(Circuit(cc.And(blk, p1), 2, 2), frozenset({blk}))
    back = RandCircuit.from_file(cc.parse_circuit_file(c.dumps()))
    assert back == c
