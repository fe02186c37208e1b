import itertools
import random

import pytest

from forcelab import circuits as cc
from forcelab import proofs as pf
from forcelab.circuits import AlgebraElement
from forcelab.errors import FormatError, ProofError
from forcelab.proofs import (DWPHP, MP, Axiom, Entailment, Ext, Premise, Proof, ProofBuilder,
                             ProofLine, PremiseSet)
from forcelab.randomized import dwphp_surjection_set

p0, p1, p2, p3, p4 = (cc.Var(k) for k in range(5))


def lines(*items):
    return Proof(tuple(ProofLine(i + 1, node, just) for i, (node, just) in enumerate(items)))


def tautology(node):
    vs = cc.variables(node)
    n = max(vs) + 1 if vs else 0
    return all(cc.eval_node(node, a) for a in itertools.product((0, 1), repeat=n))


# EF

def test_axiom_instance_accepted():
    phi, psi = cc.And(p0, p1), cc.Not(p2)
    assert pf.check_ef(lines((cc.implies(phi, cc.implies(psi, phi)), Axiom("K"))))


def test_wrong_scheme_rejected():
    with pytest.raises(ProofError) as info:
        pf.check_ef(lines((cc.implies(p0, p1), Axiom("K"))))
    assert info.value.line == 1


def test_extension_variable_in_conclusion_rejected():
    with pytest.raises(ProofError, match="conclusion"):
        pf.check_ef(lines((cc.iff(p3, cc.And(p0, p1)), Ext(3))))


def test_extension_variable_in_definition_rejected():
    b = ProofBuilder()
    b.lines.append(ProofLine(1, cc.iff(p3, cc.Or(p3, p0)), Ext(3)))
    b.identity(p0)
    with pytest.raises(ProofError, match="definition"):
        pf.check_ef(b.build())


def test_modus_ponens():
    b = ProofBuilder()
    end = b.identity(cc.Or(p0, p1))
    p = b.build(end)
    assert pf.check_ef(p) and len(p) == 5
    assert p.conclusion == cc.implies(cc.Or(p0, p1), cc.Or(p0, p1))


def test_mp_forward_reference_rejected():
    with pytest.raises(ProofError, match="earlier"):
        pf.check_ef(lines((cc.TRUE, Axiom("T")), (p0, MP(1, 3)), (cc.TRUE, Axiom("T"))))


def test_premise_not_allowed_in_ef():
    with pytest.raises(ProofError):
        pf.check_ef(lines((p0, Premise())))


def test_seeded_proofs_and_mutants():
    rng = random.Random(17)
    kinds = set()
    for _ in range(300):
        p = pf.random_ef_proof(rng)
        assert pf.check_ef(p)
        assert tautology(p.conclusion)
        mutant, how = pf.mutate(p, rng)
        kinds.add(how.split("@")[0])
        assert not pf.is_valid(mutant), how
    assert {"negate", "retarget", "dangling", "stale-var", "scheme"} <= kinds


def test_generated_proofs_use_extension():
    rng = random.Random(3)
    assert any(any(isinstance(l.justification, Ext) for l in pf.random_ef_proof(rng).lines)
               for _ in range(50))


# EF(S)

def test_premise_line_accepted():
    S = PremiseSet.of([cc.variable(0, 2)])
    assert pf.check_ef_s(lines((p0, Premise())), S)


def test_premise_matched_semantically():
    S = PremiseSet.of([cc.variable(0, 2)])
    assert pf.check_ef_s(lines((cc.Or(p0, cc.And(p0, p1)), Premise())), S)


def test_premise_outside_s_rejected():
    S = PremiseSet.of([cc.variable(0, 2)])
    with pytest.raises(ProofError, match="member"):
        pf.check_ef_s(lines((p1, Premise())), S)


def test_refutation_of_contradictory_premises():
    x = cc.variable(0, 2)
    S = PremiseSet.of([x, cc.complement(x)])
    b = ProofBuilder()
    zero = b.falsum(b.premise(p0), b.premise(cc.Not(p0)))
    p = b.build(zero)
    assert len(p) == 7 and p.conclusion == cc.FALSE
    assert pf.check_ef_s(p, S)


def test_ext_var_must_avoid_premise_algebra():
    S = PremiseSet.of([cc.variable(0, 2)])
    p = lines((cc.iff(p1, p0), Ext(1)), (p0, Premise()))
    with pytest.raises(ProofError, match="premise-algebra"):
        pf.check_ef_s(p, S)


def test_accepted_efs_proofs_are_sound():
    x, y = cc.variable(0, 3), cc.variable(1, 3)
    S = PremiseSet.of([x, cc.implication(x, y), cc.meet(y, cc.variable(2, 3))])
    for goal in (y, cc.variable(2, 3), x):
        v = pf.l_entails(S, goal, 200)
        assert v.status is Entailment.ENTAILED
        assert pf.premises_imply_conclusion(v.proof, S)


# entailment and consistency

def test_entails_premise_itself():
    x = cc.variable(0, 2)
    v = pf.l_entails(PremiseSet.of([x]), x, 1)
    assert v.status is Entailment.ENTAILED and len(v.proof) == 1


def test_entailment_refuted_semantically():
    v = pf.l_entails(PremiseSet.of([cc.variable(0, 2)]), cc.variable(1, 2), 50)
    assert v.status is Entailment.REFUTED and v.counterexample == (1, 0)


def test_modus_ponens_entailment_has_three_lines():
    x, y = cc.variable(0, 2), cc.variable(1, 2)
    v = pf.l_entails(PremiseSet.of([x, cc.implication(x, y)]), y, 100)
    assert v.status is Entailment.ENTAILED and len(v.proof) == 3


def test_budget_exhaustion_is_not_refutation():
    x, y = cc.variable(0, 2), cc.variable(1, 2)
    v = pf.l_entails(PremiseSet.of([x, cc.implication(x, y)]), y, 3)
    assert v.status is Entailment.NOT_FOUND


def test_consistency_of_one():
    assert pf.l_consistent(PremiseSet.of([cc.one(2)]), 5).status is pf.Consistency.CONSISTENT


def test_inconsistency_needs_budget():
    x = cc.variable(0, 1)
    S = PremiseSet.of([x, cc.complement(x)])
    found = pf.l_consistent(S, 200)
    assert found.status is pf.Consistency.INCONSISTENT
    assert pf.check_ef_s(found.proof, S)
    assert pf.l_consistent(S, 5).status is pf.Consistency.UNKNOWN


def test_consistency_monotone_in_budget():
    rng = random.Random(6)
    for _ in range(20):
        S = PremiseSet.of([AlgebraElement(2, rng.getrandbits(4)) for _ in range(3)])
        verdicts = [pf.l_consistent(S, l).status for l in (1, 10, 100, 400)]
        for small, large in zip(verdicts, verdicts[1:]):
            if large is pf.Consistency.CONSISTENT:
                assert small is pf.Consistency.CONSISTENT


def test_embedding_set_is_consistent():
    res = dwphp_surjection_set(2, 1, [cc.Var(1), cc.Var(2)], [cc.Var(0)], k=3)
    assert res.ok
    assert pf.l_consistent(res.premises, 10).status is pf.Consistency.CONSISTENT


# WF

def test_wf_fresh_r_accepted():
    just = DWPHP(2, 1, (2, 3), (4,), (p4, cc.Not(p4)), ((p0,), (p1,)))
    assert pf.check_wf(lines((just.expected(), just)))


def test_wf_r_in_c_rejected():
    just = DWPHP(2, 1, (2, 3), (4,), (cc.And(p4, p2), p4), ((p0,), (p1,)))
    with pytest.raises(ProofError, match="C circuit"):
        pf.check_wf(lines((just.expected(), just)))


def test_wf_r_in_d_accepted():
    just = DWPHP(2, 1, (2, 3), (4,), (p4, p4), ((p2,), (p0,)))
    assert pf.check_wf(lines((just.expected(), just)))


def test_wf_r_in_earlier_line_rejected():
    just = DWPHP(2, 1, (2, 3), (4,), (p4, p4), ((p0,), (p1,)))
    p = lines((cc.implies(p2, cc.implies(p0, p2)), Axiom("K")), (just.expected(), just))
    with pytest.raises(ProofError, match="earlier"):
        pf.check_wf(p)


def test_wf_needs_n_below_m():
    just = DWPHP(1, 1, (2,), (4,), (p4,), ((p0,),))
    with pytest.raises(ProofError, match="n < m"):
        pf.check_wf(lines((just.expected(), just)))


def test_ef_rejects_dwphp():
    just = DWPHP(2, 1, (2, 3), (4,), (p4, p4), ((p0,), (p1,)))
    with pytest.raises(ProofError):
        pf.check_ef(lines((just.expected(), just)))


def test_wf_extends_ef():
    rng = random.Random(8)
    for _ in range(100):
        p = pf.random_ef_proof(rng)
        assert pf.check_wf(p)


# leq_EF

def test_leq_ef_reflexive():
    x = AlgebraElement.from_node(cc.Or(p0, p1), 2)
    b = ProofBuilder()
    assert pf.leq_EF(x, x, b.build(b.identity(x.node)))


def test_leq_ef_wrong_conclusion():
    x = AlgebraElement.from_node(p0, 2)
    y = AlgebraElement.from_node(p1, 2)
    b = ProofBuilder()
    assert not pf.leq_EF(x, y, b.build(b.identity(p0)))


def test_leq_ef_chained():
    x = AlgebraElement.from_node(cc.And(p0, p1), 3)
    y = AlgebraElement.from_node(cc.Or(p0, p2), 3)
    b = ProofBuilder()
    first = b.axiom("AE1", A=p0, B=p1)
    second = b.axiom("OI1", A=p0, B=p2)
    p = b.build(b.syllogism(first, second))
    assert pf.leq_EF(x, y, p)
    assert cc.leq_A(x, y)  # soundness: <=_EF inside <=_A


# text format

def test_proof_text_round_trip():
    rng = random.Random(12)
    for _ in range(30):
        p = pf.random_ef_proof(rng)
        text, circuits = pf.dump_proof(p)
        assert pf.load_proof(text, circuits) == p


def test_dwphp_text_round_trip():
    just = DWPHP(2, 1, (2, 3), (4,), (p4, cc.Not(p4)), ((p0,), (p1,)))
    p = lines((just.expected(), just))
    text, circuits = pf.dump_proof(p)
    assert "DWPHP m=2 n=1 r=2,3 x=4" in text
    assert pf.load_proof(text, circuits) == p


def test_proof_format_errors():
    with pytest.raises(FormatError):
        pf.load_proof("1 AXIOM K 99\n", "nvars 1 nrand 0\n0 VAR 0\n")
    with pytest.raises(FormatError):
        pf.load_proof("1 FOO 0\n", "nvars 1 nrand 0\n0 VAR 0\n")
