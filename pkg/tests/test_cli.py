import json
import random

from forcelab import circuits as cc
from forcelab import proofs as pf
from forcelab import randomized as rz
from forcelab.circuits import Circuit
from forcelab.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse(capsys):
    code, rep = invoke(capsys, "parse", "A y < 3 . X(y)")
    assert code == 0 and rep["passed"] == 1
    assert rep["records"][0]["class"]


def test_usage_error_exit_code(capsys):
    assert run(["no-such-command"]) == 2
    assert run(["parse"]) == 2
    capsys.readouterr()


def test_bad_formula_is_input_error(capsys):
    assert run(["parse", "A y < . X("]) == 2
    capsys.readouterr()


def test_missing_file_is_input_error(capsys, tmp_path):
    assert run(["randeval", str(tmp_path / "absent.circ")]) == 2
    capsys.readouterr()


def test_translate_and_bval(capsys):
    code, rep = invoke(capsys, "translate", "X(0) & !X(1)", "--bounds", "X=2")
    assert code == 0 and "OUTPUT" in rep["records"][0]["circuit"]
    code, rep = invoke(capsys, "bval", "X(0) | !X(0)", "--bounds", "X=1", "--n", "2")
    assert code == 0 and rep["records"][0]["is_one"]


def test_force_check_with_string_file(capsys, tmp_path):
    text = "nvars 2 nrand 0\n0 VAR 0\n1 VAR 1\n2 AND 0 1\nOUTPUT 0\nOUTPUT 2\n"
    path = write(tmp_path, "x.circ", text)
    code, rep = invoke(capsys, "force-check", "X(0) & X(1)", "--bounds", "X=2",
                       "--string", f"X={path}")
    assert code == 0 and rep["passed"] == 4


def test_mcv_and_witness(capsys):
    code, rep = invoke(capsys, "mcv", "--a", "5", "--n", "2", "--count", "3", "--seed", "4")
    assert code == 0 and rep["passed"] == 3
    code, rep = invoke(capsys, "witness", "Z(0) <-> X(0)", "--t", "3", "--x-length", "1")
    assert code == 0 and [r["witness"] for r in rep["records"]] == ["", "1"]


def test_dwphp_range(capsys):
    code, rep = invoke(capsys, "dwphp-range", "--a", "2", "--family", "random", "--seed", "7")
    assert code == 0
    assert rep["records"][0]["p_prime"] >= 48


def test_dwphp_embed_examples(capsys):
    assert invoke(capsys, "dwphp-embed", "--example", "failing")[0] == 1
    code, rep = invoke(capsys, "dwphp-embed", "--example", "free-block")
    assert code == 0 and rep["records"][0]["all_tautologies"]
    assert run(["dwphp-embed"]) == 2
    capsys.readouterr()


def test_determinism_apart_from_wall_time(capsys):
    reps = []
    for _ in range(2):
        _, rep = invoke(capsys, "mcv", "--a", "4", "--n", "2", "--count", "2", "--seed", "11")
        rep.pop("wall_time")
        reps.append(rep)
    assert reps[0] == reps[1]


def test_text_format_and_out_file(capsys, tmp_path):
    target = tmp_path / "rep.txt"
    assert run(["parse", "x = 0", "--format", "text", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert "passed=1 failed=0" in target.read_text()


# proof checkers

def proof_files(tmp_path, proof):
    text, circuits = pf.dump_proof(proof)
    return write(tmp_path, "p.proof", text), write(tmp_path, "p.circ", circuits)


def test_ef_check_valid_and_mutated(capsys, tmp_path):
    rng = random.Random(5)
    proof = pf.random_ef_proof(rng)
    code, rep = invoke(capsys, "ef-check", *proof_files(tmp_path, proof))
    assert code == 0 and rep["records"][0]["valid"]
    mutant, how = pf.mutate(proof, rng)
    code, rep = invoke(capsys, "ef-check", *proof_files(tmp_path, mutant))
    rec = rep["records"][0]
    assert code == 1 and not rec["valid"] and rec["reason"], how
    assert rec["line"] is None or 1 <= rec["line"] <= len(mutant)


def test_efs_check(capsys, tmp_path):
    b = pf.ProofBuilder()
    zero = b.falsum(b.premise(cc.Var(0)), b.premise(cc.Not(cc.Var(0))))
    files = proof_files(tmp_path, b.build(zero))
    prem = write(tmp_path, "s.circ", "nvars 1 nrand 0\n0 VAR 0\n1 NOT 0\nOUTPUT 0\nOUTPUT 1\n")
    code, rep = invoke(capsys, "efs-check", *files, prem)
    assert code == 0
    only_p = write(tmp_path, "s1.circ", "nvars 1 nrand 0\n0 VAR 0\nOUTPUT 0\n")
    assert invoke(capsys, "efs-check", *files, only_p)[0] == 1


def test_wf_check(capsys, tmp_path):
    p = [cc.Var(k) for k in range(5)]
    just = pf.DWPHP(2, 1, (2, 3), (4,), (p[4], cc.Not(p[4])), ((p[0],), (p[1],)))
    proof = pf.Proof((pf.ProofLine(1, just.expected(), just),))
    files = proof_files(tmp_path, proof)
    assert invoke(capsys, "wf-check", *files)[0] == 0
    assert invoke(capsys, "ef-check", *files)[0] == 1


def test_consistency(capsys, tmp_path):
    ok = write(tmp_path, "ok.circ", "nvars 2 nrand 0\n0 VAR 0\n1 VAR 1\n2 OR 0 1\nOUTPUT 2\n")
    code, rep = invoke(capsys, "consistency", ok, "--l", "10")
    assert code == 0 and rep["records"][0]["status"] == "consistent"
    bad = write(tmp_path, "bad.circ", "nvars 1 nrand 0\n0 VAR 0\n1 NOT 0\nOUTPUT 0\nOUTPUT 1\n")
    code, rep = invoke(capsys, "consistency", bad, "--l", "200")
    assert code == 1 and rep["records"][0]["refutation_lines"] >= 1


def test_randeval(capsys, tmp_path):
    z0, z1, p0 = cc.RVar(0), cc.RVar(1), cc.Var(0)
    blk = cc.Or(cc.And(p0, z0), cc.And(p0, z1))
    c = rz.RandCircuit(Circuit(cc.Or(blk, cc.Var(1)), 2, 2), frozenset({blk}))
    code, rep = invoke(capsys, "randeval", write(tmp_path, "r.circ", c.dumps()))
    assert code == 0
    values = [r["value"] for r in rep["records"] if "value" in r]
    assert values == ["0", "1", "1", "1"]
    assert rep["records"][-1]["resolved"]
