"""Command-line driver: ``forcelab <subcommand> ...``.

Exit status is 0 when every check passes, 1 when one fails and 2 on usage
or input errors.  Reports are JSON (sorted keys) or plain text.
"""
from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from . import circuits as cc
from . import proofs as pf
from . import randomized as rz
from .config import LIMITS
from .errors import LabError
from .formula import classify, parse, strings_below, to_text
from .generic import GenericFilter, forcing_check, i_G
from .mcv import (WitnessProblem, binary_search_witness, build_mcv_Y, check_delta_mcv,
                  cvp_simulate, parse_mcv_file, random_element, random_instance)
from .translate import BString, TranslationEnv, bool_value, parse_bounds, translate_sigmaB0


@dataclass
class Config:
    seed: int = 0
    max_n: int = 16
    max_expansion: int = 2_000_000
    output: Optional[str] = None
    format: str = "json"


@dataclass
class Report:
    command: List[str]
    seed: int
    records: List[dict] = field(default_factory=list)
    passed: int = 0
    failed: int = 0
    wall_time: float = 0.0

    def add(self, record: dict, ok: Optional[bool] = None):
        if ok is not None:
            record["pass"] = ok
            if ok:
                self.passed += 1
            else:
                self.failed += 1
        self.records.append(record)

    def to_dict(self) -> dict:
        return {"command": self.command, "seed": self.seed, "records": self.records,
                "passed": self.passed, "failed": self.failed,
                "wall_time": round(self.wall_time, 6)}

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
        out = [" ".join(self.command)]
        for rec in self.records:
            out.append("  " + ", ".join(f"{k}={_short(v)}" for k, v in sorted(rec.items())))
        out.append(f"passed={self.passed} failed={self.failed} seed={self.seed}")
        return "\n".join(out) + "\n"


def _short(v):
    text = v if isinstance(v, str) else json.dumps(v, sort_keys=True)
    return text if len(text) < 200 else text[:197] + "..."


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _env(args) -> TranslationEnv:
    nums, strs = parse_bounds(args.bounds or "")
    return TranslationEnv.make(nums, strs)


def _strings(args, env: TranslationEnv, rng: random.Random) -> Dict[str, BString]:
    """Circuit-valued strings from ``--string NAME=FILE`` or seeded random ones."""
    given = {}
    n = args.n
    for spec in args.string or []:
        name, _, path = spec.partition("=")
        cf = cc.parse_circuit_file(_read(path))
        n = cf.num_input_vars
        given[name] = BString(n, tuple(cc.AlgebraElement.from_node(o, n) for o in cf.outputs))
    for name, b in env.str_bounds.items():
        if name not in given:
            given[name] = BString(n, tuple(random_element(rng, n) for _ in range(b)))
    return given


# -- subcommands --------------------------------------------------------------

def cmd_parse(args, rep: Report, rng):
    phi = parse(args.formula)
    rep.add({"formula": to_text(phi), "class": classify(phi).value, "ast": repr(phi)}, True)


def cmd_translate(args, rep, rng):
    phi, env = parse(args.formula), _env(args)
    c = translate_sigmaB0(phi, env)
    layout = {f"{name}({i})": k for (name, i), k in sorted(env.var_layout.items())}
    rep.add({"formula": to_text(phi), "layout": layout, "size": c.size,
             "infix": str(c), "circuit": cc.dumps(c)}, True)


def cmd_bval(args, rep, rng):
    phi, env = parse(args.formula), _env(args)
    strs = _strings(args, env, rng)
    value = bool_value(phi, env, strs, n=args.n if not strs else None)
    rep.add({"formula": to_text(phi), "n": value.n, "table": str(value.table),
             "is_one": value.is_one(), "is_zero": value.is_zero(),
             "strings": {k: [str(e.table) for e in v.entries] for k, v in sorted(strs.items())}},
            True)


def cmd_force_check(args, rep, rng):
    phi, env = parse(args.formula), _env(args)
    strs = _strings(args, env, rng)
    n = next(iter(strs.values())).n if strs else args.n
    value = bool_value(phi, env, strs, n=n)
    for bits in cc.all_assignments(n):
        v = forcing_check(phi, env, strs, GenericFilter(bits), value)
        rep.add(v.to_dict(), v.agree)


def cmd_mcv(args, rep, rng):
    if args.file:
        instances = [parse_mcv_file(_read(args.file))]
    else:
        instances = [random_instance(rng, args.a, args.n) for _ in range(args.count)]
    for inst in instances:
        Y = build_mcv_Y(inst)
        delta = check_delta_mcv(inst, Y)
        mismatches = []
        for bits in cc.all_assignments(inst.n):
            G = GenericFilter(bits)
            gates, edges = inst.decode(G)
            if cvp_simulate(inst.a, gates, edges) != i_G(Y, G):
                mismatches.append("".join(map(str, bits)))
        rep.add({"a": inst.a, "n": inst.n, "delta_is_one": delta.is_one(),
                 "Y": [str(e.table) for e in Y.entries], "decode_mismatches": mismatches},
                delta.is_one() and not mismatches)


def cmd_witness(args, rep, rng):
    p = WitnessProblem(parse(args.formula), args.t, args.x)
    for X in ("".join(b) for b in itertools.product("01", repeat=args.x_length)):
        got = binary_search_witness(p, X)
        expected = next((z for z in strings_below(args.t) if p.holds(X, z)), None)
        rep.add({"X": X, "witness": got, "exhaustive": expected}, got == expected)


def _check_proof(args, rep, premises=None, wf=False):
    proof = pf.load_proof(_read(args.proof), _read(args.circuits))
    try:
        pf._check(proof, premises, wf)
        rep.add({"lines": len(proof), "size": proof.total_size, "valid": True}, True)
    except LabError as exc:
        rep.add({"lines": len(proof), "valid": False, "line": getattr(exc, "line", None),
                 "reason": getattr(exc, "reason", str(exc))}, False)


def _premises(path: str) -> pf.PremiseSet:
    cf = cc.parse_circuit_file(_read(path))
    n = cf.num_input_vars
    return pf.PremiseSet(tuple(cc.AlgebraElement.from_node(o, n) for o in cf.outputs), n)


def cmd_ef_check(args, rep, rng):
    _check_proof(args, rep)


def cmd_efs_check(args, rep, rng):
    _check_proof(args, rep, premises=_premises(args.premises))


def cmd_wf_check(args, rep, rng):
    _check_proof(args, rep, wf=True)


def cmd_consistency(args, rep, rng):
    S = _premises(args.premises)
    v = pf.l_consistent(S, args.l)
    rec = {"status": v.status.value, "l": args.l, "premises": len(S.elements), "n": S.n}
    if v.model is not None:
        rec["model"] = "".join(map(str, v.model))
    if v.proof is not None:
        rec["refutation_lines"] = len(v.proof)
        rec["refutation_size"] = v.proof.total_size
    rep.add(rec, v.status is pf.Consistency.CONSISTENT)


def cmd_randeval(args, rep, rng):
    c = rz.RandCircuit.from_file(cc.parse_circuit_file(_read(args.file)))
    gaps = []
    for bits in cc.all_assignments(c.n):
        v = rz.eval_R(c, bits)
        if v is rz.TriBool.UNDEFINED:
            gaps.append("".join(map(str, bits)))
        rep.add({"assignment": "".join(map(str, bits)), "value": str(v)})
    rep.add({"resolved": not gaps, "gaps": gaps}, True)


def cmd_dwphp_range(args, rep, rng):
    inst = rz.make_instance(args.a, args.family, args.seed)
    r = rz.dwphp_range_experiment(inst, args.m)
    rep.add(r.to_dict(), r.passed)


def _example_embed(name: str):
    if name == "failing":
        return 2, 1, [cc.Var(0), cc.Not(cc.Var(0))], [cc.Var(0)], 2
    # C ignores its slot and copies a free block z = (p1, p2)
    return 2, 1, [cc.Var(1), cc.Var(2)], [cc.Var(0)], 3


def cmd_dwphp_embed(args, rep, rng):
    if args.example:
        m, n, C, D, k = _example_embed(args.example)
    else:
        cf_c = cc.parse_circuit_file(_read(args.C))
        cf_d = cc.parse_circuit_file(_read(args.D))
        C, D = list(cf_c.outputs), list(cf_d.outputs)
        m, n, k = len(C), len(D), cf_d.num_input_vars
    res = rz.dwphp_surjection_set(m, n, C, D, k)
    rec = {"m": m, "n": n, "surjective": res.ok, "missing": list(res.missing)}
    if res.ok:
        rec["premises"] = len(res.premises.elements)
        rec["all_tautologies"] = all(e.is_one() for e in res.premises.elements)
    rep.add(rec, res.ok)


def cmd_suite(args, rep, rng):
    from .suite import run_suite
    only = [int(t) for t in args.only.split(",")] if args.only else None
    for r in run_suite(args.seed, only):
        d = r.to_dict()
        d.pop("seconds")
        rep.add(d, r.passed)
        print(r.line(), file=sys.stderr)


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-n", type=int, default=16)
    common.add_argument("--budget", type=int, default=2_000_000,
                        help="expansion budget for quantifier unfolding and enumeration")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(prog="forcelab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(fn=fn)
        return p

    def formula_cmd(name, fn, help_text):
        p = add(name, fn, help_text)
        p.add_argument("formula")
        p.add_argument("--bounds", default="", help="e.g. X=3,Y=2,k=1")
        p.add_argument("--n", type=int, default=3, help="algebra size for random strings")
        p.add_argument("--string", action="append", metavar="NAME=FILE",
                       help="circuit file whose OUTPUTs are the string entries")
        return p

    add("parse", cmd_parse, "parse a formula and print its AST").add_argument("formula")
    formula_cmd("translate", cmd_translate, "propositional translation")
    formula_cmd("bval", cmd_bval, "Boolean value over circuit-valued strings")
    formula_cmd("force-check", cmd_force_check, "forcing check at every point filter")
    p = add("mcv", cmd_mcv, "MCV gate values and decoding check")
    p.add_argument("file", nargs="?")
    p.add_argument("--a", type=int, default=4)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--count", type=int, default=1)
    p = add("witness", cmd_witness, "binary-search witnessing against enumeration")
    p.add_argument("formula")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--x", type=int, default=0)
    p.add_argument("--x-length", type=int, default=2)
    for name, fn, text in (("ef-check", cmd_ef_check, "check an EF proof"),
                           ("efs-check", cmd_efs_check, "check an EF(S) proof"),
                           ("wf-check", cmd_wf_check, "check a WF proof")):
        p = add(name, fn, text)
        p.add_argument("proof")
        p.add_argument("circuits", help="companion circuit file")
        if name == "efs-check":
            p.add_argument("premises", help="circuit file, one OUTPUT per premise")
    p = add("consistency", cmd_consistency, "l-consistency of a premise set")
    p.add_argument("premises")
    p.add_argument("--l", type=int, default=100)
    p = add("randeval", cmd_randeval, "eval_R over every assignment")
    p.add_argument("file")
    p = add("dwphp-range", cmd_dwphp_range, "range counting experiment")
    p.add_argument("--a", type=int, default=2)
    p.add_argument("--family", choices=("random", "injective", "constant"), default="random")
    p.add_argument("--m", type=int, default=2, help="extra random variables")
    p = add("dwphp-embed", cmd_dwphp_embed, "surjection hypothesis and premise set")
    p.add_argument("--C", help="circuit file with m OUTPUTs over n inputs")
    p.add_argument("--D", help="circuit file with n OUTPUTs")
    p.add_argument("--example", choices=("failing", "free-block"))
    p = add("suite", cmd_suite, "run the acceptance battery")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    cfg = Config(args.seed, args.max_n, args.budget, args.out, args.format)
    saved = (LIMITS.max_n, LIMITS.max_expansion)
    start = time.perf_counter()
    rep = Report(argv, cfg.seed)
    try:
        LIMITS.set_max_n(cfg.max_n)
        LIMITS.max_expansion = cfg.max_expansion
        if args.command == "dwphp-embed" and not args.example and not (args.C and args.D):
            parser.error("dwphp-embed needs --C and --D files or --example")
        args.fn(args, rep, random.Random(cfg.seed))
    except SystemExit:
        return 2
    except (LabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        LIMITS.max_n, LIMITS.max_expansion = saved
    rep.wall_time = time.perf_counter() - start
    text = rep.render(cfg.format)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if rep.failed else 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
