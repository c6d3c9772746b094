"""Command-line front end.

    joindeg analyze <file> [--seed N] [--trials K] [--field-override F] [--json-out PATH]
    joindeg oracle <file> --prime P [--budget B] [--points N]
    joindeg crosscheck <file> [--prime P] [--points N]
    joindeg list

<file> is a path or the name of a bundled instance.  Exit codes: 0 ok,
1 invalid input, 2 a section failed, 3 exact and oracle paths disagree.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import analyze, oracle_block
from .errors import InvalidInstance, JoinDefective, JoinDegError, NotPrime
from .fields import PrimeField, Rationals, is_prime
from .instances import bundled_names, bundled_path, instance_to_json, load_instance
from .join import fiber_census, section_rng
from .oracle import GF, covered_points

EXIT_OK, EXIT_INPUT, EXIT_SECTION, EXIT_DISAGREE = 0, 1, 2, 3
SEED_ENV = "JOINDEG_SEED"


def _field_arg(text: str):
    if text.upper() == "Q":
        return Rationals()
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"field must be Q or a prime, got {text!r}") from None
    try:
        return PrimeField(p)
    except NotPrime as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _resolve_path(text: str) -> Path:
    p = Path(text)
    if p.exists():
        return p
    name = p.name[:-5] if p.name.endswith(".json") else p.name
    if name in bundled_names():
        return bundled_path(name)
    return p


def _seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise InvalidInstance(f"{SEED_ENV}={env!r} is not an integer") from None


def _load(args):
    overrides = {"seed": _seed(args), "trials": getattr(args, "trials", None)}
    fo = getattr(args, "field_override", None)
    if fo is not None:
        overrides["field_override"] = fo
    return load_instance(_resolve_path(args.file), **overrides)


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False)
    if out_path:
        Path(out_path).write_text(text + "\n")
    else:
        print(text)


def _tool() -> dict:
    return {"name": "joindeg", "version": __version__}


def cmd_analyze(args) -> int:
    spec = _load(args)
    report = analyze(
        spec.instance,
        oracle_primes=None if args.no_oracle else spec.oracle_primes,
        oracle_budget=spec.oracle_budget,
        instance_json=instance_to_json(spec),
    )
    doc = report.to_json()
    _emit(doc, args.json_out)
    if args.json_out:
        print(json.dumps(doc["summary"], sort_keys=True))
    return EXIT_OK if report.ok else EXIT_SECTION


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise InvalidInstance(f"--prime {p} is not prime")


def cmd_oracle(args) -> int:
    _check_prime(args.prime)
    spec = _load(args)
    inst = spec.instance
    budget = args.budget or spec.oracle_budget
    rng = section_rng(inst.seed, "oracle")
    block = oracle_block(inst, [args.prime], rng, args.points, budget)
    inst_p = inst.reduce_mod(args.prime) if inst.field.char == 0 else inst
    n_base = len(covered_points(inst_p, GF(args.prime), budget))
    block["covered_points_base_field"] = n_base
    block["ambient_points_base_field"] = sum(args.prime**i for i in range(inst.n + 1))
    _emit({"schema": 1, "tool": _tool(), "instance": instance_to_json(spec), "oracle": block}, args.json_out)
    return EXIT_OK


def cmd_crosscheck(args) -> int:
    spec = _load(args)
    inst = spec.instance
    p = args.prime or (inst.field.char or max(spec.oracle_primes))
    _check_prime(p)
    if inst.X.k > 1 or inst.Y.k > 1:
        raise InvalidInstance("crosscheck needs a curve x curve instance")
    doc: dict = {"schema": 1, "tool": _tool(), "instance": instance_to_json(spec), "prime": p}
    exact_defective = False
    try:
        census = fiber_census(inst, section_rng(inst.seed, "census"))
        doc["exact"] = census.to_json()
    except JoinDefective as exc:
        exact_defective = True
        doc["exact"] = {"status": "defective", "message": str(exc)}
    block = oracle_block(inst, [p], section_rng(inst.seed, "oracle"), args.points, spec.oracle_budget)
    doc["oracle"] = block
    oracle_defective = block["census"] == {"status": "defective"}
    verdicts: dict = {}
    failing = None
    if exact_defective or oracle_defective:
        ok = exact_defective and oracle_defective
        verdicts["defective"] = "AGREE" if ok else "DISAGREE"
        if not ok:
            failing = {"prime": p, "exact_defective": exact_defective, "oracle_defective": oracle_defective}
    else:
        for key in ("P", "S", "T", "b", "m_X", "m_Y"):
            exact_val = doc["exact"][key]
            bad = [c for c in block["census"] if c[key] != exact_val]
            verdicts[key] = "DISAGREE" if bad else "AGREE"
            if bad and failing is None:
                failing = {"quantity": key, "prime": p, "z": bad[0]["z"], "exact": exact_val, "oracle": bad[0][key]}
    doc["verdicts"] = verdicts
    if failing:
        doc["failing"] = failing
    _emit(doc, args.json_out)
    return EXIT_DISAGREE if failing else EXIT_OK


def cmd_list(args) -> int:
    for name in bundled_names():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="joindeg", description="Join invariants of parametrized varieties.")
    ap.add_argument("--version", action="version", version=f"joindeg {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, trials=True):
        p.add_argument("file", help="instance JSON path or bundled instance name")
        p.add_argument("--seed", type=int, default=None, help=f"overrides ${SEED_ENV} and the file seed")
        if trials:
            p.add_argument("--trials", type=int, default=None)
        p.add_argument("--json-out", default=None, help="write the JSON report here instead of stdout")

    a = sub.add_parser("analyze", help="run every analysis section")
    common(a)
    a.add_argument("--field-override", type=_field_arg, default=None, help="Q or a prime")
    a.add_argument("--no-oracle", action="store_true", help="skip the oracle section")
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("oracle", help="finite-field brute force only")
    common(o, trials=False)
    o.add_argument("--prime", type=int, required=True)
    o.add_argument("--budget", type=int, default=None)
    o.add_argument("--points", type=int, default=5)
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("crosscheck", help="exact census vs oracle census")
    common(c)
    c.add_argument("--prime", type=int, default=None)
    c.add_argument("--points", type=int, default=5)
    c.set_defaults(func=cmd_crosscheck)

    ls = sub.add_parser("list", help="list bundled instances")
    ls.set_defaults(func=cmd_list)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InvalidInstance as exc:
        print(f"joindeg: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (JoinDegError, ArithmeticError) as exc:
        print(f"joindeg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SECTION


if __name__ == "__main__":
    sys.exit(main())
