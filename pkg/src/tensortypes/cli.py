"""Command-line entry point.

    tensortypes eval FILE [--order greedy|given|random] [--tol X] [--seed N]
    tensortypes axioms TYPE [--cases N] [--seed N] [--tol X] [--budget N]
    tensortypes map FILE MAPPING [--trials N] [--seed N] [--tol X]
    tensortypes demo ising|dimer|freefermion [...]

Exit codes: 0 success, 1 a check failed, 2 parse error, 3 validation error,
4 evaluation error. ``TT_SEED`` overrides the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional

import numpy as np

from . import demos
from .core import TensorType, TensorTypeError, run_axiom_suite
from .mappings import MAPPING_NAMES, MappingError, mapping_from_name, verify_mapping_commutes
from .network import (
    EvaluationError,
    NetworkParseError,
    NetworkValidationError,
    evaluate,
    load_network,
    type_from_spec,
    validate,
)
from .scalars import DEFAULT_TOL

EXIT_FAIL, EXIT_PARSE, EXIT_VALIDATION, EXIT_EVALUATION = 1, 2, 3, 4

# the nine types of the standard axiom run
STANDARD_TYPES = (
    "array/f64",
    "array/bool",
    "array/zmod:5",
    "graded",
    "pairing",
    "schur-rect/u=1,1",
    "schur-rect/u=1,-1",
    "schur-square-sym/u=sx",
    "schur-square-anti/u=isy",
)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def default_seed() -> int:
    raw = os.environ.get("TT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(EXIT_PARSE, f"TT_SEED must be an integer, got {raw!r}") from None


def type_from_name(name: str) -> TensorType:
    """Parse a short type name.

    ``array/<ring>``, ``graded[/<ring>]``, ``graded-z[/<ring>]``, ``pairing`` or
    ``schur-rect``, ``schur-square``, ``schur-square-sym``, ``schur-square-anti``
    followed by ``/key=value;...`` with keys ``u`` (``sx``, ``isy`` or a
    comma list), ``ring`` and ``mode`` (prefactor mode).
    """
    kind, _, rest = name.partition("/")
    try:
        if kind == "array":
            return type_from_spec("array", rest or "f64")
        if kind in ("graded", "graded-z"):
            return type_from_spec("graded", rest or "f64", {"grading": "z" if kind == "graded-z" else "z2"})
        if kind == "pairing":
            return type_from_spec("pairing")
        if kind.startswith("schur-"):
            opts = {}
            for item in filter(None, rest.split(";")):
                key, eq, value = item.partition("=")
                if not eq:
                    raise NetworkParseError(f"expected key=value, got {item!r}")
                opts[key] = value
            params = {"prefactor_mode": opts.pop("mode", "none")}
            ring = opts.pop("ring", "f64")
            if "u" in opts:
                u = opts.pop("u")
                if u in ("sx", "isy"):
                    params["u"] = u
                else:
                    vals = [float(x) for x in u.split(",")]
                    params["u"] = vals if kind == "schur-rect" else np.reshape(vals, (2, 2)).tolist()
            if opts:
                raise NetworkParseError(f"unknown options {sorted(opts)}")
            if kind == "schur-rect":
                return type_from_spec("schur-rect", ring, params)
            sym = {"schur-square": "none", "schur-square-sym": "sym", "schur-square-anti": "anti"}.get(kind)
            if sym is not None:
                params["symmetry"] = sym
                return type_from_spec("schur-square", ring, params)
    except ValueError as exc:
        if isinstance(exc, NetworkParseError):
            raise
        raise NetworkParseError(f"bad type name {name!r}: {exc}") from None
    raise NetworkParseError(f"unknown type name {name!r}")


# -- output -----------------------------------------------------------------------


def _round(x):
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    return x


def literal(x) -> str:
    """JSON literal with floats cut to 12 significant digits."""
    return json.dumps(_round(x))


def _print_payload(T: TensorType, A) -> None:
    print(literal([T.zero_to_literal(z) for z in T.slots(A)]))
    print(literal(T.tensor_to_literal(A)))


# -- subcommands --------------------------------------------------------------------


def _load(path):
    try:
        net, T = load_network(path)
    except NetworkParseError as exc:
        raise CliError(EXIT_PARSE, f"parse error: {exc}") from None
    except NetworkValidationError as exc:
        raise CliError(EXIT_VALIDATION, f"validation error: {exc}") from None
    try:
        validate(net, T)
    except NetworkValidationError as exc:
        raise CliError(EXIT_VALIDATION, f"validation error: {exc}") from None
    return net, T


def cmd_eval(args) -> int:
    net, T = _load(args.file)
    seed = default_seed() if args.seed is None else args.seed
    try:
        A = evaluate(net, T, order=args.order, rng=np.random.default_rng(seed))
        if args.order != "given":
            dev = T.deviation(A, evaluate(net, T, order="given"))
            ok = dev == 0.0 if T.exact else dev <= args.tol
            if not ok:
                raise CliError(EXIT_EVALUATION, f"evaluation error: {args.order} order deviates by {dev:.3g}")
    except EvaluationError as exc:
        raise CliError(EXIT_EVALUATION, f"evaluation error: {exc}") from None
    _print_payload(T, A)
    return 0


def cmd_axioms(args) -> int:
    names = STANDARD_TYPES if args.type == "all" else (args.type,)
    seed = default_seed() if args.seed is None else args.seed
    failed = 0
    for name in names:
        try:
            T = type_from_name(name)
        except (NetworkParseError, TensorTypeError) as exc:
            raise CliError(EXIT_PARSE, f"parse error: {exc}") from None
        start = time.perf_counter()
        reports = run_axiom_suite(T, cases=args.cases, seed=seed, tol=args.tol, budget=args.budget)
        elapsed = time.perf_counter() - start
        for r in reports:
            print(f"{name} {r}")
        ok = all(r.passed for r in reports)
        failed += not ok
        print(f"{name}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s)")
    return EXIT_FAIL if failed else 0


def cmd_map(args) -> int:
    net, T = _load(args.file)
    seed = default_seed() if args.seed is None else args.seed
    try:
        mapping = mapping_from_name(args.mapping, T)
    except MappingError as exc:
        raise CliError(EXIT_VALIDATION, f"validation error: {exc}") from None
    try:
        report = verify_mapping_commutes(mapping, net, trials=args.trials, seed=seed, tol=args.tol)
    except EvaluationError as exc:
        raise CliError(EXIT_EVALUATION, f"evaluation error: {exc}") from None
    print(report)
    return 0 if report.passed else EXIT_FAIL


def _observe(text: Optional[str]) -> list:
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise CliError(EXIT_PARSE, f"parse error: --observe expects integers, got {text!r}") from None


def cmd_demo(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    try:
        if args.demo == "ising":
            observe = _observe(args.observe)
            res = demos.ising(args.width, args.height, args.beta, args.periodic, observe)
            ref = demos.ising_brute_force(args.width, args.height, args.beta, args.periodic, observe)
            print(f"Z {literal(res.z)}")
            if observe:
                print(f"observed {literal(observe)}")
                print(literal(res.probabilities.reshape(-1).tolist()))
            print(f"enumeration relative deviation {abs(res.z - ref.z) / ref.z:.3g}")
            return 0
        if args.demo == "dimer":
            A = demos.dimer(args.width, args.height)
            print(literal([int(d) for d in A.data.shape]))
            print(literal(A.data.reshape(-1).astype(int).tolist()))
            print(f"feasible boundary patterns {int(A.data.sum())} of {A.data.size}")
            return 0
        res = demos.freefermion(args.modes, seed)
        print(f"modes {res.modes}")
        print(f"max |det entry - many-body entry| {res.max_error:.3g}")
        print(f"two-atom network deviation {res.network_deviation:.3g}")
        print("pass" if res.passed else "FAIL")
        return 0 if res.passed else EXIT_FAIL
    except demos.DemoError as exc:
        raise CliError(EXIT_VALIDATION, f"validation error: {exc}") from None
    except EvaluationError as exc:
        raise CliError(EXIT_EVALUATION, f"evaluation error: {exc}") from None


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tensortypes", description="Evaluate and check tensor networks.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate a network file")
    e.add_argument("file")
    e.add_argument("--order", choices=("greedy", "given", "random"), default="greedy")
    e.add_argument("--tol", type=float, default=DEFAULT_TOL, help="agreement with the given order")
    e.add_argument("--seed", type=int, default=None)
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("axioms", help="run the axiom suite of a tensor type ('all' for the standard nine)")
    a.add_argument("type")
    a.add_argument("--cases", type=int, default=200)
    a.add_argument("--seed", type=int, default=None)
    a.add_argument("--tol", type=float, default=DEFAULT_TOL)
    a.add_argument("--budget", type=int, default=4)
    a.set_defaults(func=cmd_axioms)

    m = sub.add_parser("map", help="check that a mapping commutes with evaluating a network")
    m.add_argument("file")
    m.add_argument("mapping", help=", ".join(MAPPING_NAMES))
    m.add_argument("--trials", type=int, default=3)
    m.add_argument("--seed", type=int, default=None)
    m.add_argument("--tol", type=float, default=1e-8)
    m.set_defaults(func=cmd_map)

    d = sub.add_parser("demo", help="physics demos")
    d.add_argument("demo", choices=("ising", "dimer", "freefermion"))
    d.add_argument("--width", type=int, default=2)
    d.add_argument("--height", type=int, default=2)
    d.add_argument("--beta", type=float, default=0.4)
    d.add_argument("--periodic", action="store_true")
    d.add_argument("--observe", default=None, help="comma-separated vertex indices")
    d.add_argument("--modes", type=int, default=3)
    d.add_argument("--seed", type=int, default=None)
    d.set_defaults(func=cmd_demo)
    return p


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"tensortypes: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
