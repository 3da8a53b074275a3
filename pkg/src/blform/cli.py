"""Command line front end: JSON in, JSON out.

Exit codes: 0 success, 1 domain error (e.g. no bases exist), 2 malformed
input, 3 a verified property failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import jsonschema

from .errors import BLFormError, DimensionError, PropertyViolation
from .exact_linalg import format_rational, to_rational
from .family import DEFAULT_MAX_N, build_family, family_report
from .forms import (
    FormInstance,
    TestFunction,
    eval_general_form,
    eval_lambda_n,
    verify_main_estimate,
)
from .matroid import VectorMatroid, indices_of, mask_of
from .polytope import bl_constant, margin, membership, vertices
from .schemas import INPUT_SCHEMAS, OUTPUT_SCHEMAS, dumps

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT, EXIT_PROPERTY = 0, 1, 2, 3
SUBCOMMANDS = tuple(INPUT_SCHEMAS)
DEFAULT_SAMPLES = 100_000


class InputError(Exception):
    """Input is malformed for the chosen subcommand."""


def _matroid(data: dict) -> VectorMatroid:
    if "family" in data:
        return build_family(data["family"], max_n=data.get("max_n", DEFAULT_MAX_N)).matroid
    return VectorMatroid.from_json(data["matroid"])


def _subset(M: VectorMatroid, data: dict) -> int:
    bad = [i for i in data["subset"] if i >= M.m]
    if bad:
        raise InputError(f"subset indices {bad} out of range for {M.m} elements")
    return mask_of(data["subset"])


def _theta(M: VectorMatroid, data: dict) -> list[Fraction]:
    theta = [to_rational(t) for t in data["theta"]]
    if len(theta) != M.m:
        raise InputError(f"theta has {len(theta)} entries, the matroid has {M.m} elements")
    return theta


def _lambda_inputs(data: dict):
    n = data["n"]
    if len(data["q"]) != 2 * n + 1:
        raise InputError(f"n = {n} needs {2 * n + 1} q functions, got {len(data['q'])}")
    t = TestFunction.from_json(data["t"])
    qs = [TestFunction.from_json(q) for q in data["q"]]
    kw = {}
    if "radius" in data:
        kw["radius"] = float(to_rational(data["radius"])) if isinstance(data["radius"], str) else data["radius"]
    return n, t, qs, kw


def _run(cmd: str, data: dict, threads: int | None) -> tuple[dict, bool]:
    """Compute the result for one subcommand; the flag is False if a property failed."""
    if cmd in ("rank", "closure", "bases", "flats", "membership", "margin", "vertices", "constant"):
        M = _matroid(data)
        if cmd == "rank":
            S = _subset(M, data)
            return {"subset": indices_of(S), "rank": M.rank_of(S)}, True
        if cmd == "closure":
            S = _subset(M, data)
            return {"subset": indices_of(S), "closure": indices_of(M.closure_of(S))}, True
        if cmd == "bases":
            bases = M.enumerate_bases()
            return {"count": len(bases), "bases": [indices_of(b) for b in bases]}, True
        if cmd == "flats":
            flats = M.flats_with_rank()
            return {
                "count": len(flats),
                "flats": [{"subset": indices_of(f), "rank": r} for f, r in flats],
            }, True
        if cmd == "membership":
            return membership(M, _theta(M, data)).to_json(), True
        if cmd == "margin":
            return {"margin": format_rational(margin(M, _theta(M, data)))}, True
        if cmd == "vertices":
            vs = vertices(M)
            return {"count": len(vs), "vertices": [v.to_json() for v in vs]}, True
        return {"ell": data["ell"], "constant": format_rational(bl_constant(M, data["ell"]))}, True

    if cmd == "family-build":
        inst = build_family(data["n"], max_n=data.get("max_n", DEFAULT_MAX_N))
        return {"n": inst.n, "k": inst.k, "m": inst.m, "ell": inst.ell, "matroid": inst.matroid.to_json()}, True

    if cmd == "family-verify":
        report = family_report(
            data["n"],
            delta=to_rational(data.get("delta", "1/10")),
            samples=data.get("samples", 1000),
            seed=data.get("seed", 0),
            seg_samples=data.get("seg_samples", 100),
            max_n=data.get("max_n", DEFAULT_MAX_N),
        )
        return report, report["ok"]

    samples = data.get("samples", DEFAULT_SAMPLES)
    seed = data.get("seed", 0)
    if cmd == "estimate":
        if "vectors" in data:
            F = FormInstance.from_json(data)
            return eval_general_form(F, samples, seed, threads=threads).to_json(), True
        n, t, qs, kw = _lambda_inputs(data)
        return eval_lambda_n(n, t, qs, samples, seed, threads=threads, **kw).to_json(), True

    n, t, qs, kw = _lambda_inputs(data)
    rep = verify_main_estimate(n, t, qs, data.get("p_recip", "1/2"), samples, seed, threads=threads, **kw)
    ok = rep.ratio > 0 and rep.ratio == rep.ratio and rep.ratio != float("inf")
    if n == 0:
        # Hoelder: |Lambda_0| <= ||t||_p ||q_0||_p'
        ok = ok and rep.ratio <= 1 + 3 * rep.ratio_stderr + 1e-12
    return rep.to_json(), ok


def _load(args) -> dict:
    if args.json is not None:
        text = args.json
    elif args.input is not None:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input) as fh:
                text = fh.read()
    else:
        text = "{}"
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("top-level JSON value must be an object")
    for key in ("seed", "samples", "n"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.delta is not None:
        data["delta"] = args.delta
    return data


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blform", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    src = p.add_mutually_exclusive_group()
    src.add_argument("-i", "--input", help="JSON input file ('-' for stdin)")
    src.add_argument("-j", "--json", help="inline JSON input")
    p.add_argument("-o", "--output", help="write the result here instead of stdout")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--delta")
    p.add_argument("--n", type=int)
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads for sampling (default: $BLFORM_THREADS or the CPU count)",
    )
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.subcommand
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        data = _load(args)
        jsonschema.validate(data, INPUT_SCHEMAS[cmd])
        result, ok = _run(cmd, data, args.threads)
    except PropertyViolation as exc:
        print(f"property violated: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except (InputError, DimensionError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except jsonschema.ValidationError as exc:
        print(f"input error: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    except BLFormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    jsonschema.validate(result, OUTPUT_SCHEMAS[cmd])
    text = dumps(result) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not ok:
        print(f"property violated: {cmd} check failed", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
