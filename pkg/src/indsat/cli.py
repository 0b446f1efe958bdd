"""Command-line interface.

    indsat prove PROBLEM [options]     run the prover
    indsat check PROBLEM SCRIPT [...]  replay a proof script

Prove exit codes: 0 refutation found, 1 saturated without proof,
2 resource limit hit, 3 input error. Check: 0 accepted, 1 failing step,
3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import inference as inf
from .parser import ProblemError, parse_problem
from .proofs import check_proof, render_proof_script, render_proof_text, term_to_text
from .saturation import (
    REFUTATION,
    RESOURCE_OUT,
    SATURATED,
    ProverConfig,
    saturate,
)

_CALCULI = {
    "sup": inf.SUP,
    "rec": inf.REC,
    "rec-up": inf.REC_PEAK,
    "rec-ltr": inf.REC_LTR,
    "rec-up-ltr": inf.REC_PEAK_LTR,
}


def _onoff(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on|off")
    return value == "on"


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--calculus", choices=sorted(_CALCULI), default="rec")
    p.add_argument("--chaining", type=_onoff, default=True, metavar="on|off")
    p.add_argument("--ind", type=_onoff, default=True, metavar="on|off")
    p.add_argument("--ind-redundancy", type=_onoff, default=True, metavar="on|off")
    p.add_argument("--induct-complex", type=_onoff, default=True, metavar="on|off")
    p.add_argument("--ordering", choices=("kbo", "lpo"), default="lpo")
    p.add_argument(
        "--precedence",
        default=None,
        help="arity | decl | explicit:sym1,sym2,... (ascending)",
    )
    p.add_argument("--max-rw-depth", type=int, default=3)
    p.add_argument("--clause-limit", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--selection", choices=("negative", "maximal"), default="negative")
    p.add_argument("--goal-oriented", type=_onoff, default=True, metavar="on|off")


def _config_from_args(args) -> ProverConfig:
    precedence_mode = None
    precedence_list = None
    if args.precedence:
        if args.precedence.startswith("explicit:"):
            precedence_mode = "explicit"
            precedence_list = args.precedence.split(":", 1)[1].split(",")
        elif args.precedence in ("arity", "decl"):
            precedence_mode = args.precedence
        else:
            raise ProblemError(f"bad --precedence value {args.precedence!r}")
    return ProverConfig(
        calculus=_CALCULI[args.calculus],
        chaining=args.chaining,
        induction=args.ind,
        ind_redundancy=args.ind_redundancy,
        induct_complex_terms=args.induct_complex,
        ordering=args.ordering,
        precedence_mode=precedence_mode,
        precedence_list=precedence_list,
        max_rw_depth=args.max_rw_depth,
        clause_limit=args.clause_limit,
        time_limit=args.time_limit,
        goal_oriented_rw=args.goal_oriented,
        selection_mode=args.selection,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="indsat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    prove = sub.add_parser("prove", help="run the saturation prover on a problem")
    prove.add_argument("problem")
    _add_config_flags(prove)
    prove.add_argument("--proof", choices=("off", "text", "script"), default="off")
    prove.add_argument("--stats", action="store_true")

    check = sub.add_parser("check", help="replay a proof script")
    check.add_argument("problem")
    check.add_argument("script")
    _add_config_flags(check)

    args = parser.parse_args(argv)
    try:
        with open(args.problem, encoding="utf-8") as f:
            problem = parse_problem(f.read())
        config = _config_from_args(args)
    except (ProblemError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3

    if args.command == "check":
        try:
            with open(args.script, encoding="utf-8") as f:
                script = f.read()
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return 3
        result = check_proof(problem, script, config)
        if result.ok:
            print("proof accepted")
            return 0
        print(f"proof rejected at step {result.failing_step}: {result.message}")
        return 1

    result = saturate(problem, config)
    if args.stats:
        for key in (
            "generated",
            "activated",
            "ind_performed",
            "ind_skipped",
            "ind_candidates",
            "rw_down",
            "rw_up",
            "chain1",
            "chain2",
            "demodulated",
        ):
            print(f"{key}={result.stats.get(key, 0)}")
        for cert in result.certificates:
            print(f"certificate={json.dumps(cert.as_record(term_to_text))}")

    if result.status == REFUTATION:
        print("% SZS status Theorem")
        if args.proof == "script":
            sys.stdout.write(render_proof_script(result))
        elif args.proof == "text":
            sys.stdout.write(render_proof_text(result))
        return 0
    if result.status == SATURATED:
        print("% SZS status Saturated")
        return 1
    print(f"% SZS status ResourceOut ({result.reason})")
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
