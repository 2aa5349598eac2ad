"""Command line entry point: ``eapms solve | gen | experiment``.

Exit codes: 0 success, 2 invalid input (parse or validation), 3 budget or
infeasibility failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import (
    BudgetExceededError,
    CandidateInfeasibleError,
    DegenerateInstanceError,
    InstanceParseError,
    InvalidInstanceError,
    InvalidSpecError,
    MalformedGraphError,
    SweepError,
)
from .experiment import ExperimentSpec, gen_random, load_instance, run_experiment, save_instance, write_csv
from .model import e_min
from .oracle import OracleBudget, exact_opt
from .solver import SweepConfig, tms_solve, ttb_solve

EXIT_INVALID = 2
EXIT_UNSOLVED = 3


def _solve(args) -> int:
    inst = load_instance(args.input)
    if args.gamma is not None:
        inst = inst.with_price(args.gamma * e_min(inst))
    if args.method == "ttb":
        report = ttb_solve(inst, SweepConfig(epsilon=args.epsilon, ub_rule=args.ub_rule))
    elif args.method == "tms":
        report = tms_solve(inst)
    else:
        report = exact_opt(inst, OracleBudget(args.budget))
    doc = report.to_dict()
    # one top-level key per line keeps large schedules readable
    body = ",\n".join(f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in doc.items())
    sys.stdout.write("{\n" + body + "\n}\n")
    return 0


def _gen(args) -> int:
    spec = ExperimentSpec(
        gamma=(args.gamma,),
        seed=args.seed,
        task_types=args.task_types,
        machine_types=args.machine_types,
        machines_per_type=args.machines_per_type,
        tasks_per_q=args.tasks_per_q,
    )
    save_instance(gen_random(spec, args.q), args.out)
    return 0


def _experiment(args) -> int:
    rows = run_experiment(ExperimentSpec.load(args.spec), jobs=args.jobs)
    write_csv(rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eapms", description="Energy-aware profit-rate scheduling solvers.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance file and print a JSON report")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=("ttb", "tms", "oracle"), default="ttb")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--gamma", type=float, help="set price to gamma * E_min")
    p.add_argument("--ub-rule", choices=("energy", "apc"), default="energy")
    p.add_argument("--budget", type=int, default=10**7, help="oracle state budget")
    p.set_defaults(func=_solve)

    p = sub.add_parser("gen", help="write a random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--q", type=int, required=True, help="experiment index; the instance has tasks_per_q * q tasks")
    p.add_argument("--out", required=True)
    p.add_argument("--gamma", type=float, default=1.2)
    p.add_argument("--task-types", type=int, default=30)
    p.add_argument("--machine-types", type=int, default=9)
    p.add_argument("--machines-per-type", type=int, default=40)
    p.add_argument("--tasks-per-q", type=int, default=150)
    p.set_defaults(func=_gen)

    p = sub.add_parser("experiment", help="run an experiment spec and write CSV rows")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InstanceParseError, InvalidInstanceError, InvalidSpecError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (BudgetExceededError, CandidateInfeasibleError, SweepError, DegenerateInstanceError, MalformedGraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSOLVED


if __name__ == "__main__":
    sys.exit(main())
