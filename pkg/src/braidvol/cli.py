"""Command-line front end: compute, verify, trace.

Every run emits a single machine-readable JSON document (stdout or
``--json-out``) that echoes the full configuration, including the RNG seed,
so identical invocations produce byte-identical output.

Exit codes: 0 success, 1 usage or parse error, 2 no converged solution
branch, 3 internal numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .braid import BraidParseError, MultiComponentError, parse_braid, run_pattern
from .cluster import ClusterSeed, DegenerateSeedError, build_exchange_matrix, y_from_x
from .geometry import GeometryError
from .solver import (
    DeltaSchedule,
    SolverConfig,
    SolverError,
    enumerate_solutions,
    fixture_problem,
    generic_problem,
    problem_for_braid,
)
from .verify import case_by_name, check_identity, corruption_case, standard_cases

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_SOLUTION = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


@dataclass
class RunConfig:
    mode: str
    braid: str
    strands: int | None
    fixture: str | None
    delta: float
    delta0: float
    ratio: float
    steps: int
    starts: int
    tol: float
    max_iter: int
    rng_seed: int
    trials: int
    case: str | None
    json_out: str | None
    digits: int = 10

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "braid": self.braid,
            "strands": self.strands,
            "fixture": self.fixture,
            "delta": self.delta,
            "delta0": self.delta0,
            "ratio": self.ratio,
            "steps": self.steps,
            "starts": self.starts,
            "tol": self.tol,
            "maxIter": self.max_iter,
            "rngSeed": self.rng_seed,
            "trials": self.trials,
            "case": self.case,
            "digits": self.digits,
        }


def _build_parser() -> _Parser:
    parser = _Parser(prog="braidvol", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p):
        p.add_argument("--braid", default="", help="whitespace-separated signed generator letters")
        p.add_argument("--strands", type=int, default=None, help="strand count override")
        p.add_argument("--seed", type=int, default=0, dest="rng_seed", help="RNG seed (echoed in output)")
        p.add_argument("--json-out", default=None, help="write the JSON document to this path instead of stdout")

    p_compute = sub.add_parser("compute", help="solve periodicity and compute the complex volume")
    common(p_compute)
    p_compute.add_argument(
        "--fixture", default=None,
        help="ansatz family: fig8-ansatz, trefoil-ansatz, or 'generic' to force "
             "the pinned-ratio free vector (default: auto-detect by braid word)",
    )
    p_compute.add_argument("--delta0", type=float, default=1e-2)
    p_compute.add_argument("--ratio", type=float, default=0.5)
    p_compute.add_argument("--steps", type=int, default=12)
    p_compute.add_argument("--starts", type=int, default=64)
    p_compute.add_argument("--tol", type=float, default=1e-10)
    p_compute.add_argument("--max-iter", type=int, default=200)

    p_verify = sub.add_parser("verify", help="run the exact rational identity suite")
    common(p_verify)
    p_verify.add_argument("--case", default=None, help="run a single named identity case")
    p_verify.add_argument("--trials", type=int, default=100)
    p_verify.add_argument("--inject-corruption", action="store_true",
                          help="test hook: include a deliberately broken map (must fail)")

    p_trace = sub.add_parser("trace", help="drive a seed along the braid and dump the trajectory")
    common(p_trace)
    p_trace.add_argument("--fixture", default=None)
    p_trace.add_argument("--delta", type=float, default=1e-3)
    p_trace.add_argument("--x0", default=None,
                         help="inline initial vector as JSON: [[re,im], ...] or [re, ...]")
    return parser


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        mode=args.mode,
        braid=args.braid,
        strands=args.strands,
        fixture=getattr(args, "fixture", None),
        delta=getattr(args, "delta", 1e-3),
        delta0=getattr(args, "delta0", 1e-2),
        ratio=getattr(args, "ratio", 0.5),
        steps=getattr(args, "steps", 12),
        starts=getattr(args, "starts", 64),
        tol=getattr(args, "tol", 1e-10),
        max_iter=getattr(args, "max_iter", 200),
        rng_seed=args.rng_seed,
        trials=getattr(args, "trials", 100),
        case=getattr(args, "case", None),
        json_out=args.json_out,
    )


def _emit(doc: dict, config: RunConfig) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2)
    if config.json_out:
        with open(config.json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _fmt(value: float | None, digits: int):
    return None if value is None else float(f"{value:.{digits}g}")


def cmd_compute(args) -> int:
    config = _config_from_args(args)
    braid = parse_braid(config.braid, n=config.strands)
    if config.fixture == "generic":
        problem = generic_problem(braid)
    elif config.fixture:
        problem = fixture_problem(config.fixture, braid)
    else:
        problem = problem_for_braid(braid)
    schedule = DeltaSchedule(delta0=config.delta0, ratio=config.ratio, steps=config.steps)
    solver_config = SolverConfig(tol=config.tol, max_iter=config.max_iter)
    branches = enumerate_solutions(
        problem,
        n_starts=config.starts,
        rng_seed=config.rng_seed,
        schedule=schedule,
        config=solver_config,
    )
    converged = [b for b in branches if b.converged]
    doc = {
        "config": config.to_json_dict(),
        "problem": problem.name,
        "letters": [[i, eps] for i, eps in braid.letters],
        "branches": [b.to_json_dict() for b in branches],
        "summary": {
            "branchCount": len(branches),
            "convergedCount": len(converged),
            "best": None if not converged else {
                "vol": _fmt(converged[0].vol, config.digits),
                "cs": _fmt(converged[0].cs, config.digits),
                "csMod": _fmt(converged[0].cs_mod, config.digits),
                "errorEstimate": _fmt(converged[0].error_estimate, config.digits),
            },
        },
    }
    _emit(doc, config)
    return EXIT_OK if converged else EXIT_NO_SOLUTION


def cmd_verify(args) -> int:
    config = _config_from_args(args)
    if config.case:
        cases = [case_by_name(config.case, include_corruption=args.inject_corruption)]
    else:
        cases = standard_cases()
        if args.inject_corruption:
            cases.append(corruption_case())
    results = [check_identity(c, trials=config.trials, rng_seed=config.rng_seed) for c in cases]
    all_passed = all(r.passed for r in results)
    doc = {
        "config": config.to_json_dict(),
        "cases": [r.to_json_dict() for r in results],
        "allPassed": all_passed,
    }
    _emit(doc, config)
    return EXIT_OK if all_passed else EXIT_NO_SOLUTION


def _parse_inline_x0(text: str) -> list[complex]:
    try:
        raw = json.loads(text)
        out = []
        for item in raw:
            if isinstance(item, (int, float)):
                out.append(complex(item))
            else:
                re, im = item
                out.append(complex(re, im))
        return out
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad --x0 JSON: {exc}") from None


def cmd_trace(args) -> int:
    config = _config_from_args(args)
    if config.fixture:
        problem = fixture_problem(config.fixture)
        braid = problem.braid
        if config.braid and parse_braid(config.braid, n=config.strands).letters != braid.letters:
            raise UsageError(f"--braid does not match fixture {config.fixture!r}")
        x0 = [complex(v) for v in problem.build_x0(problem.start_params(config.delta), config.delta)]
    elif args.x0 is not None:
        x0 = _parse_inline_x0(args.x0)
        n = config.strands if config.strands else (len(x0) - 1) // 3
        braid = parse_braid(config.braid, n=max(n, 1))
    else:
        raise UsageError("trace needs either --fixture or --x0")
    traj = run_pattern(braid, x0)
    doc = traj.to_json_dict()
    res = traj.residual()
    scale = max(abs(complex(v)) for v in traj.seeds[0])
    doc["residual_inf"] = max((abs(complex(v)) for v in res), default=0.0)
    doc["rel_residual"] = doc["residual_inf"] / scale if scale else 0.0
    if braid.n >= 2:
        B = build_exchange_matrix(braid.n)
        doc["y"] = [
            [[complex(v).real, complex(v).imag] for v in y_from_x(ClusterSeed(s, B))]
            for s in traj.seeds
        ]
    else:
        doc["y"] = None
    doc = {"config": config.to_json_dict(), **doc}
    _emit(doc, config)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"braidvol: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.mode == "compute":
            return cmd_compute(args)
        if args.mode == "verify":
            return cmd_verify(args)
        return cmd_trace(args)
    except UsageError as exc:
        print(f"braidvol: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BraidParseError, MultiComponentError) as exc:
        print(f"braidvol: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GeometryError, SolverError, DegenerateSeedError, ZeroDivisionError,
            FloatingPointError) as exc:
        print(f"braidvol: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
