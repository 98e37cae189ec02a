"""Command-line front end: solve game documents, emit sweep CSVs, and run
the golden verification table.

Exit codes: 0 success, 1 verification failures, 2 document or validation
errors, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bayesian import (
    EclBayesianBargainingGame,
    EclBayesianGame,
    bayesian_nash,
    bne_pure,
    dependency_certificate_point,
    dependency_certificate_pure,
    individual_feasible_set,
    nbs_solution,
)
from .errors import (
    InfeasiblePointError,
    NoStrictImprovementError,
    SolverConvergenceError,
)
from .games import (
    NormalFormGame,
    NormalFormSeparableGame,
    nash_equilibrium,
    pure_nash_equilibria,
)
from .geometry import minkowski_sum
from .golden import run_golden
from .schema import SchemaError, load_document, validate_report
from .solutions import SolutionWeights, armstrong_solution, ksbs, nbs
from .stability import (
    CoalitionFunction,
    core_membership,
    stable_disagreement,
    threat_point,
    worst_case_matrix,
)
from .sweeps import SweepSpec, run_sweep, write_csv

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_VALIDATION = 2
EXIT_NO_CONVERGENCE = 3


def _parse_weights(text: str, n: int, prior=None) -> SolutionWeights:
    if text == "uniform":
        return SolutionWeights.uniform(n)
    if text == "prior":
        if prior is None:
            raise SchemaError("prior weights need a game with a type prior")
        return SolutionWeights.of(prior.marginal)
    if text.startswith("explicit="):
        vals = [float(v) for v in text[len("explicit="):].split(",")]
        return SolutionWeights.of(vals)
    raise SchemaError(f"unknown weights specifier {text!r}")


def _report_entry(rep) -> dict:
    return {
        "point": [float(v) for v in rep.point],
        "objective": float(rep.objective),
        "gains": [float(v) for v in rep.gains],
        "iterations": int(rep.iterations),
        "converged": bool(rep.converged),
    }


def _solve_separable(game: NormalFormSeparableGame, args, doc) -> dict:
    n = game.players
    solver = doc.get("solver", {})
    d_spec = args.disagreement or solver.get("disagreement", "nash")
    if isinstance(d_spec, str) and d_spec.startswith("point="):
        d_spec = [float(v) for v in d_spec[len("point="):].split(",")]
    convention = d_spec if isinstance(d_spec, str) else "explicit"
    if d_spec == "nash":
        _, d = nash_equilibrium(game)
    elif d_spec == "threat":
        d = threat_point(game).point
    elif d_spec == "stable":
        d = stable_disagreement(game)
    else:
        d = np.asarray(d_spec, dtype=float)
    weights = _parse_weights(args.weights or "uniform", n)
    joint = minkowski_sum(game.individual_sets())
    wanted = [args.solution] if args.solution else ["nbs", "ksbs", "armstrong"]
    solutions = {}
    for name in wanted:
        fn = {"nbs": lambda: nbs(joint, d, weights),
              "ksbs": lambda: ksbs(joint, d),
              "armstrong": lambda: armstrong_solution(joint, d)}[name]
        solutions[name] = _report_entry(fn())
    core = None
    if n <= 8:
        point = np.asarray(solutions[wanted[0]]["point"])
        verdicts = {}
        for label, nu in (("alpha", CoalitionFunction.alpha(game)),
                          ("nash", CoalitionFunction.nash(game)),
                          ("pareto-min", CoalitionFunction.with_matrix(
                              game, worst_case_matrix(game)))):
            ok, blocker = core_membership(nu, point)
            verdicts[label] = {
                "in_core": bool(ok),
                "blocking_coalition": list(blocker.members) if blocker else None,
            }
        core = {"point": [float(v) for v in point], "verdicts": verdicts}
    return {
        "schema_version": 1,
        "kind": doc["kind"],
        "disagreement": [float(v) for v in d],
        "disagreement_convention": convention,
        "solutions": solutions,
        "dependency_equilibrium": None,
        "core": core,
    }


def _solve_normal_form(game: NormalFormGame, args, doc) -> dict:
    d_spec = args.disagreement or doc.get("solver", {}).get("disagreement", "threat")
    if isinstance(d_spec, str) and d_spec.startswith("point="):
        d_spec = [float(v) for v in d_spec[len("point="):].split(",")]
    convention = d_spec if isinstance(d_spec, str) else "explicit"
    if d_spec == "threat":
        d = threat_point(game).point
    elif d_spec == "nash":
        eq = pure_nash_equilibria(game)
        if not eq:
            raise SchemaError("the game has no pure equilibrium; pass point=...")
        d = eq[0][1]
    elif d_spec == "stable":
        raise SchemaError("the stable disagreement point needs a separable game")
    else:
        d = np.asarray(d_spec, dtype=float)
    weights = _parse_weights(args.weights or "uniform", game.players)
    joint = game.outcome_hull()
    wanted = [args.solution] if args.solution else ["nbs"]
    solutions = {}
    for name in wanted:
        fn = {"nbs": lambda: nbs(joint, d, weights),
              "ksbs": lambda: ksbs(joint, d),
              "armstrong": lambda: armstrong_solution(joint, d)}[name]
        solutions[name] = _report_entry(fn())
    return {
        "schema_version": 1,
        "kind": doc["kind"],
        "disagreement": [float(v) for v in d],
        "disagreement_convention": convention,
        "solutions": solutions,
        "dependency_equilibrium": None,
        "core": None,
    }


def _solve_bayesian_ecl(game: EclBayesianGame, args, doc) -> dict:
    beta = bne_pure(game)
    payload = doc["payload"]
    de = None
    if "compromise_strategy" in payload:
        alpha = tuple(payload["compromise_strategy"])
        ok, slack = dependency_certificate_pure(game, alpha, beta)
        de = {"strategy": list(alpha), "certified": bool(ok),
              "slack": [float(v) for v in slack]}
    from .bayesian import expected_utility_pure
    eu = [float(expected_utility_pure(game, beta, t)) for t in range(game.num_types)]
    return {
        "schema_version": 1,
        "kind": doc["kind"],
        "disagreement": eu,
        "disagreement_convention": "nash",
        "solutions": {"bayesian-nash": {"point": eu, "objective": 0.0,
                                        "gains": [0.0] * game.num_types,
                                        "iterations": 0, "converged": True}},
        "dependency_equilibrium": de,
        "core": None,
    }


def _solve_bayesian_bargaining(game: EclBayesianBargainingGame, args, doc) -> dict:
    _, d_nash = bayesian_nash(game)
    weights = _parse_weights(args.weights or "prior", game.num_types, game.prior)
    rep = nbs_solution(game, weights)
    solutions = {"nbs": _report_entry(rep)}
    if args.solution == "ksbs" or not args.solution:
        sets = [individual_feasible_set(game, t) for t in range(game.num_types)]
        try:
            solutions["ksbs"] = _report_entry(ksbs(minkowski_sum(sets),
                                                   game.disagreement))
        except NotImplementedError:
            pass
    certified = dependency_certificate_point(game, rep.point, d_nash)
    return {
        "schema_version": 1,
        "kind": doc["kind"],
        "disagreement": [float(v) for v in game.disagreement],
        "disagreement_convention": "document",
        "solutions": solutions,
        "dependency_equilibrium": {"point": [float(v) for v in rep.point],
                                   "certified": bool(certified)},
        "core": None,
    }


def cmd_solve(args) -> int:
    from .schema import build_game

    try:
        doc = load_document(args.game)
        game = build_game(doc)
        if isinstance(game, NormalFormSeparableGame):
            report = _solve_separable(game, args, doc)
        elif isinstance(game, NormalFormGame):
            report = _solve_normal_form(game, args, doc)
        elif isinstance(game, EclBayesianGame):
            report = _solve_bayesian_ecl(game, args, doc)
        else:
            report = _solve_bayesian_bargaining(game, args, doc)
        validate_report(report)
    except (SchemaError, InfeasiblePointError, NoStrictImprovementError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverConvergenceError as exc:
        print(f"solver failed to converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    if any(not entry.get("converged", True)
           for entry in report["solutions"].values()):
        print(json.dumps(report, indent=2, sort_keys=True))
        print("solver reported non-convergence", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        spec = SweepSpec(model=args.model, r=args.r, p_start=args.p_start,
                         p_stop=args.p_stop, step=args.step)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    rows = run_sweep(spec)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_golden(name_filter=args.filter, tol_override=args.tol)
    if not results:
        print(f"no golden checks match filter {args.filter!r}", file=sys.stderr)
        return EXIT_VALIDATION
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  residual={r.residual:.3e}  {r.detail}")
    failed = sum(not r.passed for r in results)
    total = sum(r.runtime for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed in {total:.1f} s")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eclgames",
        description="Bargaining solutions, Bayesian games, and coalitional "
                    "stability for evidential cooperation models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a JSON game document")
    p_solve.add_argument("--game", required=True, help="path to the game document")
    p_solve.add_argument("--solution", choices=["nbs", "ksbs", "armstrong"],
                         default=None, help="solution concept (default: all applicable)")
    p_solve.add_argument("--disagreement", default=None,
                         help="nash | threat | stable | point=v1,v2,...")
    p_solve.add_argument("--weights", default=None,
                         help="uniform | prior | explicit=w1,w2,...")
    p_solve.set_defaults(fn=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="emit a belief-sweep CSV")
    p_sweep.add_argument("--model", choices=["sqrt", "log"], required=True)
    p_sweep.add_argument("--r", type=float, default=None,
                         help="resource budget (log model)")
    p_sweep.add_argument("--step", type=float, default=0.05)
    p_sweep.add_argument("--p-start", type=float, default=0.5, dest="p_start")
    p_sweep.add_argument("--p-stop", type=float, default=1.0, dest="p_stop")
    p_sweep.add_argument("--out", default=None, help="output file (default stdout)")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_verify = sub.add_parser("verify",
                              help="run the golden checks against published values")
    p_verify.add_argument("--filter", default=None,
                          help="run only checks whose name contains this substring")
    p_verify.add_argument("--tol", type=float, default=None,
                          help="override the per-check tolerance")
    p_verify.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
