"""Golden reference checks: every pinned worked example in one registry.

Each check builds its game from scratch, solves it, and compares against
the published value at a stated tolerance.  The CLI ``verify`` subcommand
and the acceptance test suite both run this registry.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bayesian import (
    EclBayesianGame,
    JointStrategyDistribution,
    TypePrior,
    conditional_expected_utility,
    dependency_certificate_pure,
)
from .games import (
    NormalFormGame,
    NormalFormSeparableGame,
    from_normal_form,
    joint_feasible_set,
    nash_equilibrium,
    pure_nash_equilibria,
)
from .geometry import ParametricFrontierSet, minkowski_sum
from .solutions import SolutionWeights, decompose, nbs, variance_normalized_compromise
from .stability import CoalitionFunction, core_membership, find_core_point, threat_point
from .sweeps import (
    SweepSpec,
    log_closed_point,
    run_sweep,
    sqrt_closed_point,
)

__all__ = ["GoldenResult", "GOLDEN_CHECKS", "run_golden", "alice_bob_sets",
           "table2_game", "table6_game", "table7_game", "table9_game",
           "table10_game", "bayesian_pd_pair_tables"]


@dataclass
class GoldenResult:
    name: str
    passed: bool
    residual: float
    detail: str
    runtime: float = 0.0


# ---------------------------------------------------------------------------
# shared game constructions


def alice_bob_sets():
    """Resource-split sets with budgets 10 and 5: linear returns for the
    first value system, square-root returns for the second."""
    return (ParametricFrontierSet.linear_quadratic(10.0),
            ParametricFrontierSet.linear_quadratic(5.0))


def table2_game() -> NormalFormSeparableGame:
    return NormalFormSeparableGame((
        [[0.0, -3.0], [-1.0, 0.0]],
        [[0.0, 3.0], [-3.0, 2.0]],
    ))


def table6_game() -> NormalFormGame:
    # player 1 picks rows, player 2 picks columns; entries are (u1, u2)
    return NormalFormGame(np.array([
        [[4.0, 4.0], [2.0, 5.0], [-4.0, 2.0]],
        [[5.0, 2.0], [3.0, 3.0], [-3.0, 2.0]],
    ]))


def table7_game(players: int = 2) -> EclBayesianGame:
    u = np.zeros((2, 2, 2))
    u[0, 0] = [2.0, 3.0]
    u[0, 1] = [2.0, 0.0]
    u[1, 0] = [2.0, 0.0]
    u[1, 1] = [2.0, 3.0]
    prior = TypePrior.uniform_independent(2, players)
    return EclBayesianGame(players=players, payoff=u, prior=prior)


def bayesian_pd_pair_tables(a=0.5, b=0.0, c=0.0, d=0.5) -> JointStrategyDistribution:
    """Same-type players mirror each other; opposite-type pairs follow the
    (a, b, c, d) action table."""
    q = np.zeros((2, 2, 2, 2))
    q[0, 0] = [[0.5, 0.0], [0.0, 0.5]]
    q[1, 1] = [[0.5, 0.0], [0.0, 0.5]]
    q[0, 1] = [[a, b], [c, d]]
    q[1, 0] = np.asarray([[a, b], [c, d]]).T
    return JointStrategyDistribution.from_pair_tables(q)


def table9_game() -> NormalFormSeparableGame:
    return NormalFormSeparableGame((
        [[3.0, 0, 0], [2.5, 2.5, 0], [2.0, 2, 2]],
        [[0.0, 3, 0], [2.5, 2.5, 0], [2.0, 2, 2]],
        [[0.0, 0, 3], [0.5, 0.5, 0], [0.5, 0.5, 0]],
    ))


def table10_game() -> NormalFormSeparableGame:
    return NormalFormSeparableGame((
        [[5.0, 0, 5], [4.0, 4, 0], [3.0, 3, 6]],
        [[0.0, 5, 5], [4.0, 4, 0], [3.0, 3, 6]],
        [[0.0, 0, 5], [0.0, 0, 0], [0.0, 0, 0]],
    ))


# ---------------------------------------------------------------------------
# the checks


def check_alice_bob(tol: float = 0.01) -> GoldenResult:
    """Criterion 1: the two-agent resource-split compromise lands at
    A = 8.15, B = 3.15 (own-value spending levels) within 0.01, in < 1 s."""
    t0 = time.perf_counter()
    alice, bob = alice_bob_sets()
    d = np.array([10.0, math.sqrt(10.0)])
    joint = minkowski_sum([alice, bob])
    rep = nbs(joint, d)
    parts = decompose([alice, bob], rep.point)
    a_spend, b_spend = float(parts[0][0]), float(parts[1][0])
    dt = time.perf_counter() - t0
    resid = max(abs(a_spend - 8.15), abs(b_spend - 3.15))
    passed = resid <= tol and dt < 1.0
    return GoldenResult("alice-bob-nbs", passed, resid,
                        f"A={a_spend:.4f}, B={b_spend:.4f}, {dt * 1e3:.0f} ms",
                        dt)


def check_variance_normalization(tol: float = 1e-12) -> GoldenResult:
    """Criterion 2: the variance-normalization counterexample, bit for bit."""
    t0 = time.perf_counter()
    game = table2_game()
    rep = variance_normalized_compromise(game)
    expected_table = np.array([
        [0.2, -0.1],   # (a1, a2)
        [-0.1, -0.2],  # (a1, b2)
        [0.1, 0.2],    # (b1, a2)
        [-0.2, 0.1],   # (b1, b2)
    ])
    resid = max(
        float(np.max(np.abs(rep.means - [-2.0, 1.0]))),
        float(np.max(np.abs(rep.variances - [10.0, 10.0]))),
        float(np.max(np.abs(rep.normalized_table - expected_table))),
    )
    outcome_ok = rep.outcome == (1, 0)
    # the compromise leaves player 1 below their no-compromise value
    loses = rep.chosen_normalized[0] < rep.normalized_table[0][0]
    passed = resid <= tol and outcome_ok and loses
    return GoldenResult("variance-normalization", passed, resid,
                        f"outcome={rep.outcome}, normalized={rep.chosen_normalized}",
                        time.perf_counter() - t0)


def check_bayesian_pd(tol: float = 1e-12) -> GoldenResult:
    """Criterion 3: conditional expected utilities and the dependency
    certificate for the two-type social dilemma, exact arithmetic."""
    t0 = time.perf_counter()
    s = bayesian_pd_pair_tables()
    g2 = table7_game(players=2)
    g11 = table7_game(players=11)
    vals = (
        conditional_expected_utility(g2, s, 0, 0),
        conditional_expected_utility(g2, s, 1, 0),
        conditional_expected_utility(g11, s, 0, 0),
        conditional_expected_utility(g11, s, 1, 0),
    )
    resid = max(abs(vals[0] - 4.0), abs(vals[1] - 4.5),
                abs(vals[2] - 22.0), abs(vals[3] - 18.0))
    cert2, _ = dependency_certificate_pure(g2, (0, 0))
    cert11, _ = dependency_certificate_pure(g11, (0, 0))
    passed = resid <= tol and (cert2 is False) and (cert11 is True)
    return GoldenResult("bayesian-pd", passed, resid,
                        f"EU={vals}, certificates=({cert2}, {cert11})",
                        time.perf_counter() - t0)


def check_weighted_nbs(tol: float = 0.01) -> GoldenResult:
    """Criterion 4: asymmetric-prior compromise at (0.92, 0.39) with
    weights (3/4, 1/4) and disagreement (3/4, 1/4)."""
    t0 = time.perf_counter()
    f1 = ParametricFrontierSet.disk(0.75, 0.75)
    f2 = ParametricFrontierSet.disk(0.25, 0.25)
    rep = nbs(minkowski_sum([f1, f2]), [0.75, 0.25],
              SolutionWeights.of([0.75, 0.25]))
    resid = float(max(abs(rep.point[0] - 0.92), abs(rep.point[1] - 0.39)))
    return GoldenResult("weighted-bayesian-nbs", resid <= tol, resid,
                        f"point={rep.point}", time.perf_counter() - t0)


def check_double_decrease(tol: float = 1e-5) -> GoldenResult:
    """Criterion 5: numeric compromise matches the square-root closed forms
    across the belief grid; the per-type point is pinned at p = 3/4."""
    t0 = time.perf_counter()
    rows = run_sweep(SweepSpec(model="sqrt"))
    resid = max(r.residual for r in rows)
    row75 = next(r for r in rows if abs(r.p - 0.75) < 1e-9)
    expected = sqrt_closed_point(0.75)
    point_err = max(abs(row75.point_numeric[0] - expected[0]),
                    abs(row75.point_numeric[1] - expected[1]))
    passed = resid <= tol and point_err <= 1e-6
    return GoldenResult("double-decrease-sweep", passed, max(resid, point_err),
                        f"max residual={resid:.2e}, point error={point_err:.2e}",
                        time.perf_counter() - t0)


def check_paretotopia(tol: float = 1e-5) -> GoldenResult:
    """Criterion 6: numeric compromise matches the log-returns closed forms
    for budgets 100 and 1e9."""
    t0 = time.perf_counter()
    worst = 0.0
    for r in (100.0, 1e9):
        rows = run_sweep(SweepSpec(model="log", r=r))
        for row in rows:
            expected = log_closed_point(row.p, r)
            worst = max(worst, row.residual,
                        abs(row.point_numeric[0] - expected[0]),
                        abs(row.point_numeric[1] - expected[1]))
    return GoldenResult("paretotopia-sweep", worst <= tol, worst,
                        f"worst residual={worst:.2e}",
                        time.perf_counter() - t0)


def check_threat_game(tol: float = 0.01) -> GoldenResult:
    """Criterion 7: threat point (-3, 2); compromise (5.5, 2.75) in
    threat-normalized units, below the (6, 1) equilibrium for player 1."""
    t0 = time.perf_counter()
    game = table6_game()
    res = threat_point(game, grid=32)
    d = res.point
    normalized = res.nbs_report.point - d
    resid = max(abs(d[0] + 3.0), abs(d[1] - 2.0),
                abs(normalized[0] - 5.5), abs(normalized[1] - 2.75))
    ne = pure_nash_equilibria(game)
    ne_norm = ne[0][1] - d
    passed = (resid <= tol and res.fixed_point
              and normalized[0] < ne_norm[0] and abs(ne_norm[0] - 6.0) <= tol)
    return GoldenResult("threat-game", passed, float(resid),
                        f"threat={d}, normalized NBS={normalized}, NE={ne_norm}",
                        time.perf_counter() - t0)


def check_core_results(tol: float = 0.01) -> GoldenResult:
    """Criterion 8: the three-player core examples, in < 5 s."""
    t0 = time.perf_counter()
    g9 = table9_game()
    _, ne9 = nash_equilibrium(g9)
    bg9 = from_normal_form(g9, ne9)
    rep = nbs(joint_feasible_set(bg9), ne9)
    resid = float(np.max(np.abs(rep.point - [13 / 3, 13 / 3, 17 / 3])))
    nu_alpha = CoalitionFunction.alpha(g9)
    in_core, blocker = core_membership(nu_alpha, rep.point)
    safe_ok, _ = core_membership(nu_alpha, [5.0, 5.0, 3.0])
    g10 = table10_game()
    nu_ne = CoalitionFunction.nash(g10)
    empty = find_core_point(nu_ne) is None
    dt = time.perf_counter() - t0
    passed = (resid <= tol and not in_core and blocker is not None
              and blocker.members == (0, 1) and safe_ok and empty and dt < 5.0)
    return GoldenResult(
        "core-results", passed, resid,
        f"NBS={rep.point}, blocker={getattr(blocker, 'members', None)}, "
        f"(5,5,3) in alpha-core={safe_ok}, NE-core empty={empty}, {dt:.2f} s",
        dt)


GOLDEN_CHECKS: list[tuple[str, Callable[..., GoldenResult]]] = [
    ("alice-bob-nbs", check_alice_bob),
    ("variance-normalization", check_variance_normalization),
    ("bayesian-pd", check_bayesian_pd),
    ("weighted-bayesian-nbs", check_weighted_nbs),
    ("double-decrease-sweep", check_double_decrease),
    ("paretotopia-sweep", check_paretotopia),
    ("threat-game", check_threat_game),
    ("core-results", check_core_results),
]


def run_golden(name_filter: str | None = None,
               tol_override: float | None = None) -> list[GoldenResult]:
    results = []
    for name, fn in GOLDEN_CHECKS:
        if name_filter and name_filter not in name:
            continue
        if tol_override is not None:
            results.append(fn(tol=tol_override))
        else:
            results.append(fn())
    return results
