"""Threat-game disagreement points and coalitional stability.

Coalitions are judged by what payoffs they can guarantee their members.
Three conventions for the behavior of outsiders are supported: worst-case
responses (the alpha-effective sets), any fixed worst-case payoff matrix A
(A-effective sets), and the special case where A collects Nash-equilibrium
contributions.  The core is the set of feasible payoff vectors no coalition
can improve on strictly for all of its members.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import InfeasiblePointError, SolverConvergenceError
from .games import (
    NormalFormGame,
    NormalFormSeparableGame,
    nash_equilibrium,
)
from .geometry import PolytopeSet, as_payoff_vector, hull_vertices_2d
from .solutions import SolutionReport, SolutionWeights, nbs

__all__ = [
    "Coalition",
    "WorstCasePayoffMatrix",
    "CoalitionFunction",
    "ThreatPointResult",
    "threat_point",
    "worst_case_matrix",
    "nash_payoff_matrix",
    "effective_set_membership",
    "core_membership",
    "find_core_point",
    "stable_disagreement",
    "balanced_combination",
    "BalancedCombinationResult",
]

MAX_COALITION_PLAYERS = 8
BLOCK_TOL = 1e-7


@dataclass(frozen=True)
class Coalition:
    """Nonempty subset of players, stored sorted."""

    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(i) for i in self.members)))
        if not members:
            raise ValueError("a coalition must be nonempty")
        if members[0] < 0:
            raise ValueError("player indices must be nonnegative")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members) -> "Coalition":
        return cls(tuple(members))

    def __contains__(self, i) -> bool:
        return i in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def all_coalitions(n: int):
    """All nonempty coalitions in size-then-lexicographic order."""
    if n > MAX_COALITION_PLAYERS:
        raise ValueError(f"coalition enumeration is capped at n <= {MAX_COALITION_PLAYERS}")
    for size in range(1, n + 1):
        for members in itertools.combinations(range(n), size):
            yield Coalition(members)


@dataclass(frozen=True)
class WorstCasePayoffMatrix:
    """Matrix A with A[i, j] = payoff player i provides to player j in the
    worst case considered.  Entries must be achievable inside F_i."""

    values: np.ndarray
    game: NormalFormSeparableGame | None = None

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        if v.shape[0] != v.shape[1]:
            raise ValueError("the worst-case matrix must be square")
        if self.game is not None:
            for i in range(v.shape[0]):
                gens = self.game.contributions[i]
                lo = gens.min(axis=0) - 1e-9
                hi = gens.max(axis=0) + 1e-9
                if np.any(v[i] < lo) or np.any(v[i] > hi):
                    raise ValueError(
                        f"row {i} is not achievable inside player {i}'s feasible set")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def nash_payoff_matrix(game: NormalFormSeparableGame) -> WorstCasePayoffMatrix:
    """A-matrix collecting each player's Nash-equilibrium contributions."""
    actions, _ = nash_equilibrium(game)
    rows = np.array([game.contributions[i][a] for i, a in enumerate(actions)])
    return WorstCasePayoffMatrix(rows, game)


def worst_case_matrix(game: NormalFormSeparableGame, weight_step: float = 0.05,
                      refine: bool = True) -> WorstCasePayoffMatrix:
    """Worst-case Pareto-optimal contributions over all coalitions.

    ``A[i, j]`` is the minimum utility player ``i`` hands to ``j`` across
    every coalition containing ``i`` and every Pareto-optimal play of that
    coalition.  Pareto-optimal plays are sampled as argmax faces of strictly
    positive weight vectors on a simplex grid; for two-member coalitions the
    exact tie directions between generator pairs are added, and the grid is
    refined around observed minima.
    """
    n = game.players
    a = np.full((n, n), np.inf)
    for i in range(n):
        gens = game.contributions[i]
        for coal in all_coalitions(n):
            if i not in coal:
                continue
            members = list(coal)
            for w in _pareto_weight_samples(members, n, gens, weight_step, refine):
                scores = gens @ w
                best = float(np.max(scores))
                face = gens[scores >= best - 1e-9 * (1.0 + abs(best))]
                a[i] = np.minimum(a[i], face.min(axis=0))
    out = WorstCasePayoffMatrix(a, game)
    object.__setattr__(out, "_pareto_min", True)
    return out


def _pareto_weight_samples(members, n, gens, step, refine):
    k = len(members)
    out = []
    if k == 1:
        w = np.zeros(n)
        w[members[0]] = 1.0
        out.append(w)
        return out
    base = _positive_simplex_grid(k, step)
    if refine:
        extra = []
        if k == 2:
            # exact generator tie directions
            for u, v in itertools.combinations(gens, 2):
                d0 = u[members[0]] - v[members[0]]
                d1 = u[members[1]] - v[members[1]]
                w2 = np.array([-d1, d0])
                if w2[0] > 1e-12 and w2[1] > 1e-12:
                    extra.append(w2 / w2.sum())
                w2 = -w2
                if w2[0] > 1e-12 and w2[1] > 1e-12:
                    extra.append(w2 / w2.sum())
        base = base + extra
    for wk in base:
        w = np.zeros(n)
        for j, m in enumerate(members):
            w[m] = wk[j]
        out.append(w)
    return out


def _positive_simplex_grid(k, step):
    m = max(int(round(1.0 / step)), k)
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(np.asarray(prefix + [remaining], dtype=float) / m)
            return
        for v in range(1, remaining - (slots - 1) + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], m, k)
    return out


# ---------------------------------------------------------------------------
# effective sets and cores


@dataclass(frozen=True)
class CoalitionFunction:
    """Coalition-to-guaranteed-payoffs mapping over a separable game.

    ``kind="alpha"`` assumes worst-case responses from outsiders (their
    minimal contribution per coordinate); ``kind="matrix"`` fixes outsider
    contributions to the rows of a worst-case payoff matrix.
    """

    kind: str
    game: NormalFormSeparableGame
    matrix: WorstCasePayoffMatrix | None = None

    def __post_init__(self):
        if self.kind not in ("alpha", "matrix"):
            raise ValueError("kind must be 'alpha' or 'matrix'")
        if self.kind == "matrix" and self.matrix is None:
            raise ValueError("matrix kind needs a WorstCasePayoffMatrix")

    @classmethod
    def alpha(cls, game) -> "CoalitionFunction":
        return cls("alpha", game)

    @classmethod
    def with_matrix(cls, game, matrix) -> "CoalitionFunction":
        return cls("matrix", game, matrix)

    @classmethod
    def nash(cls, game) -> "CoalitionFunction":
        return cls("matrix", game, nash_payoff_matrix(game))

    @property
    def players(self) -> int:
        return self.game.players

    def outside_floor(self, j: int, i: int) -> float:
        """Contribution of outside player ``j`` to member ``i``."""
        if self.kind == "alpha":
            return float(self.game.contributions[j][:, i].min())
        return float(self.matrix.values[j, i])


def coalition_guarantee_slack(nu: CoalitionFunction, coalition, x) -> float:
    """Max over coalition plays of the minimum member surplus over ``x``.

    Positive values mean the coalition can guarantee every member strictly
    more than ``x``.
    """
    coal = coalition if isinstance(coalition, Coalition) else Coalition.of(coalition)
    x = as_payoff_vector(x, nu.players)
    members = list(coal)
    outside = [j for j in range(nu.players) if j not in coal]
    out = np.zeros(len(members))
    for a, i in enumerate(members):
        out[a] = sum(nu.outside_floor(j, i) for j in outside)
    gens = [nu.game.contributions[j] for j in members]
    # cheap upper bound: per-coordinate maxima
    ub = min(
        sum(float(g[:, i].max()) for g in gens) + out[a] - x[i]
        for a, i in enumerate(members)
    )
    if ub <= -1e-15:
        return ub
    sizes = [g.shape[0] for g in gens]
    nvar = sum(sizes) + 1
    c = np.zeros(nvar)
    c[-1] = -1.0
    rows, rhs = [], []
    for a, i in enumerate(members):
        row = np.zeros(nvar)
        ofs = 0
        for g, k in zip(gens, sizes):
            row[ofs:ofs + k] = -g[:, i]
            ofs += k
        row[-1] = 1.0
        rows.append(row)
        rhs.append(out[a] - x[i])
    eqs = np.zeros((len(gens), nvar))
    ofs = 0
    for b, k in enumerate(sizes):
        eqs[b, ofs:ofs + k] = 1.0
        ofs += k
    res = linprog(c, A_ub=np.asarray(rows), b_ub=np.asarray(rhs), A_eq=eqs,
                  b_eq=np.ones(len(gens)),
                  bounds=[(0, None)] * (nvar - 1) + [(None, None)],
                  method="highs")
    if not res.success:
        raise SolverConvergenceError("coalition guarantee LP failed")
    return float(-res.fun)


def effective_set_membership(nu: CoalitionFunction, coalition, x,
                             tol: float = 1e-9) -> bool:
    """Whether the coalition can guarantee each member ``i`` at least
    ``x_i`` under the function's outsider convention."""
    return coalition_guarantee_slack(nu, coalition, x) >= -tol


def core_membership(nu: CoalitionFunction, x, tol: float = BLOCK_TOL):
    """Core test by exhaustive coalition enumeration.

    Returns ``(in_core, blocking_coalition)``; the blocking coalition is
    the first one in size-then-lexicographic order that can guarantee all
    of its members strictly more than ``x``.
    """
    x = as_payoff_vector(x, nu.players)
    if coalition_guarantee_slack(nu, Coalition.of(range(nu.players)), x) < -tol:
        raise InfeasiblePointError("x is not dominated by any feasible payoff vector")
    for coal in all_coalitions(nu.players):
        if coalition_guarantee_slack(nu, coal, x) > tol:
            return False, coal
    return True, None


def find_core_point(nu: CoalitionFunction, weight_step: float = 0.2,
                    tol: float = BLOCK_TOL):
    """Search Pareto samples and pure-outcome payoffs for a core member.

    Returns a payoff vector, or ``None`` when the candidate grid is
    exhausted (a legitimate outcome for the alpha and Nash conventions).
    For the matrix built from worst-case Pareto payoffs the core is
    provably nonempty, so exhaustion raises loudly.
    """
    game = nu.game
    n = game.players
    cands: list[np.ndarray] = []
    for profile, payoff in game.outcomes():
        cands.append(payoff)
    for w in _positive_simplex_grid(n, weight_step):
        total = np.zeros(n)
        for i in range(n):
            gens = game.contributions[i]
            total += gens[int(np.argmax(gens @ w))]
        cands.append(total)
    # prefer balanced, efficient candidates
    uniq: dict[tuple, np.ndarray] = {}
    for c in cands:
        uniq[tuple(np.round(c, 9))] = c
    ordered = sorted(uniq.values(), key=lambda c: (-np.min(c), -np.sum(c)))
    for c in ordered:
        ok, _ = core_membership(nu, c, tol)
        if ok:
            return c
    found = _search_core_point(nu, tol)
    if found is not None:
        return found
    if nu.kind == "matrix" and getattr(nu.matrix, "_pareto_min", False):
        raise SolverConvergenceError(
            "no core point found for the worst-case Pareto matrix; "
            "the core is provably nonempty, so this is an implementation bug")
    return None


def _search_core_point(nu: CoalitionFunction, tol):
    """Penalty descent over mixed profiles for stubborn instances."""
    from scipy.optimize import minimize

    game = nu.game
    n = game.players
    sizes = [c.shape[0] for c in game.contributions]
    coals = list(all_coalitions(n))

    def point_of(lam):
        x = np.zeros(n)
        ofs = 0
        for g, k in zip(game.contributions, sizes):
            x += g.T @ lam[ofs:ofs + k]
            ofs += k
        return x

    def penalty(lam):
        x = point_of(lam)
        return sum(max(coalition_guarantee_slack(nu, c, x), 0.0) ** 2 for c in coals)

    cons = []
    ofs = 0
    for k in sizes:
        sl = slice(ofs, ofs + k)
        cons.append({"type": "eq", "fun": lambda lam, sl=sl: np.sum(lam[sl]) - 1.0})
        ofs += k
    rng = np.random.default_rng(7)
    for _ in range(4):
        lam0 = np.concatenate([rng.dirichlet(np.ones(k)) for k in sizes])
        res = minimize(penalty, lam0, method="SLSQP", constraints=cons,
                       bounds=[(0.0, 1.0)] * sum(sizes),
                       options={"maxiter": 120, "ftol": 1e-12})
        x = point_of(res.x)
        ok, _ = core_membership(nu, x, tol)
        if ok:
            return x
    return None


def stable_disagreement(game: NormalFormSeparableGame,
                        matrix: WorstCasePayoffMatrix | None = None) -> np.ndarray:
    """Disagreement point giving each player the best payoff they can attain
    alone against worst-case Pareto-optimal play by everyone else:
    ``d_j = max own contribution + sum_i A[i, j]``."""
    if matrix is None:
        matrix = worst_case_matrix(game)
    n = game.players
    d = np.zeros(n)
    for j in range(n):
        own = float(game.contributions[j][:, j].max())
        d[j] = own + sum(matrix.values[i, j] for i in range(n) if i != j)
    return d


# ---------------------------------------------------------------------------
# threat games


@dataclass
class ThreatPointResult:
    """Fixed point (or cycle) of the disagreement-action game."""

    point: np.ndarray
    profile: list[np.ndarray]
    nbs_report: SolutionReport
    fixed_point: bool
    cycle: list[tuple] = field(default_factory=list)


def _mixture_grid(k, resolution):
    """All mixtures over ``k`` actions with weights in steps of
    ``1/resolution`` (pure strategies included)."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(np.asarray(prefix + [remaining], dtype=float) / resolution)
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], resolution, k)
    return out


def threat_point(game, weights: SolutionWeights | None = None,
                 grid: int = 32, max_rounds: int = 60) -> ThreatPointResult:
    """Equilibrium of the game where players pick disagreement actions to
    improve their own NBS payoff.

    Players alternate discretized best responses (mixtures on a simplex
    grid with step ``1/grid``); the result reports whether a fixed point or
    a best-response cycle was reached.  Raises when the iteration budget is
    exhausted without either.
    """
    if isinstance(game, NormalFormSeparableGame):
        nf = game.to_normal_form()
    elif isinstance(game, NormalFormGame):
        nf = game
    else:
        raise TypeError("threat_point expects a normal-form game")
    n = nf.players
    if grid < 1:
        raise ValueError("grid resolution must be >= 1")
    w = weights if weights is not None else SolutionWeights.uniform(n)
    feasible = _outcome_hull(nf)
    grids = [_mixture_grid(k, grid) for k in nf.action_counts]

    def solve(d):
        return nbs(feasible, d, w, on_degenerate="disagreement")

    profile = []
    for k in nf.action_counts:  # start from everyone's first pure action
        p = np.zeros(k)
        p[0] = 1.0
        profile.append(p)
    history = {}
    trace = []
    for rounds in range(max_rounds):
        key = tuple(np.round(np.concatenate(profile), 9))
        if key in history:
            start = history[key]
            cycle = trace[start:]
            d = nf.expected_payoff(profile)
            return ThreatPointResult(point=d, profile=profile,
                                     nbs_report=solve(d), fixed_point=False,
                                     cycle=cycle)
        history[key] = len(trace)
        trace.append(key)
        changed = False
        for i in range(n):
            best_val, best_mix = -math.inf, None
            current = profile[i]
            for mix in grids[i]:
                cand = list(profile)
                cand[i] = mix
                d = nf.expected_payoff(cand)
                val = solve(d).point[i]
                if val > best_val + 1e-12:
                    best_val, best_mix = val, mix
                elif abs(val - best_val) <= 1e-12 and np.array_equal(mix, current):
                    best_mix = mix  # prefer staying put on ties
            if not np.allclose(best_mix, current, atol=1e-15):
                profile[i] = best_mix
                changed = True
        if not changed:
            d = nf.expected_payoff(profile)
            return ThreatPointResult(point=d, profile=profile,
                                     nbs_report=solve(d), fixed_point=True)
    raise SolverConvergenceError(
        "threat-game best response found neither a fixed point nor a cycle")


def _outcome_hull(nf: NormalFormGame) -> PolytopeSet:
    flat = nf.payoffs.reshape(-1, nf.players)
    if nf.players == 2:
        return PolytopeSet(hull_vertices_2d(flat))
    return PolytopeSet(flat)


# ---------------------------------------------------------------------------
# balanced collections


@dataclass
class BalancedCombinationResult:
    parts: list[np.ndarray]
    claims: np.ndarray | None


def balanced_combination(collection, weights, payoffs,
                         matrix: WorstCasePayoffMatrix | None = None,
                         individual_sets=None) -> BalancedCombinationResult:
    """Combine per-coalition contribution plans with balancing weights.

    ``payoffs[k][i]`` is the contribution vector player ``i`` produces in
    coalition ``collection[k]``.  The weights must balance the collection:
    the weights of the coalitions containing each player sum to one.  The
    combined plan ``x_hat_i = sum_{S: i in S} delta_S x_i^S`` stays in each
    player's feasible set by convexity, and when a worst-case matrix is
    given, the total handed to each player covers the best claim
    ``min_{S: j in S} (sum_{i in S} x_i^S_j + sum_{i not in S} A_i_j)``.
    """
    from .errors import UnbalancedWeightsError

    coals = [c if isinstance(c, Coalition) else Coalition.of(c) for c in collection]
    delta = as_payoff_vector(weights, len(coals))
    if np.any(delta < 0):
        raise UnbalancedWeightsError("weights must be nonnegative")
    n = max(max(c.members) for c in coals) + 1
    cover = np.zeros(n)
    for c, dl in zip(coals, delta):
        for i in c:
            cover[i] += dl
    if np.max(np.abs(cover - 1.0)) > 1e-12:
        raise UnbalancedWeightsError(
            f"weights do not balance the collection: per-player totals {cover}")
    parts = [np.zeros(n) for _ in range(n)]
    for k, (c, dl) in enumerate(zip(coals, delta)):
        for i in c:
            v = as_payoff_vector(payoffs[k][i], n)
            parts[i] = parts[i] + dl * v
    claims = None
    if matrix is not None:
        a = matrix.values
        claims = np.full(n, -np.inf)
        for j in range(n):
            vals = []
            for k, c in enumerate(coals):
                if j not in c:
                    continue
                inside = sum(as_payoff_vector(payoffs[k][i], n)[j] for i in c)
                outside = sum(a[i, j] for i in range(n) if i not in c)
                vals.append(inside + outside)
            claims[j] = min(vals) if vals else -np.inf
        totals = np.sum(parts, axis=0)
        if np.any(totals < claims - 1e-9):
            raise ValueError(
                "combined plan fails to cover the balanced claims; "
                "coalition payoffs must dominate the worst-case matrix")
    if individual_sets is not None:
        for i, (p, fs) in enumerate(zip(parts, individual_sets)):
            if not fs.contains(p, 1e-7):
                raise InfeasiblePointError(
                    f"combined contribution of player {i} left its feasible set")
    return BalancedCombinationResult(parts=parts, claims=claims)
