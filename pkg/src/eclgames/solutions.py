"""Bargaining solutions over convex feasible sets.

Implements the Nash bargaining solution (symmetric and weighted), the
Kalai-Smorodinsky solution, the normalize-and-sum solution of maximizing
ideal-point-normalized utilities, variance normalization of utility
functions, supporting-weight recovery at frontier points, and the
decomposition of a joint frontier point into per-player contributions.

The NBS maximizes ``sum_t w_t * log(x_t - d_t)``.  Coordinates whose weight
is zero, or that admit no strict improvement inside ``F^{>=d}``, are dropped
from the product and constrained by ``x_t >= d_t`` only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from ._optim import bisect_boundary, golden_max, scan_then_golden_min
from .errors import (
    InfeasiblePointError,
    NoStrictImprovementError,
    SolverConvergenceError,
)
from .geometry import (
    FeasibleSet,
    MinkowskiSumSet,
    ParametricFrontierSet,
    PolytopeSet,
    as_payoff_vector,
    coordinate_max,
    hull_vertices_2d,
    is_pareto_optimal,
    minkowski_sum,
    upper_bound_2d,
)

if TYPE_CHECKING:  # pragma: no cover
    from .games import NormalFormSeparableGame

__all__ = [
    "SolutionWeights",
    "SolutionReport",
    "nbs",
    "ksbs",
    "armstrong_solution",
    "variance_normalized_compromise",
    "VarianceNormalizationReport",
    "weights_from_point",
    "decompose",
    "max_min_gain",
]

IMPROVE_TOL = 1e-9
CERT_TOL = 1e-7


@dataclass(frozen=True)
class SolutionWeights:
    """Nonnegative per-player (or per-type) weights summing to one."""

    values: np.ndarray

    def __post_init__(self):
        v = as_payoff_vector(self.values)
        if np.any(v < 0):
            raise ValueError("weights must be nonnegative")
        if abs(float(v.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, n: int) -> "SolutionWeights":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def of(cls, values) -> "SolutionWeights":
        v = as_payoff_vector(values)
        s = float(v.sum())
        if s <= 0:
            raise ValueError("weights must have positive total mass")
        return cls(v / s)


@dataclass
class SolutionReport:
    """Outcome of a bargaining-solution computation."""

    point: np.ndarray
    objective: float
    gains: np.ndarray
    iterations: int
    converged: bool
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# feasibility helpers


def max_min_gain(fs: FeasibleSet, d) -> tuple[float, np.ndarray]:
    """Maximize ``min_i (x_i - d_i)`` over ``fs``; returns (value, argmax)."""
    d = as_payoff_vector(d, fs.dim)
    parts = _polytope_parts(fs)
    if parts is not None:
        return _max_min_gain_lp(parts, d)
    if fs.dim != 2:
        raise NotImplementedError("max_min_gain beyond 2-D needs polytope parts")

    lo = d[0]
    v1, _ = fs.support(np.array([1.0, 0.0]))

    def g(x1):
        ub = upper_bound_2d(fs, x1, fixed_coord=0)
        return min(x1 - d[0], ub - d[1])

    span = max(v1 - lo, 1e-9)
    x1, val, _ = golden_max(g, lo, v1, tol=1e-10 * span)
    pt = np.array([x1, min(upper_bound_2d(fs, x1, fixed_coord=0), d[1] + val)])
    return val, pt


def _polytope_parts(fs: FeasibleSet):
    if isinstance(fs, PolytopeSet):
        return [fs.generators]
    if isinstance(fs, MinkowskiSumSet) and all(
        isinstance(p, PolytopeSet) for p in fs.parts
    ):
        return [p.generators for p in fs.parts]
    return None


def _max_min_gain_lp(gens, d):
    sizes = [g.shape[0] for g in gens]
    n = d.size
    nvar = sum(sizes) + 1
    c = np.zeros(nvar)
    c[-1] = -1.0  # maximize t
    rows, rhs = [], []
    for j in range(n):
        row = np.zeros(nvar)
        ofs = 0
        for g, k in zip(gens, sizes):
            row[ofs:ofs + k] = -g[:, j]
            ofs += k
        row[-1] = 1.0
        rows.append(row)
        rhs.append(-d[j])
    eqs = np.zeros((len(gens), nvar))
    ofs = 0
    for i, k in enumerate(sizes):
        eqs[i, ofs:ofs + k] = 1.0
        ofs += k
    res = linprog(c, A_ub=np.asarray(rows), b_ub=np.asarray(rhs), A_eq=eqs,
                  b_eq=np.ones(len(gens)), bounds=[(0, None)] * (nvar - 1) + [(None, None)],
                  method="highs")
    if not res.success:
        raise SolverConvergenceError("max-min gain LP failed")
    lam = res.x[:-1]
    pt = np.zeros(n)
    ofs = 0
    for g, k in zip(gens, sizes):
        pt += g.T @ lam[ofs:ofs + k]
        ofs += k
    return float(-res.fun), pt


def improvable_coordinates(fs: FeasibleSet, d, tol: float = IMPROVE_TOL) -> np.ndarray:
    """Boolean mask of coordinates t with some x in F^{>=d} and x_t > d_t."""
    d = as_payoff_vector(d, fs.dim)
    mask = np.zeros(fs.dim, dtype=bool)
    for j in range(fs.dim):
        m = coordinate_max(fs, j, floor=d)
        mask[j] = m > d[j] + tol
    return mask


# ---------------------------------------------------------------------------
# Nash bargaining solution


def nbs(fs: FeasibleSet, d, weights: SolutionWeights | None = None, *,
        on_degenerate: str = "error") -> SolutionReport:
    """Weighted Nash bargaining solution over ``fs`` with disagreement ``d``.

    Maximizes the weighted product of gains over ``F^{>=d}``, restricted to
    the coordinates that carry positive weight and admit a strict
    improvement.  ``on_degenerate`` controls the no-improvable-coordinate
    case: ``"error"`` raises, ``"disagreement"`` returns ``d`` itself (the
    convention used inside threat games and no-trade sweeps).
    """
    d = as_payoff_vector(d, fs.dim)
    w = weights if weights is not None else SolutionWeights.uniform(fs.dim)
    wv = as_payoff_vector(w.values, fs.dim)

    improvable = improvable_coordinates(fs, d)
    active = improvable & (wv > 0)
    if not active.any():
        if on_degenerate == "disagreement":
            return SolutionReport(point=d.copy(), objective=0.0,
                                  gains=np.zeros(fs.dim), iterations=0,
                                  converged=True, meta={"degenerate": True})
        raise NoStrictImprovementError(
            "no positive-weight coordinate admits a strict improvement over d")

    if fs.dim == 2:
        point, iters = _nbs_2d(fs, d, wv, active)
    else:
        parts = _polytope_parts(fs)
        if parts is None:
            raise NotImplementedError(
                "nbs beyond 2-D requires polytope summands; use the "
                "action-space solver for smooth Bayesian games")
        point, iters = _nbs_weight_space(parts, d, wv, active)

    gains = point - d
    if np.min(gains) < -1e-9:
        raise SolverConvergenceError("solver produced a point below d")
    objective = float(np.sum(wv[active] * np.log(np.maximum(gains[active], 1e-300))))

    converged = True
    if active.all():
        grad = np.zeros(fs.dim)
        grad[active] = wv[active] / np.maximum(gains[active], 1e-300)
        sval, _ = fs.support(grad)
        gap = sval - float(grad @ point)
        converged = gap <= CERT_TOL * (1.0 + abs(sval))
    return SolutionReport(point=point, objective=objective, gains=gains,
                          iterations=iters, converged=converged,
                          meta={"active": active})


def _log_objective(d, wv, active):
    idx = np.flatnonzero(active)
    floor_idx = np.flatnonzero(~active)

    def f(x):
        g = x - d
        if np.any(g[idx] <= 0.0) or np.any(g[floor_idx] < -1e-12):
            return -math.inf
        return float(np.sum(wv[idx] * np.log(g[idx])))

    return f


def _nbs_2d(fs, d, wv, active):
    if isinstance(fs, PolytopeSet):
        return _nbs_2d_polytope(fs, d, wv, active)
    return _nbs_2d_sweep(fs, d, wv, active)


def _nbs_2d_polytope(fs, d, wv, active):
    f = _log_objective(d, wv, active)
    verts = hull_vertices_2d(fs.generators)
    # Pareto chain: undominated vertices sorted by the first coordinate
    keep = []
    for i, p in enumerate(verts):
        if not any(np.all(q >= p - 1e-12) and np.any(q > p + 1e-12)
                   for j, q in enumerate(verts) if j != i):
            keep.append(p)
    chain = sorted(keep, key=lambda p: (p[0], -p[1]))
    best_val, best_pt = -math.inf, None
    for p in chain:
        v = f(np.asarray(p))
        if v > best_val:
            best_val, best_pt = v, np.asarray(p)
    iters = 0
    for u, v in zip(chain[:-1], chain[1:]):
        u, v = np.asarray(u), np.asarray(v)
        val, pt, it = _segment_max(f, u, v, d)
        iters += it
        if val > best_val:
            best_val, best_pt = val, pt
    if best_pt is None or best_val == -math.inf:
        raise NoStrictImprovementError("no feasible point improves on d")
    return best_pt, iters


def _segment_max(f, u, v, d):
    """Maximize the gain objective on a segment, restricted to the exact
    parameter window where every coordinate stays at or above ``d``."""
    t_lo, t_hi = 0.0, 1.0
    for j in range(d.size):
        den = v[j] - u[j]
        num = d[j] - u[j]
        if abs(den) < 1e-15:
            if u[j] < d[j] - 1e-12:
                return -math.inf, None, 0
            continue
        t_cross = num / den
        if den > 0:
            t_lo = max(t_lo, t_cross)
        else:
            t_hi = min(t_hi, t_cross)
    if t_lo > t_hi:
        return -math.inf, None, 0
    t, val, it = golden_max(lambda t: f((1 - t) * u + t * v), t_lo, t_hi,
                            tol=1e-13)
    pt = (1 - t) * u + t * v
    for tb in (t_lo, t_hi):
        cand = (1 - tb) * u + tb * v
        cv = f(cand)
        if cv > val:
            val, pt = cv, cand
    return val, pt, it


def _nbs_2d_sweep(fs, d, wv, active, n_scan=721):
    """Direction sweep over outward normals with refinement; long jumps in
    the support argmax (polytope edges, hull seams) are searched as
    segments."""
    f = _log_objective(d, wv, active)
    phis = np.linspace(1e-9, math.pi / 2 - 1e-9, n_scan)
    pts = []
    for phi in phis:
        _, p = fs._support(np.array([math.cos(phi), math.sin(phi)]))
        pts.append(p)
    vals = [f(p) for p in pts]
    i = int(np.argmax(vals))
    best_val, best_pt = vals[i], pts[i]
    iters = 0

    # refine around the best angle
    lo = phis[max(i - 1, 0)]
    hi = phis[min(i + 1, n_scan - 1)]

    def by_angle(phi):
        _, p = fs._support(np.array([math.cos(phi), math.sin(phi)]))
        return f(p)

    phi, val, it = golden_max(by_angle, lo, hi, tol=1e-13)
    iters += it
    if val > best_val:
        _, best_pt = fs._support(np.array([math.cos(phi), math.sin(phi)]))
        best_val = val

    # flat pieces of the frontier show up as jumps between adjacent argmaxes
    steps = [float(np.linalg.norm(pts[k + 1] - pts[k])) for k in range(n_scan - 1)]
    typical = np.median([s for s in steps if s > 0] or [0.0])
    for k, s in enumerate(steps):
        if s > max(10 * typical, 1e-9):
            val, pt, it = _segment_max(f, pts[k], pts[k + 1], d)
            iters += it
            if val > best_val:
                best_val, best_pt = val, pt
    if best_val == -math.inf:
        raise NoStrictImprovementError("no feasible point improves on d")
    return best_pt, iters


def _nbs_weight_space(gens, d, wv, active):
    """Direct concave maximization over per-summand convex weights.

    The joint point is ``x = sum_i G_i^T lam_i``; the objective is smooth and
    strictly concave in ``x``, so an SLSQP solve from the max-min-gain start
    converges to the unique optimum.  The support-oracle certificate in
    :func:`nbs` validates the result.
    """
    n = d.size
    sizes = [g.shape[0] for g in gens]
    nvar = sum(sizes)
    idx = np.flatnonzero(active)
    floor_idx = np.flatnonzero(~active)

    _, start_pt = _max_min_gain_lp(gens, d)

    def x_of(lam):
        x = np.zeros(n)
        ofs = 0
        for g, k in zip(gens, sizes):
            x += g.T @ lam[ofs:ofs + k]
            ofs += k
        return x

    def neg_obj(lam):
        g = x_of(lam) - d
        return -float(np.sum(wv[idx] * np.log(np.maximum(g[idx], 1e-12))))

    cons = []
    ofs = 0
    for k in sizes:
        sl = slice(ofs, ofs + k)
        cons.append({"type": "eq", "fun": (lambda lam, sl=sl: np.sum(lam[sl]) - 1.0)})
        ofs += k
    if floor_idx.size:
        cons.append({
            "type": "ineq",
            "fun": lambda lam: (x_of(lam) - d)[floor_idx],
        })
    cons.append({
        "type": "ineq",
        "fun": lambda lam: (x_of(lam) - d)[idx] - 1e-12,
    })

    # start from a blend of the max-min-gain solution and uniform mixing
    lam_lp = _weights_for_point(gens, sizes, start_pt)
    best = None
    for blend in (0.7, 0.3, 0.95):
        lam0 = np.concatenate([
            blend * lam_lp[o:o + k] + (1 - blend) * np.full(k, 1.0 / k)
            for o, k in zip(np.cumsum([0] + sizes[:-1]), sizes)
        ])
        res = minimize(neg_obj, lam0, method="SLSQP", constraints=cons,
                       bounds=[(0.0, 1.0)] * nvar,
                       options={"maxiter": 400, "ftol": 1e-14})
        if res.success or res.status == 8:
            if best is None or res.fun < best.fun:
                best = res
    if best is None:
        raise SolverConvergenceError("weight-space NBS solve failed")
    return x_of(best.x), int(best.nit)


def _weights_for_point(gens, sizes, point):
    """Convex weights per summand reproducing ``point`` (least squares LP)."""
    n = point.size
    nvar = sum(sizes) + 1
    c = np.zeros(nvar)
    c[-1] = 1.0
    rows, rhs = [], []
    for j in range(n):
        row = np.zeros(nvar)
        ofs = 0
        for g, k in zip(gens, sizes):
            row[ofs:ofs + k] = g[:, j]
            ofs += k
        row[-1] = -1.0
        rows.append(row.copy())
        rhs.append(point[j])
        row[:-1] *= -1.0
        rows.append(row)
        rhs.append(-point[j])
    eqs = np.zeros((len(gens), nvar))
    ofs = 0
    for i, k in enumerate(sizes):
        eqs[i, ofs:ofs + k] = 1.0
        ofs += k
    res = linprog(c, A_ub=np.asarray(rows), b_ub=np.asarray(rhs), A_eq=eqs,
                  b_eq=np.ones(len(gens)), bounds=[(0, None)] * (nvar - 1) + [(0, None)],
                  method="highs")
    if not res.success:
        return np.concatenate([np.full(k, 1.0 / k) for k in sizes])
    return res.x[:-1]


# ---------------------------------------------------------------------------
# Kalai-Smorodinsky and the normalize-and-sum solution


def ideal_point(fs: FeasibleSet, d) -> np.ndarray:
    """Coordinate-wise maxima over ``F^{>=d}``."""
    d = as_payoff_vector(d, fs.dim)
    return np.array([coordinate_max(fs, j, floor=d) for j in range(fs.dim)])


def ksbs(fs: FeasibleSet, d) -> SolutionReport:
    """Kalai-Smorodinsky solution: the frontier point on the segment from
    ``d`` to the ideal point, located by bisection on membership."""
    d = as_payoff_vector(d, fs.dim)
    u = ideal_point(fs, d)
    if float(np.max(u - d)) <= IMPROVE_TOL:
        raise NoStrictImprovementError("no coordinate improves over d")
    mem_tol = 1e-9 if _polytope_parts(fs) is not None else 1e-7
    direction = u - d
    if fs.contains(u, mem_tol):
        point, t = u, 1.0
    else:
        t = bisect_boundary(lambda t: fs.contains(d + t * direction, mem_tol),
                            0.0, 1.0, iters=80)
        point = d + t * direction
    gains = point - d
    return SolutionReport(point=point, objective=float(t), gains=gains,
                          iterations=80, converged=True,
                          meta={"ideal": u})


def armstrong_solution(fs: FeasibleSet, d) -> SolutionReport:
    """Maximize the sum of utilities normalized to [disagreement, ideal].

    Each coordinate is rescaled as ``(x_i - d_i) / (U_i - d_i)`` and the
    unweighted sum is maximized over the whole set, so the result can fall
    below ``d`` for some player; the report flags individual rationality.
    """
    d = as_payoff_vector(d, fs.dim)
    u = ideal_point(fs, d)
    span = u - d
    if np.any(span <= 1e-12):
        raise NoStrictImprovementError("degenerate normalization: U_i = d_i")
    direction = 1.0 / span
    val, point = fs.support(direction)
    gains = point - d
    rational = bool(np.all(gains >= -1e-9))
    return SolutionReport(point=point, objective=float(np.sum(gains / span)),
                          gains=gains, iterations=0, converged=True,
                          meta={"ideal": u, "individually_rational": rational})


# ---------------------------------------------------------------------------
# variance normalization


@dataclass
class VarianceNormalizationReport:
    """Result of the normalize-by-variance compromise selection."""

    outcome: tuple[int, ...]
    outcomes: list[tuple[int, ...]]
    raw_table: np.ndarray
    normalized_table: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    @property
    def chosen_normalized(self) -> np.ndarray:
        return self.normalized_table[self.outcomes.index(self.outcome)]


def variance_normalized_compromise(game: "NormalFormSeparableGame",
                                   reference=None,
                                   use_std: bool = False) -> VarianceNormalizationReport:
    """Select the pure outcome maximizing the sum of variance-normalized
    utilities.

    Means are subtracted per player and utilities are divided by the total
    squared deviation ``sum_x (u_i(x) - mu_i)^2`` under the reference
    distribution (uniform by default).  That convention keeps the division
    in squared-utility units; pass ``use_std=True`` to divide by its square
    root instead.  Ties break toward the lexicographically first outcome.
    """
    outcomes = list(itertools.product(*[range(k) for k in game.action_counts]))
    table = np.array([game.outcome_payoff(o) for o in outcomes])
    n_out = len(outcomes)
    if reference is None:
        ref = np.full(n_out, 1.0 / n_out)
    else:
        ref = as_payoff_vector(reference, n_out)
        if np.any(ref < 0) or abs(ref.sum() - 1.0) > 1e-12:
            raise ValueError("reference must be a distribution over outcomes")
    means = ref @ table
    sq = n_out * (ref @ (table - means) ** 2)
    if np.any(sq <= 1e-15):
        raise ValueError("zero variance for some player")
    denom = np.sqrt(sq) if use_std else sq
    normalized = (table - means) / denom
    best = int(np.argmax(normalized.sum(axis=1)))
    return VarianceNormalizationReport(outcome=outcomes[best], outcomes=outcomes,
                                       raw_table=table, normalized_table=normalized,
                                       means=means, variances=sq)


# ---------------------------------------------------------------------------
# supporting weights and decompositions


def weights_from_point(fs: FeasibleSet, x, tol: float = 1e-6) -> tuple[SolutionWeights, bool]:
    """Supporting weight vector at a Pareto-optimal point.

    Returns ``(weights, unique)``.  On a smooth frontier the normal is
    unique; on a polytope facet the facet normal is returned; at a vertex
    the center of the normal cone is returned with ``unique=False``.
    """
    x = as_payoff_vector(x, fs.dim)
    if not is_pareto_optimal(fs, x, tol):
        raise InfeasiblePointError("supporting weights need a Pareto-optimal point")
    if fs.dim == 2:
        return _weights_from_point_2d(fs, x)
    parts = _polytope_parts(fs)
    if parts is None:
        raise NotImplementedError("weights_from_point beyond 2-D needs polytopes")
    return _weights_from_point_lp(parts, x)


def _support_gap(fs, phi, x):
    w = np.array([math.cos(phi), math.sin(phi)])
    val, _ = fs._support(w)
    return val - float(w @ x)


def _weights_from_point_2d(fs, x):
    scale = 1.0 + float(np.max(np.abs(x)))
    lo, hi = 1e-9, math.pi / 2 - 1e-9

    def gap(phi):
        return _support_gap(fs, phi, x)

    phi_star, g_star = scan_then_golden_min(gap, lo, hi, scan=721)
    if g_star > 1e-6 * scale:
        raise InfeasiblePointError("no supporting direction found at x")
    # a kink shows up as a plateau of (near-)zero gap around phi_star
    thresh = max(g_star, 0.0) + 1e-9 * scale
    left = bisect_boundary(lambda t: gap(phi_star - t) <= thresh, 0.0,
                           phi_star - lo, iters=60)
    right = bisect_boundary(lambda t: gap(phi_star + t) <= thresh, 0.0,
                            hi - phi_star, iters=60)
    unique = (left + right) <= 1e-3
    phi = phi_star if unique else phi_star + 0.5 * (right - left)
    w = np.array([math.cos(phi), math.sin(phi)])
    return SolutionWeights.of(w), unique


def _weights_from_point_lp(gens, x):
    """Supporting nu >= 0 with sum(max_g nu.g) = nu.x, via one LP per bound."""
    n = x.size
    k = len(gens)

    def solve(obj_coord=None, sense=1.0):
        # variables: nu (n), z_i (k); minimize sum z - nu.x (+ tiny tiebreak)
        nvar = n + k
        c = np.zeros(nvar)
        c[n:] = 1.0
        c[:n] -= x
        if obj_coord is not None:
            c[obj_coord] += sense * 1e-6
        rows, rhs = [], []
        for i, g in enumerate(gens):
            for v in g:
                row = np.zeros(nvar)
                row[:n] = v
                row[n + i] = -1.0
                rows.append(row)
                rhs.append(0.0)
        eqs = np.zeros((1, nvar))
        eqs[0, :n] = 1.0
        res = linprog(c, A_ub=np.asarray(rows), b_ub=np.asarray(rhs),
                      A_eq=eqs, b_eq=[1.0],
                      bounds=[(0, None)] * n + [(None, None)] * k,
                      method="highs")
        if not res.success:
            raise InfeasiblePointError("no supporting weights found")
        return res.x[:n], float(res.fun)

    base, gap0 = solve()
    lo_w, _ = solve(obj_coord=0, sense=1.0)
    hi_w, _ = solve(obj_coord=0, sense=-1.0)
    unique = bool(np.max(np.abs(lo_w - hi_w)) <= 1e-6)
    center = 0.5 * (lo_w + hi_w) if not unique else base
    return SolutionWeights.of(center), unique


def decompose(game_or_sets, x, tol: float = 1e-6) -> list[np.ndarray]:
    """Split a Pareto-optimal joint point into per-player contributions.

    Every player's part is a support argmax of the common supporting weight
    vector; among the valid combinations the one closest to the barycenters
    of the per-player argmax faces is returned (symmetric tie-break).
    """
    sets = _extract_sets(game_or_sets)
    joint = minkowski_sum(list(sets))
    x = as_payoff_vector(x, joint.dim)
    w, _ = weights_from_point(joint, x)
    wv = w.values

    faces = []
    for s in sets:
        if isinstance(s, PolytopeSet):
            faces.append(s.argmax_face(wv, tol=1e-9))
        else:
            _, p = s.support(wv)
            faces.append(np.asarray([p]))
    if all(f.shape[0] == 1 for f in faces):
        parts = [f[0] for f in faces]
        resid = float(np.max(np.abs(sum(parts) - x)))
        if resid > tol:
            raise SolverConvergenceError(
                f"decomposition residual {resid:.2e} exceeds tolerance")
        return parts
    return _decompose_faces(faces, x, tol)


def _extract_sets(game_or_sets) -> Sequence[FeasibleSet]:
    if hasattr(game_or_sets, "individual_sets"):
        return tuple(game_or_sets.individual_sets)
    if isinstance(game_or_sets, MinkowskiSumSet):
        return game_or_sets.parts
    return tuple(game_or_sets)


def _decompose_faces(faces, x, tol):
    """Least-squares selection from per-player faces summing to x."""
    sizes = [f.shape[0] for f in faces]
    centers = [f.mean(axis=0) for f in faces]
    n = x.size

    def parts_of(lam):
        out, ofs = [], 0
        for f, k in zip(faces, sizes):
            out.append(f.T @ lam[ofs:ofs + k])
            ofs += k
        return out

    def obj(lam):
        return sum(float(np.sum((p - c) ** 2))
                   for p, c in zip(parts_of(lam), centers))

    cons = []
    ofs = 0
    for k in sizes:
        sl = slice(ofs, ofs + k)
        cons.append({"type": "eq", "fun": lambda lam, sl=sl: np.sum(lam[sl]) - 1.0})
        ofs += k
    cons.append({"type": "eq",
                 "fun": lambda lam: np.asarray(sum(parts_of(lam))) - x})
    lam0 = np.concatenate([np.full(k, 1.0 / k) for k in sizes])
    res = minimize(obj, lam0, method="SLSQP", constraints=cons,
                   bounds=[(0.0, 1.0)] * sum(sizes),
                   options={"maxiter": 300, "ftol": 1e-16})
    parts = parts_of(res.x)
    resid = float(np.max(np.abs(sum(parts) - x)))
    if resid > tol:
        raise SolverConvergenceError(
            f"decomposition residual {resid:.2e} exceeds tolerance")
    return parts
