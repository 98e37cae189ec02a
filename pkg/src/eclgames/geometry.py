"""Convex feasible-set primitives for bargaining analysis.

Feasible sets are convex, compact subsets of R^n holding expected-utility
vectors.  Three concrete representations are provided:

* :class:`PolytopeSet` -- convex hull of finitely many payoff vectors,
* :class:`ParametricFrontierSet` -- 2-D sets ``{x >= 0 : h(x) <= 0}`` cut
  out by a smooth level function (ellipses, exponential resource budgets,
  custom levels),
* lazy combinations -- :class:`MinkowskiSumSet` (support functions add) and
  :class:`HullUnionSet` (support functions take the max).

All sets expose a support oracle ``support(w) -> (value, argmax point)``;
solvers are built exclusively on top of it.  Instances are immutable after
construction and every operation is pure, so they are safe to share across
threads.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from ._optim import bisect_boundary, golden_max, scan_then_golden_min
from .errors import DimensionMismatchError, InfeasiblePointError

__all__ = [
    "FeasibleSet",
    "PolytopeSet",
    "ParametricFrontierSet",
    "MinkowskiSumSet",
    "HullUnionSet",
    "as_payoff_vector",
    "support",
    "contains",
    "minkowski_sum",
    "pareto_frontier_sample",
    "is_pareto_optimal",
    "normal_weights_at",
    "scaled",
]

#: membership tolerance for lazily represented Minkowski sums
SUM_MEMBERSHIP_TOL = 1e-7
#: number of support directions used for 2-D membership grids
ANGLE_GRID = 720


def as_payoff_vector(x, dim=None) -> np.ndarray:
    """Validate and convert ``x`` to a finite 1-D float array."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatchError(f"payoff vector must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("payoff vectors must have finite entries")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.size}")
    return v


def _check_direction(w, dim) -> np.ndarray:
    w = as_payoff_vector(w, dim)
    if float(np.max(np.abs(w))) == 0.0:
        raise ValueError("degenerate direction w = 0 is rejected")
    return w


class FeasibleSet(ABC):
    """Convex, compact set of payoff vectors with a support oracle."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension."""

    def support(self, direction) -> tuple[float, np.ndarray]:
        """Return ``max <direction, x>`` over the set and one attaining point."""
        return self._support(_check_direction(direction, self.dim))

    @abstractmethod
    def _support(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        """Support query on a pre-validated direction array."""

    @abstractmethod
    def contains(self, x, tol: float = 1e-9) -> bool:
        """Whether ``x`` lies within ``tol`` of the set."""

    def pareto_frontier_sample(self, k: int, seed: int = 0) -> list[np.ndarray]:
        return pareto_frontier_sample(self, k, seed=seed)


# ---------------------------------------------------------------------------
# polytopes


class PolytopeSet(FeasibleSet):
    """Convex hull of a finite generator list."""

    def __init__(self, generators):
        g = np.atleast_2d(np.asarray(generators, dtype=float))
        if g.size == 0 or g.shape[0] < 1:
            raise ValueError("a polytope needs at least one generator")
        if not np.all(np.isfinite(g)):
            raise ValueError("generators must be finite")
        self._g = g
        self._g.setflags(write=False)

    @property
    def dim(self) -> int:
        return self._g.shape[1]

    @property
    def generators(self) -> np.ndarray:
        return self._g

    def _support(self, w):
        scores = self._g @ w
        i = int(np.argmax(scores))  # ties break to the lowest index
        return float(scores[i]), self._g[i].copy()

    def argmax_face(self, direction, tol: float = 1e-9) -> np.ndarray:
        """Generators attaining the support value within ``tol``."""
        w = _check_direction(direction, self.dim)
        scores = self._g @ w
        best = float(np.max(scores))
        scale = 1.0 + abs(best)
        return self._g[scores >= best - tol * scale]

    def contains(self, x, tol=1e-9):
        x = as_payoff_vector(x, self.dim)
        # quick accept on exact generator match
        if np.min(np.max(np.abs(self._g - x), axis=1)) <= tol:
            return True
        lo = self._g.min(axis=0) - tol
        hi = self._g.max(axis=0) + tol
        if np.any(x < lo) or np.any(x > hi):
            return False
        return _polytope_distance_inf(self._g, x) <= tol

    def coordinate_range(self, j) -> tuple[float, float]:
        col = self._g[:, j]
        return float(col.min()), float(col.max())


def _polytope_distance_inf(generators, x):
    """Infinity-norm distance from ``x`` to the hull, via a small LP."""
    k, d = generators.shape
    # variables: lambda_1..k, eps
    c = np.zeros(k + 1)
    c[-1] = 1.0
    rows = []
    rhs = []
    for j in range(d):
        row = np.zeros(k + 1)
        row[:k] = generators[:, j]
        row[-1] = -1.0
        rows.append(row)
        rhs.append(x[j])
        row = np.zeros(k + 1)
        row[:k] = -generators[:, j]
        row[-1] = -1.0
        rows.append(row)
        rhs.append(-x[j])
    a_eq = np.zeros((1, k + 1))
    a_eq[0, :k] = 1.0
    res = linprog(
        c,
        A_ub=np.asarray(rows),
        b_ub=np.asarray(rhs),
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * k + [(0, None)],
        method="highs",
    )
    if not res.success:
        return math.inf
    return float(res.fun)


def hull_vertices_2d(points) -> np.ndarray:
    """Vertices of the 2-D convex hull, counter-clockwise (monotone chain)."""
    pts = np.unique(np.round(np.atleast_2d(np.asarray(points, float)), 12), axis=0)
    if pts.shape[0] <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 1e-14:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 1e-14:
            upper.pop()
        upper.append(p)
    return np.asarray(lower[:-1] + upper[:-1])


# ---------------------------------------------------------------------------
# smooth 2-D level sets


class ParametricFrontierSet(FeasibleSet):
    """2-D convex set ``{x >= 0 : h(x) <= 0}`` with a smooth level function.

    Kinds
    -----
    ``disk-quadratic``
        ``(x1/a)^2 + (x2/b)^2 <= 1`` intersected with the nonnegative
        quadrant; the individual feasible set of an agent with square-root
        returns to invested resources.
    ``log-exponential``
        ``exp(x1/t1) + exp(x2/t2) <= r``; log returns with budget ``r``.
    ``custom-level``
        Arbitrary callable level function (gradient optional; central
        finite differences otherwise).

    The set must contain the origin strictly (level(0) < 0) so that the
    frontier projection can walk rays from the origin.
    """

    kind: str

    def __init__(self, kind, level, grad=None, params=None, support_fn=None,
                 scale_hint=1.0):
        self.kind = kind
        self._level = level
        self._grad = grad
        self.params = dict(params or {})
        self._support_fn = support_fn
        self._scale = float(scale_hint)
        if self.level([0.0, 0.0]) >= 0.0:
            raise ValueError("level function must be negative at the origin")

    # -- constructors ------------------------------------------------------

    @classmethod
    def disk(cls, a=1.0, b=1.0):
        """Quarter ellipse ``(x1/a)^2 + (x2/b)^2 <= 1``, x >= 0."""
        a, b = float(a), float(b)
        if a <= 0 or b <= 0:
            raise ValueError("semi-axes must be positive")

        def level(x):
            return (x[0] / a) ** 2 + (x[1] / b) ** 2 - 1.0

        def grad(x):
            return np.array([2.0 * x[0] / a**2, 2.0 * x[1] / b**2])

        def sup(w):
            return _ellipse_support(a, b, w)

        return cls("disk-quadratic", level, grad, {"a": a, "b": b}, sup,
                   scale_hint=max(a, b))

    @classmethod
    def exp_budget(cls, theta1, theta2, budget):
        """Log-returns set ``exp(x1/theta1) + exp(x2/theta2) <= budget``."""
        t1, t2, r = float(theta1), float(theta2), float(budget)
        if t1 <= 0 or t2 <= 0:
            raise ValueError("scale parameters must be positive")
        if r <= 2.0:
            raise ValueError("budget must exceed 2 so the origin is interior")

        def level(x):
            return math.exp(x[0] / t1) + math.exp(x[1] / t2) - r

        def grad(x):
            return np.array([math.exp(x[0] / t1) / t1, math.exp(x[1] / t2) / t2])

        def sup(w):
            return _exp_budget_support(t1, t2, r, w)

        return cls("log-exponential", level, grad,
                   {"theta1": t1, "theta2": t2, "budget": r}, sup,
                   scale_hint=max(t1, t2) * math.log(r))

    @classmethod
    def linear_quadratic(cls, budget):
        """Resource split with linear returns on axis 1 and square-root
        returns on axis 2: ``x1 + x2^2/2 <= budget``."""
        r = float(budget)
        if r <= 0:
            raise ValueError("budget must be positive")

        def level(x):
            return x[0] + 0.5 * x[1] ** 2 - r

        def grad(x):
            return np.array([1.0, x[1]])

        def sup(w):
            return _linear_quadratic_support(r, w)

        return cls("custom-level", level, grad, {"budget": r}, sup,
                   scale_hint=max(r, math.sqrt(2 * r)))

    @classmethod
    def custom(cls, level, grad=None, scale_hint=1.0):
        return cls("custom-level", level, grad, None, None, scale_hint=scale_hint)

    # -- queries -----------------------------------------------------------

    @property
    def dim(self) -> int:
        return 2

    def level(self, x) -> float:
        return float(self._level(np.asarray(x, dtype=float)))

    def gradient(self, x) -> np.ndarray:
        x = as_payoff_vector(x, 2)
        if self._grad is not None:
            return np.asarray(self._grad(x), dtype=float)
        h = 1e-7 * max(1.0, self._scale)
        g = np.zeros(2)
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            g[j] = (self.level(x + e) - self.level(x - e)) / (2 * h)
        return g

    def frontier_projection(self, x) -> np.ndarray:
        """Project ``x`` (nonzero, nonnegative) onto the frontier along the
        ray from the origin.  Bisection; sets are star-shaped from 0."""
        x = as_payoff_vector(x, 2)
        nrm = float(np.linalg.norm(x))
        if nrm == 0.0:
            raise ValueError("cannot project the origin to the frontier")
        u = x / nrm
        hi = 1.0
        while self.level(hi * u) < 0.0 and hi < 1e9:
            hi *= 2.0
        s = bisect_boundary(lambda t: self.level(t * u) <= 0.0, 0.0, hi, iters=80)
        return s * u

    def frontier_point(self, angle) -> np.ndarray:
        return self.frontier_projection(np.array([math.cos(angle), math.sin(angle)]))

    def _support(self, w):
        if self._support_fn is not None:
            return self._support_fn(w)
        return self._generic_support(w)

    def _axis_intercept(self, j) -> float:
        e = np.zeros(2)
        e[j] = 1.0
        hi = max(self._scale, 1.0)
        while self.level(hi * e) < 0.0 and hi < 1e9:
            hi *= 2.0
        return bisect_boundary(lambda t: self.level(t * e) <= 0.0, 0.0, hi, iters=80)

    def _generic_support(self, w):
        cands = [np.zeros(2),
                 np.array([self._axis_intercept(0), 0.0]),
                 np.array([0.0, self._axis_intercept(1)])]
        if w[0] > 0 and w[1] > 0:
            def neg_score(phi):
                return -float(w @ self.frontier_point(phi))

            phi, val = scan_then_golden_min(neg_score, 1e-9, math.pi / 2 - 1e-9,
                                            scan=129)
            cands.append(self.frontier_point(phi))
        best = max(cands, key=lambda p: float(w @ p))
        return float(w @ best), best

    def contains(self, x, tol=1e-9):
        x = as_payoff_vector(x, 2)
        coord_tol = tol * max(1.0, self._scale)
        if np.any(x < -coord_tol):
            return False
        return self.level(np.maximum(x, 0.0)) <= tol


def _ellipse_support(a, b, w):
    if w[0] <= 0 and w[1] <= 0:
        return 0.0, np.zeros(2)
    if w[1] <= 0:
        p = np.array([a, 0.0])
        return float(w @ p), p
    if w[0] <= 0:
        p = np.array([0.0, b])
        return float(w @ p), p
    nrm = math.hypot(a * w[0], b * w[1])
    p = np.array([a**2 * w[0], b**2 * w[1]]) / nrm
    return float(w @ p), p


def _exp_budget_support(t1, t2, r, w):
    cands = [np.zeros(2),
             np.array([t1 * math.log(r - 1.0), 0.0]),
             np.array([0.0, t2 * math.log(r - 1.0)])]
    if w[0] > 0 and w[1] > 0:
        # stationary point of <w, x> on the frontier
        k = r / (w[0] * t1 + w[1] * t2)
        x1 = t1 * math.log(max(w[0] * t1 * k, 1e-300))
        x2 = t2 * math.log(max(w[1] * t2 * k, 1e-300))
        if x1 >= 0.0 and x2 >= 0.0:
            cands.append(np.array([x1, x2]))
    best = max(cands, key=lambda p: float(w @ p))
    return float(w @ best), best


def _linear_quadratic_support(r, w):
    cands = [np.zeros(2), np.array([r, 0.0]), np.array([0.0, math.sqrt(2.0 * r)])]
    if w[0] > 0 and w[1] > 0:
        x2 = w[1] / w[0]
        x1 = r - 0.5 * x2**2
        if x1 >= 0.0:
            cands.append(np.array([x1, x2]))
    best = max(cands, key=lambda p: float(w @ p))
    return float(w @ best), best


# ---------------------------------------------------------------------------
# lazy combinations


class MinkowskiSumSet(FeasibleSet):
    """Lazy Minkowski sum: support values and argmax points add."""

    def __init__(self, parts: Sequence[FeasibleSet]):
        flat: list[FeasibleSet] = []
        for p in parts:
            if isinstance(p, MinkowskiSumSet):
                flat.extend(p.parts)
            else:
                flat.append(p)
        if not flat:
            raise ValueError("minkowski_sum of an empty list")
        d = flat[0].dim
        for p in flat:
            if p.dim != d:
                raise DimensionMismatchError("summands must share dimension")
        self.parts = tuple(flat)

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def _support(self, w):
        total = 0.0
        point = np.zeros(self.dim)
        for p in self.parts:
            v, q = p._support(w)
            total += v
            point += q
        return total, point

    def support_points(self, direction) -> list[np.ndarray]:
        w = _check_direction(direction, self.dim)
        return [p._support(w)[1] for p in self.parts]

    def contains(self, x, tol=SUM_MEMBERSHIP_TOL):
        x = as_payoff_vector(x, self.dim)
        if all(isinstance(p, PolytopeSet) for p in self.parts):
            return _sum_of_polytopes_contains(self.parts, x, tol)
        if self.dim != 2:
            raise NotImplementedError(
                "lazy-sum membership beyond 2-D needs polytope summands")
        return _support_grid_contains(self, x, tol)


def _sum_of_polytopes_contains(parts, x, tol):
    """Exact membership for a sum of polytopes: min-infinity-norm LP over
    one convex combination per summand."""
    gens = [p.generators for p in parts]
    sizes = [g.shape[0] for g in gens]
    d = x.size
    nvar = sum(sizes) + 1
    c = np.zeros(nvar)
    c[-1] = 1.0
    rows, rhs = [], []
    for j in range(d):
        row = np.zeros(nvar)
        ofs = 0
        for g, k in zip(gens, sizes):
            row[ofs:ofs + k] = g[:, j]
            ofs += k
        row[-1] = -1.0
        rows.append(row.copy())
        rhs.append(x[j])
        row[:-1] *= -1.0
        rows.append(row)
        rhs.append(-x[j])
    eqs = np.zeros((len(gens), nvar))
    ofs = 0
    for i, k in enumerate(sizes):
        eqs[i, ofs:ofs + k] = 1.0
        ofs += k
    res = linprog(c, A_ub=np.asarray(rows), b_ub=np.asarray(rhs), A_eq=eqs,
                  b_eq=np.ones(len(gens)), bounds=[(0, None)] * nvar,
                  method="highs")
    return bool(res.success) and float(res.fun) <= tol


def _support_grid_contains(fs, x, tol):
    """2-D membership by checking <w,x> <= support(w) over an angle grid,
    with golden refinement around the worst violation."""
    scale = max(1.0, float(np.max(np.abs(x))))

    def violation(phi):
        w = np.array([math.cos(phi), math.sin(phi)])
        val, _ = fs._support(w)
        return float(w @ x) - val

    worst = -math.inf
    worst_phi = 0.0
    for phi in np.linspace(0.0, 2.0 * math.pi, ANGLE_GRID, endpoint=False):
        v = violation(phi)
        if v > worst:
            worst, worst_phi = v, phi
    span = 2.0 * math.pi / ANGLE_GRID
    phi, v, _ = golden_max(violation, worst_phi - span, worst_phi + span, tol=1e-12)
    worst = max(worst, v)
    return worst <= tol * scale


class HullUnionSet(FeasibleSet):
    """Convex hull of a union of sets: support is the max over parts."""

    def __init__(self, parts: Sequence[FeasibleSet]):
        parts = tuple(parts)
        if not parts:
            raise ValueError("hull union of an empty list")
        d = parts[0].dim
        for p in parts:
            if p.dim != d:
                raise DimensionMismatchError("parts must share dimension")
        self.parts = parts

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def _support(self, w):
        best_val, best_pt = -math.inf, None
        for p in self.parts:
            v, q = p._support(w)
            if v > best_val:
                best_val, best_pt = v, q
        return best_val, best_pt

    def contains(self, x, tol=SUM_MEMBERSHIP_TOL):
        x = as_payoff_vector(x, self.dim)
        if any(p.contains(x, tol) for p in self.parts):
            return True
        if self.dim != 2:
            raise NotImplementedError("hull-union membership is 2-D only")
        return _support_grid_contains(self, x, tol)


class LinearImageSet(FeasibleSet):
    """Image of a base set under a linear map; support via the transpose."""

    def __init__(self, base: FeasibleSet, matrix):
        m = np.atleast_2d(np.asarray(matrix, dtype=float))
        if m.shape[1] != base.dim:
            raise DimensionMismatchError("matrix columns must match base dim")
        self.base = base
        self.matrix = m
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _support(self, w):
        pull = self.matrix.T @ w
        if float(np.max(np.abs(pull))) == 0.0:
            # the image is orthogonal to w; any point attains 0
            _, q = self.base._support(np.ones(self.base.dim))
            return 0.0, self.matrix @ q
        v, q = self.base._support(pull)
        return float(v), self.matrix @ q

    def contains(self, x, tol=SUM_MEMBERSHIP_TOL):
        x = as_payoff_vector(x, self.dim)
        if self.dim == 2:
            return _support_grid_contains(self, x, tol)
        raise NotImplementedError("linear-image membership is support-based 2-D only")


def scaled(fs: FeasibleSet, factors) -> FeasibleSet:
    """Image of ``fs`` under a nonnegative diagonal scaling, preserving the
    concrete representation where possible."""
    f = as_payoff_vector(factors, fs.dim)
    if np.any(f < 0):
        raise ValueError("scaling factors must be nonnegative")
    if isinstance(fs, PolytopeSet):
        return PolytopeSet(fs.generators * f)
    if isinstance(fs, MinkowskiSumSet):
        return MinkowskiSumSet([scaled(p, f) for p in fs.parts])
    if isinstance(fs, HullUnionSet):
        return HullUnionSet([scaled(p, f) for p in fs.parts])
    if isinstance(fs, ParametricFrontierSet):
        if fs.kind == "disk-quadratic" and np.all(f > 0):
            return ParametricFrontierSet.disk(fs.params["a"] * f[0],
                                              fs.params["b"] * f[1])
        if fs.kind == "log-exponential" and np.all(f > 0):
            return ParametricFrontierSet.exp_budget(fs.params["theta1"] * f[0],
                                                    fs.params["theta2"] * f[1],
                                                    fs.params["budget"])
        if np.all(f > 0):
            inv = 1.0 / f

            def level(x, _inv=inv, _base=fs):
                return _base.level(np.asarray(x, float) * _inv)

            return ParametricFrontierSet.custom(level, scale_hint=fs._scale * f.max())
        # a zero factor flattens the set onto an axis segment
        j = int(np.argmax(f))
        length = fs._axis_intercept(j) * f[j]
        seg = np.zeros((2, 2))
        seg[1, j] = length
        return PolytopeSet(seg)
    return LinearImageSet(fs, np.diag(f))


# ---------------------------------------------------------------------------
# module-level operations (spec surface)


def support(fs: FeasibleSet, direction):
    """Support value and attaining point of ``fs`` in ``direction``."""
    return fs.support(direction)


def contains(fs: FeasibleSet, x, tol=1e-9) -> bool:
    """Whether ``x`` lies within ``tol`` of the set."""
    return fs.contains(x, tol)


def minkowski_sum(sets: Sequence[FeasibleSet]) -> FeasibleSet:
    """Minkowski sum of feasible sets.

    2-D polytopes are summed explicitly (vertex enumeration); everything
    else stays lazy with additive support functions.
    """
    sets = list(sets)
    if not sets:
        raise ValueError("minkowski_sum of an empty list")
    if len(sets) == 1:
        return sets[0]
    if all(isinstance(s, PolytopeSet) for s in sets) and sets[0].dim == 2:
        acc = sets[0].generators
        for s in sets[1:]:
            acc = (acc[:, None, :] + s.generators[None, :, :]).reshape(-1, 2)
            acc = hull_vertices_2d(acc)
        return PolytopeSet(acc)
    return MinkowskiSumSet(sets)


def pareto_frontier_sample(fs: FeasibleSet, k: int, seed: int = 0) -> list[np.ndarray]:
    """``k`` frontier points, each the support argmax of a strictly positive
    direction.  Output points never dominate one another."""
    if k < 1:
        raise ValueError("k must be >= 1")
    d = fs.dim
    if d == 2:
        if k == 1:
            dirs = [np.array([1.0, 1.0]) / math.sqrt(2)]
        else:
            angles = np.linspace(0.05, math.pi / 2 - 0.05, k)
            dirs = [np.array([math.cos(a), math.sin(a)]) for a in angles]
    else:
        rng = np.random.default_rng(seed)
        dirs = [None] * k
        for i in range(k):
            w = np.abs(rng.standard_normal(d)) + 1e-6
            dirs[i] = w / np.linalg.norm(w)
    pts: list[np.ndarray] = []
    for w in dirs:
        _, p = fs.support(w)
        if not any(np.allclose(p, q, atol=1e-12) for q in pts):
            pts.append(p)
    # dominance scan; support argmaxes of positive directions cannot be
    # dominated, so this only guards against numerical ties
    keep = []
    for i, p in enumerate(pts):
        dominated = any(
            np.all(q >= p - 1e-12) and np.any(q > p + 1e-12)
            for j, q in enumerate(pts) if j != i
        )
        if not dominated:
            keep.append(p)
    return keep


def coordinate_max(fs: FeasibleSet, j: int, floor=None, tol: float = 1e-9) -> float:
    """Maximum of coordinate ``j`` over ``fs`` intersected with
    ``{x : x_i >= floor_i for i != j}`` (no constraint where floor is None)."""
    d = fs.dim
    if floor is None:
        e = np.zeros(d)
        e[j] = 1.0
        v, _ = fs.support(e)
        return v
    floor = as_payoff_vector(floor, d)
    if isinstance(fs, PolytopeSet) and d == 2:
        return _coordinate_max_poly2d(fs, j, floor)
    if isinstance(fs, PolytopeSet) or (
        isinstance(fs, MinkowskiSumSet)
        and all(isinstance(p, PolytopeSet) for p in fs.parts)
    ):
        return _coordinate_max_lp(fs, j, floor)
    if d != 2:
        raise NotImplementedError("constrained coordinate max beyond 2-D needs polytopes")
    other = 1 - j
    c = floor[other]
    e = np.zeros(2)
    e[j] = 1.0
    vmax, pmax = fs.support(e)
    if pmax[other] >= c - 1e-12:
        return vmax
    # the floor binds; by convexity the optimum sits on the slice x_other = c
    return upper_bound_2d(fs, c, fixed_coord=other)


def _coordinate_max_poly2d(fs, j, floor):
    """LP-free constrained coordinate max for 2-D polytopes: scan vertices
    above the floor plus hull-edge crossings of the floor line."""
    other = 1 - j
    c = floor[other]
    verts = hull_vertices_2d(fs.generators)
    best = -math.inf
    k = verts.shape[0]
    for idx in range(k):
        v = verts[idx]
        if v[other] >= c - 1e-12:
            best = max(best, v[j])
        u = verts[(idx + 1) % k]
        lo, hi = sorted((u[other], v[other]))
        if lo - 1e-15 <= c <= hi + 1e-15 and abs(u[other] - v[other]) > 1e-15:
            t = (c - v[other]) / (u[other] - v[other])
            best = max(best, v[j] + t * (u[j] - v[j]))
    return best


def _coordinate_max_lp(fs, j, floor):
    parts = fs.parts if isinstance(fs, MinkowskiSumSet) else (fs,)
    gens = [p.generators for p in parts]
    sizes = [g.shape[0] for g in gens]
    d = floor.size
    nvar = sum(sizes)
    c = np.zeros(nvar)
    ofs = 0
    for g, k in zip(gens, sizes):
        c[ofs:ofs + k] = -g[:, j]
        ofs += k
    rows, rhs = [], []
    for i in range(d):
        if i == j:
            continue
        row = np.zeros(nvar)
        ofs = 0
        for g, k in zip(gens, sizes):
            row[ofs:ofs + k] = -g[:, i]
            ofs += k
        rows.append(row)
        rhs.append(-floor[i])
    eqs = np.zeros((len(gens), nvar))
    ofs = 0
    for i, k in enumerate(sizes):
        eqs[i, ofs:ofs + k] = 1.0
        ofs += k
    res = linprog(c, A_ub=np.asarray(rows) if rows else None,
                  b_ub=np.asarray(rhs) if rhs else None,
                  A_eq=eqs, b_eq=np.ones(len(gens)),
                  bounds=[(0, None)] * nvar, method="highs")
    if not res.success:
        return -math.inf
    return float(-res.fun)


def upper_bound_2d(fs: FeasibleSet, value: float, fixed_coord: int = 0) -> float:
    """Supremum of the free coordinate over ``fs`` with the other coordinate
    fixed to at least ``value`` (2-D sets only).

    Computed as the lower envelope of supporting half-plane bounds, scanned
    and refined over normal angles.
    """
    if fs.dim != 2:
        raise DimensionMismatchError("upper_bound_2d needs a 2-D set")
    free = 1 - fixed_coord

    def bound(phi):
        w = np.zeros(2)
        w[fixed_coord] = math.cos(phi)
        w[free] = math.sin(phi)
        val, _ = fs._support(w)
        return (val - w[fixed_coord] * value) / w[free]

    _, v = scan_then_golden_min(bound, 1e-7, math.pi - 1e-7, scan=129)
    return v


def is_pareto_optimal(fs: FeasibleSet, x, tol: float = 1e-6) -> bool:
    """Whether no feasible point improves one coordinate of ``x`` by more
    than ``tol`` while (essentially) not falling below it elsewhere.

    The floor on the remaining coordinates is relaxed by ``tol/1000``
    rather than ``tol``: it absorbs numerical slack in ``x`` without letting
    the test trade a full ``tol`` of one utility for more than ``tol`` of
    another along a shallow frontier slope, which would misclassify smooth
    frontier points.
    """
    x = as_payoff_vector(x, fs.dim)
    if not fs.contains(x, max(tol, SUM_MEMBERSHIP_TOL)):
        raise InfeasiblePointError("point is outside the set")
    slack = max(tol * 1e-3, 1e-12)
    for j in range(fs.dim):
        m = coordinate_max(fs, j, floor=x - slack)
        if m > x[j] + tol:
            return False
    return True


def normal_weights_at(fs: ParametricFrontierSet, x) -> np.ndarray:
    """Outward unit normal of a parametric frontier at ``x`` (the normalized
    level-function gradient)."""
    if not isinstance(fs, ParametricFrontierSet):
        raise TypeError("normal_weights_at is defined for parametric frontier sets")
    x = as_payoff_vector(x, 2)
    proj = fs.frontier_projection(x) if np.linalg.norm(x) > 0 else x
    if np.linalg.norm(proj - x) > 1e-6 * max(1.0, fs._scale):
        raise InfeasiblePointError("point is not on the frontier")
    g = fs.gradient(proj)
    nrm = float(np.linalg.norm(g))
    if nrm < 1e-12:
        raise ValueError("degenerate (zero) gradient on the frontier")
    return g / nrm
