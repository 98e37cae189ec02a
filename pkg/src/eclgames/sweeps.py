"""Belief sweeps for the square-root and logarithmic trade models.

Two types hold symmetric beliefs ``p`` about meeting their own type.  In
normalized per-other-player units the individual feasible sets are

* square-root returns: ``F_1 = {x >= 0 : (x1/p)^2 + (x2/(1-p))^2 <= 1}``
  (type 2 mirrored), with closed-form compromise point
  ``(p^2, (1-p)^2) / sqrt(1 - 2 p (1-p))`` for type 1;
* logarithmic returns with budget ``r``:
  ``F_1 = {x >= 0 : exp(x1/p) + exp(x2/(1-p)) <= r}`` extended by the axis
  caps ``(p log r, 0)`` and ``(0, (1-p) log r)`` (producing zero utility
  for a value system costs nothing), with compromise point
  ``(p log(pr), (1-p) log(max((1-p) r, 1)))``.

Each sweep row carries both the closed forms and an independently solved
numeric compromise on the constructed sets, plus their residual.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import (
    FeasibleSet,
    HullUnionSet,
    ParametricFrontierSet,
    PolytopeSet,
    minkowski_sum,
)
from .solutions import SolutionWeights, decompose, nbs

__all__ = [
    "SweepSpec",
    "SweepRow",
    "run_sweep",
    "write_csv",
    "sqrt_individual_sets",
    "log_individual_sets",
    "sqrt_closed_point",
    "sqrt_closed_share",
    "sqrt_closed_gains",
    "log_closed_point",
    "log_closed_share",
    "log_closed_gains",
]

CSV_HEADER = "p,share_numeric,gains_numeric,share_closed,gains_closed,residual"


@dataclass(frozen=True)
class SweepSpec:
    """Grid specification for a belief sweep."""

    model: str  # "sqrt" | "log"
    r: float | None = None
    p_start: float = 0.5
    p_stop: float = 1.0
    step: float = 0.05

    def __post_init__(self):
        if self.model not in ("sqrt", "log"):
            raise ValueError("model must be 'sqrt' or 'log'")
        if not (0.5 <= self.p_start <= self.p_stop <= 1.0):
            raise ValueError("the belief grid must lie within [1/2, 1]")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.model == "log":
            if self.r is None or self.r <= 1.0:
                raise ValueError("the log model needs a resource budget r > 1")

    def grid(self) -> list[float]:
        ps = []
        k = 0
        while True:
            p = self.p_start + k * self.step
            if p > self.p_stop + 1e-12:
                break
            ps.append(round(min(p, self.p_stop), 12))
            k += 1
        return ps


@dataclass
class SweepRow:
    p: float
    share_numeric: float
    gains_numeric: float
    share_closed: float
    gains_closed: float
    residual: float
    point_numeric: tuple[float, float]
    point_closed: tuple[float, float]


# ---------------------------------------------------------------------------
# closed forms


def sqrt_closed_point(p: float) -> tuple[float, float]:
    s = math.sqrt(1.0 - 2.0 * (1.0 - p) * p)
    return (p**2 / s, (1.0 - p) ** 2 / s)


def sqrt_closed_share(p: float) -> float:
    return (1.0 - p) ** 2 / (1.0 - 2.0 * (1.0 - p) * p)


def sqrt_closed_gains(p: float) -> float:
    return math.sqrt(1.0 - 2.0 * (1.0 - p) * p) / p - 1.0


def log_closed_point(p: float, r: float) -> tuple[float, float]:
    other = max((1.0 - p) * r, 1.0)
    return (p * math.log(p * r), (1.0 - p) * math.log(other))


def log_closed_share(p: float, r: float) -> float:
    own, other = p * math.log(p * r), (1.0 - p) * math.log(max((1.0 - p) * r, 1.0))
    return other / (own + other)


def log_closed_gains(p: float, r: float) -> float:
    own, other = p * math.log(p * r), (1.0 - p) * math.log(max((1.0 - p) * r, 1.0))
    return (own + other) / (p * math.log(r)) - 1.0


# ---------------------------------------------------------------------------
# set construction


def sqrt_individual_sets(p: float) -> tuple[FeasibleSet, FeasibleSet]:
    if p >= 1.0:
        return (PolytopeSet([[0.0, 0.0], [1.0, 0.0]]),
                PolytopeSet([[0.0, 0.0], [0.0, 1.0]]))
    f1 = ParametricFrontierSet.disk(p, 1.0 - p)
    f2 = ParametricFrontierSet.disk(1.0 - p, p)
    return f1, f2


def _capped_log_set(theta_own, theta_other, r, own_first=True) -> FeasibleSet:
    caps = [PolytopeSet([[0.0, 0.0], [theta_own * math.log(r), 0.0]]),
            PolytopeSet([[0.0, 0.0], [0.0, theta_other * math.log(r)]])]
    if not own_first:
        caps = caps[::-1]
    t1, t2 = (theta_own, theta_other) if own_first else (theta_other, theta_own)
    curve = ParametricFrontierSet.exp_budget(t1, t2, r)
    return HullUnionSet([curve] + caps)


def log_individual_sets(p: float, r: float) -> tuple[FeasibleSet, FeasibleSet]:
    if r <= 2.0:
        raise ValueError("the log construction needs r > 2")
    if p >= 1.0:
        length = math.log(r)
        return (PolytopeSet([[0.0, 0.0], [length, 0.0]]),
                PolytopeSet([[0.0, 0.0], [0.0, length]]))
    f1 = HullUnionSet([
        ParametricFrontierSet.exp_budget(p, 1.0 - p, r),
        PolytopeSet([[0.0, 0.0], [p * math.log(r), 0.0]]),
        PolytopeSet([[0.0, 0.0], [0.0, (1.0 - p) * math.log(r)]]),
    ])
    f2 = HullUnionSet([
        ParametricFrontierSet.exp_budget(1.0 - p, p, r),
        PolytopeSet([[0.0, 0.0], [(1.0 - p) * math.log(r), 0.0]]),
        PolytopeSet([[0.0, 0.0], [0.0, p * math.log(r)]]),
    ])
    return f1, f2


# ---------------------------------------------------------------------------
# the sweep itself


def _numeric_compromise(f1: FeasibleSet, f2: FeasibleSet) -> tuple[np.ndarray, float]:
    """Solve the symmetric compromise numerically; returns type 1's
    individual contribution point and the disagreement level."""
    e1 = np.array([1.0, 0.0])
    d1, _ = f1.support(e1)
    d = np.array([d1, d1])
    joint = minkowski_sum([f1, f2])
    report = nbs(joint, d, SolutionWeights.uniform(2), on_degenerate="disagreement")
    if report.meta.get("degenerate"):
        _, own = f1.support(e1)
        return own, d1
    parts = decompose([f1, f2], report.point, tol=1e-5)
    return parts[0], d1


def _sweep_row(model: str, p: float, r: float | None) -> SweepRow:
    if model == "sqrt":
        f1, f2 = sqrt_individual_sets(p)
        closed_pt = sqrt_closed_point(p)
        share_c, gains_c = sqrt_closed_share(p), sqrt_closed_gains(p)
    else:
        f1, f2 = log_individual_sets(p, r)
        closed_pt = log_closed_point(p, r)
        share_c, gains_c = log_closed_share(p, r), log_closed_gains(p, r)
    point, d1 = _numeric_compromise(f1, f2)
    total = float(point[0] + point[1])
    share_n = float(point[1] / total) if total > 0 else 0.0
    gains_n = total / d1 - 1.0 if d1 > 0 else 0.0
    residual = max(abs(share_n - share_c), abs(gains_n - gains_c))
    return SweepRow(p=p, share_numeric=share_n, gains_numeric=gains_n,
                    share_closed=share_c, gains_closed=gains_c,
                    residual=residual,
                    point_numeric=(float(point[0]), float(point[1])),
                    point_closed=closed_pt)


def run_sweep(spec: SweepSpec, max_workers: int = 1) -> list[SweepRow]:
    """Evaluate the sweep grid; rows are independent (safe to evaluate
    concurrently) and always come back in grid order.  The default is
    serial evaluation: the rows are GIL-bound numpy work, so extra threads
    only add contention."""
    ps = spec.grid()
    if max_workers <= 1:
        return [_sweep_row(spec.model, p, spec.r) for p in ps]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(lambda p: _sweep_row(spec.model, p, spec.r), ps))
    return rows


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(rows, stream) -> None:
    """Write sweep rows as CSV with shortest round-trip float formatting."""
    stream.write(CSV_HEADER + "\n")
    for row in rows:
        cells = [row.p, row.share_numeric, row.gains_numeric,
                 row.share_closed, row.gains_closed, row.residual]
        stream.write(",".join(_fmt(c) for c in cells) + "\n")
