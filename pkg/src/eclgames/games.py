"""Complete-information bargaining games with additively separable utilities.

A separable normal-form game lists, per player, the utility vector each of
their actions contributes to everyone.  Mixing actions traces out the
player's individual feasible set; the joint feasible set is the Minkowski
sum of the individual sets.  A bargaining game adds a disagreement point
that must be feasible and strictly improvable for every player.

A general (not necessarily separable) normal-form game type is also
provided: threat-game analysis needs games whose payoffs do not decompose
into per-player contributions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InfeasiblePointError, NoStrictImprovementError
from .geometry import FeasibleSet, PolytopeSet, as_payoff_vector, minkowski_sum
from .solutions import max_min_gain

__all__ = [
    "NormalFormSeparableGame",
    "NormalFormGame",
    "SeparableBargainingGame",
    "from_normal_form",
    "nash_equilibrium",
    "pure_nash_equilibria",
    "joint_feasible_set",
]

STRICT_IMPROVEMENT_TOL = 1e-9


@dataclass(frozen=True)
class NormalFormSeparableGame:
    """Finite actions with per-player contribution vectors.

    ``contributions[i][a]`` is the utility vector (one entry per player)
    that player ``i`` generates for everyone by choosing action ``a``.
    """

    contributions: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(np.atleast_2d(np.asarray(c, dtype=float)) for c in self.contributions)
        n = len(mats)
        if n == 0:
            raise ValueError("a game needs at least one player")
        for m in mats:
            if m.shape[0] < 1:
                raise ValueError("every player needs at least one action")
            if m.shape[1] != n:
                raise DimensionMismatchError(
                    f"contribution vectors must have dimension {n}")
            if not np.all(np.isfinite(m)):
                raise ValueError("contributions must be finite")
            m.setflags(write=False)
        object.__setattr__(self, "contributions", mats)

    @property
    def players(self) -> int:
        return len(self.contributions)

    @property
    def action_counts(self) -> tuple[int, ...]:
        return tuple(c.shape[0] for c in self.contributions)

    def individual_set(self, i: int) -> PolytopeSet:
        return PolytopeSet(self.contributions[i])

    def individual_sets(self) -> list[PolytopeSet]:
        return [self.individual_set(i) for i in range(self.players)]

    def outcome_payoff(self, actions) -> np.ndarray:
        """Total payoff vector of a pure action profile."""
        total = np.zeros(self.players)
        for i, a in enumerate(actions):
            total += self.contributions[i][a]
        return total

    def outcomes(self):
        for profile in itertools.product(*[range(k) for k in self.action_counts]):
            yield profile, self.outcome_payoff(profile)

    def to_normal_form(self) -> "NormalFormGame":
        shape = self.action_counts + (self.players,)
        payoffs = np.zeros(shape)
        for profile, payoff in self.outcomes():
            payoffs[profile] = payoff
        return NormalFormGame(payoffs)


@dataclass(frozen=True)
class NormalFormGame:
    """General finite game: ``payoffs[a_1, ..., a_n, i]`` is player ``i``'s
    utility under the pure profile ``(a_1, ..., a_n)``."""

    payoffs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.payoffs, dtype=float)
        if p.ndim < 2 or p.shape[-1] != p.ndim - 1:
            raise DimensionMismatchError(
                "payoffs must have shape (k_1, ..., k_n, n)")
        if not np.all(np.isfinite(p)):
            raise ValueError("payoffs must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "payoffs", p)

    @property
    def players(self) -> int:
        return self.payoffs.ndim - 1

    @property
    def action_counts(self) -> tuple[int, ...]:
        return self.payoffs.shape[:-1]

    def outcome_payoff(self, actions) -> np.ndarray:
        return np.asarray(self.payoffs[tuple(actions)])

    def expected_payoff(self, mixtures) -> np.ndarray:
        """Expected payoff vector under independent mixed strategies."""
        out = self.payoffs
        for i, sigma in enumerate(mixtures):
            sigma = as_payoff_vector(sigma, self.action_counts[i])
            out = np.tensordot(sigma, out, axes=([0], [0]))
        return out

    def outcome_hull(self) -> PolytopeSet:
        flat = self.payoffs.reshape(-1, self.players)
        return PolytopeSet(flat)


@dataclass(frozen=True)
class SeparableBargainingGame:
    """Individual feasible sets plus a disagreement point.

    Validates that the disagreement point is feasible in the summed set and
    that some feasible point strictly improves on it for every player.
    """

    individual_sets: tuple[FeasibleSet, ...]
    disagreement: np.ndarray

    def __post_init__(self):
        sets = tuple(self.individual_sets)
        if not sets:
            raise ValueError("a bargaining game needs at least one player set")
        n = sets[0].dim
        for s in sets:
            if s.dim != n:
                raise DimensionMismatchError("individual sets must share dimension")
        d = as_payoff_vector(self.disagreement, n)
        d.setflags(write=False)
        object.__setattr__(self, "individual_sets", sets)
        object.__setattr__(self, "disagreement", d)
        joint = minkowski_sum(list(sets))
        if not joint.contains(d, 1e-7):
            raise InfeasiblePointError("disagreement point lies outside the feasible set")
        gain, _ = max_min_gain(joint, d)
        if gain <= STRICT_IMPROVEMENT_TOL:
            raise NoStrictImprovementError(
                "no feasible point strictly improves on the disagreement point")

    @property
    def players(self) -> int:
        return len(self.individual_sets)


def from_normal_form(game: NormalFormSeparableGame, d) -> SeparableBargainingGame:
    """Bargaining game whose individual sets are the hulls of each player's
    contribution vectors."""
    return SeparableBargainingGame(tuple(game.individual_sets()),
                                   as_payoff_vector(d, game.players))


def joint_feasible_set(game: SeparableBargainingGame) -> FeasibleSet:
    """Minkowski sum of the individual feasible sets."""
    return minkowski_sum(list(game.individual_sets))


def nash_equilibrium(game: NormalFormSeparableGame) -> tuple[tuple[int, ...], np.ndarray]:
    """Each player maximizes their own contribution to themselves.

    With separable utilities a player's action only affects others, so best
    responses reduce to maximizing the diagonal term; ties break to the
    lowest action index.  Returns the action profile and total payoffs.
    """
    actions = []
    for i, c in enumerate(game.contributions):
        actions.append(int(np.argmax(c[:, i])))
    profile = tuple(actions)
    return profile, game.outcome_payoff(profile)


def pure_nash_equilibria(game: NormalFormGame) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """All pure Nash equilibria of a general finite game, by enumeration."""
    found = []
    counts = game.action_counts
    for profile in itertools.product(*[range(k) for k in counts]):
        payoff = game.outcome_payoff(profile)
        stable = True
        for i in range(game.players):
            for alt in range(counts[i]):
                if alt == profile[i]:
                    continue
                dev = list(profile)
                dev[i] = alt
                if game.outcome_payoff(dev)[i] > payoff[i] + 1e-12:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            found.append((profile, payoff))
    return found
