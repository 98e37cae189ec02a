"""Bayesian games with anonymous type priors and additively separable payoffs.

Two layers are provided.  Finite-action games (:class:`EclBayesianGame`)
carry a payoff tensor ``u[t, t', a]``: the utility a player of type ``t``
produces for any player of type ``t'`` by choosing action ``a``.  Expected
utilities condition on one's own type; under anonymity they reduce to

    EU_t(alpha) = u[t,t,alpha_t] + (n-1) * sum_t' p(t'|t) u[t',t,alpha_t'].

Joint strategy distributions describe possibly correlated beliefs over all
players' actions and support conditional expected utilities, the basis of
dependency-equilibrium certificates.

Bargaining-layer games (:class:`EclBayesianBargainingGame`) replace the
finite action set by a convex set of utility vectors per type and map each
type's choices into per-type expected utilities, yielding the induced
bargaining geometry.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DimensionMismatchError,
    InfeasiblePointError,
    ZeroProbabilityActionError,
)
from .games import SeparableBargainingGame
from .geometry import (
    FeasibleSet,
    HullUnionSet,
    LinearImageSet,
    ParametricFrontierSet,
    PolytopeSet,
    as_payoff_vector,
    scaled,
)
from .solutions import SolutionReport, SolutionWeights

__all__ = [
    "TypePrior",
    "conditional",
    "EclBayesianGame",
    "expected_utility_pure",
    "JointStrategyDistribution",
    "conditional_expected_utility",
    "mixed_profile_expected_utility",
    "bne_pure",
    "dependency_certificate_pure",
    "EclBayesianBargainingGame",
    "individual_feasible_set",
    "induced_bargaining_game",
    "bayesian_nash",
    "nbs_solution",
    "dependency_certificate_point",
    "split_type",
    "subtype_reduction",
]

_PROB_TOL = 1e-12
_FULL_JOINT_MAX_PLAYERS = 5
_FULL_JOINT_MAX_TYPES = 4


# ---------------------------------------------------------------------------
# type priors


@dataclass(frozen=True)
class TypePrior:
    """Anonymous prior over type vectors.

    ``mode="full"`` stores the joint table over ``T^n`` (small n only);
    ``mode="pairwise"`` stores the marginal ``p(t)`` and the conditional
    matrix ``p(t'|t)``, which is all the anonymous expected-utility
    formulas consume.
    """

    players: int
    mode: str
    marginal: np.ndarray
    cond: np.ndarray
    joint: np.ndarray | None = None

    def __post_init__(self):
        if self.players < 1:
            raise ValueError("players must be >= 1")
        marginal = as_payoff_vector(self.marginal)
        m = marginal.size
        if np.any(marginal <= 0):
            raise ValueError("all types need positive prior probability")
        if abs(marginal.sum() - 1.0) > _PROB_TOL:
            raise ValueError("type marginal must sum to 1")
        cond = np.atleast_2d(np.asarray(self.cond, dtype=float))
        if cond.shape != (m, m):
            raise DimensionMismatchError("conditional matrix must be m x m")
        if np.any(cond < -_PROB_TOL):
            raise ValueError("conditional probabilities must be nonnegative")
        if np.max(np.abs(cond.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError("conditional rows must sum to 1")
        # exchangeability of the pair marginal: p(t) p(t'|t) = p(t') p(t|t')
        pair = marginal[:, None] * cond
        if np.max(np.abs(pair - pair.T)) > 1e-9:
            raise ValueError("prior is not exchangeable: p(t)p(t'|t) != p(t')p(t|t')")
        marginal.setflags(write=False)
        cond.setflags(write=False)
        object.__setattr__(self, "marginal", marginal)
        object.__setattr__(self, "cond", cond)
        if self.joint is not None:
            j = np.asarray(self.joint, dtype=float)
            j.setflags(write=False)
            object.__setattr__(self, "joint", j)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_joint(cls, joint) -> "TypePrior":
        """Full-joint prior over ``T^n``; anonymity is checked exhaustively."""
        j = np.asarray(joint, dtype=float)
        n = j.ndim
        m = j.shape[0]
        if any(s != m for s in j.shape):
            raise DimensionMismatchError("joint table must be (m,)*n")
        if n > _FULL_JOINT_MAX_PLAYERS or m > _FULL_JOINT_MAX_TYPES:
            raise ValueError(
                f"full-joint priors support n <= {_FULL_JOINT_MAX_PLAYERS}, "
                f"m <= {_FULL_JOINT_MAX_TYPES}; use pairwise mode")
        if np.any(j < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(float(j.sum()) - 1.0) > _PROB_TOL:
            raise ValueError("joint table must sum to 1")
        for perm in itertools.permutations(range(n)):
            if not np.allclose(j, np.transpose(j, perm), atol=_PROB_TOL):
                raise ValueError("joint prior must be anonymous (permutation invariant)")
        axes = tuple(range(1, n))
        marginal = j.sum(axis=axes) if n > 1 else j.copy()
        if n > 1:
            pair = j.sum(axis=tuple(range(2, n))) if n > 2 else j
            cond = pair / marginal[:, None]
        else:
            cond = np.tile(marginal, (m, 1))
        return cls(players=n, mode="full", marginal=marginal, cond=cond, joint=j)

    @classmethod
    def from_pairwise(cls, marginal, cond, players) -> "TypePrior":
        return cls(players=players, mode="pairwise",
                   marginal=np.asarray(marginal, float),
                   cond=np.asarray(cond, float))

    @classmethod
    def independent(cls, marginal, players) -> "TypePrior":
        marginal = as_payoff_vector(marginal)
        cond = np.tile(marginal, (marginal.size, 1))
        return cls.from_pairwise(marginal, cond, players)

    @classmethod
    def uniform_independent(cls, num_types, players) -> "TypePrior":
        return cls.independent(np.full(num_types, 1.0 / num_types), players)

    # -- queries -----------------------------------------------------------

    @property
    def num_types(self) -> int:
        return self.marginal.size

    def conditional(self, t: int, other: int) -> float:
        """Probability that any other player has type ``other`` given own
        type ``t``."""
        return float(self.cond[t, other])

    def split(self, t: int, nu: float) -> "TypePrior":
        """Split type ``t`` into two subtypes with mass ``nu*p(t)`` and
        ``(1-nu)*p(t)``; the new subtype is appended as the last index."""
        if not 0.0 < nu < 1.0:
            raise ValueError("the split fraction must lie strictly in (0, 1)")
        m = self.num_types
        parent = list(range(m)) + [t]
        factor = np.ones(m + 1)
        factor[t] = nu
        factor[m] = 1.0 - nu
        marginal = np.array([self.marginal[parent[i]] * factor[i] for i in range(m + 1)])
        cond = np.zeros((m + 1, m + 1))
        for i in range(m + 1):
            for j in range(m + 1):
                cond[i, j] = self.cond[parent[i], parent[j]] * factor[j]
        if self.mode == "full" and self.joint is not None:
            n = self.players
            shape = (m + 1,) * n
            joint = np.zeros(shape)
            for idx in itertools.product(range(m + 1), repeat=n):
                base = tuple(parent[i] for i in idx)
                joint[idx] = self.joint[base] * math.prod(factor[i] for i in idx)
            return TypePrior(players=n, mode="full", marginal=marginal,
                             cond=cond, joint=joint)
        return TypePrior(players=self.players, mode="pairwise",
                         marginal=marginal, cond=cond)


def conditional(prior: TypePrior, t: int, other: int) -> float:
    """Probability any other player has type ``other`` given own type ``t``."""
    return prior.conditional(t, other)


# ---------------------------------------------------------------------------
# finite-action Bayesian games


@dataclass(frozen=True)
class EclBayesianGame:
    """Anonymous, additively separable Bayesian game with finite actions."""

    players: int
    payoff: np.ndarray  # u[t, t', a]
    prior: TypePrior

    def __post_init__(self):
        u = np.asarray(self.payoff, dtype=float)
        if u.ndim != 3 or u.shape[0] != u.shape[1]:
            raise DimensionMismatchError("payoff tensor must have shape (m, m, A)")
        if not np.all(np.isfinite(u)):
            raise ValueError("payoffs must be finite")
        if u.shape[0] != self.prior.num_types:
            raise DimensionMismatchError("payoff tensor does not match the prior")
        if self.players != self.prior.players:
            raise ValueError("game and prior disagree on the player count")
        u.setflags(write=False)
        object.__setattr__(self, "payoff", u)

    @property
    def num_types(self) -> int:
        return self.payoff.shape[0]

    @property
    def num_actions(self) -> int:
        return self.payoff.shape[2]


def expected_utility_pure(game: EclBayesianGame, strategy, t: int) -> float:
    """Ex interim expected utility of an anonymous pure strategy profile."""
    alpha = tuple(strategy)
    if len(alpha) != game.num_types:
        raise DimensionMismatchError("strategy must assign one action per type")
    u = game.payoff
    own = u[t, t, alpha[t]]
    others = sum(game.prior.conditional(t, tp) * u[tp, t, alpha[tp]]
                 for tp in range(game.num_types))
    return float(own + (game.players - 1) * others)


def bne_pure(game: EclBayesianGame) -> tuple[int, ...]:
    """The anonymous pure-strategy Bayesian Nash equilibrium: each type
    maximizes the utility it produces for itself (ties to lowest index)."""
    return tuple(int(np.argmax(game.payoff[t, t, :])) for t in range(game.num_types))


def _validate_bne(game: EclBayesianGame, beta) -> None:
    beta = tuple(beta)
    for t in range(game.num_types):
        own = game.payoff[t, t, :]
        if own[beta[t]] < float(np.max(own)) - 1e-12:
            raise ValueError(
                f"strategy is not a Bayesian Nash equilibrium: type {t} "
                f"does not maximize its own-type payoff")


def dependency_certificate_pure(game: EclBayesianGame, alpha, beta=None):
    """Sufficient dependency-equilibrium certificate for a pure profile.

    ``alpha`` is certified when every type weakly prefers everyone playing
    ``alpha`` to the equilibrium ``beta`` (their own deviation included in
    the evidence).  Returns ``(certified, per-type slack)``.
    """
    if beta is None:
        beta = bne_pure(game)
    _validate_bne(game, beta)
    alpha = tuple(alpha)
    u = game.payoff
    n1 = game.players - 1
    slack = np.zeros(game.num_types)
    for t in range(game.num_types):
        s = u[t, t, alpha[t]] - u[t, t, beta[t]]
        s += n1 * sum(
            game.prior.conditional(t, tp) * (u[tp, t, alpha[tp]] - u[tp, t, beta[tp]])
            for tp in range(game.num_types))
        slack[t] = s
    return bool(np.all(slack >= -1e-12)), slack


# ---------------------------------------------------------------------------
# joint strategy distributions


@dataclass(frozen=True)
class JointStrategyDistribution:
    """Possibly correlated belief over all players' actions given types.

    ``mode="full"`` stores one table over ``A^n`` per ordered type vector
    (array of shape ``(m,)*n + (A,)*n``).  ``mode="pairwise"`` stores, for
    each ordered type pair, the joint distribution of (own action, other
    action); that is exactly the information the anonymous conditional
    expected utility consumes, and it scales to any player count.
    """

    num_types: int
    num_actions: int
    mode: str
    full: np.ndarray | None = None
    pair: np.ndarray | None = None
    players: int | None = None

    def __post_init__(self):
        m, a = self.num_types, self.num_actions
        if self.mode == "full":
            f = np.asarray(self.full, dtype=float)
            n = f.ndim // 2
            if f.shape != (m,) * n + (a,) * n:
                raise DimensionMismatchError("full table must be (m,)*n + (A,)*n")
            if np.any(f < 0):
                raise ValueError("probabilities must be nonnegative")
            sums = f.reshape((m,) * n + (-1,)).sum(axis=-1)
            if np.max(np.abs(sums - 1.0)) > 1e-9:
                raise ValueError("each per-type-vector table must sum to 1")
            f.setflags(write=False)
            object.__setattr__(self, "full", f)
            object.__setattr__(self, "players", n)
        elif self.mode == "pairwise":
            q = np.asarray(self.pair, dtype=float)
            if q.shape != (m, m, a, a):
                raise DimensionMismatchError("pair table must be (m, m, A, A)")
            if np.any(q < 0):
                raise ValueError("probabilities must be nonnegative")
            if np.max(np.abs(q.sum(axis=(2, 3)) - 1.0)) > 1e-9:
                raise ValueError("each pair table must sum to 1")
            if np.max(np.abs(q - np.transpose(q, (1, 0, 3, 2)))) > 1e-9:
                raise ValueError("pair tables must be anonymous: q[t,t',a,b] = q[t',t,b,a]")
            q.setflags(write=False)
            object.__setattr__(self, "pair", q)
        else:
            raise ValueError("mode must be 'full' or 'pairwise'")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_pair_tables(cls, pair) -> "JointStrategyDistribution":
        q = np.asarray(pair, dtype=float)
        return cls(num_types=q.shape[0], num_actions=q.shape[2],
                   mode="pairwise", pair=q)

    @classmethod
    def uncorrelated(cls, sigma, players) -> "JointStrategyDistribution":
        """Product distribution of an anonymous mixed profile
        ``sigma[t, a]``."""
        sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
        m, a = sigma.shape
        if np.any(sigma < 0) or np.max(np.abs(sigma.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError("sigma rows must be distributions")
        full = np.zeros((m,) * players + (a,) * players)
        for tvec in itertools.product(range(m), repeat=players):
            for avec in itertools.product(range(a), repeat=players):
                full[tvec + avec] = math.prod(
                    sigma[tvec[i], avec[i]] for i in range(players))
        return cls(num_types=m, num_actions=a, mode="full", full=full)

    @classmethod
    def from_sorted_profiles(cls, tables, num_types, num_actions, players
                             ) -> "JointStrategyDistribution":
        """Anonymous distribution given per-unordered-type-profile tables.

        ``tables`` maps a sorted type tuple to a table over ``A^n`` indexed
        consistently with that sorted order; ordered profiles are filled in
        by permuting."""
        full = np.zeros((num_types,) * players + (num_actions,) * players)
        for tvec in itertools.product(range(num_types), repeat=players):
            order = tuple(np.argsort(tvec, kind="stable"))
            key = tuple(sorted(tvec))
            if key not in tables:
                raise KeyError(f"missing table for type profile {key}")
            tab = np.asarray(tables[key], dtype=float)
            # slot j of the sorted profile corresponds to player order[j]
            for avec_sorted in itertools.product(range(num_actions), repeat=players):
                avec = [0] * players
                for j, player in enumerate(order):
                    avec[player] = avec_sorted[j]
                full[tvec + tuple(avec)] += tab[avec_sorted]
        return cls(num_types=num_types, num_actions=num_actions, mode="full",
                   full=full)

    # -- probabilities -----------------------------------------------------

    def is_anonymous(self) -> bool:
        if self.mode == "pairwise":
            return True
        n = self.players
        m, a = self.num_types, self.num_actions
        for perm in itertools.permutations(range(n)):
            permuted = np.transpose(self.full, perm + tuple(n + p for p in perm))
            if not np.allclose(self.full, permuted, atol=1e-12):
                return False
        return True

    def action_prob(self, a: int, t: int, prior: TypePrior) -> float:
        """Prior probability that a player of type ``t`` plays ``a``."""
        if self.mode == "pairwise":
            return float(sum(
                prior.conditional(t, tp) * self.pair[t, tp, a, :].sum()
                for tp in range(self.num_types)))
        n = self.players
        if prior.mode != "full" or prior.joint is None:
            raise ValueError("full-mode distributions need a full-joint prior")
        num = 0.0
        for tvec in itertools.product(range(self.num_types), repeat=n):
            if tvec[0] != t:
                continue
            tab = self.full[tvec]
            marg = tab.reshape(self.num_actions, -1).sum(axis=1)[a]
            num += prior.joint[tvec] * marg
        return float(num / prior.marginal[t])

    def pair_conditional(self, a_other: int, t_other: int, a_self: int,
                         t_self: int, prior: TypePrior) -> float:
        """Probability that another player of type ``t_other`` plays
        ``a_other`` given that this player of type ``t_self`` plays
        ``a_self``."""
        if self.mode == "pairwise":
            block = self.pair[t_self, t_other]
            denom = float(block[a_self, :].sum())
            if denom <= _PROB_TOL:
                raise ZeroProbabilityActionError(
                    f"type {t_self} never plays action {a_self} next to type {t_other}")
            return float(block[a_self, a_other] / denom)
        n = self.players
        if n < 2:
            raise ValueError("pair conditionals need at least two players")
        if prior.mode != "full" or prior.joint is None:
            raise ValueError("full-mode distributions need a full-joint prior")
        m, a = self.num_types, self.num_actions
        # distribution of the action vector given two fixed type slots
        weighted = np.zeros((a,) * n)
        total_p = 0.0
        for tvec in itertools.product(range(m), repeat=n):
            if tvec[0] != t_self or tvec[1] != t_other:
                continue
            weighted += prior.joint[tvec] * self.full[tvec]
            total_p += prior.joint[tvec]
        if total_p <= _PROB_TOL:
            raise ZeroProbabilityActionError("type pair has zero prior probability")
        weighted /= total_p
        axes = tuple(range(2, n))
        pair_action = weighted.sum(axis=axes) if n > 2 else weighted
        denom = float(pair_action[a_self, :].sum())
        if denom <= _PROB_TOL:
            raise ZeroProbabilityActionError(
                f"type {t_self} never plays action {a_self} in this pairing")
        return float(pair_action[a_self, a_other] / denom)


def conditional_expected_utility(game: EclBayesianGame,
                                 s: JointStrategyDistribution,
                                 a: int, t: int) -> float:
    """Conditional expected utility of playing ``a`` as type ``t`` under the
    joint strategy distribution ``s``.

    Other players' actions are conditioned on one's own action, so the value
    reflects whatever dependencies ``s`` encodes.  The other-player block is
    scaled by ``n - 1`` with ``n`` taken from the game, which lets a
    pairwise distribution serve any population size.
    """
    if s.num_actions != game.num_actions or s.num_types != game.num_types:
        raise DimensionMismatchError("distribution does not match the game")
    if s.action_prob(a, t, game.prior) <= _PROB_TOL:
        raise ZeroProbabilityActionError(
            f"cannot condition on zero-probability action {a} for type {t}")
    u = game.payoff
    total = float(u[t, t, a])
    n1 = game.players - 1
    if n1 == 0:
        return total
    acc = 0.0
    for tp in range(game.num_types):
        p_tp = game.prior.conditional(t, tp)
        if p_tp <= 0.0:
            continue
        for ap in range(game.num_actions):
            c = s.pair_conditional(ap, tp, a, t, game.prior)
            if c > 0.0:
                acc += p_tp * c * u[tp, t, ap]
    return total + n1 * acc


def mixed_profile_expected_utility(game: EclBayesianGame, sigma, a: int,
                                   t: int) -> float:
    """Expected utility of action ``a`` for type ``t`` against an anonymous
    independent mixed profile ``sigma[t', a']``."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    u = game.payoff
    total = float(u[t, t, a])
    n1 = game.players - 1
    for tp in range(game.num_types):
        total += n1 * game.prior.conditional(t, tp) * float(sigma[tp] @ u[tp, t, :])
    return total


# ---------------------------------------------------------------------------
# Bayesian bargaining games


@dataclass(frozen=True)
class EclBayesianBargainingGame:
    """Bargaining game over convex per-type action sets.

    ``action_sets[t]`` holds the utility vectors type ``t`` can produce in
    value space; ``value_index`` maps each type to its value coordinate
    (identity unless types have been split).  ``large_n=True`` switches to
    normalized per-other-player units: the own-production term drops and
    the ``n - 1`` factor is divided out, which is the scale the closed-form
    belief sweeps are stated in.
    """

    prior: TypePrior
    action_sets: tuple[FeasibleSet, ...]
    disagreement: np.ndarray
    large_n: bool = False
    value_index: tuple[int, ...] | None = None

    def __post_init__(self):
        sets = tuple(self.action_sets)
        m = self.prior.num_types
        if len(sets) != m:
            raise DimensionMismatchError("one action set per type is required")
        vi = self.value_index if self.value_index is not None else tuple(range(m))
        vi = tuple(int(v) for v in vi)
        if len(vi) != m:
            raise DimensionMismatchError("value_index must assign one coordinate per type")
        nv = max(vi) + 1
        for s in sets:
            if s.dim != nv:
                raise DimensionMismatchError(
                    f"action sets must live in value space of dimension {nv}")
        d = as_payoff_vector(self.disagreement, m)
        d.setflags(write=False)
        object.__setattr__(self, "action_sets", sets)
        object.__setattr__(self, "value_index", vi)
        object.__setattr__(self, "disagreement", d)

    @property
    def num_types(self) -> int:
        return self.prior.num_types

    @property
    def num_values(self) -> int:
        return max(self.value_index) + 1

    def contribution_coefficient(self, t: int, observer: int) -> float:
        """Weight on type ``t``'s production in ``observer``'s expected
        utility."""
        p = self.prior.conditional(observer, t)
        if self.large_n:
            return p
        return (self.prior.players - 1) * p + (1.0 if t == observer else 0.0)

    def expected_utilities(self, actions) -> np.ndarray:
        """Per-type expected utility vector of a pure strategy profile."""
        if len(actions) != self.num_types:
            raise DimensionMismatchError("one action per type is required")
        acts = [as_payoff_vector(a, self.num_values) for a in actions]
        out = np.zeros(self.num_types)
        for o in range(self.num_types):
            v = self.value_index[o]
            out[o] = sum(self.contribution_coefficient(t, o) * acts[t][v]
                         for t in range(self.num_types))
        return out

    def contribution_map(self, t: int) -> np.ndarray:
        """Matrix of the linear map from type ``t``'s action to its per-type
        expected-utility contribution."""
        mmat = np.zeros((self.num_types, self.num_values))
        for o in range(self.num_types):
            mmat[o, self.value_index[o]] = self.contribution_coefficient(t, o)
        return mmat

    @classmethod
    def with_nash_disagreement(cls, prior, action_sets, large_n=False,
                               value_index=None) -> "EclBayesianBargainingGame":
        game = cls(prior=prior, action_sets=tuple(action_sets),
                   disagreement=np.zeros(prior.num_types), large_n=large_n,
                   value_index=value_index)
        _, d = bayesian_nash(game)
        return cls(prior=prior, action_sets=tuple(action_sets), disagreement=d,
                   large_n=large_n, value_index=value_index)


def individual_feasible_set(game: EclBayesianBargainingGame, t: int) -> FeasibleSet:
    """Image of type ``t``'s action set under its contribution map."""
    mmat = game.contribution_map(t)
    if game.value_index == tuple(range(game.num_types)):
        # diagonal map: scale each coordinate by the matching coefficient
        diag = np.array([mmat[o, o] for o in range(game.num_types)])
        return scaled(game.action_sets[t], diag)
    return LinearImageSet(game.action_sets[t], mmat)


def induced_bargaining_game(game: EclBayesianBargainingGame) -> SeparableBargainingGame:
    """Complete-information bargaining game over the per-type feasible sets."""
    sets = tuple(individual_feasible_set(game, t) for t in range(game.num_types))
    return SeparableBargainingGame(sets, game.disagreement)


def bayesian_nash(game: EclBayesianBargainingGame):
    """Every type maximizes the utility it produces for its own values.

    Returns the per-type actions and the resulting expected-utility vector.
    """
    actions = []
    for t in range(game.num_types):
        e = np.zeros(game.num_values)
        e[game.value_index[t]] = 1.0
        _, y = game.action_sets[t].support(e)
        actions.append(y)
    return actions, game.expected_utilities(actions)


def dependency_certificate_point(game: EclBayesianBargainingGame, x, d=None,
                                 tol: float = 1e-6) -> bool:
    """Certify a feasible expected-utility point as a dependency equilibrium
    via the Pareto-improvement condition over the equilibrium point ``d``."""
    x = as_payoff_vector(x, game.num_types)
    if d is None:
        _, d = bayesian_nash(game)
    d = as_payoff_vector(d, game.num_types)
    resid = _feasibility_residual(game, x)
    scale = 1.0 + float(np.max(np.abs(x)))
    if resid > tol * scale:
        raise InfeasiblePointError(
            f"point is not attainable by any strategy profile (residual {resid:.2e})")
    return bool(np.all(x >= d - 1e-12))


def _feasibility_residual(game, x):
    params = [_action_param(s) for s in game.action_sets]
    pack = _ParamPack(params)

    def obj(v):
        eu = game.expected_utilities(pack.points(v))
        return float(np.sum((eu - x) ** 2))

    best = math.inf
    for v0 in pack.starts():
        res = minimize(obj, v0, method="SLSQP", bounds=pack.bounds,
                       constraints=pack.constraints(),
                       options={"maxiter": 300, "ftol": 1e-16})
        best = min(best, float(res.fun))
    return math.sqrt(max(best, 0.0))


# -- action-space NBS solver -------------------------------------------------


class _ParamPack:
    def __init__(self, params):
        self.params = params
        self.sizes = [p.size for p in params]
        self.offsets = np.cumsum([0] + self.sizes[:-1])
        self.bounds = [b for p in params for b in p.bounds]

    def points(self, v):
        return [p.point(v[o:o + s])
                for p, o, s in zip(self.params, self.offsets, self.sizes)]

    def constraints(self):
        cons = []
        for p, o in zip(self.params, self.offsets):
            for fn in p.constraints:
                cons.append({"type": "eq",
                             "fun": (lambda v, fn=fn, o=o, s=p.size: fn(v[o:o + s]))})
        return cons

    def starts(self):
        grids = [p.starts for p in self.params]
        count = max(len(g) for g in grids)
        out = []
        for i in range(count):
            out.append(np.concatenate([g[min(i, len(g) - 1)] for g in grids]))
        return out


class _PolytopeParam:
    def __init__(self, fs: PolytopeSet):
        self.g = fs.generators
        self.size = self.g.shape[0]
        self.bounds = [(0.0, 1.0)] * self.size
        self.constraints = [lambda v: float(np.sum(v) - 1.0)]
        k = self.size
        self.starts = [np.full(k, 1.0 / k)]

    def point(self, v):
        return self.g.T @ v


class _DiskParam:
    def __init__(self, fs: ParametricFrontierSet):
        self.a = fs.params["a"]
        self.b = fs.params["b"]
        self.size = 2  # (radius share, angle)
        self.bounds = [(0.0, 1.0), (0.0, math.pi / 2)]
        self.constraints = []
        self.starts = [np.array([1.0, math.pi / 4]),
                       np.array([1.0, math.pi / 8]),
                       np.array([1.0, 3 * math.pi / 8])]

    def point(self, v):
        u, th = v
        return np.array([self.a * u * math.cos(th), self.b * u * math.sin(th)])


class _ExpBudgetParam:
    def __init__(self, fs: ParametricFrontierSet):
        self.t1 = fs.params["theta1"]
        self.t2 = fs.params["theta2"]
        self.r = fs.params["budget"]
        self.size = 2  # (scale, budget share)
        self.bounds = [(0.0, 1.0), (0.0, 1.0)]
        self.constraints = []
        self.starts = [np.array([1.0, 0.5]), np.array([1.0, 0.9]),
                       np.array([1.0, 0.1])]

    def point(self, v):
        u, share = v
        x1 = self.t1 * math.log1p(share * (self.r - 2.0))
        x2 = self.t2 * math.log1p((1.0 - share) * (self.r - 2.0))
        return u * np.array([x1, x2])


class _GenericFrontierParam:
    def __init__(self, fs: ParametricFrontierSet):
        self.fs = fs
        self.size = 2
        self.bounds = [(0.0, 1.0), (1e-9, math.pi / 2 - 1e-9)]
        self.constraints = []
        self.starts = [np.array([1.0, math.pi / 4])]

    def point(self, v):
        u, th = v
        return u * self.fs.frontier_point(th)


class _HullUnionParam:
    def __init__(self, fs: HullUnionSet):
        self.parts = [_action_param(p) for p in fs.parts]
        self.k = len(self.parts)
        self.size = self.k + sum(p.size for p in self.parts)
        self.bounds = [(0.0, 1.0)] * self.k + [b for p in self.parts for b in p.bounds]
        self.constraints = [lambda v, k=self.k: float(np.sum(v[:k]) - 1.0)]
        inner = []
        ofs = self.k
        for p in self.parts:
            for fn in p.constraints:
                self.constraints.append(
                    lambda v, fn=fn, o=ofs, s=p.size: fn(v[o:o + s]))
            ofs += p.size
        weights = np.full(self.k, 1.0 / self.k)
        self.starts = [np.concatenate([weights] + [p.starts[0] for p in self.parts])]

    def point(self, v):
        lam = v[:self.k]
        out = None
        ofs = self.k
        for w, p in zip(lam, self.parts):
            q = p.point(v[ofs:ofs + p.size])
            out = w * q if out is None else out + w * q
            ofs += p.size
        return out


class _LinearImageParam:
    def __init__(self, fs: LinearImageSet):
        self.base = _action_param(fs.base)
        self.m = fs.matrix
        self.size = self.base.size
        self.bounds = self.base.bounds
        self.constraints = self.base.constraints
        self.starts = self.base.starts

    def point(self, v):
        return self.m @ self.base.point(v)


def _action_param(fs: FeasibleSet):
    if isinstance(fs, PolytopeSet):
        return _PolytopeParam(fs)
    if isinstance(fs, ParametricFrontierSet):
        if fs.kind == "disk-quadratic":
            return _DiskParam(fs)
        if fs.kind == "log-exponential":
            return _ExpBudgetParam(fs)
        return _GenericFrontierParam(fs)
    if isinstance(fs, HullUnionSet):
        return _HullUnionParam(fs)
    if isinstance(fs, LinearImageSet):
        return _LinearImageParam(fs)
    raise NotImplementedError(f"no action parametrization for {type(fs).__name__}")


def nbs_solution(game: EclBayesianBargainingGame,
                 weights: SolutionWeights | None = None) -> SolutionReport:
    """Weighted NBS of a Bayesian bargaining game, solved in action space.

    The prior-probability weighting is the default.  The report's meta
    carries the per-type actions and individual contribution points.
    """
    m = game.num_types
    w = weights if weights is not None else SolutionWeights.of(game.prior.marginal)
    wv = as_payoff_vector(w.values, m)
    d = game.disagreement
    params = [_action_param(s) for s in game.action_sets]
    pack = _ParamPack(params)

    def eus(v):
        return game.expected_utilities(pack.points(v))

    # max-min gain start and improvability screen
    def neg_min_gain(v):
        return -float(np.min(eus(v) - d))

    best_start, best_gain = None, -math.inf
    for v0 in pack.starts():
        res = minimize(neg_min_gain, v0, method="SLSQP", bounds=pack.bounds,
                       constraints=pack.constraints(),
                       options={"maxiter": 300, "ftol": 1e-14})
        if -res.fun > best_gain:
            best_gain, best_start = -float(res.fun), res.x
    active = wv > 0
    if best_gain <= 1e-9:
        active = active & _improvable_mask(game, pack, d)
        if not active.any():
            return SolutionReport(point=d.copy(), objective=0.0,
                                  gains=np.zeros(m), iterations=0,
                                  converged=True, meta={"degenerate": True})

    idx = np.flatnonzero(active)

    def neg_obj(v):
        g = eus(v) - d
        return -float(np.sum(wv[idx] * np.log(np.maximum(g[idx], 1e-12))))

    cons = pack.constraints()
    cons.append({"type": "ineq", "fun": lambda v: eus(v) - d})
    best = None
    for v0 in [best_start] + pack.starts():
        res = minimize(neg_obj, v0, method="SLSQP", bounds=pack.bounds,
                       constraints=cons,
                       options={"maxiter": 500, "ftol": 1e-14})
        if res.success and (best is None or res.fun < best.fun):
            best = res
    if best is None:
        raise RuntimeError("action-space NBS solve failed")
    actions = pack.points(best.x)
    point = game.expected_utilities(actions)
    gains = point - d
    individual = [game.contribution_map(t) @ actions[t] for t in range(m)]
    return SolutionReport(point=point,
                          objective=float(np.sum(wv[idx] * np.log(np.maximum(gains[idx], 1e-300)))),
                          gains=gains, iterations=int(best.nit), converged=True,
                          meta={"actions": actions, "individual_points": individual,
                                "weights": wv})


def _improvable_mask(game, pack, d):
    m = game.num_types
    mask = np.zeros(m, dtype=bool)
    for o in range(m):
        def neg_coord(v, o=o):
            return -(game.expected_utilities(pack.points(v))[o] - d[o])

        cons = pack.constraints()
        cons.append({"type": "ineq",
                     "fun": lambda v: game.expected_utilities(pack.points(v)) - d})
        res = minimize(neg_coord, pack.starts()[0], method="SLSQP",
                       bounds=pack.bounds, constraints=cons,
                       options={"maxiter": 200, "ftol": 1e-14})
        mask[o] = -res.fun > 1e-9
    return mask


def split_type(game: EclBayesianBargainingGame, t: int, nu: float
               ) -> EclBayesianBargainingGame:
    """Split type ``t`` into two subtypes with prior mass ``nu*p(t)`` and
    ``(1-nu)*p(t)``.

    Both subtypes inherit the action set, the value coordinate, and all
    payoff interactions of the parent; conditionals are rescaled so that the
    pairwise structure stays exchangeable.  The new subtype is appended as
    the last type index.
    """
    prior = game.prior.split(t, nu)
    sets = game.action_sets + (game.action_sets[t],)
    vi = game.value_index + (game.value_index[t],)
    d = np.concatenate([game.disagreement, [game.disagreement[t]]])
    return EclBayesianBargainingGame(prior=prior, action_sets=sets,
                                     disagreement=d, large_n=game.large_n,
                                     value_index=vi)


def subtype_reduction(joint, players: int, t: int | None = None):
    """Collapse a subtype-aware pair prior to a plain reweighted type prior.

    ``joint[t, w, t', w']`` is the symmetric distribution of two distinct
    players' (type, subtype) pairs, with subtype index 0 for the
    evidentially cooperating kind.  Returns ``(prior, delta)`` where
    ``prior`` is the reduced anonymous prior over types and ``delta`` the
    per-type scale with ``p(t', C | t, C) = p'(t'|t) * delta[t]``.  Pass
    ``t`` to get the scale of a single type.
    """
    P = np.asarray(joint, dtype=float)
    if P.ndim != 4 or P.shape[1] != 2 or P.shape[3] != 2 or P.shape[0] != P.shape[2]:
        raise DimensionMismatchError("joint must have shape (m, 2, m, 2)")
    if np.any(P < 0) or abs(float(P.sum()) - 1.0) > 1e-9:
        raise ValueError("joint must be a distribution")
    flat = P.reshape(P.shape[0] * 2, P.shape[2] * 2)
    if np.max(np.abs(flat - flat.T)) > 1e-9:
        raise ValueError("joint must be symmetric between the two players")
    cc = P[:, 0, :, 0]
    delta = float(cc.sum())
    if delta <= _PROB_TOL:
        raise ZeroProbabilityActionError("no mass on cooperating subtype pairs")
    pair = cc / delta
    marginal = pair.sum(axis=1)
    cond = pair / marginal[:, None]
    prior = TypePrior.from_pairwise(marginal, cond, players)
    p_tc = P.sum(axis=(2, 3))[:, 0]  # p(t, C) for one player
    scale = marginal * delta / p_tc
    if t is not None:
        return prior, float(scale[t])
    return prior, scale
