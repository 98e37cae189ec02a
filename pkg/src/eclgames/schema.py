"""JSON document schema for games and solver reports.

A game document carries a ``kind``, a ``payload`` describing the game, and
optional ``solver`` options.  Four kinds are supported:

* ``separable-normal-form`` -- per-player contribution vectors,
* ``normal-form`` -- a general payoff tensor (threat-game examples need
  games whose payoffs do not decompose),
* ``bayesian-ecl`` -- finite-action Bayesian game with a type prior,
* ``bayesian-bargaining`` -- convex per-type action sets with a prior.

Feasible-set descriptors: ``polytope`` (generators), ``disk`` (semi-axes),
``exp-budget`` (log returns; ``axis_caps`` adds the zero-cost axis
endpoints), and ``linear-quadratic`` (linear returns on the first axis,
square-root returns on the second).
"""

from __future__ import annotations

import json

import jsonschema
import numpy as np

from .bayesian import EclBayesianBargainingGame, EclBayesianGame, TypePrior
from .games import NormalFormGame, NormalFormSeparableGame
from .geometry import HullUnionSet, ParametricFrontierSet, PolytopeSet

__all__ = [
    "GAME_DOCUMENT_SCHEMA",
    "SOLVE_REPORT_SCHEMA",
    "SchemaError",
    "load_document",
    "build_game",
    "build_prior",
    "build_feasible_set",
    "validate_report",
]


class SchemaError(ValueError):
    """A document failed schema validation."""


_PRIOR_SCHEMA = {
    "type": "object",
    "oneOf": [
        {
            "properties": {
                "mode": {"const": "pairwise"},
                "marginal": {"type": "array", "items": {"type": "number"}},
                "conditional": {"type": "array",
                                "items": {"type": "array",
                                          "items": {"type": "number"}}},
            },
            "required": ["mode", "marginal", "conditional"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "mode": {"const": "full"},
                "table": {"type": "array"},
            },
            "required": ["mode", "table"],
            "additionalProperties": False,
        },
    ],
}

_SET_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["polytope", "disk", "exp-budget", "linear-quadratic"]},
        "generators": {"type": "array"},
        "semi_axes": {"type": "array", "items": {"type": "number"},
                      "minItems": 2, "maxItems": 2},
        "thetas": {"type": "array", "items": {"type": "number"},
                   "minItems": 2, "maxItems": 2},
        "budget": {"type": "number"},
        "axis_caps": {"type": "boolean"},
    },
    "required": ["kind"],
}

_SOLVER_SCHEMA = {
    "type": "object",
    "properties": {
        "solution": {"enum": ["nbs", "ksbs", "armstrong"]},
        "weights": {"oneOf": [{"enum": ["uniform", "prior"]},
                              {"type": "array", "items": {"type": "number"}}]},
        "disagreement": {"oneOf": [{"enum": ["nash", "threat", "stable"]},
                                   {"type": "array", "items": {"type": "number"}}]},
        "tolerances": {"type": "object"},
    },
    "additionalProperties": False,
}

GAME_DOCUMENT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema_version": {"const": 1},
        "kind": {"enum": ["separable-normal-form", "normal-form",
                          "bayesian-ecl", "bayesian-bargaining"]},
        "payload": {"type": "object"},
        "solver": _SOLVER_SCHEMA,
    },
    "required": ["schema_version", "kind", "payload"],
    "additionalProperties": False,
}

_PAYLOAD_SCHEMAS = {
    "separable-normal-form": {
        "type": "object",
        "properties": {
            "players": {"type": "integer", "minimum": 1},
            "contributions": {"type": "array", "minItems": 1,
                              "items": {"type": "array", "minItems": 1}},
        },
        "required": ["players", "contributions"],
        "additionalProperties": False,
    },
    "normal-form": {
        "type": "object",
        "properties": {
            "players": {"type": "integer", "minimum": 1},
            "payoffs": {"type": "array"},
        },
        "required": ["players", "payoffs"],
        "additionalProperties": False,
    },
    "bayesian-ecl": {
        "type": "object",
        "properties": {
            "players": {"type": "integer", "minimum": 1},
            "types": {"type": "integer", "minimum": 1},
            "actions": {"type": "integer", "minimum": 1},
            "payoff": {"type": "array"},
            "prior": _PRIOR_SCHEMA,
        },
        "required": ["players", "types", "actions", "payoff", "prior"],
        "additionalProperties": False,
    },
    "bayesian-bargaining": {
        "type": "object",
        "properties": {
            "players": {"type": "integer", "minimum": 1},
            "types": {"type": "integer", "minimum": 1},
            "large_n": {"type": "boolean"},
            "action_sets": {"type": "array", "items": _SET_SCHEMA, "minItems": 1},
            "prior": _PRIOR_SCHEMA,
            "disagreement": {"oneOf": [{"const": "nash"},
                                       {"type": "array",
                                        "items": {"type": "number"}}]},
        },
        "required": ["types", "action_sets", "prior", "disagreement"],
        "additionalProperties": False,
    },
}

SOLVE_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema_version": {"const": 1},
        "kind": {"type": "string"},
        "disagreement": {"type": "array", "items": {"type": "number"}},
        "disagreement_convention": {"type": "string"},
        "solutions": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "point": {"type": "array", "items": {"type": "number"}},
                    "objective": {"type": "number"},
                    "gains": {"type": "array", "items": {"type": "number"}},
                    "iterations": {"type": "integer"},
                    "converged": {"type": "boolean"},
                },
                "required": ["point", "gains", "converged"],
            },
        },
        "dependency_equilibrium": {"type": ["object", "null"]},
        "core": {"type": ["object", "null"]},
    },
    "required": ["schema_version", "kind", "disagreement", "solutions"],
    "additionalProperties": False,
}


def load_document(source) -> dict:
    """Parse and schema-validate a game document (path, file, or dict)."""
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    try:
        jsonschema.validate(doc, GAME_DOCUMENT_SCHEMA)
        jsonschema.validate(doc["payload"], _PAYLOAD_SCHEMAS[doc["kind"]])
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"invalid game document: {exc.message}") from exc
    return doc


def build_prior(obj, players: int) -> TypePrior:
    if obj["mode"] == "pairwise":
        return TypePrior.from_pairwise(obj["marginal"], obj["conditional"], players)
    return TypePrior.from_joint(obj["table"])


def build_feasible_set(desc):
    kind = desc["kind"]
    if kind == "polytope":
        return PolytopeSet(desc["generators"])
    if kind == "disk":
        a, b = desc["semi_axes"]
        return ParametricFrontierSet.disk(a, b)
    if kind == "linear-quadratic":
        return ParametricFrontierSet.linear_quadratic(desc["budget"])
    if kind == "exp-budget":
        t1, t2 = desc["thetas"]
        r = desc["budget"]
        curve = ParametricFrontierSet.exp_budget(t1, t2, r)
        if not desc.get("axis_caps", False):
            return curve
        caps = [PolytopeSet([[0.0, 0.0], [t1 * np.log(r), 0.0]]),
                PolytopeSet([[0.0, 0.0], [0.0, t2 * np.log(r)]])]
        return HullUnionSet([curve] + caps)
    raise SchemaError(f"unknown set kind {kind!r}")


def build_game(doc: dict):
    """Instantiate the library object described by a validated document."""
    kind = doc["kind"]
    payload = doc["payload"]
    try:
        if kind == "separable-normal-form":
            return NormalFormSeparableGame(tuple(payload["contributions"]))
        if kind == "normal-form":
            return NormalFormGame(np.asarray(payload["payoffs"], dtype=float))
        if kind == "bayesian-ecl":
            prior = build_prior(payload["prior"], payload["players"])
            return EclBayesianGame(players=payload["players"],
                                   payoff=np.asarray(payload["payoff"], float),
                                   prior=prior)
        if kind == "bayesian-bargaining":
            players = payload.get("players", 2)
            prior = build_prior(payload["prior"], players)
            sets = tuple(build_feasible_set(s) for s in payload["action_sets"])
            large_n = bool(payload.get("large_n", False))
            d = payload["disagreement"]
            if d == "nash":
                return EclBayesianBargainingGame.with_nash_disagreement(
                    prior, sets, large_n=large_n)
            return EclBayesianBargainingGame(prior=prior, action_sets=sets,
                                             disagreement=np.asarray(d, float),
                                             large_n=large_n)
    except (ValueError, KeyError) as exc:
        raise SchemaError(f"invalid {kind} payload: {exc}") from exc
    raise SchemaError(f"unknown game kind {kind!r}")


def validate_report(report: dict) -> dict:
    """Validate a solve report against its schema; returns the report."""
    try:
        jsonschema.validate(report, SOLVE_REPORT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"invalid solve report: {exc.message}") from exc
    return report
