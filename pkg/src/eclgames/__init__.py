"""Game-theoretic tools for evidential cooperation in large worlds:
feasible-set geometry, bargaining solutions, Bayesian games over type
priors, dependency-equilibrium certificates, threat points, and
coalitional cores."""

from .geometry import (
    FeasibleSet,
    HullUnionSet,
    LinearImageSet,
    MinkowskiSumSet,
    ParametricFrontierSet,
    PolytopeSet,
    as_payoff_vector,
    contains,
    is_pareto_optimal,
    minkowski_sum,
    normal_weights_at,
    pareto_frontier_sample,
    support,
)
from .solutions import (
    SolutionReport,
    SolutionWeights,
    armstrong_solution,
    decompose,
    ksbs,
    max_min_gain,
    nbs,
    variance_normalized_compromise,
    weights_from_point,
)
from .games import (
    NormalFormGame,
    NormalFormSeparableGame,
    SeparableBargainingGame,
    from_normal_form,
    joint_feasible_set,
    nash_equilibrium,
    pure_nash_equilibria,
)
from .bayesian import (
    EclBayesianBargainingGame,
    EclBayesianGame,
    JointStrategyDistribution,
    TypePrior,
    bayesian_nash,
    bne_pure,
    conditional,
    conditional_expected_utility,
    dependency_certificate_point,
    dependency_certificate_pure,
    expected_utility_pure,
    individual_feasible_set,
    induced_bargaining_game,
    mixed_profile_expected_utility,
    nbs_solution,
    split_type,
    subtype_reduction,
)
from .stability import (
    BalancedCombinationResult,
    Coalition,
    CoalitionFunction,
    ThreatPointResult,
    WorstCasePayoffMatrix,
    balanced_combination,
    core_membership,
    effective_set_membership,
    find_core_point,
    nash_payoff_matrix,
    stable_disagreement,
    threat_point,
    worst_case_matrix,
)
from .sweeps import SweepRow, SweepSpec, run_sweep, write_csv

__version__ = "0.1.0"
