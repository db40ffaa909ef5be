"""Pair-efficiency vs Pareto-efficiency toolkit for object reallocation
on single-peaked and single-dipped preference domains."""

from .construct import (
    CounterexampleBundle,
    build_sd_counterexample,
    build_sp_counterexample,
    complete_sp,
)
from .core import (
    Allocation,
    BudgetError,
    Instance,
    LinearOrder,
    ParseError,
    Preference,
    Profile,
    ReallotError,
    enumerate_allocations,
)
from .domains import (
    DomainSpec,
    ViolationWitness,
    enumerate_all_preferences,
    enumerate_single_dipped,
    enumerate_single_peaked,
    is_single_dipped,
    is_single_peaked,
    sample_profile,
    single_dipped_violation,
    single_peaked_violation,
)
from .efficiency import (
    EnvyGraph,
    ImprovingCycle,
    apply_cycle,
    brute_force_dominator,
    count_efficient,
    find_blocking_pair,
    find_improving_cycle,
    pareto_dominates,
)
from .equivalence import (
    EquivalenceReport,
    ImprovementWitness,
    Scope,
    Violation,
    build_witness,
    extract_blocking_pair_sd,
    extract_blocking_pair_sp,
    find_gap_witness,
    validate_extraction_claims,
    verify_equivalence,
)
from .rules import (
    CorollaryReport,
    Manipulation,
    Rule,
    StrategyProofnessReport,
    TTC,
    check_corollary_sd,
    is_individually_rational,
    serial_dictatorship,
    check_strategy_proofness,
    ttc,
    worst_house_dictatorship,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BudgetError",
    "CorollaryReport",
    "CounterexampleBundle",
    "DomainSpec",
    "EnvyGraph",
    "EquivalenceReport",
    "ImprovementWitness",
    "ImprovingCycle",
    "Instance",
    "LinearOrder",
    "Manipulation",
    "ParseError",
    "Preference",
    "Profile",
    "ReallotError",
    "Rule",
    "Scope",
    "StrategyProofnessReport",
    "TTC",
    "Violation",
    "ViolationWitness",
    "apply_cycle",
    "brute_force_dominator",
    "build_sd_counterexample",
    "build_sp_counterexample",
    "build_witness",
    "check_corollary_sd",
    "complete_sp",
    "count_efficient",
    "enumerate_all_preferences",
    "enumerate_allocations",
    "enumerate_single_dipped",
    "enumerate_single_peaked",
    "extract_blocking_pair_sd",
    "extract_blocking_pair_sp",
    "find_blocking_pair",
    "find_gap_witness",
    "find_improving_cycle",
    "is_individually_rational",
    "is_single_dipped",
    "is_single_peaked",
    "pareto_dominates",
    "sample_profile",
    "serial_dictatorship",
    "single_dipped_violation",
    "single_peaked_violation",
    "check_strategy_proofness",
    "ttc",
    "validate_extraction_claims",
    "verify_equivalence",
    "worst_house_dictatorship",
]
