"""Volume-optimal content distributions for a consumer/media-source pair.

The library finds the distribution at which potential participation meets
served volume (the crossing), classifies the equilibrium outcome of the
best extension beyond it, and synthesizes compensating carveouts when the
two sides disagree.
"""
from .core import (
    Distribution,
    DistributionError,
    EmptyDistributionError,
    Point,
    PointIncrement,
    ProducerTransform,
    SubdistributionError,
    apply_increment,
    combine,
    expected_t,
    q_of,
    remove_subdistribution,
)
from .participation import (
    KappaPair,
    ParticipationModel,
    actual,
    kappa,
    potential,
)
from .valuation import (
    Regime,
    ValueDelta,
    delta_s,
    delta_v,
    s_value,
    upsilon,
    v_value,
    xi,
)
from .sequence import (
    ProbeResult,
    SequenceConfig,
    SequenceStep,
    SequenceTrace,
    best_increment,
    best_next_in_sequence,
    greedy_sweep,
    is_viable,
    order_prefers,
)
from .thresholds import (
    EquilibriumVerdict,
    ExtensionContext,
    ThresholdReport,
    classify,
    f_bounds,
    gain_exclusion_holds,
    m_ratio_and_rvv,
    tau_tp1,
    threshold_report,
    viability_limit_m_ratio,
    x_c_kappa,
    x_l_kappa,
    x_u_kappa,
)
from .optimizer import (
    CarveoutInfeasibleError,
    CarveoutResult,
    OptimizationResult,
    OptimizerConfig,
    continue_to_d2_star,
    determine_d_star,
    generate_carveout,
)
from .oracle import (
    BruteForceResult,
    FoundInstance,
    OracleReport,
    brute_force_w_max,
    crosscheck_thresholds,
    find_scenario_instance,
    finite_difference_facts,
)

__version__ = "0.1.0"

__all__ = [
    "Distribution",
    "DistributionError",
    "EmptyDistributionError",
    "Point",
    "PointIncrement",
    "ProducerTransform",
    "SubdistributionError",
    "apply_increment",
    "combine",
    "expected_t",
    "q_of",
    "remove_subdistribution",
    "KappaPair",
    "ParticipationModel",
    "actual",
    "kappa",
    "potential",
    "Regime",
    "ValueDelta",
    "delta_s",
    "delta_v",
    "s_value",
    "upsilon",
    "v_value",
    "xi",
    "ProbeResult",
    "SequenceConfig",
    "SequenceStep",
    "SequenceTrace",
    "best_increment",
    "best_next_in_sequence",
    "greedy_sweep",
    "is_viable",
    "order_prefers",
    "EquilibriumVerdict",
    "ExtensionContext",
    "ThresholdReport",
    "classify",
    "f_bounds",
    "gain_exclusion_holds",
    "m_ratio_and_rvv",
    "tau_tp1",
    "threshold_report",
    "viability_limit_m_ratio",
    "x_c_kappa",
    "x_l_kappa",
    "x_u_kappa",
    "CarveoutInfeasibleError",
    "CarveoutResult",
    "OptimizationResult",
    "OptimizerConfig",
    "continue_to_d2_star",
    "determine_d_star",
    "generate_carveout",
    "BruteForceResult",
    "FoundInstance",
    "OracleReport",
    "brute_force_w_max",
    "crosscheck_thresholds",
    "find_scenario_instance",
    "finite_difference_facts",
    "__version__",
]
