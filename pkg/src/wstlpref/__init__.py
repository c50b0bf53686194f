"""Preference learning over weighted signal temporal logic.

Multi-channel signals are scored against weighted temporal-logic rules;
weights are learned from pairwise human preferences so that preferred
behaviors receive strictly larger weighted robustness.  Because weights
stay positive, rule-violating behavior can never outrank rule-satisfying
behavior, whatever is learned.
"""

from .baselines import (
    BTModel,
    Split,
    accuracy,
    bt_fit,
    bt_nll,
    bt_predict,
    feature_vector,
    make_splits,
    preferences_from_valuation,
    safety_eval,
    wstl_predictor,
)
from .formula import (
    UNBOUNDED,
    Always,
    And,
    Eventually,
    Formula,
    Interval,
    Not,
    Or,
    Pred,
    TrueNode,
    Until,
    WeightSlot,
    WeightValuation,
    has_unbounded,
    levels,
    parameter_slots,
    root_weight_slots,
    to_text,
    weight_slots,
)
from .learn import (
    LearnConfig,
    LearnResult,
    PreferenceDataset,
    count_satisfied,
    gradient_solve,
    load_result,
    normalize_to_domain,
    predict,
    random_sampling_solve,
    save_result,
    surrogate_loss,
)
from .parser import ParseError, parse
from .scenarios import (
    PairSet,
    PedestrianParams,
    PedestrianSpec,
    StopParams,
    StopSignSpec,
    build_pairs,
    generate_dataset,
    generate_trajectory,
    load_pairs,
    load_preferences,
    pedestrian_formula,
    pedestrian_trajectory,
    save_pairs,
    save_preferences,
    scenario_formula,
    stop_sign_formula,
    stop_trajectory,
)
from .semantics import (
    SoftConfig,
    TruncationError,
    debug_report,
    grad_weights,
    rho,
    soft_max,
    soft_min,
    soft_operand_gap,
    soft_wstl_robustness,
    wstl_robustness,
    wstl_robustness_batch,
)
from .signals import (
    Channel,
    PredicateFn,
    Signal,
    SignalError,
    append_indicator_channel,
    boolean_channel,
    euclidean_distance,
    load_signals,
    save_signals,
)

__version__ = "0.1.0"
