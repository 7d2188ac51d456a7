"""Capacity bounds, rate regions and random-coding simulation for two-user
finite-state multiple-access channels with noisy state information."""

__version__ = "0.1.0"

from .channel import (
    Alphabets,
    BinaryMultiplierSpec,
    FsMacChannel,
    ModuloAdditiveSpec,
    NoisyReceiverModel,
    build_binary_multiplier,
    build_modulo_additive,
    bundled_path,
    equivalent_channel,
    load_channel,
    save_channel,
    validate_channel,
)
from .information import (
    CooperativePolicy,
    ConditionedInputPolicy,
    JointDistribution,
    RateTriple,
    TeamPolicy,
    conditional_mutual_information,
    conditioned_input_rate_triple,
    cooperative_rate_pair,
    entropy,
    joint_distribution,
    rate_triple,
    strategy_channel,
)
from .optimize import (
    OptimizationResult,
    OptimizerConfig,
    exhaustive_oracle,
    h_min_bruteforce,
    maximize_cooperative,
    maximize_sum_rate,
    maximize_weighted_rate,
    uniform_coset_policy,
)
from .regions import (
    RateRegion,
    ScenarioDescriptor,
    convex_hull_2d,
    inner_bound_region,
    outer_sum_rate,
    verify_auxiliary_equivalence,
    verify_binary_multiplier,
    verify_modulo_example,
)
from .simulate import SimulationParams, estimate_error, generate_codebooks, joint_typicality_decode
from .strategies import ShannonStrategy, StrategySpace, apply, enumerate_strategies, strategy_count
