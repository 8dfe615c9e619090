"""Exact analysis of finite discrete-time Markov reward chains.

The package couples a validated chain core (`chain`, `modelfile`) with an
exact rational analysis engine (`analysis`), a seeded Monte Carlo oracle
(`simulate`), discrete information measures (`info`), and two fully
worked protocol case studies (`zeroconf`, `crowds`). The `cli` module
exposes everything on the command line.
"""

from .analysis import (
    Distribution,
    EdgeDistribution,
    INFINITY,
    certify_ae_until,
    conditional_probability,
    entry_edge_distribution,
    expected_cost_until,
    expected_hitting_time,
    first_entry_distribution,
    reachable,
    until_prob_is_zero,
    until_probabilities,
    until_probability,
)
from .chain import (
    EXACT,
    FLOAT,
    MarkovChain,
    RewardChain,
    format_scalar,
    parse_scalar,
    validate_chain,
    validate_reward,
)
from .info import entropy, mutual_information
from .modelfile import load_model, loads_model, model_to_dict, save_model
from .simulate import (
    Estimate,
    JointCounts,
    PathRng,
    PathSample,
    SimConfig,
    estimate_cost,
    estimate_joint_first_last,
    estimate_until,
    sample_path,
)

__version__ = "0.1.0"

__all__ = [
    "Distribution",
    "EdgeDistribution",
    "EXACT",
    "Estimate",
    "FLOAT",
    "INFINITY",
    "JointCounts",
    "MarkovChain",
    "PathRng",
    "PathSample",
    "RewardChain",
    "SimConfig",
    "certify_ae_until",
    "conditional_probability",
    "entropy",
    "entry_edge_distribution",
    "estimate_cost",
    "estimate_joint_first_last",
    "estimate_until",
    "expected_cost_until",
    "expected_hitting_time",
    "first_entry_distribution",
    "format_scalar",
    "load_model",
    "loads_model",
    "model_to_dict",
    "mutual_information",
    "parse_scalar",
    "reachable",
    "sample_path",
    "save_model",
    "until_prob_is_zero",
    "until_probabilities",
    "until_probability",
    "validate_chain",
    "validate_reward",
]
