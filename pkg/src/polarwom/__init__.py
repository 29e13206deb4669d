"""Polar codes for write-once memory with a noisy read channel."""

from .channels import (
    ReadChannel,
    WomSourceModel,
    leaf_priors_from_observation,
    leaf_priors_from_state,
    less_noisy_condition,
    mutual_info_xs,
    mutual_info_xy,
    sample_source_block,
    transmit,
)
from .codec import EncodeResult, apply_write, decode, decode_batch, encode, encode_batch, freeze_bits
from .config import ConfigError, ExperimentConfig, construct, load_config
from .construction import (
    EntropyProfile,
    IndexPartition,
    SideInfo,
    build_partition,
    containment_report,
    estimate_profile,
    exact_profile,
    select_thresholds,
)
from .harness import ExperimentReport, TrialResult, run_experiment, run_trial, run_trials
from .polar import (
    ContradictionError,
    InvalidInputError,
    ProbPair,
    polar_transform,
    sc_check_combine,
    sc_posterior,
    sc_var_combine,
)

__version__ = "0.1.0"
