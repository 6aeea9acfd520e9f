"""Replicable learning transforms with a paired-trial experiment harness."""

from .base import Learner
from .constants import CONSTANTS, Constants
from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .learners import ConstantLearner, ERMFinite, ERMThreshold, sample_need_agnostic
from .pointwise import BasicPointwise, BoostPointwiseError, pointwise_learner
from .selection import HypothesisSelection, correlated_sample, hypothesis_selection
from .approximate import BoostErrorApprox, BoostReplicability, build_approx_learner, replicable_stable_tester
from .thresholds import RealizableApproxRepl, ThresholdLearner
from .semirepl import SemiReplicableLearner
from .reductions import apx_repl_hardness_amplification, bias_estimator_pointwise, sign_one_way_from_learner
from .harness import PairedTrialConfig, ReplicabilityReport, run_grid, run_paired, wilson_interval

__version__ = "0.1.0"

__all__ = list(_core_all) + [
    "CONSTANTS",
    "Constants",
    "Learner",
    "ConstantLearner",
    "ERMFinite",
    "ERMThreshold",
    "sample_need_agnostic",
    "BasicPointwise",
    "BoostPointwiseError",
    "pointwise_learner",
    "HypothesisSelection",
    "correlated_sample",
    "hypothesis_selection",
    "BoostErrorApprox",
    "BoostReplicability",
    "build_approx_learner",
    "replicable_stable_tester",
    "RealizableApproxRepl",
    "ThresholdLearner",
    "SemiReplicableLearner",
    "apx_repl_hardness_amplification",
    "bias_estimator_pointwise",
    "sign_one_way_from_learner",
    "PairedTrialConfig",
    "ReplicabilityReport",
    "run_grid",
    "run_paired",
    "wilson_interval",
]
