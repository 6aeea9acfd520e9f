from .data import CountSample, Dataset, DrawnSample, InsufficientData, SignStack, sample, unlabeled_sample
from .hypotheses import (
    Aggregate,
    ConstantMinus,
    ConstantPlus,
    Draws,
    FiniteLabeling,
    Hypothesis,
    LabelingStack,
    PairTable,
    Threshold,
    ThresholdStack,
    is_proper,
)
from .metrics import (
    classification_distance,
    distance_matrix,
    empirical_distance,
    empirical_error,
    excess_error,
    opt_error,
    true_error,
)
from .randomness import SharedRandomness
from .tasks import (
    FiniteDomain,
    FiniteLabeledDistribution,
    IntervalDomain,
    PiecewiseLinearCDF,
    ThresholdTask,
    finite_task,
)

__all__ = [
    "Aggregate", "ConstantMinus", "ConstantPlus", "CountSample", "Dataset", "Draws", "DrawnSample",
    "FiniteDomain", "FiniteLabeledDistribution", "FiniteLabeling", "Hypothesis", "InsufficientData",
    "IntervalDomain", "LabelingStack", "PairTable", "PiecewiseLinearCDF", "SharedRandomness", "SignStack",
    "Threshold", "ThresholdStack", "ThresholdTask", "classification_distance", "distance_matrix",
    "empirical_distance", "empirical_error", "excess_error", "finite_task", "is_proper", "opt_error",
    "sample", "true_error", "unlabeled_sample",
]
