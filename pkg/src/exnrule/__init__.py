"""kNN ensemble with the extended neighbourhood rule, kNN baselines and a benchmark runner."""

__version__ = "0.1.0"

from .dataset import BaseLearnerSample, Dataset, load_csv, train_test_split, write_csv  # noqa: E402
from .distance import DistanceMetric, minkowski, nearest_in_pool  # noqa: E402
from .ensemble import (  # noqa: E402
    ChainResult,
    ExNRuleConfig,
    ExNRuleModel,
    Prediction,
    base_predict,
    extended_chain,
    fit,
    predict,
    predict_batch,
)
from .rng import RngStream  # noqa: E402
