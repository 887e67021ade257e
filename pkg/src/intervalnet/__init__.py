"""Neural-network prediction intervals.

Trains interval predictors with an expanded-interval loss (direct
minibatch-percentile width minimization) and four baselines -- fixed
bounds, two-network maximum likelihood, bootstrap ensemble, and quantile
regression with grid search -- then calibrates interval scale on a holdout
split and benchmarks coverage (PICP) against width (MPIW).
"""

from .backend import backend_name
from .errors import (
    ConfigError,
    DataError,
    DegenerateIntervalError,
    DivergenceError,
    IntervalNetError,
    UsageError,
)
from .losses import (
    EimConfig,
    eim_k_factors,
    eim_loss,
    ensemble_noise_loss,
    mle_variance_loss,
    mse_loss,
    pinball_loss,
    pretrain_loss,
)
from .metrics import (
    Interval,
    IntervalBatch,
    calibrate_k,
    mpiw,
    picp,
    scale_intervals,
)
from .nn import DenseLayer, Network, Optimizer, load_network, save_network
from .stats import inverse_normal_cdf, normal_cdf, two_sided_z

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateIntervalError",
    "DenseLayer",
    "DivergenceError",
    "EimConfig",
    "Interval",
    "IntervalBatch",
    "IntervalNetError",
    "Network",
    "Optimizer",
    "UsageError",
    "backend_name",
    "calibrate_k",
    "eim_k_factors",
    "eim_loss",
    "ensemble_noise_loss",
    "inverse_normal_cdf",
    "load_network",
    "mle_variance_loss",
    "mpiw",
    "mse_loss",
    "normal_cdf",
    "picp",
    "pinball_loss",
    "pretrain_loss",
    "save_network",
    "scale_intervals",
    "two_sided_z",
    "__version__",
]
