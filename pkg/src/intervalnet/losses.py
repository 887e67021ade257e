"""Training losses.

Every function returns ``(loss, grad)`` where ``loss`` sums over the batch
and ``grad`` is dLoss/dOutputs with the same shape as ``outputs``. Interval
losses take (n, 2) outputs with column 0 the lower and column 1 the upper
bound; crossed bounds (upper < lower) are legal during training, widths and
expansion factors use absolute values throughout.

Variance-predicting networks emit log-variance; the losses exponentiate
internally and chain the gradient, which keeps variance positive without
constrained optimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels as K
from .errors import ConfigError, DegenerateIntervalError, DivergenceError

#: widths below this are degenerate (division by ~0 in expansion factors)
EPS_WIDTH = 1e-12
#: floor for squared noise residuals fed to the noise likelihood
EPS_RESIDUAL = 1e-8


@dataclass(frozen=True)
class EimConfig:
    """Window configuration for the expanded-interval loss.

    target: coverage fraction in (0, 1).
    delta: window half-width in percentile points around target*100.
    use_window: False selects the single nearest-rank percentile factor
        instead of the window mean (ablation switch).
    detach_k: stop gradients at the batch expansion factor (ablation).
    min_batch: smallest batch for which percentile estimation is accepted.
    """

    target: float
    delta: float = 2.0
    use_window: bool = True
    detach_k: bool = False
    min_batch: int = 100

    def __post_init__(self):
        if not 0.0 < self.target < 1.0:
            raise ConfigError(f"coverage target must lie in (0, 1), got {self.target}")
        limit = min(self.target, 1.0 - self.target) * 100.0
        if self.use_window and not 0.0 < self.delta < limit:
            raise ConfigError(
                f"delta must lie in (0, {limit:.4g}) percentile points for "
                f"target {self.target}, got {self.delta}"
            )
        if self.min_batch < 1:
            raise ConfigError("min_batch must be >= 1")


def _check_outputs(outputs: np.ndarray, targets: np.ndarray, arity: int) -> None:
    if outputs.ndim != 2 or outputs.shape[1] != arity:
        raise ConfigError(
            f"expected outputs of shape (n, {arity}), got {outputs.shape}"
        )
    if targets.shape != (outputs.shape[0],):
        raise ConfigError(
            f"targets shape {targets.shape} does not match outputs "
            f"{outputs.shape}"
        )
    if outputs.shape[0] < 1:
        raise ConfigError("empty batch")


def _guard_finite(loss: float) -> float:
    if not math.isfinite(loss):
        raise DivergenceError("non-finite loss")
    return loss


def _col(outputs: np.ndarray, j: int) -> np.ndarray:
    return np.ascontiguousarray(outputs[:, j], dtype=np.float64)


def _pair_grad(d_lo: np.ndarray, d_up: np.ndarray) -> np.ndarray:
    grad = np.empty((d_lo.shape[0], 2))
    grad[:, 0] = d_lo
    grad[:, 1] = d_up
    return grad


def mse_loss(outputs: np.ndarray, targets: np.ndarray):
    """Sum of squared errors of a point prediction."""
    _check_outputs(outputs, targets, 1)
    loss, grad = K.mse_loss_grad(_col(outputs, 0), np.asarray(targets, np.float64))
    return _guard_finite(loss), grad.reshape(-1, 1)


def mle_variance_loss(log_var_outputs: np.ndarray, squared_residuals: np.ndarray):
    """Squared-error fit of predicted variance to observed squared residuals.

    ``squared_residuals`` are (y - f(x))**2 against the frozen point
    network; the network output is log-variance.
    """
    _check_outputs(log_var_outputs, squared_residuals, 1)
    loss, grad = K.logvar_fit_loss_grad(
        _col(log_var_outputs, 0), np.asarray(squared_residuals, np.float64)
    )
    return _guard_finite(loss), grad.reshape(-1, 1)


def ensemble_noise_loss(
    log_var_outputs: np.ndarray,
    residual_sq_minus_model_var: np.ndarray,
    clamp: float = EPS_RESIDUAL,
):
    """Log-space negative Gaussian likelihood for the noise-variance net.

    Inputs are (y - ensemble_mean)**2 minus the model-uncertainty variance,
    clamped below at ``clamp`` (the decomposition permits negatives).
    """
    _check_outputs(log_var_outputs, residual_sq_minus_model_var, 1)
    loss, grad = K.noise_nll_loss_grad(
        _col(log_var_outputs, 0),
        np.asarray(residual_sq_minus_model_var, np.float64),
        clamp,
    )
    return _guard_finite(loss), grad.reshape(-1, 1)


def pinball_loss(outputs: np.ndarray, targets: np.ndarray, tau_l: float, tau_u: float):
    """Asymmetric absolute-error loss for the two quantile heads."""
    if not 0.0 < tau_l < tau_u < 1.0:
        raise ConfigError(f"need 0 < tau_l < tau_u < 1, got ({tau_l}, {tau_u})")
    _check_outputs(outputs, targets, 2)
    loss, d_lo, d_up = K.pinball_loss_grad(
        _col(outputs, 0), _col(outputs, 1), np.asarray(targets, np.float64),
        tau_l, tau_u,
    )
    return _guard_finite(loss), _pair_grad(d_lo, d_up)


def pretrain_loss(outputs: np.ndarray, targets: np.ndarray, alpha: float):
    """Fixed-band squared error: pulls bounds toward y -+ alpha."""
    if alpha <= 0:
        raise ConfigError(f"pretrain band alpha must be > 0, got {alpha}")
    _check_outputs(outputs, targets, 2)
    loss, d_lo, d_up = K.band_pretrain_loss_grad(
        _col(outputs, 0), _col(outputs, 1), np.asarray(targets, np.float64), alpha
    )
    return _guard_finite(loss), _pair_grad(d_lo, d_up)


def eim_k_factors(outputs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Per-sample minimal expansion factors |u + l - 2y| / |u - l|.

    Scaling interval i about its midpoint by k_i is exactly enough to
    place y_i on a bound.
    """
    _check_outputs(outputs, targets, 2)
    k, bad = K.expansion_factors(
        _col(outputs, 0), _col(outputs, 1), np.asarray(targets, np.float64), EPS_WIDTH
    )
    if bad >= 0:
        raise DegenerateIntervalError(
            f"interval width below {EPS_WIDTH} at sample {bad}"
        )
    return k


def eim_loss(outputs: np.ndarray, targets: np.ndarray, cfg: EimConfig):
    """Expanded-interval loss: batch expansion factor times the width sum.

    Returns ``(loss, grad, k_batch)``; ``k_batch`` is the factor that
    rescales the batch to the coverage target, useful for training logs.
    """
    _check_outputs(outputs, targets, 2)
    n = outputs.shape[0]
    if n < cfg.min_batch:
        raise ConfigError(
            f"batch of {n} is below the minimum {cfg.min_batch} needed for a "
            f"stable percentile estimate (EimConfig.min_batch)"
        )
    loss, d_lo, d_up, k_batch, n_sel, status, bad = K.eim_loss_grad(
        _col(outputs, 0), _col(outputs, 1), np.asarray(targets, np.float64),
        cfg.target, cfg.delta, cfg.use_window, cfg.detach_k, EPS_WIDTH,
    )
    if status == K.STATUS_DEGENERATE:
        raise DegenerateIntervalError(
            f"interval width below {EPS_WIDTH} at sample {bad}"
        )
    if status == K.STATUS_EMPTY_WINDOW:
        raise ConfigError(
            f"no samples within {cfg.delta} percentile points of the "
            f"{cfg.target:.0%} rank in a batch of {n}; increase delta or the "
            f"batch size"
        )
    return _guard_finite(loss), _pair_grad(d_lo, d_up), k_batch
