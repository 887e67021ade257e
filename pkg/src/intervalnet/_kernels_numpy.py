"""Pure-numpy reference kernels.

Every function here has an identically-named, identically-shaped twin in
``_kernels_numba``. The backend module picks one set at import time (env
flag ``INTERVALNET_BACKEND``); tests and the benchmark import both twins
directly to compare them.

Conventions shared by both backends:
  * all floats are float64, matrices C-ordered;
  * layer weights are (out, in), forward computes ``x @ W.T + b``;
  * losses are sums over the batch (not means) and return the gradient
    with respect to the raw network outputs;
  * kernels never raise -- validity problems are reported through status
    codes so the numba twin can stay in nopython mode. Wrappers raise.
"""

import numpy as np

ACT_IDENTITY = 0
ACT_RELU = 1
ACT_TANH = 2

# eim_loss_grad / expansion_factors status codes
STATUS_OK = 0
STATUS_DEGENERATE = 1
STATUS_EMPTY_WINDOW = 2


def dense_forward(x, weights, biases, act):
    """One dense layer: returns (pre_activation, activation)."""
    z = x @ weights.T + biases
    if act == ACT_RELU:
        a = np.maximum(z, 0.0)
    elif act == ACT_TANH:
        a = np.tanh(z)
    else:
        a = z.copy()
    return z, a


def dense_backward(d_act, z, a, x, weights, act):
    """Backprop through one dense layer.

    d_act is dLoss/d(activation output). Returns (dW, db, dx).
    """
    if act == ACT_RELU:
        dz = d_act * (z > 0.0)
    elif act == ACT_TANH:
        dz = d_act * (1.0 - a * a)
    else:
        dz = d_act
    d_weights = dz.T @ x
    d_biases = dz.sum(axis=0)
    d_x = dz @ weights
    return d_weights, d_biases, d_x


def sgd_update(param, grad, lr):
    param -= lr * grad


def momentum_update(param, velocity, grad, lr, beta):
    velocity *= beta
    velocity += grad
    param -= lr * velocity


def adam_update(param, m, v, grad, lr, beta1, beta2, eps, t):
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    param -= lr * m_hat / (np.sqrt(v_hat) + eps)


def mse_loss_grad(pred, y):
    r = pred - y
    return float(r @ r), 2.0 * r


def logvar_fit_loss_grad(logvar, sq_resid):
    """Squared-error fit of exp(logvar) to observed squared residuals."""
    var = np.exp(logvar)
    diff = sq_resid - var
    loss = float(diff @ diff)
    return loss, 2.0 * (var - sq_resid) * var


def noise_nll_loss_grad(logvar, sq_resid, clamp):
    """Log-transformed negative Gaussian likelihood of residual noise.

    Per sample: 0.5*log(2*pi*var) + r2/(2*var), with var = exp(logvar)
    and r2 clamped below at ``clamp``.
    """
    r2 = np.maximum(sq_resid, clamp)
    inv_var = np.exp(-logvar)
    loss = float(np.sum(0.5 * (np.log(2.0 * np.pi) + logvar) + 0.5 * r2 * inv_var))
    grad = 0.5 - 0.5 * r2 * inv_var
    return loss, grad


def pinball_loss_grad(lo, up, y, tau_l, tau_u):
    e_l = y - lo
    e_u = y - up
    loss = float(
        np.sum(np.where(e_l >= 0.0, tau_l * e_l, (tau_l - 1.0) * e_l))
        + np.sum(np.where(e_u >= 0.0, tau_u * e_u, (tau_u - 1.0) * e_u))
    )
    # d/d(bound) of L_tau(y - bound); subgradient 0 exactly at the kink
    d_lo = np.where(e_l > 0.0, -tau_l, np.where(e_l < 0.0, 1.0 - tau_l, 0.0))
    d_up = np.where(e_u > 0.0, -tau_u, np.where(e_u < 0.0, 1.0 - tau_u, 0.0))
    return loss, d_lo, d_up


def band_pretrain_loss_grad(lo, up, y, alpha):
    rl = y - alpha - lo
    ru = y + alpha - up
    loss = float(rl @ rl + ru @ ru)
    return loss, -2.0 * rl, -2.0 * ru


def expansion_factors(lo, up, y, eps_w):
    """Minimal midpoint-preserving expansion factor per sample.

    k_i = |u + l - 2y| / |u - l|. Returns (k, bad_idx); bad_idx is the
    first sample with |u - l| < eps_w, or -1 if none.
    """
    width = np.abs(up - lo)
    bad = np.flatnonzero(width < eps_w)
    if bad.size:
        return np.zeros_like(lo), int(bad[0])
    k = np.abs(up + lo - 2.0 * y) / width
    return k, -1


def eim_loss_grad(lo, up, y, target, delta, use_window, detach_k, eps_w):
    """Width-sum loss scaled by the minibatch expansion factor.

    The expansion factor is the mean of the k_i whose percentile rank
    (rank - 0.5)/n * 100 lies within ``delta`` points of target*100
    (``use_window``), or the single nearest-rank Tth-percentile k_i
    otherwise. Gradients flow through both the width sum and, unless
    ``detach_k``, the selected k_i.

    Returns (loss, dlo, dup, k_batch, n_selected, status, bad_idx).
    """
    n = lo.shape[0]
    d_signed = up - lo
    width = np.abs(d_signed)
    zeros = np.zeros(n)
    bad = np.flatnonzero(width < eps_w)
    if bad.size:
        return 0.0, zeros, zeros, 0.0, 0, STATUS_DEGENERATE, int(bad[0])

    s = up + lo - 2.0 * y
    k = np.abs(s) / width
    order = np.argsort(k, kind="mergesort")
    if use_window:
        pct = (np.arange(n) + 0.5) * (100.0 / n)
        in_window = np.abs(pct - 100.0 * target) <= delta
        if not in_window.any():
            return 0.0, zeros, zeros, 0.0, 0, STATUS_EMPTY_WINDOW, -1
        selected = order[in_window]
    else:
        idx = int(np.ceil(target * n - 1e-9))
        idx = min(max(idx, 1), n) - 1
        selected = order[idx : idx + 1]

    k_batch = float(k[selected].mean())
    width_sum = float(width.sum())
    loss = k_batch * width_sum

    sign_d = np.sign(d_signed)
    d_lo = -k_batch * sign_d
    d_up = k_batch * sign_d
    if not detach_k:
        coef = width_sum / selected.size
        sign_s = np.sign(s[selected])
        ks = k[selected]
        ws = width[selected]
        d_up[selected] += coef * (sign_s - ks * sign_d[selected]) / ws
        d_lo[selected] += coef * (sign_s + ks * sign_d[selected]) / ws
    return loss, d_lo, d_up, k_batch, int(selected.size), STATUS_OK, -1


def bootstrap_group_variance(group_preds, resample_idx):
    """Mean over resamples of the sample variance of resampled group means.

    group_preds: (n, m2) per-sample group-mean predictions.
    resample_idx: (p, m2) with-replacement indices into the m2 groups.
    Variance uses ddof=1 within each resample.
    """
    n = group_preds.shape[0]
    p, m2 = resample_idx.shape
    out = np.empty(n)
    chunk = max(1, 4_000_000 // max(p * m2, 1))
    for start in range(0, n, chunk):
        sub = group_preds[start : start + chunk][:, resample_idx]  # (c, p, m2)
        out[start : start + chunk] = sub.var(axis=2, ddof=1).mean(axis=1)
    return out
