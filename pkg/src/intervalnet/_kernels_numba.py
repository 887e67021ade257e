"""Numba-compiled kernels; loop-fused twins of ``_kernels_numpy``.

Matmuls still go through BLAS (``np.dot``); the win over the numpy path
is fused elementwise work, no temporaries, and nogil execution so worker
threads can overlap. Compiled lazily per dtype/layout and cached on disk.
"""

import math

import numpy as np
from numba import njit

ACT_IDENTITY = 0
ACT_RELU = 1
ACT_TANH = 2

STATUS_OK = 0
STATUS_DEGENERATE = 1
STATUS_EMPTY_WINDOW = 2

_JIT = {"cache": True, "nogil": True, "fastmath": False}


@njit(**_JIT)
def dense_forward(x, weights, biases, act):
    z = np.dot(x, weights.T)
    n, m = z.shape
    a = np.empty_like(z)
    for i in range(n):
        for j in range(m):
            zv = z[i, j] + biases[j]
            z[i, j] = zv
            if act == ACT_RELU:
                a[i, j] = zv if zv > 0.0 else 0.0
            elif act == ACT_TANH:
                a[i, j] = math.tanh(zv)
            else:
                a[i, j] = zv
    return z, a


@njit(**_JIT)
def dense_backward(d_act, z, a, x, weights, act):
    n, m = d_act.shape
    dz = np.empty_like(d_act)
    for i in range(n):
        for j in range(m):
            g = d_act[i, j]
            if act == ACT_RELU:
                dz[i, j] = g if z[i, j] > 0.0 else 0.0
            elif act == ACT_TANH:
                av = a[i, j]
                dz[i, j] = g * (1.0 - av * av)
            else:
                dz[i, j] = g
    d_weights = np.dot(dz.T, x)
    d_biases = np.zeros(m)
    for i in range(n):
        for j in range(m):
            d_biases[j] += dz[i, j]
    d_x = np.dot(dz, weights)
    return d_weights, d_biases, d_x


@njit(**_JIT)
def sgd_update(param, grad, lr):
    for i in range(param.shape[0]):
        param[i] -= lr * grad[i]


@njit(**_JIT)
def momentum_update(param, velocity, grad, lr, beta):
    for i in range(param.shape[0]):
        v = beta * velocity[i] + grad[i]
        velocity[i] = v
        param[i] -= lr * v


@njit(**_JIT)
def adam_update(param, m, v, grad, lr, beta1, beta2, eps, t):
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for i in range(param.shape[0]):
        g = grad[i]
        mi = beta1 * m[i] + (1.0 - beta1) * g
        vi = beta2 * v[i] + (1.0 - beta2) * g * g
        m[i] = mi
        v[i] = vi
        param[i] -= lr * (mi / c1) / (math.sqrt(vi / c2) + eps)


@njit(**_JIT)
def mse_loss_grad(pred, y):
    n = pred.shape[0]
    grad = np.empty(n)
    loss = 0.0
    for i in range(n):
        r = pred[i] - y[i]
        loss += r * r
        grad[i] = 2.0 * r
    return loss, grad


@njit(**_JIT)
def logvar_fit_loss_grad(logvar, sq_resid):
    n = logvar.shape[0]
    grad = np.empty(n)
    loss = 0.0
    for i in range(n):
        var = math.exp(logvar[i])
        diff = sq_resid[i] - var
        loss += diff * diff
        grad[i] = -2.0 * diff * var
    return loss, grad


@njit(**_JIT)
def noise_nll_loss_grad(logvar, sq_resid, clamp):
    n = logvar.shape[0]
    grad = np.empty(n)
    loss = 0.0
    log2pi = math.log(2.0 * math.pi)
    for i in range(n):
        r2 = sq_resid[i]
        if r2 < clamp:
            r2 = clamp
        half_rv = 0.5 * r2 * math.exp(-logvar[i])
        loss += 0.5 * (log2pi + logvar[i]) + half_rv
        grad[i] = 0.5 - half_rv
    return loss, grad


@njit(**_JIT)
def pinball_loss_grad(lo, up, y, tau_l, tau_u):
    n = lo.shape[0]
    d_lo = np.empty(n)
    d_up = np.empty(n)
    loss = 0.0
    for i in range(n):
        e = y[i] - lo[i]
        if e > 0.0:
            loss += tau_l * e
            d_lo[i] = -tau_l
        elif e < 0.0:
            loss += (tau_l - 1.0) * e
            d_lo[i] = 1.0 - tau_l
        else:
            d_lo[i] = 0.0
        e = y[i] - up[i]
        if e > 0.0:
            loss += tau_u * e
            d_up[i] = -tau_u
        elif e < 0.0:
            loss += (tau_u - 1.0) * e
            d_up[i] = 1.0 - tau_u
        else:
            d_up[i] = 0.0
    return loss, d_lo, d_up


@njit(**_JIT)
def band_pretrain_loss_grad(lo, up, y, alpha):
    n = lo.shape[0]
    d_lo = np.empty(n)
    d_up = np.empty(n)
    loss = 0.0
    for i in range(n):
        rl = y[i] - alpha - lo[i]
        ru = y[i] + alpha - up[i]
        loss += rl * rl + ru * ru
        d_lo[i] = -2.0 * rl
        d_up[i] = -2.0 * ru
    return loss, d_lo, d_up


@njit(**_JIT)
def expansion_factors(lo, up, y, eps_w):
    n = lo.shape[0]
    k = np.zeros(n)
    for i in range(n):
        w = abs(up[i] - lo[i])
        if w < eps_w:
            return k, i
        k[i] = abs(up[i] + lo[i] - 2.0 * y[i]) / w
    return k, -1


@njit(**_JIT)
def eim_loss_grad(lo, up, y, target, delta, use_window, detach_k, eps_w):
    n = lo.shape[0]
    d_lo = np.zeros(n)
    d_up = np.zeros(n)
    k = np.empty(n)
    width = np.empty(n)
    sign_d = np.empty(n)
    sign_s = np.empty(n)
    width_sum = 0.0
    for i in range(n):
        d = up[i] - lo[i]
        w = abs(d)
        if w < eps_w:
            return 0.0, d_lo, d_up, 0.0, 0, STATUS_DEGENERATE, i
        s = up[i] + lo[i] - 2.0 * y[i]
        width[i] = w
        width_sum += w
        sign_d[i] = 1.0 if d > 0.0 else (-1.0 if d < 0.0 else 0.0)
        sign_s[i] = 1.0 if s > 0.0 else (-1.0 if s < 0.0 else 0.0)
        k[i] = abs(s) / w

    order = np.argsort(k, kind="mergesort")
    if use_window:
        lo_rank = 0
        hi_rank = -1
        t_pct = 100.0 * target
        for j in range(n):
            pct = (j + 0.5) * (100.0 / n)
            if abs(pct - t_pct) <= delta:
                if hi_rank < lo_rank:
                    lo_rank = j
                hi_rank = j
        if hi_rank < lo_rank:
            return 0.0, d_lo, d_up, 0.0, 0, STATUS_EMPTY_WINDOW, -1
        n_sel = hi_rank - lo_rank + 1
    else:
        idx = int(math.ceil(target * n - 1e-9))
        if idx < 1:
            idx = 1
        if idx > n:
            idx = n
        lo_rank = idx - 1
        hi_rank = idx - 1
        n_sel = 1

    k_batch = 0.0
    for j in range(lo_rank, hi_rank + 1):
        k_batch += k[order[j]]
    k_batch /= n_sel

    loss = k_batch * width_sum
    for i in range(n):
        d_lo[i] = -k_batch * sign_d[i]
        d_up[i] = k_batch * sign_d[i]
    if not detach_k:
        coef = width_sum / n_sel
        for j in range(lo_rank, hi_rank + 1):
            i = order[j]
            d_up[i] += coef * (sign_s[i] - k[i] * sign_d[i]) / width[i]
            d_lo[i] += coef * (sign_s[i] + k[i] * sign_d[i]) / width[i]
    return loss, d_lo, d_up, k_batch, n_sel, STATUS_OK, -1


@njit(**_JIT)
def bootstrap_group_variance(group_preds, resample_idx):
    n, m2 = group_preds.shape
    p = resample_idx.shape[0]
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for r in range(p):
            total = 0.0
            total_sq = 0.0
            for j in range(m2):
                g = group_preds[i, resample_idx[r, j]]
                total += g
                total_sq += g * g
            mean = total / m2
            acc += (total_sq - m2 * mean * mean) / (m2 - 1)
        out[i] = acc / p
    return out
