"""Shared test oracles: finite differences, brute-force metrics, quadrature."""

import math

import numpy as np


def finite_diff(f, x, h=1e-6):
    """Central-difference gradient of scalar f at flat float64 array x."""
    x = np.asarray(x, np.float64)
    grad = np.zeros_like(x)
    flat = x.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = f(x)
        flat[i] = orig - h
        down = f(x)
        flat[i] = orig
        grad.ravel()[i] = (up - down) / (2.0 * h)
    return grad


def assert_grad_close(analytic, numeric, rtol=1e-6, afloor=1e-7):
    analytic = np.asarray(analytic, np.float64)
    numeric = np.asarray(numeric, np.float64)
    denom = np.maximum(np.abs(numeric), afloor / rtol)
    rel = np.abs(analytic - numeric) / denom
    worst = float(rel.max())
    assert worst <= rtol, (
        f"gradient mismatch: worst relative error {worst:.3e} > {rtol:.1e}\n"
        f"analytic={analytic.ravel()[:8]}\nnumeric={numeric.ravel()[:8]}"
    )


def picp_brute(lower, upper, targets):
    hits = 0
    for lo, up, y in zip(lower, upper, targets):
        if lo <= y <= up:
            hits += 1
    return hits / len(targets)


def mpiw_brute(lower, upper):
    return sum(abs(u - l) for l, u in zip(lower, upper)) / len(lower)


def scale_brute(lower, upper, k):
    new_lo, new_up = [], []
    for lo, up in zip(lower, upper):
        new_up.append((up + lo + k * abs(up - lo)) / 2.0)
        new_lo.append((up + lo - k * abs(up - lo)) / 2.0)
    return np.array(new_lo), np.array(new_up)


def smallest_covering_factor(lo, up, y, tol=1e-12):
    """Bisection for the smallest c with y inside midpoint -+ c*halfwidth."""
    mid = (lo + up) / 2.0
    hw = abs(up - lo) / 2.0
    hi = 1.0
    while not (mid - hi * hw <= y <= mid + hi * hw):
        hi *= 2.0
        if hi > 1e12:
            raise AssertionError("no covering factor found")
    lo_c = 0.0
    while hi - lo_c > tol:
        midc = (lo_c + hi) / 2.0
        if mid - midc * hw <= y <= mid + midc * hw:
            hi = midc
        else:
            lo_c = midc
    return hi


def normal_cdf_quadrature(x, n=200_001):
    """CDF of the standard normal by Simpson quadrature from -12 to x."""
    if x <= -12.0:
        return 0.0
    grid = np.linspace(-12.0, x, n if n % 2 == 1 else n + 1)
    pdf = np.exp(-grid * grid / 2.0) / math.sqrt(2.0 * math.pi)
    h = (grid[-1] - grid[0]) / (len(grid) - 1)
    return float(h / 3.0 * (pdf[0] + pdf[-1] + 4 * pdf[1:-1:2].sum() + 2 * pdf[2:-1:2].sum()))


def normal_quantile_quadrature(p):
    """Inverse normal CDF by bisection against the quadrature CDF."""
    lo, hi = -12.0, 12.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if normal_cdf_quadrature(mid) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0
