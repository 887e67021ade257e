"""The numba kernels and their pure-numpy twins must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from intervalnet import _kernels_numpy as knp

numba_kernels = pytest.importorskip("intervalnet._kernels_numba")


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(2024)


def test_dense_forward_parity(rng):
    for act in (0, 1, 2):
        x = rng.normal(size=(17, 9))
        w = rng.normal(size=(5, 9))
        b = rng.normal(size=5)
        z_np, a_np = knp.dense_forward(x, w, b, act)
        z_nb, a_nb = numba_kernels.dense_forward(x, w, b, act)
        np.testing.assert_allclose(z_nb, z_np, rtol=1e-13, atol=1e-13)
        np.testing.assert_allclose(a_nb, a_np, rtol=1e-13, atol=1e-13)


def test_dense_backward_parity(rng):
    for act in (0, 1, 2):
        x = rng.normal(size=(17, 9))
        w = rng.normal(size=(5, 9))
        b = rng.normal(size=5)
        z, a = knp.dense_forward(x, w, b, act)
        d_act = rng.normal(size=(17, 5))
        ref = knp.dense_backward(d_act, z, a, x, w, act)
        out = numba_kernels.dense_backward(d_act, z, a, x, w, act)
        for r, o in zip(ref, out):
            np.testing.assert_allclose(o, r, rtol=1e-12, atol=1e-12)


def test_optimizer_update_parity(rng):
    p0 = rng.normal(size=64)
    g = rng.normal(size=64)
    for name, args in [
        ("sgd_update", (0.05,)),
        ("momentum_update", (0.05, 0.9)),
        ("adam_update", (0.05, 0.9, 0.999, 1e-8, 3)),
    ]:
        p_np, p_nb = p0.copy(), p0.copy()
        extra_np = [np.full(64, 0.1) for _ in range(2 if name == "adam_update" else 1)]
        extra_nb = [s.copy() for s in extra_np]
        if name == "sgd_update":
            getattr(knp, name)(p_np, g, *args)
            getattr(numba_kernels, name)(p_nb, g, *args)
        else:
            getattr(knp, name)(p_np, *extra_np, g, *args)
            getattr(numba_kernels, name)(p_nb, *extra_nb, g, *args)
            for s_np, s_nb in zip(extra_np, extra_nb):
                np.testing.assert_allclose(s_nb, s_np, rtol=1e-13)
        np.testing.assert_allclose(p_nb, p_np, rtol=1e-13)


def test_loss_kernel_parity(rng):
    n = 101
    lo = rng.normal(size=n)
    up = lo + rng.uniform(0.1, 2.0, n)
    y = rng.normal(size=n)
    r2 = rng.uniform(-0.5, 2.0, n)
    logvar = rng.normal(size=n)

    cases = [
        ("mse_loss_grad", (lo, y)),
        ("logvar_fit_loss_grad", (logvar, np.abs(r2))),
        ("noise_nll_loss_grad", (logvar, r2, 1e-8)),
        ("pinball_loss_grad", (lo, up, y, 0.2, 0.75)),
        ("band_pretrain_loss_grad", (lo, up, y, 0.8)),
        ("eim_loss_grad", (lo, up, y, 0.8, 3.0, True, False, 1e-12)),
        ("eim_loss_grad", (lo, up, y, 0.8, 3.0, False, True, 1e-12)),
        ("expansion_factors", (lo, up, y, 1e-12)),
    ]
    for name, args in cases:
        ref = getattr(knp, name)(*args)
        out = getattr(numba_kernels, name)(*args)
        assert len(ref) == len(out)
        for r, o in zip(ref, out):
            np.testing.assert_allclose(o, r, rtol=1e-12, atol=1e-14, err_msg=name)


def test_bootstrap_group_variance_parity(rng):
    g = rng.normal(size=(37, 8))
    idx = rng.integers(0, 8, size=(250, 8))
    ref = knp.bootstrap_group_variance(g, idx)
    out = numba_kernels.bootstrap_group_variance(g, idx)
    np.testing.assert_allclose(out, ref, rtol=1e-11, atol=1e-13)


@pytest.mark.parametrize("requested", ["numpy", "numba"])
def test_env_flag_selects_backend(requested):
    env = dict(os.environ)
    env["INTERVALNET_BACKEND"] = requested
    got = subprocess.run(
        [sys.executable, "-c",
         "from intervalnet.backend import backend_name; print(backend_name())"],
        capture_output=True, text=True, env=env, check=True,
    ).stdout.strip()
    assert got == requested


def test_invalid_backend_rejected():
    env = dict(os.environ)
    env["INTERVALNET_BACKEND"] = "cuda"
    proc = subprocess.run(
        [sys.executable, "-c", "import intervalnet.backend"],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode != 0
    assert "INTERVALNET_BACKEND" in proc.stderr
