import os
import subprocess
import sys

import numpy as np
import pytest

from twistxxz import _kernels_py, kernels

TH3 = np.zeros(3, dtype=complex)
LAM = np.array([-1.431625849182040, -0.5, 0.431625849182040], dtype=complex)

compiled = pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled extension not built")


def test_python_lu_det_matches_numpy(rng):
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert abs(_kernels_py.lu_det(a) - np.linalg.det(a)) <= 1e-12 * abs(np.linalg.det(a))


def test_python_residual_small_at_benchmark_roots():
    r = _kernels_py.bae_residual(LAM, TH3, 1.0)
    assert np.abs(r).max() < 1e-9


@pytest.mark.parametrize("mode", [0, _kernels_py.SCALE_AD, _kernels_py.SCALE_SEP])
def test_python_jacobian_matches_finite_differences(rng, mode):
    x = rng.uniform(-0.5, 0.5, 3) + 1j * rng.uniform(-0.5, 0.5, 3)
    th = rng.uniform(-0.3, 0.3, 3) + 0j
    r, jac = _kernels_py.bae_residual_jacobian(x, th, 1.0, mode)
    h = 1e-6
    for k in range(3):
        e = np.zeros(3, dtype=complex)
        e[k] = h
        fd = (_kernels_py.bae_residual(x + e, th, 1.0, mode) - _kernels_py.bae_residual(x - e, th, 1.0, mode)) / (2 * h)
        assert np.abs(fd - jac[:, k]).max() <= 1e-6 * max(1.0, np.abs(jac).max())


def test_python_newton_converges_from_nearby_start():
    x, nr, it, status = _kernels_py.newton_bae(LAM + 0.05, TH3, 1.0, 100, 1e-12, 20)
    assert status == _kernels_py.CONVERGED
    assert np.abs(np.sort(x.real) - LAM.real).max() < 1e-9


@compiled
def test_compiled_lu_det_agrees_with_python(rng):
    for n in (1, 3, 7):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert abs(kernels.lu_det(a) - _kernels_py.lu_det(a)) <= 1e-13 * abs(_kernels_py.lu_det(a))


@compiled
@pytest.mark.parametrize("mode", [0, kernels.SCALE_AD, kernels.SCALE_SEP])
def test_compiled_residual_and_jacobian_agree_with_python(rng, mode):
    x = rng.uniform(-0.5, 0.5, 4) + 1j * rng.uniform(-0.5, 0.5, 4)
    th = rng.uniform(-0.3, 0.3, 4) + 1j * rng.uniform(-0.3, 0.3, 4)
    rc, jc = kernels.bae_residual_jacobian(x, th, 0.8 + 0.1j, mode)
    rp, jp = _kernels_py.bae_residual_jacobian(x, th, 0.8 + 0.1j, mode)
    assert np.abs(np.asarray(rc) - rp).max() <= 1e-12 * max(1.0, np.abs(rp).max())
    assert np.abs(np.asarray(jc) - jp).max() <= 1e-12 * max(1.0, np.abs(jp).max())


@compiled
def test_compiled_newton_agrees_with_python():
    x0 = LAM + np.array([0.03, -0.02, 0.04])
    xc, nc, ic, sc = kernels.newton_bae(x0, TH3, 1.0, 100, 1e-12, 20, 0)
    xp, npy, ip, sp = _kernels_py.newton_bae(x0, TH3, 1.0, 100, 1e-12, 20, 0)
    assert sc == sp == kernels.CONVERGED
    assert np.abs(np.asarray(xc) - xp).max() < 1e-10


def test_environment_variable_forces_python_backend():
    env = dict(os.environ, TWISTXXZ_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from twistxxz import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
