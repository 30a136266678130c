import importlib
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg

from pdmse import _fallback, kernels, special

try:
    from pdmse import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

BACKENDS = [_fallback] + ([_kernels] if _kernels is not None else [])


def _laplacian(n, seed=1):
    rng = np.random.default_rng(seed)
    d = 2.0 + 0.3 * rng.standard_normal(n)
    e = -np.ones(n - 1) + 0.05 * rng.standard_normal(n - 1)
    return d, e


@pytest.mark.parametrize("mod", BACKENDS)
def test_tridiag_eigvals_matches_lapack(mod):
    d, e = _laplacian(300)
    ref = scipy.linalg.eigvalsh_tridiagonal(d, e)[:10]
    got = mod.tridiag_eigvals(d, e, 10)
    assert np.max(np.abs(got - ref)) < 1e-12


@pytest.mark.parametrize("mod", BACKENDS)
def test_sturm_count(mod):
    d, e = _laplacian(200)
    w = scipy.linalg.eigvalsh_tridiagonal(d, e)
    for sigma in (w[0] - 1, 0.5 * (w[20] + w[21]), w[-1] + 1):
        assert mod.sturm_count(d, e, sigma) == int(np.sum(w < sigma))


@pytest.mark.parametrize("mod", BACKENDS)
def test_shifted_solve(mod):
    d, e = _laplacian(150)
    rhs = np.linspace(-1, 1, 150)
    sigma = 0.123
    x = mod.tridiag_solve_shifted(d, e, sigma, rhs)
    m = np.diag(d - sigma) + np.diag(e, 1) + np.diag(e, -1)
    assert np.linalg.norm(m @ x - rhs) < 1e-10 * np.linalg.norm(rhs)


@pytest.mark.parametrize("mod", BACKENDS)
def test_jacobi_recurrence_against_explicit_sum(mod):
    x = np.linspace(-0.9, 0.9, 7).astype(complex)
    got = mod.jacobi_recurrence(6, 0.5 + 1j, -0.5 - 1j, x)
    ref = special._jacobi_explicit(6, 0.5 + 1j, -0.5 - 1j, x)
    assert np.max(np.abs(got - ref)) < 1e-12


@pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
def test_backends_agree():
    d, e = _laplacian(500, seed=7)
    assert np.allclose(_kernels.tridiag_eigvals(d, e, 6), _fallback.tridiag_eigvals(d, e, 6), rtol=0, atol=1e-12)
    x = np.linspace(-2, 2, 9) + 0.1j
    a = _kernels.jacobi_recurrence(9, -3.2, 1.5j, x)
    b = _fallback.jacobi_recurrence(9, -3.2, 1.5j, x)
    assert np.max(np.abs(a - b)) < 1e-12 * max(1.0, np.max(np.abs(b)))


def test_pure_python_switch():
    code = "from pdmse import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={"PDMSE_PURE_PYTHON": "1", "PATH": ""}, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND in ("cython", "python")
