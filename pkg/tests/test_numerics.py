import math

import numpy as np
import pytest

from pdmse import numerics
from pdmse.numerics import Grid, GridFunction


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid("q", 0, 1, 10)
    with pytest.raises(ValueError):
        Grid("x", 1, 0, 10)
    with pytest.raises(ValueError):
        Grid("x", 0, 1, 2)
    assert Grid("x", 0, 1, 5).coarsened().npoints == 3


def test_grid_mismatch():
    f = GridFunction(Grid("x", 0, 1, 5), np.ones(5))
    g = GridFunction(Grid("x", 0, 2, 5), np.ones(5))
    with pytest.raises(numerics.GridMismatchError):
        numerics.inner_product_mu(f, g)


def test_measure_integrates_against_dz():
    # int dmu over [-X, X] = 2 asinh(sqrt(lam) X)/sqrt(lam)
    lam = 0.7
    g = Grid("x", -3, 3, 4001)
    one = GridFunction(g, np.ones(g.npoints))
    expect = 2 * math.asinh(math.sqrt(lam) * 3) / math.sqrt(lam)
    assert numerics.inner_product_mu(one, one, lam).real == pytest.approx(expect, rel=1e-12)


def test_harmonic_oscillator_spectrum():
    g = Grid("z", -10, 10, 4001)
    op = numerics.build_operator_z(lambda z: z**2, g)
    assert op.is_symmetric()
    ext, _ = numerics.richardson_eigenvalues(lambda gg: numerics.build_operator_z(lambda z: z**2, gg), g, 4)
    assert np.max(np.abs(ext.real - np.array([1, 3, 5, 7]))) < 1e-8


def test_eigensolve_vectors_normalized():
    g = Grid("z", -10, 10, 2001)
    op = numerics.build_operator_z(lambda z: z**2, g)
    pairs = numerics.eigensolve(op, 3)
    for i, (_, f) in enumerate(pairs):
        assert numerics.norm_mu(f) == pytest.approx(1.0, abs=1e-12)
        for _, h in pairs[:i]:
            assert abs(numerics.inner_product_mu(f, h)) < 1e-8


def test_complex_operator_goes_dense():
    g = Grid("z", -8, 8, 401)
    op = numerics.build_operator_z(lambda z: z**2 + 0j * z + 1j * z, g)
    # -d2 + z^2 + i z = -d2 + (z + i/2)^2 + 1/4
    vals = numerics.eigenvalues(op, 2)
    assert abs(vals[0] - 1.25) < 1e-3


def test_derivative_orders():
    x = np.linspace(0, 1, 201)
    h = x[1] - x[0]
    assert np.max(np.abs(numerics.derivative(np.sin(x), h) - np.cos(x))) < 1e-8
    assert np.max(np.abs(numerics.second_derivative(np.sin(x), h)[2:-2] + np.sin(x)[2:-2])) < 1e-5
