import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from pdmse import catalog, numerics, qes, special, susy
from pdmse.catalog import ModelId, ModelParams

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
SLOW = settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.too_slow])

finite = dict(allow_nan=False, allow_infinity=False)
complex_a = st.builds(complex, st.floats(-5, 5, **finite), st.floats(-5, 5, **finite))


# -- special functions -------------------------------------------------------

@SETTINGS
@given(complex_a, st.integers(0, 10), st.integers(0, 10))
def test_pochhammer_composition(a, n, m):
    lhs = special.pochhammer(a, n) * special.pochhammer(a + n, m)
    rhs = special.pochhammer(a, n + m)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


@SETTINGS
@given(st.floats(0.1, 20, **finite), st.floats(-20, 20, **finite))
def test_log_gamma_recurrence(re, im):
    z = complex(re, im)
    lhs = cmath.exp(special.log_gamma(z + 1))
    rhs = z * cmath.exp(special.log_gamma(z))
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


@SLOW
@given(st.integers(0, 24), st.floats(-2, 2, **finite), st.sampled_from([0.1, -0.1, 0.25, -0.25, 0.5, -0.5]))
def test_bridge_identity(n, y, lam):
    lhs, rhs = special.hermite_jacobi_bridge(n, y, lam)
    scale = abs(rhs) if abs(rhs) > 1e-12 else 1.0
    # cancellation in the expanded polynomial grows with n
    assert abs(lhs - rhs) / scale < (1e-10 if n <= 12 else 1e-7)


# -- catalog -------------------------------------------------------------------

@SETTINGS
@given(st.floats(0.05, 2, **finite), st.floats(0.01, 1.5, **finite), st.integers(0, 5))
def test_oscillator_levels_from_row1(alpha, lam, m):
    p = ModelParams(alpha=alpha, lam=lam)
    assume(m <= catalog.describe(ModelId.NLO, p).level_bound)
    row = ModelParams(A=alpha / math.sqrt(lam), B=0.0, lam=lam)
    assume(m < row.A / row.k)
    eps = catalog.energy_level(ModelId.NLO, p, m)
    e = catalog.energy_level(ModelId.T1R1, row, m)
    assert abs(eps - (e + p.g / p.lam - row.A**2) / (2 * alpha)) < 1e-12 * max(1.0, abs(eps))


TABLE2 = [
    pytest.param(m, marks=pytest.mark.xfail(
        strict=True, reason="the imaginary cross term coth*csch of row 4 is even in x, so V is not PT-symmetric"))
    if m is ModelId.T2R4 else m
    for m in ModelId if m.table == 2
]


@pytest.mark.parametrize("mid", TABLE2, ids=lambda m: m.value)
@SETTINGS
@given(st.floats(0.5, 6, **finite), st.floats(0.2, 6, **finite), st.floats(0.2, 3, **finite))
def test_table2_pt_condition(mid, A, B, k):
    lam = k * k if mid.row <= 4 else -k * k
    p = ModelParams(A, B, lam)
    try:
        catalog.validate(mid, p)
    except catalog.ConstraintError:
        assume(False)
    lim = 3.0 if lam > 0 else 0.95 / k
    x = np.linspace(0.05 * lim, lim, 41)
    x = np.concatenate([-x[::-1], x])
    v = catalog.potential_eval(mid, p, x) if mid.row not in (3, 4) else _full_line(mid, p, x)
    assert np.max(np.abs(v - np.conj(v[::-1]))) < 1e-13 * max(1.0, np.max(np.abs(v)))
    assert np.array_equal(catalog.mass(x, lam), catalog.mass(-x, lam))


def _full_line(mid, p, x):
    # rows 3 and 4 live on x > 0; the PT map needs the formula continued to x < 0
    return catalog.potential_z(mid, p, catalog.coordinate_map(x, p.lam))


@SETTINGS
@given(st.floats(0.5, 8, **finite), st.floats(-3, 3, **finite), st.floats(0.1, 3, **finite))
def test_row1_z_form(A, B, lam):
    p = ModelParams(A, B, lam)
    x = np.linspace(-3, 3, 31)
    u = math.sqrt(lam) * catalog.coordinate_map(x, lam)
    k = math.sqrt(lam)
    ref = (B * B - A * (A + k)) / np.cosh(u) ** 2 + B * (2 * A + k) * np.tanh(u) / np.cosh(u) + A * A
    got = catalog.potential_eval(ModelId.T1R1, p, x)
    assert np.max(np.abs(got - ref)) < 1e-12 * max(1.0, np.max(np.abs(ref)))


@SETTINGS
@given(st.floats(0.5, 10, **finite), st.floats(0.1, 4, **finite), st.integers(0, 8))
def test_rows_1_and_4_share_levels(A, lam, n):
    k = math.sqrt(lam)
    assume(n < A / k)
    e1 = catalog.energy_level(ModelId.T1R1, ModelParams(A, 0.3, lam), n)
    e4 = catalog.energy_level(ModelId.T1R4, ModelParams(A, A + 1.0, lam), n)
    assert e1 == e4


# -- SUSY ----------------------------------------------------------------------

def _bump(z, c, w):
    # smooth, compactly supported
    t = (z - c) / w
    out = np.zeros_like(z)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


@SLOW
@given(st.floats(-2, 2, **finite), st.floats(0.6, 1.5, **finite),
       st.sampled_from([ModelId.T1R1, ModelId.T1R2, ModelId.T2R1]))
def test_susy_algebra(c, sigma, mid):
    # full-line families, so a narrow Gaussian is compactly supported on the grid
    p = {ModelId.T1R1: ModelParams(5, 1, 1), ModelId.T1R2: ModelParams(4, 2, 1),
         ModelId.T2R1: ModelParams(5, 1, 1)}[mid]
    grid = numerics.Grid("z", -10.0, 10.0, 8001)
    z = grid.points
    spec = susy.superpotential(mid, p)
    psi = numerics.GridFunction(grid, np.exp(-0.5 * ((z - c) / sigma) ** 2))
    aa = susy.apply_ladder("raise", spec, susy.apply_ladder("lower", spec, psi))
    # H_- assembled from the catalog potential and a separate second-derivative stencil
    h = -numerics.second_derivative(psi.values, grid.spacing) + catalog.potential_z(mid, p, z) * psi.values
    diff = (aa.values - h)[8:-8]
    err = math.sqrt(np.sum(np.abs(diff) ** 2) * grid.spacing)
    assert err < 1e-8 * numerics.norm_mu(psi)


@SETTINGS
@given(st.fractions(Fraction(1, 10), Fraction(20)), st.fractions(Fraction(1, 10), Fraction(3)),
       st.integers(0, 20))
def test_row1_telescoping_exact(A, k, n):
    total = susy.shape_invariance_sum_exact(ModelId.T1R1, A, 0, k, n)
    assert total == n * k * (2 * A - n * k)


@SLOW
@given(st.integers(0, 2), st.floats(4.0, 7.0, **finite), st.floats(-2, 2, **finite))
def test_ladder_norm(n, A, B):
    # psi_n(a1) is an eigenfunction of H_+(a0) with eigenvalue E_{n+1}(a0)
    p0 = ModelParams(A, B, 1.0)
    p1 = ModelParams(A - 1.0, B, 1.0)
    assume(n + 1 < A)
    grid = catalog.default_z_grid(ModelId.T1R1, p0, 8001)
    psi = numerics.GridFunction(grid, catalog.wavefunction_z(ModelId.T1R1, p1, n, grid.points))
    up = susy.apply_ladder("raise", susy.superpotential(ModelId.T1R1, p0), psi)
    ratio = numerics.norm_mu(up) ** 2 / numerics.norm_mu(psi) ** 2
    e = catalog.energy_level(ModelId.T1R1, p0, n + 1)
    assert abs(ratio - e) < 1e-6 * max(1.0, e)


# -- QES -----------------------------------------------------------------------

@SETTINGS
@given(st.floats(0.05, 5, **finite))
def test_c2a_pt_parity_and_reality(b2):
    grid = qes.default_qes_grid(2001)
    z = grid.points
    sols = qes.qes_case2(qes.QesConfig("C2a", b2=b2))
    assert len(sols) == 2
    for sol in sols:
        psi = qes.qes_wavefunction(sol, z)
        assert np.max(np.abs(np.conj(psi[::-1]) + psi)) < 1e-10 * np.max(np.abs(psi))
        assert abs(complex(sol.E).imag) < 1e-12


@SETTINGS
@given(st.floats(-3, 3, **finite), st.floats(-1.5, 1.5, **finite))
def test_c3_branch_reality(b2, t):
    plus, minus = qes.qes_case3(qes.QesConfig("C3", b2=b2, b3=1j * t))
    for s in (plus, minus):
        assert abs(complex(s.E).imag) < 1e-12 * max(1.0, abs(s.E))
    assert (complex(plus.E) - complex(minus.E)).real >= 2 * math.sqrt(2) - 1e-12


@SLOW
@given(st.floats(0.1, 4, **finite), st.floats(0.2, 3, **finite))
def test_qes_lambda_covariance(b2, lam):
    # the equation is posed in z, so sampling through x at any lambda gives the same residual
    cfg = qes.QesConfig("C2a", b2=b2, lam=lam)
    sol = qes.qes_solve(cfg)[0]
    zgrid = qes.default_qes_grid(801, 4.0)
    xs = catalog.inverse_coordinate_map(zgrid.points, lam)
    r_z = qes.qes_residual(sol, cfg, zgrid)
    r_x = qes.qes_residual(sol, cfg, numerics.Grid("x", xs[0], xs[-1], 801))
    assert r_z < 1e-9 and r_x < 1e-9


# -- numerics --------------------------------------------------------------------

def test_second_order_convergence():
    mid, p = ModelId.T1R1, ModelParams(5, 1, 1)
    errs = []
    for npts in (501, 1001, 2001, 4001):
        g = numerics.Grid("z", -12, 12, npts)
        op = numerics.build_operator_z(lambda z: catalog.potential_z(mid, p, z), g)
        errs.append(abs(numerics.eigenvalues(op, 1)[0].real))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(3.8 < r < 4.2 for r in ratios)


@SETTINGS
@given(st.floats(-2, 2, **finite), st.floats(0.5, 2, **finite), st.floats(-2, 2, **finite),
       st.floats(0.5, 2, **finite), st.floats(-0.04, 2, **finite))
def test_skew_adjoint(c1, w1, c2, w2, lam):
    g = numerics.Grid("x", -4.5, 4.5, 8001)
    x = g.points
    f = numerics.GridFunction(g, _bump(x, c1, w1))
    h = numerics.GridFunction(g, _bump(x, c2, w2))
    s = np.sqrt(1.0 + lam * x * x)
    Df = numerics.GridFunction(g, s * np.gradient(f.values, g.spacing))
    Dh = numerics.GridFunction(g, s * np.gradient(h.values, g.spacing))
    total = numerics.inner_product_mu(Df, h, lam) + numerics.inner_product_mu(f, Dh, lam)
    assert abs(total) < 1e-6 * numerics.norm_mu(f, lam) * numerics.norm_mu(h, lam) + 1e-300


@SLOW
@given(st.sampled_from([ModelId.T1R1, ModelId.T1R4, ModelId.T1R5, ModelId.T1R6]))
def test_symmetric_operators(mid):
    from pdmse.verify import SAMPLE_PARAMS
    p = SAMPLE_PARAMS[mid]
    g = catalog.default_z_grid(mid, p, 801)
    op = numerics.build_operator_z(lambda z: catalog.potential_z(mid, p, z), g)
    assert op.is_symmetric(1e-14)
