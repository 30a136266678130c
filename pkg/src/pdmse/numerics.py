"""Finite-difference realization of the position-dependent-mass operator.

Two discretizations are provided. The z-form is the constant-mass operator
-d^2/dz^2 + V(z) on a uniform z grid. The x-form discretizes
-(1+lam x^2) psi'' - lam x psi' + V psi in conservative Sturm-Liouville form
-(p psi')' + q psi = E w psi with p = sqrt(F), w = 1/sqrt(F), F = 1 + lam x^2,
and is symmetrized by the diagonal similarity W^(1/2) = F^(-1/4).

Both use Dirichlet conditions at the two end nodes of the grid, so the
eigenproblem lives on the interior nodes only.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import simpson

from . import kernels

__all__ = [
    "Grid",
    "GridFunction",
    "DiscreteOperator",
    "ConvergenceError",
    "GridMismatchError",
    "build_operator_z",
    "build_operator_x",
    "eigensolve",
    "eigenvalues",
    "richardson_eigenvalues",
    "inner_product_mu",
    "norm_mu",
    "derivative",
]

DEFAULT_NPOINTS = 4001
DEFAULT_COMPLEX_NPOINTS = 1201


class ConvergenceError(ArithmeticError):
    pass


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    coordinate: str
    lo: float
    hi: float
    npoints: int

    def __post_init__(self):
        if self.coordinate not in ("x", "z"):
            raise ValueError("coordinate must be 'x' or 'z'")
        if self.npoints < 3:
            raise ValueError("a grid needs at least 3 points")
        if not self.hi > self.lo:
            raise ValueError("grid bounds must satisfy lo < hi")

    @property
    def spacing(self):
        return (self.hi - self.lo) / (self.npoints - 1)

    @property
    def points(self):
        return np.linspace(self.lo, self.hi, self.npoints)

    @property
    def interior(self):
        return self.points[1:-1]

    def coarsened(self):
        """Grid with doubled spacing over the same interval (npoints must be odd)."""
        if self.npoints % 2 == 0:
            raise ValueError("coarsening needs an odd number of points")
        return Grid(self.coordinate, self.lo, self.hi, (self.npoints + 1) // 2)


@dataclass
class GridFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.npoints,):
            raise ValueError("values must have one entry per grid point")

    def __add__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def scaled(self, c):
        return GridFunction(self.grid, self.values * c)

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))


def _same_grid(f, g):
    if f.grid != g.grid:
        raise GridMismatchError("grid functions live on different grids")


@dataclass
class DiscreteOperator:
    """Tridiagonal operator on the interior nodes of ``grid``.

    ``diag``, ``lower`` and ``upper`` hold the symmetrized matrix. A computed
    eigenvector v maps back to the grid function ``back * v``.
    """

    grid: Grid
    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    back: np.ndarray
    boundary: str = "dirichlet"
    hermitian: bool = field(default=False)

    @property
    def size(self):
        return self.diag.size

    def dense(self):
        m = np.diag(self.diag.astype(complex))
        m += np.diag(self.lower, -1) + np.diag(self.upper, 1)
        return m

    def matvec(self, v):
        out = self.diag * v
        out[1:] += self.lower * v[:-1]
        out[:-1] += self.upper * v[1:]
        return out

    def is_symmetric(self, tol=1e-14):
        scale = max(1.0, float(np.max(np.abs(self.upper))) if self.size > 1 else 1.0)
        return bool(np.all(np.abs(self.lower - self.upper) <= tol * scale))


def _sample(potential, pts):
    vals = potential(pts)
    vals = np.broadcast_to(np.asarray(vals, dtype=complex), pts.shape).copy()
    if not np.all(np.isfinite(vals)):
        raise ValueError("potential is not finite on the grid interior")
    return vals


def _finish(grid, diag, off, back):
    real = bool(np.all(diag.imag == 0.0) and np.all(np.imag(off) == 0.0))
    if real:
        diag = diag.real.copy()
        off = np.real(off).copy()
    return DiscreteOperator(grid, diag, off.copy(), off.copy(), back, hermitian=real)


def build_operator_z(potential, grid):
    """-d^2/dz^2 + V(z) with the 3-point stencil; ``potential`` maps arrays of z to V."""
    if grid.coordinate != "z":
        raise GridMismatchError("build_operator_z needs a z grid")
    h = grid.spacing
    z = grid.interior
    v = _sample(potential, z)
    diag = 2.0 / h**2 + v
    off = np.full(z.size - 1, -1.0 / h**2)
    return _finish(grid, diag, off, np.ones(z.size))


def build_operator_x(potential, lam, grid):
    """Conservative discretization of -(1+lam x^2) D^2 - lam x D + V on an x grid."""
    if grid.coordinate != "x":
        raise GridMismatchError("build_operator_x needs an x grid")
    h = grid.spacing
    x = grid.points
    xi = x[1:-1]
    if np.any(1.0 + lam * x**2 <= 0.0):
        raise ValueError("grid leaves the region 1 + lam x^2 > 0")
    xm = 0.5 * (x[:-1] + x[1:])
    p_half = np.sqrt(1.0 + lam * xm**2)
    f = 1.0 + lam * xi**2
    w = 1.0 / np.sqrt(f)
    v = _sample(potential, xi)
    k_diag = (p_half[:-1] + p_half[1:]) / h**2 + v * w
    k_off = -p_half[1:-1] / h**2
    sq = np.sqrt(w)
    diag = k_diag / w
    off = k_off / (sq[:-1] * sq[1:])
    return _finish(grid, diag.astype(complex), off, 1.0 / sq)


def _measure(grid, lam):
    if grid.coordinate == "z" or lam == 0.0:
        return np.ones(grid.npoints)
    return 1.0 / np.sqrt(1.0 + lam * grid.points**2)


def inner_product_mu(f, g, lam=0.0):
    """Composite Simpson quadrature of conj(f) g dmu.

    On an x grid dmu = dx / sqrt(1 + lam x^2); on a z grid dmu = dz.
    """
    _same_grid(f, g)
    w = _measure(f.grid, lam)
    return complex(simpson(np.conj(f.values) * g.values * w, x=f.grid.points))


def norm_mu(f, lam=0.0):
    return float(np.sqrt(max(inner_product_mu(f, f, lam).real, 0.0)))


def _pad(grid, interior):
    out = np.zeros(grid.npoints, dtype=complex)
    out[1:-1] = interior
    return out


def _phase_fix(v):
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def _inverse_iteration(op, value, iters=3):
    n = op.size
    # deterministic, generic start vector
    v = 1.0 + 0.5 * np.cos(np.arange(n) * 0.7548776662466927)
    scale = max(1.0, abs(value))
    shift = value + 64.0 * np.finfo(float).eps * scale
    for _ in range(iters):
        v = kernels.tridiag_solve_shifted(op.diag, op.upper, shift, v)
        v /= np.linalg.norm(v)
    return v


def eigensolve(op, k, lam=0.0):
    """The k eigenpairs of smallest real part.

    Real symmetric operators go through Sturm bisection plus inverse
    iteration; anything else through a dense general eigensolver. Vectors are
    returned as grid functions normalized under dmu, with the largest entry
    made real and positive.
    """
    n = op.size
    if k < 1 or k > n:
        raise ValueError("k must lie in [1, npoints-2]")
    if op.hermitian and op.is_symmetric():
        try:
            vals = kernels.tridiag_eigvals(op.diag, op.upper, k)
        except ArithmeticError as exc:
            raise ConvergenceError(str(exc)) from exc
        vecs = [_inverse_iteration(op, float(e)) for e in vals]
        vals = vals.astype(complex)
    else:
        try:
            w, vr = scipy.linalg.eig(op.dense(), check_finite=True)
        except scipy.linalg.LinAlgError as exc:
            raise ConvergenceError(str(exc)) from exc
        order = np.lexsort((w.imag, w.real))[:k]
        vals = w[order]
        vecs = [vr[:, j] for j in order]
    out = []
    for e, v in zip(vals, vecs):
        gf = GridFunction(op.grid, _pad(op.grid, op.back * v))
        nrm = norm_mu(gf, lam)
        gf = GridFunction(op.grid, _phase_fix(gf.values / nrm))
        out.append((complex(e), gf))
    return out


def eigenvalues(op, k):
    """Only the k eigenvalues of smallest real part."""
    if op.hermitian and op.is_symmetric():
        try:
            return kernels.tridiag_eigvals(op.diag, op.upper, k).astype(complex)
        except ArithmeticError as exc:
            raise ConvergenceError(str(exc)) from exc
    w = scipy.linalg.eigvals(op.dense())
    return w[np.lexsort((w.imag, w.real))[:k]]


def richardson_eigenvalues(build, grid, k, levels=2):
    """Eigenvalues extrapolated over successively coarsened grids.

    ``build`` maps a grid to a DiscreteOperator. With ``levels=2`` the
    combination (4 E_h - E_2h)/3 cancels the h^2 term; ``levels=3`` also
    cancels h^4. Returns (extrapolated, finest-grid values).
    """
    grids = [grid]
    for _ in range(levels - 1):
        grids.append(grids[-1].coarsened())
    table = [eigenvalues(build(g), k) for g in grids]
    fine = table[0]
    # Neville-style elimination of even powers of h
    cols = table
    p = 2
    while len(cols) > 1:
        f = 2.0**p
        cols = [(f * cols[i] - cols[i + 1]) / (f - 1.0) for i in range(len(cols) - 1)]
        p += 2
    return cols[0], fine


_D1 = {
    # 4th-order first derivative: interior central, edges one-sided
    "c": np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
    "f": np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    "f1": np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
}


def derivative(values, h, order=4):
    """First derivative of uniformly sampled values (4th or 2nd order)."""
    y = np.asarray(values)
    n = y.size
    if order == 2:
        return np.gradient(y, h, edge_order=2)
    if n < 5:
        raise ValueError("4th-order stencil needs at least 5 points")
    out = np.empty_like(y)
    c = _D1["c"]
    out[2:-2] = (c[0] * y[:-4] + c[1] * y[1:-3] + c[3] * y[3:-1] + c[4] * y[4:]) / h
    f, f1 = _D1["f"], _D1["f1"]
    out[0] = np.dot(f, y[:5]) / h
    out[1] = np.dot(f1, y[:5]) / h
    out[-1] = -np.dot(f, y[-1:-6:-1]) / h
    out[-2] = -np.dot(f1, y[-1:-6:-1]) / h
    return out


def second_derivative(values, h):
    """4th-order second derivative (one-sided at the two outer nodes per edge)."""
    y = np.asarray(values)
    if y.size < 6:
        raise ValueError("stencil needs at least 6 points")
    out = np.empty_like(y)
    out[2:-2] = (-y[:-4] + 16.0 * y[1:-3] - 30.0 * y[2:-2] + 16.0 * y[3:-1] - y[4:]) / (12.0 * h**2)
    e0 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0
    e1 = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0
    out[0] = np.dot(e0, y[:6]) / h**2
    out[1] = np.dot(e1, y[:6]) / h**2
    out[-1] = np.dot(e0, y[-1:-7:-1]) / h**2
    out[-2] = np.dot(e1, y[-1:-7:-1]) / h**2
    return out
