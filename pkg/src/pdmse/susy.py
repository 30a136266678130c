"""Supersymmetric structure of the catalog: superpotentials, partner
potentials, intertwining operators, shape invariance and the broken case.

The intertwining operators are a = d/dz + W and a^dagger = -d/dz + W, i.e.
a = sqrt(1 + lam x^2) d/dx + W in the original coordinate, so that
a^dagger a = H_- = -d^2/dz^2 + W^2 - W' and a a^dagger = H_+.
"""

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson

from . import numerics
from .catalog import (
    ConstraintError,
    LevelBoundError,
    ModelId,
    ModelParams,
    Spectrum,
    coordinate_map,
    describe,
    energy_level,
    superpotential_z,
    validate,
)
from .numerics import Grid, GridFunction
from .special import jacobi_eval

__all__ = [
    "SuperpotentialSpec",
    "ShapeStep",
    "GridTooCoarseError",
    "superpotential",
    "broken_superpotential",
    "constant_superpotential",
    "partner_potentials",
    "shape_step",
    "remainder",
    "shape_invariance_spectrum",
    "shape_invariance_sum_exact",
    "shift_residual",
    "spectral_shift_report",
    "broken_degeneracy_report",
    "ground_state_from_W",
    "apply_ladder",
    "ladder_state",
    "factorization_residual",
    "broken_partner_potential_x",
    "broken_susy_spectrum",
    "broken_susy_two_step",
    "broken_susy_wavefunction",
    "pdmse_residual",
]


class GridTooCoarseError(ValueError):
    pass


@dataclass(frozen=True)
class SuperpotentialSpec:
    label: str
    params: ModelParams
    W: Callable
    dW: Callable
    z_domain: tuple

    def z_of(self, grid):
        if grid.coordinate == "z":
            return grid.points
        return coordinate_map(grid.points, self.params.lam)


@dataclass(frozen=True)
class ShapeStep:
    a0: tuple
    a1: tuple
    R: float


def superpotential(mid, p):
    mid = ModelId(mid)
    if mid is ModelId.NLO:
        # the oscillator is row 1 with B = 0 and A = alpha/sqrt(lam)
        mid, p = ModelId.T1R1, ModelParams(A=p.alpha / p.k, B=0.0, lam=p.lam)
    validate(mid, p)
    desc = describe(mid, p)
    return SuperpotentialSpec(
        mid.value,
        p,
        lambda z: superpotential_z(mid, p, z)[0],
        lambda z: superpotential_z(mid, p, z)[1],
        desc.z_domain,
    )


def broken_superpotential(p):
    """W = A tan u - B cot u on 0 < u < pi/2 (u = sqrt|lam| z, lam < 0)."""
    if not p.lam < 0:
        raise ConstraintError("this superpotential needs lambda < 0")
    k = p.k
    A, B = p.A, p.B

    def w(z):
        u = k * np.asarray(z, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return A * np.tan(u) - B / np.tan(u) + 0j

    def dw(z):
        u = k * np.asarray(z, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return k * (A / np.cos(u) ** 2 + B / np.sin(u) ** 2) + 0j

    return SuperpotentialSpec("sp", p, w, dw, (0.0, math.pi / (2 * k)))


def constant_superpotential(c, lam=1.0):
    return SuperpotentialSpec(
        "const",
        ModelParams(A=0.0, B=0.0, lam=lam),
        lambda z: np.full(np.shape(z), complex(c)),
        lambda z: np.zeros(np.shape(z), dtype=complex),
        (-math.inf, math.inf),
    )


def partner_potentials(spec, grid):
    """(V_-, V_+) = W^2 -+ W'/sqrt(m) sampled on the grid; W' is analytic."""
    z = spec.z_of(grid)
    with np.errstate(invalid="ignore", over="ignore"):
        w = spec.W(z)
        dw = spec.dW(z)
        return GridFunction(grid, w * w - dw), GridFunction(grid, w * w + dw)


# ---------------------------------------------------------------------------
# shape invariance
# ---------------------------------------------------------------------------


def _shift_sign(mid):
    # rows 1, 2, 4: A -> A - k; rows 3, 5, 6: A -> A + k
    return -1 if ModelId(mid).row in (1, 2, 4) else 1


def _params_at(mid, p, i):
    return dataclasses.replace(p, A=p.A + _shift_sign(mid) * i * p.k)


def remainder(mid, p, i):
    """R(a_i) for the given row, in telescoping form.

    Rows 2, 3 and 6 use R(a_i) = F(a_i) - F(a_{i+1}) with F(a) = a^2 + B^2/a^2
    (rows 2, 3) or R(a_i) = G(a_{i+1}) - G(a_i) with G(a) = a^2 - B^2/a^2
    (row 6); B^2 becomes -B^2 in the second table.
    """
    mid = ModelId(mid)
    k = p.k
    a_i = p.A + _shift_sign(mid) * i * k
    a_j = a_i + _shift_sign(mid) * k
    row = mid.row
    b2 = -p.B**2 if mid.table == 2 else p.B**2
    if row in (1, 4):
        return k * (2 * a_i - k)
    if row == 5:
        return k * (2 * a_i + k)
    if row in (2, 3):
        return (a_i**2 + b2 / a_i**2) - (a_j**2 + b2 / a_j**2)
    return (a_j**2 - b2 / a_j**2) - (a_i**2 - b2 / a_i**2)


def shape_step(mid, p, i=0):
    mid = ModelId(mid)
    a0 = (p.A + _shift_sign(mid) * i * p.k, p.B)
    a1 = (a0[0] + _shift_sign(mid) * p.k, p.B)
    return ShapeStep(a0, a1, remainder(mid, p, i))


def shape_invariance_spectrum(mid, p, nmax):
    """E_n = sum_{i<n} R(a_i), E_0 = 0."""
    mid = ModelId(mid)
    if mid is ModelId.NLO:
        raise ConstraintError("use row 1 for the oscillator")
    desc = describe(mid, p)
    if desc.level_bound is not None and nmax > desc.level_bound:
        raise LevelBoundError(f"nmax {nmax} exceeds the bound {desc.level_bound}")
    levels = [(0, 0.0)]
    total = 0.0
    for n in range(1, nmax + 1):
        total += remainder(mid, p, n - 1)
        levels.append((n, total))
    return Spectrum(tuple(levels), "shape-invariance", desc.level_bound is not None)


def shape_invariance_sum_exact(mid, A, B, k, n):
    """Exact rational sum of remainders; A, B, k = sqrt|lam| given as rationals."""
    mid = ModelId(mid)
    A, B, k = Fraction(A), Fraction(B), Fraction(k)
    sign = _shift_sign(mid)
    b2 = -B * B if mid.table == 2 else B * B
    total = Fraction(0)
    for i in range(n):
        a_i = A + sign * i * k
        a_j = a_i + sign * k
        if mid.row in (1, 4):
            total += k * (2 * a_i - k)
        elif mid.row == 5:
            total += k * (2 * a_i + k)
        elif mid.row in (2, 3):
            total += (a_i**2 + b2 / a_i**2) - (a_j**2 + b2 / a_j**2)
        else:
            total += (a_j**2 - b2 / a_j**2) - (a_i**2 - b2 / a_i**2)
    return total


def shift_residual(mid, p, grid, i=0):
    """sup |V_+(a_i) - V_-(a_{i+1}) - R(a_i)| over the grid."""
    mid = ModelId(mid)
    pa = _params_at(mid, p, i)
    pb = _params_at(mid, p, i + 1)
    _, vplus = partner_potentials(superpotential(mid, pa), grid)
    vminus, _ = partner_potentials(superpotential(mid, pb), grid)
    diff = vplus.values - vminus.values - remainder(mid, p, i)
    # drop nodes sitting on a singular wall, where both sides overflow
    keep = np.isfinite(diff) & (np.abs(vplus.values) < 1e10)
    diff = diff[keep]
    return float(np.max(np.abs(diff)))


def _partner_eigs(spec, sign, grid, k):
    def pot(z):
        with np.errstate(invalid="ignore", over="ignore"):
            w = spec.W(z)
            return w * w + sign * spec.dW(z)

    def build(g):
        return numerics.build_operator_z(pot, g)

    vals, _ = numerics.richardson_eigenvalues(build, grid, k, levels=2)
    return vals


def spectral_shift_report(mid, p, k=3, npoints=4001):
    """Discretized H_+(a_0) against H_-(a_1): which constant separates them.

    Reports both candidate constants R(a_0) and R(a_1) and the one the
    eigenvalue differences realize.
    """
    from .catalog import default_z_grid

    mid = ModelId(mid)
    pb = _params_at(mid, p, 1)
    grid = default_z_grid(mid, p, npoints)
    plus = _partner_eigs(superpotential(mid, p), +1, grid, k)
    minus = _partner_eigs(superpotential(mid, pb), -1, grid, k)
    diff = plus - minus
    r0, r1 = remainder(mid, p, 0), remainder(mid, p, 1)
    dev0 = float(np.max(np.abs(diff - r0)) / max(1.0, abs(r0)))
    dev1 = float(np.max(np.abs(diff - r1)) / max(1.0, abs(r1)))
    return {
        "family": mid.value,
        "E_plus": [complex(v) for v in plus],
        "E_minus_shifted": [complex(v) for v in minus],
        "R_a0": r0,
        "R_a1": r1,
        "deviation_R_a0": dev0,
        "deviation_R_a1": dev1,
        "realized": "R(a0)" if dev0 <= dev1 else "R(a1)",
    }


def broken_degeneracy_report(p, case, k=3, npoints=4001):
    """Lowest eigenvalues of the discretized tan/cot partners H_- and H_+."""
    _check_case(p, case)
    spec = broken_superpotential(p)
    grid = Grid("z", spec.z_domain[0], spec.z_domain[1], npoints)
    minus = _partner_eigs(spec, -1, grid, k)
    plus = _partner_eigs(spec, +1, grid, k)
    closed = [e for _, e in broken_susy_spectrum(p, case, k - 1).levels]
    rel = float(np.max(np.abs(minus - plus) / np.maximum(1.0, np.abs(plus))))
    return {
        "case": case,
        "E_minus": [float(v.real) for v in minus],
        "E_plus": [float(v.real) for v in plus],
        "E_closed": closed,
        "max_rel_gap": rel,
        "max_rel_closed": float(np.max(np.abs(minus - np.array(closed)) / np.abs(np.array(closed)))),
    }


# ---------------------------------------------------------------------------
# ground state and ladder operators
# ---------------------------------------------------------------------------


def _band_fractions(grid, dens, spec):
    total = float(np.sum(dens))
    if not math.isfinite(total) or total <= 0:
        return math.inf
    n = grid.npoints
    lo_inf = math.isinf(spec.z_domain[0])
    hi_inf = math.isinf(spec.z_domain[1])
    band_inf = max(2, n // 10)
    band_wall = 9
    lo_band = band_inf if lo_inf else band_wall
    hi_band = band_inf if hi_inf else band_wall
    return max(float(np.sum(dens[:lo_band])), float(np.sum(dens[-hi_band:]))) / total


def ground_state_from_W(spec, grid, lam=None):
    """psi_0 = exp(-int sqrt(m) W dx) = exp(-int W dz), normalized under dmu.

    Returns (GridFunction, normalizable). The reference point of the
    integral is the grid node closest to the middle. A state is flagged
    non-normalizable when a visible share of its norm sits next to a wall
    or in the outer tenth of a truncated infinite box.
    """
    z = spec.z_of(grid)
    w = spec.W(z)
    # tan and sec at a wall come out finite but huge; treat those nodes as singular
    ok = np.isfinite(w) & (np.abs(w) < 1e10)
    idx = np.nonzero(ok)[0]
    if idx.size < 5:
        raise GridTooCoarseError("superpotential is singular on most of the grid")
    zi = z[idx]
    wi = w[idx]
    mid = idx.size // 2
    cum = cumulative_simpson(wi.real, x=zi, initial=0.0) + 1j * cumulative_simpson(wi.imag, x=zi, initial=0.0)
    integral = cum - cum[mid]
    expo = -integral
    expo = expo - np.max(expo.real)
    with np.errstate(over="ignore"):
        vals = np.zeros(grid.npoints, dtype=complex)
        vals[idx] = np.exp(expo)
    # singular end nodes: psi vanishes there when it decays toward the wall
    for end, inner in ((0, 1), (-1, -2)):
        if not ok[end]:
            vals[end] = 0.0 if abs(vals[inner]) < abs(vals[idx[idx.size // 2]]) else np.inf
    lam = spec.params.lam if lam is None else lam
    gf = GridFunction(grid, vals)
    dens = np.abs(vals) ** 2
    normalizable = bool(np.all(np.isfinite(vals))) and _band_fractions(grid, dens, spec) < 1e-6
    if np.all(np.isfinite(vals)):
        nrm = numerics.norm_mu(gf, lam if grid.coordinate == "x" else 0.0)
        if nrm > 0 and math.isfinite(nrm):
            gf = gf.scaled(1.0 / nrm)
    return gf, normalizable


def _dz(psi, spec):
    grid = psi.grid
    h = grid.spacing
    d4 = numerics.derivative(psi.values, h, order=4)
    d2 = numerics.derivative(psi.values, h, order=2)
    scale = max(float(np.max(np.abs(d4))), 1e-300)
    if float(np.max(np.abs(d4[2:-2] - d2[2:-2]))) > 1e-2 * scale:
        raise GridTooCoarseError("4th-order stencil check failed; refine the grid")
    if grid.coordinate == "x":
        d4 = d4 * np.sqrt(1.0 + spec.params.lam * grid.points**2)
    return d4


def apply_ladder(direction, spec, psi):
    """a psi = psi_z + W psi (``lower``) or a^dagger psi = -psi_z + W psi (``raise``)."""
    if direction not in ("raise", "lower"):
        raise ValueError("direction must be 'raise' or 'lower'")
    d = _dz(psi, spec)
    w = spec.W(spec.z_of(psi.grid))
    with np.errstate(invalid="ignore"):
        wpsi = np.where(psi.values == 0, 0.0, w * psi.values)
    out = wpsi + d if direction == "lower" else wpsi - d
    return GridFunction(psi.grid, out)


def ladder_state(mid, p, n, grid):
    """psi_n(a_0) = a^dagger(a_0) psi_{n-1}(a_1) / sqrt(E_n(a_0)), down to psi_0(a_n).

    Every rung uses the intertwining factor instead of renormalizing.
    """
    mid = ModelId(mid)
    if n == 0:
        return ground_state_from_W(superpotential(mid, p), grid)[0]
    pa1 = _params_at(mid, p, 1)
    lower = ladder_state(mid, pa1, n - 1, grid)
    raised = apply_ladder("raise", superpotential(mid, p), lower)
    return raised.scaled(1.0 / math.sqrt(energy_level(mid, p, n)))


def factorization_residual(spec, psi, energy):
    """|| a^dagger a psi - E psi || / || psi || (plain L2 on the grid interior)."""
    lowered = apply_ladder("lower", spec, psi)
    back = apply_ladder("raise", spec, lowered)
    r = back.values - energy * psi.values
    sl = slice(4, -4)
    return float(np.linalg.norm(r[sl]) / np.linalg.norm(psi.values[sl]))


# ---------------------------------------------------------------------------
# broken supersymmetry
# ---------------------------------------------------------------------------


def _check_case(p, case):
    if not p.lam < 0:
        raise ConstraintError("the broken case needs lambda < 0")
    if case == "ApBn":
        if not (p.A > 0 and p.B < 0):
            raise ConstraintError("case ApBn needs A > 0, B < 0")
    elif case == "AnBp":
        if not (p.A < 0 and p.B > 0):
            raise ConstraintError("case AnBp needs A < 0, B > 0")
    else:
        raise ValueError("case must be 'ApBn' or 'AnBp'")


def broken_partner_potential_x(p, x, sign=-1):
    """V_-(x) (sign=-1) or V_+(x) (sign=+1) of the tan/cot superpotential, x in (0, 1/k)."""
    k = p.k
    A, B = p.A, p.B
    x = np.asarray(x, dtype=float)
    f = 1.0 + p.lam * x * x
    return A * (A + sign * k) / f - B * (B + sign * k) / (p.lam * x * x) - (A + B) ** 2


def broken_susy_spectrum(p, case, nmax):
    _check_case(p, case)
    k = p.k
    A, B = p.A, p.B
    lead = A - B if case == "ApBn" else B - A
    levels = tuple((n, (lead + k + 2 * n * k) ** 2 - (A + B) ** 2) for n in range(nmax + 1))
    return Spectrum(levels, "closed-form", False)


def broken_susy_two_step(p, case, n):
    """E_n of H_+ from the map onto an unbroken problem plus a constant.

    ApBn: (A, B) -> (A + k, -B); AnBp: (A, B) -> (-A, B + k). Returns a dict
    with the mapped parameters, the constant, the unbroken level and the
    resulting E_n; also the constant of the (A + k, B + k) map that leads
    nowhere because the mapped problem is still broken.
    """
    _check_case(p, case)
    k = p.k
    A, B = p.A, p.B
    if case == "ApBn":
        A1, B1 = A + k, -B
    else:
        A1, B1 = -A, B + k
    const = (A1 + B1) ** 2 - (A + B) ** 2
    unbroken = (A1 + B1 + 2 * n * k) ** 2 - (A1 + B1) ** 2
    return {
        "mapped": (A1, B1),
        "constant": const,
        "unbroken_level": unbroken,
        "E": unbroken + const,
        "step1_constant": (A + B + 2 * k) ** 2 - (A + B) ** 2,
    }


def broken_susy_wavefunction(p, case, n, x, uncorrected=False):
    """Unnormalized psi_n of V_- in the broken case.

    ApBn: x^(1 - B/k) (1 + lam x^2)^(A/(2k)) P_n^(1/2 - B/k, A/k - 1/2)(1 + 2 lam x^2).
    AnBp: x^(B/k) (1 + lam x^2)^((1 - A/k)/2) P_n^(B/k - 1/2, 1/2 - A/k)(1 + 2 lam x^2).
    ``uncorrected=True`` uses the uncorrected exponents: (1 - B)/k for ApBn,
    and for AnBp x^((1 - A)/k) (1 + lam x^2)^(B/(2k)) with P_n^(B/k - 1/2, A/k - 1/2).
    """
    _check_case(p, case)
    k = p.k
    A, B = p.A, p.B
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(k * x >= 1):
        raise ValueError("x must lie in (0, 1/sqrt|lam|)")
    f = 1.0 + p.lam * x * x
    arg = 1.0 + 2.0 * p.lam * x * x
    if case == "ApBn":
        ex = (1.0 - B) / k if uncorrected else 1.0 - B / k
        return x**ex * f ** (A / (2 * k)) * jacobi_eval(n, 0.5 - B / k, A / k - 0.5, arg)
    if uncorrected:
        return x ** ((1.0 - A) / k) * f ** (B / (2 * k)) * jacobi_eval(n, B / k - 0.5, A / k - 0.5, arg)
    return x ** (B / k) * f ** ((1.0 - A / k) / 2) * jacobi_eval(n, B / k - 0.5, 0.5 - A / k, arg)


def pdmse_residual(potential_x, lam, energy, psi):
    """sup |-(1+lam x^2) psi'' - lam x psi' + V psi - E psi| / sup |psi| on the interior.

    ``psi`` is a GridFunction on an x grid; derivatives are 4th order.
    """
    g = psi.grid
    if g.coordinate != "x":
        raise ValueError("pdmse_residual works on x grids")
    x = g.points
    h = g.spacing
    y = psi.values
    d1 = numerics.derivative(y, h, order=4)
    d2 = numerics.second_derivative(y, h)
    r = -(1.0 + lam * x * x) * d2 - lam * x * d1 + potential_x(x) * y - energy * y
    sl = slice(3, -3)
    return float(np.max(np.abs(r[sl])) / np.max(np.abs(y)))
