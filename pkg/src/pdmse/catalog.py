"""Catalog of the solvable families for the mass m(x) = 1/(1 + lam x^2).

Every family is handled in the transformed coordinate z, where the problem
is an ordinary Schrodinger equation -psi_zz + V(z) psi = E psi. With
k = sqrt|lam| and u = k z:

    lam > 0:  sqrt(lam) x = sinh u,  sqrt(1 + lam x^2) = cosh u
    lam < 0:  sqrt|lam| x = sin u,   sqrt(1 + lam x^2) = cos u

The six shape-invariant rows share one superpotential table; the second
table is the first with B replaced by iB. ``nlo`` is the nonlinear
oscillator itself, whose levels are reported as the adimensional eps_m.
"""

import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from math import factorial
from typing import Optional

import numpy as np
from scipy.integrate import quad, simpson

from . import numerics
from .special import deformed_hermite, jacobi_eval, log_gamma

__all__ = [
    "ModelId",
    "ModelParams",
    "DerivedParams",
    "ModelDescriptor",
    "Spectrum",
    "CatalogError",
    "ConstraintError",
    "DomainError",
    "LevelBoundError",
    "PoleError",
    "NonNormalizableError",
    "describe",
    "derived_params",
    "validate",
    "mass",
    "coordinate_map",
    "inverse_coordinate_map",
    "potential_eval",
    "potential_z",
    "superpotential_z",
    "energy_level",
    "closed_form_spectrum",
    "wavefunction_z",
    "wavefunction_eval",
    "normalization_constant",
    "numerical_spectrum",
    "default_z_grid",
    "default_x_grid",
    "harmonic_limit_report",
    "level_overlaps",
    "model_from_json",
]


class ModelId(str, Enum):
    NLO = "nlo"
    T1R1 = "t1r1"
    T1R2 = "t1r2"
    T1R3 = "t1r3"
    T1R4 = "t1r4"
    T1R5 = "t1r5"
    T1R6 = "t1r6"
    T2R1 = "t2r1"
    T2R2 = "t2r2"
    T2R3 = "t2r3"
    T2R4 = "t2r4"
    T2R5 = "t2r5"
    T2R6 = "t2r6"

    @property
    def table(self):
        return 0 if self is ModelId.NLO else int(self.value[1])

    @property
    def row(self):
        return 0 if self is ModelId.NLO else int(self.value[3])


class CatalogError(ValueError):
    pass


class ConstraintError(CatalogError):
    pass


class DomainError(CatalogError):
    pass


class LevelBoundError(CatalogError):
    pass


class PoleError(ZeroDivisionError):
    pass


class NonNormalizableError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ModelParams:
    A: float = 0.0
    B: float = 0.0
    lam: float = 1.0
    alpha: float = 1.0
    row4_compat: bool = False

    @property
    def g(self):
        # coupling of the oscillator, m = 1
        return self.alpha * (self.alpha + self.lam)

    @property
    def Lambda(self):
        return self.lam / self.alpha

    @property
    def k(self):
        return math.sqrt(abs(self.lam))


@dataclass(frozen=True)
class DerivedParams:
    s: complex
    r: complex
    r1: complex
    a: complex
    s1: complex
    s2: complex
    s3: complex
    s4: complex
    sp: complex
    rp: complex
    a_row: complex


@dataclass(frozen=True)
class ModelDescriptor:
    id: ModelId
    domain: tuple
    z_domain: tuple
    hermitian: bool
    level_bound: Optional[int]
    closed_normalization: bool


@dataclass(frozen=True)
class Spectrum:
    levels: tuple
    provenance: str
    bounded: bool = True

    def energies(self):
        return np.array([e for _, e in self.levels])


# ---------------------------------------------------------------------------
# parameters, constraints, domains
# ---------------------------------------------------------------------------


def _b(mid, p):
    """B as it enters the formulas: real for the first table, iB for the second."""
    return 1j * p.B if mid.table == 2 else complex(p.B)


def derived_params(mid, p, n=0):
    """The symbols s, r, r1, a, s1..s4, s', r' for level n.

    ``a`` is the common definition r1/(s-n). ``a_row`` is the value that actually
    solves the row: r1/(s+n) for rows 3 and 6, r1/(s-n) otherwise.
    """
    mid = ModelId(mid)
    k = p.k
    b = _b(mid, p)
    if k == 0:
        raise DomainError("derived symbols need lam != 0")
    s = complex(p.A / k)
    r = b / k
    r1 = b / k**2
    a = r1 / (s - n) if s != n else complex("nan")
    a_row = r1 / (s + n) if mid.row in (3, 6) else a
    return DerivedParams(
        s=s, r=r, r1=r1, a=a,
        s1=s - n + a, s2=s - n - a, s3=a - n - s, s4=-(s + n + a),
        sp=complex(p.A / k), rp=b / k, a_row=a_row,
    )


def validate(mid, p):
    mid = ModelId(mid)
    vals = (p.A, p.B, p.lam, p.alpha)
    if not all(math.isfinite(v) for v in vals):
        raise ConstraintError("parameters must be finite")
    if mid is ModelId.NLO:
        if p.alpha <= 0:
            raise ConstraintError("alpha must be positive")
        return
    row = mid.row
    if row <= 4 and not p.lam > 0:
        raise ConstraintError(f"{mid.value} needs lambda > 0")
    if row >= 5 and not p.lam < 0:
        raise ConstraintError(f"{mid.value} needs lambda < 0")
    if p.A <= 0:
        raise ConstraintError(f"{mid.value} needs A > 0")
    if row == 2 and not p.B < p.A**2:
        raise ConstraintError("row 2 needs B < A^2")
    if row == 3 and not p.B > p.A**2:
        raise ConstraintError("row 3 needs B > A^2")
    if row == 4 and not p.A < p.B:
        raise ConstraintError("row 4 needs A < B")
    if mid is ModelId.T1R5 and not p.A > abs(p.B):
        raise ConstraintError("row 5 needs A > |B|")


def _level_bound(mid, p):
    """Largest admissible level index, or None when unbounded."""
    k = p.k
    if mid is ModelId.NLO:
        if p.Lambda > 0:
            return int(math.ceil(1.0 / p.Lambda)) - 1
        return None
    s = p.A / k
    row = mid.row
    if row in (1, 4):
        return int(math.ceil(s)) - 1
    if row == 2:
        n = 0
        # normalizable while (A - n k)^2 > |B| (real B) or A - n k > 0 (imaginary B)
        cap = abs(p.B) if mid.table == 1 else 0.0
        while (p.A - (n + 1) * k) > 0 and (p.A - (n + 1) * k) ** 2 > cap:
            n += 1
        return n
    if row == 3:
        if mid.table == 2:
            return -1
        n = -1
        while (p.A + (n + 1) * k) ** 2 < p.B:
            n += 1
        return n
    return None


def describe(mid, p):
    mid = ModelId(mid)
    validate(mid, p)
    k = p.k
    if mid is ModelId.NLO:
        if p.lam < 0:
            dom = (-1.0 / k, 1.0 / k)
            zdom = (-math.pi / (2 * k), math.pi / (2 * k))
        else:
            dom = zdom = (-math.inf, math.inf)
    elif mid.row in (1, 2):
        dom = zdom = (-math.inf, math.inf)
    elif mid.row in (3, 4):
        dom = zdom = (0.0, math.inf)
    else:
        dom = (-1.0 / k, 1.0 / k)
        zdom = (-math.pi / (2 * k), math.pi / (2 * k))
    closed_norm = mid is ModelId.T1R1 or (mid is ModelId.NLO and p.lam >= 0)
    return ModelDescriptor(mid, dom, zdom, mid.table != 2, _level_bound(mid, p), closed_norm)


def _check_level(mid, p, n):
    if n < 0:
        raise LevelBoundError("level index must be non-negative")
    bound = _level_bound(mid, p)
    if bound is not None and n > bound:
        raise LevelBoundError(f"level {n} exceeds the bound {bound} of {mid.value}")


# ---------------------------------------------------------------------------
# mass and coordinates
# ---------------------------------------------------------------------------


def mass(x, lam):
    x = np.asarray(x, dtype=float)
    f = 1.0 + lam * x * x
    if np.any(f <= 0.0):
        raise DomainError("1 + lam x^2 must be positive")
    out = 1.0 / f
    return float(out) if out.ndim == 0 else out


def coordinate_map(x, lam):
    """z(x) = asinh(sqrt(lam) x)/sqrt(lam), asin(sqrt|lam| x)/sqrt|lam|, or x at lam = 0."""
    x = np.asarray(x, dtype=float)
    if lam > 0:
        k = math.sqrt(lam)
        out = np.arcsinh(k * x) / k
    elif lam < 0:
        k = math.sqrt(-lam)
        if np.any(np.abs(k * x) >= 1.0):
            raise DomainError("x outside (-1/sqrt|lam|, 1/sqrt|lam|)")
        out = np.arcsin(k * x) / k
    else:
        out = x.copy()
    return float(out) if out.ndim == 0 else out


def inverse_coordinate_map(z, lam):
    z = np.asarray(z, dtype=float)
    if lam > 0:
        k = math.sqrt(lam)
        out = np.sinh(k * z) / k
    elif lam < 0:
        k = math.sqrt(-lam)
        if np.any(np.abs(k * z) > math.pi / 2):
            raise DomainError("z outside (-pi/(2 sqrt|lam|), pi/(2 sqrt|lam|))")
        out = np.sin(k * z) / k
    else:
        out = z.copy()
    return float(out) if out.ndim == 0 else out


def _check_x(mid, p, x):
    desc = describe(mid, p)
    lo, hi = desc.domain
    x = np.asarray(x, dtype=float)
    if mid is not ModelId.NLO and mid.row in (3, 4):
        if np.any(x <= 0):
            raise DomainError(f"{mid.value} is defined for x > 0")
    if np.any(x <= lo) or np.any(x >= hi):
        raise DomainError(f"x outside the domain of {mid.value}")
    return x


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


def superpotential_z(mid, p, z):
    """(W, dW/dz) at z for the shape-invariant rows."""
    mid = ModelId(mid)
    if mid is ModelId.NLO:
        raise CatalogError("the oscillator is described through row 1")
    k = p.k
    A = p.A
    b = _b(mid, p)
    u = k * np.asarray(z, dtype=float)
    row = mid.row
    with np.errstate(divide="ignore", invalid="ignore"):
        if row == 1:
            t, sc = np.tanh(u), 1.0 / np.cosh(u)
            return A * t + b * sc, k * (A * sc**2 - b * sc * t)
        if row == 2:
            sc = 1.0 / np.cosh(u)
            return A * np.tanh(u) + b / A + 0j, k * A * sc**2 + 0j
        if row == 3:
            cs = 1.0 / np.sinh(u)
            return b / A - A / np.tanh(u), k * A * cs**2 + 0j
        if row == 4:
            cs, ct = 1.0 / np.sinh(u), 1.0 / np.tanh(u)
            return A * ct - b * cs, k * (-A * cs**2 + b * cs * ct)
        if row == 5:
            t, sc = np.tan(u), 1.0 / np.cos(u)
            return A * t - b * sc, k * (A * sc**2 - b * sc * t)
        t, sc = np.tan(u), 1.0 / np.cos(u)
        return A * t - b / A + 0j, k * A * sc**2 + 0j


def potential_z(mid, p, z):
    """V(z) assembled from the superpotential, V = W^2 - dW/dz.

    Row 4 carries the cross-term coefficient B(2A + lam) unless
    ``row4_compat`` selects B(2A + sqrt(lam)).
    """
    mid = ModelId(mid)
    z = np.asarray(z, dtype=float)
    if mid is ModelId.NLO:
        return _nlo_potential_z(p, z)
    w, dw = superpotential_z(mid, p, z)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        v = w * w - dw
        if mid.row == 4 and not p.row4_compat:
            k = p.k
            u = k * z
            b = _b(mid, p)
            v = v - b * (p.lam - k) / (np.tanh(u) * np.sinh(u))
    return v


def _nlo_potential_z(p, z):
    # twice the oscillator Hamiltonian: -psi_zz + g x^2/(1 + lam x^2)
    x = inverse_coordinate_map(z, p.lam) if p.lam >= 0 else np.sin(p.k * z) / p.k
    return p.g * x * x / (1.0 + p.lam * x * x) + 0j


def potential_eval(mid, p, x):
    """V(x) from the closed x-forms of the catalog.

    ``nlo`` returns -(g/lam)/(1 + lam x^2), the potential of the operator
    -(1+lam x^2) D^2 - lam x D + V whose eigenvalues are E = 2 e - g/lam.
    """
    mid = ModelId(mid)
    validate(mid, p)
    x = _check_x(mid, p, x)
    lam, k, A = p.lam, p.k, p.A
    f = 1.0 + lam * x * x
    if mid is ModelId.NLO:
        if lam == 0:
            raise DomainError("the -g/lam form needs lam != 0")
        out = -(p.g / lam) / f + 0j
        return complex(out) if np.ndim(out) == 0 else out
    b = _b(mid, p)
    row = mid.row
    sf = np.sqrt(f)
    if row == 1:
        out = (b * b - A * A - A * k) / f + b * (2 * A + k) * k * x / f + A * A
    elif row == 2:
        out = A * A + b * b / (A * A) - A * (A + k) / f + 2 * b * k * x / sf
    elif row == 3:
        out = A * A + b * b / (A * A) - 2 * b * sf / (k * x) + A * (A - k) / (lam * x * x)
    elif row == 4:
        c = k if p.row4_compat else lam
        out = (A * A + b * b + A * k) / (lam * x * x) - b * (2 * A + c) * sf / (lam * x * x) + A * A
    elif row == 5:
        out = (A * A + b * b - A * k) / f - b * (2 * A - k) * k * x / f - A * A
    else:
        # tan u = k x / sqrt(1 + lam x^2) in the linear term
        out = A * (A - k) / f - 2 * b * k * x / sf - A * A + b * b / (A * A)
    out = out + 0j
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------


def energy_level(mid, p, n):
    """Closed-form E_n (eps_m for ``nlo``)."""
    mid = ModelId(mid)
    validate(mid, p)
    _check_level(mid, p, n)
    if mid is ModelId.NLO:
        return (n + 0.5) - 0.5 * n * n * p.Lambda
    k, A = p.k, p.A
    b2 = (_b(mid, p) ** 2).real
    row = mid.row
    if row in (1, 4):
        return n * k * (2 * A - n * k)
    if row == 5:
        return n * k * (2 * A + n * k)
    if row == 2:
        d = A - n * k
        if d == 0:
            raise PoleError("A - n sqrt(lam) vanishes")
        return A * A + b2 / (A * A) - d * d - b2 / (d * d)
    if row == 3:
        d = A + n * k
        if d == 0:
            raise PoleError("A + n sqrt(lam) vanishes")
        return A * A + b2 / (A * A) - d * d - b2 / (d * d)
    d = A + n * k
    return b2 / (A * A) - A * A + d * d - b2 / (d * d)


def closed_form_spectrum(mid, p, nmax):
    mid = ModelId(mid)
    bound = _level_bound(mid, p)
    top = nmax if bound is None else min(nmax, bound)
    levels = tuple((n, energy_level(mid, p, n)) for n in range(top + 1))
    return Spectrum(levels, "closed-form", bound is not None)


def nlo_e5_energy(p, m):
    """Eigenvalue of the -g/lam operator for oscillator level m: 2 alpha eps_m - g/lam."""
    return 2.0 * p.alpha * energy_level(ModelId.NLO, p, m) - p.g / p.lam


# ---------------------------------------------------------------------------
# wavefunctions
# ---------------------------------------------------------------------------


def _pw(base, expo):
    return np.power(np.asarray(base, dtype=complex), expo)


def wavefunction_z(mid, p, n, z):
    """Unnormalized closed-form psi_n as a function of z (row 1 carries i^n).

    Points on a singular wall come out as nan or inf.
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return _wavefunction_z(mid, p, n, z)


def _wavefunction_z(mid, p, n, z):
    mid = ModelId(mid)
    z = np.asarray(z, dtype=float)
    if mid is ModelId.NLO:
        return _nlo_shape(p, n, inverse_coordinate_map(z, p.lam))
    d = derived_params(mid, p, n)
    k = p.k
    u = k * z
    row = mid.row
    s, r = d.s, d.r
    if row == 1:
        sh = np.sinh(u)
        jac = jacobi_eval(n, 1j * r - s - 0.5, -1j * r - s - 0.5, -1j * sh)
        return (1j**n) * _pw(np.cosh(u), -s) * np.exp(-r * np.arctan(sh)) * jac
    if row == 2:
        a = d.a_row
        s1, s2 = s - n + a, s - n - a
        em, ep = 2.0 / (1.0 + np.exp(2 * u)), 2.0 / (1.0 + np.exp(-2 * u))
        return _pw(em, s1 / 2) * _pw(ep, s2 / 2) * jacobi_eval(n, s1, s2, np.tanh(u))
    if row == 3:
        a = d.a_row
        s3, s4 = a - n - s, -(s + n + a)
        cm = 2.0 / np.expm1(2 * u)
        cp = 2.0 / -np.expm1(-2 * u)
        return _pw(cm, s3 / 2) * _pw(cp, s4 / 2) * jacobi_eval(n, s3, s4, 1.0 / np.tanh(u))
    if row == 4:
        cm = 2.0 * np.sinh(u / 2) ** 2
        cp = 2.0 * np.cosh(u / 2) ** 2
        jac = jacobi_eval(n, r - s - 0.5, -r - s - 0.5, np.cosh(u))
        return _pw(cm, (r - s) / 2) * _pw(cp, -(r + s) / 2) * jac
    if row == 5:
        t = np.sin(u)
        jac = jacobi_eval(n, s - r - 0.5, s + r - 0.5, t)
        return _pw(1 - t, (s - r) / 2) * _pw(1 + t, (s + r) / 2) * jac
    a = d.a_row
    jac = jacobi_eval(n, -s - n - 1j * a, -s - n + 1j * a, -1j * np.tan(u))
    return _pw(np.cos(u), s + n) * np.exp(a * u) * jac


def _nlo_shape(p, n, x):
    lam, al = p.lam, p.alpha
    y = math.sqrt(al) * np.asarray(x, dtype=float)
    if lam == 0:
        h = deformed_hermite(n).evaluate_array(y, 0)
        return h * np.exp(-0.5 * y * y) + 0j
    f = 1.0 + lam * np.asarray(x, dtype=float) ** 2
    h = deformed_hermite(n).evaluate_array(y, p.Lambda)
    return h * np.power(f, -0.5 / p.Lambda) + 0j


def _norm_e40(p, n):
    # N_n^2 = sqrt(lam) n! (s-n) G(s-ir-n+1/2) G(s+ir-n+1/2) 2^(2s) / (pi G(2s-n+1))
    k = p.k
    s = p.A / k
    r = p.B / k
    lg = (
        log_gamma(complex(s - n + 0.5, -r))
        + log_gamma(complex(s - n + 0.5, r))
        - log_gamma(2 * s - n + 1)
    ).real
    log_n2 = math.log(k) + math.lgamma(n + 1) + math.log(s - n) + lg + 2 * s * math.log(2.0) - math.log(math.pi)
    return math.exp(0.5 * log_n2)


def _nlo_norm(p, n):
    if p.lam == 0:
        return (math.sqrt(p.alpha) / (math.sqrt(math.pi) * 2**n * factorial(n))) ** 0.5
    # row 1 with B = 0, A = alpha/sqrt(lam); i^n P_n(i y sqrt(L)) = H_n / (n! (2 sqrt L)^n)
    row1 = ModelParams(A=p.alpha / math.sqrt(p.lam), B=0.0, lam=p.lam)
    return _norm_e40(row1, n) / (factorial(n) * (2.0 * math.sqrt(p.Lambda)) ** n)


def _quadrature_norm_sq(mid, p, n):
    desc = describe(mid, p)
    k = p.k if p.lam != 0 else math.sqrt(p.alpha)
    lo, hi = desc.z_domain

    def dens(z):
        return float(np.abs(wavefunction_z(mid, p, n, np.array([z]))[0]) ** 2)

    def integrate(a, b):
        pts = np.linspace(a, b, 9)
        total = 0.0
        for left, right in zip(pts[:-1], pts[1:]):
            total += quad(dens, left, right, limit=400, epsabs=0.0, epsrel=1e-12)[0]
        return total

    vals = []
    if math.isinf(hi):
        scales = (40.0, 80.0, 160.0)
        for L in scales:
            a = 0.0 if lo == 0.0 else -L / k
            vals.append(integrate(a, L / k))
    else:
        for eps in (1e-3, 1e-6, 1e-9):
            vals.append(integrate(lo + eps / k, hi - eps / k))
    if not all(math.isfinite(v) for v in vals) or vals[-1] <= 0:
        raise NonNormalizableError(f"{mid.value} level {n} is not normalizable")
    if abs(vals[-1] - vals[-2]) > 1e-7 * vals[-1]:
        raise NonNormalizableError(f"{mid.value} level {n}: norm does not converge under refinement")
    return vals[-1]


def normalization_constant(mid, p, n):
    """Factor N_n making the closed-form psi_n unit-normalized under dmu.

    Row 1 of the first table uses the closed form in terms of log-gamma;
    the oscillator uses the same expression through the Jacobi bridge
    (lam > 0) or the harmonic value (lam = 0); other families fall back
    to quadrature.
    """
    mid = ModelId(mid)
    validate(mid, p)
    _check_level(mid, p, n)
    if mid is ModelId.T1R1:
        return _norm_e40(p, n)
    if mid is ModelId.NLO and p.lam >= 0:
        return _nlo_norm(p, n)
    return 1.0 / math.sqrt(_quadrature_norm_sq(mid, p, n))


def wavefunction_eval(mid, p, n, x, normalized=None):
    """Closed-form psi_n(x).

    By default row 1 of the first table and the oscillator (lam >= 0) come
    normalized with their closed-form constants and everything else is
    returned unnormalized. ``normalized=True`` forces unit dmu-norm
    (by quadrature where no closed constant exists); ``False`` forces the
    bare form.
    """
    mid = ModelId(mid)
    validate(mid, p)
    _check_level(mid, p, n)
    x = _check_x(mid, p, x)
    desc = describe(mid, p)
    if normalized is None:
        normalized = desc.closed_normalization
    if mid is ModelId.NLO:
        out = _nlo_shape(p, n, x)
    else:
        out = wavefunction_z(mid, p, n, coordinate_map(x, p.lam))
    if normalized:
        out = out * normalization_constant(mid, p, n)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# numerical oracle
# ---------------------------------------------------------------------------


def default_z_grid(mid, p, npoints=numerics.DEFAULT_NPOINTS, scale=1.0):
    mid = ModelId(mid)
    desc = describe(mid, p)
    lo, hi = desc.z_domain
    if math.isinf(hi):
        k = p.k if p.lam != 0 else math.sqrt(p.alpha)
        L = 12.0 / k * scale
        if mid is ModelId.NLO and p.lam == 0:
            L = 12.0 / math.sqrt(p.alpha) * scale
        lo = 0.0 if lo == 0.0 else -L
        hi = L
    return numerics.Grid("z", lo, hi, npoints)


def default_x_grid(mid, p, npoints=120001, scale=1.0):
    """x-form grid. Power-law tails in x force a wide box: |x| <= 400/sqrt(lam)."""
    mid = ModelId(mid)
    desc = describe(mid, p)
    lo, hi = desc.domain
    if math.isinf(hi):
        X = 400.0 / (p.k if p.lam != 0 else math.sqrt(p.alpha)) * scale
        lo = 0.0 if lo == 0.0 else -X
        hi = X
    return numerics.Grid("x", lo, hi, npoints)


def numerical_spectrum(mid, p, k, form="z", npoints=None, scale=1.0, levels=None):
    """Lowest k eigenvalues of the discretized problem, Richardson-extrapolated.

    Hermitian families go through the tridiagonal path at 4001 points;
    complex families through the dense solver at 1201 points by default.
    For ``nlo`` the eigenvalues are converted to eps_m.
    """
    mid = ModelId(mid)
    desc = describe(mid, p)
    if npoints is None:
        if form == "x":
            npoints = 120001
        elif mid is ModelId.T1R3:
            # steep states next to the 1/z^2 wall need a finer, wider grid
            npoints, scale = 16001, 2.0 * scale
            levels = 3 if levels is None else levels
        else:
            npoints = numerics.DEFAULT_NPOINTS if desc.hermitian else numerics.DEFAULT_COMPLEX_NPOINTS
    if form == "z":
        grid = default_z_grid(mid, p, npoints, scale)

        def build(g):
            return numerics.build_operator_z(lambda z: potential_z(mid, p, z), g)
    elif form == "x":
        grid = default_x_grid(mid, p, npoints, scale)
        if mid is ModelId.NLO:
            def pot(x):
                return p.g * x * x / (1.0 + p.lam * x * x) + 0j
        else:
            def pot(x):
                return potential_eval(mid, p, x)

        def build(g):
            return numerics.build_operator_x(pot, p.lam, g)
    else:
        raise ValueError("form must be 'z' or 'x'")
    if levels is None:
        levels = 2 if desc.hermitian else 3
    vals, _ = numerics.richardson_eigenvalues(build, grid, k, levels=levels)
    if mid is ModelId.NLO:
        vals = vals / (2.0 * p.alpha)
    levels_out = tuple((n, complex(v)) for n, v in enumerate(vals))
    return Spectrum(levels_out, "numerical", desc.level_bound is not None)


def level_overlaps(mid, p, nmax, npoints=None):
    """dmu-overlap of each numerical eigenvector with the closed-form psi_n, n <= nmax.

    Levels are paired by sorted real part; an overlap above 0.9 confirms the
    pairing (a spurious box state near a continuum edge fails it).
    """
    mid = ModelId(mid)
    desc = describe(mid, p)
    bound = desc.level_bound
    top = nmax if bound is None else min(nmax, bound)
    if top < 0:
        return []
    if npoints is None:
        npoints = numerics.DEFAULT_NPOINTS if desc.hermitian else numerics.DEFAULT_COMPLEX_NPOINTS
    grid = default_z_grid(mid, p, npoints)
    op = numerics.build_operator_z(lambda z: potential_z(mid, p, z), grid)
    pairs = numerics.eigensolve(op, top + 1)
    out = []
    for n, (_, vec) in enumerate(pairs):
        ref = wavefunction_z(mid, p, n, grid.points)
        ref = np.where(np.isfinite(ref), ref, 0.0)
        ref[[0, -1]] = 0.0
        ref = numerics.GridFunction(grid, ref)
        nr = numerics.norm_mu(ref)
        if not (nr > 0 and math.isfinite(nr)):
            out.append(0.0)
            continue
        out.append(abs(numerics.inner_product_mu(vec, ref)) / (numerics.norm_mu(vec) * nr))
    return out


# ---------------------------------------------------------------------------
# harmonic limit
# ---------------------------------------------------------------------------


def harmonic_limit_report(alpha=1.0, lambdas=(1e-1, 1e-2, 1e-3, 1e-4), nmax=3, xmax=3.0, npoints=4001):
    """Deviation of row 1 (B = 0, A = alpha/sqrt(lam)) from the harmonic oscillator.

    Per lam: sup |V - (alpha^2 x^2 - alpha)| on [-xmax, xmax]; per level
    |E_n - (2 n alpha - n^2 lam)| and |E_n - 2 n alpha|; the dmu-overlap of
    psi_n with exp(-alpha x^2/2) H_n(sqrt(alpha) x); N'_n against its
    small-lam asymptote. lam = 0 is reported as the exact harmonic case.
    """
    rows = []
    xs = np.linspace(-xmax, xmax, 601)
    for lam in lambdas:
        row = {"lambda": float(lam)}
        nprime = []
        nprime_asym = []
        for n in range(nmax + 1):
            nprime_asym.append(((math.sqrt(alpha) - n * lam / math.sqrt(alpha)) / (math.sqrt(math.pi) * 2**n * factorial(n))) ** 0.5)
        if lam == 0:
            row["V_dev"] = 0.0
            row["E_dev"] = [0.0] * (nmax + 1)
            row["E_harmonic_dev"] = [0.0] * (nmax + 1)
            row["overlap"] = [1.0] * (nmax + 1)
            row["Nprime"] = [_nlo_norm(ModelParams(alpha=alpha, lam=0.0), n) for n in range(nmax + 1)]
            row["Nprime_asymptotic"] = nprime_asym
            rows.append(row)
            continue
        p = ModelParams(A=alpha / math.sqrt(lam), B=0.0, lam=lam)
        v = potential_eval(ModelId.T1R1, p, xs).real
        row["V_dev"] = float(np.max(np.abs(v - (alpha**2 * xs**2 - alpha))))
        edev, hdev, ovl = [], [], []
        L = 12.0 / math.sqrt(alpha)
        grid = numerics.Grid("x", -L, L, npoints)
        xg = grid.points
        for n in range(nmax + 1):
            e = energy_level(ModelId.T1R1, p, n)
            edev.append(abs(e - (2 * n * alpha - n * n * lam)))
            hdev.append(abs(e - 2 * n * alpha))
            psi = numerics.GridFunction(grid, wavefunction_eval(ModelId.T1R1, p, n, xg, normalized=False))
            h = np.polynomial.hermite.hermval(math.sqrt(alpha) * xg, [0] * n + [1])
            phi = numerics.GridFunction(grid, h * np.exp(-0.5 * alpha * xg**2))
            ip = numerics.inner_product_mu(psi, phi, lam)
            ovl.append(abs(ip) / (numerics.norm_mu(psi, lam) * numerics.norm_mu(phi, lam)))
            nprime.append(_norm_e40(p, n) / (factorial(n) * 2**n * (lam / alpha) ** (n / 2)))
        row["E_dev"] = edev
        row["E_harmonic_dev"] = hdev
        row["overlap"] = ovl
        row["Nprime"] = nprime
        row["Nprime_asymptotic"] = nprime_asym
        rows.append(row)
    return {"alpha": alpha, "rows": rows, "pi_quarter": math.pi**-0.25, "monotone": _monotone(rows)}


def monotone_summary(rows):
    """Whether V, the ground-state overlap and N'_0 approach their limits monotonically."""
    return _monotone(rows)


def _monotone(rows):
    finite = [r for r in rows]
    order = sorted(finite, key=lambda r: -r["lambda"])
    v = [r["V_dev"] for r in order]
    o = [1.0 - r["overlap"][0] for r in order]
    nd = [abs(r["Nprime"][0] - math.pi**-0.25) for r in order]
    ok = lambda seq: all(b <= a for a, b in zip(seq, seq[1:]))
    return {"V": ok(v), "overlap0": ok(o), "Nprime0": ok(nd)}


# ---------------------------------------------------------------------------
# JSON model specification
# ---------------------------------------------------------------------------

_MODEL_KEYS = {"model", "A", "B", "lambda", "alpha", "row4_compat"}


def model_from_json(obj):
    """(ModelId, ModelParams) from {"model", "A", "B", "lambda", "alpha"?, "row4_compat"?}."""
    unknown = set(obj) - _MODEL_KEYS
    if unknown:
        raise ConstraintError(f"unknown model keys: {sorted(unknown)}")
    if "model" not in obj:
        raise ConstraintError("model id missing")
    try:
        mid = ModelId(obj["model"])
    except ValueError as exc:
        raise ConstraintError(f"unknown model {obj['model']!r}") from exc
    p = ModelParams(
        A=float(obj.get("A", 0.0)),
        B=float(obj.get("B", 0.0)),
        lam=float(obj.get("lambda", 1.0)),
        alpha=float(obj.get("alpha", 1.0)),
        row4_compat=bool(obj.get("row4_compat", False)),
    )
    validate(mid, p)
    return mid, p


def model_to_json(mid, p):
    return {
        "model": ModelId(mid).value,
        "A": p.A,
        "B": p.B,
        "lambda": p.lam,
        "alpha": p.alpha,
        "row4_compat": p.row4_compat,
    }
