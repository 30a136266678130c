"""Special functions: complex log-gamma, Pochhammer symbols, Jacobi polynomials
with complex parameters, and the Lambda-deformed Hermite polynomials.

The deformed Hermite polynomials H_n(y, Lambda) are exact bivariate
polynomials with rational coefficients, built by three independent routes
(Rodrigues formula, generating function, three-term recursion).
"""

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from . import kernels

__all__ = [
    "BivariatePoly",
    "log_gamma",
    "pochhammer",
    "jacobi_eval",
    "deformed_hermite",
    "deformed_hermite_derivative_identity",
    "hermite_jacobi_bridge",
    "classical_hermite",
    "generating_normalization",
    "MAX_HERMITE_DEGREE",
    "MAX_JACOBI_DEGREE",
]

MAX_HERMITE_DEGREE = 24
MAX_JACOBI_DEGREE = 64


class DegreeLimitError(ValueError):
    pass


class PoleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# complex gamma
# ---------------------------------------------------------------------------

_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log_gamma(z):
    # valid for Re z >= 0.5
    z = z - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, _LANCZOS_G + 2):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex z.

    Arguments with Re z < 0.5 are shifted upward with the recurrence
    Gamma(z) = Gamma(z + m) / (z (z+1) ... (z+m-1)); summing principal logs
    keeps the result on the branch continuous off the negative real axis.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleError(f"log_gamma has a pole at {z.real:g}")
    if z.real >= 0.5:
        return _lanczos_log_gamma(z)
    m = int(math.ceil(0.5 - z.real))
    shift = 0j
    for k in range(m):
        shift += cmath.log(z + k)
    return _lanczos_log_gamma(z + m) - shift


def pochhammer(a, n):
    """Rising factorial (a)_n = a (a+1) ... (a+n-1) as a finite product."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(a, (Fraction, int)):
        out = Fraction(1)
    else:
        out = 1.0 if isinstance(a, float) else complex(1.0)
    for k in range(n):
        out *= a + k
    return out


# ---------------------------------------------------------------------------
# Jacobi polynomials
# ---------------------------------------------------------------------------


def _gen_binom(top, m):
    out = complex(1.0)
    for j in range(m):
        out *= (top - j) / (j + 1)
    return out


def _jacobi_explicit(n, alpha, beta, x):
    # sum over k of C(n+a, n-k) C(n+b, k) ((x-1)/2)^k ((x+1)/2)^(n-k);
    # polynomial in (alpha, beta), so it stays defined where the recurrence degenerates
    xm = (x - 1.0) / 2.0
    xp = (x + 1.0) / 2.0
    out = np.zeros_like(x)
    for k in range(n + 1):
        out = out + _gen_binom(n + alpha, n - k) * _gen_binom(n + beta, k) * xm**k * xp ** (n - k)
    return out


def jacobi_eval(n, alpha, beta, x):
    """Jacobi polynomial P_n^(alpha, beta)(x) with complex parameters and argument.

    Uses the forward three-term recurrence in the degree; when a recurrence
    denominator vanishes for the given parameters the explicit binomial sum
    is used instead. Accepts scalars or arrays.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n > MAX_JACOBI_DEGREE:
        raise DegreeLimitError(f"degree {n} exceeds {MAX_JACOBI_DEGREE}")
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=complex)).ravel()
    try:
        val = kernels.jacobi_recurrence(int(n), complex(alpha), complex(beta), xa)
    except ZeroDivisionError:
        val = _jacobi_explicit(int(n), complex(alpha), complex(beta), xa)
    if scalar:
        return complex(val[0])
    return np.asarray(val).reshape(np.shape(x))


# ---------------------------------------------------------------------------
# exact bivariate polynomials
# ---------------------------------------------------------------------------


class BivariatePoly:
    """Exact polynomial in (y, Lambda) with rational coefficients.

    Coefficients live in a dict keyed by (degree in y, degree in Lambda).
    Zero coefficients are never stored.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for key, v in coeffs.items():
                v = Fraction(v)
                if v:
                    c[(int(key[0]), int(key[1]))] = v
        self._c = c

    @classmethod
    def constant(cls, v):
        return cls({(0, 0): v})

    @classmethod
    def y(cls):
        return cls({(1, 0): 1})

    @classmethod
    def lam(cls):
        return cls({(0, 1): 1})

    @classmethod
    def linear_lambda(cls, a, b):
        """a + b*Lambda."""
        return cls({(0, 0): a, (0, 1): b})

    @property
    def coeffs(self):
        return dict(self._c)

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BivariatePoly.constant(other)
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        if not self._c:
            return "BivariatePoly(0)"
        terms = []
        for (dy, dl), v in sorted(self._c.items(), reverse=True):
            terms.append(f"{v}*y^{dy}*L^{dl}")
        return "BivariatePoly(" + " + ".join(terms) + ")"

    def _coerce(self, other):
        if isinstance(other, BivariatePoly):
            return other
        return BivariatePoly.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return BivariatePoly(c)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BivariatePoly({k: v * other for k, v in self._c.items()})
        other = self._coerce(other)
        c = {}
        for (a1, b1), v1 in self._c.items():
            for (a2, b2), v2 in other._c.items():
                key = (a1 + a2, b1 + b2)
                c[key] = c.get(key, 0) + v1 * v2
        return BivariatePoly(c)

    __rmul__ = __mul__

    def d_dy(self):
        return BivariatePoly({(dy - 1, dl): v * dy for (dy, dl), v in self._c.items() if dy})

    def degree_y(self):
        return max((k[0] for k in self._c), default=-1)

    def degree_lambda(self):
        return max((k[1] for k in self._c), default=-1)

    def at_lambda(self, lam):
        """Specialize Lambda; returns {degree in y: coefficient}."""
        lam = Fraction(lam)
        out = {}
        for (dy, dl), v in self._c.items():
            out[dy] = out.get(dy, 0) + v * lam**dl
        return {k: v for k, v in out.items() if v}

    def evaluate(self, y, lam):
        """Value at real (y, Lambda), computed exactly and rounded once."""
        yf = Fraction(y)
        lf = Fraction(lam)
        total = Fraction(0)
        for (dy, dl), v in self._c.items():
            total += v * yf**dy * lf**dl
        return float(total)

    def evaluate_array(self, y, lam):
        """Floating-point evaluation over an array of y at fixed Lambda."""
        coeffs = self.at_lambda(lam)
        if not coeffs:
            return np.zeros_like(np.asarray(y, dtype=float))
        deg = max(coeffs)
        c = [float(coeffs.get(k, 0)) for k in range(deg, -1, -1)]
        return np.polyval(c, np.asarray(y, dtype=float))

    def div_lambda(self, divisor):
        """Exact division by a univariate polynomial in Lambda.

        ``divisor`` lists coefficients in increasing Lambda degree. Raises
        ArithmeticError when the division leaves a remainder.
        """
        div = [Fraction(v) for v in divisor]
        while div and div[-1] == 0:
            div.pop()
        if not div:
            raise ZeroDivisionError("division by the zero polynomial")
        deg = len(div) - 1
        lead = div[-1]
        by_y = {}
        for (dy, dl), v in self._c.items():
            by_y.setdefault(dy, {})[dl] = v
        out = {}
        for dy, col in by_y.items():
            rem = [col.get(i, Fraction(0)) for i in range(max(col) + 1)]
            for top in range(len(rem) - 1, deg - 1, -1):
                q = rem[top] / lead
                if q:
                    out[(dy, top - deg)] = q
                    for j, dv in enumerate(div):
                        rem[top - deg + j] -= q * dv
            if any(rem[:deg]):
                raise ArithmeticError("polynomial is not divisible by the given factor")
        return BivariatePoly(out)

    def to_json(self):
        terms = [
            {"dy": dy, "dL": dl, "num": str(v.numerator), "den": str(v.denominator)}
            for (dy, dl), v in sorted(self._c.items())
        ]
        return {"terms": terms}

    @classmethod
    def from_json(cls, obj):
        return cls({(t["dy"], t["dL"]): Fraction(int(t["num"]), int(t["den"])) for t in obj["terms"]})


# ---------------------------------------------------------------------------
# Lambda-deformed Hermite polynomials
# ---------------------------------------------------------------------------

_Y = BivariatePoly.y()
_ZY = BivariatePoly({(0, 0): 1, (2, 1): 1})  # 1 + Lambda y^2


def _check_degree(n):
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n > MAX_HERMITE_DEGREE:
        raise DegreeLimitError(f"degree {n} exceeds {MAX_HERMITE_DEGREE}")


@lru_cache(maxsize=None)
def _rodrigues(n):
    # d^k/dy^k z^q = z^(q-k) P_k with q = n - 1/Lambda - 1/2, and
    # P_{k+1} = (2(n-k)Lambda - 2 - Lambda) y P_k + z P_k'; the 1/Lambda in q
    # only ever appears multiplied by Lambda, so no denominators arise
    p = BivariatePoly.constant(1)
    for k in range(n):
        factor = BivariatePoly.linear_lambda(-2, 2 * (n - k) - 1)
        p = factor * _Y * p + _ZY * p.d_dy()
    return p if n % 2 == 0 else -p


def _generating_coefficient(n):
    """n! times the t^n coefficient of (1 + Lambda(2ty - t^2))^(1/Lambda)."""
    total = BivariatePoly()
    for k in range((n + 1) // 2, n + 1):
        # binom(1/Lambda, k) Lambda^k = prod_{j<k} (1 - j Lambda) / k!
        ck = BivariatePoly.constant(1)
        for j in range(k):
            ck = ck * BivariatePoly.linear_lambda(1, -j)
        coef = Fraction(factorial(n) * comb(k, n - k) * 2 ** (2 * k - n) * (-1) ** (n - k), factorial(k))
        total = total + ck * BivariatePoly({(2 * k - n, 0): coef})
    return total


def generating_normalization(n, uncorrected=False):
    """Factor turning n! [t^n] F(t, y, Lambda) into H_n.

    Returns (numerator factors, denominator factors), each a list of
    ``(a, b)`` pairs meaning ``a + b*Lambda``.

    With ``uncorrected=True`` this is 2^n (1/2 - 1/Lambda)_n / (-1/Lambda)_n, the
    normalization obtained by reading off the expansion coefficients directly;
    it does not reproduce the Rodrigues polynomials for n >= 1. The default
    is the normalization that does:
    prod_{k=floor(n/2)}^{n-1} (1 - (k + 1/2) Lambda) / prod_{j=1}^{floor((n-1)/2)} (1 - j Lambda).
    """
    if uncorrected:
        num = [(Fraction(-1), Fraction(2 * j + 1, 2)) for j in range(n)]
        num.append((Fraction(2**n), Fraction(0)))
        den = [(Fraction(-1), Fraction(j)) for j in range(n)]
        return num, den
    num = [(Fraction(1), Fraction(-(2 * k + 1), 2)) for k in range(n // 2, n)]
    den = [(Fraction(1), Fraction(-j)) for j in range(1, (n - 1) // 2 + 1)]
    return num, den


@lru_cache(maxsize=None)
def _generating(n, uncorrected=False):
    p = _generating_coefficient(n)
    num, den = generating_normalization(n, uncorrected=uncorrected)
    for a, b in num:
        p = p * BivariatePoly.linear_lambda(a, b)
    for a, b in den:
        p = p.div_lambda([a, b])
    return p


@lru_cache(maxsize=None)
def _recursion(n):
    h_prev, h = BivariatePoly.constant(1), BivariatePoly({(1, 0): 2, (1, 1): -1})
    if n == 0:
        return h_prev
    for m in range(1, n):
        # (Lambda(2m+1)-2) [2(1-m Lambda) y H_m + (Lambda(2m-1)-2) m H_{m-1}] = (m Lambda - 2) H_{m+1}
        left = BivariatePoly.linear_lambda(-2, 2 * m + 1)
        inner = 2 * BivariatePoly.linear_lambda(1, -m) * _Y * h + m * BivariatePoly.linear_lambda(-2, 2 * m - 1) * h_prev
        h_next = (left * inner).div_lambda([-2, m])
        h_prev, h = h, h_next
    return h


def deformed_hermite(n, route="rodrigues"):
    """The Lambda-deformed Hermite polynomial H_n(y, Lambda) as an exact polynomial.

    ``route`` selects the construction: ``"rodrigues"``, ``"generating"`` or
    ``"recursion"``. All three return the same polynomial.
    """
    _check_degree(n)
    if route == "rodrigues":
        return _rodrigues(n)
    if route == "generating":
        return _generating(n)
    if route == "recursion":
        return _recursion(n)
    raise ValueError(f"unknown route {route!r}")


def classical_hermite(n):
    """Physicists' Hermite polynomial H_n as {degree: integer coefficient}."""
    out = {}
    for m in range(n // 2 + 1):
        out[n - 2 * m] = (-1) ** m * factorial(n) * 2 ** (n - 2 * m) // (factorial(m) * factorial(n - 2 * m))
    return out


def deformed_hermite_derivative_identity(n, uncorrected=False):
    """Residual of the derivative relation among H_n, H_n', H_{n-1}', H_{n-2}'.

    The identity checked is
        (L(n-2)-2) [2(L(2n-1)-2) n H_{n-1} - (L(n-1)-2) H_n']
          = n L (L(2n-1)-2) [2(L(n-2)-2) y H_{n-1}' - (n-1)(L(2n-3)-2) H_{n-2}'].
    ``uncorrected=True`` uses H_n in place of H_{n-1} in the first bracket, which
    does not hold. Returns the residual polynomial (zero when the identity holds).
    """
    if n < 2 or n > MAX_HERMITE_DEGREE:
        raise DegreeLimitError("derivative identity is defined for 2 <= n <= 24")
    h = [deformed_hermite(k) for k in (n - 2, n - 1, n)]
    first = h[2] if uncorrected else h[1]
    lam = BivariatePoly.linear_lambda
    lhs = lam(-2, n - 2) * (2 * n * lam(-2, 2 * n - 1) * first - lam(-2, n - 1) * h[2].d_dy())
    rhs = (
        n
        * BivariatePoly.lam()
        * lam(-2, 2 * n - 1)
        * (2 * lam(-2, n - 2) * _Y * h[1].d_dy() - (n - 1) * lam(-2, 2 * n - 3) * h[0].d_dy())
    )
    return lhs - rhs


def sqrt_lambda(lam):
    """sqrt(Lambda) with the convention sqrt(Lambda) = i sqrt(|Lambda|) for Lambda < 0."""
    return complex(math.sqrt(lam)) if lam >= 0 else 1j * math.sqrt(-lam)


def hermite_jacobi_bridge(n, y, lam):
    """Both sides of P_n^(a,a)(i y sqrt(Lambda)) = (1/n!) (1/(2 i sqrt(Lambda)))^n H_n(y, Lambda),
    with a = -1/2 - 1/Lambda. Returns (lhs, rhs)."""
    _check_degree(n)
    if lam == 0:
        raise ValueError("Lambda must be non-zero")
    a = -0.5 - 1.0 / lam
    sl = sqrt_lambda(lam)
    arg = 1j * y * sl
    if lam < 0:
        arg = complex(arg.real, 0.0)
    lhs = jacobi_eval(n, a, a, arg)
    hval = deformed_hermite(n).evaluate(y, lam)
    rhs = hval / factorial(n) * (1.0 / (2j * sl)) ** n
    return lhs, rhs
