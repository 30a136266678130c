"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Signatures and semantics match the extension exactly; only speed differs.
"""

import numpy as np

DBL_EPS = np.finfo(float).eps
SAFE_MIN = np.finfo(float).tiny


def _pivmin(e2):
    return SAFE_MIN * max(1.0, float(np.max(e2)) if e2.size else 1.0)


def _counts(d, e2, pivmin, sigmas):
    # vectorised over shifts, sequential over rows
    q = d[0] - sigmas
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, d.size):
        q = d[i] - sigmas - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def sturm_count(d, e, sigma):
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below sigma."""
    d = np.asarray(d, dtype=float)
    e2 = np.asarray(e, dtype=float) ** 2
    return int(_counts(d, e2, _pivmin(e2), np.array([float(sigma)]))[0])


def tridiag_eigvals(d, e, k, maxiter=200):
    """Lowest k eigenvalues of a real symmetric tridiagonal matrix by bisection."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.size
    if k < 1 or k > n:
        raise ValueError("k must lie in [1, n]")
    e2 = e**2
    pivmin = _pivmin(e2)
    r = np.zeros(n)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    glo = float(np.min(d - r))
    ghi = float(np.max(d + r))
    span = max(abs(glo), abs(ghi))
    glo -= 2.0 * DBL_EPS * span * n + pivmin
    ghi += 2.0 * DBL_EPS * span * n + pivmin
    idx = np.arange(k)
    lo = np.full(k, glo)
    hi = np.full(k, ghi)
    for _ in range(maxiter):
        tol = 2.0 * DBL_EPS * np.maximum(np.abs(lo), np.abs(hi)) + 4.0 * pivmin
        active = hi - lo > tol
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        c = _counts(d, e2, pivmin, mid)
        above = (c > idx) & active
        below = (~(c > idx)) & active
        hi = np.where(above, mid, hi)
        lo = np.where(below, mid, lo)
    else:
        raise ArithmeticError("bisection did not converge")
    return 0.5 * (lo + hi)


def tridiag_solve_shifted(d, e, sigma, rhs):
    """Solve (T - sigma I) x = rhs with partial pivoting (T symmetric tridiagonal)."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.size
    x = np.array(rhs, dtype=float, copy=True)
    dg = (d - sigma).tolist()
    lw = e.tolist() + [0.0]
    u1 = e.tolist() + [0.0]
    u2 = [0.0] * n
    ipiv = [0] * n
    scale = max(float(np.max(np.abs(d - sigma))), float(np.max(np.abs(e))) if n > 1 else 0.0)
    tiny = DBL_EPS * max(scale, 1.0)
    for i in range(n - 1):
        if abs(dg[i]) >= abs(lw[i]):
            if abs(dg[i]) < tiny:
                dg[i] = tiny
            fact = lw[i] / dg[i]
            lw[i] = fact
            dg[i + 1] -= fact * u1[i]
        else:
            ipiv[i] = 1
            fact = dg[i] / lw[i]
            dg[i] = lw[i]
            lw[i] = fact
            temp = u1[i]
            u1[i] = dg[i + 1]
            dg[i + 1] = temp - fact * dg[i + 1]
            if i < n - 2:
                u2[i] = u1[i + 1]
                u1[i + 1] = -fact * u1[i + 1]
    if abs(dg[n - 1]) < tiny:
        dg[n - 1] = tiny
    xs = x.tolist()
    for i in range(n - 1):
        if ipiv[i] == 0:
            xs[i + 1] -= lw[i] * xs[i]
        else:
            temp = xs[i]
            xs[i] = xs[i + 1]
            xs[i + 1] = temp - lw[i] * xs[i]
    xs[n - 1] /= dg[n - 1]
    if n > 1:
        xs[n - 2] = (xs[n - 2] - u1[n - 2] * xs[n - 1]) / dg[n - 2]
    for i in range(n - 3, -1, -1):
        xs[i] = (xs[i] - u1[i] * xs[i + 1] - u2[i] * xs[i + 2]) / dg[i]
    return np.array(xs)


def jacobi_recurrence(n, alpha, beta, x):
    """P_n^(alpha, beta)(x) for complex parameters over a complex array.

    Raises ZeroDivisionError when a leading recurrence coefficient vanishes.
    """
    x = np.ascontiguousarray(x, dtype=complex)
    alpha = complex(alpha)
    beta = complex(beta)
    if n == 0:
        return np.ones_like(x)
    ab = alpha + beta
    prev = np.ones_like(x)
    # this form avoids cancellation near x = 0
    out = 0.5 * (alpha - beta) + 0.5 * (ab + 2.0) * x
    for k in range(2, n + 1):
        a1 = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0)
        if abs(a1) <= 1e-8 * abs(2.0 * k * (2.0 * k + ab - 2.0)) * (k + abs(ab) + 1.0):
            raise ZeroDivisionError(f"degenerate Jacobi recurrence at degree {k}")
        b1 = (2.0 * k + ab - 1.0) * (2.0 * k + ab) * (2.0 * k + ab - 2.0)
        b2 = (2.0 * k + ab - 1.0) * (alpha * alpha - beta * beta)
        c1 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + ab)
        prev, out = out, ((b1 * x + b2) * out - c1 * prev) / a1
    return out
