# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: Sturm bisection, tridiagonal inverse iteration, and
the complex Jacobi three-term recurrence evaluated over arrays."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

cdef double DBL_EPS = 2.220446049250313e-16
cdef double SAFE_MIN = 2.2250738585072014e-308


cdef inline Py_ssize_t _sturm_count(const double[::1] d, const double[::1] e2,
                                    double pivmin, double sigma) nogil:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, count = 0
    cdef double q = d[0] - sigma
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, n):
        q = d[i] - sigma - e2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def sturm_count(d, e, double sigma):
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below sigma."""
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef double[::1] e2 = np.ascontiguousarray(np.asarray(e, dtype=np.float64) ** 2)
    cdef double pivmin = SAFE_MIN * max(1.0, float(np.max(e2)) if e2.shape[0] else 1.0)
    return _sturm_count(dv, e2, pivmin, sigma)


def tridiag_eigvals(d, e, Py_ssize_t k, int maxiter=200):
    """Lowest k eigenvalues of a real symmetric tridiagonal matrix by bisection."""
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef double[::1] ev = np.ascontiguousarray(e, dtype=np.float64)
    cdef Py_ssize_t n = dv.shape[0]
    if k < 1 or k > n:
        raise ValueError("k must lie in [1, n]")
    e2_arr = np.ascontiguousarray(np.asarray(ev) ** 2)
    cdef double[::1] e2 = e2_arr
    cdef double pivmin = SAFE_MIN * max(1.0, float(np.max(e2_arr)) if n > 1 else 1.0)
    cdef double glo = 1e300, ghi = -1e300, r
    cdef Py_ssize_t i, j, it
    for i in range(n):
        r = 0.0
        if i > 0:
            r += fabs(ev[i - 1])
        if i < n - 1:
            r += fabs(ev[i])
        if dv[i] - r < glo:
            glo = dv[i] - r
        if dv[i] + r > ghi:
            ghi = dv[i] + r
    cdef double span = max(fabs(glo), fabs(ghi))
    glo -= 2.0 * DBL_EPS * span * n + pivmin
    ghi += 2.0 * DBL_EPS * span * n + pivmin
    out = np.empty(k, dtype=np.float64)
    cdef double[::1] o = out
    cdef double lo, hi, mid, tol
    with nogil:
        for j in range(k):
            lo = glo if j == 0 else o[j - 1] - 0.0
            if j > 0 and lo < glo:
                lo = glo
            # lower bracket must have count <= j
            if _sturm_count(dv, e2, pivmin, lo) > j:
                lo = glo
            hi = ghi
            for it in range(maxiter):
                mid = 0.5 * (lo + hi)
                tol = 2.0 * DBL_EPS * max(fabs(lo), fabs(hi)) + 4.0 * pivmin
                if hi - lo <= tol:
                    break
                if _sturm_count(dv, e2, pivmin, mid) > j:
                    hi = mid
                else:
                    lo = mid
            else:
                with gil:
                    raise ArithmeticError("bisection did not converge")
            o[j] = 0.5 * (lo + hi)
    return out


def tridiag_solve_shifted(d, e, double sigma, rhs):
    """Solve (T - sigma I) x = rhs with partial pivoting (T symmetric tridiagonal)."""
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef double[::1] ev = np.ascontiguousarray(e, dtype=np.float64)
    cdef Py_ssize_t n = dv.shape[0]
    x_arr = np.array(rhs, dtype=np.float64, copy=True)
    cdef double[::1] x = x_arr
    diag_arr = np.empty(n); up1_arr = np.zeros(n); up2_arr = np.zeros(n); low_arr = np.zeros(n)
    cdef double[::1] dg = diag_arr
    cdef double[::1] u1 = up1_arr
    cdef double[::1] u2 = up2_arr
    cdef double[::1] lw = low_arr
    ipiv_arr = np.zeros(n, dtype=np.int8)
    cdef signed char[::1] ipiv = ipiv_arr
    cdef Py_ssize_t i
    cdef double fact, temp, scale = 0.0
    for i in range(n):
        dg[i] = dv[i] - sigma
        scale = max(scale, fabs(dg[i]))
    for i in range(n - 1):
        lw[i] = ev[i]
        u1[i] = ev[i]
        scale = max(scale, fabs(ev[i]))
    cdef double tiny = DBL_EPS * max(scale, 1.0)
    with nogil:
        # LU with partial pivoting (dgttrf layout)
        for i in range(n - 1):
            if fabs(dg[i]) >= fabs(lw[i]):
                ipiv[i] = 0
                if fabs(dg[i]) < tiny:
                    dg[i] = tiny
                fact = lw[i] / dg[i]
                lw[i] = fact
                dg[i + 1] = dg[i + 1] - fact * u1[i]
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
        if fabs(dg[n - 1]) < tiny:
            dg[n - 1] = tiny
        # forward: L y = P b
        for i in range(n - 1):
            if ipiv[i] == 0:
                x[i + 1] = x[i + 1] - lw[i] * x[i]
            else:
                temp = x[i]
                x[i] = x[i + 1]
                x[i + 1] = temp - lw[i] * x[i]
        # backward: U x = y
        x[n - 1] = x[n - 1] / dg[n - 1]
        if n > 1:
            x[n - 2] = (x[n - 2] - u1[n - 2] * x[n - 1]) / dg[n - 2]
        for i in range(n - 3, -1, -1):
            x[i] = (x[i] - u1[i] * x[i + 1] - u2[i] * x[i + 2]) / dg[i]
    return x_arr


def jacobi_recurrence(int n, double complex alpha, double complex beta, x):
    """P_n^(alpha, beta)(x) for complex parameters over a complex array.

    Raises ZeroDivisionError when a leading recurrence coefficient vanishes.
    """
    cdef double complex[::1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    cdef Py_ssize_t m = xv.shape[0], i
    out_arr = np.ones(m, dtype=np.complex128)
    if n == 0:
        return out_arr
    prev_arr = np.ones(m, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex[::1] prev = prev_arr
    cdef double complex ab = alpha + beta
    cdef double complex a1, b1, b2, c1, t, p0, p1
    cdef int k
    for i in range(m):
        out[i] = 0.5 * (alpha - beta) + 0.5 * (ab + 2.0) * xv[i]
    for k in range(2, n + 1):
        a1 = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0)
        if abs(a1) <= 1e-8 * abs(2.0 * k * (2.0 * k + ab - 2.0)) * (abs(k) + abs(ab) + 1.0):
            raise ZeroDivisionError("degenerate Jacobi recurrence at degree %d" % k)
        b1 = (2.0 * k + ab - 1.0) * (2.0 * k + ab) * (2.0 * k + ab - 2.0)
        b2 = (2.0 * k + ab - 1.0) * (alpha * alpha - beta * beta)
        c1 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + ab)
        for i in range(m):
            p1 = out[i]
            p0 = prev[i]
            t = ((b1 * xv[i] + b2) * p1 - c1 * p0) / a1
            prev[i] = p1
            out[i] = t
    return out_arr
