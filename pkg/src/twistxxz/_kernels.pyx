# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: LU determinant and the Bethe-equation Newton loop.

Mirrors ``_kernels_py`` exactly; see that module for the reference logic.
"""

import numpy as np

from libc.math cimport sinh as rsinh, cosh as rcosh, exp as rexp, sin, cos, hypot, isfinite
from libc.stdlib cimport malloc, free

cdef enum:
    SCALE_AD = 1
    SCALE_SEP = 2

cdef enum:
    CONVERGED = 0
    STALLED = 1
    MAX_ITERS = 2
    SINGULAR_JACOBIAN = 3
    NONFINITE = 4


cdef inline double cabs_(double complex z) noexcept nogil:
    return hypot(z.real, z.imag)


cdef inline double complex cexp_(double complex z) noexcept nogil:
    cdef double m = rexp(z.real)
    return m * cos(z.imag) + 1j * (m * sin(z.imag))


cdef inline double complex csinh_(double complex z) noexcept nogil:
    return rsinh(z.real) * cos(z.imag) + 1j * (rcosh(z.real) * sin(z.imag))


cdef inline double complex ccosh_(double complex z) noexcept nogil:
    return rcosh(z.real) * cos(z.imag) + 1j * (rsinh(z.real) * sin(z.imag))


def lu_det(double complex[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef double complex[:, ::1] m = np.array(a, dtype=np.complex128, order="C")
    cdef double complex det = 1.0, pivot, f, tmp
    cdef Py_ssize_t k, r, c, p
    cdef double best, v
    with nogil:
        for k in range(n):
            p = k
            best = cabs_(m[k, k])
            for r in range(k + 1, n):
                v = cabs_(m[r, k])
                if v > best:
                    best = v
                    p = r
            if best == 0.0:
                det = 0
                break
            if p != k:
                for c in range(n):
                    tmp = m[k, c]
                    m[k, c] = m[p, c]
                    m[p, c] = tmp
                det = -det
            pivot = m[k, k]
            det = det * pivot
            for r in range(k + 1, n):
                f = m[r, k] / pivot
                if f != 0:
                    for c in range(k + 1, n):
                        m[r, c] = m[r, c] - f * m[k, c]
    return det


cdef void _eval(int n, double complex* lam, double complex* th, double complex eta,
                double complex* res, double complex* jac, double complex* work,
                int mode) noexcept nogil:
    # work holds 5*n slots; jac is row-major n*n or NULL
    # mode bits: SCALE_AD divides equation j by a(lam_j) d(lam_j),
    # SCALE_SEP by prod_{k != j} sinh(lam_j - lam_k) / sinh(eta)
    cdef double complex se = csinh_(eta)
    cdef double complex shift = 0
    cdef double complex x, arg, s, c, av, dv, qmv, qpv, e1, e2, cp, cm, cv
    cdef double complex g1, g2, g3, gc, rj, dvsr, ct
    cdef double complex* lg = NULL
    cdef double complex* ag = work
    cdef double complex* dg = work + n
    cdef double complex* qmg = work + 2 * n
    cdef double complex* qpg = work + 3 * n
    cdef int want = jac != NULL
    cdef int j, k, m
    cdef double dx
    if want:
        lg = work + 4 * n
    for k in range(n):
        shift = shift + th[k] - lam[k]
    for j in range(n):
        x = lam[j]
        av = 1
        dv = 1
        qmv = 1
        qpv = 1
        if want:
            for m in range(n):
                ag[m] = 0
                dg[m] = 0
                qmg[m] = 0
                qpg[m] = 0
        for k in range(n):
            arg = x - th[k] + eta
            s = csinh_(arg) / se
            if want:
                c = ccosh_(arg) / se
                for m in range(n):
                    ag[m] = ag[m] * s
                ag[j] = ag[j] + av * c
            av = av * s

            arg = x - th[k]
            s = csinh_(arg) / se
            if want:
                c = ccosh_(arg) / se
                for m in range(n):
                    dg[m] = dg[m] * s
                dg[j] = dg[j] + dv * c
            dv = dv * s

            arg = x - eta - lam[k]
            s = csinh_(arg) / se
            if want:
                c = ccosh_(arg) / se
                for m in range(n):
                    qmg[m] = qmg[m] * s
                if k != j:
                    qmg[j] = qmg[j] + qmv * c
                    qmg[k] = qmg[k] - qmv * c
            qmv = qmv * s

            arg = x + eta - lam[k]
            s = csinh_(arg) / se
            if want:
                c = ccosh_(arg) / se
                for m in range(n):
                    qpg[m] = qpg[m] * s
                if k != j:
                    qpg[j] = qpg[j] + qpv * c
                    qpg[k] = qpg[k] - qpv * c
            qpv = qpv * s
        e1 = cexp_(x)
        e2 = cexp_(-x - eta)
        cp = cexp_(x - n * eta + shift)
        cm = cexp_(-x - eta - shift)
        cv = cp - cm
        rj = e1 * av * qmv - e2 * dv * qpv - cv * av * dv
        dvsr = 1
        if want:
            for m in range(n):
                lg[m] = 0
        if mode & SCALE_AD:
            dvsr = dvsr * av * dv
            if want:
                lg[j] = lg[j] + ag[j] / av + dg[j] / dv
        if mode & SCALE_SEP:
            for k in range(n):
                if k != j:
                    s = csinh_(x - lam[k])
                    dvsr = dvsr * s / se
                    if want:
                        ct = ccosh_(x - lam[k]) / s
                        lg[j] = lg[j] + ct
                        lg[k] = lg[k] - ct
        res[j] = rj / dvsr
        if want:
            for m in range(n):
                dx = 1.0 if m == j else 0.0
                g1 = e1 * dx * av * qmv + e1 * (ag[m] * qmv + av * qmg[m])
                g2 = -e2 * dx * dv * qpv + e2 * (dg[m] * qpv + dv * qpg[m])
                gc = cp * (dx - 1.0) - cm * (1.0 - dx)
                g3 = gc * av * dv + cv * (ag[m] * dv + av * dg[m])
                jac[j * n + m] = (g1 - g2 - g3 - rj * lg[m]) / dvsr


cdef int _solve(int n, double complex* a, double complex* b) noexcept nogil:
    # in-place Gaussian elimination with partial pivoting; solution left in b
    cdef int k, r, c, p
    cdef double best, v
    cdef double complex f, tmp
    for k in range(n):
        p = k
        best = cabs_(a[k * n + k])
        for r in range(k + 1, n):
            v = cabs_(a[r * n + k])
            if v > best:
                best = v
                p = r
        if best == 0.0:
            return 0
        if p != k:
            for c in range(n):
                tmp = a[k * n + c]
                a[k * n + c] = a[p * n + c]
                a[p * n + c] = tmp
            tmp = b[k]
            b[k] = b[p]
            b[p] = tmp
        for r in range(k + 1, n):
            f = a[r * n + k] / a[k * n + k]
            for c in range(k, n):
                a[r * n + c] = a[r * n + c] - f * a[k * n + c]
            b[r] = b[r] - f * b[k]
    for k in range(n - 1, -1, -1):
        tmp = b[k]
        for c in range(k + 1, n):
            tmp = tmp - a[k * n + c] * b[c]
        b[k] = tmp / a[k * n + k]
    return 1


cdef double _norm(int n, double complex* r) noexcept nogil:
    cdef double out = 0.0, v
    cdef int k
    for k in range(n):
        v = cabs_(r[k])
        if not isfinite(v):
            return v
        if v > out:
            out = v
    return out


def bae_residual(lam, th, double complex eta, int mode=0):
    cdef double complex[::1] x = np.ascontiguousarray(lam, dtype=np.complex128)
    cdef double complex[::1] t = np.ascontiguousarray(th, dtype=np.complex128)
    cdef int n = x.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    if n == 0:
        return out
    _eval(n, &x[0], &t[0], eta, &o[0], NULL, NULL, mode)
    return out


def bae_residual_jacobian(lam, th, double complex eta, int mode=0):
    cdef double complex[::1] x = np.ascontiguousarray(lam, dtype=np.complex128)
    cdef double complex[::1] t = np.ascontiguousarray(th, dtype=np.complex128)
    cdef int n = x.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    jac = np.zeros((n, n), dtype=np.complex128)
    work = np.zeros(5 * max(n, 1), dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double complex[:, ::1] jv = jac
    cdef double complex[::1] w = work
    if n == 0:
        return out, jac
    _eval(n, &x[0], &t[0], eta, &o[0], &jv[0, 0], &w[0], mode)
    return out, jac


def newton_bae(x0, th, double complex eta, int max_iters, double tol, int max_halvings,
               int mode=0):
    cdef double complex[::1] t = np.ascontiguousarray(th, dtype=np.complex128)
    cdef int n = t.shape[0]
    x_arr = np.array(x0, dtype=np.complex128)
    cdef double complex[::1] x = x_arr
    cdef double complex* xn = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* r = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* rn = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* jac = <double complex*> malloc(n * n * sizeof(double complex))
    cdef double complex* dx = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* work = <double complex*> malloc(5 * n * sizeof(double complex))
    cdef int it = 0, h, k, polish = 0, status = MAX_ITERS, accepted
    cdef double nr, nrn, step
    try:
        with nogil:
            _eval(n, &x[0], &t[0], eta, r, jac, work, mode)
            nr = _norm(n, r)
            while it < max_iters:
                if not isfinite(nr):
                    status = NONFINITE
                    break
                if nr <= tol:
                    polish += 1
                    if polish > 2:
                        status = CONVERGED
                        break
                for k in range(n):
                    dx[k] = -r[k]
                if not _solve(n, jac, dx):
                    status = CONVERGED if nr <= tol else SINGULAR_JACOBIAN
                    break
                step = 1.0
                accepted = 0
                for h in range(max_halvings + 1):
                    for k in range(n):
                        xn[k] = x[k] + step * dx[k]
                    _eval(n, xn, &t[0], eta, rn, NULL, NULL, mode)
                    nrn = _norm(n, rn)
                    if nrn < nr:
                        accepted = 1
                        break
                    step = step * 0.5
                if not accepted:
                    status = CONVERGED if nr <= tol else STALLED
                    break
                for k in range(n):
                    x[k] = xn[k]
                _eval(n, &x[0], &t[0], eta, r, jac, work, mode)
                nr = _norm(n, r)
                it += 1
            else:
                status = CONVERGED if nr <= tol else MAX_ITERS
        if status == NONFINITE:
            nr = float("inf")
        return x_arr, nr, it, status
    finally:
        free(xn)
        free(r)
        free(rn)
        free(jac)
        free(dx)
        free(work)
