"""Pure-Python versions of the hot kernels.

Same signatures and results as the compiled ``_kernels`` module; used when
the extension is not built or ``TWISTXXZ_PURE_PYTHON=1`` is set.
"""

import cmath
import math

import numpy as np

CONVERGED, STALLED, MAX_ITERS, SINGULAR_JACOBIAN, NONFINITE = 0, 1, 2, 3, 4

# residual scalings for the Newton map (bit flags): divide equation j by
# a(lam_j) d(lam_j), and/or by prod_{k != j} sinh(lam_j - lam_k) / sinh(eta)
SCALE_AD = 1
SCALE_SEP = 2


def lu_det(a):
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    m = [list(map(complex, row)) for row in a]
    det = 1 + 0j
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(m[r][k]))
        if m[p][k] == 0:
            return 0j
        if p != k:
            m[k], m[p] = m[p], m[k]
            det = -det
        pivot = m[k][k]
        det *= pivot
        row_k = m[k]
        for r in range(k + 1, n):
            f = m[r][k] / pivot
            if f != 0:
                row_r = m[r]
                for c in range(k + 1, n):
                    row_r[c] -= f * row_k[c]
    return det


def _solve(jac, rhs):
    n = len(rhs)
    m = [list(jac[i]) + [rhs[i]] for i in range(n)]
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(m[r][k]))
        if m[p][k] == 0:
            return None
        m[k], m[p] = m[p], m[k]
        for r in range(k + 1, n):
            f = m[r][k] / m[k][k]
            for c in range(k, n + 1):
                m[r][c] -= f * m[k][c]
    x = [0j] * n
    for k in range(n - 1, -1, -1):
        s = m[k][n] - sum(m[k][c] * x[c] for c in range(k + 1, n))
        x[k] = s / m[k][k]
    return x


def _eval(lam, th, eta, want_jac, mode=0):
    try:
        return _eval_raw(lam, th, eta, want_jac, mode)
    except (OverflowError, ZeroDivisionError):
        n = len(lam)
        bad = complex(math.inf, 0.0)
        return [bad] * n, ([[complex(math.nan, 0.0)] * n for _ in range(n)] if want_jac else None)


def _eval_raw(lam, th, eta, want_jac, mode):
    n = len(lam)
    se = cmath.sinh(eta)
    shift = sum(th) - sum(lam)
    res = [0j] * n
    jac = [[0j] * n for _ in range(n)] if want_jac else None
    for j in range(n):
        x = lam[j]
        # each factor is (value, gradient); gradients only when asked
        av, ag = 1 + 0j, [0j] * n
        dv, dg = 1 + 0j, [0j] * n
        qmv, qmg = 1 + 0j, [0j] * n
        qpv, qpg = 1 + 0j, [0j] * n
        for k in range(n):
            arg = x - th[k] + eta
            s, c = cmath.sinh(arg) / se, cmath.cosh(arg) / se
            if want_jac:
                ag = [g * s for g in ag]
                ag[j] += av * c
            av *= s
            arg = x - th[k]
            s, c = cmath.sinh(arg) / se, cmath.cosh(arg) / se
            if want_jac:
                dg = [g * s for g in dg]
                dg[j] += dv * c
            dv *= s
            arg = x - eta - lam[k]
            s, c = cmath.sinh(arg) / se, cmath.cosh(arg) / se
            if want_jac:
                qmg = [g * s for g in qmg]
                if k != j:
                    qmg[j] += qmv * c
                    qmg[k] -= qmv * c
            qmv *= s
            arg = x + eta - lam[k]
            s, c = cmath.sinh(arg) / se, cmath.cosh(arg) / se
            if want_jac:
                qpg = [g * s for g in qpg]
                if k != j:
                    qpg[j] += qpv * c
                    qpg[k] -= qpv * c
            qpv *= s
        e1 = cmath.exp(x)
        e2 = cmath.exp(-x - eta)
        cp = cmath.exp(x - n * eta + shift)
        cm = cmath.exp(-x - eta - shift)
        cv = cp - cm
        rj = e1 * av * qmv - e2 * dv * qpv - cv * av * dv

        # optional divisor and its logarithmic gradient
        div = 1 + 0j
        lg = [0j] * n
        if mode & SCALE_AD:
            div *= av * dv
            if want_jac:
                lg[j] += ag[j] / av + dg[j] / dv
        if mode & SCALE_SEP:
            for k in range(n):
                if k != j:
                    div *= cmath.sinh(x - lam[k]) / se
                    if want_jac:
                        ct = cmath.cosh(x - lam[k]) / cmath.sinh(x - lam[k])
                        lg[j] += ct
                        lg[k] -= ct
        res[j] = rj / div
        if want_jac:
            row = jac[j]
            for m in range(n):
                dx = 1.0 if m == j else 0.0
                g1 = e1 * dx * av * qmv + e1 * (ag[m] * qmv + av * qmg[m])
                g2 = -e2 * dx * dv * qpv + e2 * (dg[m] * qpv + dv * qpg[m])
                gc = cp * (dx - 1.0) - cm * (1.0 - dx)
                g3 = gc * av * dv + cv * (ag[m] * dv + av * dg[m])
                row[m] = (g1 - g2 - g3 - rj * lg[m]) / div
    return res, jac


def bae_residual(lam, th, eta, mode=0):
    lam = [complex(v) for v in lam]
    th = [complex(v) for v in th]
    return np.array(_eval(lam, th, complex(eta), False, mode)[0], dtype=complex)


def bae_residual_jacobian(lam, th, eta, mode=0):
    lam = [complex(v) for v in lam]
    th = [complex(v) for v in th]
    r, jac = _eval(lam, th, complex(eta), True, mode)
    return np.array(r, dtype=complex), np.array(jac, dtype=complex)


def _norm(r):
    return max(abs(v) for v in r) if r else 0.0


def newton_bae(x0, th, eta, max_iters, tol, max_halvings, mode=0):
    """Damped Newton on the Bethe equations.

    ``mode`` selects a residual scaling (see SCALE_AD, SCALE_SEP); the
    scalings remove the spurious zeros with roots pinned at theta_k,
    theta_k - eta or at each other.  The returned residual norm is that of
    the scaled map.  Returns ``(roots, residual_norm, iterations, status)``.
    """
    x = [complex(v) for v in x0]
    th = [complex(v) for v in th]
    eta = complex(eta)
    r, jac = _eval(x, th, eta, True, mode)
    nr = _norm(r)
    polish = 0
    for it in range(max_iters):
        if not all(cmath.isfinite(v) for v in r):
            return np.array(x), float("inf"), it, NONFINITE
        if nr <= tol:
            polish += 1
            if polish > 2:
                return np.array(x), nr, it, CONVERGED
        dx = _solve(jac, [-v for v in r])
        if dx is None:
            if nr <= tol:
                return np.array(x), nr, it, CONVERGED
            return np.array(x), nr, it, SINGULAR_JACOBIAN
        step = 1.0
        for _ in range(max_halvings + 1):
            xn = [xi + step * di for xi, di in zip(x, dx)]
            rn = _eval(xn, th, eta, False, mode)[0]
            nrn = _norm(rn)
            if nrn < nr:
                break
            step *= 0.5
        else:
            if nr <= tol:
                return np.array(x), nr, it, CONVERGED
            return np.array(x), nr, it, STALLED
        x = xn
        r, jac = _eval(x, th, eta, True, mode)
        nr = _norm(r)
    status = CONVERGED if nr <= tol else MAX_ITERS
    return np.array(x), nr, max_iters, status
