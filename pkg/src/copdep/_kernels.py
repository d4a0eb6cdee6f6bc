"""Compiled inner loops for the smoothers and the ACE iteration.

All arrays passed in are float64 / int64; ``order`` maps sorted position to
original index.  Functions release the GIL so replications can run on threads.
"""

import numpy as np
from numba import njit

RUNNING_MEAN = 0
SUPSMU = 1

_SPANS = (0.05, 0.2, 0.5)
_BIG = 1e20
_SML = 1e-7
_EPS = 1e-3


@njit(cache=True, nogil=True)
def running_mean(z, order, lo, hi, out, cs):
    n = z.shape[0]
    # offset by one sample so a constant input sums to exact zeros
    ref = z[order[0]]
    cs[0] = 0.0
    for j in range(n):
        cs[j + 1] = cs[j] + (z[order[j]] - ref)
    for j in range(n):
        out[order[j]] = (cs[hi[j]] - cs[lo[j]]) / (hi[j] - lo[j]) + ref


@njit(cache=True, nogil=True)
def _smooth_lines(x, y, span, want_cv, smo, acvr):
    """Running-lines smoother of Friedman (1984) on sorted ``x``, unit weights."""
    n = x.shape[0]
    xm = 0.0
    ym = 0.0
    var = 0.0
    cvar = 0.0
    fbw = 0.0
    ibw = int(0.5 * span * n + 0.5)
    if ibw < 2:
        ibw = 2
    it = 2 * ibw + 1
    if it > n:
        it = n
    scale = x[3 * (n // 4)] - x[n // 4]
    vsmlsq = (_EPS * scale) ** 2
    for i in range(it):
        xti = x[i]
        fbo = fbw
        fbw += 1.0
        xm = (fbo * xm + xti) / fbw
        ym = (fbo * ym + y[i]) / fbw
        tmp = 0.0
        if fbo > 0:
            tmp = fbw * (xti - xm) / fbo
        var += tmp * (xti - xm)
        cvar += tmp * (y[i] - ym)
    for j in range(n):
        out = j - ibw - 1
        inn = j + ibw
        if out >= 0 and inn < n:
            xto = x[out]
            xti = x[inn]
            fbo = fbw
            fbw -= 1.0
            tmp = 0.0
            if fbw > 0:
                tmp = fbo * (xto - xm) / fbw
            var -= tmp * (xto - xm)
            cvar -= tmp * (y[out] - ym)
            if fbw > 0:
                xm = (fbo * xm - xto) / fbw
                ym = (fbo * ym - y[out]) / fbw
            fbo = fbw
            fbw += 1.0
            xm = (fbo * xm + xti) / fbw
            ym = (fbo * ym + y[inn]) / fbw
            tmp = 0.0
            if fbo > 0:
                tmp = fbw * (xti - xm) / fbo
            var += tmp * (xti - xm)
            cvar += tmp * (y[inn] - ym)
        a = 0.0
        if var > vsmlsq:
            a = cvar / var
        smo[j] = a * (x[j] - xm) + ym
        if want_cv:
            h = 1.0 / fbw
            if var > vsmlsq:
                h += (x[j] - xm) ** 2 / var
            acvr[j] = 0.0
            a = 1.0 - h
            if a > 0:
                acvr[j] = abs(y[j] - smo[j]) / a
            elif j > 0:
                acvr[j] = acvr[j - 1]
    # tied x share the average fitted value
    j = 0
    while j < n:
        j0 = j
        sy = smo[j]
        cnt = 1.0
        while j + 1 < n and x[j + 1] <= x[j]:
            j += 1
            sy += smo[j]
            cnt += 1.0
        if j > j0:
            a = sy / cnt
            for i in range(j0, j + 1):
                smo[i] = a
        j += 1


@njit(cache=True, nogil=True)
def _supsmu_sorted(x, y, span, smo):
    n = x.shape[0]
    if x[n - 1] <= x[0]:
        m = 0.0
        for j in range(n):
            m += y[j]
        m /= n
        for j in range(n):
            smo[j] = m
        return
    dummy = np.empty(n)
    if span > 0:
        _smooth_lines(x, y, span, False, smo, dummy)
        return
    sc = np.empty((7, n))
    for i in range(3):
        _smooth_lines(x, y, _SPANS[i], True, sc[2 * i], sc[6])
        _smooth_lines(x, sc[6], _SPANS[1], False, sc[2 * i + 1], dummy)
    for j in range(n):
        resmin = _BIG
        for i in range(3):
            if sc[2 * i + 1, j] < resmin:
                resmin = sc[2 * i + 1, j]
                sc[6, j] = _SPANS[i]
    _smooth_lines(x, sc[6], _SPANS[1], False, sc[1], dummy)
    for j in range(n):
        s = sc[1, j]
        if s <= _SPANS[0]:
            s = _SPANS[0]
        if s >= _SPANS[2]:
            s = _SPANS[2]
        f = s - _SPANS[1]
        if f >= 0:
            f = f / (_SPANS[2] - _SPANS[1])
            sc[3, j] = (1.0 - f) * sc[2, j] + f * sc[4, j]
        else:
            f = -f / (_SPANS[1] - _SPANS[0])
            sc[3, j] = (1.0 - f) * sc[2, j] + f * sc[0, j]
    _smooth_lines(x, sc[3], _SPANS[0], False, smo, dummy)


@njit(cache=True, nogil=True)
def supsmu(z, order, xs, span, out):
    n = z.shape[0]
    ys = np.empty(n)
    for j in range(n):
        ys[j] = z[order[j]]
    smo = np.empty(n)
    _supsmu_sorted(xs, ys, span, smo)
    for j in range(n):
        out[order[j]] = smo[j]


@njit(cache=True, nogil=True)
def _smooth(kind, z, order, lo, hi, xs, span, out, cs):
    if kind == SUPSMU:
        supsmu(z, order, xs, span, out)
    else:
        running_mean(z, order, lo, hi, out, cs)


@njit(cache=True, nogil=True)
def _center(a):
    n = a.shape[0]
    m = 0.0
    for i in range(n):
        m += a[i]
    m /= n
    for i in range(n):
        a[i] -= m


@njit(cache=True, nogil=True)
def _sd(a):
    # population sd of a centred vector
    s = 0.0
    for i in range(a.shape[0]):
        s += a[i] * a[i]
    return np.sqrt(s / a.shape[0])


@njit(cache=True, nogil=True)
def _corr_centered(a, b):
    sab = 0.0
    saa = 0.0
    sbb = 0.0
    for i in range(a.shape[0]):
        sab += a[i] * b[i]
        saa += a[i] * a[i]
        sbb += b[i] * b[i]
    if saa <= 0.0 or sbb <= 0.0:
        return 0.0
    return sab / np.sqrt(saa * sbb)


@njit(cache=True, nogil=True)
def ace(mid_v, kind,
        order_u, lo_u, hi_u, xs_u, span_u,
        order_v, lo_v, hi_v, xs_v, span_v,
        max_iter, tol, trace):
    """Bivariate ACE; returns (theta, phi, r, iterations, converged).

    ``trace`` (length >= max_iter) receives the correlation after each step.
    """
    n = mid_v.shape[0]
    cs = np.empty(n + 1)
    # start from the ranks of v so the fit depends on v only through its order
    theta = np.empty(n)
    for j in range(n):
        theta[order_v[j]] = mid_v[j]
    _center(theta)
    sd = _sd(theta)
    for i in range(n):
        theta[i] /= sd
    phi = np.empty(n)
    tmp = np.empty(n)
    r = 0.0
    r_prev = -1.0
    converged = False
    it = 0
    while it < max_iter:
        _smooth(kind, theta, order_u, lo_u, hi_u, xs_u, span_u, phi, cs)
        _center(phi)
        r = _corr_centered(theta, phi)
        trace[it] = r
        it += 1
        if abs(r - r_prev) < tol:
            converged = True
            break
        r_prev = r
        if it == max_iter:
            break
        _smooth(kind, phi, order_v, lo_v, hi_v, xs_v, span_v, tmp, cs)
        _center(tmp)
        sd = _sd(tmp)
        if sd <= 0.0:
            # theta collapsed to a constant: no dependence left to model
            for i in range(n):
                phi[i] = 0.0
            r = 0.0
            break
        for i in range(n):
            theta[i] = tmp[i] / sd
    if r < 0.0:
        r = 0.0
    return theta, phi, r, it, converged
