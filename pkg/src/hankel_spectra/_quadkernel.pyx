# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled adaptive Gauss-Kronrod Laplace integrals.

Same algorithm as ``_quad_py`` (dyadic sweep toward 0, then bisection of the
worst panel), executed one ``t`` at a time with preallocated panel storage.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, exp, fabs, pow, fmin, fmax
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[8]
XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.0, 0.129484966168869693270611432679082, 0.0, 0.279705391489276667901467771423780,
         0.0, 0.381830050505118944950369775488975, 0.0, 0.417959183673469387755102040816327]

cdef double EPS = np.finfo(float).eps
cdef double UFLOW = np.finfo(float).tiny
cdef double CUT_LO = 0.5
cdef double CUT_HI = 0.75
cdef double LAMBDA_FLOOR = 1e-300


cdef inline double cutoff(double lam) nogil:
    if lam <= CUT_LO:
        return 1.0
    if lam >= CUT_HI:
        return 0.0
    return 1.0 / (1.0 + exp(1.0 / (CUT_HI - lam) - 1.0 / (lam - CUT_LO)))


cdef inline double integrand(double lam, double t, double power, double gamma, bint smooth) nogil:
    cdef double f = exp(power * log(lam) - gamma * log(-log(lam)) - lam * t)
    if smooth:
        f *= cutoff(lam)
    return f


cdef void panel(double a, double b, double t, double power, double gamma, bint smooth,
                double* val, double* err) nogil:
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double fv[15]
    cdef int k
    for k in range(7):
        fv[k] = integrand(c - h * XGK[k], t, power, gamma, smooth)
        fv[14 - k] = integrand(c + h * XGK[k], t, power, gamma, smooth)
    fv[7] = integrand(c, t, power, gamma, smooth)
    finish_panel(fv, h, val, err)


cdef void panel_static(double a, double b, double t, const double* g,
                       double* val, double* err) nogil:
    # dyadic sweep panel: g holds the t-independent log part on the 15 nodes
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double fv[15]
    cdef double x
    cdef int k
    for k in range(7):
        x = g[k] - (c - h * XGK[k]) * t
        fv[k] = exp(x) if x > -745.2 else 0.0
        x = g[14 - k] - (c + h * XGK[k]) * t
        fv[14 - k] = exp(x) if x > -745.2 else 0.0
    x = g[7] - c * t
    fv[7] = exp(x) if x > -745.2 else 0.0
    finish_panel(fv, h, val, err)


cdef void finish_panel(double* fv, double h, double* val, double* err) nogil:
    cdef double resk = 0.0, resg = 0.0, resabs = 0.0, resasc = 0.0, reskh, e
    cdef int k
    for k in range(7):
        resk += WGK[k] * fv[k]
        resg += WG[k] * fv[k]
        resabs += WGK[k] * fabs(fv[k])
    resk += WGK[7] * fv[7]
    resg += WG[7] * fv[7]
    resabs += WGK[7] * fabs(fv[7])
    for k in range(7):
        resk += WGK[6 - k] * fv[8 + k]
        resg += WG[6 - k] * fv[8 + k]
        resabs += WGK[6 - k] * fabs(fv[8 + k])
    reskh = 0.5 * resk
    for k in range(7):
        resasc += WGK[k] * (fabs(fv[k] - reskh) + fabs(fv[14 - k] - reskh))
    resasc += WGK[7] * fabs(fv[7] - reskh)
    resasc *= h
    resabs *= h
    e = fabs((resk - resg) * h)
    if resasc != 0.0 and e != 0.0:
        e = resasc * fmin(1.0, pow(200.0 * e / resasc, 1.5))
    if resabs > UFLOW / (50.0 * EPS):
        e = fmax(50.0 * EPS * resabs, e)
    val[0] = resk * h
    err[0] = e


cdef inline double tail_bound(double b, double power, double gamma) nogil:
    return exp((power + 1.0) * log(b) - gamma * log(-log(b))) / (power + 1.0)


cdef bint integrate_one(double t, double power, double gamma, double upper, bint smooth,
                        double tol, double rel_tol, int limit,
                        double* A, double* B, double* V, double* E, const double* G,
                        double* out_val, double* out_err) nogil:
    cdef int n = 0, i, worst, sweep = 0
    cdef double total = 0.0, tail = 0.0, top, a, b, m, v, e, v1, e1, v2, e2
    cdef double errsum, target, emax
    if smooth:
        panel(CUT_LO, CUT_HI, t, power, gamma, True, &v, &e)
        A[n] = CUT_LO; B[n] = CUT_HI; V[n] = v; E[n] = e
        n += 1
        total += v
        top = CUT_LO
    else:
        top = upper
    b = top
    while True:
        a = 0.5 * b
        panel_static(a, b, t, G + 15 * sweep, &v, &e)
        sweep += 1
        A[n] = a; B[n] = b; V[n] = v; E[n] = e
        n += 1
        total += v
        tail = tail_bound(a, power, gamma)
        target = fmax(tol, rel_tol * fabs(total))
        if tail <= 0.01 * target or a < LAMBDA_FLOOR or n >= limit:
            break
        b = a
    while True:
        errsum = 0.0
        for i in range(n):
            errsum += E[i]
        errsum += tail
        target = fmax(tol, rel_tol * fabs(total))
        if errsum <= target:
            out_val[0] = total
            out_err[0] = errsum
            return True
        if n >= limit:
            out_val[0] = total
            out_err[0] = errsum
            return False
        worst = 0
        emax = E[0]
        for i in range(1, n):
            if E[i] > emax:
                emax = E[i]
                worst = i
        a = A[worst]
        b = B[worst]
        m = 0.5 * (a + b)
        panel(a, m, t, power, gamma, smooth, &v1, &e1)
        panel(m, b, t, power, gamma, smooth, &v2, &e2)
        total += (v1 + v2) - V[worst]
        A[worst] = a; B[worst] = m; V[worst] = v1; E[worst] = e1
        A[n] = m; B[n] = b; V[n] = v2; E[n] = e2
        n += 1


def _cutoff_array(lam):
    out = np.where(lam <= CUT_LO, 1.0, 0.0)
    mid = (lam > CUT_LO) & (lam < CUT_HI)
    s = lam[mid]
    with np.errstate(over="ignore"):
        out[mid] = 1.0 / (1.0 + np.exp(1.0 / (CUT_HI - s) - 1.0 / (s - CUT_LO)))
    return out


def laplace_batch(t, double power, double gamma, double upper, bint smooth,
                  double tol, double rel_tol, int limit):
    """Return ``(values, error_estimates, converged)`` arrays for every t."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt = np.ascontiguousarray(t, dtype=np.float64).ravel()
    cdef Py_ssize_t T = tt.shape[0], k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals = np.empty(T)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] errs = np.empty(T)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] conv = np.empty(T, dtype=np.uint8)
    cdef double* A = <double*> malloc(limit * sizeof(double))
    cdef double* B = <double*> malloc(limit * sizeof(double))
    cdef double* V = <double*> malloc(limit * sizeof(double))
    cdef double* E = <double*> malloc(limit * sizeof(double))
    if A == NULL or B == NULL or V == NULL or E == NULL:
        free(A); free(B); free(V); free(E)
        raise MemoryError()
    # t-independent log part on every dyadic sweep panel's nodes
    nodes = np.concatenate([-np.asarray(XGK)[:7], [0.0], np.asarray(XGK)[:7][::-1]])
    top = CUT_LO if smooth else upper
    b = top * 0.5 ** np.arange(limit + 1)
    lam = 0.5 * (b[1:, None] + b[:-1, None]) + 0.25 * b[:-1, None] * nodes[None, :]
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        g = power * np.log(lam) - gamma * np.log(-np.log(lam))
        if smooth:
            g = g + np.log(_cutoff_array(lam))
    g = np.where(lam > 0.0, g, -np.inf)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Gtab = np.ascontiguousarray(g)
    try:
        with nogil:
            for k in range(T):
                conv[k] = integrate_one(tt[k], power, gamma, upper, smooth, tol, rel_tol,
                                        limit, A, B, V, E, &Gtab[0, 0], &vals[k], &errs[k])
    finally:
        free(A); free(B); free(V); free(E)
    return vals, errs, conv.astype(bool)
