"""Batched adaptive Gauss-Kronrod Laplace integrals, pure numpy backend.

Computes, for every ``t`` in a batch,

    I(t) = int_0^upper  lam**power * |log lam|**(-gamma) * c(lam) * exp(-lam t) dlam

where ``c`` is either 1 (hard stop at ``upper < 1``) or the smooth cutoff that
equals 1 on (0, 1/2] and 0 on [3/4, inf).  The log endpoint behaviour at 0 is
resolved by dyadic panels [b/2, b] swept downwards until a rigorous bound on
the neglected piece int_0^b is negligible; afterwards the panel with the
largest error estimate is bisected until the global tolerance is met.

The compiled backend (``_quadkernel``) runs the identical algorithm one ``t``
at a time; this module vectorizes it across ``t`` instead.
"""

import numpy as np

# Kronrod 15-point abscissae on [0, 1] (positive half, centre last) and weights
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])

# full 15-point rule: nodes -x0..-x6, 0, x6..x0
NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[:7][::-1]])
WK = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[:7][::-1]])
WG = np.concatenate([_WG[:7], [_WG[7]], _WG[:7][::-1]])

EPS = np.finfo(float).eps
UFLOW = np.finfo(float).tiny
CUTOFF_LO = 0.5
CUTOFF_HI = 0.75
# dyadic sweep never goes below this abscissa
LAMBDA_FLOOR = 1e-300
CHUNK = 2048


def smooth_cutoff(lam):
    """C-infinity cutoff: 1 on (0, 1/2], 0 on [3/4, inf), exp(-1/s) bridge."""
    lam = np.asarray(lam, dtype=float)
    out = np.where(lam <= CUTOFF_LO, 1.0, 0.0)
    mid = (lam > CUTOFF_LO) & (lam < CUTOFF_HI)
    if np.any(mid):
        s = lam[mid]
        with np.errstate(over="ignore"):
            out[mid] = 1.0 / (1.0 + np.exp(1.0 / (CUTOFF_HI - s) - 1.0 / (s - CUTOFF_LO)))
    return out


def _integrand(lam, t, power, gamma, smooth):
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        logf = power * np.log(lam) - gamma * np.log(-np.log(lam)) - lam * t
        f = np.exp(logf)
    if smooth:
        f = f * smooth_cutoff(lam)
    return f


def _static_part(lam, power, gamma, smooth):
    """t-independent log of the integrand (cutoff folded in; -inf where it vanishes)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        g = power * np.log(lam) - gamma * np.log(-np.log(lam))
        if smooth:
            g = g + np.log(smooth_cutoff(lam))
    return g


def _panel(a, b, t, power, gamma, smooth, static=None):
    """GK15 on [a_k, b_k] for each row k; returns (value, error estimate).

    ``static`` optionally supplies the precomputed t-independent log part on
    the 15 nodes, shared by every row (rows then share one panel).
    """
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    lam = c[:, None] + h[:, None] * NODES[None, :]
    if static is None:
        f = _integrand(lam, t[:, None], power, gamma, smooth)
    else:
        with np.errstate(under="ignore"):
            f = np.exp(static[None, :] - lam * t[:, None])
    resk = f @ WK
    resg = f @ WG
    reskh = 0.5 * resk
    resabs = np.abs(f) @ WK * h
    resasc = np.abs(f - reskh[:, None]) @ WK * h
    val = resk * h
    err = np.abs((resk - resg) * h)
    scale = (resasc != 0.0) & (err != 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(scale, np.minimum(1.0, (200.0 * err / np.where(scale, resasc, 1.0)) ** 1.5), 1.0)
    err = np.where(scale, resasc * r, err)
    floor = resabs > UFLOW / (50.0 * EPS)
    err = np.where(floor, np.maximum(50.0 * EPS * resabs, err), err)
    return val, err


def _tail_bound(b, power, gamma):
    # int_0^b lam^p |log lam|^-gamma dlam <= b^(p+1) |log b|^-gamma / (p+1)
    return np.exp((power + 1.0) * np.log(b) - gamma * np.log(-np.log(b))) / (power + 1.0)


def _run_chunk(t, power, gamma, upper, smooth, tol, rel_tol, limit):
    T = t.size
    cap = 64
    A = np.zeros((T, cap))
    B = np.zeros((T, cap))
    V = np.zeros((T, cap))
    E = np.zeros((T, cap))
    n = np.zeros(T, dtype=np.intp)
    total = np.zeros(T)
    rows = np.arange(T)

    def grow():
        nonlocal A, B, V, E, cap
        extra = cap
        A = np.hstack([A, np.zeros((T, extra))])
        B = np.hstack([B, np.zeros((T, extra))])
        V = np.hstack([V, np.zeros((T, extra))])
        E = np.hstack([E, np.zeros((T, extra))])
        cap += extra

    def store(idx, col, a, b, v, e):
        A[idx, col] = a
        B[idx, col] = b
        V[idx, col] = v
        E[idx, col] = e

    if smooth:
        a0 = np.full(T, CUTOFF_LO)
        b0 = np.full(T, CUTOFF_HI)
        v, e = _panel(a0, b0, t, power, gamma, True)
        store(rows, n, a0, b0, v, e)
        n += 1
        total += v
        top = CUTOFF_LO
    else:
        top = upper

    tail = np.zeros(T)
    active = np.ones(T, dtype=bool)
    b = top
    while np.any(active):
        a = 0.5 * b
        idx = rows[active]
        if np.any(n[idx] + 1 > cap):
            grow()
        av = np.full(idx.size, a)
        bv = np.full(idx.size, b)
        static = _static_part(0.5 * (a + b) + 0.5 * (b - a) * NODES, power, gamma, smooth)
        v, e = _panel(av, bv, t[idx], power, gamma, smooth, static)
        store(idx, n[idx], av, bv, v, e)
        n[idx] += 1
        total[idx] += v
        bound = _tail_bound(a, power, gamma)
        tail[idx] = bound
        target = np.maximum(tol, rel_tol * np.abs(total[idx]))
        done = (bound <= 0.01 * target) | (a < LAMBDA_FLOOR) | (n[idx] >= limit)
        active[idx[done]] = False
        b = a

    converged = np.zeros(T, dtype=bool)
    pending = np.ones(T, dtype=bool)
    while np.any(pending):
        idx = rows[pending]
        errsum = E[idx].sum(axis=1) + tail[idx]
        target = np.maximum(tol, rel_tol * np.abs(total[idx]))
        ok = errsum <= target
        converged[idx[ok]] = True
        stuck = ~ok & (n[idx] >= limit)
        pending[idx[ok | stuck]] = False
        idx = idx[~ok & ~stuck]
        if idx.size == 0:
            break
        if np.any(n[idx] + 1 > cap):
            grow()
        worst = np.argmax(E[idx], axis=1)
        a = A[idx, worst]
        b = B[idx, worst]
        m = 0.5 * (a + b)
        v1, e1 = _panel(a, m, t[idx], power, gamma, smooth)
        v2, e2 = _panel(m, b, t[idx], power, gamma, smooth)
        total[idx] += (v1 + v2) - V[idx, worst]
        store(idx, worst, a, m, v1, e1)
        store(idx, n[idx], m, b, v2, e2)
        n[idx] += 1

    err = E.sum(axis=1) + tail
    return total, err, converged


def laplace_batch(t, power, gamma, upper, smooth, tol, rel_tol, limit):
    """Return ``(values, error_estimates, converged)`` arrays for every t."""
    t = np.ascontiguousarray(t, dtype=float).ravel()
    vals = np.empty(t.size)
    errs = np.empty(t.size)
    conv = np.empty(t.size, dtype=bool)
    for s in range(0, t.size, CHUNK):
        sl = slice(s, s + CHUNK)
        vals[sl], errs[sl], conv[sl] = _run_chunk(
            t[sl], float(power), float(gamma), float(upper), bool(smooth),
            float(tol), float(rel_tol), int(limit))
    return vals, errs, conv
