"""Spectral engine: FFT Hankel matvec, Lanczos for extremal eigenvalues, dense fallback.

Eigenvalues are reported as two descending lists, ``pos`` = lambda_n^+(A) and
``neg`` = lambda_n^+(-A); values with |lambda| below ``KERNEL_RTOL * ||A||``
count as kernel and appear in neither list.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import CapacityError, ContractError, DomainError
from .reduction import DENSE_LIMIT, KERNEL_RTOL, WeightedHankelMatrix


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


def _blocks(N, d, first=16):
    """Index blocks [lo, hi) on which sqrt(W_d) varies by a bounded factor."""
    if d == 1 or N + 1 <= 2 * first:
        return [(0, N + 1)]
    out, lo, hi = [], 0, first
    while lo <= N:
        out.append((lo, min(hi, N + 1)))
        lo, hi = hi, 2 * hi
    return out


class FastHankelOperator:
    """x -> s * (H (s * x)) with H = [h(i+j)], applied through real FFTs.

    Each Hankel block [h(i+j)], i in block A, j in block B, is a convolution
    of the reversed weighted input with a symbol segment, done with one
    transform of length >= |A| + |B| (>= 2N+2 when d = 1, a single block).
    For d > 1 the blocks are dyadic so that the weights sqrt(W_d) vary by a
    bounded factor inside each block; one global transform would let the
    largest weights amplify roundoff from the largest symbol values.
    Instances cache input transforms per call, so concurrent ``apply`` calls
    need ``clone()``.
    """

    def __init__(self, symbol, weights, d=None):
        symbol = np.asarray(symbol, dtype=float)
        weights = np.asarray(weights, dtype=float)
        N = weights.size - 1
        if symbol.size != 2 * N + 1:
            raise DomainError("symbol needs 2N+1 values for N+1 weights")
        self.N = N
        self.symbol = symbol
        self.weights = weights
        if d is None:
            d = 1 if np.all(weights == weights[0]) else 2
        self.d = d
        self.blocks = _blocks(N, d)
        self.nfft = _next_pow2(2 * N + 2)
        self._plan = []
        for ia, (a0, a1) in enumerate(self.blocks):
            for ib, (b0, b1) in enumerate(self.blocks):
                la, lb = a1 - a0, b1 - b0
                n = _next_pow2(la + lb) if len(self.blocks) > 1 else self.nfft
                seg = symbol[a0 + b0: a1 + b1 - 1]
                self._plan.append((ia, ib, n, np.fft.rfft(seg, n)))
        self._norm = None

    @classmethod
    def from_matrix(cls, M: WeightedHankelMatrix):
        return cls(M.symbol, M.weights, M.d)

    @property
    def size(self):
        return self.N + 1

    dtype = np.dtype(float)

    def clone(self):
        return FastHankelOperator(self.symbol, self.weights, self.d)

    def scaled(self, c):
        return FastHankelOperator(c * self.symbol, self.weights, self.d)

    def apply(self, x):
        x = np.asarray(x)
        if x.shape[0] != self.N + 1:
            raise DomainError(f"vector length {x.shape[0]} != N+1 = {self.N + 1}")
        if np.iscomplexobj(x):
            return self.apply(x.real) + 1j * self.apply(x.imag)
        if x.ndim == 2:
            return np.column_stack([self.apply(x[:, k]) for k in range(x.shape[1])])
        u = self.weights * x
        y = np.zeros(self.N + 1)
        cache = {}
        for ia, ib, n, hhat in self._plan:
            a0, a1 = self.blocks[ia]
            b0, b1 = self.blocks[ib]
            key = (ib, n)
            if key not in cache:
                cache[key] = np.fft.rfft(u[b0:b1][::-1], n)
            conv = np.fft.irfft(hhat * cache[key], n)
            # y[a0 + r] = sum_j h(a0 + b0 + r + j) u[b0 + j] = conv[lb - 1 + r]
            lb = b1 - b0
            y[a0:a1] += conv[lb - 1: lb - 1 + (a1 - a0)]
        return self.weights * y

    __matmul__ = apply

    def dense(self):
        return WeightedHankelMatrix(self.N, self.symbol, self.weights).dense()

    def norm_estimate(self, iters=30, seed=0):
        """Power-iteration estimate of ||A|| (cached)."""
        if self._norm is None:
            v = np.random.default_rng(seed).standard_normal(self.N + 1)
            v /= np.linalg.norm(v)
            est = 0.0
            for _ in range(iters):
                w = self.apply(v)
                est = np.linalg.norm(w)
                if est == 0.0:
                    break
                v = w / est
            self._norm = float(est)
        return self._norm


def hankel_matvec(op: FastHankelOperator, x):
    return op.apply(x)


@dataclass(frozen=True)
class SpectrumResult:
    """Signed extremal spectrum: ``pos`` and ``neg`` both descending and positive."""

    pos: tuple
    neg: tuple
    N: int
    solver: str
    residuals_pos: tuple = ()
    residuals_neg: tuple = ()
    converged_pos: int = 0
    converged_neg: int = 0
    complete: bool = True
    kernel_dim: int = 0
    norm_est: float = 0.0
    iterations: int = 0
    seed: int | None = None

    @property
    def converged_count(self):
        return self.converged_pos + self.converged_neg

    def eigenvalues(self):
        """All reported eigenvalues, descending, signed."""
        return np.concatenate([np.asarray(self.pos), -np.asarray(self.neg)[::-1]])

    def swapped(self):
        """Spectrum of -A."""
        return SpectrumResult(self.neg, self.pos, self.N, self.solver, self.residuals_neg,
                              self.residuals_pos, self.converged_neg, self.converged_pos,
                              self.complete, self.kernel_dim, self.norm_est,
                              self.iterations, self.seed)

    def to_dict(self):
        out = asdict(self)
        for key in ("pos", "neg", "residuals_pos", "residuals_neg"):
            out[key] = [float(v) for v in out[key]]
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        for key in ("pos", "neg", "residuals_pos", "residuals_neg"):
            data[key] = tuple(data.get(key, ()))
        return cls(**data)


def _split(vals, res, thr):
    order = np.argsort(vals)[::-1]
    vals, res = vals[order], res[order]
    p = vals > thr
    n = vals < -thr
    pos, rpos = vals[p], res[p]
    neg, rneg = -vals[n][::-1], res[n][::-1]
    return pos, rpos, neg, rneg, int(np.count_nonzero(~(p | n)))


def dense_eig(M, dense_limit: int = DENSE_LIMIT, residuals: bool = True,
              sym_tol: float = 1e-12, k: int | None = None) -> SpectrumResult:
    """Full spectrum of a symmetric (or Hermitian) matrix via LAPACK.

    ``k`` trims each signed list to its top k entries after solving.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractError("dense_eig needs a square matrix")
    n = M.shape[0]
    if n > dense_limit:
        raise CapacityError(f"matrix size {n} exceeds dense limit {dense_limit}")
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    asym = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if asym > sym_tol * max(scale, np.finfo(float).tiny):
        raise ContractError(f"matrix not symmetric: max asymmetry {asym:.3e}")
    if n == 0:
        return SpectrumResult((), (), -1, "dense")
    if residuals:
        vals, vecs = np.linalg.eigh(M)
        res = np.linalg.norm(M @ vecs - vecs * vals, axis=0)
    else:
        vals = np.linalg.eigvalsh(M)
        res = np.zeros_like(vals)
    norm = float(np.max(np.abs(vals)))
    pos, rpos, neg, rneg, ker = _split(vals, res, KERNEL_RTOL * norm)
    if k is not None:
        pos, rpos, neg, rneg = pos[:k], rpos[:k], neg[:k], rneg[:k]
    return SpectrumResult(tuple(pos.tolist()), tuple(neg.tolist()), n - 1, "dense",
                          tuple(rpos.tolist()), tuple(rneg.tolist()), len(pos), len(neg),
                          True, ker, norm)


class DenseOperator:
    """Wrap an explicit matrix in the operator interface used by Lanczos."""

    def __init__(self, M):
        self.M = np.asarray(M)
        self.size = self.M.shape[0]
        self.N = self.size - 1
        self.dtype = self.M.dtype

    def apply(self, x):
        return self.M @ x


def lanczos_extremal(op, k: int, tol: float = 1e-10, max_iter: int | None = None,
                     seed: int = 0, check_every: int = 8,
                     kernel_margin: int = 6) -> SpectrumResult:
    """Top-k eigenvalues of each sign of a symmetric/Hermitian operator.

    Lanczos with full (twice-applied) Gram-Schmidt reorthogonalization and a
    seeded random start.  A Ritz pair converges when |beta_m y_last| <= tol *
    ||A||_est, ||A||_est being the largest |Ritz value|.  A side is complete
    once it has k converged values, or once every Ritz value above the kernel
    threshold has converged while at least ``kernel_margin`` Ritz values sit in
    the kernel band (so no further eigenvalue of that sign is above it).
    On breakdown the iteration restarts with a fresh random vector orthogonal
    to the basis, which keeps the recurrence valid on the complement.
    Residuals ||A v - lambda v|| are recomputed explicitly for returned pairs.
    """
    n = op.size
    if k < 0:
        raise DomainError("k must be >= 0")
    if k > n:
        raise DomainError(f"k={k} exceeds operator size {n}")
    if max_iter is None:
        max_iter = min(n, max(4 * k + 60, 120))
    max_iter = min(max_iter, n)
    dtype = np.result_type(getattr(op, "dtype", float), float)
    rng = np.random.default_rng(seed)

    def fresh():
        v = rng.standard_normal(n)
        if np.issubdtype(dtype, np.complexfloating):
            v = v + 1j * rng.standard_normal(n)
        return v.astype(dtype)

    if k == 0:
        return SpectrumResult((), (), n - 1, "lanczos", seed=seed)

    V = np.zeros((n, max_iter + 1), dtype=dtype)
    alpha = np.zeros(max_iter)
    beta = np.zeros(max_iter)
    v = fresh()
    V[:, 0] = v / np.linalg.norm(v)
    m = 0
    norm_est = 0.0
    state = None
    exhausted = False
    while m < max_iter:
        w = op.apply(V[:, m])
        alpha[m] = float(np.real(np.vdot(V[:, m], w)))
        for _ in range(2):
            w = w - V[:, : m + 1] @ (V[:, : m + 1].conj().T @ w)
        b = float(np.linalg.norm(w))
        m += 1
        if m < max_iter:
            scale = max(norm_est, abs(alpha[m - 1]), np.finfo(float).tiny)
            if b <= 1e-13 * scale:
                # invariant subspace: continue on its complement
                beta[m - 1] = 0.0
                r = fresh()
                for _ in range(2):
                    r = r - V[:, :m] @ (V[:, :m].conj().T @ r)
                rn = np.linalg.norm(r)
                if rn <= 1e-8 * math.sqrt(n):
                    exhausted = True
                    break
                V[:, m] = r / rn
            else:
                beta[m - 1] = b
                V[:, m] = w / b
        else:
            beta[m - 1] = b
        if m % check_every == 0 or m == max_iter:
            state = _ritz_state(alpha[:m], beta[:m], k, tol, margin=kernel_margin)
            norm_est = state["norm"]
            if state["done"]:
                break
    if exhausted or m >= n:
        beta[m - 1] = 0.0
    state = _ritz_state(alpha[:m], beta[:m], k, tol, final=exhausted or m >= n,
                        margin=kernel_margin)
    theta, Y, ok = state["theta"], state["Y"], state["ok"]
    thr = KERNEL_RTOL * state["norm"]
    # a Ritz value is reported only if its residual bound certifies it nonzero
    live = ok & (np.abs(theta) > np.maximum(thr, state["bound"]))
    sel_p = [i for i in np.argsort(theta)[::-1] if theta[i] > 0 and live[i]][:k]
    sel_n = [i for i in np.argsort(theta) if theta[i] < 0 and live[i]][:k]

    def residuals(sel):
        if not sel:
            return np.zeros(0)
        X = V[:, :m] @ Y[:, sel]
        AX = np.column_stack([op.apply(X[:, c]) for c in range(X.shape[1])])
        return np.linalg.norm(AX - X * theta[sel], axis=0)

    rp, rn_ = residuals(sel_p), residuals(sel_n)
    complete = state["done"] or exhausted or m >= n
    return SpectrumResult(
        tuple(theta[sel_p].tolist()), tuple((-theta[sel_n]).tolist()), n - 1, "lanczos",
        tuple(rp.tolist()), tuple(rn_.tolist()), len(sel_p), len(sel_n), bool(complete),
        int(np.count_nonzero(np.abs(theta) <= thr)), state["norm"], m, seed)


def _ritz_state(alpha, beta, k, tol, final=False, margin=6):
    m = alpha.size
    if m == 1:
        theta, Y = alpha.copy(), np.ones((1, 1))
    else:
        theta, Y = eigh_tridiagonal(alpha, beta[: m - 1])
    norm = float(np.max(np.abs(theta)))
    bound = np.abs(beta[m - 1] * Y[m - 1, :])
    ok = bound <= tol * max(norm, np.finfo(float).tiny)
    if final:
        ok = np.ones(m, dtype=bool)
    thr = KERNEL_RTOL * norm
    kernel_band = int(np.count_nonzero(np.abs(theta) <= thr))

    def side_done(mask_sign):
        idx = np.flatnonzero(mask_sign)
        idx = idx[np.argsort(-np.abs(theta[idx]))]
        top = idx[:k]
        if top.size >= k and np.all(ok[top]):
            return True
        return bool(np.all(ok[idx])) and kernel_band >= margin

    done = final or (side_done(theta > thr) and side_done(theta < -thr))
    return {"theta": theta, "Y": Y, "ok": ok, "norm": norm, "done": done, "bound": bound}


def singular_values(res: SpectrumResult) -> np.ndarray:
    """Merged descending |lambda| list (singular values of a symmetric operator)."""
    return np.sort(np.concatenate([np.abs(res.pos), np.abs(res.neg)]))[::-1]
