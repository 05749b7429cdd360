"""Simplex weights and the d-variable to one-variable Hankel reduction.

The d-variable Hankel matrix [a(|i + j|)] over multi-indices in N_0^d only
depends on the levels |i| and |j|.  Summing over each level with the
normalized map (J x)(m) = W_d(m)^(-1/2) sum_{|k|=m} x(k) gives

    (H_a x, y) = (Gamma J x, J y),   Gamma(i, j) = sqrt(W_d(i)) a(i+j) sqrt(W_d(j)),

and the truncation to the simplex {|j| <= N} makes this an exact identity
between finite matrices: H_a restricted to the simplex equals J* Gamma_N J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError
from .params import ASSEMBLY_QUAD, SymbolSpec, symbol_sequence

DENSE_LIMIT = 4096
# rank decisions: |lambda| < KERNEL_RTOL * ||M|| counts as zero
KERNEL_RTOL = 1e-12


def simplex_weight(d: int, j: int) -> int:
    """W_d(j) = binomial(j + d - 1, d - 1), the number of k in N_0^d with |k| = j."""
    if d < 1 or j < 0:
        raise DomainError(f"simplex_weight needs d >= 1 and j >= 0, got d={d}, j={j}")
    return math.comb(j + d - 1, d - 1)


@dataclass(frozen=True)
class SimplexWeight:
    """Exact integer weights W_d(0..N) plus their float images.

    Python integers never overflow; ``as_float`` rounds to double, which is
    exact only while W_d(j) < 2**53.
    """

    d: int
    values: tuple

    @classmethod
    def build(cls, d, N):
        return cls(d, tuple(simplex_weight(d, j) for j in range(N + 1)))

    @property
    def exact_in_float(self):
        return max(self.values) < 2**53

    def as_float(self):
        return np.array([float(v) for v in self.values])


def sqrt_weights(d, N):
    """s(j) = sqrt(W_d(j)) for j = 0..N as floats."""
    j = np.arange(N + 1, dtype=float)
    if d == 1:
        return np.ones(N + 1)
    # log-binomial keeps huge weights finite
    from scipy.special import gammaln
    return np.exp(0.5 * (gammaln(j + d) - gammaln(j + 1) - gammaln(d)))


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightedHankelMatrix:
    """Gamma_N with entries s(i) h(i+j) s(j), i, j = 0..N; dense form on demand."""

    N: int
    symbol: np.ndarray
    weights: np.ndarray
    d: int = 1

    def __post_init__(self):
        object.__setattr__(self, "symbol", _frozen(self.symbol))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.symbol.shape != (2 * self.N + 1,) or self.weights.shape != (self.N + 1,):
            raise DomainError("symbol needs 2N+1 values and weights N+1 values")

    @property
    def size(self):
        return self.N + 1

    def entry(self, i, j):
        return self.weights[i] * self.symbol[i + j] * self.weights[j]

    def dense(self):
        idx = np.add.outer(np.arange(self.N + 1), np.arange(self.N + 1))
        return self.weights[:, None] * self.symbol[idx] * self.weights[None, :]

    def with_symbol(self, symbol):
        return WeightedHankelMatrix(self.N, symbol, self.weights, self.d)


def build_weighted_hankel(spec: SymbolSpec, N: int, quad=ASSEMBLY_QUAD,
                          extension: str = "profile") -> WeightedHankelMatrix:
    """Reduced matrix Gamma_N for ``spec``; symbol h(k) = a(k), k = 0..2N."""
    if N < 1:
        raise DomainError("N must be >= 1")
    h = symbol_sequence(spec, 2 * N + 1, quad=quad, extension=extension)
    return WeightedHankelMatrix(N, h, sqrt_weights(spec.d, N), spec.d)


def _compositions(level, d):
    # descending lexicographic order of k in N_0^d with |k| = level
    if d == 1:
        yield (level,)
        return
    for first in range(level, -1, -1):
        for rest in _compositions(level - first, d - 1):
            yield (first,) + rest


def simplex_indices(d: int, N: int) -> np.ndarray:
    """All k in N_0^d with |k| <= N, graded (by |k|) then descending lex."""
    rows = [k for level in range(N + 1) for k in _compositions(level, d)]
    return np.array(rows, dtype=np.int64).reshape(-1, d)


def simplex_size(d, N):
    return math.comb(N + d, d)


@dataclass(frozen=True, eq=False)
class SimplexHankelMatrix:
    """Brute-force truncation of H_a to the simplex {|j| <= N}."""

    d: int
    N: int
    indices: np.ndarray
    matrix: np.ndarray
    symbol: np.ndarray = field(repr=False)

    @property
    def levels(self):
        return self.indices.sum(axis=1)

    @property
    def size(self):
        return self.indices.shape[0]


def build_simplex_hankel(spec: SymbolSpec, N: int, dense_limit: int = DENSE_LIMIT,
                         quad=ASSEMBLY_QUAD, extension: str = "profile",
                         symbol=None) -> SimplexHankelMatrix:
    """Dense [a(|i| + |j|)] over the simplex; raises CapacityError past ``dense_limit``."""
    if N < 0:
        raise DomainError("N must be >= 0")
    size = simplex_size(spec.d, N)
    if size > dense_limit:
        raise CapacityError(f"simplex matrix of size {size} exceeds dense limit {dense_limit}")
    if symbol is None:
        symbol = symbol_sequence(spec, 2 * N + 1, quad=quad, extension=extension)
    idx = simplex_indices(spec.d, N)
    lev = idx.sum(axis=1)
    mat = np.asarray(symbol)[np.add.outer(lev, lev)]
    return SimplexHankelMatrix(spec.d, N, idx, mat, np.asarray(symbol, dtype=float))


def j_matrix(d: int, N: int) -> np.ndarray:
    """J as an (N+1) x binomial(N+d, d) matrix: row m averages level m with weight W_d(m)^-1/2."""
    lev = simplex_indices(d, N).sum(axis=1)
    J = np.zeros((N + 1, lev.size))
    J[lev, np.arange(lev.size)] = 1.0 / sqrt_weights(d, N)[lev]
    return J


def parity_conjugate(M: SimplexHankelMatrix) -> SimplexHankelMatrix:
    """Q* M Q with (Q x)(j) = (-1)^|j| x(j)."""
    q = 1.0 - 2.0 * (M.levels % 2)
    sym = M.symbol * (1.0 - 2.0 * (np.arange(M.symbol.size) % 2))
    return SimplexHankelMatrix(M.d, M.N, M.indices, q[:, None] * M.matrix * q[None, :], sym)


def split_kernel(eigs, rtol=KERNEL_RTOL):
    """Return (nonzero eigenvalues sorted ascending, kernel dimension)."""
    eigs = np.sort(np.asarray(eigs))
    scale = np.max(np.abs(eigs)) if eigs.size else 0.0
    live = np.abs(eigs) >= rtol * scale
    return eigs[live], int(np.count_nonzero(~live))


def reduction_check(spec: SymbolSpec, N: int, dense_limit: int = DENSE_LIMIT,
                    rtol: float = KERNEL_RTOL):
    """Compare the simplex matrix spectrum with Gamma_N's.

    Eigenvalue errors are measured relative to ||Gamma_N||.  Gamma_N itself is
    badly conditioned (its smallest eigenvalues sit near 1e-16 ||Gamma_N|| already
    at N = 12), so the double-precision kernel count of the simplex matrix
    includes Gamma_N's own sub-threshold eigenvalues; ``kernel_dim`` subtracts
    them and is the part of the kernel produced by the reduction.
    """
    gam = build_weighted_hankel(spec, N)
    sim = build_simplex_hankel(spec, N, dense_limit, symbol=gam.symbol)
    ev_g = np.sort(np.linalg.eigvalsh(gam.dense()))
    ev_s = np.linalg.eigvalsh(sim.matrix)
    norm = float(np.max(np.abs(ev_g)))
    nz_s, ker_s = split_kernel(ev_s, rtol)
    nz_g, ker_g = split_kernel(ev_g, rtol)
    expected = sim.size - (N + 1)
    # full multiset: drop the `expected` smallest |eigs| of the simplex matrix
    keep = np.sort(ev_s[np.argsort(np.abs(ev_s))[expected:]])
    full_diff = float(np.max(np.abs(keep - ev_g)) / norm) if norm else 0.0
    if nz_s.size == nz_g.size:
        nz_diff = float(np.max(np.abs(nz_s - nz_g)) / norm) if nz_s.size else 0.0
    else:
        nz_diff = math.inf
    return {
        "d": spec.d, "N": N, "gamma": spec.gamma, "simplex_size": sim.size,
        "nonzero_count": int(nz_s.size), "gamma_nonzero_count": int(nz_g.size),
        "kernel_dim_numeric": ker_s, "gamma_kernel_numeric": ker_g,
        "kernel_dim": ker_s - ker_g, "expected_kernel_dim": expected,
        "max_rel_eig_diff": nz_diff, "max_rel_full_diff": full_diff,
    }
