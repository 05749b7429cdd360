import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hankel_spectra.errors import CapacityError, ContractError, DomainError
from hankel_spectra.params import SymbolSpec
from hankel_spectra.reduction import build_weighted_hankel, sqrt_weights
from hankel_spectra.speceng import (
    DenseOperator, FastHankelOperator, SpectrumResult, dense_eig, hankel_matvec, lanczos_extremal,
    singular_values,
)


def _op(d, gamma, N):
    return FastHankelOperator.from_matrix(build_weighted_hankel(SymbolSpec(d, gamma), N))


def test_first_column():
    op = _op(2, 1.0, 100)
    e0 = np.zeros(101)
    e0[0] = 1.0
    ref = op.weights * op.symbol[:101] * op.weights[0]
    assert np.allclose(hankel_matvec(op, e0), ref, rtol=1e-12, atol=1e-15 * ref.max())


def test_zero_symbol():
    op = FastHankelOperator(np.zeros(21), sqrt_weights(2, 10))
    assert np.all(op.apply(np.arange(11.0)) == 0)


def test_length_mismatch():
    with pytest.raises(DomainError):
        _op(1, 1.0, 8).apply(np.ones(4))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_matvec_vs_dense(d):
    op = _op(d, 1.0, 1024)
    H = op.dense()
    norm = np.linalg.norm(H, 2)
    X = np.random.default_rng(d).standard_normal((1025, 20))
    Y = op.apply(X)
    for k in range(20):
        ref = H @ X[:, k]
        assert np.linalg.norm(Y[:, k] - ref) <= 1e-12 * norm * np.linalg.norm(X[:, k])


@pytest.mark.parametrize("N", [64, 1024])
def test_matvec_symmetry(N):
    op = _op(2, 1.0, N)
    norm = op.norm_estimate()
    rng = np.random.default_rng(N)
    for _ in range(100):
        x, y = rng.standard_normal((2, N + 1))
        diff = abs(y @ op.apply(x) - x @ op.apply(y))
        assert diff <= 1e-12 * norm * np.linalg.norm(x) * np.linalg.norm(y)


def test_complex_input():
    op = _op(1, 1.0, 50)
    z = np.random.default_rng(0).standard_normal(51) * (1 + 2j)
    assert np.allclose(op.apply(z), op.dense() @ z, atol=1e-13)


def test_rank_one_delta():
    h = np.zeros(129)
    h[0] = 1.0
    res = lanczos_extremal(FastHankelOperator(h, np.ones(65)), 5)
    assert res.pos == pytest.approx((1.0,), abs=1e-12)
    assert res.neg == ()
    assert res.complete and res.converged_pos == 1


def test_dense_examples():
    r = dense_eig(np.eye(4))
    assert r.pos == (1.0, 1.0, 1.0, 1.0) and r.neg == ()
    r = dense_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert r.pos == pytest.approx((1.0,)) and r.neg == pytest.approx((1.0,))
    with pytest.raises(ContractError):
        dense_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(CapacityError):
        dense_eig(np.eye(10), dense_limit=5)


def test_singular_values():
    r = SpectrumResult((3.0, 1.0), (2.0,), 2, "dense")
    assert singular_values(r).tolist() == [3.0, 2.0, 1.0]
    assert singular_values(dense_eig(np.zeros((3, 3)))).size == 0
    A = np.random.default_rng(5).standard_normal((30, 30))
    A = A + A.T
    sv = np.linalg.svd(A, compute_uv=False)
    assert np.allclose(singular_values(dense_eig(A)), sv, rtol=0, atol=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_lanczos_vs_dense(d, gamma):
    op = _op(d, gamma, 512)
    ref = dense_eig(op.dense())
    res = lanczos_extremal(op, 10, seed=3)
    for a, b in ((res.pos, ref.pos), (res.neg, ref.neg)):
        m = min(10, len(b))
        assert len(a) >= m
        assert np.allclose(a[:m], b[:m], rtol=1e-8, atol=0)
    bound = 1e-10 * res.norm_est
    assert all(r <= bound for r in res.residuals_pos[:res.converged_pos])


def test_lanczos_determinism_and_swap():
    op = _op(2, 1.0, 300)
    a = lanczos_extremal(op, 8, seed=11)
    b = lanczos_extremal(op, 8, seed=11)
    assert a == b
    neg = lanczos_extremal(op.scaled(-1.0), 8, seed=11)
    assert np.allclose(neg.pos, a.neg, rtol=1e-9) and np.allclose(neg.neg, a.pos, rtol=1e-9)
    assert a.swapped().pos == a.neg


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 50.0))
def test_scaling_equivariance(c):
    op = _op(1, 1.0, 200)
    a = lanczos_extremal(op, 5, seed=2)
    b = lanczos_extremal(op.scaled(c), 5, seed=2)
    assert np.allclose(np.array(b.pos[:5]), c * np.array(a.pos[:5]), rtol=1e-9)


def test_dense_operator_wrapper():
    A = np.diag([3.0, -2.0, 1.0, 0.0])
    res = lanczos_extremal(DenseOperator(A), 2)
    assert res.pos == pytest.approx((3.0, 1.0)) and res.neg == pytest.approx((2.0,))


def test_complex_hermitian_lanczos():
    rng = np.random.default_rng(9)
    B = rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40))
    A = B + B.conj().T
    res = lanczos_extremal(DenseOperator(A), 4)
    ref = dense_eig(A)
    assert np.allclose(res.pos[:4], ref.pos[:4], rtol=1e-8)


def test_result_roundtrip():
    r = dense_eig(np.diag([2.0, -1.0, 0.5]))
    assert SpectrumResult.from_dict(r.to_dict()) == r
    assert r.eigenvalues().tolist() == [2.0, 0.5, -1.0]
