import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from betalaguerre import tridiag as td
from betalaguerre.errors import NumericalError, ParameterError
from betalaguerre.rng import SeedSpec
from betalaguerre.tridiag import (EnsembleParams, JacobiMatrix, check_carleman, eigenvalues,
                                  moment_at_11, sample_bidiagonal, sample_spectrum,
                                  spectral_weights, to_jacobi, trace_power)


def random_jacobi(rng, n):
    return JacobiMatrix(rng.normal(size=n), rng.uniform(0.1, 2.0, size=n - 1))


def test_params_derived_quantities():
    p = EnsembleParams(10, 30, 2.0)
    assert p.gamma == pytest.approx(1 / 3)
    assert p.kappa == 1.0
    assert p.alpha == pytest.approx(20.0)
    q = EnsembleParams.from_ratio(400, 0.5, 2.0)
    assert q.M == pytest.approx(800)


@pytest.mark.parametrize("args", [(0, 5, 1.0), (5, 3.9, 1.0), (5, 10, 0.0), (5, 10, -2.0), (2.5, 10, 1.0)])
def test_params_validation(args):
    with pytest.raises(ParameterError):
        EnsembleParams(*args)


def test_to_jacobi_is_b_bt():
    p = EnsembleParams(7, 12.5, 0.7)
    B = sample_bidiagonal(p, SeedSpec(1))
    J = to_jacobi(B)
    Bd = B.dense()
    assert np.allclose(J.dense(), Bd @ Bd.T, rtol=1e-14, atol=1e-15)


def test_eigenvalues_against_lapack():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3, 10, 157):
        J = random_jacobi(rng, n)
        ref = np.linalg.eigvalsh(J.dense())
        assert np.allclose(eigenvalues(J), ref, atol=1e-12 * max(1, np.abs(ref).max()))


def test_weights_against_dense_eigenvectors():
    rng = np.random.default_rng(1)
    J = random_jacobi(rng, 40)
    lam, v = np.linalg.eigh(J.dense())
    mu = spectral_weights(J)
    assert np.allclose(mu.atoms, lam, atol=1e-12)
    assert np.allclose(mu.weights, v[0] ** 2, atol=1e-12)
    assert abs(mu.weights.sum() - 1) < 1e-13


def test_weights_moments_equal_corner_entry():
    rng = np.random.default_rng(2)
    J = random_jacobi(rng, 25)
    mu = spectral_weights(J)
    D = J.dense()
    for r in range(6):
        ref = np.linalg.matrix_power(D, r)[0, 0]
        assert mu.moment(r) == pytest.approx(ref, rel=1e-11, abs=1e-11)
        assert moment_at_11(J, r) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_trace_power_methods_agree():
    p = EnsembleParams(60, 100, 2.0)
    J = to_jacobi(sample_bidiagonal(p, SeedSpec(2)))
    ref = np.trace(np.linalg.matrix_power(J.dense(), 5))
    assert trace_power(J, 5) == pytest.approx(ref, rel=1e-11)
    assert trace_power(J, 5, method="banded") == pytest.approx(ref, rel=1e-12)


def test_moment_cap():
    J = JacobiMatrix(np.ones(3), np.ones(2))
    with pytest.raises(ParameterError):
        moment_at_11(J, td.MOMENT_CAP + 1)


def test_sturm_count_oracle():
    # number of eigenvalues below x equals the number of negative pivots of J - x
    rng = np.random.default_rng(3)
    J = random_jacobi(rng, 30)
    lam = eigenvalues(J)
    for x in np.linspace(lam[0] - 1, lam[-1] + 1, 17):
        q, count = J.a[0] - x, 0
        count += q < 0
        for k in range(1, J.n):
            q = J.a[k] - x - J.b[k - 1] ** 2 / q
            count += q < 0
        assert count == np.count_nonzero(lam < x)


def test_non_convergence_reports_index():
    J = JacobiMatrix(np.array([1.0, 2.0, 3.0]), np.array([1.0, 1.0]))
    d, e, z = J.a.copy(), np.r_[J.b, 0.0], np.r_[1.0, 0.0, 0.0]
    assert td._tql(d, e, z, True, 0) == 0
    assert td._tql(J.a.copy(), np.r_[J.b, 0.0], z.copy(), True, 150) == -1


def test_numerical_error_carries_index():
    err = NumericalError("no convergence", 4)
    assert err.index == 4


def test_near_degenerate_counted():
    # equal diagonal entries with a tiny coupling split by about 2e-14 < 1e-12 ||J||
    J = JacobiMatrix(np.array([2.0, 2.0, 5.0]), np.array([1e-14, 1e-14]))
    mu = spectral_weights(J)
    assert mu.near_degenerate >= 1
    assert abs(mu.weights.sum() - 1) < 1e-13


def test_sample_spectrum_deterministic_and_sorted():
    p = EnsembleParams(50, 80, 0.3)
    lam1, w1 = sample_spectrum(p, SeedSpec(9, 4), weights=True)
    lam2, w2 = sample_spectrum(p, SeedSpec(9, 4), weights=True)
    assert np.array_equal(lam1, lam2) and np.array_equal(w1, w2)
    assert np.all(np.diff(lam1) >= 0) and np.all(lam1 > 0)


def test_trace_has_exact_chi_square_mean():
    # E tr J = sum of chi-square dofs / (beta M) = N
    p = EnsembleParams(20, 35, 1.3)
    tr = [np.sum(sample_spectrum(p, SeedSpec(0, i))[0]) for i in range(4000)]
    se = np.std(tr) / np.sqrt(len(tr))
    assert abs(np.mean(tr) - p.N) < 5 * se


def test_carleman():
    assert check_carleman(lambda n: n, 4096).verdict == "divergent"
    assert check_carleman(lambda n: np.sqrt(n * (n + 1.0)), 4096).verdict == "divergent"
    assert check_carleman(lambda n: n**2, 4096).verdict == "inconclusive"
    rep = check_carleman([1.0, 2.0, 4.0, 8.0], 4)
    assert rep.partial_sum == pytest.approx(1.875)
    with pytest.raises(ParameterError):
        check_carleman([1.0, -1.0], 2)


@given(a=arrays(float, st.integers(1, 60), elements=st.floats(-1e3, 1e3)), data=st.data())
def test_eigenvalues_property(a, data):
    n = len(a)
    b = data.draw(arrays(float, n - 1, elements=st.floats(1e-3, 1e3)))
    J = JacobiMatrix(a, b)
    lam = eigenvalues(J)
    ref = np.linalg.eigvalsh(J.dense())
    scale = max(1.0, J.norm())
    assert np.all(np.diff(lam) >= 0)
    assert np.max(np.abs(lam - ref)) <= 1e-12 * scale
    assert np.sum(lam) == pytest.approx(np.sum(a), abs=1e-10 * scale * n)


@given(n=st.integers(1, 40), m_extra=st.floats(0.0, 50.0), beta=st.floats(1e-3, 10.0),
       seed=st.integers(0, 2**32))
def test_weights_property(n, m_extra, beta, seed):
    p = EnsembleParams(n, n - 1 + max(m_extra, 1e-3), beta)
    lam, w = sample_spectrum(p, SeedSpec(seed), weights=True)
    assert abs(w.sum() - 1) <= 1e-12
    assert np.all(w >= 0)
    assert np.all(lam >= -1e-12 * max(1.0, lam.max()))
