from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from betalaguerre.errors import ParameterError
from betalaguerre.exact import (DnMatrix, chi_squared_moment_poly, dual_transform,
                                eval_univariate, kappa_limit_check, mean_unscaled_moment,
                                moment_poly, moment_poly_at_N, path_expansion, verify_duality)
from betalaguerre.poly import MomentPoly
from betalaguerre.tridiag import EnsembleParams

from test_poly import A, K, N, to_sympy


def brute_force_moment(r, n):
    """Oracle: sympy expansion of (B B^t)^r (1,1) for an explicit n x n B,
    averaged monomial by monomial with Gamma rising factorials."""
    c = sp.symbols(f"c1:{n + 1}", positive=True)
    d = sp.symbols(f"d1:{n}", positive=True) if n > 1 else ()
    B = sp.zeros(n, n)
    for i in range(n):
        B[i, i] = c[i]
        if i + 1 < n:
            B[i + 1, i] = d[i]
    J = B * B.T
    entry = sp.expand((J**r)[0, 0])
    total = sp.Integer(0)
    for mono, coeff in sp.Poly(entry, *c, *d).terms():
        term = sp.Integer(coeff)
        for i in range(n):
            e = mono[i]
            assert e % 2 == 0
            term *= sp.rf(A + 1 + K * (n - 1 - i), e // 2)
        for i in range(n - 1):
            f = mono[n + i]
            assert f % 2 == 0
            term *= sp.rf(K * (n - 1 - i), f // 2)
        total += term
    return sp.expand(total)


@pytest.mark.parametrize("r,n", [(1, 1), (2, 1), (2, 3), (3, 2), (3, 4), (4, 3), (4, 5)])
def test_moment_poly_matches_brute_force(r, n):
    mine = to_sympy(moment_poly(r)).subs(N, n)
    assert sp.expand(mine - brute_force_moment(r, n)) == 0


def test_at_N_matches_interpolated_poly():
    for r in range(1, 6):
        full = moment_poly(r)
        for n in (1, 2, r + 7):
            direct = to_sympy(moment_poly_at_N(r, n))
            assert sp.expand(to_sympy(full).subs(N, n) - direct) == 0


def test_low_orders_closed_form():
    # m_1 = E[c~_1^2]; m_2 = E[c~_1^4] + E[c~_1^2] E[d~_1^2]
    s1 = A + 1 + K * (N - 1)
    assert sp.expand(to_sympy(moment_poly(1)) - s1) == 0
    assert sp.expand(to_sympy(moment_poly(2)) - (s1 * (s1 + 1) + s1 * K * (N - 1))) == 0


@pytest.mark.parametrize("r", range(0, 7))
def test_single_particle_is_rising_factorial(r):
    # with N = 1 only c~_1^2 ~ Gamma(alpha + 1) is left
    assert sp.expand(to_sympy(moment_poly(r)).subs(N, 1) - sp.rf(A + 1, r)) == 0


def test_node_independence():
    for r in (2, 4):
        alt = tuple(range(3, 3 + r + 4))
        assert moment_poly(r, nodes=alt) == moment_poly(r)


def test_interpolation_preconditions():
    with pytest.raises(ParameterError):
        moment_poly(3, nodes=(1, 2, 3))
    with pytest.raises(ParameterError):
        moment_poly(9)
    with pytest.raises(ParameterError):
        moment_poly(-1)


def test_degree_structure():
    # N only enters through kappa N, and each Gamma factor is linear in (kappa, alpha)
    for r in range(1, 7):
        m = moment_poly(r)
        for (i, j, k), coeff in m.terms.items():
            assert i <= j
            assert j + k <= r
        assert m.degree("alpha") == r
        assert m.terms[(0, 0, r)] == 1


def test_known_expansions():
    # (J_N)^r(1,1) for r = 1, 2, 3 with x_i = c_i^2, y_i = d_i^2; keys are (e_1..e_L, f_1..f_L)
    assert path_expansion(1) == {(1, 0): 1}
    assert path_expansion(2) == {(2, 0, 0, 0): 1, (1, 0, 1, 0): 1}
    assert path_expansion(3) == {(3, 0, 0, 0): 1, (2, 0, 1, 0): 2, (1, 1, 1, 0): 1, (1, 0, 2, 0): 1}


def test_chi_squared_moments():
    # E[(chi^2_k)^m] = k (k+2) ... (k+2m-2)
    assert chi_squared_moment_poly(0) == (1,)
    assert chi_squared_moment_poly(2) == (0, 2, 1)
    for m in range(5):
        for k in (Fraction(1, 3), 1, 5):
            ref = np.prod([k + 2 * j for j in range(m)]) if m else 1
            assert eval_univariate(chi_squared_moment_poly(m), k) == ref


@pytest.mark.parametrize("r", range(0, 7))
def test_duality(r):
    ok, residual = verify_duality(r)
    assert ok and residual.is_zero()


def test_duality_detects_broken_polynomial():
    bad = moment_poly(2) + MomentPoly.var("alpha")
    assert not (bad - dual_transform(bad, 2)).is_zero()


def test_dual_transform_matches_sympy_substitution():
    r = 3
    m = to_sympy(moment_poly(r))
    ref = (-1) ** r * K**r * m.subs({N: -K * N, K: 1 / K, A: -A / K}, simultaneous=True)
    assert sp.simplify(ref - to_sympy(dual_transform(moment_poly(r), r))) == 0


@pytest.mark.parametrize("r,a,N_", [(1, 0.0, 3), (3, 1.5, 4), (5, 2.0, 6), (6, 0.25, 2)])
def test_kappa_limit(r, a, N_):
    ok, lead, banded = kappa_limit_check(r, a, N_)
    assert ok, (lead, banded)


def test_dn_matrix():
    D = DnMatrix(4, 1.0)
    assert np.allclose(D.diagonal(), np.sqrt([4, 3, 2, 1]))
    assert np.allclose(D.subdiagonal(), np.sqrt([3, 2, 1]))
    with pytest.raises(ParameterError):
        DnMatrix(3, -1.0)


def test_mean_unscaled_closed_forms():
    p = EnsembleParams(5, 12, Fraction(1, 2))
    assert mean_unscaled_moment(p, 0) == 1
    assert mean_unscaled_moment(p, 1) == 1
    assert mean_unscaled_moment(p, 2) == 1 + Fraction(2) / (Fraction(1, 2) * 12) + Fraction(4, 12)


@given(n=st.integers(1, 30), extra=st.fractions(Fraction(1, 10), 40, max_denominator=10),
       beta=st.fractions(Fraction(1, 100), 8, max_denominator=100))
def test_mean_moment_identities_property(n, extra, beta):
    p = EnsembleParams(n, n - 1 + extra, beta)
    M = Fraction(n - 1) + extra
    assert mean_unscaled_moment(p, 1) == 1
    assert mean_unscaled_moment(p, 2) == 1 + 2 / (beta * M) + Fraction(n - 1) / M


def test_mean_moment_monte_carlo():
    from betalaguerre.experiments import simulate

    p = EnsembleParams(12, 20, 0.8)
    sp_ = simulate(p, 4000, 17)
    for r in (3, 4):
        vals = sp_.linear_statistic(lambda x: x**r)
        se = vals.std(ddof=1) / np.sqrt(len(vals))
        assert abs(vals.mean() - float(mean_unscaled_moment(p, r))) < 5 * se
