from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from betalaguerre.errors import DomainError, ParameterError
from betalaguerre.exact import mean_unscaled_moment
from betalaguerre.laws import (AssocLaguerreLaw, MpLaw, NuLaw, assoc_laguerre_density,
                               assoc_laguerre_integrate, assoc_laguerre_jacobi,
                               assoc_laguerre_stieltjes, clt_variance_mp, gamma_density,
                               jacobi_truncation_moment, mp_cdf, mp_density, mp_integrate,
                               mp_jacobi, mp_moment, mp_stieltjes, mu1_expectation, nu_density,
                               nu_integrate, nu_moment, stieltjes_expansion_moments)
from betalaguerre.tridiag import EnsembleParams


def narayana_moment(g, r):
    return sum(comb(r, k) * comb(r, k - 1) / r * g ** (k - 1) for k in range(1, r + 1)) if r else 1.0


@pytest.mark.parametrize("g", [0.1, 0.5, 0.9])
def test_mp_moments_are_narayana(g):
    law = MpLaw(g)
    for r in range(8):
        assert mp_moment(law, r) == pytest.approx(narayana_moment(g, r), rel=1e-13)
        assert mp_integrate(law, lambda x: x**r) == pytest.approx(narayana_moment(g, r), rel=1e-12)


def test_mp_density_support_and_mass():
    law = MpLaw(0.5)
    assert mp_density(law, law.lam_minus - 1e-9) == 0
    assert mp_density(law, law.lam_plus + 1e-9) == 0
    assert mp_density(law, 1.0) > 0
    mass, _ = integrate.quad(lambda x: mp_density(law, x), law.lam_minus, law.lam_plus, limit=200)
    assert mass == pytest.approx(1, abs=1e-9)


def test_mp_cdf_against_quad():
    law = MpLaw(0.3)
    for x in np.linspace(law.lam_minus, law.lam_plus, 9):
        ref, _ = integrate.quad(lambda t: mp_density(law, t), law.lam_minus, x, limit=200)
        assert mp_cdf(law, x) == pytest.approx(ref, abs=1e-9)
    assert mp_cdf(law, 0.0) == 0 and mp_cdf(law, 10.0) == 1


def test_mp_stieltjes():
    law = MpLaw(0.4)
    for z in (1 + 0.5j, 0.2 - 0.1j, 5 + 3j, -1 + 1e-3j):
        re, _ = integrate.quad(lambda x: mp_density(law, x) * (1 / (x - z)).real, law.lam_minus, law.lam_plus, limit=400)
        im, _ = integrate.quad(lambda x: mp_density(law, x) * (1 / (x - z)).imag, law.lam_minus, law.lam_plus, limit=400)
        s = mp_stieltjes(law, z)
        assert abs(s - (re + 1j * im)) < 1e-8
        assert np.sign(s.imag) == np.sign(z.imag)
    with pytest.raises(DomainError):
        mp_stieltjes(law, 2.0)


def test_mp_jacobi_block():
    J = mp_jacobi(MpLaw(0.25), 4)
    assert np.allclose(J.a, [1, 1.25, 1.25, 1.25]) and np.allclose(J.b, 0.5)


def test_parameter_checks():
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(ParameterError):
            MpLaw(bad)
    with pytest.raises(ParameterError):
        NuLaw(0.5, 0.0)
    with pytest.raises(ParameterError):
        AssocLaguerreLaw(-1.5, 1.0)


ASSOC = [(0.5, 1.0), (2.0, 0.25), (-0.5, 4.0), (0.0, 1.0), (3.0, 2.5)]


@pytest.mark.parametrize("alpha,c", ASSOC)
def test_assoc_mass_and_moments(alpha, c):
    law = AssocLaguerreLaw(alpha, c)
    assert assoc_laguerre_integrate(law, np.ones_like) == pytest.approx(1, abs=1e-10)
    for r in range(1, 7):
        ref = jacobi_truncation_moment(alpha, c, r)
        assert assoc_laguerre_integrate(law, lambda x: x**r) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("alpha,c", ASSOC)
def test_assoc_mass_against_adaptive_quad(alpha, c):
    # independent oracle: scipy adaptive quadrature of the density itself
    law = AssocLaguerreLaw(alpha, c)
    f = lambda x: assoc_laguerre_density(law, x)  # noqa: E731
    mass = integrate.quad(f, 0, 1, limit=200)[0] + integrate.quad(f, 1, np.inf, limit=200)[0]
    assert mass == pytest.approx(1, abs=1e-7)


@pytest.mark.parametrize("alpha,c", ASSOC)
def test_stieltjes_expansion_matches_truncation(alpha, c):
    mom = stieltjes_expansion_moments(Fraction(alpha), Fraction(c), 6)
    for r, m in enumerate(mom):
        assert float(m) == pytest.approx(jacobi_truncation_moment(alpha, c, r), rel=1e-12)


@pytest.mark.parametrize("alpha,c", ASSOC[:3])
def test_stieltjes_ratio_matches_density(alpha, c):
    law = AssocLaguerreLaw(alpha, c)
    for z in (-1.0, -0.1 + 0.5j, 2 + 1j, 10 - 3j, -7 + 0.01j):
        ref = assoc_laguerre_integrate(law, lambda x: 1 / (x - z))
        assert abs(assoc_laguerre_stieltjes(law, z) - ref) < 1e-9 * max(1, abs(ref))
    with pytest.raises(DomainError):
        assoc_laguerre_stieltjes(law, 3.0)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.5, 6.0])
def test_c_zero_is_gamma(alpha):
    law = AssocLaguerreLaw(alpha, 0.0)
    x = np.linspace(0.01, 30, 200)
    assert np.allclose(assoc_laguerre_density(law, x), stats.gamma(alpha + 1).pdf(x), rtol=1e-12, atol=0)
    assert np.allclose(gamma_density(alpha, x), stats.gamma(alpha + 1).pdf(x), rtol=1e-12, atol=0)


def test_assoc_jacobi_entries():
    J = assoc_laguerre_jacobi(0.5, 1.0, 3)
    # a_1 = alpha + c + 1, a_n = alpha + 2c + 2n - 1 for n >= 2, b_n = sqrt((alpha + c + n)(c + n))
    assert np.allclose(J.a, [0.5 + 1 + 1, 0.5 + 2 + 3, 0.5 + 2 + 5])
    assert np.allclose(J.b, [np.sqrt((0.5 + 1 + n) * (1 + n)) for n in (1, 2)])
    with pytest.raises(ParameterError):
        jacobi_truncation_moment(0.5, 1.0, 4, n_trunc=3)


@settings(max_examples=15)
@given(alpha=st.floats(-0.95, 6.0), c=st.floats(0.0, 5.0))
def test_assoc_normalization_property(alpha, c):
    law = AssocLaguerreLaw(alpha, c)
    assert assoc_laguerre_integrate(law, np.ones_like) == pytest.approx(1, abs=1e-6)
    m1 = assoc_laguerre_integrate(law, lambda x: x)
    assert m1 == pytest.approx(alpha + c + 1, rel=1e-6)


@pytest.mark.parametrize("g,c", [(0.5, 1.0), (0.3, 0.2), (0.8, 3.0)])
def test_nu_low_moments(g, c):
    law = NuLaw(g, c)
    assert nu_moment(law, 0) == pytest.approx(1)
    assert nu_moment(law, 1) == pytest.approx(1, rel=1e-13)
    assert nu_moment(law, 2) == pytest.approx(1 + g + g / c, rel=1e-13)
    assert nu_integrate(law, lambda x: x**2) == pytest.approx(1 + g + g / c, rel=1e-8)
    xs = np.linspace(1e-3, 20, 4000)
    assert np.all(nu_density(law, xs) >= 0)


def test_nu_tends_to_mp_for_large_c():
    g = 0.5
    for r in range(1, 5):
        assert nu_moment(NuLaw(g, 1e6), r) == pytest.approx(mp_moment(MpLaw(g), r), rel=1e-4)


def chebyshev_variance(f, g, n=512):
    # sigma^2 = 1/2 sum_k k a_k^2 with f(g_m + 2 sqrt(g) cos t) = sum_k a_k cos(k t)
    t = np.pi * (np.arange(n) + 0.5) / n
    vals = f(1 + g + 2 * np.sqrt(g) * np.cos(t))
    k = np.arange(n)
    a = 2 / n * np.cos(np.outer(k, t)) @ vals
    return 0.5 * np.sum(k * a**2)


@pytest.mark.parametrize("g", [0.2, 0.5, 0.8])
def test_clt_variance_closed_forms(g):
    assert clt_variance_mp(lambda x: x, g) == pytest.approx(2 * g, abs=1e-10)
    assert clt_variance_mp(lambda x: x**2, g, fprime=lambda x: 2 * x) == pytest.approx(
        8 * g * (1 + g) ** 2 + 4 * g**2, abs=1e-9)


@pytest.mark.parametrize("f", [np.sin, np.log1p, lambda x: np.exp(-x), lambda x: x**3 - 2 * x])
def test_clt_variance_chebyshev_oracle(f):
    for g in (0.3, 0.6):
        assert clt_variance_mp(f, g) == pytest.approx(chebyshev_variance(f, g), rel=1e-7)


def test_mu1_against_exact_finite_n_shift():
    # N (E<L_N, x^r> - <mp_gammaN, x^r>) -> (2/beta - 1) <mu_1, x^r>, exactly for r <= 2
    g, beta = Fraction(1, 2), Fraction(1, 2)
    for r in range(0, 5):
        N = 10**6
        p = EnsembleParams(N, N / g, beta)
        mp = sum(Fraction(comb(r, k) * comb(r, k - 1), r) * g ** (k - 1) for k in range(1, r + 1)) if r else 1
        shift = float(N * (mean_unscaled_moment(p, r) - mp))
        assert shift == pytest.approx((2 / beta - 1) * mu1_expectation(0.5, [0] * r + [1]), abs=1e-4)


def test_mu1_has_zero_mass():
    assert mu1_expectation(0.3, [1.0]) == pytest.approx(0, abs=1e-14)
    assert mu1_expectation(0.3, lambda x: x) == pytest.approx(0, abs=1e-14)
    assert mu1_expectation(0.3, [0, 0, 1]) == pytest.approx(0.3, abs=1e-13)
