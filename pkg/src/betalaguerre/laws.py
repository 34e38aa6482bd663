"""Limiting spectral laws and the CLT variance functional.

Marchenko-Pastur integrals use ``x = g_m - 2 sqrt(g) cos(theta)`` on
``[0, pi]``, which removes the square-root endpoints. The associated
Laguerre measure is integrated in ``t = sqrt(x)``: a Gauss-Jacobi panel at
the origin absorbs ``x^alpha`` (for ``alpha < 0`` a rule in ``x^(alpha+1)``
plus geometric panels takes its place), then graded and uniform
Gauss-Legendre panels run out to a cutoff where the Gamma-type tail is
negligible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy import special as sc

from .errors import DomainError, ParameterError
from .special import IntegerParameterWarning, tricomi_psi_negaxis, tricomi_u
from .tridiag import MOMENT_CAP, JacobiMatrix, moment_at_11

_GL = {}


def _gauss_legendre(n):
    if n not in _GL:
        _GL[n] = np.polynomial.legendre.leggauss(n)
    return _GL[n]


def _theta_rule(n=256):
    x, w = _gauss_legendre(n)
    return np.pi * (x + 1) / 2, np.pi * w / 2


# Marchenko-Pastur ------------------------------------------------------------

@dataclass(frozen=True)
class MpLaw:
    gamma: float

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ParameterError(f"gamma must lie in (0, 1), got {self.gamma}")

    @property
    def lam_minus(self):
        return (1 - np.sqrt(self.gamma)) ** 2

    @property
    def lam_plus(self):
        return (1 + np.sqrt(self.gamma)) ** 2

    @property
    def mid(self):
        return 1 + self.gamma

    def x_of_theta(self, theta):
        return self.mid - 2 * np.sqrt(self.gamma) * np.cos(theta)


def _mp(law):
    return law if isinstance(law, MpLaw) else MpLaw(law)


def mp_density(law, x):
    law = _mp(law)
    x = np.asarray(x, dtype=float)
    inside = (x > law.lam_minus) & (x < law.lam_plus)
    xs = np.where(inside, x, 1.0)
    val = np.sqrt(np.clip((law.lam_plus - xs) * (xs - law.lam_minus), 0, None)) \
        / (2 * np.pi * law.gamma * xs)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def mp_integrate(law, f, n=256):
    """``int f dmp`` via the cosine substitution."""
    law = _mp(law)
    th, w = _theta_rule(n)
    x = law.x_of_theta(th)
    return float(np.sum(w * f(x) * 2 * np.sin(th) ** 2 / (np.pi * x)))


def mp_cdf(law, x, n=64):
    """Distribution function, by Gauss-Legendre on ``[0, theta(x)]``."""
    law = _mp(law)
    x = np.asarray(x, dtype=float)
    c = np.clip((law.mid - x) / (2 * np.sqrt(law.gamma)), -1, 1)
    top = np.arccos(c)
    g, w = _gauss_legendre(n)
    th = top[..., None] * (g + 1) / 2
    xt = law.x_of_theta(th)
    vals = np.sum(w * 2 * np.sin(th) ** 2 / (np.pi * xt), axis=-1) * top / 2
    out = np.where(x <= law.lam_minus, 0.0, np.where(x >= law.lam_plus, 1.0, vals))
    return float(out) if out.ndim == 0 else out


def mp_jacobi(law, n):
    """Top-left ``n x n`` block of the Jacobi operator of ``mp_gamma``."""
    law = _mp(law)
    a = np.full(n, 1 + law.gamma)
    a[0] = 1.0
    return JacobiMatrix(a, np.full(n - 1, np.sqrt(law.gamma)))


def mp_moment(law, r):
    """``<mp, x^r>`` as ``(MP^r)(1,1)``; the ``(r+1)``-truncation is exact."""
    if r > MOMENT_CAP:
        raise ParameterError(f"moment order {r} exceeds cap {MOMENT_CAP}")
    return moment_at_11(mp_jacobi(law, r + 1), r)


def mp_stieltjes(law, z):
    """``int mp(x) / (x - z) dx`` off the real axis."""
    law = _mp(law)
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0):
        raise DomainError("the Stieltjes transform is evaluated off the real axis")
    g = law.gamma
    root = np.sqrt((z - law.mid) ** 2 - 4 * g)
    s1 = (1 - g - z + root) / (2 * g * z)
    s2 = (1 - g - z - root) / (2 * g * z)
    # Herglotz branch: Im S has the sign of Im z
    out = np.where(s1.imag * z.imag > 0, s1, s2)
    return complex(out) if out.ndim == 0 else out


# Associated Laguerre ---------------------------------------------------------

@dataclass(frozen=True)
class AssocLaguerreLaw:
    alpha: float
    c: float

    def __post_init__(self):
        if not self.alpha > -1:
            raise ParameterError(f"alpha must exceed -1, got {self.alpha}")
        if not self.c >= 0:
            raise ParameterError(f"c must be non-negative, got {self.c}")
        if not self.alpha + self.c + 1 > 0:
            raise ParameterError("need alpha + c + 1 > 0")

    @cached_property
    def log_norm(self):
        return float(sc.gammaln(self.c + 1) + sc.gammaln(1 + self.c + self.alpha))

    @cached_property
    def x_cut(self):
        # density decays like x^(alpha + 2c) e^-x; leave room for moments <= 6
        p = self.alpha + 2 * self.c + 8
        x = 40.0
        while p * np.log(x) - x - self.log_norm > -45:
            x += 5.0
        return x

    @cached_property
    def rule(self):
        """Nodes ``x_i`` and weights ``w_i`` with ``sum w_i g(x_i) ~ int g dmu``."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegerParameterWarning)
            return _assoc_rule(self)


def _reduced_density(law, x):
    # density / x^alpha
    psi = tricomi_psi_negaxis(law.c, law.alpha, x)
    return np.exp(-x - law.log_norm) / np.abs(psi) ** 2


def _origin_rule_negative_alpha(law, x_top, eps=1e-24, n=24):
    # For -1 < alpha < 0 the reduced density depends on x^(alpha+1) near 0,
    # which no polynomial rule in x or sqrt(x) resolves. On [0, eps] the
    # entire parts of Psi are constant to O(eps), so
    #   Psi ~ A + B x^(alpha+1),  A = G(alpha+1)/G(alpha+c+1),
    #   B = -G(-alpha-1)/G(c) e^(-i pi alpha),
    # which is smooth in s = x^(alpha+1) with x^alpha dx = ds / (alpha+1).
    # Geometric panels in x then cover [eps, x_top].
    a, c = law.alpha, law.c
    gx, gw = _gauss_legendre(n)
    s_top = eps ** (a + 1)
    s = s_top * (gx + 1) / 2
    A = sc.gamma(a + 1) * sc.rgamma(a + c + 1)
    B = -sc.gamma(-a - 1) * sc.rgamma(c) * np.exp(-1j * np.pi * a)
    ws = s_top / 2 * gw / (a + 1) * np.exp(-law.log_norm) / np.abs(A + B * s) ** 2
    xs = s ** (1 / (a + 1))
    k = int(np.ceil(np.log(x_top / eps) / np.log(4.0)))
    edges = x_top * 4.0 ** -np.arange(k, -1, -1.0)
    edges[0] = eps
    lo, hi = edges[:-1, None], edges[1:, None]
    xx = (lo + (hi - lo) * (gx + 1) / 2).ravel()
    ww = ((hi - lo) / 2 * gw).ravel() * assoc_laguerre_density(law, xx)
    return np.concatenate([xs, xx]), np.concatenate([ws, ww])


def _assoc_rule(law, t0=1.0 / 64, panel=0.25, n=24):
    gx, gw = _gauss_legendre(n)
    if law.alpha < -1e-8 and law.c > 0:
        x0, w0 = _origin_rule_negative_alpha(law, t0 * t0)
    else:
        # Gauss-Jacobi panel on [0, t0] with weight t^(2 alpha + 1)
        b = 2 * law.alpha + 1
        jt, jw = sc.roots_jacobi(n, 0.0, b)
        t = t0 * (jt + 1) / 2
        w = jw * (t0 / 2) ** (b + 1) * 2
        x0 = t * t
        w0 = w * _reduced_density(law, x0)
    # graded panels up to t = 1, then uniform panels to sqrt(x_cut)
    edges = [t0]
    while edges[-1] < 1.0:
        edges.append(min(2 * edges[-1], 1.0))
    t_cut = np.sqrt(law.x_cut)
    edges = np.concatenate([edges, np.arange(1.0 + panel, t_cut + panel, panel)])
    lo, hi = edges[:-1, None], edges[1:, None]
    tt = (lo + (hi - lo) * (gx + 1) / 2).ravel()
    ww = ((hi - lo) / 2 * gw).ravel()
    xx = tt * tt
    dens = assoc_laguerre_density(law, xx)
    nodes = np.concatenate([x0, xx])
    weights = np.concatenate([w0, ww * 2 * tt * dens])
    return nodes, weights


def assoc_laguerre_density(law: AssocLaguerreLaw, x):
    """Density of ``mu_{alpha,c}``; zero for ``x < 0``.

    ``c = 0`` gives exactly the Gamma(alpha+1, 1) density.
    """
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    out = np.zeros(flat.shape)
    pos = flat > 0
    if pos.any():
        xp = flat[pos]
        if law.c == 0:
            out[pos] = np.exp(law.alpha * np.log(xp) - xp - sc.gammaln(law.alpha + 1))
        else:
            out[pos] = np.exp(law.alpha * np.log(xp)) * _reduced_density(law, xp)
    out = out.reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def gamma_density(alpha, x):
    x = np.asarray(x, dtype=float)
    xs = np.where(x > 0, x, 1.0)
    out = np.where(x > 0, np.exp(alpha * np.log(xs) - xs - sc.gammaln(alpha + 1)), 0.0)
    return float(out) if out.ndim == 0 else out


def assoc_laguerre_integrate(law: AssocLaguerreLaw, f):
    x, w = law.rule
    return complex(np.sum(w * f(x))) if np.iscomplexobj(f(x[:1])) else float(np.sum(w * f(x)))


def assoc_laguerre_stieltjes(law: AssocLaguerreLaw, z):
    """``Psi(c+1, 1-alpha; -z) / Psi(c, -alpha; -z)`` off the nonnegative axis."""
    z = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(z).ravel()
    if np.any((flat.imag == 0) & (flat.real >= 0)):
        raise DomainError("z must avoid the support [0, inf)")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegerParameterWarning)
        num = tricomi_u(law.c + 1, 1 - law.alpha, -flat)
        den = tricomi_u(law.c, -law.alpha, -flat) if law.c != 0 else 1.0
    out = (num / den).reshape(z.shape)
    return complex(out) if out.ndim == 0 else out


def assoc_laguerre_jacobi(alpha, c, n):
    """Top-left ``n x n`` block of ``J_{alpha,c} = W W^t``."""
    i = np.arange(1, n + 1, dtype=float)
    diag = alpha + c + i
    sub = c + i[:-1]
    a = diag.copy()
    a[1:] += sub
    return JacobiMatrix(a, np.sqrt(diag[:-1] * sub))


def jacobi_truncation_moment(alpha, c, r, n_trunc=None):
    """``(J_{alpha,c}^r)(1,1)``; any truncation of size ``>= r+1`` is exact."""
    if n_trunc is None:
        n_trunc = r + 1
    if n_trunc < r + 1:
        raise ParameterError("truncation must have size at least r + 1")
    return moment_at_11(assoc_laguerre_jacobi(alpha, c, n_trunc), r)


def stieltjes_expansion_moments(alpha, c, r_max):
    """Moments from the large-z expansion of the Stieltjes ratio formula.

    With the asymptotic series ``U(a, b, w) ~ w^-a sum_n (a)_n (a-b+1)_n / n! (-w)^-n``
    the ratio is a formal power series in ``-1/z`` whose coefficients are,
    up to sign, the moments. Exact when ``alpha`` and ``c`` are rationals.
    """
    al = Fraction(alpha) if isinstance(alpha, (int, Fraction)) else Fraction(float(alpha))
    cc = Fraction(c) if isinstance(c, (int, Fraction)) else Fraction(float(c))

    def series(a, b):
        out, t = [], Fraction(1)
        for n in range(r_max + 1):
            out.append(t)
            t = t * (a + n) * (a - b + 1 + n) / (n + 1) * -1
        return out

    P = series(cc + 1, 1 - al)
    Q = series(cc, -al)
    R = []
    for n in range(r_max + 1):
        R.append(P[n] - sum(R[k] * Q[n - k] for k in range(n)))
    return [(-1) ** n * R[n] for n in range(r_max + 1)]


# high-temperature law ---------------------------------------------------------

@dataclass(frozen=True)
class NuLaw:
    gamma: float
    c: float

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ParameterError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not self.c > 0:
            raise ParameterError(f"c must be positive, got {self.c}")

    @property
    def alpha(self):
        return self.c / self.gamma - self.c - 1

    @property
    def scale(self):
        return self.gamma / self.c

    @cached_property
    def base(self):
        return AssocLaguerreLaw(self.alpha, self.c)


def nu_density(law: NuLaw, x):
    x = np.asarray(x, dtype=float)
    return assoc_laguerre_density(law.base, x / law.scale) / law.scale


def nu_moment(law: NuLaw, r):
    if r > MOMENT_CAP:
        raise ParameterError(f"moment order {r} exceeds cap {MOMENT_CAP}")
    return law.scale**r * jacobi_truncation_moment(law.alpha, law.c, r)


def nu_integrate(law: NuLaw, f):
    return assoc_laguerre_integrate(law.base, lambda x: f(law.scale * x))


# fluctuations -------------------------------------------------------------------

def clt_variance_mp(f, gamma, n=64, fprime=None):
    """Limiting variance of the linear statistic of ``f`` in the MP regime.

    The double integral is taken over ``[0, pi]^2`` after
    ``x = g_m + 2 sqrt(g) cos(theta)``, where its weight becomes
    ``4 g (1 - cos(theta) cos(phi)) / (2 pi^2)``. Divided differences closer
    than 1e-7 use ``fprime`` (central differences if it is not given).
    """
    law = MpLaw(gamma)
    th, w = _theta_rule(n)
    x = law.mid + 2 * np.sqrt(gamma) * np.cos(th)
    fx = np.asarray(f(x), dtype=float)
    X, Y = np.meshgrid(x, x, indexing="ij")
    dx = Y - X
    df = fx[None, :] - fx[:, None]
    close = np.abs(dx) < 1e-7
    mid = (X + Y) / 2
    if fprime is not None:
        deriv = np.asarray(fprime(mid), dtype=float)
    else:
        h = 1e-5 * max(1.0, law.lam_plus)
        deriv = (np.asarray(f(mid + h)) - np.asarray(f(mid - h))) / (2 * h)
    with np.errstate(invalid="ignore", divide="ignore"):
        quot = np.where(close, deriv, df / np.where(close, 1.0, dx))
    C = np.cos(th)
    kernel = 4 * gamma * (1 - C[:, None] * C[None, :]) / (2 * np.pi**2)
    return float(np.einsum("i,j,ij->", w, w, quot**2 * kernel))


def mu1_expectation(gamma, p, n=64):
    """``<mu_1, p>`` for the signed measure ``mu_1`` of total mass zero:
    quarter atoms at both edges minus the arcsine law of mass 1/2.

    ``p`` is a vectorized callable or ascending polynomial coefficients.
    """
    law = MpLaw(gamma)
    if not callable(p):
        coeffs = list(p)
        p = lambda x: np.polynomial.polynomial.polyval(x, coeffs)  # noqa: E731
    k = np.arange(1, n + 1)
    th = (2 * k - 1) * np.pi / (2 * n)
    arc = np.mean(p(law.x_of_theta(th))) / 2
    return float(0.25 * p(law.lam_minus) + 0.25 * p(law.lam_plus) - arc)
