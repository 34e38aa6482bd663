"""Kummer and Tricomi confluent hypergeometric functions.

``kummer_1f1`` sums the Maclaurin series with Neumaier compensation, after
Kummer's transformation ``1F1(a; b; z) = e^z 1F1(b - a; b; -z)`` whenever
``Re z < 0``. ``tricomi_u`` combines two such series,

    U(a, b, z) = G(1-b)/G(a-b+1) M(a, b, z) + G(b-1)/G(a) z^(1-b) M(a-b+1, 2-b, z),

and switches to the large-|z| asymptotic series where that is more accurate.
Every double-precision result carries a rounding estimate; points where the
estimate is too large (integer ``b``, heavy cancellation between the two
terms) are recomputed with the same formula in mpmath at 50 digits, with
integer ``b`` replaced by the average over ``b +- 1e-8``.
"""

from __future__ import annotations

import warnings

import mpmath
import numpy as np
from scipy import special as sc

from .errors import DomainError, NumericalError

EPS = np.finfo(float).eps
MAX_TERMS = 20000
_SERIES_RADIUS = 200.0
_ASYMPTOTIC_RADIUS = 18.0
_ACCEPT = 1e-12
_MP_DPS = 50
_MP_SHIFT = mpmath.mpf("1e-8")


class IntegerParameterWarning(UserWarning):
    """Raised when an integer ``b`` forced the perturbed evaluation."""


def _is_nonpos_int(b):
    return b <= 0 and float(b).is_integer()


def _is_int(b, tol=0.0):
    return abs(b - round(b)) <= tol


def _neumaier(s, comp, x):
    t = s + x
    comp = comp + np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
    return t, comp


def _series(a, b, z):
    """Maclaurin series of 1F1 on an array ``z``; returns (sum, sum of |terms|)."""
    z = np.asarray(z)
    cplx = np.iscomplexobj(z)
    term = np.ones(z.shape, dtype=z.dtype)
    s_re, c_re = np.ones(z.shape), np.zeros(z.shape)
    s_im, c_im = np.zeros(z.shape), np.zeros(z.shape)
    abs_sum = np.ones(z.shape)
    small_run = np.zeros(z.shape, dtype=int)
    active = np.ones(z.shape, dtype=bool)
    n = 0
    while active.any():
        if n >= MAX_TERMS:
            raise NumericalError(f"1F1({a}; {b}; z) series did not converge in {MAX_TERMS} terms")
        term = np.where(active, term * ((a + n) / (b + n)) * z / (n + 1), 0)
        n += 1
        s_re, c_re = _neumaier(s_re, c_re, term.real)
        if cplx:
            s_im, c_im = _neumaier(s_im, c_im, term.imag)
        mag = np.abs(term)
        abs_sum += mag
        total = np.abs((s_re + c_re) + 1j * (s_im + c_im))
        tiny = mag <= 1e-16 * total
        small_run = np.where(tiny, small_run + 1, 0)
        active &= ~((small_run >= 2) & (n > abs(b)))
    s = s_re + c_re
    if cplx:
        s = s + 1j * (s_im + c_im)
    return s, abs_sum


def _m_with_error(a, b, z):
    """1F1 with a relative rounding estimate, Kummer-transformed where Re z < 0."""
    z = np.asarray(z)
    cplx = np.iscomplexobj(z)
    val = np.empty(z.shape, dtype=complex if cplx else float)
    err = np.empty(z.shape)
    neg = z.real < 0
    if (~neg).any():
        s, absum = _series(a, b, z[~neg])
        val[~neg] = s
        err[~neg] = EPS * absum / np.maximum(np.abs(s), 1e-300)
    if neg.any():
        s, absum = _series(b - a, b, -z[neg])
        val[neg] = np.exp(z[neg]) * s
        err[neg] = EPS * absum / np.maximum(np.abs(s), 1e-300) + 4 * EPS * np.abs(z[neg])
    return val, err


def kummer_1f1(a, b, z):
    """Kummer's function ``1F1(a; b; z)`` for real ``a, b`` and real or complex ``z``.

    Accurate to about 1e-10 relative for real ``|z| <= 200``.
    """
    if _is_nonpos_int(b):
        raise DomainError(f"1F1 has a pole at b = {b}")
    zz = np.asarray(z)
    val, _ = _m_with_error(float(a), float(b), np.atleast_1d(zz))
    return val[0] if zz.ndim == 0 else val.reshape(zz.shape)


def _u_asymptotic(a, b, logr, theta):
    """Asymptotic U(a, b, z) at z = exp(logr + i theta); returns (value, relerr)."""
    r = np.exp(logr)
    mz_inv = -np.exp(-logr - 1j * theta)
    term = np.ones(np.shape(r), dtype=complex)
    total = np.ones(np.shape(r), dtype=complex)
    last = np.full(np.shape(r), np.inf)
    err = np.zeros(np.shape(r))
    done = np.zeros(np.shape(r), dtype=bool)
    n = 0
    while not done.all() and n < 400:
        new = term * (a + n) * (a - b + 1 + n) / (n + 1) * mz_inv
        mag = np.abs(new)
        grow = mag >= last
        stop = ~done & (grow | (mag <= 1e-17 * np.abs(total)))
        err = np.where(stop, np.where(grow, np.abs(term), mag), err)
        done |= stop
        total = np.where(done, total, total + new)
        last = np.where(done, last, mag)
        term = new
        n += 1
    err = np.where(done, err, np.abs(term))
    scale = np.exp(-a * (logr + 1j * theta))
    return scale * total, err / np.maximum(np.abs(total), 1e-300)


def _two_term(a, b, logr, theta):
    """Two-term U with rounding estimate at z = exp(logr + i theta), float path.

    Points beyond the series radius, or any point when ``b`` is within 1e-8
    of an integer, come back as NaN with an infinite error estimate.
    """
    u = np.full(logr.shape, np.nan + 0j)
    err = np.full(logr.shape, np.inf)
    ok = np.exp(logr) <= _SERIES_RADIUS
    if _is_int(b, float(_MP_SHIFT)) or not ok.any():
        return u, err
    lr, th = logr[ok], theta[ok]
    # on the real axis M gets a real argument so theta = -pi stays exact
    if np.all(np.sin(th) == np.sin(np.pi * np.round(th / np.pi))):
        zarg = np.exp(lr) * np.cos(th)
    else:
        zarg = np.exp(lr) * np.exp(1j * th)
    try:
        m1, e1 = _m_with_error(a, b, zarg)
        m2, e2 = _m_with_error(a - b + 1, 2 - b, zarg)
    except NumericalError:
        return u, err
    c1 = sc.gamma(1 - b) * sc.rgamma(a - b + 1)
    c2 = sc.gamma(b - 1) * sc.rgamma(a)
    power = np.exp((1 - b) * (lr + 1j * th))
    t1 = c1 * m1
    t2 = c2 * power * m2
    val = t1 + t2
    scale = np.abs(t1) + np.abs(t2)
    e = (np.abs(t1) * e1 + np.abs(t2) * e2 + 8 * EPS * scale) / np.maximum(np.abs(val), 1e-300)
    u[ok] = val
    err[ok] = np.where(np.isfinite(e), e, np.inf)
    return u, err


def _two_term_mp(a, b, r, theta):
    # Same two-term formula at extended precision; integer b is averaged
    # over b +- shift since the formula itself has a removable singularity.
    with mpmath.workdps(_MP_DPS):
        a, r, theta = mpmath.mpf(a), mpmath.mpf(r), mpmath.mpf(theta)
        z = mpmath.mpc(r * mpmath.cos(theta), r * mpmath.sin(theta))

        def formula(bb):
            c1 = mpmath.gamma(1 - bb) * mpmath.rgamma(a - bb + 1)
            c2 = mpmath.gamma(bb - 1) * mpmath.rgamma(a)
            power = mpmath.exp((1 - bb) * (mpmath.log(r) + 1j * theta))
            return c1 * mpmath.hyp1f1(a, bb, z) + c2 * power * mpmath.hyp1f1(a - bb + 1, 2 - bb, z)

        b = mpmath.mpf(b)
        if abs(b - mpmath.nint(b)) < _MP_SHIFT:
            bi = mpmath.nint(b)
            val = (formula(bi + _MP_SHIFT) + formula(bi - _MP_SHIFT)) / 2
        else:
            val = formula(b)
        return complex(val)


def _u_polar(a, b, logr, theta, warn=True):
    """U(a, b, r e^{i theta}) for arrays of log-modulus and argument."""
    logr = np.atleast_1d(np.asarray(logr, dtype=float))
    theta = np.broadcast_to(np.asarray(theta, dtype=float), logr.shape).copy()
    if a == 0:
        return np.ones(logr.shape, dtype=complex)
    out, err = _two_term(a, b, logr, theta)
    big = np.exp(logr) >= _ASYMPTOTIC_RADIUS
    if big.any():
        va, ea = _u_asymptotic(a, b, logr[big], theta[big])
        better = ea < err[big]
        idx = np.flatnonzero(big)[better]
        out[idx], err[idx] = va[better], ea[better]
    bad = ~(err <= _ACCEPT)
    if bad.any():
        if warn and _is_int(b, 1e-8):
            warnings.warn(f"integer b = {b}: using the perturbed two-term formula",
                          IntegerParameterWarning, stacklevel=3)
        for i in np.flatnonzero(bad):
            out[i] = _two_term_mp(a, b, float(np.exp(logr[i])), float(theta[i]))
    return out


def tricomi_u(a, b, z):
    """Tricomi's ``U(a, b, z)`` on the principal branch, ``z`` off ``(-inf, 0]``."""
    zz = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(zz).ravel()
    if np.any((flat.imag == 0) & (flat.real <= 0)):
        raise DomainError("U is evaluated off the branch cut (-inf, 0]")
    out = _u_polar(float(a), float(b), np.log(np.abs(flat)), np.angle(flat))
    return out[0] if zz.ndim == 0 else out.reshape(zz.shape)


def tricomi_psi_negaxis(c, alpha, x):
    """``Psi(c, -alpha; x e^{-i pi})`` for ``x > 0``.

    This is the two-term combination

        G(alpha+1)/G(alpha+c+1) 1F1(c; -alpha; -x)
            - G(-alpha-1)/G(c) x^(alpha+1) e^{-i pi alpha} 1F1(alpha+c+1; 2+alpha; -x),

    i.e. ``U(c, -alpha, .)`` approached from below the negative axis.
    """
    xx = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xx).ravel()
    if np.any(flat <= 0):
        raise DomainError("x must be positive")
    if c == 0:
        out = np.ones(flat.shape, dtype=complex)
    else:
        out = _u_polar(float(c), -float(alpha), np.log(flat), -np.pi)
    return out[0] if xx.ndim == 0 else out.reshape(xx.shape)
