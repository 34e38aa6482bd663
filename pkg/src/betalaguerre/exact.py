"""Exact mean moments of the scaled tridiagonal model.

``m_r(N, kappa, alpha)`` is the mean of ``(J~^r)(1,1)`` where ``J~ = B~ B~^t``
and the squared entries of ``B~`` are independent Gamma variables: the
diagonal ``c~_i^2 ~ Gamma(alpha + 1 + kappa (N - i))`` and the subdiagonal
``d~_i^2 ~ Gamma(kappa (N - i))``. The top-left entry of ``J~^r`` is expanded
as a polynomial in these squared entries, its mean is taken monomial by
monomial using Gamma moments, and the dependence on ``N`` is recovered by
exact Lagrange interpolation over integer ``N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .poly import MomentPoly
from .tridiag import EnsembleParams, JacobiMatrix, moment_at_11

DEGREE_CAP = 8


def chi_squared_moment_poly(m: int) -> tuple:
    """Coefficients (ascending in the dof ``k``) of ``E[(chi^2_k)^m]``.

    ``E[(chi^2_k)^m] = k (k + 2) ... (k + 2m - 2)``.
    """
    if m < 0:
        raise ParameterError("moment order must be non-negative")
    coeffs = [Fraction(1)]
    for j in range(m):
        # multiply by (k + 2j)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for p, c in enumerate(coeffs):
            nxt[p] += 2 * j * c
            nxt[p + 1] += c
        coeffs = nxt
    return tuple(coeffs)


def eval_univariate(coeffs, k):
    return sum(c * k**p for p, c in enumerate(coeffs))


@lru_cache(maxsize=None)
def path_expansion(r: int) -> dict:
    """``(J^r)(1,1)`` as an integer polynomial in ``x_i = c_i^2, y_i = d_i^2``.

    Keys are exponent tuples ``(e_1..e_L, f_1..f_L)`` with ``L = r // 2 + 1``:
    ``e_i`` is the power of ``x_i`` and ``f_i`` that of ``y_i``. The matrix is
    taken to be large enough that no path feels its lower-right corner.
    """
    L = r // 2 + 1
    width = L + 1

    def mono(xs=(), ys=()):
        e = [0] * (2 * L)
        for i in xs:
            e[i] += 1
        for i in ys:
            e[L + i] += 1
        return tuple(e)

    def mul(p, q):
        out = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return out

    def add(p, q):
        out = dict(p)
        for m, c in q.items():
            out[m] = out.get(m, 0) + c
        return {m: c for m, c in out.items() if c}

    # Row vector e_1^t T^k with T the diagonally similar non-symmetric form:
    # T[j, j] = x_j + y_{j-1}, T[j, j+1] = x_j y_j, T[j+1, j] = 1.
    diag = []
    up = []
    for j in range(width):
        dj = {mono(xs=(j,)): 1} if j < L else {}
        if 0 < j <= L:
            dj = add(dj, {mono(ys=(j - 1,)): 1})
        diag.append(dj)
        up.append({mono(xs=(j,), ys=(j,)): 1} if j < L else {})
    u = [{} for _ in range(width)]
    u[0] = {mono(): 1}
    for _ in range(r):
        nxt = []
        for j in range(width):
            acc = mul(u[j], diag[j]) if u[j] else {}
            if j > 0 and u[j - 1]:
                acc = add(acc, mul(u[j - 1], up[j - 1]))
            if j + 1 < width and u[j + 1]:
                acc = add(acc, u[j + 1])
            nxt.append(acc)
        u = nxt
    return u[0]


@lru_cache(maxsize=None)
def _rising(shape: MomentPoly, n: int) -> MomentPoly:
    out = MomentPoly.const(1)
    for j in range(n):
        out = out * (shape + j)
    return out


def moment_poly_at_N(r: int, N: int) -> MomentPoly:
    """``m_r`` with ``N`` fixed to an integer, as a polynomial in (kappa, alpha)."""
    L = r // 2 + 1
    total = MomentPoly()
    for expo, count in path_expansion(r).items():
        term = MomentPoly.const(count)
        for i in range(L):
            e, f = expo[i], expo[L + i]
            row = i + 1
            if e:
                term = term * _rising(MomentPoly.linear(1, kappa=N - row, alpha=1), e)
            if f:
                term = term * _rising(MomentPoly.linear(kappa=N - row), f)
        total = total + term
    return total


def _interpolate(values, nodes):
    # Lagrange interpolation in N with polynomial-valued ordinates.
    x = MomentPoly.var("N")
    out = MomentPoly()
    for j, (Nj, Pj) in enumerate(zip(nodes, values)):
        basis = MomentPoly.const(1)
        for l, Nl in enumerate(nodes):
            if l != j:
                basis = basis * (x - Nl) * Fraction(1, Nj - Nl)
        out = out + basis * Pj
    return out


@lru_cache(maxsize=None)
def moment_poly(r: int, nodes: tuple = None, cap: int = DEGREE_CAP) -> MomentPoly:
    """``m_r(N, kappa, alpha)`` as an exact polynomial.

    ``nodes`` are the integer ``N`` values used for interpolation; the
    default is ``r + 1, ..., 2r + 2``.
    """
    if r < 0 or int(r) != r:
        raise ParameterError("moment order must be a non-negative integer")
    if r > cap:
        raise ParameterError(f"moment order {r} exceeds cap {cap}")
    if r == 0:
        return MomentPoly.const(1)
    if nodes is None:
        nodes = tuple(range(r + 1, 2 * r + 3))
    if len(set(nodes)) < r + 2 or min(nodes) < 1:
        raise ParameterError(f"need at least {r + 2} distinct positive integer nodes")
    return _interpolate([moment_poly_at_N(r, N) for N in nodes], nodes)


def dual_transform(p: MomentPoly, r: int) -> MomentPoly:
    """``(-1)^r kappa^r p(-kappa N, 1/kappa, -alpha/kappa)``."""
    def fn(mono):
        a, b, c = mono
        return (-1) ** (a + c + r), (a, a - b - c + r, c)
    return p.substitute_monomials(fn)


def verify_duality(r: int, cap: int = DEGREE_CAP):
    """Whether ``m_r`` equals its dual transform; returns ``(ok, residual)``."""
    m = moment_poly(r, cap=cap)
    residual = m - dual_transform(m, r)
    return residual.is_zero(), residual


@dataclass(frozen=True)
class DnMatrix:
    """Lower bidiagonal ``D_N(a)``: diagonal ``sqrt(a + n - i)``, subdiagonal ``sqrt(n - i)``."""
    n: int
    a: float

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("size must be positive")
        if self.a < 0:
            raise ParameterError("D_N(a) needs a >= 0 for real entries")

    def diagonal(self):
        i = np.arange(1, self.n + 1)
        return np.sqrt(float(self.a) + self.n - i)

    def subdiagonal(self):
        i = np.arange(1, self.n)
        return np.sqrt((self.n - i).astype(float))

    def jacobi(self) -> JacobiMatrix:
        c, d = self.diagonal(), self.subdiagonal()
        a = c**2
        a[1:] += d**2
        return JacobiMatrix(a, c[:-1] * d)


def kappa_leading_coefficient(r: int, a, N):
    """Coefficient of ``kappa^r`` in ``m_r(N, kappa, a kappa)``.

    Raises if ``m_r(N, kappa, a kappa)`` has a term of higher degree in kappa.
    """
    m = moment_poly(r)
    by_degree = {}
    for (i, j, k), coeff in m.terms.items():
        by_degree[j + k] = by_degree.get(j + k, 0) + coeff * N**i * a**k
    top = max((d for d, v in by_degree.items() if v != 0), default=0)
    if top > r:
        raise ArithmeticError(f"m_{r}(N, kappa, a kappa) has degree {top} > {r} in kappa")
    return by_degree.get(r, 0)


def kappa_limit_check(r: int, a, N: int, tol: float = 1e-10):
    """Compare the kappa-leading coefficient with ``(D_N(a) D_N(a)^t)^r (1,1)``.

    Returns ``(ok, leading, banded)``.
    """
    lead = kappa_leading_coefficient(r, a, N)
    banded = moment_at_11(DnMatrix(N, a).jacobi(), r)
    ok = abs(float(lead) - banded) <= tol * max(1.0, abs(banded))
    return ok, lead, banded


def _exact(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return Fraction(float(x))


def mean_unscaled_moment(p: EnsembleParams, r: int, cap: int = DEGREE_CAP) -> Fraction:
    """Exact ``E<L_N, x^r>`` for the ensemble ``p``.

    Parameters are converted to Fractions exactly (floats by their binary
    value), so the result is the exact mean for the parameters as stored.
    """
    N, M, beta = _exact(p.N), _exact(p.M), _exact(p.beta)
    kappa = beta / 2
    alpha = kappa * (M - N + 1) - 1
    scale = 2 / (beta * M)
    return scale**r * moment_poly(r, cap=cap)(N, kappa, alpha)
