"""Bidiagonal model, Jacobi matrices and their spectral measures."""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
import scipy.sparse as sp

from .errors import NumericalError, ParameterError
from .rng import _as_stream, sample_chi

MOMENT_CAP = 30


@dataclass(frozen=True)
class EnsembleParams:
    N: int
    M: float
    beta: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"N must be a positive integer, got {self.N}")
        if not self.M > self.N - 1:
            raise ParameterError(f"need M > N - 1, got N={self.N}, M={self.M}")
        if not self.beta > 0:
            raise ParameterError(f"beta must be positive, got {self.beta}")

    @property
    def gamma(self) -> float:
        return self.N / self.M

    @property
    def kappa(self) -> float:
        return self.beta / 2

    @property
    def alpha(self) -> float:
        return self.beta / 2 * (self.M - self.N + 1) - 1

    @classmethod
    def from_ratio(cls, N, gamma, beta):
        return cls(N, N / gamma, beta)

    def chi_dofs(self):
        """Degrees of freedom of the diagonal and subdiagonal chi entries."""
        i = np.arange(1, self.N + 1)
        c = self.beta * (self.M - i + 1)
        d = self.beta * (self.N - i[:-1])
        return c, d


@dataclass(frozen=True)
class BidiagonalSample:
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        if len(self.d) != len(self.c) - 1:
            raise ParameterError("subdiagonal must be one shorter than the diagonal")

    def dense(self):
        B = np.diag(self.c)
        if len(self.d):
            B += np.diag(self.d, -1)
        return B


@dataclass(frozen=True)
class JacobiMatrix:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if len(self.b) != max(len(self.a) - 1, 0):
            raise ParameterError("off-diagonal must be one shorter than the diagonal")

    @property
    def n(self):
        return len(self.a)

    def dense(self):
        J = np.diag(np.asarray(self.a, dtype=float))
        if len(self.b):
            J += np.diag(self.b, 1) + np.diag(self.b, -1)
        return J

    def norm(self):
        """Infinity norm, used to scale tolerances."""
        a, b = np.abs(self.a), np.abs(self.b)
        row = a.copy()
        row[:-1] += b
        row[1:] += b
        return float(row.max()) if len(row) else 0.0


@dataclass(frozen=True)
class PointMeasure:
    atoms: np.ndarray
    weights: np.ndarray
    near_degenerate: int = field(default=0, compare=False)

    def __post_init__(self):
        if len(self.atoms) != len(self.weights):
            raise ParameterError("atoms and weights differ in length")

    @classmethod
    def empirical(cls, atoms):
        atoms = np.sort(np.asarray(atoms, dtype=float))
        return cls(atoms, np.full(len(atoms), 1.0 / len(atoms)))

    def integrate(self, f):
        return float(np.dot(self.weights, f(self.atoms)))

    def moment(self, r):
        return float(np.dot(self.weights, self.atoms**r))


def sample_bidiagonal(p: EnsembleParams, seed) -> BidiagonalSample:
    """Draw the scaled chi bidiagonal factor for ``p`` from one stream.

    The diagonal is drawn first, then the subdiagonal.
    """
    rng = _as_stream(seed)
    cdof, ddof = p.chi_dofs()
    scale = 1.0 / np.sqrt(p.beta * p.M)
    c = sample_chi(cdof, rng) * scale
    d = sample_chi(ddof, rng) * scale if p.N > 1 else np.empty(0)
    return BidiagonalSample(np.atleast_1d(c), np.atleast_1d(d))


def to_jacobi(B: BidiagonalSample) -> JacobiMatrix:
    c, d = np.asarray(B.c, dtype=float), np.asarray(B.d, dtype=float)
    a = c**2
    a[1:] += d**2
    return JacobiMatrix(a, c[:-1] * d)


@numba.njit(cache=True, nogil=True)
def _pythag(a, b):
    # sqrt(a^2 + b^2), falling back to hypot when squaring would over/underflow
    t = a * a + b * b
    if 1e-290 < t < 1e290:
        return np.sqrt(t)
    return np.hypot(a, b)


@numba.njit(cache=True, nogil=True)
def _tql(d, e, z, want_z, max_iter):
    # Implicit QL with Wilkinson-type shift on (d, e); e[k] couples k, k+1.
    # Only the first row of the accumulated rotation product is kept in z.
    # Returns -1 on success, otherwise the index that failed to converge.
    n = d.shape[0]
    total = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 2.220446049250313e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            total += 1
            if total > max_iter:
                return l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = _pythag(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = _pythag(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_z:
                    f = z[i + 1]
                    z[i + 1] = s * z[i] + c * f
                    z[i] = c * z[i] - s * f
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def _solve(J: JacobiMatrix, want_z):
    n = J.n
    d = np.array(J.a, dtype=float)
    e = np.zeros(n)
    e[: n - 1] = J.b
    z = np.zeros(n)
    z[0] = 1.0
    if n > 1:
        status = _tql(d, e, z, want_z, 50 * n)
        if status >= 0:
            raise NumericalError(f"QL iteration did not converge at index {status}", status)
    order = np.argsort(d, kind="stable")
    return d[order], z[order]


def eigenvalues(J: JacobiMatrix) -> np.ndarray:
    """All eigenvalues of ``J`` in ascending order."""
    return _solve(J, False)[0]


def spectral_weights(J: JacobiMatrix) -> PointMeasure:
    """Spectral measure of ``J``: eigenvalues carrying weights ``v_i(1)**2``.

    Eigenvalues closer than ``1e-12 * ||J||`` are still treated as distinct;
    how many such gaps occurred is recorded in ``near_degenerate``.
    """
    lam, z = _solve(J, True)
    w = z * z
    w /= w.sum()
    gaps = np.diff(lam)
    near = int(np.count_nonzero(gaps < 1e-12 * max(J.norm(), 1e-300)))
    return PointMeasure(lam, w, near)


def moment_at_11(J: JacobiMatrix, r: int, cap: int = MOMENT_CAP) -> float:
    """``(J**r)[0, 0]`` from the top-left ``(r+1) x (r+1)`` block."""
    if r < 0 or int(r) != r:
        raise ParameterError("moment order must be a non-negative integer")
    if r > cap:
        raise ParameterError(f"moment order {r} exceeds cap {cap}")
    k = min(J.n, r + 1)
    a = np.asarray(J.a[:k], dtype=float)
    b = np.asarray(J.b[: k - 1], dtype=float)
    v = np.zeros(k)
    v[0] = 1.0
    for _ in range(r):
        w = a * v
        w[:-1] += b * v[1:]
        w[1:] += b * v[:-1]
        v = w
    return float(v[0])


def trace_power(J: JacobiMatrix, r: int, method: str = "eigen", cap: int = MOMENT_CAP) -> float:
    """``tr(J**r)`` from the eigenvalues or from banded matrix powers."""
    if r < 0 or int(r) != r:
        raise ParameterError("power must be a non-negative integer")
    if r > cap:
        raise ParameterError(f"power {r} exceeds cap {cap}")
    if method == "eigen":
        return float(np.sum(eigenvalues(J) ** r))
    if method == "banded":
        T = sp.diags([J.b, J.a, J.b], [-1, 0, 1], format="csr") if J.n > 1 \
            else sp.csr_matrix(np.atleast_2d(J.a))
        P = sp.identity(J.n, format="csr")
        for _ in range(r):
            P = P @ T
        return float(P.diagonal().sum())
    raise ParameterError(f"unknown method {method!r}")


@dataclass
class CarlemanReport:
    n_max: int
    partial_sum: float
    verdict: str  # "divergent" or "inconclusive"
    last_doubling: float
    previous_doubling: float


def check_carleman(b, n_max: int) -> CarlemanReport:
    """Partial sums of ``1/b_n`` with a crude divergence flag.

    ``b`` is a callable ``n -> b_n`` (1-based) or a sequence. The sum is
    flagged divergent when the increment over the last doubling of ``n``
    has not shrunk below 0.9 of the one before it, as for ``b_n ~ n``.
    """
    if n_max < 1:
        raise ParameterError("n_max must be at least 1")
    if callable(b):
        vals = np.array([b(n) for n in range(1, n_max + 1)], dtype=float)
    else:
        vals = np.asarray(b, dtype=float)[:n_max]
        if len(vals) < n_max:
            raise ParameterError("sequence shorter than n_max")
    if np.any(vals <= 0):
        raise ParameterError("off-diagonal entries must be positive")
    cums = np.cumsum(1.0 / vals)

    def at(n):
        return cums[n - 1] if n >= 1 else 0.0

    last = at(n_max) - at(n_max // 2)
    prev = at(n_max // 2) - at(n_max // 4)
    divergent = n_max >= 4 and last >= 0.9 * prev
    return CarlemanReport(n_max, float(cums[-1]), "divergent" if divergent else "inconclusive",
                          float(last), float(prev))


def sample_spectrum(p: EnsembleParams, seed, weights: bool = False):
    """Eigenvalues (and optionally spectral weights) of one sampled J_N."""
    J = to_jacobi(sample_bidiagonal(p, seed))
    if weights:
        mu = spectral_weights(J)
        return mu.atoms, mu.weights
    return eigenvalues(J), None
