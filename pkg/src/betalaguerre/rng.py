"""Keyed random streams and the gamma/chi/Dirichlet samplers built on them.

Every stream is a Philox counter-based generator whose key is derived from
``(master_seed, replica_index, stream_tag)``, so any replica can be
regenerated in isolation and the order in which replicas are processed has
no influence on the numbers they see.

Gamma variates are drawn with the Marsaglia-Tsang squeeze method. Shapes
below one go through ``Gamma(a) = Gamma(a + 1) * U**(1/a)``, evaluated in
log space because the high-temperature regime asks for shapes around 1e-3,
where ``U**(1/a)`` underflows for a large fraction of draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# Smallest positive normal double. Draws whose true value lies below it are
# reported as this value so that samples stay strictly positive.
TINY = np.finfo(float).tiny
_LOG_TINY = float(np.log(TINY))


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    replica_index: int = 0
    stream_tag: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ParameterError("master_seed must be a 64-bit unsigned integer")
        if self.replica_index < 0 or self.stream_tag < 0:
            raise ParameterError("replica_index and stream_tag must be non-negative")

    def stream(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(
            self.master_seed, spawn_key=(self.replica_index, self.stream_tag)
        )
        return np.random.Generator(np.random.Philox(ss))

    def child(self, replica_index=None, stream_tag=None) -> "SeedSpec":
        return SeedSpec(
            self.master_seed,
            self.replica_index if replica_index is None else replica_index,
            self.stream_tag if stream_tag is None else stream_tag,
        )


@dataclass(frozen=True)
class ChiParams:
    dof: float

    def __post_init__(self):
        if not self.dof > 0:
            raise ParameterError(f"chi degrees of freedom must be positive, got {self.dof}")


def _as_stream(seed) -> np.random.Generator:
    if isinstance(seed, SeedSpec):
        return seed.stream()
    if isinstance(seed, np.random.Generator):
        return seed
    raise TypeError("seed must be a SeedSpec or a numpy Generator")


def _log_gamma_ge1(shape, rng):
    # Marsaglia-Tsang for shape >= 1, vectorized; rejected slots are redrawn
    # in order, so the result depends only on the stream.
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(shape.shape)
    pending = np.arange(shape.size)
    while pending.size:
        dd, cc = d[pending], c[pending]
        x = rng.standard_normal(pending.size)
        u = rng.random(pending.size)
        v = 1.0 + cc * x
        ok = v > 0
        v3 = np.where(ok, v, 1.0) ** 3
        x2 = x * x
        with np.errstate(divide="ignore"):
            logu = np.log(u)
        accept = ok & ((u < 1.0 - 0.0331 * x2 * x2)
                       | (logu < 0.5 * x2 + dd * (1.0 - v3 + np.log(v3))))
        out[pending[accept]] = np.log(dd[accept]) + np.log(v3[accept])
        pending = pending[~accept]
    return out


def sample_log_gamma(shape, seed, size=None):
    """Logarithm of Gamma(shape, 1) draws.

    ``shape`` may be an array; ``size`` repeats a scalar shape. Working in
    log space keeps tiny-shape draws meaningful far below the double range.
    """
    rng = _as_stream(seed)
    a = np.asarray(shape, dtype=float)
    if size is not None:
        a = np.broadcast_to(a, size)
    if np.any(~(a > 0)):
        raise ParameterError("gamma shape must be positive")
    out_shape = a.shape
    a = a.ravel()
    small = a < 1.0
    logg = _log_gamma_ge1(np.where(small, a + 1.0, a), rng)
    if small.any():
        u = rng.random(int(small.sum()))
        logg[small] += np.log(u) / a[small]
    if out_shape == ():
        return float(logg[0])
    return logg.reshape(out_shape)


def sample_gamma(shape, seed, size=None):
    """Gamma(shape, scale 1) draws, clamped below at the smallest normal double."""
    logg = sample_log_gamma(shape, seed, size)
    out = np.exp(np.maximum(logg, _LOG_TINY))
    return float(out) if np.ndim(out) == 0 else out


def sample_chi(p, seed, size=None):
    """Chi draws with ``p.dof`` degrees of freedom as ``sqrt(2 Gamma(k/2))``.

    ``p`` may be a :class:`ChiParams` or a (possibly array-valued) dof.
    """
    dof = p.dof if isinstance(p, ChiParams) else p
    k = np.asarray(dof, dtype=float)
    if np.any(~(k > 0)):
        raise ParameterError("chi degrees of freedom must be positive")
    logg = sample_log_gamma(k / 2.0, seed, size)
    logchi = 0.5 * (np.log(2.0) + np.asarray(logg))
    out = np.exp(np.maximum(logchi, _LOG_TINY))
    return float(out) if out.ndim == 0 else out


def sample_dirichlet(n, concentration, seed, size=None):
    """Symmetric Dirichlet weights of length ``n`` (renormalized gammas).

    With ``size`` given, returns an array of shape ``(size, n)``.
    """
    if int(n) != n or n < 1:
        raise ParameterError("Dirichlet dimension must be a positive integer")
    if not concentration > 0:
        raise ParameterError("Dirichlet concentration must be positive")
    n = int(n)
    rows = 1 if size is None else int(size)
    logg = sample_log_gamma(float(concentration), seed, size=(rows, n))
    logg = logg - logg.max(axis=1, keepdims=True)
    w = np.exp(logg)
    w /= w.sum(axis=1, keepdims=True)
    return w[0] if size is None else w
