"""Sparse polynomials in (N, kappa, alpha) with exact rational coefficients.

Exponents may be negative, which lets the duality substitution produce
Laurent polynomials in kappa before they are multiplied back out.
"""

from __future__ import annotations

import re
from fractions import Fraction

VARS = ("N", "kappa", "alpha")


class MomentPoly:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for mono, coeff in (terms or {}).items():
            coeff = Fraction(coeff)
            if coeff:
                self.terms[tuple(mono)] = coeff

    @classmethod
    def const(cls, value):
        return cls({(0, 0, 0): value})

    @classmethod
    def var(cls, name):
        mono = [0, 0, 0]
        mono[VARS.index(name)] = 1
        return cls({tuple(mono): 1})

    @classmethod
    def linear(cls, const=0, N=0, kappa=0, alpha=0):
        return cls({(0, 0, 0): const, (1, 0, 0): N, (0, 1, 0): kappa, (0, 0, 1): alpha})

    def _coerce(self, other):
        return other if isinstance(other, MomentPoly) else MomentPoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            out[mono] = out.get(mono, 0) + coeff
        return MomentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return MomentPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                out[mono] = out.get(mono, 0) + c1 * c2
        return MomentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = MomentPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, MomentPoly):
            other = MomentPoly.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def degree(self, name):
        k = VARS.index(name)
        return max((m[k] for m in self.terms), default=0)

    def __call__(self, N, kappa, alpha):
        """Evaluate; exact when all arguments are ints or Fractions."""
        total = 0
        for (i, j, k), coeff in self.terms.items():
            total += coeff * N**i * kappa**j * alpha**k
        return total

    def substitute_monomials(self, fn):
        """Map every monomial through ``fn(mono) -> (coeff, mono')``."""
        out = {}
        for mono, coeff in self.terms.items():
            factor, new = fn(mono)
            out[new] = out.get(new, 0) + coeff * factor
        return MomentPoly(out)

    def collect(self, name):
        """Coefficients of the powers of one variable, as ``{power: poly}``."""
        k = VARS.index(name)
        out = {}
        for mono, coeff in self.terms.items():
            rest = list(mono)
            rest[k] = 0
            out.setdefault(mono[k], {})[tuple(rest)] = coeff
        return {p: MomentPoly(t) for p, t in out.items()}

    def to_text(self):
        """Canonical form: one ``num/den N^i kappa^j alpha^k`` term per line,
        sorted by the exponent triple."""
        if not self.terms:
            return "0/1 N^0 kappa^0 alpha^0"
        lines = []
        for mono in sorted(self.terms):
            c = self.terms[mono]
            lines.append(f"{c.numerator}/{c.denominator} "
                         + " ".join(f"{v}^{e}" for v, e in zip(VARS, mono)))
        return "\n".join(lines)

    _TERM = re.compile(r"^\s*(-?\d+)/(\d+)\s+N\^(-?\d+)\s+kappa\^(-?\d+)\s+alpha\^(-?\d+)\s*$")

    @classmethod
    def from_text(cls, text):
        terms = {}
        for line in text.strip().splitlines():
            m = cls._TERM.match(line)
            if not m:
                raise ValueError(f"malformed term: {line!r}")
            num, den, i, j, k = map(int, m.groups())
            mono = (i, j, k)
            terms[mono] = terms.get(mono, 0) + Fraction(num, den)
        return cls(terms)

    def __repr__(self):
        if not self.terms:
            return "MomentPoly(0)"
        parts = []
        for mono in sorted(self.terms):
            c = self.terms[mono]
            factors = "*".join(f"{v}^{e}" if e != 1 else v
                               for v, e in zip(VARS, mono) if e)
            parts.append(f"({c})" + ("*" + factors if factors else ""))
        return "MomentPoly(" + " + ".join(parts) + ")"
