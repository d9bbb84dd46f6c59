"""Exact scalar ring for Fourier constants and Bessel values.

An element is a finite sum of monomials

    c * q^(e/2) * u^b * gamma^g * tau^t * Z^z

with c a Gaussian rational, e in {0, 1} (integer powers of the known q are
folded into c), b an integer (u = q^-s), g mod 4 (gamma^4 = 1), t in {0, 1}
(tau^2 = chi(-1) q) and z in {0, 1} (the formal zeta-integral symbol).
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple, Union

Number = Union[int, Fraction]


@dataclass(frozen=True)
class GaussRat:
    """Gaussian rational re + im*i."""

    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        return cls(Fraction(x), Fraction(0))

    def __add__(self, o: "GaussRat") -> "GaussRat":
        o = GaussRat.of(o)
        return GaussRat(self.re + o.re, self.im + o.im)

    def __neg__(self) -> "GaussRat":
        return GaussRat(-self.re, -self.im)

    def __sub__(self, o) -> "GaussRat":
        return self + (-GaussRat.of(o))

    def __mul__(self, o) -> "GaussRat":
        o = GaussRat.of(o)
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if not self.im:
            return _frac_str(self.re)
        if not self.re:
            return f"{_frac_str(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"({_frac_str(self.re)}{sign}{_frac_str(abs(self.im))}i)"


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_gauss(text: str) -> GaussRat:
    text = text.strip()
    if text.endswith("i") and "(" not in text:
        return GaussRat(Fraction(0), Fraction(text[:-1]))
    if text.startswith("("):
        body = text[1:-1]
        m = re.fullmatch(r"(-?\d+/\d+)([+-])(\d+/\d+)i", body)
        if not m:
            raise ValueError(f"bad Gaussian rational {text!r}")
        im = Fraction(m.group(3)) * (1 if m.group(2) == "+" else -1)
        return GaussRat(Fraction(m.group(1)), im)
    return GaussRat(Fraction(text))


Key = Tuple[int, int, int, int, int]  # (half-q exponent, u, gamma, tau, Z)


class SymbolicScalar:
    """Element of the formal coefficient ring at a fixed (q, chi(-1))."""

    __slots__ = ("q", "chi_m1", "terms")

    def __init__(self, q: int, chi_m1: int, terms: Optional[Dict[Key, GaussRat]] = None):
        self.q = q
        self.chi_m1 = chi_m1
        self.terms: Dict[Key, GaussRat] = {}
        if terms:
            for k, c in terms.items():
                self._accumulate(k, GaussRat.of(c))

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, q: int, chi_m1: int, c: Number | GaussRat = 1) -> "SymbolicScalar":
        return cls(q, chi_m1, {(0, 0, 0, 0, 0): GaussRat.of(c)})

    @classmethod
    def monomial(cls, q: int, chi_m1: int, c: Number | GaussRat = 1, half_q: int = 0,
                 u: int = 0, gamma: int = 0, tau: int = 0, z: int = 0) -> "SymbolicScalar":
        return cls(q, chi_m1, {(half_q, u, gamma, tau, z): GaussRat.of(c)})

    def like(self, c: Number | GaussRat = 1, **kw) -> "SymbolicScalar":
        return SymbolicScalar.monomial(self.q, self.chi_m1, c, **kw)

    def zero(self) -> "SymbolicScalar":
        return SymbolicScalar(self.q, self.chi_m1)

    # normalization ----------------------------------------------------
    def _accumulate(self, key: Key, c: GaussRat) -> None:
        e, b, g, t, z = key
        if z > 1:
            raise ValueError("products of zeta symbols are not represented")
        g %= 4
        while t >= 2:
            t -= 2
            c = c * self.chi_m1
            e += 2
        while t < 0:
            # tau^-1 = tau / (chi(-1) q)
            t += 2
            c = c * Fraction(self.chi_m1)
            e -= 2
        # fold integer powers of q into the coefficient
        whole, e = divmod(e, 2)
        if whole:
            c = c * (Fraction(self.q) ** whole)
        key = (e, b, g, t, z)
        total = self.terms.get(key, GaussRat(Fraction(0))) + c
        if total:
            self.terms[key] = total
        else:
            self.terms.pop(key, None)

    def _coerce(self, other) -> "SymbolicScalar":
        if isinstance(other, SymbolicScalar):
            if (other.q, other.chi_m1) != (self.q, self.chi_m1):
                raise ValueError("scalars from different rings")
            return other
        return SymbolicScalar.const(self.q, self.chi_m1, GaussRat.of(other))

    # ring operations --------------------------------------------------
    def __add__(self, other) -> "SymbolicScalar":
        o = self._coerce(other)
        out = SymbolicScalar(self.q, self.chi_m1, dict(self.terms))
        for k, c in o.terms.items():
            out._accumulate(k, c)
        return out

    __radd__ = __add__

    def __neg__(self) -> "SymbolicScalar":
        return SymbolicScalar(self.q, self.chi_m1, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "SymbolicScalar":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "SymbolicScalar":
        return self._coerce(other) - self

    def __mul__(self, other) -> "SymbolicScalar":
        o = self._coerce(other)
        out = SymbolicScalar(self.q, self.chi_m1)
        for (e1, b1, g1, t1, z1), c1 in self.terms.items():
            for (e2, b2, g2, t2, z2), c2 in o.terms.items():
                out._accumulate((e1 + e2, b1 + b2, g1 + g2, t1 + t2, z1 + z2), c1 * c2)
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SymbolicScalar":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.like(1)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "SymbolicScalar":
        """Inverse of a single monomial (all that the engine ever needs)."""
        if len(self.terms) != 1:
            raise ZeroDivisionError("only monomials are invertible here")
        (e, b, g, t, z), c = next(iter(self.terms.items()))
        if z:
            raise ZeroDivisionError("the zeta symbol is not invertible")
        if c.im:
            n = c.re * c.re + c.im * c.im
            cinv = GaussRat(c.re / n, -c.im / n)
        else:
            cinv = GaussRat(1 / c.re)
        # (q^(e/2) tau^t)^-1 = q^(-e/2) tau^(-t)
        return SymbolicScalar(self.q, self.chi_m1, {(-e, -b, -g, -t, 0): cinv})

    def __truediv__(self, other) -> "SymbolicScalar":
        return self * self._coerce(other).inverse()

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self) -> int:
        return hash((self.q, self.chi_m1, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def is_rational(self) -> bool:
        return all(k == (0, 0, 0, 0, 0) and not c.im for k, c in self.terms.items())

    def as_fraction(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.terms[(0, 0, 0, 0, 0)].re

    def gamma_exponents(self) -> set:
        return {k[2] for k in self.terms}

    def drop_zeta(self) -> "SymbolicScalar":
        """The coefficient of Z (requires every term to carry Z)."""
        if any(k[4] != 1 for k in self.terms):
            raise ValueError("not a multiple of Z")
        return SymbolicScalar(self.q, self.chi_m1,
                              {(e, b, g, t, 0): c for (e, b, g, t, z), c in self.terms.items()})

    def with_zeta(self) -> "SymbolicScalar":
        return self * self.like(1, z=1)

    def substitute_gamma(self, exponent_values: Dict[int, "SymbolicScalar"]) -> "SymbolicScalar":
        out = self.zero()
        for (e, b, g, t, z), c in self.terms.items():
            base = SymbolicScalar(self.q, self.chi_m1, {(e, b, 0, t, z): c})
            out = out + base * exponent_values[g]
        return out

    # numerics ---------------------------------------------------------
    def evaluate(self, gamma: complex = 1, tau: Optional[complex] = None,
                 u: Optional[complex] = None) -> complex:
        total = 0j
        for (e, b, g, t, z), c in sorted(self.terms.items()):
            if z:
                raise ValueError("cannot evaluate the formal zeta symbol")
            if b and u is None:
                raise ValueError("value of u required")
            if t and tau is None:
                raise ValueError("value of tau required")
            v = c.to_complex() * (math.sqrt(self.q) ** e)
            if b:
                v *= u ** b
            if g:
                v *= gamma ** g
            if t:
                v *= tau
            total += v
        return total

    # text -------------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (e, b, g, t, z), c in sorted(self.terms.items()):
            factors = [str(c)]
            if e:
                factors.append(f"q^{{{e}/2}}")
            if b:
                factors.append(f"u^{{{b}}}")
            if g:
                factors.append(f"γ^{{{g}}}")
            if t:
                factors.append("τ")
            if z:
                factors.append("Z")
            parts.append("·".join(factors))
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "chi_m1": self.chi_m1,
            "terms": [[str(c), e, b, g, t, z] for (e, b, g, t, z), c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SymbolicScalar":
        out = cls(doc["q"], doc["chi_m1"])
        for c, e, b, g, t, z in doc["terms"]:
            out._accumulate((e, b, g, t, z), _parse_gauss(c))
        return out


def ssum(items: Iterable[SymbolicScalar], zero: SymbolicScalar) -> SymbolicScalar:
    total = zero
    for x in items:
        total = total + x
    return total
