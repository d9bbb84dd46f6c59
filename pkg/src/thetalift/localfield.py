"""Exact arithmetic in a p-adic field L and its quadratic extensions.

Elements of L are modelled two ways:

* exact rationals (``fractions.Fraction``), which are dense in Q_p and are
  what the symbolic engine uses for every matrix entry and coordinate;
* ``PadicElement``, a valuation plus a unit residue at tracked precision,
  for callers that only know finitely many digits.

``ExtElement`` models E = L(sqrt(delta)) (or L x L when split) over either
coefficient type.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

KINDS = ("split", "inert", "ramified")

Rational = Union[int, Fraction]


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be determined at the available precision."""


class FieldConfigError(ValueError):
    """Raised for unsupported field parameters (even p, bad delta, ...)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an integer prime to the odd prime p."""
    a %= p
    if a == 0:
        raise ZeroDivisionError("Legendre symbol of a multiple of p")
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


@lru_cache(maxsize=None)
def least_nonresidue(p: int) -> int:
    for a in range(2, p):
        if legendre(a, p) == -1:
            return a
    raise FieldConfigError(f"no quadratic non-residue mod {p}")


def as_fraction(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def valuation(x: Rational, p: int) -> int:
    """p-adic valuation of a non-zero rational."""
    x = as_fraction(x)
    if x == 0:
        raise ZeroDivisionError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def val_or_inf(x: Rational, p: int) -> float:
    x = as_fraction(x)
    return float("inf") if x == 0 else valuation(x, p)


def unit_part(x: Rational, p: int) -> Fraction:
    """x / p^v(x), a rational that is a p-adic unit."""
    x = as_fraction(x)
    v = valuation(x, p)
    return x / Fraction(p) ** v


def unit_residue(x: Rational, p: int, digits: int = 1) -> int:
    """Residue of the unit part of x modulo p^digits."""
    u = unit_part(x, p)
    mod = p ** digits
    return (u.numerator * pow(u.denominator, -1, mod)) % mod


def reduce_mod(x: Rational, p: int, k: int) -> Fraction:
    """Canonical representative of x modulo p^k Z_p.

    Requires x to be p-integral above level k, i.e. valid for all x; the
    representative is p^m * r with 0 <= r < p^(k - m) where m = min(v(x), k).
    """
    x = as_fraction(x)
    if x == 0:
        return Fraction(0)
    den = x.denominator
    m = 0
    while den % p == 0:
        den //= p
        m += 1
    # x = a / (p^m * den) with den prime to p
    top = x.numerator * pow(den, -1, p ** (k + m)) if k + m > 0 else 0
    scaled = Fraction(top % (p ** (k + m)) if k + m > 0 else 0, p ** m)
    return scaled


def frac_part(x: Rational, p: int) -> Fraction:
    """p-adic fractional part {x} in [0, 1), so x - {x} lies in Z_p."""
    x = as_fraction(x)
    den = x.denominator
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    if k == 0:
        return Fraction(0)
    mod = p ** k
    top = (x.numerator * pow(den, -1, mod)) % mod
    return Fraction(top, mod)


# ---------------------------------------------------------------------------
# Field parameters and the characters psi, chi
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldParams:
    """Residue characteristic p, extension kind and the square class delta.

    For ``ramified`` delta = pi_unit * p.  The quadratic character of E/L is
    then forced: chi(-delta) = 1 because -delta is a norm, so
    chi(p) = legendre(-pi_unit).
    """

    p: int
    kind: str
    delta: Fraction

    @property
    def q(self) -> int:
        return self.p

    @property
    def split(self) -> bool:
        return self.kind == "split"

    @property
    def q_ext(self) -> int:
        """Residue field size of E (q for ramified, q^2 for inert)."""
        return self.p ** 2 if self.kind == "inert" else self.p

    @property
    def chi_pi(self) -> int:
        """chi(p) for the uniformizer p of L."""
        if self.kind == "ramified":
            u = unit_residue(self.delta, self.p)
            return legendre(-u, self.p)
        if self.kind == "inert":
            return -1
        return 1

    @property
    def chi_minus_one(self) -> int:
        if self.kind == "ramified":
            return legendre(-1, self.p)
        return 1

    @classmethod
    def make(cls, p: int, kind: str, delta: Rational | None = None,
             pi_unit: int = 1) -> "FieldParams":
        if kind not in KINDS:
            raise FieldConfigError(f"unknown extension kind {kind!r}")
        if p == 2 or not is_prime(p):
            raise FieldConfigError(f"p must be an odd prime, got {p}")
        if delta is None:
            if kind == "inert":
                delta = least_nonresidue(p)
            elif kind == "ramified":
                if pi_unit % p == 0:
                    raise FieldConfigError("pi_unit must be prime to p")
                delta = pi_unit * p
            else:
                delta = 1
        delta = as_fraction(delta)
        if kind == "inert":
            if valuation(delta, p) != 0 or legendre(unit_residue(delta, p), p) != -1:
                raise FieldConfigError("inert delta must be a non-residue unit")
        if kind == "ramified" and valuation(delta, p) != 1:
            raise FieldConfigError("ramified delta must have valuation 1")
        return cls(p, kind, delta)


def chi_quad(params: FieldParams, x: Union[Rational, "PadicElement"]) -> int:
    """The quadratic character of E/L at a non-zero element of L."""
    if isinstance(x, PadicElement):
        if x.is_zero:
            raise ZeroDivisionError("chi of zero")
        v, u = x.val, x.unit % params.p
    else:
        x = as_fraction(x)
        if x == 0:
            raise ZeroDivisionError("chi of zero")
        v, u = valuation(x, params.p), unit_residue(x, params.p)
    if params.kind == "split":
        return 1
    if params.kind == "inert":
        return -1 if v % 2 else 1
    sign = legendre(u, params.p)
    return sign * (params.chi_pi if v % 2 else 1)


def psi_angle(x: Union[Rational, "PadicElement"], p: int | None = None) -> Fraction:
    """Angle {x} with psi(x) = exp(2 pi i {x}); psi has conductor Z_p."""
    if isinstance(x, PadicElement):
        if x.is_zero or x.val >= 0:
            return Fraction(0)
        if x.val + x.prec < 0:
            raise PrecisionError("psi_angle needs all negative-valuation digits")
        return frac_part(x.to_rational(), x.p)
    if p is None:
        raise ValueError("p is required for rational input")
    return frac_part(x, p)


# ---------------------------------------------------------------------------
# Truncated p-adic numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PadicElement:
    """p^val * unit with the unit known modulo p^prec; or the exact zero."""

    p: int
    val: int
    unit: int
    prec: int
    is_zero: bool = False

    def __post_init__(self):
        if not self.is_zero:
            if self.prec < 1:
                raise PrecisionError("precision must be at least one digit")
            if self.unit % self.p == 0:
                raise ValueError("unit part must be invertible mod p")

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, p: int) -> "PadicElement":
        return cls(p, 0, 0, 0, True)

    @classmethod
    def from_rational(cls, x: Rational, p: int, prec: int) -> "PadicElement":
        x = as_fraction(x)
        if x == 0:
            return cls.zero(p)
        return cls(p, valuation(x, p), unit_residue(x, p, prec), prec)

    def to_rational(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    @property
    def abs_prec(self) -> float:
        """Absolute precision: the element is known modulo p^abs_prec."""
        return float("inf") if self.is_zero else self.val + self.prec

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "PadicElement":
        if isinstance(other, PadicElement):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        x = as_fraction(other)
        if x == 0:
            return PadicElement.zero(self.p)
        v = valuation(x, self.p)
        target = self.abs_prec if not self.is_zero else v + 1
        return PadicElement.from_rational(x, self.p, max(1, int(target) - v) + max(self.prec, 1))

    def __neg__(self) -> "PadicElement":
        if self.is_zero:
            return self
        mod = self.p ** self.prec
        return PadicElement(self.p, self.val, (-self.unit) % mod, self.prec)

    def __add__(self, other) -> "PadicElement":
        y = self._coerce(other)
        if self.is_zero:
            return y
        if y.is_zero:
            return self
        absolute = min(self.abs_prec, y.abs_prec)
        s = self.to_rational() + y.to_rational()
        if s == 0:
            return PadicElement.zero(self.p)
        v = valuation(s, self.p)
        if v >= absolute:
            raise PrecisionError("cancellation exhausted the known digits")
        return PadicElement.from_rational(s, self.p, int(absolute) - v)

    __radd__ = __add__

    def __sub__(self, other) -> "PadicElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PadicElement":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "PadicElement":
        y = self._coerce(other)
        if self.is_zero or y.is_zero:
            return PadicElement.zero(self.p)
        prec = min(self.prec, y.prec)
        mod = self.p ** prec
        return PadicElement(self.p, self.val + y.val, (self.unit * y.unit) % mod, prec)

    __rmul__ = __mul__

    def inverse(self) -> "PadicElement":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        mod = self.p ** self.prec
        return PadicElement(self.p, -self.val, pow(self.unit, -1, mod), self.prec)

    def __truediv__(self, other) -> "PadicElement":
        return self * self._coerce(other).inverse()

    def congruent(self, other, k: int) -> bool:
        """Whether self = other modulo p^k (requires enough precision)."""
        d = self - self._coerce(other)
        return d.is_zero or d.val >= k


def arith(op: str, x: PadicElement, y: PadicElement | None = None) -> PadicElement:
    """Dispatch helper: op in {add, mul, neg, inv}."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Quadratic extension
# ---------------------------------------------------------------------------


def _zero_like(x):
    return x * 0 if isinstance(x, PadicElement) else Fraction(0)


@dataclass(frozen=True)
class ExtElement:
    """a + b sqrt(delta) in a field E, or the pair (a, b) in L x L."""

    params: FieldParams
    a: object
    b: object

    @classmethod
    def of(cls, params: FieldParams, a: Rational = 0, b: Rational = 0) -> "ExtElement":
        return cls(params, as_fraction(a), as_fraction(b))

    @property
    def delta(self):
        return self.params.delta

    def conj(self) -> "ExtElement":
        if self.params.split:
            return ExtElement(self.params, self.b, self.a)
        return ExtElement(self.params, self.a, -self.b)

    def norm(self):
        if self.params.split:
            return self.a * self.b
        return self.a * self.a - self.delta * self.b * self.b

    def trace(self):
        if self.params.split:
            return self.a + self.b
        return 2 * self.a

    def _coerce(self, other) -> "ExtElement":
        if isinstance(other, ExtElement):
            return other
        o = as_fraction(other)
        if self.params.split:
            return ExtElement(self.params, o, o)
        return ExtElement(self.params, o, _zero_like(self.a) if isinstance(self.a, PadicElement) else Fraction(0))

    def __add__(self, other) -> "ExtElement":
        o = self._coerce(other)
        return ExtElement(self.params, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "ExtElement":
        return ExtElement(self.params, -self.a, -self.b)

    def __sub__(self, other) -> "ExtElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "ExtElement":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "ExtElement":
        o = self._coerce(other)
        if self.params.split:
            return ExtElement(self.params, self.a * o.a, self.b * o.b)
        return ExtElement(self.params,
                          self.a * o.a + self.delta * self.b * o.b,
                          self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "ExtElement":
        n = self.norm()
        if (isinstance(n, PadicElement) and n.is_zero) or (not isinstance(n, PadicElement) and n == 0):
            raise ZeroDivisionError("inverse of a zero divisor")
        c = self.conj()
        if isinstance(n, PadicElement):
            ninv = n.inverse()
        else:
            ninv = 1 / n
        return ExtElement(self.params, c.a * ninv, c.b * ninv)

    def __truediv__(self, other) -> "ExtElement":
        return self * self._coerce(other).inverse()

    def is_zero(self) -> bool:
        return _is_zero(self.a) and _is_zero(self.b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtElement):
            other = self._coerce(other)
        return self.params == other.params and self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return hash((self.params, self.a, self.b))

    def valuation(self) -> int:
        """Normalized valuation of E (not defined for split)."""
        p = self.params.p
        if self.params.split:
            raise ValueError("split algebra has no valuation")
        va = _val(self.a, p)
        vb = _val(self.b, p)
        if self.params.kind == "ramified":
            return int(min(2 * va, 2 * vb + 1))
        return int(min(va, vb))

    def __repr__(self) -> str:
        if self.params.split:
            return f"({self.a}, {self.b})"
        return f"({self.a} + {self.b}*sqrt({self.delta}))"


def _is_zero(x) -> bool:
    if isinstance(x, PadicElement):
        return x.is_zero
    return x == 0


def _val(x, p) -> float:
    if isinstance(x, PadicElement):
        return float("inf") if x.is_zero else x.val
    return val_or_inf(x, p)


def ext_norm(x: ExtElement):
    return x.norm()


def ext_trace(x: ExtElement):
    return x.trace()


def ext_conj(x: ExtElement) -> ExtElement:
    return x.conj()


def ext_valuation(x: ExtElement) -> int:
    return x.valuation()


def psi_e_angle(x: ExtElement) -> Fraction:
    """Angle of psi_E(x) = psi(trace x) for the exact model."""
    return frac_part(x.trace(), x.params.p)
