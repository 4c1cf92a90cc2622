"""Exact scalars: rationals extended by square roots and half-integer powers of pi.

A :class:`RadScalar` is a finite sum ``sum c * sqrt(r) * pi**(k/2)`` with
``c`` rational, ``r`` a square-free positive integer and ``k`` an integer.
Square roots of distinct square-free integers are linearly independent over
the rationals and pi is treated as a transcendental symbol, so two scalars
are equal exactly when their canonical term maps are equal.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

import mpmath

__all__ = [
    "RadScalar",
    "ScalarError",
    "InverseOfSumError",
    "as_fraction",
    "parse_rational",
    "squarefree_split",
]


class ScalarError(ArithmeticError):
    """Base class for scalar arithmetic failures."""


class InverseOfSumError(ScalarError):
    """Raised when inverting a scalar with more than one term."""


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"``, ``"p/q"`` or ``"-p/q"``. Floats are refused."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    if any(ch in s for ch in ".eE"):
        raise ValueError(f"rational expected, got {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}") from exc


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``n == s*s*r`` and ``r`` square-free."""
    if n <= 0:
        raise ValueError("squarefree_split needs a positive integer")
    s, r = 1, 1
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                r *= p
        p += 1 if p == 2 else 2
    r *= m
    return s, r


_Key = tuple[int, int]  # (square-free radicand, power of sqrt(pi))


class RadScalar:
    """Exact element of Q(sqrt 2, sqrt 3, ...)[pi**(1/2), pi**(-1/2)]."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: dict[_Key, Fraction] | None = None):
        # trusted constructor: callers pass already-reduced keys without zeros
        self._terms = terms if terms is not None else {}
        self._hash = None

    # -- construction -------------------------------------------------------
    @classmethod
    def from_rational(cls, value) -> RadScalar:
        q = as_fraction(value)
        return cls({(1, 0): q}) if q else cls()

    @classmethod
    def sqrt(cls, value) -> RadScalar:
        """Exact square root of a non-negative rational; perfect squares collapse."""
        q = as_fraction(value)
        if q < 0:
            raise ScalarError("square root of a negative rational")
        if q == 0:
            return cls()
        # sqrt(p/q) = sqrt(p*q)/q
        s, r = squarefree_split(q.numerator * q.denominator)
        return cls({(r, 0): Fraction(s, q.denominator)})

    @classmethod
    def pi_power(cls, half_exponent: int, coeff=1) -> RadScalar:
        """``coeff * pi**(half_exponent/2)``."""
        c = as_fraction(coeff)
        return cls({(1, int(half_exponent)): c}) if c else cls()

    @classmethod
    def coerce(cls, value) -> RadScalar:
        if isinstance(value, RadScalar):
            return value
        return cls.from_rational(value)

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[_Key, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (1, 0) in self._terms)

    def to_fraction(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if not self.is_rational():
            raise ScalarError(f"{self} is not rational")
        return self._terms[(1, 0)]

    def is_single_term(self) -> bool:
        return len(self._terms) == 1

    def sign(self) -> int:
        """Sign of the real number this scalar denotes."""
        if not self._terms:
            return 0
        if len(self._terms) == 1:
            (c,) = self._terms.values()
            return 1 if c > 0 else -1
        # sums of radicals: exact value is non-zero, 60 digits resolve the sign
        with mpmath.workdps(60):
            v = self.to_mpf()
        return 1 if v > 0 else -1

    def to_mpf(self):
        total = mpmath.mpf(0)
        for (r, k), c in self._terms.items():
            total += mpmath.mpf(c.numerator) / c.denominator * mpmath.sqrt(r) * mpmath.pi ** (mpmath.mpf(k) / 2)
        return total

    def __float__(self) -> float:
        total = 0.0
        for (r, k), c in self._terms.items():
            total += float(c) * math.sqrt(r) * math.pi ** (k / 2)
        return total

    # -- arithmetic ---------------------------------------------------------
    def __neg__(self) -> RadScalar:
        return RadScalar({k: -c for k, c in self._terms.items()})

    def __add__(self, other) -> RadScalar:
        if not isinstance(other, RadScalar):
            try:
                other = RadScalar.from_rational(other)
            except TypeError:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v += c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return RadScalar(out)

    __radd__ = __add__

    def __sub__(self, other) -> RadScalar:
        if not isinstance(other, RadScalar):
            try:
                other = RadScalar.from_rational(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> RadScalar:
        return RadScalar.coerce(other) - self

    def scale(self, q: Fraction) -> RadScalar:
        """Multiply by a rational; cheaper than a general product."""
        if not q:
            return RadScalar()
        if q == 1:
            return self
        return RadScalar({k: c * q for k, c in self._terms.items()})

    def __mul__(self, other) -> RadScalar:
        if not isinstance(other, RadScalar):
            if isinstance(other, (int, Fraction)):
                return self.scale(Fraction(other))
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return RadScalar()
        if len(b) == 1 and (1, 0) in b:
            return self.scale(b[(1, 0)])
        if len(a) == 1 and (1, 0) in a:
            return other.scale(a[(1, 0)])
        out: dict[_Key, Fraction] = {}
        for (r1, k1), c1 in a.items():
            for (r2, k2), c2 in b.items():
                if r1 == 1:
                    r, c = r2, c1 * c2
                elif r2 == 1:
                    r, c = r1, c1 * c2
                else:
                    g = math.gcd(r1, r2)
                    r = (r1 // g) * (r2 // g)
                    c = c1 * c2 * g
                key = (r, k1 + k2)
                v = out.get(key)
                out[key] = c if v is None else v + c
        return RadScalar({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def inverse(self) -> RadScalar:
        if not self._terms:
            raise ZeroDivisionError("inverse of zero scalar")
        if len(self._terms) != 1:
            raise InverseOfSumError(f"cannot invert multi-term scalar {self}")
        ((r, k), c), = self._terms.items()
        # 1/(c sqrt(r) pi^(k/2)) = sqrt(r)/(c r) * pi^(-k/2)
        return RadScalar({(r, -k): 1 / (c * r)})

    def __truediv__(self, other) -> RadScalar:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of scalar by zero")
            return self.scale(1 / Fraction(other))
        if not isinstance(other, RadScalar):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> RadScalar:
        return RadScalar.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> RadScalar:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = RadScalar.from_rational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, RadScalar):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == RadScalar.from_rational(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- rendering ----------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (r, k), c in sorted(self._terms.items()):
            factors = []
            if r != 1:
                factors.append(f"sqrt({r})")
            if k == 2:
                factors.append("pi")
            elif k and k % 2 == 0:
                factors.append(f"pi^{k // 2}")
            elif k:
                factors.append(f"pi^({k}/2)")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append("*".join([str(c)] + factors))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"RadScalar({self})"


ZERO = RadScalar()
ONE = RadScalar.from_rational(1)
