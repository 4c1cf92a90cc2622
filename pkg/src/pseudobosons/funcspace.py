"""The closed function class ``P(x) * D(x)**mu * exp(gamma * |x|**2)``.

Here ``D = prod_{i<j} (x_i**2 - x_j**2)`` is the pair prefactor. The prefactor
is always read on the chamber where ``D > 0``, so a non-integer ``mu`` stands
for ``|D|**mu``. Integer powers are ordinary rational functions.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .scalar import ONE, RadScalar, as_fraction

__all__ = [
    "PolyN",
    "Element",
    "GradedSeries",
    "IncompatibleExponentError",
    "DivisionError",
    "prefactor_poly",
    "symmetrize_d2",
    "homogeneous_components",
    "DEFAULT_CUTOFF",
]

DEFAULT_CUTOFF = -12

Exp = tuple[int, ...]


class IncompatibleExponentError(ValueError):
    """Adding elements whose Gaussian or prefactor exponents cannot be aligned."""


class DivisionError(ArithmeticError):
    """An exact division that was expected to succeed left a remainder."""


def _grlex_key(e: Exp):
    return (sum(e), e)


class PolyN:
    """Sparse polynomial in ``N`` variables with :class:`RadScalar` coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Exp, RadScalar] | None = None):
        if n < 1:
            raise ValueError("a polynomial needs at least one variable")
        self.n = n
        if terms is None:
            self.terms: dict[Exp, RadScalar] = {}
        else:
            self.terms = {e: c for e, c in terms.items() if c}

    @classmethod
    def constant(cls, n: int, c=1) -> PolyN:
        return cls(n, {(0,) * n: RadScalar.coerce(c)})

    @classmethod
    def var(cls, n: int, i: int, power: int = 1) -> PolyN:
        e = [0] * n
        e[i] = power
        return cls(n, {tuple(e): ONE})

    @classmethod
    def monomial(cls, exps: Iterable[int], c=1) -> PolyN:
        e = tuple(int(k) for k in exps)
        return cls(len(e), {e: RadScalar.coerce(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def copy(self) -> PolyN:
        return PolyN(self.n, self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyN) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __neg__(self) -> PolyN:
        return PolyN(self.n, {e: -c for e, c in self.terms.items()})

    def __add__(self, other: PolyN) -> PolyN:
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            out[e] = c if v is None else v + c
        return PolyN(self.n, out)

    def __sub__(self, other: PolyN) -> PolyN:
        return self + (-other)

    def __mul__(self, other) -> PolyN:
        if isinstance(other, PolyN):
            out: dict[Exp, RadScalar] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    v = out.get(e)
                    p = c1 * c2
                    out[e] = p if v is None else v + p
            return PolyN(self.n, out)
        s = RadScalar.coerce(other)
        return PolyN(self.n, {e: c * s for e, c in self.terms.items()})

    __rmul__ = __mul__

    def scale(self, q: Fraction) -> PolyN:
        return PolyN(self.n, {e: c.scale(q) for e, c in self.terms.items()})

    def __pow__(self, k: int) -> PolyN:
        out = PolyN.constant(self.n)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, i: int) -> PolyN:
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                out[e2] = c.scale(Fraction(k))
        return PolyN(self.n, out)

    def mul_var(self, i: int, power: int = 1) -> PolyN:
        return PolyN(self.n, {e[:i] + (e[i] + power,) + e[i + 1:]: c for e, c in self.terms.items()})

    def permute(self, perm: tuple[int, ...], signs: tuple[int, ...] | None = None) -> PolyN:
        """Substitute ``x_i -> signs[i] * x_{perm[i]}``."""
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * self.n
            sgn = 1
            for i, k in enumerate(e):
                e2[perm[i]] += k
                if signs is not None and signs[i] < 0 and k % 2:
                    sgn = -sgn
            key = tuple(e2)
            cc = c if sgn > 0 else -c
            v = out.get(key)
            out[key] = cc if v is None else v + cc
        return PolyN(self.n, out)

    def homogeneous_parts(self) -> dict[int, PolyN]:
        parts: dict[int, dict[Exp, RadScalar]] = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: PolyN(self.n, t) for d, t in parts.items()}

    def vanishes_on(self, i: int, j: int, sign: int) -> bool:
        """True iff the polynomial is zero on the hyperplane ``x_i = sign * x_j``."""
        acc: dict[Exp, RadScalar] = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[j] += e2[i]
            e2[i] = 0
            cc = -c if (sign < 0 and e[i] % 2) else c
            key = tuple(e2)
            v = acc.get(key)
            acc[key] = cc if v is None else v + cc
        return all(not v for v in acc.values())

    def divides_by_prefactor(self) -> bool:
        n = self.n
        if n == 1 or not self.terms:
            return n > 1
        return all(
            self.vanishes_on(i, j, s) for i in range(n) for j in range(i + 1, n) for s in (1, -1)
        )

    def exact_div(self, divisor: PolyN) -> PolyN:
        """Exact quotient by the grlex division algorithm; raises on remainder."""
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lt_e = max(divisor.terms, key=_grlex_key)
        lt_c = divisor.terms[lt_e]
        lt_inv = lt_c.inverse()
        rem = dict(self.terms)
        quot: dict[Exp, RadScalar] = {}
        while rem:
            e = max(rem, key=_grlex_key)
            if any(a < b for a, b in zip(e, lt_e)):
                raise DivisionError("polynomial is not divisible")
            qe = tuple(a - b for a, b in zip(e, lt_e))
            qc = rem[e] * lt_inv
            quot[qe] = qc
            for de, dc in divisor.terms.items():
                key = tuple(a + b for a, b in zip(qe, de))
                v = rem.get(key)
                p = qc * dc
                nv = -p if v is None else v - p
                if nv:
                    rem[key] = nv
                else:
                    rem.pop(key, None)
        return PolyN(self.n, quot)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at float points of shape ``(..., n)``."""
        pts = np.asarray(points, dtype=float)
        out = np.zeros(pts.shape[:-1])
        for e, c in self.terms.items():
            term = np.full(pts.shape[:-1], float(c))
            for i, k in enumerate(e):
                if k:
                    term = term * pts[..., i] ** k
            out = out + term
        return out

    def sorted_terms(self) -> list[tuple[Exp, RadScalar]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            cs = str(c)
            if len(c.terms) > 1:
                cs = f"({cs})"
            if not mono:
                pieces.append(cs)
            elif cs == "1":
                pieces.append(mono)
            elif cs == "-1":
                pieces.append("-" + mono)
            else:
                pieces.append(f"{cs}*{mono}")
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"PolyN({self.n}, {self})"


@lru_cache(maxsize=None)
def prefactor_poly(n: int) -> PolyN:
    """``D = prod_{i<j} (x_i**2 - x_j**2)`` as a polynomial."""
    out = PolyN.constant(n)
    for i in range(n):
        for j in range(i + 1, n):
            out = out * (PolyN.var(n, i, 2) - PolyN.var(n, j, 2))
    return out


@lru_cache(maxsize=None)
def _prefactor_grad(n: int, i: int) -> PolyN:
    return prefactor_poly(n).diff(i)


def _is_int(q: Fraction) -> bool:
    return q.denominator == 1


class Element:
    """Immutable ``poly * D**mu * exp(gamma * sum x_i**2)`` in canonical form.

    Canonical form: for integer ``mu`` positive powers are multiplied into
    ``poly`` and negative powers are cancelled against ``poly`` while it is
    divisible by ``D``; for non-integer ``mu`` every factor of ``D`` is pulled
    out of ``poly``. Zero is ``(0, mu=0, gamma=0)``.
    """

    __slots__ = ("n", "poly", "mu", "gamma", "_hash")

    def __init__(self, poly: PolyN, mu=0, gamma=0, *, _canonical: bool = False):
        self.n = poly.n
        mu = as_fraction(mu)
        gamma = as_fraction(gamma)
        self._hash = None
        if _canonical:
            self.poly, self.mu, self.gamma = poly, mu, gamma
            return
        self.poly, self.mu, self.gamma = _canonicalize(poly, mu, gamma)

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> Element:
        return cls(PolyN(n), _canonical=True)

    @classmethod
    def constant(cls, n: int, c=1) -> Element:
        return cls(PolyN.constant(n, c))

    @classmethod
    def var(cls, n: int, i: int, power: int = 1) -> Element:
        return cls(PolyN.var(n, i, power))

    @classmethod
    def monomial(cls, exps: Iterable[int], c=1) -> Element:
        return cls(PolyN.monomial(exps, c))

    @classmethod
    def gaussian(cls, n: int, gamma, c=1) -> Element:
        return cls(PolyN.constant(n, c), 0, gamma)

    @classmethod
    def prefactor(cls, n: int, mu=1) -> Element:
        return cls(PolyN.constant(n), mu)

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __bool__(self) -> bool:
        return not self.poly.is_zero()

    def is_polynomial(self) -> bool:
        return self.mu == 0 and self.gamma == 0

    def homogeneous_degree(self) -> Fraction | None:
        """Total scaling degree, or None when not homogeneous or zero."""
        degs = {sum(e) for e in self.poly.terms}
        if len(degs) != 1:
            return None
        (d,) = degs
        return Fraction(d) + self.n * (self.n - 1) * self.mu

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return (
            self.n == other.n
            and self.mu == other.mu
            and self.gamma == other.gamma
            and self.poly == other.poly
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.poly, self.mu, self.gamma))
        return self._hash

    # -- arithmetic ---------------------------------------------------------
    def __neg__(self) -> Element:
        return Element(-self.poly, self.mu, self.gamma, _canonical=True)

    def __add__(self, other: Element) -> Element:
        if not isinstance(other, Element):
            if isinstance(other, (int, Fraction, RadScalar)):
                other = Element.constant(self.n, other)
            else:
                return NotImplemented
        if other.n != self.n:
            raise IncompatibleExponentError("elements live in different dimensions")
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.gamma != other.gamma:
            raise IncompatibleExponentError(
                f"cannot add Gaussian exponents {self.gamma} and {other.gamma}"
            )
        diff = self.mu - other.mu
        if not _is_int(diff):
            raise IncompatibleExponentError(
                f"prefactor exponents {self.mu} and {other.mu} differ by a non-integer"
            )
        if self.n == 1:
            return Element(self.poly + other.poly, 0, self.gamma)
        d = prefactor_poly(self.n)
        if diff >= 0:
            p = self.poly * d ** int(diff) + other.poly
            mu = other.mu
        else:
            p = self.poly + other.poly * d ** int(-diff)
            mu = self.mu
        return Element(p, mu, self.gamma)

    __radd__ = __add__

    def __sub__(self, other: Element) -> Element:
        if isinstance(other, (int, Fraction, RadScalar)):
            other = Element.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other) -> Element:
        return (-self) + other

    def __mul__(self, other) -> Element:
        if isinstance(other, Element):
            if other.n != self.n:
                raise IncompatibleExponentError("elements live in different dimensions")
            if self.is_zero() or other.is_zero():
                return Element.zero(self.n)
            return Element(self.poly * other.poly, self.mu + other.mu, self.gamma + other.gamma)
        if isinstance(other, (int, Fraction)):
            if not other:
                return Element.zero(self.n)
            return Element(self.poly.scale(Fraction(other)), self.mu, self.gamma, _canonical=True)
        if isinstance(other, RadScalar):
            if not other:
                return Element.zero(self.n)
            return Element(self.poly * other, self.mu, self.gamma, _canonical=True)
        if isinstance(other, PolyN):
            return self * Element(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other) -> Element:
        """Exact division by a scalar or by an element whose polynomial part is one term."""
        if isinstance(other, (int, Fraction, RadScalar)):
            return self * (ONE / RadScalar.coerce(other))
        if not isinstance(other, Element):
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero element")
        if len(other.poly.terms) != 1:
            raise DivisionError(f"cannot divide by the multi-term element {other}")
        ((e, c),) = other.poly.terms.items()
        if self.is_zero():
            return self
        out = {}
        inv = c.inverse()
        for e1, c1 in self.poly.terms.items():
            q = tuple(a - b for a, b in zip(e1, e))
            if min(q) < 0:
                raise DivisionError(f"{self} is not divisible by {other}")
            out[q] = c1 * inv
        return Element(PolyN(self.n, out), self.mu - other.mu, self.gamma - other.gamma)

    def diff(self, i: int) -> Element:
        """Exact partial derivative with respect to ``x_{i+1}`` (0-based ``i``)."""
        if not 0 <= i < self.n:
            raise IndexError(f"variable index {i} out of range for N={self.n}")
        if self.is_zero():
            return self
        p = self.poly
        new = p.diff(i)
        if self.gamma:
            new = new + p.mul_var(i).scale(2 * self.gamma)
        if self.mu and self.n > 1:
            d = prefactor_poly(self.n)
            new = new * d + (p * _prefactor_grad(self.n, i)).scale(self.mu)
            return Element(new, self.mu - 1, self.gamma)
        return Element(new, self.mu, self.gamma)

    def shift_gaussian(self, dgamma) -> Element:
        if self.is_zero():
            return self
        return Element(self.poly, self.mu, self.gamma + as_fraction(dgamma), _canonical=True)

    def transform(self, perm: tuple[int, ...], signs: tuple[int, ...]) -> Element:
        """Pull back under ``x_i -> signs[i] * x_{perm[i]}``.

        Integer powers of ``D`` pick up the sign the substitution induces on
        ``D``; non-integer powers denote ``|D|**mu`` and are left unchanged.
        """
        p = self.poly.permute(perm, signs)
        if self.mu and _is_int(self.mu) and self.n > 1:
            d = prefactor_poly(self.n)
            dsign = 1 if d.permute(perm, signs) == d else -1
            if dsign < 0 and int(self.mu) % 2:
                p = -p
        return Element(p, self.mu, self.gamma)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Float values at points of shape ``(..., n)``; ``|D|`` for fractional ``mu``."""
        pts = np.asarray(points, dtype=float)
        val = self.poly.evaluate(pts)
        if self.mu and self.n > 1:
            dval = prefactor_poly(self.n).evaluate(pts)
            if _is_int(self.mu):
                val = val * dval ** int(self.mu)
            else:
                val = val * np.abs(dval) ** float(self.mu)
        if self.gamma:
            val = val * np.exp(float(self.gamma) * np.sum(pts**2, axis=-1))
        return val

    # -- rendering ----------------------------------------------------------
    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        if not self.mu and not self.gamma:
            return str(self.poly)
        ptext = str(self.poly)
        factors = [] if ptext == "1" else [f"({ptext})"]
        if self.mu and self.n > 1:
            factors.append(f"{_prefactor_text(self.n)}^{_frac_text(self.mu)}")
        if self.gamma:
            sq = "+".join(f"x{i + 1}^2" for i in range(self.n))
            factors.append(f"exp({_frac_text(self.gamma)}*({sq}))")
        return "*".join(factors)

    def __repr__(self) -> str:
        return f"Element({self})"


def _frac_text(q: Fraction) -> str:
    return str(q) if q.denominator == 1 else f"({q})"


def _prefactor_text(n: int) -> str:
    pairs = [f"(x{i + 1}^2-x{j + 1}^2)" for i in range(n) for j in range(i + 1, n)]
    return pairs[0] if len(pairs) == 1 else "(" + "*".join(pairs) + ")"


def _canonicalize(poly: PolyN, mu: Fraction, gamma: Fraction):
    if poly.is_zero():
        return PolyN(poly.n), Fraction(0), Fraction(0)
    n = poly.n
    if n == 1 or mu == 0:
        if n == 1:
            mu = Fraction(0)
        return poly, mu, gamma
    d = prefactor_poly(n)
    if _is_int(mu):
        if mu > 0:
            return poly * d ** int(mu), Fraction(0), gamma
        while mu < 0 and poly.divides_by_prefactor():
            poly = poly.exact_div(d)
            mu += 1
        return poly, mu, gamma
    while poly.divides_by_prefactor():
        poly = poly.exact_div(d)
        mu += 1
    return poly, mu, gamma


# ---------------------------------------------------------------------------
# group averaging and grading
# ---------------------------------------------------------------------------

_D2_GROUP = (
    ((0, 1), (1, 1)),
    ((1, 0), (1, 1)),
    ((0, 1), (-1, -1)),
    ((1, 0), (-1, -1)),
)


def symmetrize_d2(f: Element) -> Element:
    """Average over the group generated by ``x1 <-> x2`` and ``x -> -x``."""
    if f.n != 2:
        raise ValueError("symmetrize_d2 needs N = 2")
    total = Element.zero(2)
    for perm, signs in _D2_GROUP:
        total = total + f.transform(perm, signs)
    return total * Fraction(1, 4)


class GradedSeries:
    """Map from homogeneity degree to a homogeneous :class:`Element`.

    Components below ``cutoff`` are never stored. ``truncated`` records
    whether anything was actually dropped, and ``dropped`` holds the
    degrees that were discarded.
    """

    def __init__(
        self,
        n: int,
        components: Mapping[Fraction, Element] | None = None,
        cutoff=DEFAULT_CUTOFF,
        truncated: bool = False,
        dropped: Iterable[Fraction] = (),
    ):
        self.n = n
        self.cutoff = as_fraction(cutoff)
        self.dropped: set[Fraction] = set(dropped)
        self.components: dict[Fraction, Element] = {}
        for d, el in (components or {}).items():
            self._put(as_fraction(d), el)
        self.truncated = truncated or bool(self.dropped)

    def _put(self, d: Fraction, el: Element) -> None:
        if el.is_zero():
            return
        if d < self.cutoff:
            self.dropped.add(d)
            self.truncated = True
            return
        cur = self.components.get(d)
        new = el if cur is None else cur + el
        if new.is_zero():
            self.components.pop(d, None)
        else:
            self.components[d] = new

    def add_element(self, el: Element) -> None:
        for d, part in homogeneous_components(el).components.items():
            self._put(d, part)

    @classmethod
    def from_element(cls, f: Element, cutoff=DEFAULT_CUTOFF) -> GradedSeries:
        out = cls(f.n, cutoff=cutoff)
        out.add_element(f)
        return out

    def degrees(self) -> list[Fraction]:
        return sorted(self.components, reverse=True)

    def __getitem__(self, d) -> Element:
        return self.components.get(as_fraction(d), Element.zero(self.n))

    def __len__(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return not self.components

    def total(self) -> Element:
        out = Element.zero(self.n)
        for d in self.degrees():
            out = out + self.components[d]
        return out

    def map(self, fn) -> GradedSeries:
        """Apply a linear map to every component and regrade the results."""
        out = GradedSeries(self.n, cutoff=self.cutoff, truncated=self.truncated, dropped=self.dropped)
        for d in self.degrees():
            out.add_element(fn(self.components[d]))
        return out

    def _combine(self, other: GradedSeries, sign: int) -> GradedSeries:
        out = GradedSeries(
            self.n,
            self.components,
            cutoff=max(self.cutoff, other.cutoff),
            truncated=self.truncated or other.truncated,
            dropped=self.dropped | other.dropped,
        )
        for d, el in other.components.items():
            out._put(d, el if sign > 0 else -el)
        return out

    def __add__(self, other: GradedSeries) -> GradedSeries:
        return self._combine(other, 1)

    def __sub__(self, other: GradedSeries) -> GradedSeries:
        return self._combine(other, -1)

    def __mul__(self, s) -> GradedSeries:
        return self.map(lambda el: el * s)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.components == other.components

    def restricted(self, min_degree) -> GradedSeries:
        m = as_fraction(min_degree)
        return GradedSeries(
            self.n,
            {d: el for d, el in self.components.items() if d >= m},
            cutoff=max(m, self.cutoff),
            truncated=self.truncated,
            dropped=self.dropped | {d for d in self.components if d < m},
        )

    def __str__(self) -> str:
        if not self.components:
            return "0"
        body = " + ".join(f"[{d}] {self.components[d]}" for d in self.degrees())
        if self.truncated:
            body += f"  (truncated below {self.cutoff})"
        return body

    def __repr__(self) -> str:
        return f"GradedSeries({self})"


def homogeneous_components(f: Element, cutoff=None) -> GradedSeries:
    """Split ``f`` by total scaling degree (prefactor counted, Gaussian ignored)."""
    c = DEFAULT_CUTOFF if cutoff is None else cutoff
    comps: dict[Fraction, Element] = {}
    if not f.is_zero():
        shift = f.n * (f.n - 1) * f.mu
        for d, part in f.poly.homogeneous_parts().items():
            comps[Fraction(d) + shift] = Element(part, f.mu, f.gamma)
    low = [d for d in comps if d < c]
    if low and cutoff is None:
        # default cutoff only applies to series we build; plain splitting keeps everything
        c = min(comps)
    return GradedSeries(f.n, comps, cutoff=c)
