"""Exact Gaussian-weighted inner products and a Gauss-Hermite cross-check."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from collections.abc import Mapping, Sequence

import numpy as np

from .funcspace import Element, PolyN
from .scalar import RadScalar, as_fraction

__all__ = [
    "WeightSpec",
    "TSpaceVector",
    "DivergentIntegralError",
    "gaussian_moment",
    "inner_product_pi",
    "inner_product_T",
    "quad_oracle",
    "DEFAULT_QUAD_ORDER",
]

DEFAULT_QUAD_ORDER = 40


class DivergentIntegralError(ValueError):
    """The requested integral does not converge (or has a non-integrable prefactor)."""


@dataclass(frozen=True)
class WeightSpec:
    """Weight ``exp(gamma_pi * |x|**2)`` on R^n with ``gamma_pi <= 0``."""

    gamma_pi: Fraction
    n: int = 2

    def __post_init__(self):
        object.__setattr__(self, "gamma_pi", as_fraction(self.gamma_pi))
        if self.gamma_pi > 0:
            raise ValueError("weight exponent must be non-positive")
        if self.n < 1:
            raise ValueError("need at least one variable")


@dataclass
class TSpaceVector:
    """Vector of the T-space, stored by its coordinates on the oscillator basis."""

    phi_coords: dict[tuple[int, ...], RadScalar] = field(default_factory=dict)

    def __post_init__(self):
        self.phi_coords = {
            tuple(k): RadScalar.coerce(v) for k, v in self.phi_coords.items() if RadScalar.coerce(v)
        }

    @classmethod
    def basis(cls, *index: int) -> TSpaceVector:
        return cls({tuple(index): RadScalar.from_rational(1)})

    def __add__(self, other: TSpaceVector) -> TSpaceVector:
        out = dict(self.phi_coords)
        for k, v in other.phi_coords.items():
            out[k] = out[k] + v if k in out else v
        return TSpaceVector(out)

    def __mul__(self, s) -> TSpaceVector:
        s = RadScalar.coerce(s)
        return TSpaceVector({k: v * s for k, v in self.phi_coords.items()})

    __rmul__ = __mul__


@lru_cache(maxsize=None)
def _double_factorial_odd(m: int) -> int:
    """(2m-1)!! with (-1)!! = 1."""
    out = 1
    for k in range(1, 2 * m, 2):
        out *= k
    return out


def _radial_factor(n: int, beta: Fraction) -> RadScalar:
    """``(pi / beta) ** (n/2)``."""
    inv = 1 / beta
    out = RadScalar.pi_power(n, inv ** (n // 2))
    if n % 2:
        out = out * RadScalar.sqrt(inv)
    return out


def _moment_ratio(exps: Sequence[int], beta: Fraction) -> Fraction:
    out = Fraction(1)
    for k in exps:
        if k % 2:
            return Fraction(0)
        m = k // 2
        if m:
            out *= Fraction(_double_factorial_odd(m), (2 * beta) ** m)
    return out


def gaussian_moment(exponents: Sequence[int], beta) -> RadScalar:
    """``prod_i int x_i**k_i exp(-beta x_i**2) dx_i`` exactly."""
    b = as_fraction(beta)
    if b <= 0:
        raise DivergentIntegralError("Gaussian moment needs beta > 0")
    if any(k < 0 for k in exponents):
        raise ValueError("exponents must be non-negative")
    r = _moment_ratio(exponents, b)
    if not r:
        return RadScalar()
    return _radial_factor(len(exponents), b).scale(r)


def _integrand_poly(f: Element, g: Element, w: WeightSpec) -> tuple[PolyN, PolyN | None, Fraction]:
    if f.n != g.n or f.n != w.n:
        raise ValueError("dimension mismatch in inner product")
    total = f.gamma + g.gamma + w.gamma_pi
    if total >= 0:
        raise DivergentIntegralError(f"total Gaussian exponent {total} is not negative")
    beta = -total
    if f.mu == 0 and g.mu == 0:
        return f.poly, g.poly, beta
    prod = f * g
    if prod.mu.denominator != 1:
        raise DivergentIntegralError(f"non-integer prefactor power {prod.mu}; use quad_oracle")
    if prod.mu < 0:
        raise DivergentIntegralError(f"integrand keeps a pole of order {-prod.mu}")
    return prod.poly, None, beta


def inner_product_pi(f: Element, g: Element, w: WeightSpec) -> RadScalar:
    """Exact ``int f g exp(gamma_pi |x|^2) dx`` (real function class, no conjugation)."""
    if f.is_zero() or g.is_zero():
        return RadScalar()
    p, q, beta = _integrand_poly(f, g, w)
    total = RadScalar()
    if q is None:
        for e, c in p.terms.items():
            r = _moment_ratio(e, beta)
            if r:
                total = total + c.scale(r)
    else:
        for e1, c1 in p.terms.items():
            inner = RadScalar()
            for e2, c2 in q.terms.items():
                r = _moment_ratio([a + b for a, b in zip(e1, e2)], beta)
                if r:
                    inner = inner + c2.scale(r)
            if inner:
                total = total + c1 * inner
    if not total:
        return total
    return total * _radial_factor(w.n, beta)


def inner_product_T(u: TSpaceVector, v: TSpaceVector) -> RadScalar:
    """Pulled-back product: the coordinates are orthonormal, so it is a dot product."""
    out = RadScalar()
    for k, a in u.phi_coords.items():
        b = v.phi_coords.get(k)
        if b is not None:
            out = out + a * b
    return out


@lru_cache(maxsize=16)
def _hermgauss(order: int):
    return np.polynomial.hermite.hermgauss(order)


def quad_oracle(f: Element, g: Element, w: WeightSpec, order: int = DEFAULT_QUAD_ORDER) -> float:
    """Tensor Gauss-Hermite estimate of the same integral as :func:`inner_product_pi`.

    The total Gaussian exponent is absorbed into the quadrature weight; the
    remaining factor (polynomial times ``|D|**mu``) is evaluated pointwise.
    Fractional prefactor powers are allowed here.
    """
    if order < 10:
        raise ValueError("quadrature order must be at least 10")
    if f.n != g.n or f.n != w.n:
        raise ValueError("dimension mismatch in quad_oracle")
    total = f.gamma + g.gamma + w.gamma_pi
    if total >= 0:
        raise DivergentIntegralError(f"total Gaussian exponent {total} is not negative")
    beta = float(-total)
    nodes, weights = _hermgauss(order)
    scale = 1.0 / np.sqrt(beta)
    n = f.n
    grids = np.meshgrid(*([nodes * scale] * n), indexing="ij")
    pts = np.stack(grids, axis=-1)
    wgrid = np.ones([order] * n)
    for axis in range(n):
        shape = [1] * n
        shape[axis] = order
        wgrid = wgrid * weights.reshape(shape)
    ff = Element(f.poly, f.mu, 0)
    gg = Element(g.poly, g.mu, 0)
    if ff.mu.denominator == 1 and gg.mu.denominator == 1:
        vals = (ff * gg).evaluate(pts)
    else:
        vals = ff.evaluate(pts) * gg.evaluate(pts)
    return float(np.sum(wgrid * vals) * scale**n)
