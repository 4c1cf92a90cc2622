from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudobosons.funcspace import Element
from pseudobosons.gaussint import (
    DivergentIntegralError,
    TSpaceVector,
    WeightSpec,
    gaussian_moment,
    inner_product_T,
    inner_product_pi,
    quad_oracle,
)
from pseudobosons.qho import PseudoBosonFamily
from pseudobosons.scalar import RadScalar

from strategies import polys, small_fractions

PI = RadScalar.pi_power(2)


def test_gaussian_moments():
    assert gaussian_moment((2, 0), 1) == PI * Fraction(1, 2)
    assert gaussian_moment((3, 2), 1).is_zero()
    b = Fraction(5, 3)
    assert gaussian_moment((0, 0), b) == PI / b
    # frozen from sympy
    assert gaussian_moment((2, 4), Fraction(1, 2)) == PI * 6
    assert gaussian_moment((2,), 3) == RadScalar.sqrt(3) * RadScalar.pi_power(1) * Fraction(1, 18)


def test_moments_need_positive_beta():
    with pytest.raises(DivergentIntegralError):
        gaussian_moment((0, 0), 0)
    with pytest.raises(ValueError):
        WeightSpec(Fraction(1, 2))


def test_vacuum_pairing(fam_half):
    one = RadScalar.from_rational(1)
    assert inner_product_pi(fam_half.phi00, fam_half.psi00, fam_half.weight) == one
    assert inner_product_pi(fam_half.psi(1, 0), fam_half.phi00, fam_half.weight).is_zero()


def test_psi_vacuum_norm_against_quadrature():
    # the Psi_00 norm is |N|^2 pi / beta; cross-check numerically
    for beta in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        fam = PseudoBosonFamily(1, beta)
        exact = inner_product_pi(fam.psi00, fam.psi00, fam.weight)
        assert exact == fam.norm * fam.norm * PI / beta
        assert float(exact) == pytest.approx(quad_oracle(fam.psi00, fam.psi00, fam.weight), rel=1e-12)


def test_divergent_pairs_are_reported():
    w = WeightSpec(0)
    with pytest.raises(DivergentIntegralError):
        inner_product_pi(Element.constant(2), Element.constant(2), w)
    frac = Element.prefactor(2, Fraction(3, 2), )
    with pytest.raises(DivergentIntegralError):
        inner_product_pi(frac, Element.gaussian(2, -1), w)
    pole = Element.prefactor(2, -1)
    with pytest.raises(DivergentIntegralError):
        inner_product_pi(pole, Element.gaussian(2, -1), w)


def test_t_space_products():
    one = RadScalar.from_rational(1)
    assert inner_product_T(TSpaceVector.basis(0, 0), TSpaceVector.basis(0, 0)) == one
    assert inner_product_T(TSpaceVector.basis(1, 1), TSpaceVector.basis(2, 0)).is_zero()
    u = TSpaceVector({(1, 0): 2, (0, 1): 3})
    assert inner_product_T(u, u) == 13


def test_quadrature_of_odd_integrand_vanishes():
    w = WeightSpec(Fraction(-1))
    assert abs(quad_oracle(Element.var(2, 0), Element.var(2, 1, 2), w)) < 1e-12


def test_quadrature_handles_fractional_prefactors():
    # |x1^2 - x2^2| exp(-|x|^2) integrates to 2 (polar coordinates); the kink slows convergence
    w = WeightSpec(Fraction(-1))
    f = Element.prefactor(2, Fraction(1, 2))
    assert quad_oracle(f, f, w, order=80) == pytest.approx(2.0, rel=2e-2)


def test_weighted_norm_dominates_shifted_norm():
    fam = PseudoBosonFamily(2, Fraction(1, 2))
    flat = WeightSpec(0)
    for idx in ((0, 0), (1, 2), (3, 1)):
        f = fam.phi(*idx)
        lhs = quad_oracle(f.shift_gaussian(fam.gamma_pi), f.shift_gaussian(fam.gamma_pi), flat)
        rhs = quad_oracle(f, f, fam.weight)
        assert lhs <= rhs


GAMMAS = st.sampled_from([Fraction(-1), Fraction(-1, 2), Fraction(-3, 4)])


@settings(max_examples=60)
@given(polys(), polys(), polys(), small_fractions, GAMMAS)
def test_bilinear_and_symmetric(p, q, r, c, gamma):
    w = WeightSpec(gamma)
    f, g, h = Element(p), Element(q), Element(r)
    ip = lambda a, b: inner_product_pi(a, b, w)  # noqa: E731
    assert ip(f, g) == ip(g, f)
    assert ip(f * c + h, g) == ip(f, g) * c + ip(h, g)


@settings(max_examples=60)
@given(polys(), GAMMAS)
def test_norm_positivity(p, gamma):
    w = WeightSpec(gamma)
    f = Element(p)
    v = inner_product_pi(f, f, w)
    if f.is_zero():
        assert v.is_zero()
    else:
        assert v.sign() == 1


@settings(max_examples=60)
@given(polys(), polys(), GAMMAS)
def test_exact_matches_quadrature(p, q, gamma):
    w = WeightSpec(gamma)
    f, g = Element(p), Element(q)
    exact = float(inner_product_pi(f, g, w))
    assert abs(exact - quad_oracle(f, g, w)) <= 1e-10 * max(1.0, abs(exact))
