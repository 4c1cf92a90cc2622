from fractions import Fraction

import pytest
from hypothesis import given, settings

from pseudobosons.calogero import (
    _apply_matrix,
    ab_operator_suite,
    adjoint_identity_check,
    build_model,
    calogero_report,
    commutator_suite,
    gauge_check,
    gauge_operator,
    gauge_test_set,
    invariant_eigenstate,
    invariant_polynomial,
    similarity_chain,
    t_hamiltonian_matrix,
    t_orthonormality,
    truncated_eigenstate,
)
from pseudobosons.funcspace import Element, GradedSeries, symmetrize_d2
from pseudobosons.gaussint import TSpaceVector, inner_product_T
from pseudobosons.opalg import DiffOp, apply, commutator, formal_dagger
from pseudobosons.scalar import RadScalar

from strategies import elements

NU = Fraction(3, 2)
S = invariant_polynomial(1, 0)
P = invariant_polynomial(0, 1)


def test_ground_energy():
    assert build_model(2, 1, NU).E0 == 4
    assert build_model(3, 1, 1).E0 == Fraction(15, 2)


def test_parameter_guards():
    with pytest.raises(ValueError):
        build_model(2, 1, Fraction(1, 2))
    with pytest.raises(ValueError):
        build_model(4, 1, NU)
    with pytest.raises(ValueError):
        build_model(2, 0, NU)
    assert build_model(2, 1, 0, allow_any_nu=True).nu == 0


def test_commutator_examples(model_2):
    m = model_2
    assert (commutator(m.O_E, m.X2) - m.X2 * 2).is_zero()
    p = Element.monomial((1, 1))
    assert apply(commutator(m.LAP, m.X2), p) == p * 12
    assert apply(commutator(m.O_L, m.O_E), Element.constant(2)).is_zero()


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("omega,nu", [(1, NU), (2, Fraction(5, 2)), (1, 1)])
def test_commutator_suite(n, omega, nu):
    m = build_model(n, omega, nu, verify=False)
    assert all(c.passed for c in commutator_suite(m, 8 if n == 2 else 6))


def test_corrupted_o_l_is_caught():
    with pytest.raises(ValueError, match="commutator suite failed"):
        build_model(2, 1, NU, corrupt_ol=True)
    m = build_model(2, 1, NU, corrupt_ol=True, verify=False)
    bad = [c for c in commutator_suite(m) if not c.passed]
    assert bad and all(c.witness for c in bad)


def test_gauge_examples(model_2):
    m = model_2
    assert apply(m.H_tilde, Element.constant(2)).is_zero()
    assert apply(m.H_D, m.psi0) == m.psi0 * (m.omega * (1 + 2 * m.nu))
    assert apply(m.H_tilde, P) == P * (2 * m.omega)
    assert apply(m.H_tilde, S) == S * (2 * m.omega) - Element.constant(2, 2 + 4 * m.nu)
    assert gauge_operator(m) == m.H_tilde


@pytest.mark.parametrize("n", [2, 3])
def test_gauge_identity_on_test_set(n):
    m = build_model(n, 1, NU, verify=False)
    tests = gauge_test_set(n)
    assert len(tests) == 10
    assert all(gauge_check(m, f).passed for f in tests)
    assert apply(m.H_D, m.psi0) == m.psi0 * m.E0


@settings(max_examples=40)
@given(elements(mu=0, gamma=0))
def test_gauge_identity_on_random_polynomials(f):
    m = build_model(2, 2, Fraction(5, 2), verify=False)
    assert gauge_check(m, f).passed


def test_invariant_eigenstates(model_2):
    m = model_2
    norm = RadScalar.sqrt(m.omega) * RadScalar.pi_power(-1)
    state, ev, chk = invariant_eigenstate(m, 0, 0)
    assert state == Element.constant(2, norm) and ev == 0 and chk.passed
    state, ev, chk = invariant_eigenstate(m, 0, 1)
    assert state == P * norm and ev == 2 * m.omega and chk.passed
    state, ev, chk = invariant_eigenstate(m, 1, 0)
    assert state == (S - Element.constant(2, (1 + 2 * m.nu) / m.omega)) * norm and chk.passed
    for a in range(6):
        for b in range(6 - a):
            assert invariant_eigenstate(m, a, b)[2].passed


def test_truncated_eigenstates(model_2):
    m = model_2
    series, chk = truncated_eigenstate(m, 1, 1)
    assert chk.passed and not series.truncated
    assert series.degrees() == [2] and series[2] == Element.monomial((1, 1))
    series, chk = truncated_eigenstate(m, 2, 0, cutoff=-6)
    assert chk.passed and series.truncated
    lead = Element.constant(2, 2) + Element.var(2, 0, 2) * Element.prefactor(2, -1) * (8 * m.nu)
    assert series[0] == lead * (-1 / (4 * m.omega))
    for n1 in range(7):
        for n2 in range(7 - n1):
            assert truncated_eigenstate(m, n1, n2)[1].passed


def test_symmetrized_series_recovers_invariant_state(model_2):
    a, _ = truncated_eigenstate(model_2, 2, 0)
    b, _ = truncated_eigenstate(model_2, 0, 2)
    total = (a + b).map(symmetrize_d2)
    exact = GradedSeries.from_element(S - Element.constant(2, 1 + 2 * model_2.nu))
    assert total == exact


def test_similarity_chain(model_2):
    m = model_2
    norm = RadScalar.sqrt(m.omega) * RadScalar.pi_power(-1)
    out, checks = similarity_chain(m, TSpaceVector.basis(0, 0))
    assert out == Element.constant(2, norm) and all(c.passed for c in checks)
    out, checks = similarity_chain(m, TSpaceVector.basis(1, 1))
    assert out == P * (norm * 2 * m.omega)
    assert all(c.passed for c in checks)
    out, checks = similarity_chain(m, TSpaceVector.basis(2, 1))
    assert isinstance(out, GradedSeries) and all(c.passed for c in checks)


def test_chain_constant_at_other_frequency():
    m = build_model(2, 2, NU)
    out, _ = similarity_chain(m, TSpaceVector.basis(2, 1), cutoff=0)
    # (omega/pi)^(1/2) sqrt((2 omega)^3 / 2!) = 8 pi^(-1/2) at omega = 2, frozen from sympy
    assert out[3] == Element.monomial((2, 1)) * RadScalar.pi_power(-1, 8)


def test_ab_operators(model_2):
    checks = ab_operator_suite(model_2, cutoff=-8, span_degree=2)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


@pytest.mark.parametrize("omega,nu", [(1, NU), (2, Fraction(5, 2))])
def test_adjoint_identity(omega, nu):
    assert adjoint_identity_check(build_model(2, omega, nu)).passed


def test_adjoint_without_coupling():
    m = build_model(2, 3, 0, allow_any_nu=True)
    lhs = formal_dagger(m.O_E * m.omega - m.LAP * Fraction(1, 2))
    want = -(m.O_E * m.omega) - m.LAP * Fraction(1, 2) - DiffOp.scalar(2, 2 * m.omega)
    assert lhs == want


def test_t_space(model_2):
    m = model_2
    assert all(c.passed for c in t_orthonormality(m, 4))
    idx, mat = t_hamiltonian_matrix(m, 3)
    v = TSpaceVector.basis(2, 1)
    hv = _apply_matrix(idx, mat, v)
    assert inner_product_T(hv, v) == 3 * m.omega == inner_product_T(v, hv)


def test_reports():
    rep = calogero_report(2, 1, NU, degmax=6, nmax=3)
    assert rep.ok, rep.failures()
    rep3 = calogero_report(3, 1, 1, degmax=4)
    assert rep3.ok and rep3.summary["skipped"] == 4
    low = calogero_report(2, 1, Fraction(1, 4), degmax=4, nmax=2, allow_any_nu=True)
    assert low.checks[0].status == "skipped"
