"""Pseudo-bosonic description of the 2-D oscillator in a Gaussian-weighted space.

The weight is ``exp((beta - omega) |x|**2)`` with ``0 < beta <= omega``. The
lowering/raising pair ``a_j = (omega x_j + d_j)/sqrt(2 omega)``,
``b_j = (omega x_j - d_j)/sqrt(2 omega)`` is kept; in the weighted space
``b_j`` is no longer the adjoint of ``a_j``, and the weighted adjoints
``a_j*``, ``b_j*`` generate the dual family ``Psi``.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import product

from .funcspace import Element, PolyN
from .gaussint import DEFAULT_QUAD_ORDER, WeightSpec, inner_product_pi, quad_oracle
from .opalg import DiffOp, apply, commutator, compose, formal_dagger, formal_star
from .report import Check, Report
from .scalar import RadScalar, as_fraction

__all__ = [
    "PseudoBosonFamily",
    "hermite_poly",
    "qho_phi",
    "qho_psi",
    "qho_phi_closed",
    "qho_psi_closed",
    "check_commutators",
    "check_ladder_spectra",
    "gram_matrix",
    "check_biorthogonality",
    "s_multiplier_apply",
    "check_intertwining",
    "appendix_chain",
    "check_reconstruction",
    "norm_ratios",
    "check_nonregularity",
    "oracle_pairs",
    "check_oracle",
    "qho_report",
]


def hermite_poly(n: int, omega, var: int = 0, nvars: int = 2) -> PolyN:
    """Physicists' Hermite polynomial ``H_n(sqrt(omega) * x_var)``."""
    w = RadScalar.sqrt(as_fraction(omega))
    y = PolyN.var(nvars, var) * w
    prev, cur = PolyN(nvars), PolyN.constant(nvars)
    for k in range(n):
        prev, cur = cur, (y * cur).scale(Fraction(2)) - prev.scale(Fraction(2 * k))
    return cur


class PseudoBosonFamily:
    """Ladder operators and biorthogonal vectors for one ``(omega, beta)``.

    Construction fails with ``ValueError`` if any canonical commutation
    relation or vacuum condition does not hold exactly.
    """

    def __init__(self, omega, beta=None):
        self.omega = as_fraction(omega)
        self.beta = self.omega / 2 if beta is None else as_fraction(beta)
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if not 0 < self.beta <= self.omega:
            raise ValueError("beta must satisfy 0 < beta <= omega")
        self.gamma_pi = self.beta - self.omega
        self.weight = WeightSpec(self.gamma_pi, 2)
        self.norm = RadScalar.sqrt(self.omega) * RadScalar.pi_power(-1)

        c = 1 / RadScalar.sqrt(2 * self.omega)
        om = self.omega
        self.a = [(DiffOp.x(2, j) * om + DiffOp.d(2, j)) * c for j in range(2)]
        self.b = [(DiffOp.x(2, j) * om - DiffOp.d(2, j)) * c for j in range(2)]
        self.a_star = [formal_star(op, self.gamma_pi) for op in self.a]
        self.b_star = [formal_star(op, self.gamma_pi) for op in self.b]
        self.number = [compose(self.b[j], self.a[j]) for j in range(2)]
        self.number_star = [compose(self.a_star[j], self.b_star[j]) for j in range(2)]
        self.h = (self.number[0] + self.number[1]) * om
        self.h_star = formal_star(self.h, self.gamma_pi)

        self.phi00 = Element.gaussian(2, -om / 2, self.norm)
        self.psi00 = Element.gaussian(2, om / 2 - self.beta, self.norm)
        self._phi_raw: dict[tuple[int, int], Element] = {(0, 0): self.phi00}
        self._psi_raw: dict[tuple[int, int], Element] = {(0, 0): self.psi00}

        bad = [c for c in check_commutators(self) if not c.passed]
        if bad:
            raise ValueError(f"commutation relations fail: {bad[0].name}: {bad[0].witness}")
        for j in range(2):
            if not apply(self.a[j], self.phi00).is_zero():
                raise ValueError("phi_00 is not annihilated by a_j")
            if not apply(self.b_star[j], self.psi00).is_zero():
                raise ValueError("Psi_00 is not annihilated by b_j*")

    def params(self) -> dict[str, str]:
        return {"omega": str(self.omega), "beta": str(self.beta)}

    def _raw(self, cache, ops, n1: int, n2: int) -> Element:
        key = (n1, n2)
        hit = cache.get(key)
        if hit is not None:
            return hit
        if n1 > 0:
            val = apply(ops[0], self._raw(cache, ops, n1 - 1, n2))
        else:
            val = apply(ops[1], self._raw(cache, ops, 0, n2 - 1))
        cache[key] = val
        return val

    def phi(self, n1: int, n2: int) -> Element:
        if n1 < 0 or n2 < 0:
            raise ValueError("indices must be non-negative")
        raw = self._raw(self._phi_raw, self.b, n1, n2)
        return raw * (1 / RadScalar.sqrt(math.factorial(n1) * math.factorial(n2)))

    def psi(self, n1: int, n2: int) -> Element:
        if n1 < 0 or n2 < 0:
            raise ValueError("indices must be non-negative")
        raw = self._raw(self._psi_raw, self.a_star, n1, n2)
        return raw * (1 / RadScalar.sqrt(math.factorial(n1) * math.factorial(n2)))

    def __repr__(self) -> str:
        return f"PseudoBosonFamily(omega={self.omega}, beta={self.beta})"


def qho_phi(fam: PseudoBosonFamily, n1: int, n2: int) -> Element:
    """``(n1! n2!)**(-1/2) b1**n1 b2**n2 phi_00``."""
    return fam.phi(n1, n2)


def qho_psi(fam: PseudoBosonFamily, n1: int, n2: int) -> Element:
    """``(n1! n2!)**(-1/2) (a1*)**n1 (a2*)**n2 Psi_00``."""
    return fam.psi(n1, n2)


def _hermite_closed(omega: Fraction, n1: int, n2: int, norm: RadScalar) -> PolyN:
    const = norm / RadScalar.sqrt(math.factorial(n1) * math.factorial(n2) * 2 ** (n1 + n2))
    return hermite_poly(n1, omega, 0) * hermite_poly(n2, omega, 1) * const


def qho_phi_closed(fam: PseudoBosonFamily, n1: int, n2: int) -> Element:
    """Hermite-function closed form of ``phi_{n1,n2}``."""
    return Element(_hermite_closed(fam.omega, n1, n2, fam.norm), 0, -fam.omega / 2)


def qho_psi_closed(fam: PseudoBosonFamily, n1: int, n2: int) -> Element:
    """Pure Hermite polynomial form of ``Psi_{n1,n2}``; only valid for ``beta = omega/2``."""
    if fam.beta != fam.omega / 2:
        raise ValueError("the pure Hermite form of Psi needs beta = omega/2")
    return Element(_hermite_closed(fam.omega, n1, n2, fam.norm))


def check_commutators(fam: PseudoBosonFamily) -> list[Check]:
    """``[a_j, b_j] = 1`` and vanishing cross-mode commutators, for plain, dagger and star forms."""
    ident = DiffOp.identity(2)
    checks = []
    for j in range(2):
        c = commutator(fam.a[j], fam.b[j])
        checks.append(Check.from_bool(f"[a{j + 1},b{j + 1}]=1", c == ident, str(c)))
        cs = commutator(fam.b_star[j], fam.a_star[j])
        checks.append(Check.from_bool(f"[b{j + 1}*,a{j + 1}*]=1", cs == ident, str(cs)))

    def forms(j):
        a, b = fam.a[j], fam.b[j]
        return {
            f"a{j + 1}": a,
            f"b{j + 1}": b,
            f"a{j + 1}+": formal_dagger(a),
            f"b{j + 1}+": formal_dagger(b),
            f"a{j + 1}*": fam.a_star[j],
            f"b{j + 1}*": fam.b_star[j],
        }

    for (n1, o1), (n2, o2) in product(forms(0).items(), forms(1).items()):
        c = commutator(o1, o2)
        checks.append(Check.from_bool(f"[{n1},{n2}]=0", c.is_zero(), str(c)))
    return checks


def check_ladder_spectra(fam: PseudoBosonFamily, nmax: int) -> list[Check]:
    """Number-operator and Hamiltonian eigen-relations on both families."""
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    fails: dict[str, str] = {}
    counts: dict[str, int] = {}

    def record(name, lhs, rhs):
        counts[name] = counts.get(name, 0) + 1
        if lhs != rhs and name not in fails:
            fails[name] = f"{lhs} != {rhs}"

    for n1, n2 in product(range(nmax + 1), repeat=2):
        phi, psi = fam.phi(n1, n2), fam.psi(n1, n2)
        for j, k in enumerate((n1, n2)):
            record(f"N{j + 1} phi = n phi", apply(fam.number[j], phi), phi * k)
            record(f"N{j + 1}* Psi = n Psi", apply(fam.number_star[j], psi), psi * k)
        e = fam.omega * (n1 + n2)
        record("h phi = omega(n1+n2) phi", apply(fam.h, phi), phi * e)
        record("h* Psi = omega(n1+n2) Psi", apply(fam.h_star, psi), psi * e)
    return [
        Check.fail(name, fails[name]) if name in fails else Check.ok(name, f"{counts[name]} states")
        for name in counts
    ]


def gram_matrix(fam: PseudoBosonFamily, nmax: int) -> tuple[list[tuple[int, int]], list[list[RadScalar]]]:
    """``<Psi_{n,l}, phi_{m,k}>_pi`` over all indices up to ``nmax``."""
    idx = list(product(range(nmax + 1), repeat=2))
    psis = [fam.psi(*i) for i in idx]
    phis = [fam.phi(*i) for i in idx]
    mat = [[inner_product_pi(p, f, fam.weight) for f in phis] for p in psis]
    return idx, mat


def check_biorthogonality(fam: PseudoBosonFamily, nmax: int) -> Check:
    idx, mat = gram_matrix(fam, nmax)
    one = RadScalar.from_rational(1)
    for r, row in enumerate(mat):
        for c, v in enumerate(row):
            want = one if r == c else RadScalar()
            if v != want:
                return Check.fail(
                    "biorthogonality",
                    f"<Psi{idx[r]}, phi{idx[c]}>_pi = {v}, expected {want}",
                )
    size = len(idx)
    return Check.ok("biorthogonality", f"{size}x{size} Gram matrix is the identity")


def _require_multiplier_point(fam: PseudoBosonFamily) -> None:
    if fam.beta != fam.omega / 2:
        raise ValueError("multiplier intertwiners are only available for beta = omega/2")


def s_multiplier_apply(fam: PseudoBosonFamily, which: str, f: Element) -> Element:
    """``S_Psi f = exp(+omega|x|^2/2) f``; ``S_phi f = exp(-omega|x|^2/2) f``."""
    _require_multiplier_point(fam)
    if which == "S_psi":
        return f.shift_gaussian(fam.omega / 2)
    if which == "S_phi":
        return f.shift_gaussian(-fam.omega / 2)
    raise ValueError(f"unknown intertwiner {which!r}")


def check_intertwining(fam: PseudoBosonFamily, nmax: int) -> list[Check]:
    _require_multiplier_point(fam)
    s_psi = lambda f: s_multiplier_apply(fam, "S_psi", f)  # noqa: E731
    s_phi = lambda f: s_multiplier_apply(fam, "S_phi", f)  # noqa: E731
    results: dict[str, str | None] = {}

    def record(name, lhs, rhs):
        if name not in results:
            results[name] = None
        if lhs != rhs and results[name] is None:
            results[name] = f"{lhs} != {rhs}"

    for n1, n2 in product(range(nmax + 1), repeat=2):
        phi, psi = fam.phi(n1, n2), fam.psi(n1, n2)
        record("S_phi Psi = phi", s_phi(psi), phi)
        record("S_psi phi = Psi", s_psi(phi), psi)
        record("S_psi S_phi = 1", s_psi(s_phi(psi)), psi)
        for j in range(2):
            record(
                f"S_psi N{j + 1} = N{j + 1}* S_psi",
                s_psi(apply(fam.number[j], phi)),
                apply(fam.number_star[j], s_psi(phi)),
            )
            record(
                f"N{j + 1} S_phi = S_phi N{j + 1}*",
                apply(fam.number[j], s_phi(psi)),
                s_phi(apply(fam.number_star[j], psi)),
            )
        record("S_psi h = h* S_psi", s_psi(apply(fam.h, phi)), apply(fam.h_star, s_psi(phi)))
    return [Check.ok(k) if v is None else Check.fail(k, v) for k, v in results.items()]


def appendix_chain(fam: PseudoBosonFamily, nmax: int) -> list[Check]:
    """Orthonormal ``e_n = exp(-pi/2) phi_n`` and the multiplier ``T = exp(pi/2)``."""
    _require_multiplier_point(fam)
    half = fam.gamma_pi / 2
    idx = list(product(range(nmax + 1), repeat=2))
    es = {i: fam.phi(*i).shift_gaussian(-half) for i in idx}
    one = RadScalar.from_rational(1)
    ortho = None
    for i, j in product(idx, repeat=2):
        v = inner_product_pi(es[i], es[j], fam.weight)
        if v != (one if i == j else RadScalar()):
            ortho = f"<e{i}, e{j}>_pi = {v}"
            break
    t_fwd = t_inv = None
    for i in idx:
        if es[i].shift_gaussian(half) != fam.phi(*i):
            t_fwd = f"T e{i} != phi{i}"
            break
    for i in idx:
        if es[i].shift_gaussian(-half) != fam.psi(*i):
            t_inv = f"T^-1 e{i} != Psi{i}"
            break
    return [
        Check.ok("e basis orthonormal") if ortho is None else Check.fail("e basis orthonormal", ortho),
        Check.ok("T e = phi") if t_fwd is None else Check.fail("T e = phi", t_fwd),
        Check.ok("T^-1 e = Psi") if t_inv is None else Check.fail("T^-1 e = Psi", t_inv),
    ]


def check_reconstruction(fam: PseudoBosonFamily, nmax: int, rng: random.Random, samples: int = 3) -> list[Check]:
    """Exact finite expansion ``f = sum <Psi_n, f> phi_n`` and its dual."""
    idx = list(product(range(nmax + 1), repeat=2))
    out = []
    for label, basis, dual in (
        ("phi", fam.phi, fam.psi),
        ("Psi", fam.psi, fam.phi),
    ):
        witness = None
        for _ in range(samples):
            coeffs = {i: Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for i in idx if rng.random() < 0.3}
            f = Element.zero(2)
            for i, c in coeffs.items():
                f = f + basis(*i) * c
            g = Element.zero(2)
            for i in idx:
                co = inner_product_pi(dual(*i), f, fam.weight)
                if co:
                    g = g + basis(*i) * co
            if g != f:
                witness = f"reconstruction differs for coefficients {coeffs}"
                break
        name = f"reconstruction in span of {label}"
        out.append(Check.ok(name, f"{samples} random vectors") if witness is None else Check.fail(name, witness))
    return out


def norm_ratios(fam: PseudoBosonFamily, nmax: int) -> list[Fraction]:
    """``||Psi_{n,n}||^2 / ||phi_{n,n}||^2`` for ``n = 0..nmax`` (exact rationals)."""
    out = []
    for n in range(nmax + 1):
        p2 = inner_product_pi(fam.psi(n, n), fam.psi(n, n), fam.weight)
        f2 = inner_product_pi(fam.phi(n, n), fam.phi(n, n), fam.weight)
        out.append((p2 / f2).to_fraction())
    return out


def check_nonregularity(fam: PseudoBosonFamily, nmax: int = 8) -> Check:
    r = norm_ratios(fam, nmax)
    good = all(b > a for a, b in zip(r, r[1:]))
    return Check.from_bool(
        "norm ratio ||Psi_nn||/||phi_nn|| increasing",
        good,
        f"ratios {[str(x) for x in r]}",
        detail=f"n <= {nmax}",
    )


def oracle_pairs(fam: PseudoBosonFamily, nmax: int = 3) -> list[tuple[str, Element, Element]]:
    """Labelled ``(Psi_i, phi_j)`` and ``(phi_i, phi_j)`` pairs for the quadrature cross-check."""
    idx = list(product(range(nmax + 1), repeat=2))
    out = []
    for i in idx:
        for j in idx:
            out.append((f"<Psi{i}, phi{j}>", fam.psi(*i), fam.phi(*j)))
    for i in idx:
        for j in idx:
            if i <= j:
                out.append((f"<phi{i}, phi{j}>", fam.phi(*i), fam.phi(*j)))
    return out


def check_oracle(
    fam: PseudoBosonFamily, nmax: int = 3, order: int = DEFAULT_QUAD_ORDER, rtol: float = 1e-10
) -> Check:
    """Exact inner products against Gauss-Hermite quadrature.

    Agreement means ``|exact - quad| <= rtol * max(|exact|, 1)``.
    """
    pairs = oracle_pairs(fam, nmax)
    worst = 0.0
    for label, f, g in pairs:
        exact = float(inner_product_pi(f, g, fam.weight))
        approx = quad_oracle(f, g, fam.weight, order)
        err = abs(exact - approx) / max(abs(exact), 1.0)
        worst = max(worst, err)
        if err > rtol:
            return Check.fail("quadrature oracle", f"{label}: exact {exact!r}, quadrature {approx!r}")
    return Check.ok("quadrature oracle", f"{len(pairs)} pairs, order {order}, worst relative error {worst:.1e}")


def qho_report(omega, beta=None, nmax: int = 6, seed: int = 0, quad_order: int = DEFAULT_QUAD_ORDER) -> Report:
    """All QHO checks for one parameter point."""
    fam = PseudoBosonFamily(omega, beta)
    rep = Report("qho", {**fam.params(), "nmax": nmax, "seed": seed, "quad_order": quad_order})
    rep.extend(check_commutators(fam))
    for j in range(2):
        rep.add(Check.from_bool(f"a{j + 1} phi00 = 0", apply(fam.a[j], fam.phi00).is_zero(), "non-zero"))
        rep.add(Check.from_bool(f"b{j + 1}* Psi00 = 0", apply(fam.b_star[j], fam.psi00).is_zero(), "non-zero"))
    closed = None
    for n1, n2 in product(range(nmax + 1), repeat=2):
        if fam.phi(n1, n2) != qho_phi_closed(fam, n1, n2):
            closed = f"phi({n1},{n2}) ladder != Hermite form"
            break
    rep.add(Check.ok("phi ladder = Hermite form") if closed is None else Check.fail("phi ladder = Hermite form", closed))
    rep.extend(check_ladder_spectra(fam, nmax))
    rep.add(check_biorthogonality(fam, nmax))
    rep.extend(check_reconstruction(fam, nmax, random.Random(seed)))
    rep.add(check_oracle(fam, min(nmax, 3), quad_order))
    if fam.beta == fam.omega / 2:
        closed = None
        for n1, n2 in product(range(nmax + 1), repeat=2):
            if fam.psi(n1, n2) != qho_psi_closed(fam, n1, n2):
                closed = f"Psi({n1},{n2}) ladder != Hermite form"
                break
        rep.add(Check.ok("Psi ladder = Hermite form") if closed is None else Check.fail("Psi ladder = Hermite form", closed))
        rep.extend(check_intertwining(fam, nmax))
        rep.extend(appendix_chain(fam, nmax))
        rep.add(check_nonregularity(fam, 8))
    else:
        for name in ("intertwining", "appendix chain", "non-regularity"):
            rep.add(Check.skip(name, "multiplier forms need beta = omega/2"))
    return rep
