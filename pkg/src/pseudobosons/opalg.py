"""Linear differential operators with :class:`Element` coefficients.

A :class:`DiffOp` is a finite sum ``sum_alpha c_alpha(x) * d^alpha`` kept in
normal order (all derivatives to the right of the coefficients), which makes
the representation unique and equality structural.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from itertools import product

from .funcspace import (
    DEFAULT_CUTOFF,
    Element,
    GradedSeries,
    IncompatibleExponentError,
    PolyN,
    homogeneous_components,
)
from .report import Check
from .scalar import ONE, RadScalar, as_fraction

__all__ = [
    "DiffOp",
    "NonTerminatingSeriesError",
    "apply",
    "compose",
    "commutator",
    "formal_dagger",
    "formal_star",
    "apply_exp",
    "ad_exp",
    "op_equal_on_span",
    "DEFAULT_MAX_TERMS",
]

DEFAULT_MAX_TERMS = 64

MultiIndex = tuple[int, ...]


class NonTerminatingSeriesError(RuntimeError):
    """An exponential series failed to terminate within the iteration bound."""

    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


class DiffOp:
    """Immutable normal-ordered differential operator in ``n`` variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[MultiIndex, Element] | None = None):
        self.n = n
        self.terms: dict[MultiIndex, Element] = {}
        for alpha, c in (terms or {}).items():
            if len(alpha) != n:
                raise ValueError(f"multi-index {alpha} has wrong length for N={n}")
            if not c.is_zero():
                self.terms[tuple(alpha)] = c

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> DiffOp:
        return cls(n)

    @classmethod
    def identity(cls, n: int) -> DiffOp:
        return cls(n, {(0,) * n: Element.constant(n)})

    @classmethod
    def scalar(cls, n: int, c) -> DiffOp:
        return cls(n, {(0,) * n: Element.constant(n, c)})

    @classmethod
    def mult(cls, f: Element) -> DiffOp:
        return cls(f.n, {(0,) * f.n: f})

    @classmethod
    def x(cls, n: int, i: int) -> DiffOp:
        return cls.mult(Element.var(n, i))

    @classmethod
    def d(cls, n: int, i: int, order: int = 1) -> DiffOp:
        alpha = [0] * n
        alpha[i] = order
        return cls(n, {tuple(alpha): Element.constant(n)})

    # -- structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def is_multiplication(self) -> bool:
        return all(sum(a) == 0 for a in self.terms)

    def multiplier(self) -> Element:
        if not self.is_multiplication():
            raise ValueError("operator is not a multiplication operator")
        return self.terms.get((0,) * self.n, Element.zero(self.n))

    def homogeneity(self) -> Fraction | None:
        """Common scaling degree of all terms (coefficient degree minus order)."""
        degs = set()
        for alpha, c in self.terms.items():
            for d in homogeneous_components(c).components:
                degs.add(d - sum(alpha))
        if len(degs) != 1:
            return None
        return degs.pop()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    # -- linear structure ---------------------------------------------------
    def __add__(self, other: DiffOp) -> DiffOp:
        if not isinstance(other, DiffOp):
            if isinstance(other, (int, Fraction, RadScalar)):
                other = DiffOp.scalar(self.n, other)
            else:
                return NotImplemented
        _same_n(self, other)
        out = dict(self.terms)
        for alpha, c in other.terms.items():
            cur = out.get(alpha)
            out[alpha] = c if cur is None else cur + c
        return DiffOp(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> DiffOp:
        return DiffOp(self.n, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other: DiffOp) -> DiffOp:
        if isinstance(other, (int, Fraction, RadScalar)):
            other = DiffOp.scalar(self.n, other)
        return self + (-other)

    def __rsub__(self, other) -> DiffOp:
        return (-self) + other

    def __mul__(self, other) -> DiffOp:
        """Scalar multiple, or composition when ``other`` is a DiffOp."""
        if isinstance(other, DiffOp):
            return compose(self, other)
        if isinstance(other, (int, Fraction, RadScalar)):
            return DiffOp(self.n, {a: c * other for a, c in self.terms.items()})
        if isinstance(other, Element):
            return compose(self, DiffOp.mult(other))
        return NotImplemented

    def __rmul__(self, other) -> DiffOp:
        if isinstance(other, (int, Fraction, RadScalar)):
            return self * other
        if isinstance(other, Element):
            return compose(DiffOp.mult(other), self)
        return NotImplemented

    def __pow__(self, k: int) -> DiffOp:
        out = DiffOp.identity(self.n)
        for _ in range(k):
            out = compose(out, self)
        return out

    def __call__(self, f: Element) -> Element:
        return apply(self, f)

    # -- rendering ----------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for alpha in sorted(self.terms, key=lambda a: (sum(a), a), reverse=True):
            c = self.terms[alpha]
            ds = "*".join(
                f"d{i + 1}" if k == 1 else f"d{i + 1}^{k}" for i, k in enumerate(alpha) if k
            )
            text = str(c)
            if ds and c.is_polynomial() and len(c.poly.terms) > 1:
                text = f"({text})"
            if ds:
                text = ds if text == "1" else "-" + ds if text == "-1" else f"{text}*{ds}"
            parts.append(text)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"DiffOp({self})"


def _same_n(a, b) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


def _partials(f: Element, alphas: Iterable[MultiIndex]) -> dict[MultiIndex, Element]:
    """All requested mixed partials of ``f``, sharing intermediate results."""
    cache: dict[MultiIndex, Element] = {(0,) * f.n: f}

    def get(alpha: MultiIndex) -> Element:
        hit = cache.get(alpha)
        if hit is not None:
            return hit
        i = next(k for k, a in enumerate(alpha) if a)
        lower = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
        val = get(lower).diff(i)
        cache[alpha] = val
        return val

    return {a: get(a) for a in alphas}


def apply(op: DiffOp, f: Element) -> Element:
    """Exact action of ``op`` on ``f``."""
    if op.n != f.n:
        raise ValueError(f"operator in N={op.n} applied to element in N={f.n}")
    parts = _partials(f, op.terms)
    out = Element.zero(f.n)
    for alpha, c in op.terms.items():
        d = parts[alpha]
        if not d.is_zero():
            out = out + c * d
    return out


def compose(a: DiffOp, b: DiffOp) -> DiffOp:
    """Normal-ordered product ``a o b`` via the Leibniz rule."""
    _same_n(a, b)
    n = a.n
    out: dict[MultiIndex, Element] = {}
    for alpha, ca in a.terms.items():
        lowers = list(product(*(range(k + 1) for k in alpha)))
        for beta, cb in b.terms.items():
            parts = _partials(cb, lowers)
            for g in lowers:
                dcb = parts[g]
                if dcb.is_zero():
                    continue
                binom = 1
                for k, j in zip(alpha, g):
                    binom *= math.comb(k, j)
                key = tuple(ak - gk + bk for ak, gk, bk in zip(alpha, g, beta))
                term = (ca * dcb) * binom
                cur = out.get(key)
                out[key] = term if cur is None else cur + term
    return DiffOp(n, out)


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return compose(a, b) - compose(b, a)


def _check_adjointable(op: DiffOp) -> None:
    for c in op.terms.values():
        if c.gamma:
            raise ValueError(f"adjoint of a Gaussian coefficient is not supported: {c}")
        if c.mu.denominator != 1:
            raise ValueError(f"adjoint needs integer prefactor powers, got {c.mu}")


def formal_dagger(op: DiffOp) -> DiffOp:
    """Adjoint for the unweighted product: ``x -> x``, ``d -> -d``, order reversed."""
    _check_adjointable(op)
    out = DiffOp.zero(op.n)
    for alpha, c in op.terms.items():
        sign = -1 if sum(alpha) % 2 else 1
        out = out + compose(DiffOp(op.n, {alpha: Element.constant(op.n, sign)}), DiffOp.mult(c))
    return out


def formal_star(op: DiffOp, gamma_pi) -> DiffOp:
    """Adjoint for the weight ``exp(gamma_pi * |x|**2)``: ``d_i -> -d_i - 2 gamma_pi x_i``."""
    _check_adjointable(op)
    g = as_fraction(gamma_pi)
    if g == 0:
        return formal_dagger(op)
    n = op.n
    starred = [-DiffOp.d(n, i) - DiffOp.x(n, i) * (2 * g) for i in range(n)]
    powers: dict[tuple[int, int], DiffOp] = {}

    def power(i: int, k: int) -> DiffOp:
        if (i, k) not in powers:
            powers[(i, k)] = DiffOp.identity(n) if k == 0 else compose(power(i, k - 1), starred[i])
        return powers[(i, k)]

    out = DiffOp.zero(n)
    for alpha, c in op.terms.items():
        lead = DiffOp.identity(n)
        for i, k in enumerate(alpha):
            if k:
                lead = compose(lead, power(i, k))
        out = out + compose(lead, DiffOp.mult(c))
    return out


# ---------------------------------------------------------------------------
# exponentials
# ---------------------------------------------------------------------------


def _gaussian_shift(c: RadScalar, op: DiffOp) -> Fraction | None:
    """If ``c*op`` multiplies by ``g*|x|**2`` with rational ``g``, return ``g``."""
    if not op.is_multiplication():
        return None
    m = op.multiplier()
    if m.mu or m.gamma:
        return None
    n = op.n
    terms = m.poly.terms
    keys = {tuple(2 if j == i else 0 for j in range(n)) for i in range(n)}
    if set(terms) != keys:
        return None
    coeffs = {terms[k] for k in keys}
    if len(coeffs) != 1:
        return None
    prod = coeffs.pop() * c
    if not prod.is_rational():
        return None
    return prod.to_fraction()


def apply_exp(
    c,
    op: DiffOp,
    f: Element,
    mode: str = "exact",
    cutoff=DEFAULT_CUTOFF,
    max_terms: int = DEFAULT_MAX_TERMS,
):
    """Apply ``exp(c * op)`` to ``f``.

    ``mode="exact"`` sums ``c**k op**k f / k!`` until a term vanishes and
    raises :class:`NonTerminatingSeriesError` after ``max_terms`` terms.
    ``mode="truncated"`` needs ``op`` to lower the scaling degree and returns
    a :class:`GradedSeries` keeping degrees ``>= cutoff``. Multiplication by
    a multiple of ``|x|**2`` is exponentiated exactly as a Gaussian shift.
    """
    c = RadScalar.coerce(c)
    if op.n != f.n:
        raise ValueError("dimension mismatch in apply_exp")
    g = _gaussian_shift(c, op)
    if g is not None:
        res = f.shift_gaussian(g)
        return res if mode == "exact" else GradedSeries.from_element(res, cutoff)
    if mode == "exact":
        total = f
        term = f
        for k in range(1, max_terms + 1):
            term = apply(op, term) * (c / k)
            if term.is_zero():
                return total
            total = total + term
        raise NonTerminatingSeriesError(
            f"exp series did not terminate within {max_terms} terms", term
        )
    if mode != "truncated":
        raise ValueError(f"unknown mode {mode!r}")
    return apply_exp_series(c, op, GradedSeries.from_element(f, cutoff), cutoff)


def apply_exp_series(c, op: DiffOp, series: GradedSeries, cutoff=None) -> GradedSeries:
    """Truncated ``exp(c * op)`` on a graded series (``op`` must lower degree)."""
    c = RadScalar.coerce(c)
    cut = series.cutoff if cutoff is None else as_fraction(cutoff)
    step = op.homogeneity()
    if step is None or step >= 0:
        raise ValueError("truncated exponential needs a homogeneous degree-lowering operator")
    out = GradedSeries(
        series.n, cutoff=cut, truncated=series.truncated, dropped=series.dropped
    )
    for d in series.degrees():
        term = series.components[d]
        deg = d
        k = 0
        while True:
            out._put(deg, term)
            if deg + step < cut:
                nxt = apply(op, term)
                if not nxt.is_zero():
                    out.dropped.add(deg + step)
                    out.truncated = True
                break
            k += 1
            term = apply(op, term) * (c / k)
            deg = deg + step
            if term.is_zero():
                break
    return out


def ad_exp(c, x: DiffOp, y: DiffOp, max_terms: int = DEFAULT_MAX_TERMS) -> tuple[DiffOp, int]:
    """``exp(c X) Y exp(-c X)`` as ``sum c**k/k! ad_X**k Y`` when it terminates.

    Returns the operator and the number of non-zero nested commutators used.
    """
    c = RadScalar.coerce(c)
    total = y
    term = y
    for k in range(1, max_terms + 1):
        term = commutator(x, term) * (c / k)
        if term.is_zero():
            return total, k
        total = total + term
    raise NonTerminatingSeriesError(
        f"adjoint series did not terminate within {max_terms} terms", term
    )


def op_equal_on_span(a: DiffOp, b: DiffOp, span: Sequence[Element], name: str = "op_equal_on_span") -> Check:
    """Compare ``a s`` and ``b s`` exactly for each ``s`` in ``span``."""
    if not span:
        raise ValueError("span must be non-empty")
    for s in span:
        lhs, rhs = apply(a, s), apply(b, s)
        if lhs != rhs:
            return Check.fail(name, f"at {s}: {lhs} != {rhs}")
    return Check.ok(name, f"{len(span)} span elements")
