"""A small expression language for operators on N variables.

Grammar (left associative, ``*`` binds tighter than ``+``/``-``)::

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := '-' factor | primary ('^' power)?
    primary := NUMBER ('/' NUMBER)? | IDENT | '(' expr ')'
             | 'comm(' expr ',' expr ')' | 'exp(' expr ',' expr ')'
    power   := '-'? INT | '(' '-'? NUMBER ('/' NUMBER)? ')'

Identifiers are ``x1..xN``, ``d1..dN``, ``OE``, ``OL``, ``LAP``, ``X2``,
``D`` (the prefactor), ``omega`` and ``nu``. A product is composition, so
``exp(-1/2, X2)*x1`` applied to ``1`` gives ``x1*exp(-|x|^2/2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .funcspace import DEFAULT_CUTOFF, Element, GradedSeries
from .opalg import DiffOp, apply, apply_exp, apply_exp_series, commutator, _gaussian_shift
from .scalar import RadScalar, as_fraction

__all__ = [
    "OpDslError",
    "OpDslSyntaxError",
    "UnknownIdentifierError",
    "IndexOutOfRangeError",
    "EvaluationError",
    "Num",
    "Param",
    "Var",
    "Named",
    "Neg",
    "BinOp",
    "Pow",
    "Comm",
    "Exp",
    "OpAst",
    "parse_opdsl",
    "render",
    "OpContext",
    "to_diffop",
    "apply_ast",
    "parse_element",
]


class OpDslError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class OpDslSyntaxError(OpDslError):
    pass


class UnknownIdentifierError(OpDslError):
    pass


class IndexOutOfRangeError(OpDslError):
    pass


class EvaluationError(OpDslError):
    pass


# -- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Param:
    name: str  # "omega" | "nu"


@dataclass(frozen=True)
class Var:
    kind: str  # "x" | "d"
    index: int  # 1-based, as written


@dataclass(frozen=True)
class Named:
    name: str  # OE, OL, LAP, X2, D


@dataclass(frozen=True)
class Neg:
    arg: OpAst


@dataclass(frozen=True)
class BinOp:
    op: str  # "+", "-", "*"
    left: OpAst
    right: OpAst


@dataclass(frozen=True)
class Pow:
    base: OpAst
    exponent: Fraction


@dataclass(frozen=True)
class Comm:
    left: OpAst
    right: OpAst


@dataclass(frozen=True)
class Exp:
    scalar: OpAst
    op: OpAst


OpAst = Union[Num, Param, Var, Named, Neg, BinOp, Pow, Comm, Exp]

NAMED = ("OE", "OL", "LAP", "X2", "D")
PARAMS = ("omega", "nu")

# -- lexer ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "ident", "sym", "end"
    text: str
    pos: int


def _lex(text: str) -> list[_Tok]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            break
        if m.group(1) is not None:
            out.append(_Tok("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(_Tok("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise OpDslSyntaxError(f"unexpected character {ch!r}", m.start(3))
            out.append(_Tok("sym", ch, m.start(3)))
        i = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, n: int):
        self.toks = _lex(text)
        self.i = 0
        self.n = n

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def _advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def _fail(self, what: str):
        t = self.cur
        got = "end of input" if t.kind == "end" else repr(t.text)
        raise OpDslSyntaxError(f"expected {what}, got {got}", t.pos)

    def _expect(self, sym: str) -> None:
        if self.cur.kind == "sym" and self.cur.text == sym:
            self._advance()
        else:
            self._fail(repr(sym))

    def _is(self, sym: str) -> bool:
        return self.cur.kind == "sym" and self.cur.text == sym

    def parse(self) -> OpAst:
        node = self.expr()
        if self.cur.kind != "end":
            self._fail("operator or end of input")
        return node

    def expr(self) -> OpAst:
        node = self.term()
        while self._is("+") or self._is("-"):
            op = self._advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> OpAst:
        node = self.factor()
        while self._is("*"):
            self._advance()
            node = BinOp("*", node, self.factor())
        return node

    def factor(self) -> OpAst:
        if self._is("-"):
            self._advance()
            return Neg(self.factor())
        node = self.primary()
        if self._is("^"):
            self._advance()
            node = Pow(node, self.power())
        return node

    def _number(self) -> Fraction:
        if self.cur.kind != "int":
            self._fail("number")
        q = Fraction(int(self._advance().text))
        if self._is("/"):
            self._advance()
            if self.cur.kind != "int":
                self._fail("denominator")
            t = self._advance()
            if int(t.text) == 0:
                raise OpDslSyntaxError("zero denominator", t.pos)
            q /= int(t.text)
        return q

    def power(self) -> Fraction:
        if self._is("("):
            self._advance()
            sign = -1 if self._is("-") else 1
            if sign < 0:
                self._advance()
            q = self._number()
            self._expect(")")
            return sign * q
        sign = -1 if self._is("-") else 1
        if sign < 0:
            self._advance()
        if self.cur.kind != "int":
            self._fail("integer exponent")
        return Fraction(sign * int(self._advance().text))

    def primary(self) -> OpAst:
        t = self.cur
        if t.kind == "int":
            return Num(self._number())
        if self._is("("):
            self._advance()
            node = self.expr()
            self._expect(")")
            return node
        if t.kind != "ident":
            self._fail("operand")
        self._advance()
        name = t.text
        if name in ("comm", "exp"):
            self._expect("(")
            a = self.expr()
            self._expect(",")
            b = self.expr()
            self._expect(")")
            return Comm(a, b) if name == "comm" else Exp(a, b)
        if name in NAMED:
            return Named(name)
        if name in PARAMS:
            return Param(name)
        m = re.fullmatch(r"([xd])(\d+)", name)
        if m:
            k = int(m.group(2))
            if not 1 <= k <= self.n:
                raise IndexOutOfRangeError(f"index {k} of {name} outside 1..{self.n}", t.pos)
            return Var(m.group(1), k)
        raise UnknownIdentifierError(f"unknown identifier {name!r}", t.pos)


def parse_opdsl(text: str, n: int = 2) -> OpAst:
    if not text or not text.strip():
        raise OpDslSyntaxError("empty expression", 0)
    return _Parser(text, n).parse()


# -- rendering ----------------------------------------------------------------


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render(node: OpAst, _level: int = 0) -> str:
    """Minimal-parenthesis text that parses back to the same tree."""
    if isinstance(node, BinOp):
        if node.op == "*":
            s, lvl = f"{render(node.left, 2)}*{render(node.right, 3)}", 2
        else:
            s, lvl = f"{render(node.left, 1)} {node.op} {render(node.right, 2)}", 1
    elif isinstance(node, Neg):
        s, lvl = "-" + render(node.arg, 3), 3
    elif isinstance(node, Pow):
        e = node.exponent
        ex = _frac(e) if e.denominator == 1 else f"({_frac(e)})"
        s, lvl = f"{render(node.base, 4)}^{ex}", 3
    elif isinstance(node, Num):
        s, lvl = _frac(node.value), 4
        if node.value.denominator != 1 and _level > 3:
            lvl = 3  # "1/2^2" would read as (1/2)^2 anyway, but keep it explicit
    elif isinstance(node, Param):
        s, lvl = node.name, 4
    elif isinstance(node, Var):
        s, lvl = f"{node.kind}{node.index}", 4
    elif isinstance(node, Named):
        s, lvl = node.name, 4
    elif isinstance(node, Comm):
        s, lvl = f"comm({render(node.left)}, {render(node.right)})", 4
    elif isinstance(node, Exp):
        s, lvl = f"exp({render(node.scalar)}, {render(node.op)})", 4
    else:
        raise TypeError(f"not an OpAst node: {node!r}")
    return f"({s})" if lvl < _level else s


# -- evaluation -----------------------------------------------------------------


@dataclass
class OpContext:
    """Dimension and parameter values used to evaluate an AST."""

    n: int = 2
    omega: Fraction = Fraction(1)
    nu: Fraction = Fraction(3, 2)

    def __post_init__(self):
        self.omega = as_fraction(self.omega)
        self.nu = as_fraction(self.nu)
        self._model = None

    def named(self, name: str) -> DiffOp:
        if name == "D":
            return DiffOp.mult(Element.prefactor(self.n, 1))
        if self._model is None:
            from .calogero import CalogeroModel

            if self.n not in (2, 3):
                raise EvaluationError(f"{name} is only defined for N = 2, 3")
            self._model = CalogeroModel(self.n, self.omega, self.nu)
        return {
            "OE": self._model.O_E,
            "OL": self._model.O_L,
            "LAP": self._model.LAP,
            "X2": self._model.X2,
        }[name]


def _scalar_of(op: DiffOp) -> RadScalar:
    if op.is_zero():
        return RadScalar()
    if op.is_multiplication():
        m = op.multiplier()
        if not m.mu and not m.gamma and m.poly.degree() == 0:
            return m.poly.terms.get((0,) * op.n, RadScalar())
    raise EvaluationError(f"expected a scalar, got operator {op}")


def _power(base_ast: OpAst, base: DiffOp, e: Fraction, ctx: OpContext) -> DiffOp:
    if base_ast == Named("D"):
        return DiffOp.mult(Element.prefactor(ctx.n, e))
    if e.denominator == 1 and e >= 0:
        return base ** int(e)
    if not base.is_multiplication():
        raise EvaluationError(f"negative or fractional power of a differential operator: {render(base_ast)}")
    if e.denominator != 1:
        raise EvaluationError("fractional powers are only defined for D")
    m = base.multiplier()
    try:
        inv = Element.constant(ctx.n) / m
    except (ArithmeticError, ValueError) as exc:
        raise EvaluationError(f"cannot invert {m}") from exc
    return DiffOp.mult(inv) ** int(-e)


def to_diffop(node: OpAst, ctx: OpContext) -> DiffOp:
    """Evaluate to a normal-ordered DiffOp. ``exp`` nodes have no such form."""
    n = ctx.n
    if isinstance(node, Num):
        return DiffOp.scalar(n, node.value)
    if isinstance(node, Param):
        return DiffOp.scalar(n, getattr(ctx, node.name))
    if isinstance(node, Var):
        return DiffOp.x(n, node.index - 1) if node.kind == "x" else DiffOp.d(n, node.index - 1)
    if isinstance(node, Named):
        return ctx.named(node.name)
    if isinstance(node, Neg):
        return -to_diffop(node.arg, ctx)
    if isinstance(node, BinOp):
        a, b = to_diffop(node.left, ctx), to_diffop(node.right, ctx)
        return a + b if node.op == "+" else a - b if node.op == "-" else a * b
    if isinstance(node, Pow):
        return _power(node.base, to_diffop(node.base, ctx), node.exponent, ctx)
    if isinstance(node, Comm):
        return commutator(to_diffop(node.left, ctx), to_diffop(node.right, ctx))
    if isinstance(node, Exp):
        raise EvaluationError("exp(...) has no finite operator form; apply it to a function instead")
    raise TypeError(f"not an OpAst node: {node!r}")


def _has_exp(node: OpAst) -> bool:
    if isinstance(node, Exp):
        return True
    for child in ("arg", "left", "right", "base"):
        sub = getattr(node, child, None)
        if sub is not None and not isinstance(sub, Fraction) and _has_exp(sub):
            return True
    return False


def apply_ast(
    node: OpAst,
    f: Element,
    ctx: OpContext,
    mode: str = "exact",
    cutoff=DEFAULT_CUTOFF,
    max_terms: int = 64,
):
    """Apply an AST to ``f``; returns an Element (exact) or GradedSeries (truncated)."""
    if mode not in ("exact", "truncated"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact":
        return _apply_exact(node, f, ctx, max_terms)
    return _apply_series(node, GradedSeries.from_element(f, cutoff), ctx, as_fraction(cutoff))


def _apply_exact(node: OpAst, f: Element, ctx: OpContext, max_terms: int) -> Element:
    if not _has_exp(node):
        return apply(to_diffop(node, ctx), f)
    if isinstance(node, Exp):
        c = _scalar_of(to_diffop(node.scalar, ctx))
        return apply_exp(c, to_diffop(node.op, ctx), f, "exact", max_terms=max_terms)
    if isinstance(node, BinOp):
        if node.op == "*":
            return _apply_exact(node.left, _apply_exact(node.right, f, ctx, max_terms), ctx, max_terms)
        a = _apply_exact(node.left, f, ctx, max_terms)
        b = _apply_exact(node.right, f, ctx, max_terms)
        return a + b if node.op == "+" else a - b
    if isinstance(node, Neg):
        return -_apply_exact(node.arg, f, ctx, max_terms)
    raise EvaluationError(f"cannot apply {render(node)}: exp(...) inside a commutator or power")


def _apply_series(node: OpAst, s: GradedSeries, ctx: OpContext, cutoff: Fraction) -> GradedSeries:
    if not _has_exp(node):
        op = to_diffop(node, ctx)
        return s.map(lambda el: apply(op, el))
    if isinstance(node, Exp):
        c = _scalar_of(to_diffop(node.scalar, ctx))
        op = to_diffop(node.op, ctx)
        if _gaussian_shift(c, op) is not None:
            return s.map(lambda el: apply_exp(c, op, el))
        return apply_exp_series(c, op, s, cutoff)
    if isinstance(node, BinOp):
        if node.op == "*":
            return _apply_series(node.left, _apply_series(node.right, s, ctx, cutoff), ctx, cutoff)
        a = _apply_series(node.left, s, ctx, cutoff)
        b = _apply_series(node.right, s, ctx, cutoff)
        return a + b if node.op == "+" else a - b
    if isinstance(node, Neg):
        return _apply_series(node.arg, s, ctx, cutoff) * -1
    raise EvaluationError(f"cannot apply {render(node)}: exp(...) inside a commutator or power")


def parse_element(text: str, ctx: OpContext) -> Element:
    """Read a function as an expression applied to the constant 1.

    ``"x1^2 + x2^2"``, ``"D^(3/2)*exp(-1/2, X2)"`` and ``"x1*x2*D^-1"`` all work.
    """
    node = parse_opdsl(text, ctx.n)
    return _apply_exact(node, Element.constant(ctx.n), ctx, 64)
