# The operator expression language used by the command line.
#
# Run with:  python3 notebooks/03_operator_dsl.py

from fractions import Fraction

from pseudobosons.opdsl import OpContext, apply_ast, parse_element, parse_opdsl, render, to_diffop

ctx = OpContext(n=2, omega=1, nu=Fraction(3, 2))

for text in ["omega*OE - 1/2*OL", "comm(LAP, X2)", "comm(OL, OE) - 2*OL", "x1*d2 - x2*d1"]:
    ast = parse_opdsl(text)
    print(f"{text!r:28} -> {to_diffop(ast, ctx)}")

# rendering uses as few brackets as possible
print(render(parse_opdsl("((x1 + x2))*((d1))^2")))

# functions are expressions applied to 1
psi0 = parse_element("D^(3/2)*exp(-1/2, X2)", ctx)
print("Psi0 =", psi0)

# exp(...) is applied, never expanded into an operator
omega_s = apply_ast(parse_opdsl("exp(-1/4, OL)"), parse_element("x1^2 + x2^2", ctx), ctx)
print("Omega s =", omega_s)
series = apply_ast(parse_opdsl("exp(-1/4, OL)"), parse_element("x1^2", ctx), ctx, "truncated", -4)
print("Omega x1^2 =", series)

# a malformed expression reports where it went wrong
try:
    parse_opdsl("x1*(")
except ValueError as exc:
    print(exc)
