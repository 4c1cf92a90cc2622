# The D2 Calogero model: gauge transform, Omega = exp(-O_L / 4 omega), and the T-space.
#
# Run with:  python3 notebooks/02_calogero_similarity.py

from fractions import Fraction

from pseudobosons.calogero import (
    build_model,
    gauge_operator,
    invariant_eigenstate,
    invariant_polynomial,
    similarity_chain,
    truncated_eigenstate,
)
from pseudobosons.gaussint import TSpaceVector
from pseudobosons.opalg import ad_exp, apply, commutator

m = build_model(2, omega=1, nu=Fraction(3, 2))
print(m)
print("E0 =", m.E0)
print("Psi0 =", m.psi0)

# %% the operators
print("O_E =", m.O_E)
print("O_L =", m.O_L)
print("[O_L, O_E] - 2 O_L =", commutator(m.O_L, m.O_E) - m.O_L * 2)

# gauge transform of H_D, computed as an operator
print("Psi0^-1 (H_D - E0) Psi0 =", gauge_operator(m))
print("equals omega O_E - O_L/2:", gauge_operator(m) == m.H_tilde)

# %% Omega terminates on invariants s = x1^2 + x2^2, p = x1 x2
for a, b in [(0, 1), (1, 0), (2, 0), (1, 1)]:
    state, ev, chk = invariant_eigenstate(m, a, b)
    print(f"Omega(s^{a} p^{b}) =", state, "  eigenvalue", ev, chk.status)

s = invariant_polynomial(1, 0)
print("O_L s =", apply(m.O_L, s))

# %% but not on x1^2: the series runs to ever more negative degrees
series, chk = truncated_eigenstate(m, 2, 0, cutoff=-6)
for d in series.degrees():
    print(f"  degree {d}:", series[d])
print(chk.detail)

# %% conjugating omega O_E by Omega stops after two terms
op, k = ad_exp(-1 / (4 * m.omega), m.O_L, m.O_E * m.omega)
print("Omega (omega O_E) Omega^-1 =", op, f"({k} terms)")

# %% the similarity chain on oscillator states
for coords in [TSpaceVector.basis(0, 0), TSpaceVector.basis(1, 1), TSpaceVector({(2, 0): 1, (0, 2): 1})]:
    out, checks = similarity_chain(m, coords)
    print(sorted(coords.phi_coords), "->", out, [c.status for c in checks])
