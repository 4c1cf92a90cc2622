# The 2-D oscillator seen from a Gaussian-weighted space.
#
# Run with:  python3 notebooks/01_oscillator_pseudobosons.py
# Everything below is exact; floats only appear in the quadrature cross-check.

from fractions import Fraction

from pseudobosons.gaussint import inner_product_pi, quad_oracle
from pseudobosons.opalg import apply, commutator
from pseudobosons.qho import PseudoBosonFamily, norm_ratios, qho_report

# %% one parameter point; beta = omega/2 is where the intertwiners are plain multipliers
fam = PseudoBosonFamily(omega=1, beta=Fraction(1, 2))
print(fam)
print("a1 =", fam.a[0])
print("b1 =", fam.b[0])

# in the weighted space b_j is not the adjoint of a_j; the weighted adjoints are new operators
print("a1* =", fam.a_star[0])
print("b1* =", fam.b_star[0])
print("[a1, b1] =", commutator(fam.a[0], fam.b[0]))

# %% the two vacua
print("phi_00 =", fam.phi00)
print("Psi_00 =", fam.psi00)  # no Gaussian at all at this point

# %% a few excited states, built by the ladder route
for idx in [(1, 0), (2, 1), (3, 3)]:
    print(f"phi{idx} =", fam.phi(*idx))
    print(f"Psi{idx} =", fam.psi(*idx))

# number operator eigenvalues
phi32 = fam.phi(3, 2)
print("N1 phi_32 / phi_32:", apply(fam.number[0], phi32) == phi32 * 3)

# %% biorthogonality, exactly
print("<Psi_21, phi_21>_pi =", inner_product_pi(fam.psi(2, 1), fam.phi(2, 1), fam.weight))
print("<Psi_21, phi_12>_pi =", inner_product_pi(fam.psi(2, 1), fam.phi(1, 2), fam.weight))

# and the same integral by Gauss-Hermite quadrature
print("quadrature:", quad_oracle(fam.psi(2, 1), fam.phi(2, 1), fam.weight))

# %% the Psi family grows: norm ratios ||Psi_nn||^2 / ||phi_nn||^2
print("norm ratios:", [str(r) for r in norm_ratios(fam, 5)])

# %% a different weight: Psi now carries a growing Gaussian factor
wide = PseudoBosonFamily(omega=1, beta=Fraction(1, 4))
print("beta = 1/4, Psi_11 =", wide.psi(1, 1))

# %% whole suite
rep = qho_report(1, Fraction(1, 2), nmax=4)
print(rep.summary)
