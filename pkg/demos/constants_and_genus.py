"""
Effective constants and the genus of X_0(N)
===========================================

The thresholds c(g), C(g), the isogeny-degree bounds and a small genus table.
"""

from ellsurj.bounds import (
    C_of_g,
    C_prime,
    bound_report,
    c_of_g,
    genus_X0,
    isogeny_bound_surface_genus,
    x0_invariants,
)

# c(0) from its defining formula is 15; the conservative threshold used downstream is 17.
c0 = c_of_g(0)
print(f"c(0): literal {c0.literal}, conservative {c0.conservative}")

# C(g) carries g^(3/2) exactly; non-square genera come back as surds.
for g in range(5):
    print(f"C({g}) = {C_of_g(g)}")

print("C'(0, heights 4, 1, 1) =", C_prime(0, [4, 1, 1]))
print("surface isogeny bound at g = 0:", isogeny_bound_surface_genus(0))
print(bound_report(3).row())

# Genus of X_0(N) from the index, elliptic points and cusps.
print(" N  mu nu2 nu3 cusps genus")
for N in (11, 13, 20, 37, 49, 60):
    inv = x0_invariants(N)
    print(f"{N:2d} {inv['mu']:3d} {inv['nu2']:3d} {inv['nu3']:3d} {inv['cusps']:5d} {genus_X0(N):5d}")
