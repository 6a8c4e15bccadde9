"""
Certifying a maximal mod-ell image for a pair of curves
=======================================================

Frobenius samples for y^2 = x^3 + x + 1 and y^2 = x^3 - x + 1, and why a
curve paired with its own twist can never be certified.
"""

from ellsurj.curves import WeierstrassCurve, quadratic_twist, trace_samples
from ellsurj.surjectivity import certify_product, pair_witness

E1, E2 = WeierstrassCurve(1, 1), WeierstrassCurve(-1, 1)

for ell in (7, 11, 13, 17, 19):
    cert = certify_product(trace_samples([E1, E2], 1000, ell), ell)
    print(f"ell = {ell:2d}: {cert.status:<12} witnesses at {cert.witness_places()}")

# Traces of a curve and its twist agree up to sign, so tr_1^2 = tr_2^2 everywhere.
twin = quadratic_twist(E1, -1)
s = trace_samples([E1, twin], 500, 13)
print("pair witness against the twist:", pair_witness(s, 13, 0, 1))
print(certify_product(s, 13).notes)
