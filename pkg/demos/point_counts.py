"""
Counting points and Frobenius traces
====================================

Two independent ways of counting points on y^2 = x^3 + a4 x + a6 over F_p,
and what a quadratic twist does to the trace.
"""

from ellsurj.curves import WeierstrassCurve, count_points, quadratic_twist, trace_samples

# The small example y^2 = x^3 + x + 1 over F_5 has 9 points, so a_5 = -3.
E = WeierstrassCurve.over_fp(1, 1, 5)
for method in ("exhaustive", "bsgs"):
    d = count_points(E, method)
    print(f"{method:>10}: N = {d.N}, a = {d.a}")

# Twisting by a nonsquare flips the sign of the trace.
print("twist by 2:", count_points(quadratic_twist(E, 2)).a)

# A larger prime, where baby-step giant-step pays off.
p = 10007
F = WeierstrassCurve.over_fp(3, 7, p)
print(f"p = {p}: a = {count_points(F, 'bsgs').a}, Hasse bound {int(2 * p**0.5)}")

# Over Q we collect Frobenius data at good primes; bad primes are skipped.
for s in trace_samples([WeierstrassCurve(1, 1)], 40, 7):
    print(f"p = {s.place:2d}  a_p mod 7 = {s.traces[0]}  det = p mod 7 = {s.det}")
