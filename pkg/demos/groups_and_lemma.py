"""
Matrix groups mod ell and the pair lemma
========================================

Class counts in GL_2(F_ell), the determinant fiber product D, and the
subgroup lemma on graph-type subgroups.
"""

from ellsurj.groups import (
    Mat2Mod,
    class_size_closed_form,
    count_by_trace_det,
    det_fiber_size,
    gl2_generators,
    mw_harness,
    twisted_graph_subgroup,
    det_sign_character,
    verify_mw_instance,
)
from ellsurj.surjectivity import validate_witness_soundness

# Matrices with a given trace and determinant: ell (ell + legendre(tau^2 - 4 d)).
ell = 7
for tau in range(ell):
    print(f"tau = {tau}: scan {count_by_trace_det(ell, tau, 3)}, closed form {class_size_closed_form(ell, tau, 3)}")
print("det fiber, n = 2:", det_fiber_size(ell, 2))

# A twisted graph {(b, chi(b) f b f^-1)} is a proper subgroup with full projections.
H = twisted_graph_subgroup(gl2_generators(5), Mat2Mod(1, 1, 0, 1, 5), det_sign_character(5))
w = verify_mw_instance(H)
print(f"|H| = {len(H)}, witness f = {w.f}, chi trivial: {w.is_trivial()}")

# The whole harness, including a 3-generator closure of D at ell = 5.
for r in mw_harness(5):
    print(f"{r.name:>14}: order {r.order:6d}  {'PASS' if r.passed else 'FAIL'}")

# At small ell the witness criterion is checked against every maximal-subgroup type.
rep = validate_witness_soundness(11)
for name, missing in rep.missing.items():
    print(f"{name:>28} lacks {missing}")
