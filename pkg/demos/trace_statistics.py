"""
Trace statistics over a one-parameter family
============================================

Exact counts T_p(tau_1, tau_2) for the family y^2 = x^3 + t x + 1,
y^2 = x^3 + x + t at p = 1009, ell = 5, compared with p / ell^2.
"""

import math

import numpy as np

from ellsurj.families import FamilySpec, chebotarev_count

family = FamilySpec.parse(["[0,1];[1]", "[1];[0,1]"])
tab = chebotarev_count(family, 1009, 5)

grid = np.array([[tab.counts[(a, b)] for b in range(5)] for a in range(5)])
print(grid)
print("sum =", grid.sum(), "good t0 =", tab.good_count)
print(f"prediction p/ell^2 = {tab.prediction():.2f}")
print(f"max deviation {tab.max_deviation():.2f} vs 8 sqrt(p) = {8 * math.sqrt(1009):.1f}")
