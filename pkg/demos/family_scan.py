"""
Scanning a family for uncertified levels
========================================

Every t0 = m/n with max(|m|, n) <= 10 outside the bad set S is tested at
ell = 7, ..., 37.  Levels that cannot be certified from primes up to 500 are
reported as candidates, which is not a claim that the image is small.
"""

from ellsurj.families import FamilySpec, scan_exceptional

family = FamilySpec.parse(["[0,1];[1]", "[1];[0,1]"])
report = scan_exceptional(family, 10, [7, 11, 13, 17, 19, 23, 29, 31, 37], p_max=500, threads=4)

print(report.header["note"])
print("excluded:", [(e["t0"], e["reasons"]) for e in report.excluded])
for ell, v in report.summary["per_ell"].items():
    print(f"ell = {ell:>2}: {v['candidates']} candidates, density {v['density']:.3f}")

for e in report.entries:
    flagged = [ell for ell, r in e["results"].items() if r["status"] != "Certified"]
    if flagged:
        print(f"t0 = {e['t0']}: not certified at ell in {flagged}")

# A factor with a rational 7-isogeny (26b1 in short form) is always a candidate at 7.
iso = FamilySpec.parse(["[-3483,1];[121014]", "[1,1];[1]"])
entry = next(e for e in scan_exceptional(iso, 1, [7], p_max=500).entries if e["t0"] == "0")
print("26b1 at ell = 7:", entry["results"]["7"]["status"], entry["results"]["7"]["notes"][-1])
