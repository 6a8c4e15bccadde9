"""Families E_i : y^2 = x^3 + A_i(t) x + B_i(t) over Q(t) and their specializations.

Covers the bad set S, enumeration of rational parameters of bounded height,
exact trace-count tables over F_p, and the desk-scale exceptional-prime scan.

Isogeny between specializations is detected only heuristically, by agreement
of a_p^2 for all good p up to a bound (twist-insensitive necessary
condition); reasons found that way carry the ``[heuristic]`` label.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

import numpy as np

from . import __version__
from .arith import Poly, RationalFunction, is_prime, primes_between, primes_up_to
from .curves import (
    QT,
    FpT,
    WeierstrassCurve,
    TraceSample,
    format_curve_spec,
    is_isotrivial,
    parse_curve_spec,
    traces_batch,
)
from .errors import InvalidInput, InvalidLevel, UnsupportedCharacteristic
from .surjectivity import CERTIFIED, certify_product

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
THEORETICAL_UNION_THRESHOLD = 3176533
CANDIDATE = "InconclusiveCandidate"

# j-invariants of the thirteen CM elliptic curves over Q (class number one orders)
CM_J_INVARIANTS = (
    0,
    1728,
    -3375,
    8000,
    -32768,
    54000,
    287496,
    -884736,
    -12288000,
    16581375,
    -884736000,
    -147197952000,
    -262537412640768000,
)


@dataclass(frozen=True)
class FamilySpec:
    """Curves E_i : y^2 = x^3 + A_i(t) x + B_i(t) with integer polynomials A_i, B_i."""

    A: tuple[Poly, ...]
    B: tuple[Poly, ...]

    def __post_init__(self):
        A, B = tuple(self.A), tuple(self.B)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if len(A) != len(B) or len(A) < 2:
            raise InvalidInput("a family needs n >= 2 pairs (A_i, B_i)")
        for i, (a, b) in enumerate(zip(A, B)):
            if a.p or b.p or not a.is_integral() or not b.is_integral():
                raise InvalidInput(f"factor {i}: coefficients must be integer polynomials")
            if self.discriminant(i).is_zero():
                raise InvalidInput(f"factor {i}: discriminant is identically zero")
            if is_isotrivial(self.curve(i)):
                raise InvalidInput(f"factor {i} is isotrivial")

    @classmethod
    def parse(cls, specs: Sequence[str]) -> "FamilySpec":
        pairs = [parse_curve_spec(s) for s in specs]
        return cls(tuple(a for a, _ in pairs), tuple(b for _, b in pairs))

    @classmethod
    def from_lists(cls, pairs: Sequence[tuple[Sequence[int], Sequence[int]]]) -> "FamilySpec":
        return cls(tuple(Poly(a) for a, _ in pairs), tuple(Poly(b) for _, b in pairs))

    @property
    def n(self) -> int:
        return len(self.A)

    def discriminant(self, i: int) -> Poly:
        a, b = self.A[i], self.B[i]
        return -16 * (4 * a**3 + 27 * b**2)

    def curve(self, i: int) -> WeierstrassCurve:
        return WeierstrassCurve(RationalFunction(self.A[i]), RationalFunction(self.B[i]), QT)

    def specs(self) -> list[str]:
        return [format_curve_spec(a, b) for a, b in zip(self.A, self.B)]

    def coefficients_at(self, t0: Fraction) -> list[tuple[Fraction, Fraction]]:
        return [(a(t0), b(t0)) for a, b in zip(self.A, self.B)]


# --- bad set and enumeration ----------------------------------------------------

@dataclass(frozen=True)
class BadSetReason:
    t0: Fraction
    reasons: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"t0": str(self.t0), "t0_num": self.t0.numerator, "t0_den": self.t0.denominator, "reasons": list(self.reasons)}


def _disc_q(a4: Fraction, a6: Fraction) -> Fraction:
    return -16 * (4 * a4**3 + 27 * a6**2)


def _j_q(a4: Fraction, a6: Fraction) -> Fraction:
    return 1728 * 4 * a4**3 / (4 * a4**3 + 27 * a6**2)


def _residue(x: Fraction, p: int) -> int | None:
    if x.denominator % p == 0:
        return None
    return x.numerator * pow(x.denominator, -1, p) % p


def _good_at(coeffs: Sequence[tuple[Fraction, Fraction]], p: int):
    """Residues (a4, a6) per curve, or None if some curve is bad at p."""
    out = []
    for a4, a6 in coeffs:
        r4, r6 = _residue(a4, p), _residue(a6, p)
        if r4 is None or r6 is None or (4 * r4**3 + 27 * r6**2) % p == 0:
            return None
        out.append((r4, r6))
    return out


def _aps_over_q(coeffs: Sequence[tuple[Fraction, Fraction]], primes: Sequence[int]) -> dict[int, list[int]]:
    """a_p for every curve at every prime in ``primes`` where all curves are good."""
    out = {}
    for p in primes:
        res = _good_at(coeffs, p)
        if res is None:
            continue
        a = traces_batch([r[0] for r in res], [r[1] for r in res], p)
        out[p] = [int(v) for v in a]
    return out


def s_membership(family: FamilySpec, t0, isogeny_prime_bound: int = 100) -> BadSetReason | None:
    """Why ``t0`` belongs to S, or None when it is clear."""
    t0 = Fraction(t0)
    coeffs = family.coefficients_at(t0)
    reasons = []
    if any(_disc_q(a4, a6) == 0 for a4, a6 in coeffs):
        reasons.append("BadReduction")
        return BadSetReason(t0, tuple(reasons))
    for i, (a4, a6) in enumerate(coeffs):
        if _j_q(a4, a6) in CM_J_INVARIANTS:
            reasons.append(f"CMFactor({i})")
    aps = _aps_over_q(coeffs, [p for p in primes_up_to(isogeny_prime_bound) if p >= 5])
    for i, j in combinations(range(family.n), 2):
        if aps and all(v[i] ** 2 == v[j] ** 2 for v in aps.values()):
            reasons.append(f"IsogenousPair({i},{j}) [heuristic]")
    return BadSetReason(t0, tuple(reasons)) if reasons else None


def farey_points(T: int) -> list[Fraction]:
    """All m/n with gcd(m, n) = 1, n > 0 and max(|m|, n) <= T, sorted."""
    if T < 1:
        raise InvalidInput("T must be >= 1")
    pts = {Fraction(0)}
    for n in range(1, T + 1):
        for m in range(1, T + 1):
            if math.gcd(m, n) == 1:
                pts.add(Fraction(m, n))
                pts.add(Fraction(-m, n))
    return sorted(pts)


def enumerate_F(T: int, family: FamilySpec | None = None, isogeny_prime_bound: int = 100) -> list[Fraction]:
    """Parameters of height <= T outside S (no exclusions without a family)."""
    pts = farey_points(T)
    if family is None:
        return pts
    return [t for t in pts if s_membership(family, t, isogeny_prime_bound) is None]


# --- trace counts over F_p --------------------------------------------------------

@dataclass
class TraceCountTable:
    p: int
    ell: int
    n: int
    counts: dict  # tau tuple -> count, all ell^n entries
    good_count: int

    def prediction(self) -> float:
        return self.p / self.ell**self.n

    def max_deviation(self) -> float:
        pred = self.prediction()
        return max(abs(c - pred) for c in self.counts.values())

    def to_csv(self) -> str:
        head = ",".join([f"tau{i + 1}" for i in range(self.n)] + ["count"])
        rows = [",".join(map(str, k + (v,))) for k, v in sorted(self.counts.items())]
        return "\n".join([head, *rows]) + "\n"


def chebotarev_count(family: FamilySpec, p: int, ell: int, taus: Sequence[int] | None = None):
    """Exact T_p table by scanning every t0 in F_p; a single count when ``taus`` is given."""
    if not is_prime(p) or not is_prime(ell):
        raise InvalidInput("p and ell must be prime")
    if p <= 3:
        raise UnsupportedCharacteristic(f"p={p}")
    if ell == p:
        raise InvalidLevel(f"ell={ell} equals the characteristic p={p}")
    for i in range(family.n):
        c = WeierstrassCurve(
            RationalFunction(family.A[i].reduce_mod(p)), RationalFunction(family.B[i].reduce_mod(p)), FpT(p), check=False
        )
        if c.is_singular() or is_isotrivial(c):
            raise InvalidInput(f"factor {i} is singular or isotrivial mod {p}")
    ts = np.arange(p, dtype=np.int64)
    good = np.ones(p, dtype=bool)
    a4s, a6s = [], []
    for a, b in zip(family.A, family.B):
        a4, a6 = a.reduce_mod(p).eval_array(ts), b.reduce_mod(p).eval_array(ts)
        good &= (4 * (a4 * a4 % p) * a4 + 27 * (a6 * a6 % p)) % p != 0
        a4s.append(a4)
        a6s.append(a6)
    idx = np.flatnonzero(good)
    code = np.zeros(len(idx), dtype=np.int64)
    for a4, a6 in zip(a4s, a6s):
        code = code * ell + traces_batch(a4[idx], a6[idx], p) % ell
    hist = np.bincount(code, minlength=ell**family.n)
    counts = {}
    for k, tau in enumerate(product(range(ell), repeat=family.n)):
        counts[tau] = int(hist[k])
    table = TraceCountTable(p, ell, family.n, counts, int(len(idx)))
    if taus is not None:
        return table.counts[tuple(t % ell for t in taus)]
    return table


# --- scan ----------------------------------------------------------------------------

@dataclass
class ScanReport:
    config: dict
    ells: list[int]
    entries: list[dict]  # per t0: t0 fields and per-ell results
    excluded: list[dict]
    summary: dict
    header: dict = field(default_factory=dict)
    schema: int = SCHEMA_VERSION
    partial: bool = False

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "header": self.header,
            "config": self.config,
            "ells": self.ells,
            "partial": self.partial,
            "summary": self.summary,
            "excluded": self.excluded,
            "entries": self.entries,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ScanReport":
        if d.get("schema") != SCHEMA_VERSION:
            raise InvalidInput(f"unsupported report schema {d.get('schema')!r}")
        return cls(
            config=d["config"],
            ells=list(d["ells"]),
            entries=d["entries"],
            excluded=d["excluded"],
            summary=d["summary"],
            header=d["header"],
            schema=d["schema"],
            partial=d["partial"],
        )

    @classmethod
    def from_json(cls, text: str) -> "ScanReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        rows = ["t0_num,t0_den,ell,status,witness_count"]
        for e in self.entries:
            for ell in self.ells:
                r = e["results"][str(ell)]
                rows.append(f"{e['t0_num']},{e['t0_den']},{ell},{r['status']},{len(r['witness_places'])}")
        return "\n".join(rows) + "\n"

    def __eq__(self, other):
        return isinstance(other, ScanReport) and self.to_dict() == other.to_dict()


def _scan_chunk(family: FamilySpec, ts: Sequence[Fraction], ells: Sequence[int], p_max: int) -> list[dict]:
    primes = [p for p in primes_up_to(p_max) if p >= 5]
    coeffs = [family.coefficients_at(t) for t in ts]
    # a_p for every (t0, factor) at every prime, vectorized per prime
    aps: list[dict[int, list[int]]] = [{} for _ in ts]
    for p in primes:
        rows, k4, k6 = [], [], []
        for k, cs in enumerate(coeffs):
            res = _good_at(cs, p)
            if res is None:
                continue
            rows.append(k)
            k4.extend(r[0] for r in res)
            k6.extend(r[1] for r in res)
        if not rows:
            continue
        a = traces_batch(k4, k6, p).reshape(len(rows), family.n)
        for k, vals in zip(rows, a):
            aps[k][p] = [int(v) for v in vals]
    out = []
    for t, ap in zip(ts, aps):
        results = {}
        for ell in ells:
            samples = [
                TraceSample(p, tuple(v % ell for v in vals), p % ell, ell)
                for p, vals in ap.items()
                if p != ell
            ]
            cert = certify_product(samples, ell, n=family.n)
            d = cert.to_dict()
            d["status"] = CERTIFIED if cert.certified else CANDIDATE
            d["witness_places"] = cert.witness_places()
            d["witness_traces"] = {str(q): ap[q] for q in cert.witness_places()}
            d["sample_count"] = len(samples)
            results[str(ell)] = d
        out.append({"t0": str(t), "t0_num": t.numerator, "t0_den": t.denominator, "results": results})
    return out


def scan_exceptional(
    family: FamilySpec,
    T: int,
    ell_range: Sequence[int] | None = None,
    p_max: int = 1000,
    threads: int = 1,
    isogeny_prime_bound: int = 100,
) -> ScanReport:
    """Certify or flag every (t0, ell) with t0 in F(T) and ell in ``ell_range``.

    Work is split over ``threads`` workers; results are merged in canonical
    t0 order so the report does not depend on the thread count.
    """
    ells = sorted(set(ell_range if ell_range is not None else primes_between(7, 100)))
    if not ells or any(ell <= 5 or not is_prime(ell) for ell in ells):
        raise InvalidLevel(f"ell_range must consist of primes > 5, got {ells}")
    if p_max < 30:
        raise InvalidInput("p_max must be >= 30")
    if threads < 1:
        raise InvalidInput("threads must be >= 1")
    pts = farey_points(T)
    excluded, clear = [], []
    for t in pts:
        r = s_membership(family, t, isogeny_prime_bound)
        (clear if r is None else excluded).append(t if r is None else r)
    chunks = [clear[k::threads] for k in range(threads)]
    if threads == 1:
        parts = [_scan_chunk(family, clear, ells, p_max)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ch: _scan_chunk(family, ch, ells, p_max), chunks))
    entries = sorted((e for part in parts for e in part), key=lambda e: Fraction(e["t0"]))
    total = len(entries)
    per_ell = {}
    union = set()
    for ell in ells:
        cands = [e["t0"] for e in entries if e["results"][str(ell)]["status"] == CANDIDATE]
        union.update(cands)
        per_ell[str(ell)] = {"candidates": len(cands), "density": len(cands) / total if total else 0.0}
    summary = {
        "F_size": total,
        "farey_size": len(pts),
        "excluded_count": len(excluded),
        "per_ell": per_ell,
        "union_candidates": len(union),
        "union_density": len(union) / total if total else 0.0,
    }
    header = {
        "theoretical_union_threshold": THEORETICAL_UNION_THRESHOLD,
        "note": (
            f"desk-scale ell range {ells[0]}..{ells[-1]} lies far below the theoretical regime "
            f"ell >= {THEORETICAL_UNION_THRESHOLD}; densities are empirical only"
        ),
        "status_semantics": "Certified is a proof of maximal image; InconclusiveCandidate is not a claim of nonsurjectivity",
        "isogeny_detection": f"[heuristic] a_p^2 agreement for good p <= {isogeny_prime_bound}",
    }
    config = {
        "family": family.specs(),
        "T": T,
        "ell_range": ells,
        "p_max": p_max,
        "isogeny_prime_bound": isogeny_prime_bound,
        "version": __version__,
        "seed": None,
    }
    return ScanReport(config, ells, entries, [r.to_dict() for r in excluded], summary, header)
