"""Certificates that mod-ell images of products of elliptic curves are as large as possible.

A single factor is certified when the sampled Frobenius data contain three
witness classes (tr, det):

* W1: tr != 0 and tr^2 - 4 det a nonzero square;
* W2: tr != 0 and tr^2 - 4 det a nonsquare;
* W3: u = tr^2/det not in {0, 1, 2, 4} and u^2 - 3u + 1 != 0.

No Borel or split-Cartan-normalizer subgroup has a W2 element, no
nonsplit-Cartan normalizer has a W1 element, and every element of projective
order at most 5 fails W3, so samples containing all three force the image
to contain SL_2.  For ell < 17 this is backed by an exhaustive scan of those
subgroups at that ell (``small_ell_mode``).

A pair (i, j) of certified factors is certified by one place where
tr_i^2 != tr_j^2: any proper subgroup of the determinant fiber product with
surjective projections has b' = chi(h) f b f^-1 and hence equal squared
traces.  Products of n >= 3 factors need every pair certified and ell > 5.

Certification is one-sided.  ``Inconclusive`` never asserts that an image is
small.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .arith import is_prime, legendre
from .curves import TraceSample, WeierstrassCurve, function_field_samples, is_isotrivial
from .errors import InvalidInput, InvalidLevel, PreconditionFailed, UnsupportedParameters
from .groups import (
    Mat2Mod,
    borel,
    exceptional_preimages,
    gl2_elements,
    nonsplit_cartan_normalizer,
    projective_order,
    split_cartan_normalizer,
)

CERTIFIED = "Certified"
INCONCLUSIVE = "Inconclusive"
CLASSIFICATION_THRESHOLD = 17
WITNESS_CLASSES = ("W1", "W2", "W3")


def witness_classes(tr: int, det: int, ell: int) -> frozenset[str]:
    """The witness classes met by one (trace, det) pair mod ell."""
    tr, det = tr % ell, det % ell
    if det == 0:
        raise InvalidInput("determinant must be a unit")
    out = set()
    if tr:
        chi = legendre(tr * tr - 4 * det, ell)
        if chi == 1:
            out.add("W1")
        elif chi == -1:
            out.add("W2")
    u = tr * tr * pow(det, -1, ell) % ell
    if u not in (0, 1, 2, 4 % ell) and (u * u - 3 * u + 1) % ell:
        out.add("W3")
    return frozenset(out)


def classes_of_subgroup(elements: Sequence[Mat2Mod]) -> frozenset[str]:
    out: set[str] = set()
    for m in elements:
        out |= witness_classes(m.trace, m.det, m.ell)
    return frozenset(out)


@dataclass(frozen=True)
class SoundnessReport:
    ell: int
    missing: dict  # subgroup name -> sorted list of witness classes it lacks
    low_order_ok: bool

    @property
    def ok(self) -> bool:
        return self.low_order_ok and all(self.missing.values())


@lru_cache(maxsize=None)
def validate_witness_soundness(ell: int) -> SoundnessReport:
    """Exhaustive check at one ell that each maximal-subgroup family misses a witness class."""
    if ell < 5 or not is_prime(ell):
        raise InvalidLevel(f"ell={ell}: the criterion needs a prime ell >= 5")
    families = {
        "borel": borel(ell),
        "split_cartan_normalizer": split_cartan_normalizer(ell),
        "nonsplit_cartan_normalizer": nonsplit_cartan_normalizer(ell),
    }
    for size, els in exceptional_preimages(ell).items():
        families[f"exceptional_{size}"] = els
    missing = {
        name: sorted(set(WITNESS_CLASSES) - classes_of_subgroup(els)) for name, els in families.items()
    }
    low_order_ok = all(
        "W3" not in witness_classes(m.trace, m.det, ell)
        for m in gl2_elements(ell)
        if projective_order(m) <= 5
    )
    return SoundnessReport(ell, missing, low_order_ok)


def _sorted_samples(samples: Sequence[TraceSample]) -> list[TraceSample]:
    return sorted(samples, key=lambda s: (s.place, s.traces, s.det))


@dataclass(frozen=True)
class SingleCertificate:
    ell: int
    factor: int
    status: str
    witnesses: dict  # class name -> witnessing place, or None
    small_ell_mode: bool = False

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def missing(self) -> list[str]:
        return [k for k in WITNESS_CLASSES if self.witnesses.get(k) is None]


def certify_single(samples: Sequence[TraceSample], ell: int, factor: int = 0, small_ell: bool = True) -> SingleCertificate:
    """W1-W3 witness search for one factor.

    For ell < 17 the criterion is used only after :func:`validate_witness_soundness`
    passes at that ell, and the certificate is marked ``small_ell_mode``; with
    ``small_ell=False`` such levels raise InvalidLevel.
    """
    if not is_prime(ell):
        raise InvalidLevel(f"ell={ell} is not prime")
    small = ell < CLASSIFICATION_THRESHOLD
    if small:
        if not small_ell:
            raise InvalidLevel(f"ell={ell} < {CLASSIFICATION_THRESHOLD} needs small-ell mode")
        if not validate_witness_soundness(ell).ok:
            raise InvalidLevel(f"witness criterion not validated at ell={ell}")
    found: dict[str, int | None] = {k: None for k in WITNESS_CLASSES}
    for s in _sorted_samples(samples):
        if s.det % ell == 0:
            raise InvalidInput(f"sample at {s.place} has determinant 0 mod {ell}")
        for k in witness_classes(s.traces[factor], s.det, ell):
            if found[k] is None:
                found[k] = s.place
        if all(v is not None for v in found.values()):
            break
    status = CERTIFIED if all(v is not None for v in found.values()) else INCONCLUSIVE
    return SingleCertificate(ell, factor, status, found, small)


def pair_witness(samples: Sequence[TraceSample], ell: int, i: int, j: int) -> int | None:
    """First place (in sorted order) with tr_i^2 != tr_j^2 mod ell."""
    for s in _sorted_samples(samples):
        if (s.traces[i] ** 2 - s.traces[j] ** 2) % ell:
            return s.place
    return None


@dataclass(frozen=True)
class PairCertificate:
    ell: int
    pair: tuple[int, int]
    status: str
    witness: int | None


def certify_pair(samples: Sequence[TraceSample], ell: int, i: int = 0, j: int = 1, singles: dict | None = None) -> PairCertificate:
    """Certify the pair (i, j) once both single factors are certified."""
    singles = dict(singles or {})
    for k in (i, j):
        if k not in singles:
            singles[k] = certify_single(samples, ell, k)
        if not singles[k].certified:
            raise PreconditionFailed(f"factor {k} is not certified at ell={ell}")
    w = pair_witness(samples, ell, i, j)
    return PairCertificate(ell, (i, j), CERTIFIED if w is not None else INCONCLUSIVE, w)


@dataclass(frozen=True)
class SurjectivityCertificate:
    ell: int
    n: int
    status: str
    singles: tuple[SingleCertificate, ...]
    pairs: dict  # (i, j) -> witnessing place or None
    geometric: bool = False
    notes: tuple[str, ...] = ()

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def small_ell_mode(self) -> bool:
        return any(s.small_ell_mode for s in self.singles)

    def missing_pairs(self) -> list[tuple[int, int]]:
        return [k for k, v in self.pairs.items() if v is None]

    def witness_places(self) -> list[int]:
        out = set()
        for s in self.singles:
            out |= {v for v in s.witnesses.values() if v is not None}
        out |= {v for v in self.pairs.values() if v is not None}
        return sorted(out)

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "n": self.n,
            "status": self.status,
            "geometric": self.geometric,
            "small_ell_mode": self.small_ell_mode,
            "singles": [
                {"factor": s.factor, "status": s.status, "witnesses": dict(s.witnesses)}
                for s in self.singles
            ],
            "pairs": [
                {"pair": list(k), "witness": v} for k, v in sorted(self.pairs.items())
            ],
            "notes": list(self.notes),
        }


def certify_product(samples: Sequence[TraceSample], ell: int, n: int | None = None, geometric: bool = False) -> SurjectivityCertificate:
    """All singles and all pairs; over F_p(t) (``geometric``) only Psi_ell is claimed."""
    if ell <= 5 or not is_prime(ell):
        raise InvalidLevel(f"ell={ell}: products need a prime ell > 5")
    if n is None:
        if not samples:
            raise InvalidInput("n is required when there are no samples")
        n = samples[0].n
    if n < 1 or any(s.n != n for s in samples):
        raise InvalidInput("every sample must carry n traces")
    singles = tuple(certify_single(samples, ell, i) for i in range(n))
    pairs: dict[tuple[int, int], int | None] = {}
    for i, j in combinations(range(n), 2):
        if singles[i].certified and singles[j].certified:
            pairs[(i, j)] = pair_witness(samples, ell, i, j)
        else:
            pairs[(i, j)] = None
    ok = all(s.certified for s in singles) and all(v is not None for v in pairs.values())
    notes = []
    if geometric:
        notes.append("function-field mode: degree-1 places only; certifies the geometric image Psi_ell")
    else:
        notes.append("over Q the determinant is the surjective cyclotomic character")
    if any(s.small_ell_mode for s in singles):
        notes.append(f"small-ell mode: witness criterion validated by exhaustive scan at ell={ell}")
    missing = [f"factor {s.factor}: {','.join(s.missing)}" for s in singles if not s.certified]
    missing += [f"pair {k}" for k, v in pairs.items() if v is None]
    if missing:
        notes.append("missing " + "; ".join(missing))
    return SurjectivityCertificate(ell, n, CERTIFIED if ok else INCONCLUSIVE, singles, pairs, geometric, tuple(notes))


def brute_force_image(curve: WeierstrassCurve, ell: int) -> Counter:
    """Multiset of (tr, det) mod ell over all good degree-1 places of a curve over F_p(t).

    A statistical stand-in for the image, for ell in {5, 7} and p <= 50.
    """
    p = curve.base.p
    if not curve.base.function_field or not p:
        raise UnsupportedParameters("brute_force_image needs a curve over F_p(t)")
    if ell not in (5, 7) or p > 50 or p == ell:
        raise UnsupportedParameters(f"ell={ell}, p={p} outside ell in {{5,7}}, p <= 50")
    if is_isotrivial(curve):
        raise PreconditionFailed("isotrivial curves are excluded")
    return Counter((s.traces[0], s.det) for s in function_field_samples([curve], ell))
