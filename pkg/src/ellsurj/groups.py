"""Finite group theory in GL_2(Z/ell) and its n-fold determinant locus.

A 2x2 matrix [[a, b], [c, d]] mod ell is encoded as the integer
``((a*ell + b)*ell + c)*ell + d``; iteration over encodings is therefore
row-major ascending, which keeps every count and closure reproducible.

Class sizes by (trace, det) follow the closed form

    #{M : tr M = tau, det M = d} = ell * (ell + legendre(tau^2 - 4d, ell)),

so the size of a product class is ``prod_i ell*(ell + e_i)`` with
``e_i = legendre(tau_i^2 - 4d, ell)``.  :func:`count_by_trace_det` computes the
counts by exhaustive enumeration; the closed form is exposed separately as
:func:`class_size_closed_form` and the tests check the two against each other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .arith import is_prime, legendre
from .errors import InvalidInput, NoWitnessFound, PreconditionFailed

DEFAULT_CAP = 10**7


def _check_ell(ell: int) -> None:
    if not is_prime(ell):
        raise InvalidInput(f"ell={ell} is not prime")


@dataclass(frozen=True, order=True)
class Mat2Mod:
    a: int
    b: int
    c: int
    d: int
    ell: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, getattr(self, name) % self.ell)

    @classmethod
    def identity(cls, ell: int) -> "Mat2Mod":
        return cls(1, 0, 0, 1, ell)

    @classmethod
    def scalar(cls, s: int, ell: int) -> "Mat2Mod":
        return cls(s, 0, 0, s, ell)

    @classmethod
    def decode(cls, code: int, ell: int) -> "Mat2Mod":
        code, d = divmod(code, ell)
        code, c = divmod(code, ell)
        a, b = divmod(code, ell)
        return cls(a, b, c, d, ell)

    def encode(self) -> int:
        e = self.ell
        return ((self.a * e + self.b) * e + self.c) * e + self.d

    @property
    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.ell

    @property
    def trace(self) -> int:
        return (self.a + self.d) % self.ell

    def __matmul__(self, o: "Mat2Mod") -> "Mat2Mod":
        return Mat2Mod(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
            self.ell,
        )

    __mul__ = __matmul__

    def scale(self, s: int) -> "Mat2Mod":
        return Mat2Mod(s * self.a, s * self.b, s * self.c, s * self.d, self.ell)

    def inverse(self) -> "Mat2Mod":
        det = self.det
        if det == 0:
            raise InvalidInput("singular matrix has no inverse")
        k = pow(det, -1, self.ell)
        return Mat2Mod(k * self.d, -k * self.b, -k * self.c, k * self.a, self.ell)

    def conj(self, f: "Mat2Mod") -> "Mat2Mod":
        """f * self * f^-1."""
        return f @ self @ f.inverse()


def gl2_elements(ell: int) -> list[Mat2Mod]:
    """All of GL_2(F_ell) in encoding order."""
    _check_ell(ell)
    r = range(ell)
    return [Mat2Mod(a, b, c, d, ell) for a, b, c, d in product(r, r, r, r) if (a * d - b * c) % ell]


def gl2_order(ell: int) -> int:
    return (ell * ell - 1) * (ell * ell - ell)


@dataclass(frozen=True, order=True)
class DetLocusElement:
    mats: tuple[Mat2Mod, ...]

    def __post_init__(self):
        mats = tuple(self.mats)
        object.__setattr__(self, "mats", mats)
        if not mats:
            raise InvalidInput("empty tuple")
        ell = mats[0].ell
        if any(m.ell != ell for m in mats):
            raise InvalidInput("matrices over different ell")
        dets = {m.det for m in mats}
        if len(dets) != 1 or 0 in dets:
            raise InvalidInput(f"determinants {sorted(dets)} are not equal and nonzero")

    @classmethod
    def of(cls, *mats: Mat2Mod) -> "DetLocusElement":
        return cls(tuple(mats))

    @property
    def ell(self) -> int:
        return self.mats[0].ell

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def det(self) -> int:
        return self.mats[0].det

    def key(self) -> tuple[int, ...]:
        return tuple(m.encode() for m in self.mats)

    def __matmul__(self, o: "DetLocusElement") -> "DetLocusElement":
        return DetLocusElement(tuple(x @ y for x, y in zip(self.mats, o.mats)))

    def inverse(self) -> "DetLocusElement":
        return DetLocusElement(tuple(m.inverse() for m in self.mats))


# --- counting -------------------------------------------------------------------

@lru_cache(maxsize=32)
def _trace_det_table(ell: int) -> np.ndarray:
    """table[tau, d] = #{M in M_2(F_ell) : tr M = tau, det M = d} by scanning all ell^4 matrices."""
    r = np.arange(ell, dtype=np.int64)
    a, b, c, d = np.meshgrid(r, r, r, r, indexing="ij")
    tr = ((a + d) % ell).ravel()
    det = ((a * d - b * c) % ell).ravel()
    table = np.bincount(tr * ell + det, minlength=ell * ell).reshape(ell, ell)
    table.setflags(write=False)
    return table


def count_by_trace_det(ell: int, tau: int, d: int) -> int:
    """#{M in GL_2(F_ell) : tr M = tau, det M = d} by exhaustive enumeration."""
    _check_ell(ell)
    if d % ell == 0:
        raise InvalidInput("determinant must be a unit")
    return int(_trace_det_table(ell)[tau % ell, d % ell])


def class_size_closed_form(ell: int, tau: int, d: int) -> int:
    """ell * (ell + legendre(tau^2 - 4d, ell)) for odd ell."""
    return ell * (ell + legendre(tau * tau - 4 * d, ell))


def det_fiber_size(ell: int, n: int) -> int:
    """|SL_2(F_ell)|^n = ell^n (ell^2 - 1)^n."""
    _check_ell(ell)
    if n < 1:
        raise InvalidInput("n must be >= 1")
    return ell**n * (ell * ell - 1) ** n


def class_count_product(ell: int, d: int, taus: Sequence[int]) -> int:
    """Number of tuples in the det = d fiber with prescribed traces."""
    out = 1
    for tau in taus:
        out *= count_by_trace_det(ell, tau, d)
    return out


def trace_det_distribution(ell: int, d: int) -> dict[int, int]:
    return {tau: count_by_trace_det(ell, tau, d) for tau in range(ell)}


# --- subgroup closure -----------------------------------------------------------

@dataclass
class SubgroupClosure:
    generators: list[DetLocusElement]
    elements: set[tuple[int, ...]] = field(repr=False)
    complete: bool
    ell: int
    n: int

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g: DetLocusElement) -> bool:
        return g.key() in self.elements

    def members(self) -> list[DetLocusElement]:
        """Elements in sorted encoding order."""
        return [
            DetLocusElement(tuple(Mat2Mod.decode(c, self.ell) for c in key))
            for key in sorted(self.elements)
        ]

    def projection(self, i: int) -> set[int]:
        return {key[i] for key in self.elements}

    def det_image(self) -> set[int]:
        return {Mat2Mod.decode(key[0], self.ell).det for key in self.elements}


def closure(generators: Sequence[DetLocusElement], cap: int = DEFAULT_CAP, ell: int | None = None, n: int | None = None) -> SubgroupClosure:
    """Subgroup generated by ``generators``, by breadth-first search from the identity.

    When more than ``cap`` elements are found the search stops and the partial
    set is returned with ``complete=False``.
    """
    gens = list(generators)
    if gens:
        ell, n = gens[0].ell, gens[0].n
        if any(g.ell != ell or g.n != n for g in gens):
            raise InvalidInput("generators must share ell and n")
    elif ell is None or n is None:
        raise InvalidInput("ell and n are required without generators")
    ident = DetLocusElement(tuple(Mat2Mod.identity(ell) for _ in range(n)))
    seen = {ident.key()}
    queue = deque([ident])
    complete = True
    while queue:
        h = queue.popleft()
        for g in gens:
            x = h @ g
            k = x.key()
            if k not in seen:
                if len(seen) >= cap:
                    complete = False
                    queue.clear()
                    break
                seen.add(k)
                queue.append(x)
    return SubgroupClosure(gens, seen, complete, ell, n)


def det_locus_order(ell: int, n: int, det_subgroup: Iterable[int] | None = None) -> int:
    """|{(M_1..M_n) : det M_i equal and in det_subgroup}|."""
    k = ell - 1 if det_subgroup is None else len(set(det_subgroup))
    return k * det_fiber_size(ell, n)


def power_subgroup(ell: int, e: int) -> frozenset[int]:
    """The subgroup of e-th powers in F_ell^*."""
    if (ell - 1) % e:
        raise InvalidInput(f"{e} does not divide ell - 1")
    return frozenset(pow(x, e, ell) for x in range(1, ell))


def cyclic_subgroup(ell: int, g: int) -> frozenset[int]:
    """<g> in F_ell^*."""
    out, x = {1}, g % ell
    while x not in out:
        out.add(x)
        x = x * g % ell
    return frozenset(out)


# --- pair lemma harness ------------------------------------------------------------

@dataclass(frozen=True)
class Full:
    order: int


@dataclass(frozen=True)
class Witness:
    """f and a sign character chi with b' = chi(h) f b f^-1 on all of H."""

    f: Mat2Mod
    chi: dict = field(compare=False, repr=False)

    def chi_value(self, h: DetLocusElement) -> int:
        return self.chi[h.key()]

    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.chi.values())


def _relation_sign(b: Mat2Mod, bp: Mat2Mod, f: Mat2Mod, finv: Mat2Mod) -> int:
    """+1 / -1 if b' = +-f b f^-1, else 0."""
    conj = f @ b @ finv
    if conj == bp:
        return 1
    if conj.scale(-1) == bp:
        return -1
    return 0


def verify_mw_instance(H: SubgroupClosure, det_subgroup: Iterable[int] | None = None):
    """Decide H = D, or find (f, chi) with b' = chi(h) f b f^-1 for every h = (b, b') in H.

    D is the fiber product of B x B' over the determinant, where B = B' is all
    of GL_2 (``det_subgroup=None``) or the matrices with determinant in
    ``det_subgroup``.  Requires ell >= 5, n = 2, a complete closure, and both
    projections of H equal to B.
    """
    ell = H.ell
    if ell < 5:
        raise PreconditionFailed("the lemma needs ell >= 5")
    if H.n != 2:
        raise PreconditionFailed("pairs only; n > 2 reduces to pairs")
    if not H.complete:
        raise PreconditionFailed("closure is incomplete")
    dets = frozenset(range(1, ell)) if det_subgroup is None else frozenset(d % ell for d in det_subgroup)
    B = {m.encode() for m in gl2_elements(ell) if m.det in dets}
    for i in (0, 1):
        if H.projection(i) != B:
            raise PreconditionFailed(f"projection {i} of H is not the full group B")
    D_order = len(dets) * det_fiber_size(ell, 1) ** 2
    if len(H) == D_order:
        return Full(D_order)
    gens = [(g.mats[0], g.mats[1]) for g in H.generators]
    members = H.members()
    for f in gl2_elements(ell):
        finv = f.inverse()
        if any(_relation_sign(b, bp, f, finv) == 0 for b, bp in gens):
            continue
        chi = {}
        for h in members:
            s = _relation_sign(h.mats[0], h.mats[1], f, finv)
            if s == 0:
                break
            chi[h.key()] = s
        else:
            return Witness(f, chi)
    raise NoWitnessFound(f"proper subgroup of order {len(H)} without an (f, chi) relation")


def check_character(H: SubgroupClosure, w: Witness, pairs: Iterable[tuple[DetLocusElement, DetLocusElement]] | None = None) -> bool:
    """chi(h1 h2) = chi(h1) chi(h2) and chi^2 = 1, on all pairs or the given ones."""
    if any(v not in (1, -1) for v in w.chi.values()):
        return False
    if pairs is None:
        members = H.members()
        pairs = product(members, members)
    return all(w.chi_value(x @ y) == w.chi_value(x) * w.chi_value(y) for x, y in pairs)


def graph_subgroup(gens: Sequence[Mat2Mod], f: Mat2Mod) -> SubgroupClosure:
    """{(b, f b f^-1)} generated from generators b of the first factor."""
    return closure([DetLocusElement.of(b, b.conj(f)) for b in gens])


def twisted_graph_subgroup(gens: Sequence[Mat2Mod], f: Mat2Mod, chi) -> SubgroupClosure:
    """{(b, chi(b) f b f^-1)} for a sign character ``chi`` of the first factor."""
    return closure([DetLocusElement.of(b, b.conj(f).scale(chi(b))) for b in gens])


def det_sign_character(ell: int):
    """b -> legendre(det b, ell), the quadratic character of GL_2 through the determinant."""
    return lambda b: legendre(b.det, ell)


def gl2_generators(ell: int) -> list[Mat2Mod]:
    """Two matrices generating GL_2(F_ell): a primitive diagonal element and a unipotent-Weyl product."""
    g = primitive_root(ell)
    return [Mat2Mod(g, 0, 0, 1, ell), Mat2Mod(-1, 1, -1, 0, ell)]


@lru_cache(maxsize=None)
def primitive_root(ell: int) -> int:
    _check_ell(ell)
    if ell == 2:
        return 1
    qs = [q for q in range(2, ell) if (ell - 1) % q == 0 and is_prime(q)]
    for g in range(2, ell):
        if all(pow(g, (ell - 1) // q, ell) != 1 for q in qs):
            return g
    raise AssertionError("unreachable")


# --- maximal subgroup families ---------------------------------------------------------

def borel(ell: int) -> list[Mat2Mod]:
    """Upper triangular matrices in GL_2(F_ell)."""
    return [m for m in gl2_elements(ell) if m.c == 0]


def split_cartan_normalizer(ell: int) -> list[Mat2Mod]:
    """Diagonal and antidiagonal invertible matrices."""
    return [m for m in gl2_elements(ell) if (m.b == 0 and m.c == 0) or (m.a == 0 and m.d == 0)]


def least_nonsquare(ell: int) -> int:
    return next(x for x in range(2, ell) if legendre(x, ell) == -1)


def nonsplit_cartan_normalizer(ell: int) -> list[Mat2Mod]:
    """The nonsplit Cartan {[[x, eps*y], [y, x]]} and its coset by diag(1, -1)."""
    eps = least_nonsquare(ell)
    cartan = [Mat2Mod(x, eps * y, y, x, ell) for x in range(ell) for y in range(ell) if x or y]
    sigma = Mat2Mod(1, 0, 0, -1, ell)
    return sorted(set(cartan) | {sigma @ m for m in cartan})


def _mul4(x, y, ell):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % ell, (a * f + b * h) % ell, (c * e + d * g) % ell, (c * f + d * h) % ell)


def _is_scalar4(x) -> bool:
    return x[1] == 0 and x[2] == 0 and x[0] == x[3]


def _proj_order4(x, ell: int) -> int:
    y, k = x, 1
    while not _is_scalar4(y):
        y = _mul4(y, x, ell)
        k += 1
    return k


def projective_order(m: Mat2Mod) -> int:
    """Order of the image of m in PGL_2(F_ell), by repeated multiplication."""
    return _proj_order4((m.a, m.b, m.c, m.d), m.ell)


def _pgl_key4(x, ell: int):
    first = next(v for v in x if v)
    s = pow(first, -1, ell)
    return tuple(s * v % ell for v in x)


def _pgl_closure(gens, ell: int, cap: int):
    ident = (1, 0, 0, 1)
    seen = {ident}
    queue = deque([ident])
    while queue:
        h = queue.popleft()
        for g in gens:
            k = _pgl_key4(_mul4(h, g, ell), ell)
            if k not in seen:
                if len(seen) >= cap:
                    return None
                seen.add(k)
                queue.append(k)
    return seen


_POLYHEDRAL = {3: 12, 4: 24, 5: 60}  # <a, b | a^2 = b^3 = (ab)^k = 1> is A4, S4, A5


def exceptional_preimages(ell: int) -> dict[int, list[Mat2Mod]]:
    """Preimages in GL_2 of projective subgroups A4, S4, A5 not containing PSL_2.

    Returned as {projective order: sorted element list}; types that do not
    occur in PGL_2(F_ell) are absent.  Each type is located through the
    presentation <a, b | a^2 = b^3 = (ab)^k = 1>, with b a fixed element of
    projective order 3 and a running over the involutions in encoding order.
    """
    _check_ell(ell)
    r = range(ell)
    reps = sorted({_pgl_key4(x, ell) for x in product(r, r, r, r) if (x[0] * x[3] - x[1] * x[2]) % ell})
    order = {x: _proj_order4(x, ell) for x in reps}
    involutions = [x for x in reps if order[x] == 2]
    b = next((x for x in reps if order[x] == 3), None)
    psl_size = det_fiber_size(ell, 1) // 2
    found: dict[int, list[Mat2Mod]] = {}
    if b is None:
        return found
    for a in involutions:
        k = _proj_order4(_mul4(a, b, ell), ell)
        size = _POLYHEDRAL.get(k)
        if size is None or size in found:
            continue
        pk = _pgl_closure([a, b], ell, cap=size + 1)
        if pk is None or len(pk) != size or size == psl_size:
            continue
        found[size] = sorted({Mat2Mod(*x, ell).scale(s) for x in pk for s in range(1, ell)})
        if len(found) == 3:
            break
    return dict(sorted(found.items()))


def d_generators(ell: int) -> list[DetLocusElement]:
    """Three fixed elements generating the full determinant fiber product D (checked at ell = 5)."""
    M = lambda a, b, c, d: Mat2Mod(a, b, c, d, ell)  # noqa: E731
    g = primitive_root(ell)
    return [
        DetLocusElement.of(M(g, 0, 0, 1), M(g, 0, 0, 1)),
        DetLocusElement.of(M(1, 1, 0, 1), M(1, 0, 1, 1)),
        DetLocusElement.of(M(0, -1, 1, 0), M(1, 1, 0, 1)),
    ]


@dataclass
class HarnessResult:
    name: str
    order: int
    passed: bool
    detail: str


def mw_harness(ell: int, include_full: bool = True) -> list[HarnessResult]:
    """Run the lemma on diagonal, conjugated-graph and twisted-graph subgroups (and D itself).

    Each proper instance must produce a witness (f, chi) with chi a sign
    character; D must come back Full.
    """
    gens = gl2_generators(ell)
    f0 = Mat2Mod(1, 1, 0, 1, ell)
    instances = [
        ("diagonal", graph_subgroup(gens, Mat2Mod.identity(ell)), False),
        ("graph", graph_subgroup(gens, f0), False),
        ("twisted_graph", twisted_graph_subgroup(gens, f0, det_sign_character(ell)), True),
    ]
    out = []
    for name, H, twisted in instances:
        try:
            w = verify_mw_instance(H)
        except (PreconditionFailed, NoWitnessFound) as exc:
            out.append(HarnessResult(name, len(H), False, str(exc)))
            continue
        ok = (
            isinstance(w, Witness)
            and len(H) < det_locus_order(ell, 2)
            and check_character(H, w, product(H.members(), H.generators))
            and w.is_trivial() != twisted
        )
        detail = f"f={(w.f.a, w.f.b, w.f.c, w.f.d)} chi={'nontrivial' if twisted else 'trivial'}" if isinstance(w, Witness) else repr(w)
        out.append(HarnessResult(name, len(H), ok, detail))
    if include_full:
        H = closure(d_generators(ell))
        res = verify_mw_instance(H)
        out.append(HarnessResult("full_D", len(H), isinstance(res, Full) and len(H) == det_locus_order(ell, 2), repr(res)))
    return out
