"""Short Weierstrass curves y^2 = x^3 + a4*x + a6 and their Frobenius traces.

Four coefficient domains are supported: Q, F_p, Q(t) and F_p(t).  Curves over
the function fields hold :class:`~ellsurj.arith.RationalFunction`
coefficients.  Everything here assumes characteristic > 3.

Good reduction of an integral model at p is taken to mean p does not divide
the discriminant.  Non-minimal models may therefore report extra bad primes;
that only shrinks a trace sample, it never corrupts one.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import (
    Poly,
    PrimeFieldElement,
    RationalFunction,
    _to_residue,
    as_rational_function,
    is_prime,
    legendre,
    legendre_table,
    primes_up_to,
    sqrt_mod,
)
from .errors import (
    BadReduction,
    InvalidInput,
    PoleAtPoint,
    SingularCurve,
    UnsupportedCharacteristic,
)

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 1 << 16


@dataclass(frozen=True)
class Base:
    """Coefficient domain tag: ``p == 0`` for characteristic zero."""

    p: int = 0
    function_field: bool = False

    @property
    def name(self) -> str:
        k = f"F_{self.p}" if self.p else "Q"
        return f"{k}(t)" if self.function_field else k

    def __post_init__(self):
        if self.p and not is_prime(self.p):
            raise InvalidInput(f"{self.p} is not prime")


Q = Base()
QT = Base(0, True)


def Fp(p: int) -> Base:
    return Base(p)


def FpT(p: int) -> Base:
    return Base(p, True)


def _coerce_coeff(c, base: Base):
    if base.function_field:
        return as_rational_function(c, base.p)
    if base.p:
        return _to_residue(c, base.p)
    if isinstance(c, RationalFunction):
        c = c.constant_value()
    return Fraction(c)


def _disc(a4, a6):
    return -16 * (4 * a4 * a4 * a4 + 27 * a6 * a6)


@dataclass(frozen=True, eq=True)
class WeierstrassCurve:
    """y^2 = x^3 + a4*x + a6 over ``base``.

    Construction rejects singular models unless ``check=False`` (needed only to
    talk about the discriminant of a degenerate equation).
    """

    a4: object
    a6: object
    base: Base = Q

    def __init__(self, a4, a6, base: Base = Q, check: bool = True):
        if base.p in (2, 3):
            raise UnsupportedCharacteristic(f"characteristic {base.p} is not supported")
        object.__setattr__(self, "a4", _coerce_coeff(a4, base))
        object.__setattr__(self, "a6", _coerce_coeff(a6, base))
        object.__setattr__(self, "base", base)
        if check and self.is_singular():
            raise SingularCurve(f"discriminant of {self} vanishes")

    @classmethod
    def over_q(cls, a4, a6) -> "WeierstrassCurve":
        return cls(a4, a6, Q)

    @classmethod
    def over_fp(cls, a4, a6, p: int) -> "WeierstrassCurve":
        return cls(a4, a6, Fp(p))

    @classmethod
    def over_qt(cls, a4, a6) -> "WeierstrassCurve":
        return cls(a4, a6, QT)

    @classmethod
    def over_fpt(cls, a4, a6, p: int) -> "WeierstrassCurve":
        return cls(a4, a6, FpT(p))

    @property
    def p(self) -> int:
        return self.base.p

    def is_singular(self) -> bool:
        d = discriminant(self)
        if self.base.p and not self.base.function_field:
            return d % self.base.p == 0
        return d == 0

    def reduce_mod(self, p: int) -> "WeierstrassCurve":
        """Reduction of a characteristic-zero curve modulo ``p``.

        Raises BadReduction when p divides a coefficient denominator or the
        discriminant.
        """
        if self.base.p:
            raise InvalidInput("curve is already in positive characteristic")
        try:
            if self.base.function_field:
                out = WeierstrassCurve(self.a4.reduce_mod(p), self.a6.reduce_mod(p), FpT(p), check=False)
            else:
                out = WeierstrassCurve(self.a4, self.a6, Fp(p), check=False)
        except ZeroDivisionError as exc:
            raise BadReduction(f"{p} divides a coefficient denominator") from exc
        if out.is_singular():
            raise BadReduction(f"{self} has bad reduction at {p}")
        return out

    def __str__(self):
        def fmt(c):
            if isinstance(c, RationalFunction):
                return repr(c)
            return str(c)

        return f"y^2 = x^3 + ({fmt(self.a4)})x + ({fmt(self.a6)}) over {self.base.name}"


def discriminant(c: WeierstrassCurve):
    """-16(4 a4^3 + 27 a6^2), returned even when it vanishes."""
    d = _disc(c.a4, c.a6)
    if c.base.p and not c.base.function_field:
        return d % c.base.p
    return d


def j_invariant(c: WeierstrassCurve):
    """1728 * 4 a4^3 / (4 a4^3 + 27 a6^2)."""
    if c.is_singular():
        raise SingularCurve(f"j-invariant of singular {c}")
    num = 1728 * 4 * c.a4 * c.a4 * c.a4
    den = 4 * c.a4 * c.a4 * c.a4 + 27 * c.a6 * c.a6
    if c.base.function_field:
        return num / den
    if c.base.p:
        return num * pow(den, -1, c.base.p) % c.base.p
    return Fraction(num) / den


def is_isotrivial(c: WeierstrassCurve) -> bool:
    if not c.base.function_field:
        raise InvalidInput("isotriviality is only defined over a function field")
    return j_invariant(c).is_constant()


def specialize(c: WeierstrassCurve, t0) -> WeierstrassCurve:
    """Evaluate the coefficients of a curve over F(t) at ``t0`` in F."""
    if not c.base.function_field:
        raise InvalidInput("specialize needs a curve over a function field")
    if isinstance(t0, PrimeFieldElement):
        t0 = t0.residue
    try:
        a4, a6 = c.a4(t0), c.a6(t0)
    except PoleAtPoint:
        raise
    base = Fp(c.base.p) if c.base.p else Q
    out = WeierstrassCurve(a4, a6, base, check=False)
    if out.is_singular():
        raise BadReduction(f"discriminant vanishes at t0={t0}")
    return out


def quadratic_twist(c: WeierstrassCurve, d) -> WeierstrassCurve:
    """Twist y^2 = x^3 + d^2 a4 x + d^3 a6 by a nonzero constant d."""
    p = c.base.p
    d = _to_residue(d, p) if p else Fraction(d)
    if d == 0:
        raise InvalidInput("twisting parameter must be nonzero")
    return WeierstrassCurve(d * d * c.a4, d * d * d * c.a6, c.base)


@dataclass(frozen=True)
class FrobeniusDatum:
    p: int
    a: int
    N: int
    place: object = None

    def __post_init__(self):
        if self.N != self.p + 1 - self.a:
            raise ValueError("N != p + 1 - a")
        if self.a * self.a > 4 * self.p:
            raise ValueError(f"Hasse bound violated: a={self.a}, p={self.p}")


def _check_counting(c: WeierstrassCurve) -> int:
    p = c.base.p
    if not p or c.base.function_field:
        raise InvalidInput("point counting needs a curve over F_p")
    if p <= 3:
        raise UnsupportedCharacteristic(f"p={p}")
    if c.is_singular():
        raise SingularCurve(str(c))
    return p


def traces_batch(a4s: Sequence[int] | np.ndarray, a6s: Sequence[int] | np.ndarray, p: int) -> np.ndarray:
    """Frobenius traces a_p for many curves over one prime field at once.

    a_p = -sum_x legendre(x^3 + a4 x + a6, p).  Inputs are residues; the caller
    is responsible for excluding singular pairs.
    """
    a4 = np.asarray(a4s, dtype=np.int64) % p
    a6 = np.asarray(a6s, dtype=np.int64) % p
    chi = legendre_table(p)
    xs = np.arange(p, dtype=np.int64)
    cube = xs * xs % p * xs % p
    out = np.empty(len(a4), dtype=np.int64)
    rows = max(1, (1 << 22) // p)
    for s in range(0, len(a4), rows):
        rhs = (cube[None, :] + a4[s : s + rows, None] * xs[None, :] + a6[s : s + rows, None]) % p
        out[s : s + rows] = -chi[rhs].sum(axis=1)
    return out


def _count_exhaustive(c: WeierstrassCurve) -> int:
    p = c.base.p
    return int(traces_batch([c.a4], [c.a6], p)[0])


# --- baby-step giant-step -------------------------------------------------

def _ec_add(P, R, a4: int, p: int):
    if P is None:
        return R
    if R is None:
        return P
    x1, y1 = P
    x2, y2 = R
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a4) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _ec_neg(P, p: int):
    return None if P is None else (P[0], -P[1] % p)


def _ec_mul(k: int, P, a4: int, p: int):
    if k < 0:
        return _ec_mul(-k, _ec_neg(P, p), a4, p)
    acc = None
    while k:
        if k & 1:
            acc = _ec_add(acc, P, a4, p)
        P = _ec_add(P, P, a4, p)
        k >>= 1
    return acc


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def _point_order(P, a4: int, p: int, lo: int, hi: int) -> int | None:
    """Exact order of P, given that some multiple of it lies in [lo, hi]."""
    width = hi - lo
    m = math.isqrt(width) + 1
    baby = {}
    R = None
    for j in range(m):
        baby.setdefault(R, j)
        R = _ec_add(R, P, a4, p)
    step = _ec_neg(_ec_mul(m, P, a4, p), p)
    G = _ec_neg(_ec_mul(lo, P, a4, p), p)  # looking for k with kP = -lo*P
    multiple = None
    for i in range(m + 1):
        j = baby.get(G)
        if j is not None:
            multiple = lo + i * m + j
            break
        G = _ec_add(G, step, a4, p)
    if multiple is None:
        return None
    order = multiple
    for q in _prime_factors(multiple):
        while order % q == 0 and _ec_mul(order // q, P, a4, p) is None:
            order //= q
    return order


def _count_bsgs(c: WeierstrassCurve, max_points: int = 20) -> int | None:
    """a_p by baby-step giant-step; None when the Hasse interval stays ambiguous."""
    p, a4, a6 = c.base.p, c.a4, c.a6
    r = math.isqrt(4 * p)
    lo, hi = p + 1 - r, p + 1 + r
    L, tried, x = 1, 0, 0
    while tried < max_points and x < p:
        rhs = (x * x * x + a4 * x + a6) % p
        x += 1
        if legendre(rhs, p) < 0:
            continue
        P = (x - 1, sqrt_mod(rhs, p))
        tried += 1
        order = _point_order(P, a4, p, lo, hi)
        if order is None:
            return None
        L = L * order // math.gcd(L, order)
        first = -(-lo // L) * L
        if first + L > hi and first <= hi:
            return p + 1 - first
    return None


def count_points(c: WeierstrassCurve, method: str = "auto") -> FrobeniusDatum:
    """Number of F_p-points and Frobenius trace of a curve over F_p.

    ``method`` is ``"exhaustive"``, ``"bsgs"`` or ``"auto"`` (exhaustive up to
    2**16).  An ambiguous baby-step giant-step run falls back to the exhaustive
    scan.
    """
    p = _check_counting(c)
    if method not in ("auto", "exhaustive", "bsgs"):
        raise ValueError(f"unknown method {method!r}")
    a = None
    if method == "bsgs" or (method == "auto" and p > EXHAUSTIVE_LIMIT):
        a = _count_bsgs(c)
    if a is None:
        a = _count_exhaustive(c)
    return FrobeniusDatum(p=p, a=a, N=p + 1 - a)


# --- trace samples ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class TraceSample:
    """Frobenius data at one place: per-factor traces and the determinant, mod ell.

    ``place`` is a prime p for curves over Q and a residue t0 in F_p for
    curves over F_p(t).
    """

    place: int
    traces: tuple[int, ...]
    det: int
    ell: int = 0

    @property
    def n(self) -> int:
        return len(self.traces)

    def project(self, i: int) -> tuple[int, int]:
        return self.traces[i], self.det


def _good_residues(curves: Sequence[WeierstrassCurve], p: int):
    """(a4 residues, a6 residues) mod p, or None when p is bad for some curve."""
    out4, out6 = [], []
    for c in curves:
        try:
            r = c.reduce_mod(p)
        except BadReduction:
            return None
        out4.append(r.a4)
        out6.append(r.a6)
    return out4, out6


def trace_samples(curves: Sequence[WeierstrassCurve], p_max: int, ell: int) -> list[TraceSample]:
    """Trace samples at every prime 5 <= p <= p_max of good reduction, p != ell."""
    if not is_prime(ell):
        raise InvalidInput(f"ell={ell} is not prime")
    for c in curves:
        if c.base != Q:
            raise InvalidInput("trace_samples expects curves over Q")
    out = []
    for p in primes_up_to(p_max):
        if p < 5 or p == ell:
            continue
        res = _good_residues(curves, p)
        if res is None:
            log.debug("skipping bad prime p=%d", p)
            continue
        a = traces_batch(res[0], res[1], p)
        out.append(TraceSample(p, tuple(int(v) % ell for v in a), p % ell, ell))
    return out


def function_field_samples(curves: Sequence[WeierstrassCurve], ell: int) -> list[TraceSample]:
    """Trace samples at all degree-1 places t0 in F_p of good reduction for every curve."""
    if not curves:
        return []
    p = curves[0].base.p
    if any(c.base != FpT(p) for c in curves):
        raise InvalidInput("function_field_samples expects curves over one F_p(t)")
    if ell == p:
        raise InvalidInput("ell must differ from the characteristic")
    ts = np.arange(p, dtype=np.int64)
    good = np.ones(p, dtype=bool)
    a4s, a6s = [], []
    for c in curves:
        v4, d4 = c.a4.num.eval_array(ts), c.a4.den.eval_array(ts)
        v6, d6 = c.a6.num.eval_array(ts), c.a6.den.eval_array(ts)
        good &= (d4 != 0) & (d6 != 0)
        a4 = v4 * np.array([pow(int(d), -1, p) if d else 0 for d in d4]) % p
        a6 = v6 * np.array([pow(int(d), -1, p) if d else 0 for d in d6]) % p
        disc = (4 * (a4 * a4 % p) * a4 + 27 * (a6 * a6 % p)) % p
        good &= disc != 0
        a4s.append(a4)
        a6s.append(a6)
    idx = np.flatnonzero(good)
    traces = [traces_batch(a4[idx], a6[idx], p) for a4, a6 in zip(a4s, a6s)]
    det = p % ell
    return [
        TraceSample(int(t0), tuple(int(tr[k]) % ell for tr in traces), det, ell)
        for k, t0 in enumerate(idx)
    ]


# --- input format -----------------------------------------------------------

_CURVE_RE = re.compile(r"^\s*\[([^\]]*)\]\s*;\s*\[([^\]]*)\]\s*$")


def _int_list(s: str) -> list[int]:
    s = s.strip()
    return [int(v) for v in s.split(",")] if s else []


def parse_curve_spec(text: str) -> tuple[Poly, Poly]:
    """Parse ``[A-coeffs];[B-coeffs]`` into integer polynomials over Q."""
    m = _CURVE_RE.match(text)
    if not m:
        raise InvalidInput(
            f"cannot parse curve {text!r}; expected short Weierstrass '[A-coeffs];[B-coeffs]'"
        )
    try:
        return Poly(_int_list(m.group(1))), Poly(_int_list(m.group(2)))
    except ValueError as exc:
        raise InvalidInput(f"non-integer coefficient in {text!r}") from exc


def parse_curve(text: str, p: int = 0) -> WeierstrassCurve:
    """Curve from the text format; single-entry lists give a constant curve.

    With ``p`` nonzero the curve lives over F_p or F_p(t).
    """
    A, B = parse_curve_spec(text)
    constant = A.degree <= 0 and B.degree <= 0 and text.count(",") == 0
    if constant:
        a4 = A.coeffs[0] if A.coeffs else 0
        a6 = B.coeffs[0] if B.coeffs else 0
        return WeierstrassCurve(a4, a6, Fp(p) if p else Q)
    if p:
        return WeierstrassCurve(RationalFunction(A.reduce_mod(p)), RationalFunction(B.reduce_mod(p)), FpT(p))
    return WeierstrassCurve(RationalFunction(A), RationalFunction(B), QT)


def format_curve_spec(A: Poly, B: Poly) -> str:
    return f"[{','.join(map(str, A.to_list() or [0]))}];[{','.join(map(str, B.to_list() or [0]))}]"
