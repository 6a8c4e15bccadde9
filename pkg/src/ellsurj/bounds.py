"""Closed-form constants, heights, isogeny-degree bounds and degree calculus.

Function-field heights are measured in degree units, so h(t) = 1 and the
modular height of a curve over k(t) is the degree of its j-invariant.  Heights
over Q are natural logarithms, carried exactly as ``log(M)`` for an integer M.

Quantities involving a 3/2 power are represented by :class:`Surd`, an exact
number ``coeff * sqrt(radicand)`` compared by squaring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from itertools import combinations
from typing import Sequence, Union

from .arith import RationalFunction, is_prime, legendre, primes_up_to
from .curves import WeierstrassCurve, j_invariant
from .errors import InvalidInput, TooFewFactors

EFFECTIVE_CONSTANT = 3176523
C0_FLOOR = 17


@total_ordering
@dataclass(frozen=True)
class Surd:
    """The nonnegative real number ``coeff * sqrt(radicand)``.

    ``radicand`` is kept squarefree so that equal values have equal
    representations.
    """

    coeff: Fraction
    radicand: int = 1

    def __post_init__(self):
        c, r = Fraction(self.coeff), int(self.radicand)
        if c < 0 or r < 0:
            raise ValueError("Surd represents a nonnegative real")
        if c == 0 or r == 0:
            c, r = Fraction(0), 1
        else:
            k = 2
            while k * k <= r:
                while r % (k * k) == 0:
                    r //= k * k
                    c *= k
                k += 1
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "radicand", r)

    @classmethod
    def of(cls, x) -> "Surd":
        if isinstance(x, Surd):
            return x
        x = Fraction(x)
        return cls(x, 1)

    @classmethod
    def power_three_halves(cls, x) -> "Surd":
        """x^(3/2) for a nonnegative rational x."""
        x = Fraction(x)
        if x < 0:
            raise ValueError("negative base")
        # x^(3/2) = x * sqrt(num/den) = (x/den) * sqrt(num*den)
        return cls(x / x.denominator, x.numerator * x.denominator)

    def _square(self) -> Fraction:
        return self.coeff * self.coeff * self.radicand

    def is_rational(self) -> bool:
        return self.radicand == 1

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Surd)):
            return self._square() == Surd.of(other)._square()
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, (int, Fraction, Surd)):
            return self._square() < Surd.of(other)._square()
        return NotImplemented

    def __hash__(self):
        return hash(self._square())

    def __mul__(self, k):
        if isinstance(k, (int, Fraction)):
            return Surd(self.coeff * k, self.radicand)
        return NotImplemented

    __rmul__ = __mul__

    def __float__(self):
        return float(self.coeff) * math.sqrt(self.radicand)

    def __int__(self):
        return math.isqrt(math.floor(self._square()))

    def to_json(self):
        if self.is_rational():
            c = self.coeff
            return int(c) if c.denominator == 1 else str(c)
        return {"coeff": str(self.coeff), "sqrt": self.radicand, "approx": float(self)}

    def __str__(self):
        if self.is_rational():
            return str(self.coeff)
        return f"{self.coeff}*sqrt({self.radicand})"

    def __repr__(self):
        if self.is_rational():
            return f"Surd({self.coeff})"
        return f"Surd({self.coeff}*sqrt({self.radicand}))"


def _exact(v):
    """Collapse a rational Surd to int/Fraction."""
    if isinstance(v, Surd) and v.is_rational():
        c = v.coeff
        return int(c) if c.denominator == 1 else c
    return v


# --- threshold constants ---------------------------------------------------------

def e2(q: int) -> int:
    return 1 if q % 4 == 1 else -1


def e3(q: int) -> int:
    return 1 if q % 3 == 1 else -1


@dataclass(frozen=True)
class CValue:
    """c(g): the value of the defining formula and the conservative threshold used downstream."""

    g: int
    literal: int
    conservative: int


def c_of_g(g: int) -> CValue:
    """2 + max{q prime : (q - (6 + 3 e2(q) + 4 e3(q)))/12 <= g}.

    The inequality forces q <= 12g + 13, so the search is finite.  The
    conservative threshold is ``max(literal, 17)``: the formula gives 15 at
    g = 0, below the genus-0 threshold 17 used by the product bound.
    """
    if g < 0:
        raise InvalidInput("genus must be nonnegative")
    best = max(
        q for q in primes_up_to(12 * g + 14) if q - (6 + 3 * e2(q) + 4 * e3(q)) <= 12 * g
    )
    literal = 2 + best
    return CValue(g, literal, max(literal, C0_FLOOR))


def C_of_g(g: int):
    """3176523 * max(1, g^(3/2)); int when g is a perfect square, else a Surd."""
    if g < 0:
        raise InvalidInput("genus must be nonnegative")
    if g <= 1:
        return EFFECTIVE_CONSTANT
    return _exact(EFFECTIVE_CONSTANT * Surd.power_three_halves(g))


def C_tilde(g: int, n: int):
    """c(g) (conservative) for a single curve, C(g) for a product of n >= 2 curves."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    return c_of_g(g).conservative if n == 1 else C_of_g(g)


@dataclass(frozen=True)
class HeightValue:
    """A Weil height.

    ``kind == "degree"``: exact rational ``value`` in degree units (function fields).
    ``kind == "log"``: the real number log(``value``) for a positive integer value (over Q).
    """

    value: Fraction | int
    kind: str = "degree"

    def __post_init__(self):
        if self.kind not in ("degree", "log"):
            raise ValueError(self.kind)
        if self.kind == "log" and (int(self.value) != self.value or self.value < 1):
            raise ValueError("log heights store a positive integer argument")
        if self.kind == "degree" and self.value < 0:
            raise ValueError("heights are nonnegative")

    def __float__(self):
        return math.log(self.value) if self.kind == "log" else float(self.value)

    def __eq__(self, other):
        if isinstance(other, HeightValue):
            return self.kind == other.kind and self.value == other.value
        if self.kind == "degree" and isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.kind, self.value))

    def exact(self) -> Fraction:
        if self.kind != "degree":
            raise TypeError("log heights have no exact rational value")
        return Fraction(self.value)


Height = Union[HeightValue, int, Fraction]


def _height_rational(h: Height) -> Fraction:
    return h.exact() if isinstance(h, HeightValue) else Fraction(h)


def C_prime(g: int, hmods: Sequence[Height]):
    """max{c(g), 27 * (max_{i<j} h_i h_j)^(3/2)} for degree-unit modular heights."""
    if len(hmods) < 2:
        raise TooFewFactors("C' needs at least two factors")
    hs = [_height_rational(h) for h in hmods]
    top = max(a * b for a, b in combinations(hs, 2))
    c = c_of_g(g).conservative
    second = 27 * Surd.power_three_halves(top)
    return _exact(max(Surd.of(c), second))


def weil_height_Q(x) -> HeightValue:
    """log max(|m|, n) for x = m/n, carried as its integer argument."""
    x = Fraction(x)
    return HeightValue(max(abs(x.numerator), x.denominator), "log")


def weil_height_fft(f: RationalFunction) -> HeightValue:
    """max(deg num, deg den) of a reduced rational function."""
    if not isinstance(f, RationalFunction):
        return HeightValue(0)
    return HeightValue(f.height())


def modular_height(c: WeierstrassCurve) -> HeightValue:
    j = j_invariant(c)
    if c.base.function_field:
        return weil_height_fft(j)
    if c.base.p:
        return HeightValue(0)
    return weil_height_Q(j)


# --- isogeny degree bounds ------------------------------------------------------

def isogeny_bound_ec_genus(g: int) -> int:
    return 49 * max(1, g)


def isogeny_bound_surface_genus(g: int) -> int:
    return 9 * 49**2 * max(1, g * g)


def isogeny_bound_ec_hmod(Ldeg: int, h1: Height, h2: Height):
    if Ldeg < 1:
        raise InvalidInput("[L:K] must be >= 1")
    return _exact(Surd.of(Ldeg * min(_height_rational(h1), _height_rational(h2))))


def isogeny_bound_surface_hmod(Ldeg: int, h1: Height, h2: Height):
    if Ldeg < 1:
        raise InvalidInput("[L:K] must be >= 1")
    return _exact(Surd.of(9 * Ldeg * Ldeg * _height_rational(h1) * _height_rational(h2)))


# --- X_0(N) -----------------------------------------------------------------------

def _factor(n: int) -> dict[int, int]:
    out, q = {}, 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _euler_phi(n: int) -> int:
    r = n
    for q in _factor(n):
        r = r // q * (q - 1)
    return r


def _kronecker_minus(q: int, d: int) -> int:
    """(-d / q) for d in {1, 3}, including q = 2, 3."""
    if q == 2:
        return 0 if d == 1 else -1
    if q == 3 and d == 3:
        return 0
    return legendre(-d, q)


def x0_invariants(N: int) -> dict[str, int]:
    """Index, elliptic point counts and cusp count of Gamma_0(N)."""
    if N < 1:
        raise InvalidInput("level must be >= 1")
    f = _factor(N)
    mu = N
    for q in f:
        mu = mu // q * (q + 1)
    nu2 = 0 if N % 4 == 0 else math.prod(1 + _kronecker_minus(q, 1) for q in f)
    nu3 = 0 if N % 9 == 0 else math.prod(1 + _kronecker_minus(q, 3) for q in f)
    cusps = sum(_euler_phi(math.gcd(d, N // d)) for d in range(1, N + 1) if N % d == 0)
    return {"mu": mu, "nu2": nu2, "nu3": nu3, "cusps": cusps}


def genus_X0(N: int) -> int:
    """1 + mu/12 - nu2/4 - nu3/3 - nu_inf/2."""
    inv = x0_invariants(N)
    g = 1 + Fraction(inv["mu"], 12) - Fraction(inv["nu2"], 4) - Fraction(inv["nu3"], 3) - Fraction(inv["cusps"], 2)
    assert g.denominator == 1 and g >= 0, (N, g)
    return int(g)


# --- degree calculus ----------------------------------------------------------------

def mult_degree(m: int, dim: int) -> int:
    """deg [m] on an abelian variety of dimension ``dim``."""
    if m < 1 or dim < 1:
        raise InvalidInput("inputs must be positive")
    return m ** (2 * dim)


def tilde_degree(d: int, n: int) -> int:
    """Degree of the companion isogeny with tilde(phi) o phi = [d], dimension n."""
    if d < 1 or n < 1:
        raise InvalidInput("inputs must be positive")
    return d ** (2 * n - 1)


def is_biseparable_degree(d: int, p: int) -> bool:
    if d < 1:
        raise InvalidInput("degree must be positive")
    if p and not is_prime(p):
        raise InvalidInput(f"{p} is neither 0 nor prime")
    return p == 0 or math.gcd(d, p) == 1


@dataclass(frozen=True)
class BoundReport:
    g: int
    n: int
    values: dict

    def row(self) -> dict:
        return {"g": self.g, "n": self.n, **self.values}


def bound_report(g: int, n: int = 2) -> BoundReport:
    c = c_of_g(g)
    vals = {
        "c_literal": c.literal,
        "c_conservative": c.conservative,
        "C": C_of_g(g),
        "C_tilde": C_tilde(g, n),
        "isogeny_bound_ec_genus": isogeny_bound_ec_genus(g),
        "isogeny_bound_surface_genus": isogeny_bound_surface_genus(g),
    }
    return BoundReport(g, n, vals)
