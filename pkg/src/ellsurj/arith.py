"""Exact arithmetic: primes, residues, polynomials and rational functions.

Coefficient domains are encoded by a single integer ``p``: ``p == 0`` means
the rationals (coefficients stored as :class:`fractions.Fraction`), and a prime
``p > 0`` means the prime field F_p (coefficients stored as ints in
``range(p)``).  Polynomials are dense, lowest degree first; the zero
polynomial has an empty coefficient tuple.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidModulus, ZeroDenominator

Rational = Fraction

# deterministic Miller-Rabin for n < 3.3e24 (covers every n < 2**64)
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_PRIME_LIMIT = 1 << 64


def rational(m: int, n: int = 1) -> Fraction:
    if n == 0:
        raise ZeroDenominator(f"{m}/0")
    return Fraction(m, n)


@lru_cache(maxsize=1 << 16)
def is_prime(n: int) -> bool:
    """Deterministic primality test for ``n < 2**64``."""
    n = int(n)
    if n >= _PRIME_LIMIT:
        raise InvalidModulus(f"{n} exceeds the supported range 2**64")
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    """All primes ``<= n`` in increasing order."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(n**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return [int(q) for q in np.flatnonzero(sieve)]


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes q with ``lo <= q <= hi``."""
    return [q for q in primes_up_to(hi) if q >= lo]


def _check_odd_prime(ell: int) -> None:
    if ell < 3 or not is_prime(ell):
        raise InvalidModulus(f"{ell} is not an odd prime")


def legendre(a: int, ell: int) -> int:
    """Legendre symbol (a / ell) in {-1, 0, 1} for an odd prime ``ell``."""
    _check_odd_prime(ell)
    r = pow(int(a) % ell, (ell - 1) // 2, ell)
    return -1 if r == ell - 1 else r


@lru_cache(maxsize=256)
def _chi_table(ell: int) -> np.ndarray:
    chi = -np.ones(ell, dtype=np.int64)
    xs = np.arange(1, ell, dtype=np.int64)
    chi[(xs * xs) % ell] = 1
    chi[0] = 0
    chi.setflags(write=False)
    return chi


def legendre_table(ell: int) -> np.ndarray:
    """Read-only array ``chi`` with ``chi[v] == legendre(v, ell)`` for ``0 <= v < ell``."""
    _check_odd_prime(ell)
    return _chi_table(ell)


def sqrt_mod(a: int, p: int) -> int:
    """A square root of ``a`` modulo the odd prime ``p`` (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


class PrimeFieldElement:
    """An element of F_p, stored as a reduced residue."""

    __slots__ = ("residue", "p")

    def __init__(self, residue: int, p: int):
        if not is_prime(p):
            raise InvalidModulus(f"{p} is not prime")
        self.residue = _to_residue(residue, p)
        self.p = p

    def _other(self, other):
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise InvalidModulus(f"mixed moduli {self.p} and {other.p}")
            return other.residue
        if isinstance(other, (int, Fraction)):
            return _to_residue(other, self.p)
        return NotImplemented

    def _new(self, r: int) -> "PrimeFieldElement":
        out = object.__new__(PrimeFieldElement)
        out.residue = r % self.p
        out.p = self.p
        return out

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._new(self.residue + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._new(self.residue - o)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.residue)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._new(self.residue * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.residue)

    def inverse(self) -> "PrimeFieldElement":
        if self.residue == 0:
            raise ZeroDenominator(f"0 has no inverse mod {self.p}")
        return self._new(pow(self.residue, -1, self.p))

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * self._new(o).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return self._new(pow(self.residue, k, self.p))

    def __eq__(self, other):
        if isinstance(other, PrimeFieldElement):
            return self.p == other.p and self.residue == other.residue
        if isinstance(other, (int, Fraction)):
            try:
                return self.residue == _to_residue(other, self.p)
            except ZeroDenominator:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.p))

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"{self.residue} (mod {self.p})"


Scalar = Union[int, Fraction, PrimeFieldElement]


def _to_residue(c, p: int) -> int:
    if isinstance(c, PrimeFieldElement):
        if c.p != p:
            raise InvalidModulus(f"element mod {c.p} used mod {p}")
        return c.residue
    if isinstance(c, Fraction):
        if c.denominator % p == 0:
            raise ZeroDenominator(f"{c} has no image mod {p}")
        return c.numerator * pow(c.denominator, -1, p) % p
    return int(c) % p


def _coerce(c, p: int):
    if p:
        return _to_residue(c, p)
    if isinstance(c, PrimeFieldElement):
        raise InvalidModulus("finite-field element used over Q")
    return Fraction(c)


class Poly:
    """Univariate polynomial in ``t`` over Q (``p == 0``) or F_p."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs: Iterable = (), p: int = 0):
        if p and not is_prime(p):
            raise InvalidModulus(f"{p} is not prime")
        cs = [_coerce(c, p) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.p = p

    @classmethod
    def _raw(cls, coeffs: list, p: int) -> "Poly":
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        out = object.__new__(cls)
        out.coeffs = tuple(coeffs)
        out.p = p
        return out

    @classmethod
    def constant(cls, c, p: int = 0) -> "Poly":
        return cls([c], p)

    @classmethod
    def t(cls, p: int = 0) -> "Poly":
        return cls([0, 1], p)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else _coerce(0, self.p)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.p == other.p and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, PrimeFieldElement)):
            return self == Poly.constant(other, self.p)
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.p))

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.p != self.p:
                raise InvalidModulus(f"mixed domains p={self.p} and p={other.p}")
            return other
        return Poly([other], self.p)

    def _norm(self, c):
        return c % self.p if self.p else c

    def __add__(self, other):
        if not isinstance(other, (Poly, int, Fraction, PrimeFieldElement)):
            return NotImplemented
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = o.coeffs + (0,) * (n - len(o.coeffs))
        return Poly._raw([self._norm(x + y) for x, y in zip(a, b)], self.p)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw([self._norm(-c) for c in self.coeffs], self.p)

    def __sub__(self, other):
        if not isinstance(other, (Poly, int, Fraction, PrimeFieldElement)):
            return NotImplemented
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Poly, int, Fraction, PrimeFieldElement)):
            return NotImplemented
        o = self._lift(other)
        if not self.coeffs or not o.coeffs:
            return Poly._raw([], self.p)
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(o.coeffs):
                    out[i + j] += x * y
        return Poly._raw([self._norm(c) for c in out], self.p)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly.constant(1, self.p), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def _inv(self, c):
        if self.p:
            return pow(c, -1, self.p)
        return 1 / c

    def __divmod__(self, other):
        o = self._lift(other)
        if o.is_zero():
            raise ZeroDenominator("polynomial division by zero")
        rem = list(self.coeffs)
        inv = self._inv(o.lead)
        dq = len(rem) - len(o.coeffs)
        if dq < 0:
            return Poly._raw([], self.p), self
        quo = [0] * (dq + 1)
        for k in range(dq, -1, -1):
            c = self._norm(rem[k + len(o.coeffs) - 1] * inv)
            quo[k] = c
            if c:
                for j, y in enumerate(o.coeffs):
                    rem[k + j] = self._norm(rem[k + j] - c * y)
        return Poly._raw(quo, self.p), Poly._raw(rem[: len(o.coeffs) - 1], self.p)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def is_integral(self) -> bool:
        return self.p == 0 and all(c.denominator == 1 for c in self.coeffs)

    def exact_div(self, other) -> "Poly":
        """Quotient ``self / other``; raises ValueError unless the division is exact.

        For integral polynomials over Q the quotient must itself be integral,
        which is the only division exposed over Z.
        """
        q, r = divmod(self, other)
        if r:
            raise ValueError("division is not exact")
        o = self._lift(other)
        if self.is_integral() and o.is_integral() and not q.is_integral():
            raise ValueError("quotient is not integral")
        return q

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self * self._inv(self.lead)

    def __call__(self, x):
        return poly_eval(self, x)

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation mod ``p`` on an int64 array of residues."""
        if not self.p:
            raise InvalidModulus("eval_array is only defined over F_p")
        out = np.zeros_like(xs, dtype=np.int64)
        for c in reversed(self.coeffs):
            out = (out * xs + c) % self.p
        return out

    def reduce_mod(self, p: int) -> "Poly":
        """Image of a polynomial over Q in F_p[t]."""
        if self.p:
            raise InvalidModulus("already a polynomial over a finite field")
        return Poly(self.coeffs, p)

    def to_list(self) -> list:
        """Integer coefficient list, lowest degree first (serialization format)."""
        if self.p:
            return list(self.coeffs)
        if not self.is_integral():
            raise ValueError(f"{self!r} has non-integral coefficients")
        return [int(c) for c in self.coeffs]

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            terms = []
            for i, c in reversed(list(enumerate(self.coeffs))):
                if c == 0:
                    continue
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                if mono and c == 1:
                    terms.append(mono)
                else:
                    terms.append(f"{c}*{mono}" if mono else str(c))
            body = " + ".join(terms)
        return f"Poly({body}{f' mod {self.p}' if self.p else ''})"


def poly_eval(f: Poly, x):
    """Horner evaluation of ``f`` at ``x``.

    Over F_p the result is a residue ``int``, or a :class:`PrimeFieldElement`
    when ``x`` is one; over Q it is a :class:`~fractions.Fraction`.
    """
    wrap = isinstance(x, PrimeFieldElement)
    xv = _coerce(x, f.p)
    acc = _coerce(0, f.p)
    for c in reversed(f.coeffs):
        acc = acc * xv + c
        if f.p:
            acc %= f.p
    return PrimeFieldElement(acc, f.p) if wrap else acc


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over a field (zero if both inputs are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


class RationalFunction:
    """Reduced quotient of polynomials with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, p: int | None = None):
        if p is None:
            p = num.p if isinstance(num, Poly) else (den.p if isinstance(den, Poly) else 0)
        num = num if isinstance(num, Poly) else Poly([num], p)
        den = Poly.constant(1, p) if den is None else (den if isinstance(den, Poly) else Poly([den], p))
        r = rat_reduce(num, den)
        self.num, self.den = r.num, r.den

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RationalFunction":
        out = object.__new__(cls)
        out.num, out.den = num, den
        return out

    @property
    def p(self) -> int:
        return self.num.p

    def _lift(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        return RationalFunction(other, None, self.p)

    def __add__(self, other):
        if not isinstance(other, (RationalFunction, Poly, int, Fraction, PrimeFieldElement)):
            return NotImplemented
        o = self._lift(other)
        return rat_reduce(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __sub__(self, other):
        if not isinstance(other, (RationalFunction, Poly, int, Fraction, PrimeFieldElement)):
            return NotImplemented
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (RationalFunction, Poly, int, Fraction, PrimeFieldElement)):
            return NotImplemented
        o = self._lift(other)
        return rat_reduce(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.num.is_zero():
            raise ZeroDenominator("division by the zero rational function")
        return rat_reduce(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunction(1, None, self.p) / (self ** (-k))
        return RationalFunction._raw(self.num**k, self.den**k)

    def __eq__(self, other):
        if isinstance(other, (Poly, int, Fraction, PrimeFieldElement)):
            other = self._lift(other)
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree <= 0

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self!r} is not constant")
        return self.num.coeffs[0] if self.num.coeffs else _coerce(0, self.p)

    def height(self) -> int:
        """max(deg numerator, deg denominator); zero counts as degree 0."""
        return max(self.num.degree, self.den.degree, 0)

    def has_pole_at(self, x) -> bool:
        return poly_eval(self.den, x) == 0

    def __call__(self, x):
        from .errors import PoleAtPoint

        d = poly_eval(self.den, x)
        if d == 0:
            raise PoleAtPoint(f"{self!r} has a pole at {x}")
        n = poly_eval(self.num, x)
        if isinstance(n, PrimeFieldElement):
            return n / d
        if self.p:
            return n * pow(d, -1, self.p) % self.p
        return n / d

    def reduce_mod(self, p: int) -> "RationalFunction":
        return RationalFunction(self.num.reduce_mod(p), self.den.reduce_mod(p))

    def __repr__(self):
        if self.den.degree == 0:
            return f"RationalFunction({self.num!r})"
        return f"RationalFunction({self.num!r} / {self.den!r})"


def rat_reduce(num: Poly, den: Poly) -> RationalFunction:
    """Canonical form of ``num/den``: coprime, with monic denominator."""
    if den.is_zero():
        raise ZeroDenominator("rational function with zero denominator")
    if num.p != den.p:
        raise InvalidModulus(f"mixed domains p={num.p} and p={den.p}")
    if num.is_zero():
        return RationalFunction._raw(num, Poly.constant(1, den.p))
    g = poly_gcd(num, den)
    n, d = num // g, den // g
    inv = d._inv(d.lead)
    return RationalFunction._raw(n * inv, d * inv)


def as_rational_function(x, p: int = 0) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Poly):
        return RationalFunction(x)
    if isinstance(x, Sequence) and not isinstance(x, str):
        return RationalFunction(Poly(x, p))
    return RationalFunction(x, None, p)
