"""Exact integer arithmetic: factorisation, square classes of Q, Legendre and Hilbert symbols."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

MAX_FACTOR_BITS = 96

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)
# Deterministic Miller-Rabin witnesses: the first 13 primes are proven for n < 3.3e24;
# the remaining ones are extra rounds for the 2**81..2**96 band.
_MR_BASES = _SMALL_PRIMES


class FactorizationError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n.bit_length() > MAX_FACTOR_BITS:
        raise FactorizationError(f"{n} exceeds the supported range of 2**{MAX_FACTOR_BITS}")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    # deterministic sequence of (c, y0) seeds; the first nontrivial divisor wins
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        m = 64
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise FactorizationError(f"could not split {n}")


@lru_cache(maxsize=4096)
def _factor_tuple(n: int) -> tuple[tuple[int, int], ...]:
    factors: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_brent(m)
        stack += [d, m // d]
    return tuple(sorted(factors.items()))


def factorint(n: int) -> dict[int, int]:
    """Prime factorisation of a nonzero integer as ``{prime: exponent}`` (sign dropped)."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor zero")
    if n.bit_length() > MAX_FACTOR_BITS:
        raise FactorizationError(f"{n} exceeds the supported range of 2**{MAX_FACTOR_BITS}")
    return dict(_factor_tuple(n))


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in _factor_tuple(abs(int(n)))] if abs(int(n)) > 1 else []


def valuation(x: Union[int, Fraction], p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


Rational = Union[int, Fraction]


@dataclass(frozen=True, order=True)
class SquarefreeRat:
    """Square class of a nonzero rational: a sign and a strictly increasing tuple of primes."""

    sign: int
    primes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if any(b <= a for a, b in zip(self.primes, self.primes[1:])):
            raise ValueError("primes must be strictly increasing")

    @classmethod
    def from_int(cls, n: int) -> "SquarefreeRat":
        return squarefree_part(n)

    def __int__(self) -> int:
        return self.sign * math.prod(self.primes)

    def __mul__(self, other: "SquarefreeRat") -> "SquarefreeRat":
        return SquarefreeRat(self.sign * other.sign, tuple(sorted(set(self.primes) ^ set(other.primes))))

    def __neg__(self) -> "SquarefreeRat":
        return SquarefreeRat(-self.sign, self.primes)

    def __str__(self) -> str:
        return str(int(self))


def squarefree_int(x: Rational) -> int:
    """Signed squarefree integer in the square class of ``x``."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no square class")
    n = x.numerator * x.denominator
    out = 1
    for p, e in factorint(n).items():
        if e % 2:
            out *= p
    return out if n > 0 else -out


def squarefree_part(x: Rational) -> SquarefreeRat:
    s = squarefree_int(x)
    return SquarefreeRat(1 if s > 0 else -1, tuple(prime_divisors(s)))


def sqclass_mul(a: int, b: int) -> int:
    """Product of two signed squarefree integers, reduced back to a squarefree integer."""
    g = math.gcd(a, b)
    return (a // g) * (b // g)


def legendre(a: int, p: int) -> int:
    if p == 2 or not is_prime(p):
        raise ValueError(f"legendre symbol needs an odd prime, got {p}")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@lru_cache(maxsize=None)
def least_nonresidue(p: int) -> int:
    for u in range(2, p):
        if legendre(u, p) == -1:
            return u
    raise ValueError(f"no non-residue mod {p}")


@dataclass(frozen=True)
class RealPlace:
    def sort_key(self):
        return (0, 0)

    def __str__(self) -> str:
        return "inf"


@dataclass(frozen=True)
class PrimePlace:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def sort_key(self):
        return (1, self.p)

    def __str__(self) -> str:
        return str(self.p)


Place = Union[RealPlace, PrimePlace]
REAL = RealPlace()


def _split(a: int, p: int) -> tuple[int, int]:
    # a is squarefree, so the valuation is 0 or 1
    return (1, a // p) if a % p == 0 else (0, a)


def _hilbert_odd(a: int, b: int, p: int) -> int:
    alpha, u = _split(a, p)
    beta, v = _split(b, p)
    sign = -1 if alpha * beta * ((p - 1) // 2) % 2 else 1
    return sign * (legendre(u, p) if beta else 1) * (legendre(v, p) if alpha else 1)


def _hilbert_two(a: int, b: int) -> int:
    alpha, u = _split(a, 2)
    beta, v = _split(b, 2)
    eps = lambda w: 1 if w % 4 == 3 else 0
    omega = lambda w: 1 if w % 8 in (3, 5) else 0
    e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    return -1 if e % 2 else 1


@lru_cache(maxsize=65536)
def hilbert_sf(a: int, b: int, v: Place) -> int:
    """Hilbert symbol for signed squarefree integers (no reduction performed)."""
    if isinstance(v, RealPlace):
        return -1 if a < 0 and b < 0 else 1
    if v.p == 2:
        return _hilbert_two(a, b)
    return _hilbert_odd(a, b, v.p)


def hilbert_symbol(a: Rational, b: Rational, v: Place) -> int:
    """Hilbert symbol ``(a, b)_v``: +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution at ``v``."""
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol of zero")
    return hilbert_sf(squarefree_int(a), squarefree_int(b), v)


def is_local_square(a: int, v: Place) -> bool:
    """Whether the nonzero rational ``a`` is a square in the completion at ``v``."""
    if isinstance(v, RealPlace):
        return a > 0
    a = squarefree_int(a)
    if a % v.p == 0:
        return False
    if v.p == 2:
        return a % 8 == 1
    return legendre(a, v.p) == 1


def relevant_places(coeffs: Iterable[Rational]) -> list[Place]:
    """The real place, 2, and every prime dividing a coefficient's square class."""
    primes = {2}
    for c in coeffs:
        primes.update(prime_divisors(squarefree_int(c)))
    return [REAL] + [PrimePlace(p) for p in sorted(primes)]
