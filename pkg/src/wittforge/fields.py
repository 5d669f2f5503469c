"""Field descriptors for the supported tower and their square classes.

Only square classes ever matter, so every field stores elements as a canonical
representative of the class:

* ``Rationals``: signed squarefree integers,
* ``Reals``: ``+1`` / ``-1``,
* ``PAdics(p)``: ``1, u, p, up`` (``u`` the least non-residue) for odd ``p`` and
  ``+-1, +-2, +-5, +-10`` for ``p = 2``,
* ``FiniteField(p)``: ``1`` or the least non-residue,
* ``Laurent(base)``: a pair ``(e, b)`` meaning ``t**e * b`` with ``e`` in ``{0, 1}``.

Raw coefficients are :class:`Monomial` values ``c * t1**k1 * t2**k2 ...`` where
``t1`` (written ``t``) is the uniformiser of the outermost Laurent level.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Optional, Union

from .arith import is_prime, least_nonresidue, legendre, sqclass_mul, squarefree_int, valuation

DEFAULT_MAX_LAURENT_DEPTH = 4


def max_laurent_depth() -> int:
    return int(os.environ.get("WITTFORGE_MAX_LAURENT_DEPTH", DEFAULT_MAX_LAURENT_DEPTH))


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class Monomial:
    value: Fraction
    t: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))
        t = tuple(self.t)
        while t and t[-1] == 0:
            t = t[:-1]
        object.__setattr__(self, "t", t)

    def __mul__(self, other: "Monomial") -> "Monomial":
        n = max(len(self.t), len(other.t))
        a = self.t + (0,) * (n - len(self.t))
        b = other.t + (0,) * (n - len(other.t))
        return Monomial(self.value * other.value, tuple(x + y for x, y in zip(a, b)))

    def __str__(self) -> str:
        factors = []
        for i, k in enumerate(self.t):
            if k:
                name = "t" if i == 0 else f"t{i + 1}"
                factors.append(name if k == 1 else f"{name}^{k}")
        v = self.value
        if not factors:
            return str(v)
        if v == 1:
            return " ".join(factors)
        if v == -1:
            return "-" + " ".join(factors)
        return f"{v}" + " ".join(factors)


_MONO_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(t\d*)(?:\^(\d+))?|(\*))")


def parse_monomial(src: str) -> Monomial:
    """Parse ``-3/4t``, ``2*t*t2``, ``t^3`` and friends."""
    s = src.strip()
    sign = 1
    if s.startswith("-"):
        sign, s = -1, s[1:]
    elif s.startswith("+"):
        s = s[1:]
    value = Fraction(sign)
    exps: dict[int, int] = {}
    pos, seen_number = 0, False
    s = s.rstrip()
    if not s:
        raise FieldError(f"empty coefficient {src!r}")
    while pos < len(s):
        m = _MONO_TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise FieldError(f"bad coefficient {src!r} at offset {pos}")
        num, name, power, star = m.groups()
        if num is not None:
            if seen_number:
                raise FieldError(f"bad coefficient {src!r}: two numbers")
            seen_number = True
            value *= Fraction(num)
        elif name is not None:
            idx = int(name[1:]) if len(name) > 1 else 1
            if idx < 1:
                raise FieldError(f"bad uniformiser {name!r}")
            exps[idx] = exps.get(idx, 0) + (int(power) if power else 1)
        pos = m.end()
    if value == 0:
        raise FieldError("zero coefficient")
    t = tuple(exps.get(i, 0) for i in range(1, max(exps, default=0) + 1))
    return Monomial(value, t)


@dataclass(frozen=True)
class OrderingDesc:
    """An ordering of a formally real tower: the sign of each uniformiser, outermost first."""

    t_signs: tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.t_signs:
            return "P0"
        names = ["t" if i == 0 else f"t{i + 1}" for i in range(len(self.t_signs))]
        return ",".join(f"{n}{'>' if s > 0 else '<'}0" for n, s in zip(names, self.t_signs))


@dataclass(frozen=True)
class SquareClassSet:
    reps: Optional[tuple] = None
    field: Any = None

    @property
    def finite(self) -> bool:
        return self.reps is not None

    def __iter__(self):
        if self.reps is None:
            raise FieldError("infinite square class set; use sample()")
        return iter(self.reps)

    def __len__(self) -> int:
        if self.reps is None:
            raise FieldError("infinite square class set")
        return len(self.reps)

    def sample(self, count: int, primes: tuple[int, ...] = (2, 3, 5, 7)) -> list:
        """Deterministic sample of classes: all of them when finite, else bounded prime support."""
        if self.reps is not None:
            return list(self.reps)[:count]
        return list(itertools.islice(self.field._sample_classes(primes), count))


Element = Any


class FieldDesc:
    """Common interface of the field descriptors."""

    formally_real = False

    def element(self, x) -> Element:
        if isinstance(x, Monomial):
            return self._canonical(x)
        if isinstance(x, str):
            return self._canonical(parse_monomial(x))
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            if x == 0:
                raise FieldError("zero is not a valid coefficient")
            return self._canonical(Monomial(Fraction(x)))
        raise FieldError(f"cannot interpret {x!r} as an element of {self}")

    def one(self) -> Element:
        return self.element(1)

    def minus_one(self) -> Element:
        return self.element(-1)

    def neg(self, a: Element) -> Element:
        return self.mul(self.minus_one(), a)

    def prod(self, items) -> Element:
        out = self.one()
        for a in items:
            out = self.mul(out, a)
        return out

    def inv(self, a: Element) -> Element:
        return a

    def square_classes(self) -> SquareClassSet:
        reps = self._class_reps()
        return SquareClassSet(reps, self)

    def _class_reps(self) -> Optional[tuple]:
        return None

    def orderings(self) -> list[OrderingDesc]:
        return []

    def u_bound(self) -> Optional[int]:
        """The u-invariant for non-real fields; ``None`` means unbounded (formally real)."""
        return None

    @property
    def depth(self) -> int:
        return 0

    def root(self) -> "FieldDesc":
        return self

    def format(self, a: Element) -> str:
        return str(self.to_monomial(a))


@dataclass(frozen=True)
class Rationals(FieldDesc):
    formally_real = True

    def _canonical(self, m: Monomial) -> int:
        if m.t:
            raise FieldError(f"{m} has a uniformiser but the field is Q")
        return squarefree_int(m.value)

    def mul(self, a: int, b: int) -> int:
        return sqclass_mul(a, b)

    def sign(self, a: int, ordering: OrderingDesc) -> int:
        return 1 if a > 0 else -1

    def orderings(self) -> list[OrderingDesc]:
        return [OrderingDesc()]

    def to_monomial(self, a: int) -> Monomial:
        return Monomial(a)

    def _sample_classes(self, primes: tuple[int, ...]) -> Iterator[int]:
        values = sorted(
            {abs(x) for r in range(len(primes) + 1) for c in itertools.combinations(primes, r) for x in [_prod(c)]}
        )
        for v in values:
            yield v
            yield -v

    def is_valid(self, a) -> bool:
        return isinstance(a, int) and a != 0 and squarefree_int(a) == a

    def __str__(self) -> str:
        return "Q"


def _prod(items) -> int:
    out = 1
    for x in items:
        out *= x
    return out


@dataclass(frozen=True)
class Reals(FieldDesc):
    formally_real = True

    def _canonical(self, m: Monomial) -> int:
        if m.t:
            raise FieldError(f"{m} has a uniformiser but the field is R")
        return 1 if m.value > 0 else -1

    def mul(self, a: int, b: int) -> int:
        return a * b

    def sign(self, a: int, ordering: OrderingDesc) -> int:
        return a

    def _class_reps(self):
        return (1, -1)

    def orderings(self) -> list[OrderingDesc]:
        return [OrderingDesc()]

    def to_monomial(self, a: int) -> Monomial:
        return Monomial(a)

    def is_valid(self, a) -> bool:
        return a in (1, -1)

    def __str__(self) -> str:
        return "R"


@dataclass(frozen=True)
class PAdics(FieldDesc):
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"Qp({self.p}): {self.p} is not prime")

    def _canonical(self, m: Monomial) -> int:
        if m.t:
            raise FieldError(f"{m} has a uniformiser but the field is {self}")
        return self._canon_rational(m.value)

    def _canon_rational(self, x: Fraction) -> int:
        p = self.p
        v = valuation(x, p)
        x = Fraction(x) / Fraction(p) ** v
        if p == 2:
            w = x.numerator * pow(x.denominator, -1, 8) % 8
            unit = {1: 1, 3: -5, 5: 5, 7: -1}[w]
        else:
            w = x.numerator * pow(x.denominator, -1, p) % p
            unit = 1 if legendre(w, p) == 1 else least_nonresidue(p)
        return unit * p if v % 2 else unit

    def mul(self, a: int, b: int) -> int:
        return self._canon_rational(Fraction(a * b))

    def _class_reps(self):
        p = self.p
        if p == 2:
            return (1, -1, 2, -2, 5, -5, 10, -10)
        u = least_nonresidue(p)
        return (1, u, p, u * p)

    def u_bound(self) -> int:
        return 4

    def to_monomial(self, a: int) -> Monomial:
        return Monomial(a)

    def is_valid(self, a) -> bool:
        return a in self._class_reps()

    def __str__(self) -> str:
        return f"Qp({self.p})"


@dataclass(frozen=True)
class FiniteField(FieldDesc):
    p: int

    def __post_init__(self):
        if self.p == 2 or not is_prime(self.p):
            raise FieldError(f"Fp({self.p}): need an odd prime")

    def _canonical(self, m: Monomial) -> int:
        if m.t:
            raise FieldError(f"{m} has a uniformiser but the field is {self}")
        num, den = m.value.numerator, m.value.denominator
        if den % self.p == 0:
            raise FieldError(f"{m.value} is not defined in {self}")
        r = num * pow(den, -1, self.p) % self.p
        if r == 0:
            raise FieldError(f"{m.value} vanishes in {self}")
        return self._canon_residue(r)

    def _canon_residue(self, r: int) -> int:
        return 1 if legendre(r, self.p) == 1 else least_nonresidue(self.p)

    def mul(self, a: int, b: int) -> int:
        return self._canon_residue(a * b % self.p)

    def _class_reps(self):
        return (1, least_nonresidue(self.p))

    def u_bound(self) -> int:
        return 2

    def to_monomial(self, a: int) -> Monomial:
        return Monomial(a)

    def is_square(self, a: int) -> bool:
        return a == 1

    def is_valid(self, a) -> bool:
        return a in self._class_reps()

    def __str__(self) -> str:
        return f"Fp({self.p})"


@dataclass(frozen=True)
class Laurent(FieldDesc):
    """Laurent series field ``base((t))``; the new uniformiser is the outermost ``t``."""

    base: FieldDesc

    def __post_init__(self):
        if self.depth > max_laurent_depth():
            raise FieldError(f"Laurent depth {self.depth} exceeds the maximum {max_laurent_depth()}")

    @property
    def formally_real(self) -> bool:  # type: ignore[override]
        return self.base.formally_real

    @property
    def depth(self) -> int:
        return 1 + self.base.depth

    def root(self) -> FieldDesc:
        return self.base.root()

    def _canonical(self, m: Monomial) -> tuple:
        e = m.t[0] % 2 if m.t else 0
        rest = Monomial(m.value, m.t[1:])
        return (e, self.base._canonical(rest))

    def element(self, x) -> tuple:
        if isinstance(x, tuple):
            if not self.is_valid(x):
                raise FieldError(f"{x!r} is not a canonical element of {self}")
            return x
        return super().element(x)

    def is_valid(self, a) -> bool:
        return isinstance(a, tuple) and len(a) == 2 and a[0] in (0, 1) and self.base.is_valid(a[1])

    def mul(self, a: tuple, b: tuple) -> tuple:
        return ((a[0] + b[0]) % 2, self.base.mul(a[1], b[1]))

    def uniformizer(self) -> tuple:
        return (1, self.base.one())

    def sign(self, a: tuple, ordering: OrderingDesc) -> int:
        eps = ordering.t_signs[0]
        return (eps if a[0] else 1) * self.base.sign(a[1], OrderingDesc(ordering.t_signs[1:]))

    def _class_reps(self):
        base = self.base._class_reps()
        if base is None:
            return None
        return tuple((e, b) for e in (0, 1) for b in base)

    def _sample_classes(self, primes):
        for b in self.base._sample_classes(primes):
            yield (0, b)
            yield (1, b)

    def orderings(self) -> list[OrderingDesc]:
        return [OrderingDesc((eps,) + o.t_signs) for o in self.base.orderings() for eps in (1, -1)]

    def u_bound(self) -> Optional[int]:
        u = self.base.u_bound()
        return None if u is None else 2 * u

    def to_monomial(self, a: tuple) -> Monomial:
        inner = self.base.to_monomial(a[1])
        return Monomial(inner.value, (a[0],) + inner.t + (0,) * (self.base.depth - len(inner.t)))

    def __str__(self) -> str:
        return f"laurent({self.base})"


Field = Union[Rationals, Reals, PAdics, FiniteField, Laurent]

_FIELD_RE = re.compile(r"^(Q|R|Qp\((\d+)\)|Fp\((\d+)\))$")


def parse_field(src: str) -> FieldDesc:
    """Parse ``Q``, ``R``, ``Qp(7)``, ``Fp(5)`` or ``laurent(<field>)`` (nesting allowed)."""
    s = src.strip().replace(" ", "")
    if s.startswith("laurent(") and s.endswith(")"):
        return Laurent(parse_field(s[len("laurent(") : -1]))
    m = _FIELD_RE.match(s)
    if not m:
        raise FieldError(f"unknown field {src!r}")
    if s == "Q":
        return Rationals()
    if s == "R":
        return Reals()
    if m.group(2):
        return PAdics(int(m.group(2)))
    return FiniteField(int(m.group(3)))


def square_classes(field: FieldDesc) -> SquareClassSet:
    return field.square_classes()


def orderings(field: FieldDesc) -> list[OrderingDesc]:
    return field.orderings()


def u_bound(field: FieldDesc) -> Optional[int]:
    return field.u_bound()
