"""Diagonal quadratic forms and their classical invariants."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .arith import REAL, Place, PrimePlace, hilbert_sf, relevant_places, sqclass_mul
from .fields import FieldDesc, FieldError, OrderingDesc, PAdics, Rationals, Reals


class FormError(ValueError):
    pass


class Form:
    """A diagonal form ``<a1, ..., an>`` with coefficients stored as canonical square classes.

    Equality and hashing go by the coefficient multiset, so ``<1, 2>`` equals ``<2, 1>``.
    """

    __slots__ = ("field", "coeffs", "_key")

    def __init__(self, field: FieldDesc, coeffs: Iterable = ()):
        try:
            cs = tuple(field.element(c) for c in coeffs)
        except FieldError as exc:
            raise FormError(str(exc)) from exc
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "_key", (field, tuple(sorted(cs, key=repr))))

    def __setattr__(self, name, value):
        raise AttributeError("Form is immutable")

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Form) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Form({self.field}, {self})"

    def __str__(self) -> str:
        return "<" + ",".join(self.field.format(c) for c in self.coeffs) + ">"

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return Form(self.field, self.coeffs[idx])
        return self.coeffs[idx]

    def det(self):
        return self.field.prod(self.coeffs)

    def disc(self):
        d = self.dim
        det = self.det()
        return self.field.neg(det) if (d * (d - 1) // 2) % 2 else det

    def signature(self, ordering: OrderingDesc) -> int:
        return sum(self.field.sign(c, ordering) for c in self.coeffs)

    def is_definite_at(self, ordering: OrderingDesc) -> bool:
        return abs(self.signature(ordering)) == self.dim

    # convenience operators
    def __add__(self, other: "Form") -> "Form":
        return orthogonal_sum(self, other)

    def __mul__(self, other: "Form") -> "Form":
        return tensor(self, other)

    def __neg__(self) -> "Form":
        return scale(self.field.minus_one(), self)


def _check_same_field(p: Form, q: Form) -> None:
    if p.field != q.field:
        raise FormError(f"field mismatch: {p.field} vs {q.field}")


def form(field: FieldDesc, *coeffs) -> Form:
    return Form(field, coeffs)


def orthogonal_sum(p: Form, q: Form) -> Form:
    _check_same_field(p, q)
    return Form(p.field, p.coeffs + q.coeffs)


def tensor(p: Form, q: Form) -> Form:
    _check_same_field(p, q)
    f = p.field
    return Form(f, [f.mul(a, b) for a in p.coeffs for b in q.coeffs])


def repeat(n: int, q: Form) -> Form:
    if n < 0:
        raise FormError("repetition count must be non-negative")
    return Form(q.field, q.coeffs * n)


def scale(a, q: Form) -> Form:
    f = q.field
    a = f.element(a)
    return Form(f, [f.mul(a, c) for c in q.coeffs])


def hyperbolic(field: FieldDesc, planes: int = 1) -> Form:
    return Form(field, [1, -1] * planes)


def hasse_places(q: Form) -> list[Place]:
    """Places at which the Hasse invariant is recorded for this form's field."""
    f = q.field
    if isinstance(f, Rationals):
        return relevant_places(q.coeffs)
    if isinstance(f, PAdics):
        return [PrimePlace(f.p)]
    if isinstance(f, Reals):
        return [REAL]
    return []


def hasse_at(coeffs: Sequence[int], v: Place) -> int:
    """Product over i < j of ``(a_i, a_j)_v`` for squarefree-integer coefficients."""
    out = 1
    prefix = 1
    for a in coeffs:
        if prefix != 1:
            out *= hilbert_sf(prefix, a, v)
        prefix = sqclass_mul(prefix, a)
    return out


@dataclass(frozen=True)
class FormInvariants:
    dim: int
    det: object
    disc: object
    hasse: dict = dc_field(default_factory=dict)
    signatures: dict = dc_field(default_factory=dict)


def invariants(q: Form) -> FormInvariants:
    hasse = {v: hasse_at(q.coeffs, v) for v in hasse_places(q)}
    sigs = {o: q.signature(o) for o in q.field.orderings()}
    return FormInvariants(q.dim, q.det(), q.disc(), hasse, sigs)
