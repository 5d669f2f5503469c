"""Pfister forms, Pfister neighbours and certified bounds on the first Witt index."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

from .fields import FiniteField, Laurent, PAdics, Rationals, Reals
from .forms import Form, FormError, repeat, scale, tensor
from .isotropy import is_isometric, is_isotropic, is_subform, witt_index


class I1Error(ValueError):
    pass


def pfister(field, *slots) -> Form:
    """The form ``<1,a1> x ... x <1,an>``; no slots gives ``<1>``."""
    q = Form(field, [1])
    for a in slots:
        q = tensor(q, Form(field, [1, a]))
    return q


def _two_power_exponent(n: int) -> Optional[int]:
    if n >= 1 and n & (n - 1) == 0:
        return n.bit_length() - 1
    return None


def splitting_cap(dim: int) -> int:
    """``m`` in ``dim = 2**n + m`` with ``0 < m <= 2**n``; the largest possible first Witt index."""
    if dim < 2:
        raise I1Error("first Witt index needs dim >= 2")
    n = (dim - 1).bit_length() - 1
    return dim - 2**n


def is_hyperbolic(q: Form) -> bool:
    return 2 * witt_index(q) == q.dim


def is_pfister_similar(q: Form) -> bool:
    """Whether ``q`` is a scalar multiple of some Pfister form."""
    n = _two_power_exponent(q.dim)
    if n is None:
        return False
    if n <= 1:
        return True
    if n == 2:
        f = q.field
        return q.disc() == f.one()
    if is_isotropic(q):
        return is_hyperbolic(q)
    return _anisotropic_pfister_similar(q, n)


def _anisotropic_pfister_similar(q: Form, n: int) -> bool:
    f = q.field
    if isinstance(f, (FiniteField, PAdics)):
        # anisotropic n-fold Pfister forms need n < 2 resp. n < 3
        return False
    if isinstance(f, (Rationals, Reals)):
        # for n >= 3 an anisotropic Pfister form is 2**n x <1>
        return is_isometric(q, scale(q.coeffs[0], repeat(2**n, Form(f, [1]))))
    if isinstance(f, Laurent):
        q1 = Form(f.base, [b for e, b in q.coeffs if e == 0])
        q2 = Form(f.base, [b for e, b in q.coeffs if e == 1])
        if q1.dim == 0 or q2.dim == 0:
            return is_pfister_similar(q1 if q1.dim else q2)
        if q1.dim != q2.dim or not is_pfister_similar(q1):
            return False
        c = f.base.mul(q1.coeffs[0], q2.coeffs[0])
        return is_isometric(scale(c, q1), q2)
    raise FormError(f"unsupported field {f}")


def is_neighbor_of(tau: Form, pi: Form) -> bool:
    """Whether ``tau`` sits in a scalar multiple of the Pfister-similar ``pi`` with more than half its dimension."""
    if not is_pfister_similar(pi):
        raise FormError(f"{pi} is not similar to a Pfister form")
    if 2 * tau.dim <= pi.dim or tau.dim > pi.dim:
        return False
    f = pi.field
    # tau in a*pi forces a*pi = tau_1 * pi_1 * pi, so one scalar suffices
    a = f.mul(tau.coeffs[0], pi.coeffs[0])
    return is_subform(tau, scale(a, pi))


def neighbor_candidates(q: Form, limit: int = 2000):
    """Pfister forms of the next 2-power dimension built from ratios of ``q``'s coefficients."""
    if q.dim < 2:
        return
    f = q.field
    n = (q.dim - 1).bit_length()
    a1 = q.coeffs[0]
    ratios = list(dict.fromkeys(f.mul(a1, c) for c in q.coeffs[1:]))
    seen = set()
    count = 0
    for slots in itertools.combinations_with_replacement(ratios, n):
        pi = pfister(f, *slots)
        if pi in seen:
            continue
        seen.add(pi)
        yield pi
        count += 1
        if count >= limit:
            return


def find_pfister_neighbor(q: Form) -> Optional[Form]:
    for pi in neighbor_candidates(q):
        if not is_isotropic(pi) and is_neighbor_of(q, pi):
            return pi
    return None


# first Witt index ---------------------------------------------------------------


@dataclass(frozen=True)
class I1Interval:
    lo: int
    hi: int
    provenance: tuple[str, ...] = ()
    cap: int = 0

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise I1Error(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


@dataclass
class I1Hints:
    """Structural facts about a form the engine cannot rediscover on its own.

    ``factor`` is ``(pi, r)`` with ``q = pi x r`` and ``pi`` Pfister-similar;
    ``neighbor_of`` is a Pfister form that ``q`` is a neighbour of.
    """

    factor: Optional[tuple[Form, Form]] = None
    neighbor_of: Optional[Form] = None
    search_neighbors: bool = True


def karpenko_values(dim: int) -> set[int]:
    """First Witt indices allowed for an anisotropic form of dimension ``dim``.

    ``i1 - 1`` is the remainder of ``dim - 1`` modulo some power of two.
    """
    cap = splitting_cap(dim)
    out = set()
    k = 0
    while True:
        v = (dim - 1) % (2**k) + 1
        if v <= cap:
            out.add(v)
        if 2**k > dim:
            break
        k += 1
    return out


def _rule_cap(q, hints):
    return 1, splitting_cap(q.dim)


def _rule_pfister(q, hints):
    n = _two_power_exponent(q.dim)
    if n is None or n < 1:
        return None
    if is_pfister_similar(q):
        return 2 ** (n - 1), 2 ** (n - 1)
    if n >= 2:
        # not hyperbolic over its own function field
        return 1, 2 ** (n - 1) - 1
    return None


def _rule_dim4(q, hints):
    if q.dim == 4 and not is_pfister_similar(q):
        return 1, 1
    return None


def _rule_neighbor(q, hints):
    if q.dim < 3 or _two_power_exponent(q.dim) is not None:
        return None
    pi = hints.neighbor_of if hints else None
    if pi is not None:
        ok = pi.dim == 2 ** ((q.dim - 1).bit_length()) and is_neighbor_of(q, pi)
    elif hints is None or hints.search_neighbors:
        pi = find_pfister_neighbor(q)
        ok = pi is not None
    else:
        ok = False
    if ok:
        m = splitting_cap(q.dim)
        return m, m
    return None


def _rule_signature(q, hints):
    best = None
    for o in q.field.orderings():
        s = abs(q.signature(o))
        if s < q.dim:
            hi = (q.dim - s) // 2
            best = hi if best is None else min(best, hi)
    if best is None:
        return None
    return 1, best


def _rule_product_lower(q, hints):
    if not hints or not hints.factor:
        return None
    pi, r = hints.factor
    if r.dim < 2 or not is_pfister_similar(pi):
        return None
    inner = i1_interval(r, I1Hints(search_neighbors=hints.search_neighbors))
    return pi.dim * inner.lo, splitting_cap(q.dim)


def _rule_product_exact(q, hints):
    if not hints or not hints.factor:
        return None
    pi, r = hints.factor
    if r.dim < 2 or not is_pfister_similar(pi):
        return None
    if has_maximal_splitting(r, I1Hints(search_neighbors=hints.search_neighbors)) is True:
        v = pi.dim * splitting_cap(r.dim)
        return v, v
    return None


def _rule_karpenko(q, hints):
    vals = karpenko_values(q.dim)
    return min(vals), max(vals)


RULES: dict[str, Callable] = {
    "R1:cap": _rule_cap,
    "R2:pfister": _rule_pfister,
    "R3:dim4": _rule_dim4,
    "R4:neighbor": _rule_neighbor,
    "R5:signature": _rule_signature,
    "R6:product-lower": _rule_product_lower,
    "R7:product-exact": _rule_product_exact,
    "K:karpenko": _rule_karpenko,
}


def _check_input(q: Form, hints: Optional[I1Hints]) -> None:
    if q.dim < 2:
        raise I1Error("first Witt index needs dim >= 2")
    if is_isotropic(q):
        raise I1Error(f"{q} is isotropic")
    if hints and hints.factor:
        pi, r = hints.factor
        if tensor(pi, r) != q:
            raise I1Error("factor hint does not multiply out to the form")


def rule_intervals(q: Form, hints: Optional[I1Hints] = None) -> dict[str, tuple[int, int]]:
    """Each rule's own verdict, before intersection."""
    _check_input(q, hints)
    out = {}
    for name, rule in RULES.items():
        res = rule(q, hints)
        if res is not None:
            out[name] = res
    return out


def apply_rules(q: Form, names, hints: Optional[I1Hints] = None) -> I1Interval:
    """Intersect the named rules' intervals; the Karpenko filter then snaps endpoints to allowed values."""
    _check_input(q, hints)
    lo, hi = 1, splitting_cap(q.dim)
    fired = []
    for name in names:
        res = RULES[name](q, hints)
        if res is None:
            continue
        fired.append(name)
        lo, hi = max(lo, res[0]), min(hi, res[1])
    if lo > hi:
        raise I1Error(f"contradictory rules {fired} on {q}: [{lo}, {hi}]")
    if "K:karpenko" in fired:
        allowed = sorted(v for v in karpenko_values(q.dim) if lo <= v <= hi)
        if not allowed:
            raise I1Error(f"no admissible first Witt index in [{lo}, {hi}] for {q}")
        lo, hi = allowed[0], allowed[-1]
    return I1Interval(lo, hi, tuple(fired), splitting_cap(q.dim))


def i1_interval(q: Form, hints: Optional[I1Hints] = None) -> I1Interval:
    """Certified bounds on the first Witt index of the anisotropic form ``q``."""
    return apply_rules(q, list(RULES), hints)


def replay(q: Form, interval: I1Interval, hints: Optional[I1Hints] = None) -> bool:
    return apply_rules(q, interval.provenance, hints) == interval


def has_maximal_splitting(q: Form, hints: Optional[I1Hints] = None) -> Optional[bool]:
    """``True``/``False`` when decided, ``None`` when the interval leaves it open."""
    iv = i1_interval(q, hints)
    if iv.lo == iv.cap:
        return True
    if iv.hi < iv.cap:
        return False
    return None
