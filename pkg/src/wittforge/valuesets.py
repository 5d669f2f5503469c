"""Which integers can occur as the sublevel or level of a form over some extension field.

Everything here is arithmetic on ``(dim q, i1 bounds, sublevel/level of q)``; the
only functions touching a concrete :class:`~wittforge.forms.Form` are
:func:`signature_full_sets` and :func:`report_for_form`, which gather those inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Union

INF = math.inf
Bound = Union[int, float]  # a natural or math.inf


class ValueSetError(ValueError):
    pass


def _horizon(bound: Bound, horizon: Optional[int]) -> int:
    if horizon is not None:
        if horizon < 0:
            raise ValueSetError("horizon must be non-negative")
        return horizon
    if bound == INF:
        raise ValueSetError("a horizon is required when the bound is infinite")
    return max(2 * int(bound), 2**10)


def _two_powers_up_to(limit: Bound, extra: int = 0):
    """``2**n`` for ``n = 0, 1, ...`` while ``2**n <= limit``; at least ``extra`` more steps if limit is infinite."""
    n = 0
    while 2**n <= limit:
        yield n
        n += 1
        if limit == INF and n > extra:
            return


def _steps_for(horizon: int, dim: int) -> int:
    return (horizon * dim + 1).bit_length() + 2


def admissible_sublevels(dim: int, sublevel_bound: Bound, horizon: Optional[int] = None) -> set[int]:
    """``{floor(2**n / dim)}`` up to ``min(bound, horizon)``, plus the bound itself."""
    if dim < 2:
        raise ValueSetError("sublevel value sets need dim >= 2")
    h = _horizon(sublevel_bound, horizon)
    top = min(sublevel_bound, h)
    out = set()
    for n in range(_steps_for(h, dim)):
        m = 2**n // dim
        if m > top:
            break
        out.add(m)
    if sublevel_bound != INF and sublevel_bound <= h:
        out.add(int(sublevel_bound))
    return out


def admissible_levels(dim: int, level_bound: Bound, horizon: Optional[int] = None) -> set[int]:
    """``{ceil(2**n / dim)}`` up to ``min(bound, horizon)``, plus the bound itself."""
    if dim < 1:
        raise ValueSetError("level value sets need dim >= 1")
    h = _horizon(level_bound, horizon)
    top = min(level_bound, h)
    out = set()
    for n in range(_steps_for(h, dim)):
        m = -(-(2**n) // dim)
        if m > top:
            break
        out.add(m)
    if level_bound != INF and level_bound <= h:
        out.add(int(level_bound))
    return out


def mset_values(dim: int, horizon: int) -> set[int]:
    """Values shared by every form of dimension ``dim`` with infinite level: ``{ceil(2**r / dim)}``."""
    if dim < 1:
        raise ValueSetError("dim must be positive")
    return admissible_levels(dim, INF, horizon)


def _open_interval_ints(lo: Fraction, hi: int) -> range:
    return range(math.floor(lo) + 1, hi)


def inadmissible_sublevels(dim: int, i1_lo: int, sublevel_bound: Bound, horizon: Optional[int] = None) -> set[int]:
    """Integers in ``(2**n - 2**n * i1 / dim, 2**n)`` for every ``2**n <= bound``.

    A lower bound on ``i1`` only shrinks each interval, so the result stays valid.
    """
    if dim < 2 or i1_lo < 1:
        raise ValueSetError("need dim >= 2 and i1_lo >= 1")
    h = _horizon(sublevel_bound, horizon)
    out = set()
    for n in _two_powers_up_to(sublevel_bound, _steps_for(h, dim)):
        p = 2**n
        lo = Fraction(p * (dim - i1_lo), dim)
        if lo >= h:
            break
        out.update(m for m in _open_interval_ints(lo, p) if m <= h)
    return out


def inadmissible_levels(dim: int, i1_lo: int, sublevel_bound: Bound, horizon: Optional[int] = None) -> set[int]:
    """Integers in ``(2**n + 1 - (2**n * i1 + 1) / dim, 2**n)`` for each ``2**n <= sublevel`` with ``dim <= 2**(n-1) * i1``.

    Valid for forms representing 1.
    """
    if dim < 2 or i1_lo < 1:
        raise ValueSetError("need dim >= 2 and i1_lo >= 1")
    h = _horizon(sublevel_bound, horizon)
    out = set()
    for n in _two_powers_up_to(sublevel_bound, _steps_for(h, dim)):
        if n == 0 or dim > 2 ** (n - 1) * i1_lo:
            continue
        p = 2**n
        lo = p + 1 - Fraction(p * i1_lo + 1, dim)
        if lo >= h:
            break
        out.update(m for m in _open_interval_ints(lo, p) if m <= h)
    return out


def maxsplit_sublevels(dim: int, i1: int, sublevel_bound: Bound, horizon: Optional[int] = None) -> set[int]:
    """``floor(2**n - 2**n * i1 / dim)`` for ``2**n <= bound``; the caller certifies maximal splitting."""
    if dim < 2 or i1 < 1:
        raise ValueSetError("need dim >= 2 and i1 >= 1")
    h = _horizon(sublevel_bound, horizon) if sublevel_bound == INF else None
    out = set()
    for n in _two_powers_up_to(sublevel_bound, _steps_for(h or 1, dim)):
        m = (2**n * (dim - i1)) // dim
        if h is not None and m > h:
            break
        out.add(m)
    return out


# reports ----------------------------------------------------------------------------


@dataclass
class ValueSetReport:
    kind: str  # "sublevel" | "level"
    horizon: int
    admissible: dict = dc_field(default_factory=dict)  # value -> list of tags
    excluded: dict = dc_field(default_factory=dict)
    undecided: set = dc_field(default_factory=set)
    equality: Optional[bool] = None  # admissible is the full set (True), a proper part (False), unknown (None)

    def _add(self, table: dict, values, tag: str) -> None:
        for m in values:
            if m <= self.horizon:
                table.setdefault(m, []).append(tag)

    def finish(self) -> "ValueSetReport":
        clash = set(self.admissible) & set(self.excluded)
        if clash:
            raise ValueSetError(f"values both admitted and excluded: {sorted(clash)}")
        start = 0 if self.kind == "sublevel" else 1
        self.undecided = set(range(start, self.horizon + 1)) - set(self.admissible) - set(self.excluded)
        return self

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "horizon": self.horizon,
            "admissible": {str(k): v for k, v in sorted(self.admissible.items())},
            "excluded": {str(k): v for k, v in sorted(self.excluded.items())},
            "undecided": sorted(self.undecided),
            "equality": self.equality,
        }


def value_set_report(
    kind: str,
    dim: int,
    i1_lo: int,
    i1_hi: int,
    bound: Bound,
    horizon: Optional[int] = None,
    sublevel_bound: Optional[Bound] = None,
    represents_one: bool = False,
) -> ValueSetReport:
    """Collect every admissible and excluded value the arithmetic rules certify.

    ``bound`` is the sublevel (kind ``sublevel``) or level (kind ``level``) of q over the base field.
    For levels, exclusions also need the sublevel of q and ``1`` in the value set of q.
    """
    if kind not in ("sublevel", "level"):
        raise ValueSetError(f"unknown kind {kind!r}")
    if not 1 <= i1_lo <= i1_hi:
        raise ValueSetError("need 1 <= i1_lo <= i1_hi")
    h = _horizon(bound, horizon)
    rep = ValueSetReport(kind, h)
    cap = dim - 2 ** ((dim - 1).bit_length() - 1) if dim >= 2 else None
    if kind == "sublevel":
        rep._add(rep.admissible, admissible_sublevels(dim, INF, int(min(bound, h))), "floor(2^n/dim)")
        if i1_lo == i1_hi == cap:
            rep._add(rep.admissible, maxsplit_sublevels(dim, i1_lo, bound, h), "maximal-splitting")
        rep._add(rep.excluded, inadmissible_sublevels(dim, i1_lo, bound, h), "certified:i1-interval")
    else:
        rep._add(rep.admissible, admissible_levels(dim, INF, int(min(bound, h))), "ceil(2^n/dim)")
        if dim >= 2 and represents_one and sublevel_bound is not None:
            rep._add(rep.excluded, inadmissible_levels(dim, i1_lo, sublevel_bound, h), "certified:i1-interval")
    if bound != INF:
        rep._add(rep.admissible, [int(bound)], "base-value")
        # values only drop under field extension
        rep._add(rep.excluded, range(int(bound) + 1, h + 1), "above-base-value")
    return rep.finish()


# brackets -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Bracket:
    lo: int
    hi: int  # inclusive

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


@dataclass(frozen=True)
class NeighborBrackets:
    sublevel: Optional[Bracket]
    level: Optional[Bracket]


def pfister_neighbor_brackets(dim_q: int, dim_tau: int, sublevel_q: Optional[int] = None, level_q: Optional[int] = None) -> NeighborBrackets:
    """Ranges for the sublevel and level of a neighbour ``tau`` of the Pfister form ``q``."""
    if dim_q < 1 or dim_q & (dim_q - 1):
        raise ValueSetError("dim q must be a power of two")
    if not (2 * dim_tau > dim_q and dim_tau <= dim_q):
        raise ValueSetError(f"a {dim_tau}-dimensional form cannot neighbour a {dim_q}-dimensional Pfister form")
    sub = lev = None
    if sublevel_q is not None:
        sub = Bracket(sublevel_q, (sublevel_q * dim_q) // dim_tau)
    if level_q is not None:
        lev = Bracket(level_q, -(-(level_q * dim_q + 1) // dim_tau))
    return NeighborBrackets(sub, lev)


def quadratic_ext_bracket(ell: int) -> Bracket:
    """Range of the q-level over ``F(sqrt d)`` for a round ``q`` with ``ell = l_q(-d)``."""
    if not isinstance(ell, int) or ell < 1:
        raise ValueSetError("ell must be a positive integer")
    r = ell.bit_length() - 1
    lo = max(1, 2 ** (r - 1)) if r >= 1 else 1
    return Bracket(lo, 2 ** (r + 1) - 1)


def pfister_exact_level(ell: int) -> int:
    """The q-level over the function field of phi for Pfister q, given ``ell = l_q(a phi)``: the 2-power with ``2**r < ell <= 2**(r+1)``."""
    if not isinstance(ell, int) or ell < 1:
        raise ValueSetError("ell must be a positive integer")
    if ell == 1:
        return 1
    return 2 ** ((ell - 1).bit_length() - 1)


# form-level wrappers -----------------------------------------------------------------------


def signature_sets(dim: int, hypothesis: str, value: Bound, i1_lo: int = 1, horizon: Optional[int] = None) -> ValueSetReport:
    """Sets guaranteed by a signature hypothesis at some ordering.

    ``hypothesis`` is ``"negative-definite"`` (signature ``-dim``, ``value`` the level) or
    ``"near-definite"`` (``|signature| = dim - 2``, ``value`` the sublevel).
    """
    h = _horizon(value, horizon) if value != INF else (horizon if horizon is not None else max(2**10, 2 * dim))
    if hypothesis == "negative-definite":
        rep = ValueSetReport("level", h)
        rep._add(rep.admissible, range(1, int(min(value, h)) + 1), "all-up-to-level")
        if value != INF:
            rep._add(rep.excluded, range(int(value) + 1, h + 1), "above-base-value")
        rep.equality = True
        return rep.finish()
    if hypothesis == "near-definite":
        rep = ValueSetReport("sublevel", h)
        m = min(dim - 1, value - 1)
        rep._add(rep.admissible, range(0, int(min(m, h)) + 1), "initial-segment")
        if value != INF:
            rep._add(rep.admissible, [int(value)], "base-value")
            rep._add(rep.excluded, range(int(value) + 1, h + 1), "above-base-value")
            rep._add(rep.excluded, inadmissible_sublevels(dim, i1_lo, value, h), "certified:i1-interval")
            rep.equality = True if value <= dim else None
        rep.finish()
        if rep.equality is None and not rep.undecided:
            rep.equality = True
        return rep
    raise ValueSetError(f"unknown hypothesis {hypothesis!r}")


def signature_full_sets(q, horizon: Optional[int] = None) -> ValueSetReport:
    """Apply :func:`signature_sets` to a concrete anisotropic form over a formally real field."""
    from .levels import level, sublevel
    from .pfister import I1Error, i1_interval

    orderings = q.field.orderings()
    if not orderings:
        raise ValueSetError(f"{q.field} has no orderings")
    sigs = [q.signature(o) for o in orderings]
    if any(s == -q.dim for s in sigs):
        r = level(q)
        if r.kind == "exceeded":
            raise ValueSetError("level undecided")
        return signature_sets(q.dim, "negative-definite", r.n if r.finite else INF, horizon=horizon)
    if any(abs(s) == q.dim - 2 for s in sigs):
        r = sublevel(q)
        if r.kind == "exceeded":
            raise ValueSetError("sublevel undecided")
        try:
            lo = i1_interval(q).lo if q.dim >= 2 else 1
        except I1Error:
            lo = 1
        return signature_sets(q.dim, "near-definite", r.n if r.finite else INF, lo, horizon)
    raise ValueSetError(f"{q} has neither signature -dim nor |signature| = dim - 2 at any ordering")


def report_for_form(q, kind: str, horizon: Optional[int] = None) -> ValueSetReport:
    """Gather dim, i1 interval and the base value from ``q`` and build the report."""
    from .isotropy import represents
    from .levels import level, sublevel
    from .pfister import i1_interval

    iv = i1_interval(q)
    sub = sublevel(q)
    if sub.kind == "exceeded":
        raise ValueSetError("sublevel undecided")
    s_sub = sub.n if sub.finite else INF
    if kind == "sublevel":
        return value_set_report("sublevel", q.dim, iv.lo, iv.hi, s_sub, horizon)
    lev = level(q)
    if lev.kind == "exceeded":
        raise ValueSetError("level undecided")
    return value_set_report(
        "level", q.dim, iv.lo, iv.hi, lev.n if lev.finite else INF, horizon,
        sublevel_bound=s_sub, represents_one=represents(q, 1),
    )
