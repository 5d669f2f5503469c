"""Isotropy, Witt index and Witt decomposition for every supported field.

Backends:

* ``Reals``: signature.
* ``FiniteField``: dimension and discriminant.
* ``PAdics``: dimension, determinant and Hasse invariant.
* ``Rationals``: the local answers at every place, combined by Hasse-Minkowski.
* ``Laurent``: Springer's theorem on the two residue forms.

For Q, Q_p and R the engine works on a :class:`Profile` (dimension, determinant,
Hasse invariants, signature), which is enough to decide isotropy and to split a
form one coefficient at a time when a kernel has to be synthesised.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .arith import REAL, Place, PrimePlace, hilbert_sf, is_local_square, prime_divisors, sqclass_mul
from .fields import FiniteField, Laurent, PAdics, Rationals, Reals
from .forms import Form, FormError, _check_same_field, hasse_at, orthogonal_sum, scale


class EngineError(RuntimeError):
    """Internal inconsistency in a decision procedure (should never happen)."""


# local data over Q_p from invariants


def local_isotropic(n: int, det: int, eps: int, p: int) -> bool:
    """Isotropy over Q_p of a form with dimension ``n``, determinant ``det`` and Hasse invariant ``eps``."""
    v = PrimePlace(p)
    if n <= 1:
        return False
    if n == 2:
        return is_local_square(-det, v)
    if n == 3:
        return hilbert_sf(-1, -det, v) == eps
    if n == 4:
        return not is_local_square(det, v) or eps == hilbert_sf(-1, -1, v)
    return True


def local_witt_index(n: int, det: int, eps: int, p: int) -> int:
    k = 0
    v = PrimePlace(p)
    while local_isotropic(n, det, eps, p):
        # q = H + q' with det q' = -det q and eps q = eps q' * (-1, det q')
        det = -det
        eps = eps * hilbert_sf(-1, det, v)
        n -= 2
        k += 1
    return k


@dataclass(frozen=True)
class Profile:
    """Invariants of a form over Q, Q_p or R, possibly of one not yet written down."""

    n: int
    det: int
    hasse: tuple[tuple[int, int], ...]  # (prime, eps) at every tracked prime
    sig: Optional[int]
    is_global: bool

    @property
    def disc(self) -> int:
        return -self.det if (self.n * (self.n - 1) // 2) % 2 else self.det

    def local_indices(self) -> dict:
        out: dict = {}
        if self.sig is not None:
            out[REAL] = (self.n - abs(self.sig)) // 2
        for p, eps in self.hasse:
            out[PrimePlace(p)] = local_witt_index(self.n, self.det, eps, p)
        return out

    def witt_index(self) -> int:
        idx = self.n // 2
        for k in self.local_indices().values():
            idx = min(idx, k)
        if self.is_global and self.n % 2 == 0 and self.disc != 1:
            # infinitely many good primes see a non-square discriminant
            idx = min(idx, self.n // 2 - 1)
        return idx

    def _with_primes(self, b: int) -> "Profile":
        if not self.is_global:
            return self
        have = {p for p, _ in self.hasse}
        new = [p for p in prime_divisors(b) if p not in have]
        if not new:
            return self
        hasse = tuple(sorted(self.hasse + tuple((p, 1) for p in new)))
        return Profile(self.n, self.det, hasse, self.sig, True)

    def represents(self, b: int) -> bool:
        if self.n == 0:
            return False
        if self.n == 1:
            if self.is_global:
                return self.det == b
            return all(is_local_square(sqclass_mul(self.det, b), PrimePlace(p)) for p, _ in self.hasse) and (
                self.sig is None or self.sig * b > 0
            )
        pr = self._with_primes(b)
        d2 = sqclass_mul(pr.det, -b)
        hasse = tuple((p, e * hilbert_sf(pr.det, -b, PrimePlace(p))) for p, e in pr.hasse)
        sig = None if pr.sig is None else pr.sig - (1 if b > 0 else -1)
        return Profile(pr.n + 1, d2, hasse, sig, pr.is_global).witt_index() >= 1

    def peel(self, b: int) -> "Profile":
        pr = self._with_primes(b)
        d2 = sqclass_mul(pr.det, b)
        hasse = tuple((p, e * hilbert_sf(b, d2, PrimePlace(p))) for p, e in pr.hasse)
        sig = None if pr.sig is None else pr.sig - (1 if b > 0 else -1)
        return Profile(pr.n - 1, d2, hasse, sig, pr.is_global)


def _tracked_primes(q: Form) -> list[int]:
    f = q.field
    if isinstance(f, PAdics):
        return [f.p]
    if isinstance(f, Reals):
        return []
    primes = {2}
    for c in q.coeffs:
        primes.update(prime_divisors(c))
    return sorted(primes)


def profile(q: Form) -> Profile:
    f = q.field
    if not isinstance(f, (Rationals, PAdics, Reals)):
        raise FormError(f"no invariant profile over {f}")
    primes = _tracked_primes(q)
    det = 1
    for c in q.coeffs:
        det = sqclass_mul(det, c)
    hasse = tuple((p, hasse_at(q.coeffs, PrimePlace(p))) for p in primes)
    sig = None if isinstance(f, PAdics) else sum(1 if c > 0 else -1 for c in q.coeffs)
    return Profile(q.dim, det, hasse, sig, isinstance(f, Rationals))


def _squarefree_candidates(limit: int = 200000):
    from .arith import squarefree_int

    for m in range(1, limit):
        if squarefree_int(m) == m:
            yield m
            yield -m


def realise(pr: Profile, field, prefer=()) -> tuple:
    """Write down diagonal coefficients of a form with the given profile.

    Picks one represented value at a time and splits it off; ``prefer`` lists
    candidates to try before the generic enumeration.
    """
    coeffs = []
    while pr.n > 0:
        if pr.n == 1:
            b = pr.det if pr.is_global else _local_rep(pr, field)
            coeffs.append(b)
            pr = pr.peel(b)
            break
        if isinstance(field, Rationals):
            generic = _squarefree_candidates()
        else:
            generic = iter(field.square_classes())
        for b in itertools.chain(prefer, generic):
            if pr.represents(b):
                break
        else:
            raise EngineError(f"no represented value found for {pr}")
        coeffs.append(b)
        pr = pr.peel(b)
    return tuple(coeffs)


def _local_rep(pr: Profile, field) -> int:
    for b in field.square_classes():
        if pr.represents(b):
            return b
    raise EngineError(f"1-dimensional profile {pr} not realisable")


@dataclass(frozen=True)
class WittDecomposition:
    witt_index: int
    kernel: Form

    def __str__(self) -> str:
        return f"{self.kernel} + {self.witt_index}H"


def _strip_pairs(q: Form) -> tuple[int, list]:
    """Remove coefficient pairs a, -a; each is a hyperbolic plane."""
    f = q.field
    pool: dict = {}
    for c in q.coeffs:
        pool[c] = pool.get(c, 0) + 1
    rest = []
    planes = 0
    for c in q.coeffs:
        if pool.get(c, 0) == 0:
            continue
        pool[c] -= 1
        mc = f.neg(c)
        if pool.get(mc, 0) > 0:
            pool[mc] -= 1
            planes += 1
        else:
            rest.append(c)
    return planes, rest


@lru_cache(maxsize=8192)
def witt_decomposition(q: Form) -> WittDecomposition:
    """``q = kernel + witt_index x <1,-1>`` with an anisotropic kernel."""
    planes, rest = _strip_pairs(q)
    r = Form(q.field, rest)
    k, kernel = _backend_decompose(r)
    return WittDecomposition(planes + k, kernel)


def _backend_decompose(q: Form) -> tuple[int, Form]:
    f = q.field
    if q.dim == 0:
        return 0, q
    if isinstance(f, Reals):
        pos = sum(1 for c in q.coeffs if c > 0)
        neg = q.dim - pos
        k = min(pos, neg)
        return k, Form(f, [1] * (pos - k) + [-1] * (neg - k))
    if isinstance(f, FiniteField):
        return _finite_decompose(q)
    if isinstance(f, Laurent):
        q1 = Form(f.base, [b for e, b in q.coeffs if e == 0])
        q2 = Form(f.base, [b for e, b in q.coeffs if e == 1])
        d1, d2 = witt_decomposition(q1), witt_decomposition(q2)
        kernel = Form(f, [(0, b) for b in d1.kernel.coeffs] + [(1, b) for b in d2.kernel.coeffs])
        return d1.witt_index + d2.witt_index, kernel
    return _profile_decompose(q)


def _finite_decompose(q: Form) -> tuple[int, Form]:
    f = q.field
    n = q.dim
    det = q.det()
    if n % 2:
        k = (n - 1) // 2
        return k, Form(f, [f.mul(det, f.element((-1) ** k))])
    if f.is_square(q.disc()):
        return n // 2, Form(f, [])
    k = n // 2 - 1
    kdet = f.mul(det, f.element((-1) ** k))
    return k, Form(f, [1, kdet])


def _profile_decompose(q: Form) -> tuple[int, Form]:
    pr = profile(q)
    k = pr.witt_index()
    if k == 0:
        return 0, q
    # kernel invariants: q = K + kH  =>  det K = (-1)^k det q,
    # eps_p(K) = eps_p(q) * eps_p(kH) * (det K, (-1)^k)_p, sig K = sig q
    hyp = [1, -1] * k
    kdet = sqclass_mul(pr.det, (-1) ** k)
    hasse = tuple(
        (p, e * hasse_at(hyp, PrimePlace(p)) * hilbert_sf(kdet, (-1) ** k, PrimePlace(p))) for p, e in pr.hasse
    )
    target = Profile(pr.n - 2 * k, kdet, hasse, pr.sig, pr.is_global)
    prefer = list(dict.fromkeys(q.coeffs))
    coeffs = realise(target, q.field, prefer)
    return k, Form(q.field, coeffs)


def witt_index(q: Form) -> int:
    return witt_decomposition(q).witt_index


def is_isotropic(q: Form) -> bool:
    """Whether ``q`` represents zero nontrivially."""
    f = q.field
    if q.dim <= 1:
        return False
    if isinstance(f, Reals):
        return any(c > 0 for c in q.coeffs) and any(c < 0 for c in q.coeffs)
    if isinstance(f, FiniteField):
        return q.dim >= 3 or f.is_square(f.neg(q.det()))
    if isinstance(f, Laurent):
        q1 = Form(f.base, [b for e, b in q.coeffs if e == 0])
        q2 = Form(f.base, [b for e, b in q.coeffs if e == 1])
        return is_isotropic(q1) or is_isotropic(q2)
    if isinstance(f, Rationals) and q.dim == 2:
        return sqclass_mul(q.coeffs[0], -q.coeffs[1]) == 1
    return profile(q).witt_index() >= 1


def is_anisotropic(q: Form) -> bool:
    return not is_isotropic(q)


def local_witt_indices(q: Form) -> dict:
    """Witt index of ``q`` over every tracked completion (Q, Q_p and R only)."""
    return profile(q).local_indices()


def anisotropy_certificate(q: Form) -> Optional[Place]:
    """A place where the rational form ``q`` is anisotropic, or ``None`` if it is isotropic."""
    if not isinstance(q.field, Rationals):
        raise FormError("local certificates are only defined over Q")
    if is_isotropic(q):
        return None
    for v, k in sorted(local_witt_indices(q).items(), key=lambda kv: kv[0].sort_key()):
        if k == 0:
            return v
    raise EngineError(f"{q} anisotropic but locally isotropic at all tracked places")


def represents(q: Form, a) -> bool:
    """Whether the nonzero element ``a`` lies in the value set of ``q``."""
    a = q.field.element(a)
    if is_isotropic(q):
        return True
    return is_isotropic(orthogonal_sum(q, Form(q.field, [q.field.neg(a)])))


def is_universal(q: Form) -> bool:
    f = q.field
    if is_isotropic(q):
        return True
    if isinstance(f, Rationals):
        # q + <-a> has dim 5 and is indefinite for every a exactly when q is
        return q.dim == 4 and not q.is_definite_at(f.orderings()[0])
    if isinstance(f, Reals):
        return False
    if isinstance(f, Laurent):
        q1 = Form(f.base, [b for e, b in q.coeffs if e == 0])
        q2 = Form(f.base, [b for e, b in q.coeffs if e == 1])
        return q1.dim > 0 and q2.dim > 0 and is_universal(q1) and is_universal(q2)
    return all(represents(q, a) for a in f.square_classes())


def is_isometric(p: Form, q: Form) -> bool:
    _check_same_field(p, q)
    if p.dim != q.dim:
        return False
    return witt_index(orthogonal_sum(p, scale(-1, q))) == p.dim


def is_subform(p: Form, q: Form) -> bool:
    """Whether ``q = p + r`` for some form ``r``."""
    _check_same_field(p, q)
    if p.dim > q.dim:
        return False
    return witt_index(orthogonal_sum(q, scale(-1, p))) >= p.dim
