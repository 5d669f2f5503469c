"""Acceptance gate: one check per criterion, each with its own time budget.

Every criterion records a single PASS/FAIL line, printed in the pytest summary
(or on stdout when this file is run as a script).
"""

import itertools
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from corpus import FINITE_CLASS_FIELDS, Q, classes, q_corpus
from oracles import fp_isotropic_oracle, integer_witness, locally_isotropic_oracle
from wittforge.arith import REAL
from wittforge.fields import FiniteField, Laurent, PAdics, Reals
from wittforge.forms import Form, form, repeat, scale, tensor
from wittforge.isotropy import anisotropy_certificate, is_isometric, is_isotropic, represents, witt_index
from wittforge.levels import level, relation_suite, sublevel
from wittforge.pfister import (
    I1Hints,
    has_maximal_splitting,
    i1_interval,
    is_neighbor_of,
    is_pfister_similar,
    pfister,
    rule_intervals,
    splitting_cap,
)
from wittforge.valuesets import (
    INF,
    admissible_levels,
    inadmissible_sublevels,
    mset_values,
    pfister_exact_level,
    pfister_neighbor_brackets,
    quadratic_ext_bracket,
)


def record(number: int, title: str, failures: list, elapsed: float, budget=None):
    over = budget is not None and elapsed >= budget
    ok = not failures and not over
    limit = f" (limit {budget:g} s)" if budget is not None else ""
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  [{elapsed:.3f} s{limit}]"
    if failures:
        line += f"  first failure: {failures[0]}"
    if over:
        line += "  over time budget"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failures, failures[:5]
    assert not over, f"{elapsed:.3f} s exceeds {budget} s"


def two_powers(limit):
    return {2**k for k in range(limit.bit_length() + 1) if 2**k <= limit}


def test_criterion_01_example_reproduction():
    t0 = time.perf_counter()
    q, pi = form(Q, 1, 1, 1, 7), form(Q, 1, 1, 1, 1)
    prod = tensor(pi, q)
    fails = []
    if q.det() == 1 or is_pfister_similar(q):
        fails.append("(a) det q square or q Pfister-similar")
    if not is_isometric(prod, repeat(16, form(Q, 1))):
        fails.append("(b) pi x q not isometric to 16 x <1>")
    iv = i1_interval(q)
    if (iv.lo, iv.hi) != (1, 1):
        fails.append(f"(c) i1(q) = {iv}")
    iv2 = i1_interval(prod)
    if (iv2.lo, iv2.hi) != (8, 8) or not iv2.lo > pi.dim * iv.hi:
        fails.append(f"(d) i1(pi x q) = {iv2}")
    if not is_neighbor_of(tensor(pi, form(Q, 1, 1, 1)), repeat(16, form(Q, 1))):
        fails.append("(e) pi x <1,1,1> not a neighbour of 16 x <1>")
    record(1, "Q example: q=<1,1,1,7>, pi=<1,1,1,1>", fails, time.perf_counter() - t0, 1.0)


def test_criterion_02_exclusion_sets():
    t0 = time.perf_counter()
    got32 = inadmissible_sublevels(6, 2, 32, 32)
    got4 = inadmissible_sublevels(6, 2, 4, 8)
    elapsed = time.perf_counter() - t0
    want32 = {3, 6, 7, 11, 12, 13, 14, 15} | set(range(22, 32))
    fails = []
    if got32 != want32:
        fails.append(f"bound 32: {sorted(got32)}")
    if got4 != {3}:
        fails.append(f"bound 4: {sorted(got4)}")
    record(2, "excluded sublevels, dim 6, i1 >= 2", fails, elapsed, 0.1)


def test_criterion_03_dim3_and_mset_sequences():
    t0 = time.perf_counter()
    h = 2**20
    got = admissible_levels(3, INF, h)
    m1, m2 = mset_values(1, h), mset_values(2, h)
    elapsed = time.perf_counter() - t0
    closed = {1} | {(4**k + 2) // 3 for k in range(1, 12)} | {(2 * 4**k + 1) // 3 for k in range(0, 12)}
    fails = []
    if got != {m for m in closed if m <= h}:
        fails.append(f"dim 3 mismatch: {sorted(got ^ closed)[:5]}")
    if m1 != two_powers(h) or m2 != two_powers(h):
        fails.append("mset for dim 1 or 2 is not the 2-powers")
    record(3, "dim-3 level sequence and 2-power msets", fails, elapsed, 0.1)


def test_criterion_04_finite_field_oracle():
    t0 = time.perf_counter()
    fails = []
    count = 0
    for p in (3, 5, 7, 11, 13):
        F = FiniteField(p)
        for dim in range(1, 5):
            for cs in itertools.product(classes(F), repeat=dim):
                count += 1
                if is_isotropic(Form(F, cs)) != fp_isotropic_oracle(cs, p):
                    fails.append((p, cs))
    record(4, f"F_p isotropy vs vector search ({count} forms)", fails, time.perf_counter() - t0, 30.0)


def _certificate_ok(q, place):
    if place == REAL:
        return len({c > 0 for c in q.coeffs}) == 1
    return not locally_isotropic_oracle(list(q.coeffs), place.p)


def test_criterion_05_local_global_corpus():
    t0 = time.perf_counter()
    fails = []
    corpus = q_corpus(100)
    for q in corpus:
        if is_isotropic(q):
            w = integer_witness(list(q.coeffs), max_height=10**4)
            if w is None or not any(w) or sum(a * x * x for a, x in zip(q.coeffs, w)) != 0:
                fails.append(("no witness", str(q)))
        else:
            place = anisotropy_certificate(q)
            if place is None or not _certificate_ok(q, place):
                fails.append(("bad certificate", str(q), str(place)))
    record(5, f"Q corpus of {len(corpus)} forms: witnesses and local certificates", fails, time.perf_counter() - t0, 60.0)


WS_FIELDS = [
    PAdics(2), PAdics(3), PAdics(5), PAdics(7),
    FiniteField(3), FiniteField(5), FiniteField(7), FiniteField(13),
    Laurent(FiniteField(5)), Laurent(PAdics(3)), Laurent(Laurent(FiniteField(3))), Laurent(Laurent(PAdics(5))),
]


def test_criterion_06_witt_index_divisibility():
    t0 = time.perf_counter()
    rng = random.Random(6)
    fails = []
    cases = isotropic = 0
    while cases < 200:
        F = rng.choice(WS_FIELDS)
        reps = classes(F)
        pi = pfister(F, *[rng.choice(reps) for _ in range(rng.randint(1, 3))])
        if is_isotropic(pi):
            continue
        q = Form(F, [rng.choice(reps) for _ in range(rng.randint(1, 5))])
        cases += 1
        prod = tensor(pi, q)
        if is_isotropic(prod):
            isotropic += 1
            if witt_index(prod) % pi.dim:
                fails.append((str(F), str(pi), str(q), witt_index(prod)))
    record(6, f"dim pi divides i_W(pi x q) ({cases} pairs, {isotropic} isotropic)", fails, time.perf_counter() - t0)
    assert isotropic > 20


RELATION_FIELDS = [FiniteField(p) for p in (3, 5, 7, 11, 13)] + [PAdics(p) for p in (2, 3, 5, 7)] + [Laurent(FiniteField(5))]


def test_criterion_07_relation_suite():
    t0 = time.perf_counter()
    fails = []
    forms = 0
    for F in RELATION_FIELDS:
        for dim in (1, 2, 3):
            for cs in itertools.combinations_with_replacement(classes(F), dim):
                q = Form(F, cs)
                if is_isotropic(q):
                    continue
                forms += 1
                for check in relation_suite(q):
                    if not check.passed:
                        fails.append((str(F), str(q), check.name, check.detail))
    record(7, f"sublevel/level identities on {forms} anisotropic forms", fails, time.perf_counter() - t0)


def _value_set(q):
    return {a for a in classes(q.field) if represents(q, a)}


def test_criterion_08_round_and_group_forms():
    t0 = time.perf_counter()
    fails = []
    rounds = groups = pfisters = 0
    for F in FINITE_CLASS_FIELDS:
        reps = classes(F)
        for n in range(0, 4):
            for slots in itertools.combinations_with_replacement(reps, n):
                pi = pfister(F, *slots)
                pfisters += 1
                if witt_index(pi) not in (0, pi.dim // 2):
                    fails.append(("isotropic Pfister not hyperbolic", str(pi)))
        for dim in range(1, 5):
            for cs in itertools.combinations_with_replacement(reps, dim):
                q = Form(F, cs)
                if is_isotropic(q):
                    continue
                D = _value_set(q)
                if all(is_isometric(scale(a, q), q) for a in D):
                    rounds += 1
                    lev = level(q)
                    if lev.finite and lev.n & (lev.n - 1):
                        fails.append(("round level not a 2-power", str(q), str(lev)))
                    if lev.kind == "exceeded":
                        fails.append(("round level undecided", str(q)))
                if F.one() in D and all(F.mul(a, b) in D for a in D for b in D):
                    groups += 1
                    if level(q).as_number() != sublevel(q).as_number():
                        fails.append(("group form level != sublevel", str(q), str(level(q)), str(sublevel(q))))
    title = f"{rounds} round forms, {groups} group forms, {pfisters} Pfister forms"
    record(8, title, fails, time.perf_counter() - t0)


def test_criterion_09_brackets():
    t0 = time.perf_counter()
    fails = []
    for p in (3, 5, 7):
        F = PAdics(p)
        u = next(c for c in classes(F) if c not in (1, p))
        q = form(F, 1, -u, -p, u * p)
        tau = form(F, -u, -p, u * p)
        s_q, s_tau = level(q).n, level(tau).n
        b = pfister_neighbor_brackets(4, 3, level_q=s_q).level
        if (s_q, s_tau) != (1, 2) or s_tau not in b or (b.lo, b.hi) != (1, 2):
            fails.append((p, s_q, s_tau, str(b)))
    for ell in range(1, 17):
        # the 2-power 2**r with 2**r < ell <= 2**(r+1); ell = 1 forces level 1
        want = 1 if ell == 1 else next(2**r for r in range(8) if 2**r < ell <= 2 ** (r + 1))
        if pfister_exact_level(ell) != want:
            fails.append(("exact", ell, pfister_exact_level(ell), want))
        r = next(r for r in range(8) if 2**r <= ell < 2 ** (r + 1))
        b = quadratic_ext_bracket(ell)
        if (b.lo, b.hi) != (max(1, 2 ** (r - 1)) if r else 1, 2 ** (r + 1) - 1):
            fails.append(("bracket", ell, str(b)))
    record(9, "neighbour bracket over Q_p and Pfister-exact levels 1..16", fails, time.perf_counter() - t0)


I1_FIELDS = [Q, Laurent(Q), Laurent(Reals()), Laurent(Laurent(PAdics(3))), Laurent(Laurent(Laurent(FiniteField(3))))]


def _maximal_products(count, rng):
    out = []
    while len(out) < count:
        F = rng.choice(I1_FIELDS)
        reps = classes(F)
        if F is Q:
            reps = [1, 2, 3, 5, 6, 7]
        pi = pfister(F, *[rng.choice(reps) for _ in range(rng.randint(1, 2))])
        r = Form(F, [rng.choice(reps) for _ in range(rng.choice((2, 3, 4, 5, 6)))])
        prod = tensor(pi, r)
        if is_isotropic(prod) or has_maximal_splitting(r) is not True:
            continue
        out.append((pi, r, prod))
    return out


def test_criterion_10_i1_soundness():
    t0 = time.perf_counter()
    rng = random.Random(10)
    fails = []
    products = _maximal_products(50, rng)
    for pi, r, prod in products:
        hints = I1Hints(factor=(pi, r))
        rules = rule_intervals(prod, hints)
        cap = splitting_cap(prod.dim)
        if rules.get("R7:product-exact") != (cap, cap):
            fails.append(("R7 differs from cap", str(pi), str(r), rules.get("R7:product-exact"), cap))
        if pi.dim * (r.dim - splitting_cap(r.dim)) & (pi.dim * (r.dim - splitting_cap(r.dim)) - 1):
            fails.append(("dim minus i1 not a 2-power", str(pi), str(r)))
    checked = 0
    pool = [(prod, I1Hints(factor=(pi, r))) for pi, r, prod in products]
    for _ in range(400):
        F = rng.choice(I1_FIELDS)
        q = Form(F, [rng.choice(classes(F)) for _ in range(rng.randint(2, 10))])
        if not is_isotropic(q):
            pool.append((q, None))
    for q, hints in pool:
        rules = rule_intervals(q, hints)
        if len(rules) >= 2:
            checked += 1
        for (a, x), (b, y) in itertools.combinations(rules.items(), 2):
            if max(x[0], y[0]) > min(x[1], y[1]):
                fails.append(("disjoint rules", str(q), a, x, b, y))
        i1_interval(q, hints)
    record(10, f"i1 rules consistent on {checked} forms; R7 = cap on {len(products)} products", fails, time.perf_counter() - t0)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
