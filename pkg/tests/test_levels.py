import itertools
import math
import random

import pytest

from corpus import FINITE_CLASS_FIELDS, Q, classes, random_form
from oracles import fp_isotropic_oracle, hilbert_oracle, integer_witness, locally_isotropic_oracle
from wittforge.fields import FiniteField, Laurent, PAdics, Reals
from wittforge.forms import Form, FormError, form, repeat, scale
from wittforge.isotropy import is_isotropic
from wittforge.levels import (
    OrderingObstruction,
    ResidueObstruction,
    level,
    pythagoras_q,
    q_length,
    q_length_form,
    relation_suite,
    sublevel,
)


def _least(pred, start, limit=12):
    for n in range(start, limit):
        if pred(n):
            return n
    return None


def _oracle_for(field):
    if isinstance(field, FiniteField):
        return lambda cs: fp_isotropic_oracle(cs, field.p)
    return lambda cs: locally_isotropic_oracle(cs, field.p)


def test_sublevel_examples():
    assert sublevel(form(PAdics(7), 1)).n == 2
    r = sublevel(form(Q, 1, 1, 1))
    assert r.infinite and isinstance(r.certificate, OrderingObstruction)
    assert sublevel(form(Q, 1, -1)).n == 0


def test_sublevel_of_1_m7_is_two():
    r = sublevel(form(Q, 1, -7))
    assert r.finite and r.n == 2
    # 2 x <1,-7> has no primitive zero mod 49; 3 x <1,-7> has an integer zero
    assert not locally_isotropic_oracle([1, 1, -7, -7], 7)
    assert integer_witness([1, -7] * 3) is not None


def test_level_examples():
    assert level(form(Q, -1)).n == 1
    assert level(form(FiniteField(5), 1)).n == 1
    assert level(form(FiniteField(7), 1)).n == 2
    assert not fp_isotropic_oracle([1, 1], 7) and fp_isotropic_oracle([1, 1, 1], 7)
    assert level(form(Q, 1)).infinite


def test_q_length_examples():
    assert q_length(form(Q, 1), 7).n == 4
    assert integer_witness([1, 1, 1, 1, -7], max_height=8) is not None
    assert not locally_isotropic_oracle([1, 1, 1, -7], 2)
    assert q_length(form(Q, 1), -1).infinite
    assert q_length(form(Q, 1, 1), 7).n == 2
    assert not locally_isotropic_oracle([1, 1, -7], 2)
    with pytest.raises(Exception):
        q_length(form(Q, 1), 0)


def test_q_length_form_examples():
    q = form(Q, 1, 1, 7)
    assert q_length_form(q, q).n == 1
    assert not is_isotropic(repeat(2, form(Q, 1, 1, 1)))
    assert q_length_form(form(Q, 1, 1, 1), repeat(2, form(Q, 1, 1, 1))).n == 2


def test_q_length_form_two_three_over_q():
    assert q_length_form(form(Q, 1), form(Q, 2, 3)).n == 3
    # <2,3> sits in <1,1,1> iff <2,3,6> = <1,1,1>: equal determinants, so compare Hasse invariants
    for p in (2, 3, None):
        hasse = hilbert_oracle(2, 3, p) * hilbert_oracle(2, 6, p) * hilbert_oracle(3, 6, p)
        assert hasse == 1
    # <1,1> is too small: determinant 1 against 6
    assert q_length_form(form(Q, 1), form(Q, 1, 1)).n == 2


def test_q_length_form_obstruction():
    r = q_length_form(form(Q, 1), form(Q, -1))
    assert r.infinite
    with pytest.raises(FormError):
        q_length_form(form(Q, 1), form(Reals(), 1))


def test_residue_obstruction_on_laurent_tower():
    F = Laurent(Laurent(Reals()))
    q = form(F, 1, "t", "t2", "-t t2")
    r = sublevel(q)
    assert r.infinite
    assert isinstance(r.certificate, ResidueObstruction)
    # no single ordering makes q definite
    assert all(abs(q.signature(o)) < q.dim for o in F.orderings())


@pytest.mark.parametrize("field", [FiniteField(3), FiniteField(5), FiniteField(7), PAdics(2), PAdics(3), PAdics(5)], ids=str)
def test_levels_match_brute_force(field):
    iso = _oracle_for(field)
    reps = classes(field)
    one = field.one()
    for dim in (1, 2):
        for cs in itertools.combinations_with_replacement(reps, dim):
            q = Form(field, cs)
            if iso(list(cs)):
                continue
            assert sublevel(q).n == _least(lambda n: iso(list(cs) * (n + 1)), 0)
            assert level(q).n == _least(lambda n: iso([one] + list(cs) * n), 1)
            for a in reps:
                expected = _least(lambda n: iso(list(cs) * n + [field.neg(a)]), 1)
                assert q_length(q, a).n == expected, (q, a)


def test_pythagoras_for_qp7():
    p = pythagoras_q(form(PAdics(7), 1))
    assert p.exact and p.value in (2, 3)
    assert p.value - 1 <= 2 <= p.value


@pytest.mark.parametrize("field", FINITE_CLASS_FIELDS + [Q], ids=str)
def test_sublevel_invariants(field):
    rng = random.Random(str(field) + "sub")
    s_field = sublevel(form(field, 1)).as_number()
    for _ in range(25):
        q = random_form(field, rng.randint(1, 4), rng)
        if is_isotropic(q):
            assert sublevel(q).n == 0
            continue
        s = sublevel(q)
        for a in classes(field)[:8]:
            assert sublevel(scale(a, q)) == s
        sub = Form(field, q.coeffs[: rng.randint(1, q.dim)])
        assert s.as_number() <= sublevel(sub).as_number()
        if not field.formally_real:
            assert 1 <= s.n <= s_field
        if s.finite:
            lev = level(q)
            assert lev.finite and lev.n <= s.n + 1


def test_relation_suite_examples():
    for q in (form(PAdics(7), 1), form(Laurent(FiniteField(5)), 1, "t")):
        checks = relation_suite(q)
        assert all(c.passed for c in checks), [c for c in checks if not c.passed]
    with pytest.raises(FormError):
        relation_suite(form(Q, 1, -1))


def test_finite_results_carry_checks():
    r = sublevel(form(PAdics(7), 1))
    assert r.checks
    assert str(r) == "2" and r.as_number() == 2
    assert math.isinf(level(form(Q, 1)).as_number())
