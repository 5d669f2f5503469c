import math

import pytest

from corpus import Q
from wittforge.fields import PAdics, Reals
from wittforge.forms import form
from wittforge.levels import level
from wittforge.valuesets import (
    INF,
    Bracket,
    ValueSetError,
    admissible_levels,
    admissible_sublevels,
    inadmissible_levels,
    inadmissible_sublevels,
    maxsplit_sublevels,
    mset_values,
    pfister_exact_level,
    pfister_neighbor_brackets,
    quadratic_ext_bracket,
    report_for_form,
    signature_full_sets,
    signature_sets,
    value_set_report,
)

EXCLUDED_DIM6 = {3, 6, 7, 11, 12, 13, 14, 15} | set(range(22, 32))


def two_powers(limit):
    return {2**k for k in range(limit.bit_length()) if 2**k <= limit}


def test_admissible_sublevels_examples():
    assert admissible_sublevels(3, INF, 25) == {0, 1, 2, 5, 10, 21}
    assert admissible_sublevels(4, 3) == {0, 1, 2, 3}
    assert admissible_sublevels(8, INF, 64) == {0} | two_powers(64)
    assert 5 in admissible_sublevels(3, INF, 8)
    with pytest.raises(ValueSetError):
        admissible_sublevels(1, INF, 8)
    with pytest.raises(ValueSetError):
        admissible_sublevels(3, INF)


def test_admissible_levels_examples():
    assert admissible_levels(3, INF, 100) == {1, 2, 3, 6, 11, 22, 43, 86}
    assert admissible_levels(1, 40) == two_powers(40) | {40}
    assert admissible_levels(5, INF, 14) == {1, 2, 4, 7, 13}


def test_inadmissible_sublevels_examples():
    assert inadmissible_sublevels(6, 2, 32, 32) == EXCLUDED_DIM6
    assert inadmissible_sublevels(6, 2, 4, 8) == {3}
    assert inadmissible_sublevels(8, 1, 1, 8) == set()


def test_maxsplit_sublevels_examples():
    assert maxsplit_sublevels(6, 2, 4) == {0, 1, 2}
    assert maxsplit_sublevels(3, 1, 8) == {0, 1, 2, 5}
    assert maxsplit_sublevels(8, 4, 64) == {0} | two_powers(32)


def test_mset_values():
    assert mset_values(1, 1000) == two_powers(1000)
    assert mset_values(2, 1000) == two_powers(1000)


def test_admissible_never_excluded():
    for dim in range(2, 65):
        cap = dim - 2 ** ((dim - 1).bit_length() - 1)
        adm_sub = admissible_sublevels(dim, INF, 2**10)
        adm_lev = admissible_levels(dim, INF, 2**10)
        for i1 in range(1, cap + 1):
            assert not adm_sub & inadmissible_sublevels(dim, i1, INF, 2**10), (dim, i1)
            assert not adm_lev & inadmissible_levels(dim, i1, INF, 2**10), (dim, i1)
            if i1 == cap:
                assert not maxsplit_sublevels(dim, i1, 2**10) & inadmissible_sublevels(dim, i1, 2**10, 2**10)


@pytest.mark.parametrize("dim", [2, 4, 8, 16])
def test_pfister_level_survivors_are_two_powers(dim):
    s = 16
    survivors = set(range(1, s + 1)) - inadmissible_levels(dim, dim // 2, s, s)
    assert survivors == two_powers(s)
    rep = value_set_report("level", dim, dim // 2, dim // 2, s, s, sublevel_bound=s, represents_one=True)
    assert set(rep.admissible) | rep.undecided == two_powers(s)


def test_inadmissible_levels_guard():
    # dim 6, i1 2: only 2**n with 6 <= 2**(n-1) * 2 contribute
    assert inadmissible_levels(6, 2, 4, 16) == set()
    assert inadmissible_levels(6, 2, 8, 16) == {7}


def test_report_covers_range():
    rep = value_set_report("sublevel", 6, 2, 2, 32, 40)
    assert set(rep.excluded) >= EXCLUDED_DIM6
    assert not set(rep.admissible) & set(rep.excluded)
    assert set(rep.admissible) | set(rep.excluded) | rep.undecided == set(range(0, 41))
    d = rep.as_dict()
    assert d["kind"] == "sublevel" and d["horizon"] == 40
    with pytest.raises(ValueSetError):
        value_set_report("colour", 6, 2, 2, 32, 40)


def test_signature_sets():
    r = signature_full_sets(form(Q, -1, -1))
    lev = level(form(Q, -1, -1)).n
    assert set(r.admissible) == set(range(1, lev + 1))
    near = signature_sets(3, "near-definite", 4, horizon=8)
    assert set(near.admissible) == {0, 1, 2, 4}
    assert set(near.excluded) == {3, 5, 6, 7, 8}
    assert near.equality is True
    with pytest.raises(ValueSetError):
        signature_full_sets(form(Q, 1, 1, 1))
    with pytest.raises(ValueSetError):
        signature_sets(3, "definite", 4, horizon=8)


def test_report_for_form_runs():
    rep = report_for_form(form(Reals(), 1, 1, 1), "sublevel", horizon=16)
    assert 5 in rep.admissible and 3 in rep.excluded


def test_neighbor_brackets():
    b = pfister_neighbor_brackets(8, 5, sublevel_q=2)
    assert (b.sublevel.lo, b.sublevel.hi) == (2, 3)
    b = pfister_neighbor_brackets(8, 8, sublevel_q=3, level_q=3)
    assert b.sublevel == Bracket(3, 3)
    b = pfister_neighbor_brackets(4, 3, level_q=1)
    assert (b.level.lo, b.level.hi) == (1, 2)
    with pytest.raises(ValueSetError):
        pfister_neighbor_brackets(8, 4, sublevel_q=1)
    with pytest.raises(ValueSetError):
        pfister_neighbor_brackets(6, 4, sublevel_q=1)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_neighbor_bracket_attained_over_qp(p):
    F = PAdics(p)
    u = min(c for c in F.square_classes() if c not in (1, p))
    q = form(F, 1, -u, -p, u * p)
    tau = form(F, -u, -p, u * p)
    s_q, s_tau = level(q).n, level(tau).n
    assert (s_q, s_tau) == (1, 2)
    b = pfister_neighbor_brackets(4, 3, level_q=s_q)
    assert s_tau in b.level and s_tau == b.level.hi


def test_quadratic_ext_bracket():
    assert quadratic_ext_bracket(3) == Bracket(1, 3)
    assert quadratic_ext_bracket(1) == Bracket(1, 1)
    assert quadratic_ext_bracket(8) == Bracket(4, 15)
    with pytest.raises(ValueSetError):
        quadratic_ext_bracket(0)


def test_pfister_exact_level():
    assert [pfister_exact_level(n) for n in range(1, 17)] == [1, 1, 2, 2, 4, 4, 4, 4, 8, 8, 8, 8, 8, 8, 8, 8]
    for n in range(2, 200):
        r = next(r for r in range(20) if 2**r < n <= 2 ** (r + 1))
        assert pfister_exact_level(n) == 2**r
        assert pfister_exact_level(n) in quadratic_ext_bracket(n) or n > 2 ** (r + 1) - 1
    with pytest.raises(ValueSetError):
        pfister_exact_level(0)


def test_dim3_level_closed_form():
    h = 2**20
    closed = {1} | {(2 ** (2 * k) + 2) // 3 for k in range(1, 20)} | {(2 ** (2 * k + 1) + 1) // 3 for k in range(0, 20)}
    assert admissible_levels(3, INF, h) == {m for m in closed if m <= h}
    assert math.isinf(INF)
