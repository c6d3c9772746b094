from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from joindeg.bivar import S_GT_T, T_GT_S, BivarSystem, count_solutions, eliminant, is_zero_dimensional, lex_groebner_2var
from joindeg.errors import NotZeroDimensional, ShearDisagreement
from joindeg.fields import PrimeField, Rationals
from joindeg.poly import BiPoly, UniPoly, distinct_root_count

Q = Rationals()


def vars_(field=Q):
    return BiPoly.s(field), BiPoly.t(field), BiPoly.const(field, 1)


def system(*gens):
    return BivarSystem(tuple(gens))


def test_needs_two_generators():
    s, t, one = vars_()
    with pytest.raises(ValueError):
        BivarSystem((s,))


def test_groebner_already_reduced():
    s, t, one = vars_()
    basis = lex_groebner_2var(system(s - one, t - one * 2))
    assert set(basis) == {s - one, t - one * 2}


def test_groebner_hand_example():
    s, t, one = vars_()
    basis = lex_groebner_2var(system(s * t - one, s * s - one), T_GT_S)
    assert s * s - one in basis
    assert t - s in basis
    assert basis[-1] == s * s - one  # eliminant last


def test_groebner_inconsistent():
    s, t, one = vars_()
    assert lex_groebner_2var(system(s, s - one)) == [one]


def test_eliminant_examples():
    s, t, one = vars_()
    assert eliminant(system(s - one * 3, t * t - t), "s") == UniPoly(Q, [-3, 1])
    assert eliminant(system(s * s - one, t - s), "t") == UniPoly(Q, [-1, 0, 1])
    e = eliminant(system(s, s - one), "s")
    assert e == UniPoly(Q, [1]) and distinct_root_count(e) == 0


def test_not_zero_dimensional():
    s, t, one = vars_()
    sys_ = system(s * t, s * s * t)
    assert not is_zero_dimensional(sys_)
    with pytest.raises(NotZeroDimensional):
        count_solutions(sys_, random.Random(0))


@pytest.mark.parametrize(
    "build, expected",
    [
        (lambda s, t, one: (s * s - one, t * t - one), (4, 2, 2)),
        (lambda s, t, one: (s - one, t - one), (1, 1, 1)),
        (lambda s, t, one: (s * s - one, t - s), (2, 2, 2)),
    ],
)
def test_count_examples(build, expected):
    sys_ = system(*build(*vars_()))
    c = count_solutions(sys_, random.Random(7))
    assert (c.P, c.S, c.T) == expected
    assert c.certified


def test_count_irrational_solutions():
    # s^2 = 2, t^2 = 3: four closure points, none rational
    s, t, one = vars_()
    c = count_solutions(system(s * s - one * 2, t * t - one * 3), random.Random(1))
    assert (c.P, c.S, c.T) == (4, 2, 2)


def test_shear_certificate_recorded():
    s, t, one = vars_()
    c = count_solutions(system(s * s - one, t * t - one * 4), random.Random(2))
    assert len(c.shears) == 2 and c.shears[0] != c.shears[1]


def test_too_small_field_cannot_certify():
    # over F_2 the shear lam = 1 merges (0,0)/(1,1) and (0,1)/(1,0)
    F = PrimeField(2)
    s, t, one = vars_(F)
    with pytest.raises(ShearDisagreement):
        count_solutions(system(s * s + s, t * t + t), random.Random(0), retries=2)


def _planted(field, rng, npts):
    """A zero-dimensional system whose solutions are npts given points (s_i, t_i)."""
    pts = set()
    while len(pts) < npts:
        pts.add((rng.randrange(-20, 20), rng.randrange(-20, 20)))
    pts = sorted(pts)
    s, t, one = vars_(field)
    xs = sorted({a for a, _ in pts})
    f = one
    for a in xs:
        f = f * (s - one * a)
    # Lagrange-free: interpolate t as a function of s only when s-coords are distinct
    gens = [f]
    for a in xs:
        col = [b for x, b in pts if x == a]
        g = one
        for b in col:
            g = g * (t - one * b)
        others = one
        for c in xs:
            if c != a:
                others = others * (s - one * c)
        gens.append(g * others)
    return pts, gens


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_count_matches_planted_points(seed, npts):
    rng = random.Random(seed)
    pts, gens = _planted(Q, rng, npts)
    if len(gens) < 2:
        return
    c = count_solutions(BivarSystem(tuple(gens)), rng)
    assert c.P == len(pts)
    assert c.S == len({a for a, _ in pts})
    assert c.T == len({b for _, b in pts})
    assert max(c.S, c.T) <= c.P <= c.S * c.T


@pytest.mark.parametrize("p", [31, 101])
def test_count_matches_enumeration_over_fp(p):
    F = PrimeField(p)
    rng = random.Random(p)
    for _ in range(15):
        pts, gens = _planted(F, rng, rng.randint(1, 5))
        pts = {(a % p, b % p) for a, b in pts}
        found = {
            (a, b) for a, b in product(range(p), repeat=2) if all(F.is_zero(g.evaluate(a, b)) for g in gens)
        }
        assert found == pts
        c = count_solutions(BivarSystem(tuple(gens)), rng)
        assert (c.P, c.S, c.T) == (len(found), len({a for a, _ in found}), len({b for _, b in found}))


def test_both_orders_agree_on_eliminants():
    s, t, one = vars_()
    sys_ = system(s * s + t * t - one * 5, s * t - one * 2)
    b1 = lex_groebner_2var(sys_, T_GT_S)
    b2 = lex_groebner_2var(sys_, S_GT_T)
    assert b1[-1].univariate("s") is not None
    assert b2[-1].univariate("t") is not None
    assert count_solutions(sys_, random.Random(3)).P == 4
