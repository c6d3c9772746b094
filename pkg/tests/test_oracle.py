from __future__ import annotations

import random

import pytest

from joindeg.errors import EnumerationBudgetExceeded, FieldMismatch, NoJoinLineThroughZ
from joindeg.fields import PrimeField, Rationals
from joindeg.instances import load_bundled
from joindeg.join import degree_ej, fiber_census, terracini_dimension
from joindeg.oracle import (
    GF,
    covered_points,
    enumerate_points,
    extension_for,
    general_censuses,
    generic_line_profile,
    oracle_census,
    oracle_degree_slice,
    oracle_dimension,
    sample_oracle_points,
)
from joindeg.variety import ParamVariety

Q = Rationals()
CUBIC = ["s0^3", "s0^2*s1", "s0*s1^2", "s1^3"]


def var(components, field, k=1):
    return ParamVariety.from_strings(field, k, components)


def inst(name):
    return load_bundled(name).instance


# -- finite fields


@pytest.mark.parametrize("p, k", [(2, 1), (2, 4), (3, 3), (5, 2), (31, 1)])
def test_gf_axioms(p, k):
    gf = GF(p, k)
    rng = random.Random(p * 10 + k)
    assert gf.q == p**k
    for _ in range(500):
        a, b, c = (rng.randrange(gf.q) for _ in range(3))
        assert gf.add(gf.add(a, b), c) == gf.add(a, gf.add(b, c))
        assert gf.mul(gf.mul(a, b), c) == gf.mul(a, gf.mul(b, c))
        assert gf.mul(a, gf.add(b, c)) == gf.add(gf.mul(a, b), gf.mul(a, c))
        assert gf.sub(a, a) == 0
        if a:
            assert gf.mul(a, gf.inv(a)) == 1
    # Frobenius is additive and the multiplicative group has order q - 1
    for a in range(gf.q):
        assert gf.power(a, gf.q) == a
        b = (a * 7 + 3) % gf.q
        assert gf.power(gf.add(a, b), p) == gf.add(gf.power(a, p), gf.power(b, p))


def test_extension_for():
    assert extension_for(2, 16).q == 16
    assert extension_for(5, 16).q == 25
    assert extension_for(31, 16).q == 31


def test_projective_point_count():
    gf = GF(3)
    assert len(list(gf.projective_points(2))) == 13
    assert len(list(GF(2, 2).projective_points(1))) == 5


# -- point tables


def test_enumerate_examples():
    assert len(enumerate_points(var(["s0", "s1", "0"], PrimeField(3)))) == 4
    assert len(enumerate_points(var(CUBIC, PrimeField(5)))) == 6
    assert len(enumerate_points(var(["s0^2", "s0*s1", "s1^2"], PrimeField(2)))) == 3


def test_enumerate_errors():
    with pytest.raises(FieldMismatch):
        enumerate_points(var(CUBIC, Q))
    with pytest.raises(FieldMismatch):
        enumerate_points(var(CUBIC, PrimeField(5)), GF(7))
    with pytest.raises(EnumerationBudgetExceeded):
        enumerate_points(var(CUBIC, PrimeField(103)))
    with pytest.raises(EnumerationBudgetExceeded):
        enumerate_points(var(CUBIC, PrimeField(31)), budget=10)


def test_table_size_bound():
    for p in (2, 3, 7, 11):
        V = var(["s0^2", "s0*s1", "s1^2", "s0*s2", "s2^2", "s1*s2"], PrimeField(p), k=2)
        assert len(enumerate_points(V)) <= p * p + p + 1


# -- censuses


def _tables(i):
    Xt = enumerate_points(i.X)
    return Xt, (Xt if i.same_forms else enumerate_points(i.Y))


def test_census_skew_lines_f7():
    i = inst("skew-lines").reduce_mod(7)
    Xt, Yt = _tables(i)
    for z in sample_oracle_points(Xt, Yt, random.Random(0), 5):
        c = oracle_census(Xt, Yt, z)
        assert (c.b, c.profile, c.P) == (1, (1, 1), 1)


def test_census_twisted_cubic_f31():
    i = inst("twisted-cubic-secant").reduce_mod(31)
    Xt, Yt = _tables(i)
    for z in sample_oracle_points(Xt, Yt, random.Random(1), 5):
        c = oracle_census(Xt, Yt, z)
        assert (c.b, c.profile, c.P, c.S, c.T) == (1, (2, 2), 4, 2, 2)
        assert c.general


def test_census_point_on_x_is_flagged():
    i = inst("skew-lines").reduce_mod(7)
    Xt, Yt = _tables(i)
    c = oracle_census(Xt, Yt, Xt.points[0])
    assert not c.general
    assert c.b == len(Yt)  # every point of Y joins z


def test_census_without_join_line():
    i = inst("disjoint-conics").reduce_mod(3)
    Xt, Yt = _tables(i)
    hit = False
    for z in GF(3).projective_points(4):
        try:
            oracle_census(Xt, Yt, z)
        except NoJoinLineThroughZ:
            hit = True
            break
    assert hit


def test_census_fiber_is_sum_of_products():
    i = inst("quartic-cone").reduce_mod(31)
    Xt, Yt = _tables(i)
    for z in sample_oracle_points(Xt, Yt, random.Random(2), 5):
        c = oracle_census(Xt, Yt, z)
        assert c.P == sum(a * b for a, b in c.profiles)


@pytest.mark.parametrize(
    "name", ["skew-lines", "twisted-cubic-secant", "disjoint-conics", "line-conic-p4", "cubic-point", "quartic-cone"]
)
def test_oracle_census_matches_exact_over_f31(name):
    i = inst(name).reduce_mod(31)
    exact = fiber_census(i, i.rng("census"))
    Xt, Yt = _tables(i)
    censuses, _ = general_censuses(Xt, Yt, random.Random(3), 5)
    for c in censuses:
        assert (c.b, c.P, c.S, c.T) == (exact.b, exact.P, exact.S, exact.T)
        assert c.profile == (exact.m_X, exact.m_Y)


def test_generic_line_profile():
    for name, prof in [("twisted-cubic-secant", (2, 2)), ("quartic-cone", (2, 1)), ("skew-lines", (1, 1))]:
        Xt, Yt = _tables(inst(name).reduce_mod(31))
        assert generic_line_profile(Xt, Yt, random.Random(0)) == prof


def test_special_points_of_double_cover_are_rejected():
    # X a line, Y a quartic projecting 2:1 from X onto a conic.  Points of the
    # conic plane lie on secants c c' (profile (1, 2), b = 1); points over the
    # two branch points have a single join line.  Neither is general.
    i = inst("line-quartic-double").reduce_mod(31)
    Xt, Yt = _tables(i)
    on_secant = oracle_census(Xt, Yt, (1, 10, 7, 0, 0))
    assert on_secant.profiles == ((1, 2),)
    over_branch = oracle_census(Xt, Yt, (0, 0, 1, 21, 30))
    assert (over_branch.b, over_branch.profiles) == (1, ((1, 1),))
    censuses, stats = general_censuses(Xt, Yt, random.Random(0), 5)
    assert all((c.b, c.P) == (2, 2) for c in censuses)
    assert stats["pool"] == 15


# -- dimension and degree


def test_dimension_skew_lines():
    d = oracle_dimension(inst("skew-lines"), [11, 31])
    assert d.dim == 3 and d.method == "growth" and not d.heuristic


def test_dimension_char2_conic_covers_the_plane():
    i = inst("char2-conic")
    assert len(covered_points(i, GF(2))) == 7
    assert oracle_dimension(i, [2]).dim == 2


def test_dimension_char5_curve():
    d = oracle_dimension(inst("char5-curve"), [5])
    assert d.dim == 3 and d.heuristic


@pytest.mark.parametrize(
    "name", ["skew-lines", "twisted-cubic-secant", "disjoint-conics", "line-conic", "line-conic-p4", "cubic-point",
             "quartic-cone"]
)
def test_dimension_matches_terracini(name):
    i = inst(name)
    assert oracle_dimension(i, [11, 31]).dim == terracini_dimension(i, random.Random(0))


def test_degree_slice_examples():
    assert oracle_degree_slice(inst("skew-lines"), 31, 3) == 1
    with pytest.raises(ValueError):
        oracle_degree_slice(inst("disjoint-conics"), 31, 3, trials=0)


@pytest.mark.parametrize("name", ["disjoint-conics", "line-conic-p4"])
def test_degree_slice_matches_exact(name):
    i = inst(name)
    assert oracle_degree_slice(i, 31, 3, rng=random.Random(4)) == degree_ej(i, i.rng("degree"))


def test_degree_slice_monotone_in_trials():
    i = inst("disjoint-conics")
    few = oracle_degree_slice(i, 11, 3, trials=5, rng=random.Random(5))
    many = oracle_degree_slice(i, 11, 3, trials=200, rng=random.Random(5))
    assert few <= many <= 4


def test_instance_field_mismatch():
    with pytest.raises(FieldMismatch):
        oracle_dimension(inst("char2-conic"), [3])
