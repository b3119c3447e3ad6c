from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import count_words_avoiding
from ncdef.ncfree import (
    GeneratorSet,
    NCPoly,
    RelationError,
    abelianization_dims,
    commutators,
    free_dims,
    idempotent,
    ideal_degree_span,
    nc_mul,
    parse_ncpoly,
    quotient_ring,
    relabel,
    relations_from_json,
    relations_to_json,
    span_mismatch,
)

XY = GeneratorSet(("x", "y"))
XYZ = GeneratorSet(("x", "y", "z"))
TWO = GeneratorSet(("t12", "t21"), 2, (1, 2), (2, 1))


def words_up_to(gens: GeneratorSet, n: int):
    return [w for d in range(n + 1) for w in gens.words(d)]


@st.composite
def polys(draw, gens=XY, max_len=3, min_degree=0):
    words = [w for w in words_up_to(gens, max_len) if len(w) >= min_degree and (min_degree == 0 or w[0] >= 0)]
    chosen = draw(st.lists(st.sampled_from(words), max_size=5))
    return NCPoly(gens, {w: draw(st.integers(-3, 3)) for w in chosen})


def monomial(gens, *names):
    return NCPoly(gens, {tuple(gens.index(n) for n in names): 1})


@given(polys(), polys(), polys())
def test_multiplication_is_associative(a, b, c):
    assert nc_mul(nc_mul(a, b), c) == nc_mul(a, nc_mul(b, c))


@given(polys(), polys(), polys())
def test_multiplication_distributes(a, b, c):
    assert nc_mul(a, b + c) == nc_mul(a, b) + nc_mul(a, c)


@given(polys())
def test_unit(a):
    one = XY.unit()
    assert nc_mul(one, a) == a == nc_mul(a, one)


@given(polys(TWO), polys(TWO), polys(TWO))
def test_pointed_multiplication_is_associative(a, b, c):
    assert nc_mul(nc_mul(a, b), c) == nc_mul(a, nc_mul(b, c))


def test_pointed_products_respect_composability():
    t12, t21 = monomial(TWO, "t12"), monomial(TWO, "t21")
    assert not nc_mul(t12, t12)
    assert nc_mul(t12, t21).terms == {(0, 1): 1}
    e1, e2 = NCPoly(TWO, {idempotent(1): 1}), NCPoly(TWO, {idempotent(2): 1})
    assert nc_mul(e1, t12) == t12 and not nc_mul(e2, t12)
    assert nc_mul(t12, e2) == t12 and not nc_mul(t12, e1)
    assert nc_mul(TWO.unit(), t21) == t21
    assert TWO.word_counts(3) == count_words_avoiding(2, [], 3, [(1, 2), (2, 1)], points=2)


def test_slices_of_commutation_relations():
    xy, yx = monomial(XY, "x", "y"), monomial(XY, "y", "x")
    slices = ideal_degree_span([xy, yx], 3)
    assert [len(s) for s in slices] == [0, 0, 2, 6]
    assert quotient_ring(XY, [xy, yx], 3).filtration_dims == [1, 2, 2, 2]


forbidden_sets = st.lists(st.lists(st.integers(0, 1), min_size=2, max_size=3).map(tuple), min_size=1, max_size=3)


@given(forbidden_sets, st.integers(2, 6))
def test_monomial_quotients_match_word_enumeration(forbidden, n):
    rels = [NCPoly(XY, {w: 1}) for w in forbidden]
    ring = quotient_ring(XY, rels, n)
    assert ring.filtration_dims == count_words_avoiding(2, forbidden, n)


@given(st.lists(polys(XY, 3, 2).filter(bool).map(lambda p: p.part(2)).filter(bool), min_size=1, max_size=3), st.integers(2, 5))
def test_slices_complement_quotient(rels, n):
    ring = quotient_ring(XY, rels, n)
    slices = ideal_degree_span(rels, n)
    assert [len(s) + q for s, q in zip(slices, ring.filtration_dims)] == free_dims(XY, n)


@given(st.lists(polys(XY, 3, 2).filter(bool), min_size=1, max_size=2), st.integers(2, 4))
def test_truncation_is_stable(rels, n):
    small = quotient_ring(XY, rels, n)
    big = quotient_ring(XY, rels, n + 1)
    assert big.filtration_dims[: n + 1] == small.filtration_dims


@given(st.lists(polys(XY, 3, 2).filter(bool), min_size=1, max_size=2), polys(), polys())
def test_normal_form_is_linear_projection(rels, a, b):
    ring = quotient_ring(XY, rels, 4)
    na = ring.normal_form(a)
    assert ring.normal_form(na) == na
    assert ring.normal_form(a + b) == na + ring.normal_form(b)
    for rho in rels:
        assert ring.is_zero(rho)
        assert ring.is_zero(nc_mul(monomial(XY, "x"), rho))


def test_quotient_multiplication_is_associative():
    rels = [monomial(XY, "x", "x"), NCPoly(XY, {(0, 1): 1, (1, 0): -1, (1, 1, 1): 2})]
    ring = quotient_ring(XY, rels, 4)
    assert ring.associativity_defects() == []


def test_weighted_plane_ring_dims():
    x2 = monomial(XY, "x", "x")
    y3 = monomial(XY, "y", "y", "y")
    ring = quotient_ring(XY, [x2, y3], 12)
    assert ring.filtration_dims == count_words_avoiding(2, [(0, 0), (1, 1, 1)], 12)
    assert all(ring.filtration_dims)


def test_abelianization():
    x2 = monomial(XY, "x", "x")
    y3 = monomial(XY, "y", "y", "y")
    ring = quotient_ring(XY, [x2, y3] + commutators(XY), 6)
    # commutative k[x, y]/(x^2, y^3) has monomials x^a y^b, a < 2, b < 3
    assert ring.filtration_dims == [1, 2, 2, 1, 0, 0, 0]
    assert abelianization_dims(quotient_ring(XY, [x2, y3], 6)) == ring.filtration_dims


def test_relations_of_low_degree_are_refused():
    with pytest.raises(RelationError):
        quotient_ring(XY, [monomial(XY, "x")], 3)


@given(polys())
def test_string_round_trip(p):
    assert parse_ncpoly(XY, str(p)) == p


@given(polys(TWO))
def test_json_round_trip_pointed(p):
    assert NCPoly.from_json(TWO, json.loads(json.dumps(p.to_json()))) == p


def test_generator_set_json():
    for g in (XY, TWO):
        assert GeneratorSet.from_json(json.loads(json.dumps(g.to_json()))) == g


def test_parse_examples():
    p = parse_ncpoly(XYZ, "2*x*y - y*x/3 + (x - z)*z + 1/2*x**2")
    assert p.terms == {(0, 1): 2, (1, 0): Fraction(-1, 3), (0, 2): 1, (2, 2): -1, (0, 0): Fraction(1, 2)}


@given(st.lists(polys(XYZ, 2, 2).filter(bool), min_size=1, max_size=3))
def test_relation_file_round_trip(rels):
    gens, back = relations_from_json(json.loads(json.dumps(relations_to_json(XYZ, rels))))
    assert gens == XYZ and back == rels


@given(st.lists(polys(XYZ, 3, 2).filter(bool), min_size=2, max_size=4), st.integers(1, 3))
def test_span_comparison(rels, c):
    mixed = [rels[0] + rels[1].scale(c)] + rels[1:]
    assert span_mismatch(rels, mixed, 3) is None
    perm = GeneratorSet(("z", "x", "y"))
    assert span_mismatch(rels, [relabel(p, perm) for p in rels], 3, XYZ) is None
    extra = NCPoly(XYZ, {(0, 0, 0): 1})
    d = span_mismatch(rels, rels + [extra], 3)
    assert d is None or d == 3
