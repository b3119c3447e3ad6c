from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import commutator_pattern_m2

from ncdef.defring import relations_from_products
from ncdef.fixtures import golden_relations
from ncdef.ncfree import span_mismatch
from ncdef.subvariety import (
    AnsatzError,
    AnsatzIdeal,
    build_ansatz,
    conic_p4,
    image_dimension,
    lines_pn,
    mixed_mul,
    normal_form,
    obstruction_relations,
    parse_mixed,
    quadratic_part_to_m2,
)

PARAMS = ["p", "q"]
SHEAF = ["u", "v"]


@pytest.fixture(scope="module")
def conic():
    return obstruction_relations(conic_p4(), cap=4)


mixed_terms = st.dictionaries(
    st.tuples(st.tuples(st.integers(0, 2), st.integers(0, 2)), st.lists(st.integers(0, 1), max_size=2).map(tuple)),
    st.integers(-2, 2).filter(bool).map(Fraction), max_size=4)


@given(mixed_terms, mixed_terms, mixed_terms)
def test_mixed_multiplication_is_associative(a, b, c):
    assert mixed_mul(mixed_mul(a, b), c) == mixed_mul(a, mixed_mul(b, c))


def test_parameters_do_not_commute_and_sheaf_variables_are_central():
    a = parse_mixed("p*q*u", PARAMS, SHEAF)
    b = parse_mixed("q*p*u", PARAMS, SHEAF)
    assert a != b
    assert parse_mixed("u*p", PARAMS, SHEAF) == parse_mixed("p*u", PARAMS, SHEAF)
    assert parse_mixed("(p - q/2)*v**2 + 3*u", PARAMS, SHEAF) == {
        ((0, 2), (0,)): 1, ((0, 2), (1,)): Fraction(-1, 2), ((1, 0), ()): 3}


@pytest.mark.parametrize("ansatz", [lines_pn(3), lines_pn(5), conic_p4()], ids=["p3", "p5", "conic"])
def test_generators_reduce_to_zero(ansatz):
    for g in ansatz.generators:
        assert normal_form(g, ansatz, 4) == {}


@given(mixed_terms)
def test_normal_form_is_idempotent(p):
    ansatz = build_ansatz(PARAMS, SHEAF, ["u + p*v"], ["u"])
    nf = normal_form(p, ansatz, 3)
    assert normal_form(nf, ansatz, 3) == nf
    assert all(m[0] == 0 for m, _ in nf)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_lines_relation_count(n):
    res = obstruction_relations(lines_pn(n), cap=3)
    assert len(res.relations) == 3 * (n - 1) * (n - 2) // 2
    assert all(r.degrees() == [2] for r in res.relations)
    assert res.closed


def test_lines_p3_matches_golden():
    res = obstruction_relations(lines_pn(3), cap=3)
    gens, golden = golden_relations("lines_p3_relations.json")
    assert span_mismatch(res.relations, golden, 3, res.relations[0].gens) is None


@given(st.permutations(range(3)))
def test_generator_order_does_not_matter(perm):
    base = lines_pn(4)
    data = base.to_json()
    data["generators"] = [data["generators"][i] for i in perm]
    data["leads"] = [data["leads"][i] for i in perm]
    shuffled = AnsatzIdeal.from_json(data)
    a = obstruction_relations(base, cap=3).relations
    b = obstruction_relations(shuffled, cap=3).relations
    assert span_mismatch(a, b, 3, base.params) is None


def test_ansatz_json_round_trip():
    for ansatz in (lines_pn(3), conic_p4()):
        text = json.dumps(ansatz.to_json())
        back = AnsatzIdeal.from_json(json.loads(text))
        assert back.to_json() == ansatz.to_json()
        assert back.generators == ansatz.generators


def test_bad_ansatz():
    with pytest.raises(AnsatzError):
        build_ansatz(PARAMS, SHEAF, ["u + p*v"], [])
    with pytest.raises(AnsatzError):
        build_ansatz(PARAMS, SHEAF, ["u + p*v"], ["u"], ["u"])
    with pytest.raises(AnsatzError):
        lines_pn(1)


def test_conic_relations(conic):
    assert len(conic.relations) == 19
    assert conic.max_degree == 3
    assert conic.closed
    gens, golden = golden_relations("conic_p4_relations.json")
    assert span_mismatch(conic.relations, golden, 3, gens) is None
    # the cubic correction of the first relation is present
    first = [r for r in conic.relations if r.part(2) == golden[0].part(2)]
    assert first and first[0].part(3) == golden[0].part(3)


def test_conic_quadratic_parts_match_m2_pattern(conic):
    data = quadratic_part_to_m2(conic.relations)
    assert image_dimension(data) == 19 == len(data.ext2)
    pattern = commutator_pattern_m2()
    derived = relations_from_products(data, 2)
    assert span_mismatch(derived, pattern, 2, pattern[0].gens) is None


def test_low_cap_keeps_only_quadratic_parts():
    res = obstruction_relations(conic_p4(), cap=2)
    assert res.max_degree == 2
    assert len(res.relations) == 19
