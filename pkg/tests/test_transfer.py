from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import ainf_relation_failures, morphism_relation_failures
from ncdef.dga import DGAlgebra, cohomology
from ncdef.fixtures import exterior_dga, massey_dga, random_dgas, shipped_dgas, truncated_polynomial_dga
from ncdef.transfer import (
    AInfinityAlgebra,
    TabulatedMorphism,
    TransferConsistencyError,
    build_g,
    check_ainf_relations,
    check_morphism_relations,
    compose,
    composition_sign,
    compositions,
    dga_as_ainf,
    identity_morphism,
    is_identity,
    kadeishvili,
)

SHIPPED = shipped_dgas()
ORDER = 5


def _transfer(a: DGAlgebra, n: int):
    return kadeishvili(a, cohomology(a), n)


@given(st.integers(1, 8))
def test_composition_count(n):
    comps = list(compositions(n))
    assert len(comps) == 2 ** (n - 1)
    assert all(sum(c) == n and min(c) >= 1 for c in comps)
    assert len(set(comps)) == len(comps)


@given(st.lists(st.integers(1, 5), min_size=1, max_size=5))
def test_composition_sign_formula(parts):
    parity = sum(parts[j] * (parts[k] + 1) for j, k in itertools.combinations(range(len(parts)), 2))
    assert composition_sign(tuple(parts)) == (-1) ** parity


@pytest.mark.parametrize("name,a", SHIPPED, ids=[n for n, _ in SHIPPED])
def test_fixture_dgas_satisfy_relations(name, a):
    alg = dga_as_ainf(a)
    for n in range(1, 4):
        assert ainf_relation_failures(alg.ops, a.space.degrees, n) == []


@pytest.mark.parametrize("name,a", SHIPPED, ids=[n for n, _ in SHIPPED])
def test_transfer_on_fixtures(name, a):
    res = _transfer(a, ORDER)
    H = res.minimal
    tab = res.f.tabulate().maps
    assert check_ainf_relations(H, ORDER) == {}
    assert check_morphism_relations(res.f, ORDER) == {}
    for n in range(1, ORDER + 1):
        assert ainf_relation_failures(H.ops, H.space.degrees, n) == []
        assert morphism_relation_failures(H.ops, H.space.degrees, a.d, a.mul, tab, n) == []


@given(st.integers(0, 10**6))
def test_transfer_on_random_dgas(seed):
    a = random_dgas(seed, 1)[0][1]
    res = _transfer(a, 4)
    H = res.minimal
    tab = res.f.tabulate().maps
    for n in range(1, 5):
        assert ainf_relation_failures(H.ops, H.space.degrees, n) == []
        assert morphism_relation_failures(H.ops, H.space.degrees, a.d, a.mul, tab, n) == []
    g = build_g(res, 4)
    assert is_identity(compose(g, res.f), 4)


def test_sign_error_is_detected_by_both_checkers():
    a = massey_dga()
    res = _transfer(a, 4)
    H = res.minimal.space
    ops = {k: dict(v) for k, v in res.minimal.ops.items()}
    ops[3] = {k: {j: -c for j, c in v.items()} for k, v in ops[3].items()}
    tab = res.f.tabulate().maps
    assert morphism_relation_failures(ops, H.degrees, a.d, a.mul, tab, 3) != []
    flipped = TabulatedMorphism(AInfinityAlgebra(H, 4, ops), res.f.target, 4, tab)
    assert check_morphism_relations(flipped, 4) != {}


def test_massey_product_is_detected():
    res = _transfer(massey_dga(), 4)
    m3 = res.minimal.ops[3]
    assert m3, "the Massey DGA must have a nonzero m_3"
    labels = res.minimal.space.labels
    assert {tuple(labels[i] for i in k) for k in m3} == {("h1_0", "h1_1", "h1_2")}


@given(st.integers(1, 5).map(Fraction), st.integers(1, 5).map(Fraction))
def test_massey_product_survives_rescaling(alpha, beta):
    res = _transfer(massey_dga(alpha, beta), 3)
    assert res.minimal.ops[3]


@pytest.mark.parametrize("a", [exterior_dga(2), exterior_dga(3), truncated_polynomial_dga(3)], ids=["ext2", "ext3", "poly3"])
def test_formal_algebras_have_no_higher_products(a):
    res = _transfer(a, 5)
    assert all(not res.minimal.ops.get(n) for n in range(3, 6))
    assert all(not res.f.tabulate().maps.get(n) for n in range(2, 6))


def test_inconsistent_input_raises():
    data = massey_dga().to_json()
    data["d"]["2"] = [["0", "0", "0", "1"]]  # breaks the Leibniz rule on a v
    a = DGAlgebra.from_json(data)
    with pytest.raises(TransferConsistencyError):
        kadeishvili(a, cohomology(a, validate=False), 4)


@pytest.mark.parametrize("name,a", SHIPPED, ids=[n for n, _ in SHIPPED])
def test_projection_inverts_inclusion(name, a):
    res = _transfer(a, 4)
    g = build_g(res, 4)
    for n in range(2, 5):
        assert not g.feasibility_defects(n)
    assert is_identity(compose(g, res.f), 4)


def test_identity_morphism():
    res = _transfer(massey_dga(), 3)
    ident = identity_morphism(res.minimal, 3)
    assert is_identity(ident, 3)
    assert is_identity(compose(ident, ident), 3)
