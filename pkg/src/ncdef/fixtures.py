"""Concrete data sets: product tables, DG algebras and model complexes."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from importlib import resources

from .defring import EndModel, MinimalAInfData, ModelComplex, end_dga, minimal_data_from_relations
from .dga import DGAlgebra, change_basis, subalgebra
from .graded import GradedSpace
from .linalg import Matrix, inverse
from .ncfree import GeneratorSet, NCPoly, relations_from_json

ONE = Fraction(1)


def load_data(name: str) -> dict:
    return json.loads(resources.files("ncdef.data").joinpath(name).read_text())


def golden_relations(name: str) -> tuple[GeneratorSet, list[NCPoly]]:
    """Relations stored in a packaged JSON file, renamed to the preset's generators."""
    return relations_from_json(load_data(name))


# ---------------------------------------------------------------------------
# minimal A-infinity data


def lines_pn_data(n: int) -> MinimalAInfData:
    """``m_2(v_{ij}, v_{i'k}) = sign * w_{i+i', {j,k}}``, the wedge product of normal directions."""
    if n < 2:
        raise ValueError("n >= 2")
    m = n - 1
    ext1 = [f"v0_{j}" for j in range(1, n)] + [f"v1_{j}" for j in range(1, n)]
    duals = [f"a{j}" for j in range(1, n)] + [f"b{j}" for j in range(1, n)]
    ext2, pos = [], {}
    for i in range(3):
        for j in range(1, n):
            for k in range(j + 1, n):
                pos[(i, j, k)] = len(ext2)
                ext2.append(f"w{i}_{j}{k}")
    t: dict = {}
    for i1 in range(2):
        for j in range(1, n):
            for i2 in range(2):
                for k in range(1, n):
                    if j == k:
                        continue
                    lo, hi = min(j, k), max(j, k)
                    sign = ONE if j < k else -ONE
                    t[(i1 * m + j - 1, i2 * m + k - 1)] = {pos[(i1 + i2, lo, hi)]: sign}
    return MinimalAInfData(ext1, ext2, {2: t}, duals=duals)


def conic_m2_data() -> MinimalAInfData:
    """``m_2(a_i, b_j) = -m_2(b_j, a_i) = d_{i+j}``, likewise ``e`` for ``(a, c)`` and ``f`` for ``(b, c)``."""
    names = [f"a{i}" for i in range(3)] + [f"b{i}" for i in range(3)] + [f"c{i}" for i in range(5)]
    idx = {nm: i for i, nm in enumerate(names)}
    ext2 = [f"d{k}" for k in range(5)] + [f"e{k}" for k in range(7)] + [f"f{k}" for k in range(7)]
    jdx = {nm: j for j, nm in enumerate(ext2)}
    t: dict = {}
    for left, right, out, n_right in (("a", "b", "d", 3), ("a", "c", "e", 5), ("b", "c", "f", 5)):
        for i in range(3):
            for j in range(n_right):
                w = jdx[f"{out}{i + j}"]
                t[(idx[f"{left}{i}"], idx[f"{right}{j}"])] = {w: ONE}
                t[(idx[f"{right}{j}"], idx[f"{left}{i}"])] = {w: -ONE}
    return MinimalAInfData(names, ext2, {2: t})


def conic_data(cap: int = 4) -> MinimalAInfData:
    """``m_2`` and ``m_3`` read off the extracted conic relations."""
    from .subvariety import conic_p4, obstruction_relations

    rels = obstruction_relations(conic_p4(), cap).relations
    return minimal_data_from_relations(rels)


def two_lines_data() -> MinimalAInfData:
    """Two lines meeting in a point: one extension class each way, ``m_2`` into the diagonal."""
    return MinimalAInfData(
        ["v12", "v21"], ["w11", "w22"],
        {2: {(0, 1): {0: ONE}, (1, 0): {1: ONE}}},
        points=2, ext1_labels=[(1, 2), (2, 1)], ext2_labels=[(1, 1), (2, 2)], duals=["t12", "t21"],
    )


def x2_y3_data() -> MinimalAInfData:
    """``x^2`` and ``y^3`` relations: ``m_2(x, x)`` and ``m_3(y, y, y)``."""
    return MinimalAInfData(["x", "y"], ["w2", "w3"], {2: {(0, 0): {0: ONE}}, 3: {(1, 1, 1): {1: ONE}}})


def free_data(g: int) -> MinimalAInfData:
    return MinimalAInfData([f"x{i}" for i in range(g)], [], {})


# ---------------------------------------------------------------------------
# DG algebras


def massey_dga(alpha=1, beta=1, with_unit: bool = True) -> DGAlgebra:
    """``du = alpha ab``, ``dv = beta bc``: ``<a, b, c>`` is a nontrivial Massey product."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    labels = ["a", "b", "c", "u", "v", "ab", "bc", "av", "uc", "abc"]
    degs = [1, 1, 1, 1, 1, 2, 2, 2, 2, 3]
    if with_unit:
        labels = ["1"] + labels
        degs = [0] + degs
    ix = {nm: i for i, nm in enumerate(labels)}
    mul = {}
    for x, y, z in (("a", "b", "ab"), ("b", "c", "bc"), ("a", "v", "av"), ("u", "c", "uc"),
                    ("ab", "c", "abc"), ("a", "bc", "abc")):
        mul[(ix[x], ix[y])] = {ix[z]: ONE}
    if with_unit:
        for nm in labels:
            mul[(0, ix[nm])] = {ix[nm]: ONE}
            mul[(ix[nm], 0)] = {ix[nm]: ONE}
    d = {ix["u"]: {ix["ab"]: alpha}, ix["v"]: {ix["bc"]: beta},
         ix["av"]: {ix["abc"]: -beta}, ix["uc"]: {ix["abc"]: alpha}}
    return DGAlgebra(GradedSpace(degs, labels), d, mul, {0: ONE} if with_unit else None)


def exterior_dga(g: int = 2) -> DGAlgebra:
    """Exterior algebra on ``g`` degree-one generators (``g <= 3``), zero differential."""
    import itertools

    subsets = [s for r in range(g + 1) for s in itertools.combinations(range(g), r)]
    idx = {s: i for i, s in enumerate(subsets)}
    mul = {}
    for s in subsets:
        for t in subsets:
            if set(s) & set(t):
                continue
            merged = s + t
            inversions = sum(1 for i in range(len(merged)) for j in range(i + 1, len(merged)) if merged[i] > merged[j])
            mul[(idx[s], idx[t])] = {idx[tuple(sorted(merged))]: -ONE if inversions % 2 else ONE}
    labels = ["".join(f"x{i}" for i in s) or "1" for s in subsets]
    return DGAlgebra(GradedSpace([len(s) for s in subsets], labels), {}, mul, {0: ONE})


def truncated_polynomial_dga(top: int = 3) -> DGAlgebra:
    """``k[x]/(x^(top+1))`` with ``|x| = 1`` and zero differential."""
    mul = {(i, j): {i + j: ONE} for i in range(top + 1) for j in range(top + 1) if i + j <= top}
    return DGAlgebra(GradedSpace(list(range(top + 1)), [f"x^{i}" for i in range(top + 1)]), {}, mul, {0: ONE})


# ---------------------------------------------------------------------------
# model complexes


def _matrix(rows, cols, entries: dict) -> Matrix:
    m = Matrix(rows, cols)
    for (i, j), x in entries.items():
        m[i, j] = x
    return m


def two_lines_complex() -> ModelComplex:
    """Per point ``p``: ``{e, u} -> {f, s} -> {g}`` with ``du = f``, ``ds = g``; cohomology ``k e`` in degree 0.

    Degree-0 basis ``e1 u1 e2 u2``, degree 1 ``f1 s1 f2 s2``, degree 2 ``g1 g2``.
    """
    d0 = _matrix(4, 4, {(0, 1): ONE, (2, 3): ONE})
    d1 = _matrix(2, 4, {(0, 1): ONE, (1, 3): ONE})
    return ModelComplex([4, 4, 2], [d0, d1], [[1, 1, 2, 2], [1, 1, 2, 2], [1, 2]])


def two_lines_model(points: int = 2) -> tuple[EndModel, DGAlgebra, dict[int, dict]]:
    """Formal sub-DG algebra of ``End(C)`` realising the two-lines products.

    Spanned by the two projections, ``theta12, theta21`` in degree 1 and
    ``theta12 theta21, theta21 theta12`` in degree 2. With ``points=1`` the
    point labels are erased.
    """
    c = two_lines_complex()
    if points == 1:
        c = ModelComplex(c.dims, c.d, None)
    model = end_dga(c)
    pos = {nm: i for i, nm in enumerate(["e1", "u1", "e2", "u2", "f1", "s1", "f2", "s2", "g1", "g2"])}

    def E(a: str, b: str) -> int:
        return model.element(pos[a], pos[b])

    pi1 = {E(x, x): ONE for x in ("e1", "u1", "f1", "s1", "g1")}
    pi2 = {E(x, x): ONE for x in ("e2", "u2", "f2", "s2", "g2")}
    th12 = {E("f1", "e2"): ONE, E("g1", "f2"): ONE, E("s1", "u2"): -ONE}
    th21 = {E("f2", "e1"): ONE, E("g2", "f1"): ONE, E("s2", "u1"): -ONE}
    w1 = {E("g1", "e1"): ONE}
    w2 = {E("g2", "e2"): ONE}
    unit = model.dga.unit
    a, incl = subalgebra(model.dga, [pi1, pi2, th12, th21, w1, w2],
                         ["pi1", "pi2", "theta12", "theta21", "w11", "w22"], unit)
    return model, a, incl


def _random_invertible(rng: random.Random, n: int) -> Matrix:
    while True:
        m = Matrix(n, n, [Fraction(rng.randint(-2, 2)) for _ in range(n * n)])
        if n == 0:
            return m
        try:
            inverse(m)
            return m
        except ValueError:
            continue


def random_complex(rng: random.Random, dims: list[int], ranks: list[int] | None = None) -> ModelComplex:
    """Random complex with ``d^2 = 0``: a normal form with random ranks, conjugated.

    In degree ``q`` the basis is ``[image of d_{q-1} | sources of d_q | rest]``.
    """
    L = len(dims)
    if ranks is None:
        ranks = []
        prev = 0
        for q in range(L - 1):
            r = rng.randint(0, min(dims[q] - prev, dims[q + 1]))
            ranks.append(r)
            prev = r
    ds = []
    prev = 0
    for q in range(L - 1):
        r = ranks[q]
        if r > dims[q] - prev or r > dims[q + 1]:
            raise ValueError("ranks incompatible with dimensions")
        m = Matrix(dims[q + 1], dims[q])
        for t in range(r):
            m[t, prev + t] = ONE
        ds.append(m)
        prev = r
    T = [_random_invertible(rng, n) for n in dims]
    ds = [T[q + 1] @ ds[q] @ inverse(T[q]) for q in range(len(ds))]
    return ModelComplex(list(dims), ds)


def resolution_complex(rng: random.Random, h0: int, pairs: list[int]) -> ModelComplex:
    """Complex with cohomology ``k^h0`` in degree 0 only (``pairs[q]`` = rank of ``d_q``)."""
    dims = [h0 + (pairs[0] if pairs else 0)]
    for q, k in enumerate(pairs):
        dims.append(k + (pairs[q + 1] if q + 1 < len(pairs) else 0))
    return random_complex(rng, dims, list(pairs))


def random_end_dga(rng: random.Random, dims: list[int], twist: bool = True) -> DGAlgebra:
    """Non-negative part of ``End(C)`` for a random complex, in a random basis."""
    a = end_dga(random_complex(rng, dims), nonnegative=True).dga
    if not twist:
        return a
    sp = a.space
    T = {}
    for q in sp.occupied_degrees():
        idx = sp.in_degree(q)
        M = _random_invertible(rng, len(idx))
        for col, i in enumerate(idx):
            T[i] = {idx[r]: M[r, col] for r in range(len(idx)) if M[r, col]}
    return change_basis(a, T)


def random_dgas(seed: int = 0, count: int = 20) -> list[tuple[str, DGAlgebra]]:
    """Valid DG algebras of dimension at most 10 in degrees 0..3."""
    rng = random.Random(seed)
    shapes = [[1, 1, 1, 1], [1, 1, 1], [2, 1], [1, 2], [1, 1], [2], [1, 1, 1, 1]]
    out = []
    for k in range(count):
        kind = k % 4
        if kind == 3:
            # the unit would push the dimension to 11
            out.append((f"massey[{k}]", massey_dga(rng.choice([1, 2, -3]), rng.choice([1, -1, Fraction(1, 2)]),
                                                   with_unit=False)))
        else:
            shape = shapes[rng.randrange(len(shapes))]
            out.append((f"end{shape}[{k}]", random_end_dga(rng, shape)))
    return out


def shipped_dgas() -> list[tuple[str, DGAlgebra]]:
    return [
        ("massey", massey_dga()),
        ("massey_nounit", massey_dga(with_unit=False)),
        ("exterior2", exterior_dga(2)),
        ("exterior3", exterior_dga(3)),
        ("polynomial3", truncated_polynomial_dga(3)),
        ("two_lines_2pt", two_lines_model(2)[1]),
        ("two_lines_1pt", two_lines_model(1)[1]),
    ]


def shipped_deformation_data() -> list[tuple[str, MinimalAInfData, int, int]]:
    """``(name, data, order, points)`` for every shipped deformation-ring input."""
    out = [(f"lines_p{n}", lines_pn_data(n), 3, 1) for n in range(3, 7)]
    out += [
        ("two_lines_r2", two_lines_data(), 4, 2),
        ("two_lines_r1", two_lines_data(), 6, 1),
        ("x2_y3", x2_y3_data(), 6, 1),
        ("conic_p4", conic_data(), 3, 1),
        ("free2", free_data(2), 3, 1),
    ]
    return out
