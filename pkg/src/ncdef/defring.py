"""Truncated deformation rings built from minimal A-infinity data.

Ring generators are the dual basis ``v_i*`` of ``Ext^1``; the generator dual to
a class labelled ``(s, t)`` keeps the label ``(s, t)`` as (source, target), so a
word ``v_{i_1}* ... v_{i_k}*`` is composable exactly when the tuple
``(v_{i_1}, ..., v_{i_k})`` is. Coefficients in ``R (x) A`` multiply left to
right in tensor order; ``R`` sits in degree 0 and contributes no signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .dga import DGAlgebra
from .graded import GradedSpace, Vec, vec_add
from .linalg import Matrix, as_fraction, format_fraction, rank
from .ncfree import (
    GeneratorSet,
    NCPoly,
    TruncatedQuotientRing,
    Word,
    idempotent,
    nc_mul,
    quotient_ring,
    word_degree,
)
from .transfer import AInfinityAlgebra, AInfinityMorphism, TransferResult, dga_as_ainf

ONE = Fraction(1)


class DataError(ValueError):
    """Malformed or label-inconsistent minimal A-infinity data."""


class MCViolation(ValueError):
    def __init__(self, residual: dict):
        self.residual = residual
        k, v = next(iter(residual.items()))
        super().__init__(f"Maurer-Cartan equation fails: component {k} has coefficient {v}")


@dataclass
class MinimalAInfData:
    """``Ext^1``, ``Ext^2`` and the products ``m_n: (Ext^1)^n -> Ext^2``.

    ``products[n][(i_1, ..., i_n)]`` maps ``Ext^2`` indices to coefficients.
    """

    ext1: list[str]
    ext2: list[str]
    products: dict[int, dict[tuple[int, ...], dict[int, Fraction]]] = field(default_factory=dict)
    points: int = 1
    ext1_labels: list[tuple[int, int]] | None = None
    ext2_labels: list[tuple[int, int]] | None = None
    duals: list[str] | None = None

    def __post_init__(self):
        self.products = {
            int(n): {tuple(k): {int(j): as_fraction(c) for j, c in v.items() if as_fraction(c)}
                     for k, v in t.items()}
            for n, t in self.products.items()
        }
        for t in self.products.values():
            for k in [k for k, v in t.items() if not v]:
                del t[k]
        if self.duals is None:
            self.duals = list(self.ext1)
        self.validate()

    @property
    def order(self) -> int:
        return max((n for n, t in self.products.items() if t), default=1)

    def source(self, i: int) -> int:
        return self.ext1_labels[i][0] if self.ext1_labels else 1

    def target(self, i: int) -> int:
        return self.ext1_labels[i][1] if self.ext1_labels else 1

    def composable(self, tup: tuple[int, ...]) -> bool:
        return all(self.target(a) == self.source(b) for a, b in zip(tup, tup[1:]))

    def validate(self) -> None:
        g, e = len(self.ext1), len(self.ext2)
        if len(self.duals) != g or len(set(self.duals)) != g:
            raise DataError("dual generator names must be distinct, one per Ext^1 class")
        for labels, size, what in ((self.ext1_labels, g, "ext1"), (self.ext2_labels, e, "ext2")):
            if labels is None:
                continue
            if len(labels) != size:
                raise DataError(f"{what} label count mismatch")
            if any(not (1 <= s <= self.points and 1 <= t <= self.points) for s, t in labels):
                raise DataError(f"{what} label outside 1..{self.points}")
        if self.points > 1 and self.ext1_labels is None:
            raise DataError("several points need Ext^1 labels")
        for n, t in self.products.items():
            if n < 2:
                raise DataError("products start at arity 2")
            for tup, val in t.items():
                if len(tup) != n or any(not 0 <= i < g for i in tup):
                    raise DataError(f"bad m_{n} argument {tup}")
                if any(not 0 <= j < e for j in val):
                    raise DataError(f"m_{n}{tup} has an Ext^2 index out of range")
                if self.ext1_labels is None:
                    continue
                if not self.composable(tup):
                    raise DataError(f"m_{n} nonzero on non-composable tuple {tup}")
                if self.ext2_labels is not None:
                    want = (self.source(tup[0]), self.target(tup[-1]))
                    if any(tuple(self.ext2_labels[j]) != want for j in val):
                        raise DataError(f"m_{n}{tup} lands outside the ({want[0]},{want[1]}) component")

    def generator_set(self, points: int | None = None) -> GeneratorSet:
        r = self.points if points is None else points
        if r == 1:
            return GeneratorSet(tuple(self.duals))
        if r != self.points:
            raise DataError(f"data has {self.points} points, not {r}")
        return GeneratorSet(tuple(self.duals), r,
                            tuple(s for s, _ in self.ext1_labels), tuple(t for _, t in self.ext1_labels))

    def m2_rank(self) -> int:
        t = self.products.get(2, {})
        if not t:
            return 0
        keys = sorted(t)
        m = Matrix(len(self.ext2), len(keys))
        for col, k in enumerate(keys):
            for j, c in t[k].items():
                m[j, col] = c
        return rank(m)

    def to_json(self) -> dict:
        out: dict = {"points": self.points, "ext1": [], "ext2": []}
        for i, nm in enumerate(self.ext1):
            item = {"name": nm, "dual": self.duals[i]}
            if self.ext1_labels:
                item["label"] = list(self.ext1_labels[i])
            out["ext1"].append(item)
        for j, nm in enumerate(self.ext2):
            item = {"name": nm}
            if self.ext2_labels:
                item["label"] = list(self.ext2_labels[j])
            out["ext2"].append(item)
        out["products"] = {
            str(n): [[list(k), j, format_fraction(c)] for k in sorted(t) for j, c in sorted(t[k].items())]
            for n, t in sorted(self.products.items()) if t
        }
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "MinimalAInfData":
        try:
            e1 = [x if isinstance(x, dict) else {"name": x} for x in data["ext1"]]
            e2 = [x if isinstance(x, dict) else {"name": x} for x in data["ext2"]]
            names1 = [x["name"] for x in e1]
            names2 = [x["name"] for x in e2]
            lab1 = [tuple(x["label"]) for x in e1] if e1 and all("label" in x for x in e1) else None
            lab2 = [tuple(x["label"]) for x in e2] if e2 and all("label" in x for x in e2) else None
            duals = [x.get("dual", x["name"]) for x in e1]
            idx1 = {nm: i for i, nm in enumerate(names1)}
            idx2 = {nm: j for j, nm in enumerate(names2)}
            products: dict[int, dict] = {}
            for n, entries in data.get("products", {}).items():
                t = products.setdefault(int(n), {})
                for args, j, c in entries:
                    key = tuple(idx1[a] if isinstance(a, str) else int(a) for a in args)
                    jj = idx2[j] if isinstance(j, str) else int(j)
                    slot = t.setdefault(key, {})
                    slot[jj] = slot.get(jj, 0) + as_fraction(c)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed A-infinity data: {exc}") from exc
        return cls(names1, names2, products, int(data.get("points", 1)), lab1, lab2, duals)


def relations_from_products(data: MinimalAInfData, n: int, points: int | None = None) -> list[NCPoly]:
    """``rho_j = sum_{k=2..n} m_k*(w_j*)`` as polynomials in the dual generators."""
    gens = data.generator_set(points)
    terms: list[dict[Word, Fraction]] = [{} for _ in data.ext2]
    for k in range(2, n + 1):
        for tup, val in data.products.get(k, {}).items():
            if gens.points > 1 and not gens.is_word(tup):
                continue
            for j, c in val.items():
                terms[j][tup] = terms[j].get(tup, 0) + c
    out = []
    for t in terms:
        p = NCPoly(gens, t)
        if p:
            out.append(p)
    return out


@dataclass
class DeformationRing:
    ring: TruncatedQuotientRing
    data: MinimalAInfData
    order: int
    relations: list[NCPoly]

    @property
    def points(self) -> int:
        return self.ring.points

    @property
    def filtration_dims(self) -> list[int]:
        return self.ring.filtration_dims

    def summary(self) -> dict:
        out = self.ring.summary()
        out["points"] = self.points
        return out


def deformation_ring(data: MinimalAInfData, n: int, points: int | None = None) -> DeformationRing:
    rels = relations_from_products(data, n, points)
    gens = data.generator_set(points)
    return DeformationRing(quotient_ring(gens, rels, n), data, n, rels)


# ---------------------------------------------------------------------------
# Maurer-Cartan elements


@dataclass
class MCElement:
    """``sum_i coeffs[i] (x) e_i`` in ``R (x) V`` for a basis ``e_i`` of ``V``."""

    ring: TruncatedQuotientRing
    coeffs: dict[int, NCPoly]

    def __post_init__(self):
        self.coeffs = {i: p for i, p in self.coeffs.items() if p}

    def in_augmentation_ideal(self) -> bool:
        return all(word_degree(w) >= 1 for p in self.coeffs.values() for w in p.terms)

    def normalized(self) -> "MCElement":
        return MCElement(self.ring, {i: self.ring.normal_form(p) for i, p in self.coeffs.items()})

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(p) for p in self.coeffs.values())

    def reindex(self, positions: Sequence[int]) -> "MCElement":
        """Move component ``i`` to basis index ``positions[i]`` of a larger space."""
        return MCElement(self.ring, {positions[i]: p for i, p in self.coeffs.items()})

    def to_json(self, labels: list[str] | None = None) -> list:
        out = []
        for i, p in sorted(self.coeffs.items()):
            out.append({"basis": labels[i] if labels else i, "coeff": str(p)})
        return out


def tautological_element(data: MinimalAInfData, ring: DeformationRing | TruncatedQuotientRing) -> MCElement:
    """``x = sum_i v_i* (x) v_i``."""
    r = ring.ring if isinstance(ring, DeformationRing) else ring
    gens = r.generators
    if tuple(data.duals) != gens.names:
        raise DataError("ring was not built from these data")
    return MCElement(r, {i: NCPoly._raw(gens, {(i,): ONE}) for i in range(len(data.ext1))})


def _coeff_product(ring: TruncatedQuotientRing, polys: list[NCPoly]) -> NCPoly:
    acc = polys[0].truncate(ring.order)
    for p in polys[1:]:
        if not acc:
            break
        acc = nc_mul(acc, p).truncate(ring.order)
    return acc


def _collect(ring: TruncatedQuotientRing, acc: dict[int, NCPoly]) -> dict[int, NCPoly]:
    out = {}
    for j, p in acc.items():
        nf = ring.normal_form(p)
        if nf:
            out[j] = nf
    return out


def _accumulate(acc: dict[int, NCPoly], coeff: NCPoly, val: Mapping[int, Fraction]) -> None:
    for j, c in val.items():
        term = coeff.scale(c)
        acc[j] = acc[j] + term if j in acc else term


def mc_residual_minimal(data: MinimalAInfData, ring: DeformationRing | TruncatedQuotientRing,
                        x: MCElement, order: int | None = None) -> dict[int, NCPoly]:
    """``sum_{k=2..n} m_{R,k}(x^k)`` in ``R (x) Ext^2`` (nonzero components only)."""
    r = ring.ring if isinstance(ring, DeformationRing) else ring
    n = r.order if order is None else order
    acc: dict[int, NCPoly] = {}
    for k in range(2, n + 1):
        for tup, val in data.products.get(k, {}).items():
            if all(i in x.coeffs for i in tup):
                coeff = _coeff_product(r, [x.coeffs[i] for i in tup])
                if coeff:
                    _accumulate(acc, coeff, val)
    return _collect(r, acc)


def mc_residual(alg: AInfinityAlgebra, x: MCElement, order: int | None = None) -> dict[int, NCPoly]:
    """``sum_{k>=1} m_{R,k}(x^k)`` for an arbitrary A-infinity algebra (e.g. a DGA)."""
    r = x.ring
    n = min(alg.order, r.order if order is None else order)
    acc: dict[int, NCPoly] = {}
    for k in range(1, max(n, 2) + 1):
        for tup, val in alg.ops.get(k, {}).items():
            if all(i in x.coeffs for i in tup):
                coeff = _coeff_product(r, [x.coeffs[i] for i in tup])
                if coeff:
                    _accumulate(acc, coeff, val)
    return _collect(r, acc)


def dga_mc_residual(a: DGAlgebra, y: MCElement) -> dict[int, NCPoly]:
    """``d y + y y`` in ``R (x) A^2``."""
    return mc_residual(dga_as_ainf(a), y, order=2)


def push_mc(f: AInfinityMorphism, x: MCElement, order: int | None = None,
            positions: Sequence[int] | None = None) -> MCElement:
    """``y = sum_{i<=n} f_{R,i}(x^i)``.

    ``positions`` places the components of ``x`` in the source basis; pass
    ``ext1_positions(result)`` when ``x`` is indexed by ``Ext^1`` only.
    """
    if positions is not None:
        x = x.reindex(positions)
    r = x.ring
    n = r.order if order is None else order
    if f.order < n:
        raise ValueError(f"morphism order {f.order} is below the ring order {n}")
    tab = f.tabulate()
    acc: dict[int, NCPoly] = {}
    for i in range(1, n + 1):
        for tup, val in tab.maps.get(i, {}).items():
            if all(k in x.coeffs for k in tup):
                coeff = _coeff_product(r, [x.coeffs[k] for k in tup])
                if coeff:
                    _accumulate(acc, coeff, val)
    return MCElement(r, _collect(r, acc))


def largest_quotient_defects(data: MinimalAInfData, n: int, points: int | None = None) -> list[int]:
    """Relations whose deletion leaves the residual of ``x`` zero (should be none)."""
    rels = relations_from_products(data, n, points)
    gens = data.generator_set(points)
    bad = []
    for j in range(len(rels)):
        smaller = quotient_ring(gens, rels[:j] + rels[j + 1:], n)
        x = tautological_element(data, smaller)
        if not mc_residual_minimal(data, smaller, x, n):
            bad.append(j)
    return bad


# ---------------------------------------------------------------------------
# finite model complexes and their endomorphism DG algebras


@dataclass
class ModelComplex:
    """Cochain complex ``C^0 -> ... -> C^L``; ``d[q]`` has shape ``dims[q+1] x dims[q]``.

    ``points`` (optional) labels every basis vector with the summand ``C_p`` it
    belongs to, degree by degree.
    """

    dims: list[int]
    d: list[Matrix]
    points: list[list[int]] | None = None

    def __post_init__(self):
        L = len(self.dims)
        if len(self.d) != max(L - 1, 0):
            raise ValueError("need one differential between consecutive degrees")
        for q, m in enumerate(self.d):
            if (m.rows, m.cols) != (self.dims[q + 1], self.dims[q]):
                raise ValueError(f"d[{q}] has the wrong shape")
        for q in range(L - 2):
            if not (self.d[q + 1] @ self.d[q]).is_zero():
                raise ValueError("d squared is not zero")
        if self.points is not None:
            if [len(p) for p in self.points] != list(self.dims):
                raise ValueError("point labels do not match dimensions")
            for q, m in enumerate(self.d):
                for i in range(m.rows):
                    for j in range(m.cols):
                        if m[i, j] and self.points[q + 1][i] != self.points[q][j]:
                            raise ValueError("d mixes summands")
        self.basis: list[tuple[int, int]] = [(q, k) for q in range(L) for k in range(self.dims[q])]
        self.pos = {b: i for i, b in enumerate(self.basis)}

    @property
    def point_count(self) -> int:
        return max((max(p) for p in self.points if p), default=1) if self.points else 1

    def point(self, i: int) -> int:
        q, k = self.basis[i]
        return self.points[q][k] if self.points else 1

    def degree(self, i: int) -> int:
        return self.basis[i][0]

    def diff(self, i: int) -> dict[int, Fraction]:
        q, k = self.basis[i]
        if q >= len(self.d):
            return {}
        m = self.d[q]
        return {self.pos[(q + 1, r)]: m[r, k] for r in range(m.rows) if m[r, k]}

    def cohomology_dims(self, point: int | None = None) -> list[int]:
        out = []
        for q in range(len(self.dims)):
            keep = [k for k in range(self.dims[q]) if point is None or self.points[q][k] == point] \
                if self.points else list(range(self.dims[q]))
            out.append(_restricted_cohomology(self, q, point, keep))
        return out

    def to_json(self) -> dict:
        out = {"dims": self.dims, "d": [[[format_fraction(x) for x in row] for row in m.to_rows()] for m in self.d]}
        if self.points:
            out["points"] = self.points
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "ModelComplex":
        dims = [int(x) for x in data["dims"]]
        ds = [Matrix.from_rows([[as_fraction(x) for x in row] for row in m], dims[q]) if m else Matrix(dims[q + 1], dims[q])
              for q, m in enumerate(data["d"])]
        return cls(dims, ds, data.get("points"))


def _restricted_cohomology(c: ModelComplex, q: int, point: int | None, keep: list[int]) -> int:
    def block(qq: int) -> Matrix | None:
        if qq < 0 or qq >= len(c.d):
            return None
        rows = [k for k in range(c.dims[qq + 1]) if point is None or not c.points or c.points[qq + 1][k] == point]
        cols = [k for k in range(c.dims[qq]) if point is None or not c.points or c.points[qq][k] == point]
        return Matrix.from_rows([[c.d[qq][r, s] for s in cols] for r in rows], len(cols)) if rows else Matrix(0, len(cols))

    out_m, in_m = block(q), block(q - 1)
    dim = len(keep)
    r_out = rank(out_m) if out_m is not None and out_m.rows and out_m.cols else 0
    r_in = rank(in_m) if in_m is not None and in_m.rows and in_m.cols else 0
    return dim - r_out - r_in


@dataclass
class EndModel:
    """``End(C)`` (or its non-negative part) with the basis ``E_{a<-b}``."""

    complex: ModelComplex
    dga: DGAlgebra
    pairs: list[tuple[int, int]]

    def element(self, a: int, b: int) -> int:
        return self.pairs.index((a, b))


def end_dga(c: ModelComplex, nonnegative: bool = False) -> EndModel:
    """``End(C)`` with ``d phi = d o phi - (-1)^|phi| phi o d`` and composition as product."""
    n = len(c.basis)
    pairs = [(a, b) for a in range(n) for b in range(n)]
    if nonnegative:
        pairs = [(a, b) for a, b in pairs if c.degree(a) >= c.degree(b)]
    pairs.sort(key=lambda ab: (c.degree(ab[0]) - c.degree(ab[1]), ab))
    idx = {p: i for i, p in enumerate(pairs)}
    degrees = [c.degree(a) - c.degree(b) for a, b in pairs]
    labels = [f"E{a}<{b}" for a, b in pairs]
    points = [(c.point(a), c.point(b)) for a, b in pairs] if c.points else None
    space = GradedSpace(degrees, labels, points)
    dT = [[Fraction(0)] * n for _ in range(n)]  # dT[b][b'] = coefficient of e_b in d(e_b')
    dC = [c.diff(i) for i in range(n)]
    for bp in range(n):
        for b, x in dC[bp].items():
            dT[b][bp] = x
    d: dict[int, Vec] = {}
    for i, (a, b) in enumerate(pairs):
        sign = -1 if degrees[i] & 1 else 1
        v: Vec = {}
        for ap, x in dC[a].items():
            vec_add(v, {idx[(ap, b)]: x})
        for bp in range(n):
            y = dT[b][bp]
            if y:
                vec_add(v, {idx[(a, bp)]: y}, -sign)
        if v:
            d[i] = v
    mul: dict[tuple[int, int], Vec] = {}
    by_first: dict[int, list[tuple[int, int]]] = {}
    for j, (b, e) in enumerate(pairs):
        by_first.setdefault(b, []).append((j, e))
    for i, (a, b) in enumerate(pairs):
        for j, e in by_first.get(b, []):
            k = idx.get((a, e))
            if k is not None:
                mul[(i, j)] = {k: ONE}
    unit = {idx[(a, a)]: ONE for a in range(n)}
    return EndModel(c, DGAlgebra(space, d, mul, unit), pairs)


@dataclass
class TwistedHomology:
    h0: int
    positive: dict[int, int]
    square_zero: bool
    expected_h0: int
    dims: dict[int, int]

    @property
    def flat(self) -> bool:
        return self.h0 == self.expected_h0 and not any(self.positive.values())

    def to_json(self) -> dict:
        return {"h0": self.h0, "expected_h0": self.expected_h0, "positive_degree_dims": self.positive,
                "square_zero": self.square_zero, "flat": self.flat, "module_dims": self.dims}


def twisted_differential(model: EndModel, y: MCElement) -> tuple[list[tuple[int, int]], dict[int, list[int]], dict]:
    """Basis of ``sum_p e_p R (x) C_p`` and the sparse matrix of ``d + y`` on it.

    ``(rho (x) phi)(w (x) c) = rho w (x) phi(c)``.
    """
    ring = y.ring
    c = model.complex
    gens = ring.generators
    elems: list[tuple[int, int]] = []  # (C basis index, R basis index)
    for ci in range(len(c.basis)):
        p = c.point(ci)
        for wi, w in enumerate(ring.basis_words):
            if gens.word_source(w) == p:
                elems.append((ci, wi))
    pos = {e: i for i, e in enumerate(elems)}
    by_degree: dict[int, list[int]] = {}
    for i, (ci, _) in enumerate(elems):
        by_degree.setdefault(c.degree(ci), []).append(i)
    by_domain: dict[int, list[tuple[int, NCPoly]]] = {}
    for k, rho in y.coeffs.items():
        a, b = model.pairs[k]
        by_domain.setdefault(b, []).append((a, rho))
    D: dict[int, dict[int, Fraction]] = {}
    for i, (ci, wi) in enumerate(elems):
        col: dict[int, Fraction] = {}
        for cj, x in c.diff(ci).items():
            j = pos[(cj, wi)]
            col[j] = col.get(j, 0) + x
        w = NCPoly._raw(gens, {ring.basis_words[wi]: ONE})
        for a, rho in by_domain.get(ci, []):
            for wj, x in ring.coords(nc_mul(rho, w)).items():
                j = pos.get((a, wj))
                if j is None:
                    raise ValueError("coefficient does not match the point labels of its map")
                col[j] = col.get(j, 0) + x
        D[i] = {j: x for j, x in col.items() if x}
    return elems, by_degree, D


def twisted_homology(model: EndModel, y: MCElement, check_mc: bool = True) -> TwistedHomology:
    """Homology of ``(R (x) C, d + y)``; refuses ``y`` that are not Maurer-Cartan."""
    if check_mc:
        res = dga_mc_residual(model.dga, y)
        if res:
            raise MCViolation(res)
    ring = y.ring
    c = model.complex
    elems, by_degree, D = twisted_differential(model, y)
    square_zero = True
    for i, col in D.items():
        acc: dict[int, Fraction] = {}
        for j, x in col.items():
            for k, z in D[j].items():
                acc[k] = acc.get(k, 0) + x * z
        if any(acc.values()):
            square_zero = False
            break
    ranks: dict[int, int] = {}
    for q, cols in by_degree.items():
        tgt = by_degree.get(q + 1, [])
        if not tgt or not cols:
            ranks[q] = 0
            continue
        tpos = {j: r for r, j in enumerate(tgt)}
        m = Matrix(len(tgt), len(cols))
        for s, i in enumerate(cols):
            for j, x in D[i].items():
                m[tpos[j], s] = x
        ranks[q] = rank(m)
    homology = {q: len(cols) - ranks.get(q, 0) - ranks.get(q - 1, 0) for q, cols in by_degree.items()}
    gens = ring.generators
    expected = 0
    for p in range(1, gens.points + 1):
        right_dim = sum(1 for w in ring.basis_words if gens.word_source(w) == p)
        h0 = c.cohomology_dims(p if c.points else None)[0]
        expected += right_dim * h0
    return TwistedHomology(
        h0=homology.get(0, 0),
        positive={q: v for q, v in sorted(homology.items()) if q > 0},
        square_zero=square_zero,
        expected_h0=expected,
        dims={q: len(v) for q, v in sorted(by_degree.items())},
    )


def embed_element(ring: TruncatedQuotientRing, coeffs: Mapping[int, NCPoly]) -> MCElement:
    return MCElement(ring, dict(coeffs))


def tensor_product(a: DGAlgebra, ring: TruncatedQuotientRing, x: Mapping[int, NCPoly], y: Mapping[int, NCPoly]) -> dict[int, NCPoly]:
    """Product in ``R (x) A``: ``(rho (x) a)(sigma (x) b) = rho sigma (x) ab``."""
    acc: dict[int, NCPoly] = {}
    for i, rho in x.items():
        for j, sigma in y.items():
            val = a.mul.get((i, j))
            if not val:
                continue
            coeff = nc_mul(rho, sigma).truncate(ring.order)
            if coeff:
                _accumulate(acc, coeff, val)
    return {k: ring.normal_form(p) for k, p in acc.items() if ring.normal_form(p)}


def gauge_mc_element(model: EndModel, ring: TruncatedQuotientRing, g: Mapping[int, NCPoly]) -> MCElement:
    """``y = (1+g) d (1+g)^(-1) - d`` for ``g`` in ``M (x) End^0(C)``.

    ``(d + y) = (1+g) d (1+g)^(-1)`` squares to zero, so ``y`` is Maurer-Cartan.
    """
    a = model.dga
    deg = a.space.degrees
    gens = ring.generators
    if any(deg[k] != 0 for k in g):
        raise ValueError("gauge element must have degree 0")
    g = {k: ring.normal_form(p) for k, p in g.items()}
    if any(word_degree(w) == 0 for p in g.values() for w in p.terms):
        raise ValueError("gauge element must have coefficients in the augmentation ideal")
    c = model.complex

    def lift(v: Mapping[int, Fraction]) -> dict[int, NCPoly]:
        out = {}
        for k, x in v.items():
            p = c.point(model.pairs[k][0])
            out[k] = NCPoly._raw(gens, {idempotent(p): as_fraction(x)})
        return out

    one = lift(a.unit)
    d_elem: dict[int, Fraction] = {}
    for ci in range(len(c.basis)):
        for cj, x in c.diff(ci).items():
            k = model.element(cj, ci)
            d_elem[k] = d_elem.get(k, 0) + x
    D = lift(d_elem)
    # (1+g)^(-1) = sum_k (-g)^k, finite since g is nilpotent modulo truncation
    inv = dict(one)
    power = dict(one)
    neg_g = {k: p.scale(-1) for k, p in g.items()}
    for _ in range(ring.order):
        power = tensor_product(a, ring, power, neg_g)
        if not power:
            break
        for k, p in power.items():
            inv[k] = inv[k] + p if k in inv else p
    g1 = dict(one)
    for k, p in g.items():
        g1[k] = g1[k] + p if k in g1 else p
    conj = tensor_product(a, ring, tensor_product(a, ring, g1, D), inv)
    for k, p in D.items():
        conj[k] = conj[k] - p if k in conj else -p
    return MCElement(ring, {k: ring.normal_form(p) for k, p in conj.items()})


def embed_via(model: EndModel, mapping: Mapping[int, Vec], y: MCElement) -> MCElement:
    """Push ``y`` along a linear map ``A -> End(C)`` given on basis vectors."""
    acc: dict[int, NCPoly] = {}
    for i, rho in y.coeffs.items():
        _accumulate(acc, rho, mapping.get(i, {}))
    return MCElement(y.ring, _collect(y.ring, acc))


# ---------------------------------------------------------------------------
# invariants


def graded_invariants(ring: DeformationRing, data: MinimalAInfData) -> dict:
    dims = ring.filtration_dims
    gens = ring.ring.generators
    out = {
        "filtration_dims": dims,
        "dim_M1": dims[1] if len(dims) > 1 else None,
        "dim_ext1": len(data.ext1),
    }
    out["M1_matches_ext1"] = out["dim_M1"] == out["dim_ext1"]
    if len(dims) > 2:
        words2 = len(gens.words(2))
        rank2 = data.m2_rank() if gens.points == 1 else _composable_m2_rank(data)
        out["dim_M2"] = dims[2]
        out["expected_M2"] = words2 - rank2
        out["M2_matches_coker_m2"] = dims[2] == words2 - rank2
    return out


def _composable_m2_rank(data: MinimalAInfData) -> int:
    t = {k: v for k, v in data.products.get(2, {}).items() if data.composable(k)}
    if not t:
        return 0
    keys = sorted(t)
    m = Matrix(len(data.ext2), len(keys))
    for col, k in enumerate(keys):
        for j, c in t[k].items():
            m[j, col] = c
    return rank(m)


def compare_pointings(data: MinimalAInfData, n: int) -> dict:
    """Dimensions of the one-point and ``r``-point rings side by side."""
    r1 = deformation_ring(data, n, 1)
    if data.points == 1:
        return {"points": 1, "one_point_dims": r1.filtration_dims, "pointed_dims": r1.filtration_dims,
                "ideal_maps_into_ideal": True, "dims_bounded": True}
    rr = deformation_ring(data, n, data.points)
    gr = rr.ring.generators
    maps_in = True
    for row in r1.ring.ideal.rows.values():
        poly = r1.ring.index.poly(row)
        img = {w: c for w, c in poly.terms.items() if gr.is_word(w)}
        if not rr.ring.is_zero(NCPoly._raw(gr, img)):
            maps_in = False
            break
    d1, dr = r1.filtration_dims, rr.filtration_dims
    return {
        "points": data.points,
        "one_point_dims": d1,
        "pointed_dims": dr,
        "ideal_maps_into_ideal": maps_in,
        "dims_bounded": all(b <= a for a, b in zip(d1[1:], dr[1:])),
    }


# ---------------------------------------------------------------------------
# conversions


def ext1_positions(result: TransferResult) -> list[int]:
    """Basis indices of ``H^1`` inside the transferred space, in ``Ext^1`` order."""
    return list(result.minimal.space.in_degree(1))


def minimal_data_from_transfer(result: TransferResult, order: int | None = None) -> MinimalAInfData:
    """Restrict the transferred structure to ``(H^1)^n -> H^2``."""
    H = result.minimal.space
    n = result.order if order is None else order
    one = H.in_degree(1)
    two = H.in_degree(2)
    pos1 = {g: i for i, g in enumerate(one)}
    pos2 = {g: j for j, g in enumerate(two)}
    products: dict[int, dict] = {}
    for k in range(2, n + 1):
        t = {}
        for tup, val in result.minimal.ops.get(k, {}).items():
            if all(x in pos1 for x in tup):
                v = {pos2[j]: c for j, c in val.items() if j in pos2}
                if v:
                    t[tuple(pos1[x] for x in tup)] = v
        products[k] = t
    pts = H.points
    lab1 = [pts[g] for g in one] if pts else None
    lab2 = [pts[g] for g in two] if pts else None
    points = max((max(p) for p in pts), default=1) if pts else 1
    names1 = [H.labels[g] for g in one]
    return MinimalAInfData(names1, [H.labels[g] for g in two], products, points, lab1, lab2,
                           [f"x{i}" for i in range(len(one))])


def minimal_data_from_relations(relations: list[NCPoly], ext2_names: list[str] | None = None,
                                ext1_names: list[str] | None = None) -> MinimalAInfData:
    """Products whose ``m_k`` coefficient on a word is that word's coefficient in ``rho_j``."""
    if not relations:
        raise DataError("need at least one relation")
    gens = relations[0].gens
    products: dict[int, dict] = {}
    for j, rho in enumerate(relations):
        for w, c in rho.terms.items():
            k = word_degree(w)
            if k < 2:
                raise DataError(f"relation {rho} has a term of degree {k}")
            products.setdefault(k, {}).setdefault(w, {})[j] = c
    ext2 = ext2_names or [f"w{j}" for j in range(len(relations))]
    ext1 = ext1_names or list(gens.names)
    lab1 = list(zip(gens.sources, gens.targets)) if gens.points > 1 else None
    lab2 = None
    if gens.points > 1:
        lab2 = []
        for rho in relations:
            w = next(iter(rho.terms))
            lab2.append((gens.word_source(w), gens.word_target(w)))
    return MinimalAInfData(ext1, ext2, products, gens.points, lab1, lab2, list(gens.names))
