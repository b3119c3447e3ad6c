"""Finite-dimensional DG algebras, their cohomology and splitting data."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .graded import GradedSpace, Vec, clean, vec_add
from .linalg import Matrix, as_fraction, format_fraction, inverse, kernel_basis, rref


class DGAError(ValueError):
    pass


@dataclass
class Violation:
    identity: str
    witness: tuple
    residual: dict

    def __str__(self) -> str:
        return f"{self.identity} fails at {self.witness}: residual {self.residual}"


@dataclass
class DGAlgebra:
    """DG algebra on a degree-sorted basis.

    ``d[i]`` is the image of basis vector ``i``; ``mul[(i, j)]`` the product of
    basis vectors ``i`` and ``j``. Missing keys are zero.
    """

    space: GradedSpace
    d: dict[int, Vec] = field(default_factory=dict)
    mul: dict[tuple[int, int], Vec] = field(default_factory=dict)
    unit: Vec | None = None

    def __post_init__(self):
        self.d = {i: clean(v) for i, v in self.d.items() if clean(v)}
        self.mul = {k: clean(v) for k, v in self.mul.items() if clean(v)}

    @property
    def dim(self) -> int:
        return self.space.dim

    def diff(self, v: Vec) -> Vec:
        out: Vec = {}
        for i, c in v.items():
            img = self.d.get(i)
            if img:
                vec_add(out, img, c)
        return out

    def product(self, a: Vec, b: Vec) -> Vec:
        out: Vec = {}
        for i, x in a.items():
            for j, y in b.items():
                img = self.mul.get((i, j))
                if img:
                    vec_add(out, img, x * y)
        return out

    def d_matrix(self, q: int) -> Matrix:
        """Matrix of ``d: A^q -> A^(q+1)`` in the degree-local bases."""
        src = self.space.in_degree(q)
        tgt = self.space.in_degree(q + 1)
        pos = {g: k for k, g in enumerate(tgt)}
        m = Matrix(len(tgt), len(src))
        for col, i in enumerate(src):
            for j, c in self.d.get(i, {}).items():
                m[pos[j], col] = c
        return m

    def point_count(self) -> int:
        return self.space.point_count()

    def to_json(self) -> dict:
        """Degree dims, per-degree ``d`` matrices, ``[i, j, k, "p/q"]`` products."""
        sp = self.space
        lo, hi = sp.degree_range()
        out: dict = {
            "degrees": [lo, hi],
            "dims": [len(sp.in_degree(q)) for q in range(lo, hi + 1)],
            "labels": list(sp.labels),
            "d": {str(q): [[format_fraction(x) for x in row] for row in self.d_matrix(q).to_rows()]
                  for q in range(lo, hi) if any(i in self.d for i in sp.in_degree(q))},
            "mul": [[i, j, k, format_fraction(c)] for (i, j) in sorted(self.mul) for k, c in sorted(self.mul[(i, j)].items())],
        }
        if sp.points is not None:
            out["points"] = [list(p) for p in sp.points]
        if self.unit is not None:
            out["unit"] = [[i, format_fraction(c)] for i, c in sorted(self.unit.items())]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "DGAlgebra":
        """Inverse of :meth:`to_json`; errors name the offending field."""
        where = "degrees"
        try:
            lo, hi = (int(x) for x in data["degrees"])
            where = "dims"
            dims = [int(x) for x in data["dims"]]
            if len(dims) != hi - lo + 1 or any(x < 0 for x in dims):
                raise ValueError("one non-negative dimension per degree expected")
            degrees = [q for q, n in zip(range(lo, hi + 1), dims) for _ in range(n)]
            where = "labels"
            labels = list(data.get("labels") or [])
            where = "points"
            points = data.get("points")
            space = GradedSpace(degrees, labels, points)
            d: dict[int, Vec] = {}
            for q, rows in data.get("d", {}).items():
                where = f"d[{q}]"
                src, tgt = space.in_degree(int(q)), space.in_degree(int(q) + 1)
                if len(rows) != len(tgt) or any(len(r) != len(src) for r in rows):
                    raise ValueError(f"expected a {len(tgt)}x{len(src)} matrix")
                for r, row in enumerate(rows):
                    for col, x in enumerate(row):
                        x = as_fraction(x)
                        if x:
                            vec_add(d.setdefault(src[col], {}), {tgt[r]: x})
            mul: dict[tuple[int, int], Vec] = {}
            for n, entry in enumerate(data.get("mul", [])):
                where = f"mul[{n}]"
                i, j, k, c = entry
                i, j, k = int(i), int(j), int(k)
                if not all(0 <= x < space.dim for x in (i, j, k)):
                    raise ValueError("basis index out of range")
                vec_add(mul.setdefault((i, j), {}), {k: as_fraction(c)})
            where = "unit"
            unit = None
            if data.get("unit") is not None:
                unit = {int(i): as_fraction(c) for i, c in data["unit"]}
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise DGAError(f"{where}: {exc}") from exc
        return cls(space, d, mul, unit)


def basis_vec(i: int) -> Vec:
    return {i: Fraction(1)}


def validate_dga(a: DGAlgebra) -> list[Violation]:
    """All violated DGA identities, each with a witnessing basis tuple."""
    sp = a.space
    deg = sp.degrees
    report: list[Violation] = []
    n = a.dim
    for i, img in a.d.items():
        if any(deg[j] != deg[i] + 1 for j in img):
            report.append(Violation("d has degree +1", (i,), img))
    for (i, j), img in a.mul.items():
        if any(deg[k] != deg[i] + deg[j] for k in img):
            report.append(Violation("product is degree-additive", (i, j), img))
    for i in range(n):
        dd = a.diff(a.d.get(i, {}))
        if dd:
            report.append(Violation("d∘d = 0", (i,), dd))
    for i, j in itertools.product(range(n), repeat=2):
        ei, ej = basis_vec(i), basis_vec(j)
        lhs = a.diff(a.mul.get((i, j), {}))
        rhs = a.product(a.diff(ei), ej)
        vec_add(rhs, a.product(ei, a.diff(ej)), -1 if deg[i] % 2 else 1)
        res = vec_add(lhs, rhs, -1)
        if res:
            report.append(Violation("Leibniz rule", (i, j), res))
    for i, j, k in itertools.product(range(n), repeat=3):
        left = a.product(a.mul.get((i, j), {}), basis_vec(k))
        right = a.product(basis_vec(i), a.mul.get((j, k), {}))
        res = vec_add(left, right, -1)
        if res:
            report.append(Violation("associativity", (i, j, k), res))
    if a.unit is not None:
        u = clean(a.unit)
        if any(deg[k] != 0 for k in u):
            report.append(Violation("unit lies in degree 0", (), u))
        for i in range(n):
            e = basis_vec(i)
            for side, val in (("left", a.product(u, e)), ("right", a.product(e, u))):
                res = vec_add(dict(val), e, -1)
                if res:
                    report.append(Violation(f"{side} unit", (i,), res))
    if sp.points is not None:
        pts = sp.points
        for (i, j), img in a.mul.items():
            if pts[i][1] != pts[j][0]:
                report.append(Violation("non-composable product vanishes", (i, j), img))
            elif any(pts[k] != (pts[i][0], pts[j][1]) for k in img):
                report.append(Violation("product respects point labels", (i, j), img))
        for i, img in a.d.items():
            if any(pts[k] != pts[i] for k in img):
                report.append(Violation("d respects point labels", (i,), img))
    return report


@dataclass
class SplittingData:
    """Deformation retract of ``A`` onto its cohomology ``H``.

    ``f1[k]`` is the representative of the ``k``-th cohomology basis class,
    ``p[i]`` and ``h[i]`` the images of the ``i``-th basis vector of ``A``.
    """

    H: GradedSpace
    f1: dict[int, Vec]
    p: dict[int, Vec]
    h: dict[int, Vec]

    def apply_f1(self, v: Vec) -> Vec:
        return _apply(self.f1, v)

    def apply_p(self, v: Vec) -> Vec:
        return _apply(self.p, v)

    def apply_h(self, v: Vec) -> Vec:
        return _apply(self.h, v)

    def is_formal(self) -> bool:
        return not any(self.h.values())


def _apply(table: dict[int, Vec], v: Vec) -> Vec:
    out: Vec = {}
    for i, c in v.items():
        img = table.get(i)
        if img:
            vec_add(out, img, c)
    return out


def cohomology(a: DGAlgebra, validate: bool = True) -> SplittingData:
    """Deterministic splitting ``A = f1(H) + im(d) + C`` in every degree."""
    if validate:
        bad = validate_dga(a)
        if bad:
            raise DGAError(f"not a DG algebra: {bad[0]}")
    sp = a.space
    h_degrees: list[int] = []
    h_points: list[tuple[int, int]] = []
    f1_cols: list[tuple[int, list[Fraction]]] = []
    coords: dict[int, tuple[Matrix, int, int]] = {}
    complements: dict[int, list[list[Fraction]]] = {}
    bases: dict[int, list[list[Fraction]]] = {}
    for q in sp.occupied_degrees():
        idx = sp.in_degree(q)
        dim = len(idx)
        dq = a.d_matrix(q)
        dprev = a.d_matrix(q - 1)
        boundary_cols = [dprev.column(j) for j in range(dprev.cols)]
        b_basis = [boundary_cols[j] for j in _independent(boundary_cols, dim)]
        z_basis = kernel_basis(dq) if dq.rows else [_unit(dim, k) for k in range(dim)]
        reps = _extend(b_basis, z_basis, dim)
        cycles = b_basis + reps
        std = [_unit(dim, k) for k in range(dim)]
        comp = _extend(cycles, std, dim)
        basis = reps + b_basis + comp
        if len(basis) != dim:
            raise DGAError(f"failed to complete a basis in degree {q}")
        T = Matrix.from_columns(basis, dim)
        coords[q] = (inverse(T), len(reps), len(b_basis))
        complements[q] = comp
        bases[q] = basis
        for v in reps:
            f1_cols.append((q, v))
            h_degrees.append(q)
            if sp.points is not None:
                h_points.append(_point_of(sp, idx, v))
    labels = []
    counter: dict[int, int] = {}
    for q in h_degrees:
        labels.append(f"h{q}_{counter.get(q, 0)}")
        counter[q] = counter.get(q, 0) + 1
    H = GradedSpace(h_degrees, labels, h_points if sp.points is not None else None)
    f1: dict[int, Vec] = {}
    for k, (q, v) in enumerate(f1_cols):
        idx = sp.in_degree(q)
        f1[k] = {idx[t]: c for t, c in enumerate(v) if c}
    h_index_start = {}
    for k, q in enumerate(h_degrees):
        h_index_start.setdefault(q, k)
    p: dict[int, Vec] = {}
    hmap: dict[int, Vec] = {}
    for q in sp.occupied_degrees():
        idx = sp.in_degree(q)
        Tinv, nrep, nb = coords[q]
        prev_idx = sp.in_degree(q - 1)
        # d restricted to the complement in degree q-1 is an isomorphism onto
        # im(d) in degree q; invert it on the chosen boundary basis.
        comp_prev = complements.get(q - 1, [])
        dprev = a.d_matrix(q - 1)
        lift = _boundary_lifts(dprev, comp_prev, bases[q][nrep:nrep + nb]) if nb else []
        for t, i in enumerate(idx):
            c = Tinv.column(t)
            pv: Vec = {}
            for r in range(nrep):
                if c[r]:
                    pv[h_index_start[q] + r] = c[r]
            if pv:
                p[i] = pv
            hv: Vec = {}
            for r in range(nb):
                if c[nrep + r]:
                    vec_add(hv, {prev_idx[s]: x for s, x in enumerate(lift[r]) if x}, c[nrep + r])
            if hv:
                hmap[i] = hv
    return SplittingData(H, f1, p, hmap)


def _unit(n: int, k: int) -> list[Fraction]:
    v = [Fraction(0)] * n
    v[k] = Fraction(1)
    return v


def _independent(vectors: list[list[Fraction]], dim: int) -> list[int]:
    if not vectors or dim == 0:
        return []
    return rref(Matrix.from_columns(vectors, dim))[1]


def _extend(base: list[list[Fraction]], candidates: list[list[Fraction]], dim: int) -> list[list[Fraction]]:
    """Candidates (in order) that enlarge ``span(base)``, greedily."""
    if dim == 0:
        return []
    cols = base + candidates
    piv = _independent(cols, dim)
    return [cols[j] for j in piv if j >= len(base)]


def _boundary_lifts(dprev: Matrix, comp_prev: list[list[Fraction]], boundaries: list[list[Fraction]]) -> list[list[Fraction]]:
    """For each boundary ``b`` the unique ``c`` in the complement with ``d c = b``."""
    images = [dprev.apply(c) for c in comp_prev]
    M = Matrix.from_columns(images, dprev.rows)
    Minv_rows = _left_inverse(M)
    out = []
    for b in boundaries:
        coeff = Minv_rows.apply(b)
        lift = [Fraction(0)] * dprev.cols
        for c, vec in zip(coeff, comp_prev):
            if c:
                lift = [x + c * y for x, y in zip(lift, vec)]
        out.append(lift)
    return out


def _left_inverse(M: Matrix) -> Matrix:
    # M has full column rank: (M^T M)^{-1} M^T
    Mt = M.transpose()
    return inverse(Mt @ M) @ Mt


def _point_of(sp: GradedSpace, idx: list[int], v: list[Fraction]) -> tuple[int, int]:
    pts = {sp.points[idx[t]] for t, c in enumerate(v) if c}
    if len(pts) != 1:
        raise DGAError("cohomology representative mixes point components")
    return pts.pop()


def induced_m2(s: SplittingData, a: DGAlgebra) -> dict[tuple[int, int], Vec]:
    """``m2(x, y) = p(f1(x) f1(y))`` on all pairs of cohomology basis vectors."""
    out = {}
    n = s.H.dim
    for i in range(n):
        for j in range(n):
            v = s.apply_p(a.product(s.f1.get(i, {}), s.f1.get(j, {})))
            if v:
                out[(i, j)] = v
    return out


def splitting_residuals(a: DGAlgebra, s: SplittingData) -> list[str]:
    """Violated splitting identities (empty when all hold exactly)."""
    bad = []
    for k in range(s.H.dim):
        if s.apply_p(s.f1.get(k, {})) != {k: Fraction(1)}:
            bad.append(f"p f1 != id at {k}")
        if s.apply_h(s.f1.get(k, {})):
            bad.append(f"h f1 != 0 at {k}")
        if a.diff(s.f1.get(k, {})):
            bad.append(f"f1({k}) is not a cocycle")
    for i in range(a.dim):
        e = basis_vec(i)
        lhs = a.diff(s.apply_h(e))
        vec_add(lhs, s.apply_h(a.diff(e)), 1)
        vec_add(lhs, s.apply_f1(s.apply_p(e)), 1)
        if clean(lhs) != e:
            bad.append(f"dh + hd + f1 p != id at {i}")
        if s.apply_p(s.apply_h(e)):
            bad.append(f"p h != 0 at {i}")
        if s.apply_h(s.apply_h(e)):
            bad.append(f"h h != 0 at {i}")
    return bad


def formal_dga(space: GradedSpace, mul: dict[tuple[int, int], Vec], unit: Vec | None = None) -> DGAlgebra:
    """Zero-differential DG algebra."""
    return DGAlgebra(space, {}, mul, unit)


def change_basis(a: DGAlgebra, T: dict[int, Vec]) -> DGAlgebra:
    """Same algebra in the basis ``e'_i = T[i]`` (``T`` degree-preserving, invertible)."""
    sp = a.space
    n = a.dim
    M = Matrix(n, n)
    for i, v in T.items():
        for j, c in v.items():
            M[j, i] = c
    Minv = inverse(M)

    def to_new(v: Vec) -> Vec:
        col = [v.get(k, Fraction(0)) for k in range(n)]
        return clean(dict(enumerate(Minv.apply(col))))

    d = {i: to_new(a.diff(T.get(i, {}))) for i in range(n)}
    mul = {}
    for i in range(n):
        for j in range(n):
            v = to_new(a.product(T.get(i, {}), T.get(j, {})))
            if v:
                mul[(i, j)] = v
    unit = to_new(a.unit) if a.unit is not None else None
    return DGAlgebra(GradedSpace(sp.degrees, list(sp.labels), sp.points), d, mul, unit)


def subalgebra(a: DGAlgebra, vectors: list[Vec], labels: list[str] | None = None,
               unit: Vec | None = None) -> tuple[DGAlgebra, dict[int, Vec]]:
    """The sub-DG algebra spanned by homogeneous ``vectors`` (listed by degree).

    Returns the algebra and its inclusion (basis index -> vector of ``a``).
    Raises :class:`DGAError` if the span is not closed under ``d`` and products.
    """
    sp = a.space
    degrees = []
    points = [] if sp.points is not None else None
    for v in vectors:
        q = sp.vec_degree(v)
        if q is None:
            raise DGAError("zero vector in a subalgebra basis")
        degrees.append(q)
        if points is not None:
            pts = {sp.points[i] for i in v}
            if len(pts) != 1:
                raise DGAError("subalgebra basis vector mixes point components")
            points.append(pts.pop())
    if degrees != sorted(degrees):
        raise DGAError("subalgebra basis must be sorted by degree")
    cols = [[v.get(i, Fraction(0)) for i in range(a.dim)] for v in vectors]
    M = Matrix.from_columns(cols, a.dim)
    red, pivots = rref(M)
    if len(pivots) != len(vectors):
        raise DGAError("subalgebra basis is linearly dependent")

    def coords(v: Vec) -> Vec:
        if not v:
            return {}
        aug = Matrix.from_columns(cols + [[v.get(i, Fraction(0)) for i in range(a.dim)]], a.dim)
        r2, piv2 = rref(aug)
        if piv2 and piv2[-1] == len(vectors):
            raise DGAError("span is not closed under the DG operations")
        return {pc: r2[r, len(vectors)] for r, pc in enumerate(piv2) if r2[r, len(vectors)]}

    d = {i: coords(a.diff(v)) for i, v in enumerate(vectors)}
    mul = {}
    for i, u in enumerate(vectors):
        for j, v in enumerate(vectors):
            c = coords(a.product(u, v))
            if c:
                mul[(i, j)] = c
    space = GradedSpace(degrees, labels or [f"s{i}" for i in range(len(vectors))], points)
    sub_unit = coords(unit) if unit is not None else None
    return DGAlgebra(space, d, mul, sub_unit), dict(enumerate(vectors))
