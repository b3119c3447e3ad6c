"""Homotopy transfer of a DG algebra onto its cohomology.

Sign conventions: the Stasheff relations are
``sum (-1)^(rs+t) m_{r+1+t}(1^r (x) m_s (x) 1^t) = 0`` and morphisms satisfy
``sum (-1)^(rs+t) f_{r+1+t}(1^r (x) m_s (x) 1^t)
= sum (-1)^(sum_{j<k} i_j (i_k + 1)) m_r(f_{i_1} (x) ... (x) f_{i_r})``.
Tensor products of maps are evaluated on elements with the Koszul rule
(:func:`ncdef.graded.koszul_sign`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .dga import DGAlgebra, SplittingData
from .graded import GradedSpace, Tensor, Vec, insert_sign, koszul_sign, vec_add

ONE = Fraction(1)


class TransferConsistencyError(RuntimeError):
    """``d(U_n) != 0`` during transfer: the sign conventions are inconsistent."""


class InfeasibleConstraints(RuntimeError):
    """The constraints defining the projection morphism have no solution."""


@dataclass
class AInfinityAlgebra:
    """Graded space with operations ``m_n`` (degree ``2 - n``) up to ``order``."""

    space: GradedSpace
    order: int
    ops: dict[int, Tensor] = field(default_factory=dict)

    def op(self, n: int, args: tuple[int, ...]) -> Vec:
        t = self.ops.get(n)
        return t.get(args, {}) if t else {}

    def has_op(self, n: int) -> bool:
        return bool(self.ops.get(n))

    def point_count(self) -> int:
        return self.space.point_count()


def dga_as_ainf(a: DGAlgebra, order: int = 2) -> AInfinityAlgebra:
    ops = {1: {(i,): v for i, v in a.d.items()}, 2: dict(a.mul)}
    return AInfinityAlgebra(a.space, max(order, 2), ops)


def compositions(n: int, parts: int | None = None) -> Iterator[tuple[int, ...]]:
    """Ordered compositions of ``n`` into positive parts (optionally a fixed number)."""
    if parts is None:
        for r in range(1, n + 1):
            yield from compositions(n, r)
        return
    if parts == 1:
        yield (n,)
        return
    for first in range(1, n - parts + 2):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def composition_sign(parts: tuple[int, ...]) -> int:
    """``(-1)^(sum_{j<k} i_j (i_k + 1))``."""
    parity = 0
    before = 0
    for i in parts:
        parity ^= (before * (i + 1)) & 1
        before += i
    return -1 if parity else 1


def _blocks(args: tuple, parts: tuple[int, ...]) -> list[tuple]:
    out, pos = [], 0
    for p in parts:
        out.append(args[pos:pos + p])
        pos += p
    return out


def _expand(outer: Callable[[tuple[int, ...]], Vec], vecs: list[Vec]) -> Vec:
    """Multilinear extension of a basis-tuple map to vector arguments."""
    out: Vec = {}
    if any(not v for v in vecs):
        return out
    for combo in itertools.product(*(v.items() for v in vecs)):
        c = ONE
        for _, x in combo:
            c *= x
        val = outer(tuple(k for k, _ in combo))
        if val:
            vec_add(out, val, c)
    return out


class AInfinityMorphism:
    """Components ``f_n`` (degree ``1 - n``) from ``source`` to ``target``."""

    def __init__(self, source: AInfinityAlgebra, target: AInfinityAlgebra, order: int):
        self.source = source
        self.target = target
        self.order = order

    def component(self, n: int, args: tuple[int, ...]) -> Vec:
        raise NotImplementedError

    def is_zero_component(self, n: int) -> bool:
        return False

    def apply_vecs(self, n: int, vecs: list[Vec]) -> Vec:
        return _expand(lambda t: self.component(n, t), vecs)

    def tabulate(self) -> "TabulatedMorphism":
        maps: dict[int, Tensor] = {}
        tocc = set(self.target.space.occupied_degrees())
        for n in range(1, self.order + 1):
            totals = {q - 1 + n for q in tocc}
            t: Tensor = {}
            if not self.is_zero_component(n):
                for args in self.source.space.tuples(n, totals):
                    v = self.component(n, args)
                    if v:
                        t[args] = v
            maps[n] = t
        return TabulatedMorphism(self.source, self.target, self.order, maps)


class TabulatedMorphism(AInfinityMorphism):
    def __init__(self, source, target, order, maps: dict[int, Tensor]):
        super().__init__(source, target, order)
        self.maps = maps

    def component(self, n: int, args: tuple[int, ...]) -> Vec:
        t = self.maps.get(n)
        return t.get(args, {}) if t else {}

    def is_zero_component(self, n: int) -> bool:
        return not self.maps.get(n)

    def tabulate(self) -> "TabulatedMorphism":
        return self


def identity_morphism(alg: AInfinityAlgebra, order: int) -> TabulatedMorphism:
    maps = {1: {(i,): {i: ONE} for i in range(alg.space.dim)}}
    for n in range(2, order + 1):
        maps[n] = {}
    return TabulatedMorphism(alg, alg, order, maps)


# ---------------------------------------------------------------------------
# residual checks: brute force over basis tuples, sharing nothing with the
# transfer recursion except the sign rule


def check_ainf_relations(a: AInfinityAlgebra, order: int) -> dict[int, Tensor]:
    """Residual of the Stasheff relation in each arity ``<= order`` (empty = holds)."""
    sp = a.space
    deg = sp.degrees
    occ = set(sp.occupied_degrees())
    report: dict[int, Tensor] = {}
    for i in range(1, order + 1):
        terms = []
        for s in range(1, i + 1):
            for r in range(0, i - s + 1):
                t = i - r - s
                u = r + 1 + t
                if a.has_op(u) and a.has_op(s):
                    terms.append((r, s, t, u))
        if not terms:
            continue
        totals = {q - 3 + i for q in occ}
        bad: Tensor = {}
        for args in sp.tuples(i, totals):
            res: Vec = {}
            for r, s, t, u in terms:
                inner = a.op(s, args[r:r + s])
                if not inner:
                    continue
                sign = (-1) ** ((r * s + t) & 1) * insert_sign(2 - s, (deg[x] for x in args[:r]))
                for k, c in inner.items():
                    val = a.op(u, args[:r] + (k,) + args[r + s:])
                    if val:
                        vec_add(res, val, sign * c)
            if res:
                bad[args] = res
        if bad:
            report[i] = bad
    return report


def check_morphism_relations(f: AInfinityMorphism, order: int) -> dict[int, Tensor]:
    """Residual (LHS - RHS) of the morphism relation in each arity ``<= order``."""
    A, B = f.source, f.target
    sp = A.space
    deg = sp.degrees
    occ = set(B.space.occupied_degrees())
    report: dict[int, Tensor] = {}
    for i in range(1, order + 1):
        lhs_terms = []
        for s in range(1, i + 1):
            for r in range(0, i - s + 1):
                t = i - r - s
                if A.has_op(s) and not f.is_zero_component(r + 1 + t):
                    lhs_terms.append((r, s, t))
        rhs_terms = []
        for parts in compositions(i):
            if B.has_op(len(parts)) and not any(f.is_zero_component(p) for p in parts):
                rhs_terms.append(parts)
        if not lhs_terms and not rhs_terms:
            continue
        totals = {q - 2 + i for q in occ}
        bad: Tensor = {}
        for args in sp.tuples(i, totals):
            degs = [deg[x] for x in args]
            res: Vec = {}
            for r, s, t in lhs_terms:
                inner = A.op(s, args[r:r + s])
                if not inner:
                    continue
                sign = (-1) ** ((r * s + t) & 1) * insert_sign(2 - s, degs[:r])
                for k, c in inner.items():
                    val = f.component(r + 1 + t, args[:r] + (k,) + args[r + s:])
                    if val:
                        vec_add(res, val, sign * c)
            for parts in rhs_terms:
                blocks = _blocks(args, parts)
                vecs = [f.component(p, b) for p, b in zip(parts, blocks)]
                if any(not v for v in vecs):
                    continue
                sign = composition_sign(parts) * koszul_sign([1 - p for p in parts], parts, degs)
                r = len(parts)
                val = _expand(lambda key: B.op(r, key), vecs)
                vec_add(res, val, -sign)
            if res:
                bad[args] = res
        if bad:
            report[i] = bad
    return report


# ---------------------------------------------------------------------------
# Kadeishvili transfer


@dataclass
class TransferResult:
    minimal: AInfinityAlgebra
    f: TabulatedMorphism
    dga: DGAlgebra
    splitting: SplittingData

    @property
    def order(self) -> int:
        return self.minimal.order


def kadeishvili(a: DGAlgebra, s: SplittingData, order: int) -> TransferResult:
    """Minimal A-infinity structure on ``H(A)`` and the morphism ``f: H -> A``.

    For ``n >= 2``: ``m_n = p(U_n)`` and ``f_n = h(f_1 m_n - U_n)``, where
    ``U_n = sum_i (-1)^(i(n-i+1)) m_2(f_i (x) f_{n-i})
    - sum (-1)^(rs+t) f_{r+1+t}(1^r (x) m_s (x) 1^t)``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    H = s.H
    hdeg = H.degrees
    a_occ = set(a.space.occupied_degrees())
    m: dict[int, Tensor] = {1: {}}
    f: dict[int, Tensor] = {1: {(k,): v for k, v in s.f1.items() if v}}
    for n in range(2, order + 1):
        totals = {q - 2 + n for q in a_occ}
        mn: Tensor = {}
        fn: Tensor = {}
        for args in H.tuples(n, totals):
            degs = [hdeg[x] for x in args]
            U: Vec = {}
            for i in range(1, n):
                left = f[i].get(args[:i])
                if not left:
                    continue
                right = f[n - i].get(args[i:])
                if not right:
                    continue
                sign = -1 if (i * (n - i + 1)) & 1 else 1
                if (1 - (n - i)) & 1 and sum(degs[:i]) & 1:
                    sign = -sign
                vec_add(U, a.product(left, right), sign)
            for s_ in range(2, n):
                ms = m[s_]
                if not ms:
                    continue
                for r in range(0, n - s_ + 1):
                    t = n - r - s_
                    inner = ms.get(args[r:r + s_])
                    if not inner:
                        continue
                    fu = f[r + 1 + t]
                    if not fu:
                        continue
                    sign = -1 if (r * s_ + t) & 1 else 1
                    if (2 - s_) & 1 and sum(degs[:r]) & 1:
                        sign = -sign
                    for k, c in inner.items():
                        val = fu.get(args[:r] + (k,) + args[r + s_:])
                        if val:
                            vec_add(U, val, -sign * c)
            if not U:
                continue
            dU = a.diff(U)
            if dU:
                raise TransferConsistencyError(f"d(U_{n}) != 0 on {args}: {dU}")
            mv = s.apply_p(U)
            if mv:
                mn[args] = mv
            z = s.apply_f1(mv)
            vec_add(z, U, -1)
            fv = s.apply_h(z)
            if fv:
                fn[args] = fv
        m[n] = mn
        f[n] = fn
    minimal = AInfinityAlgebra(H, order, m)
    target = dga_as_ainf(a, order)
    return TransferResult(minimal, TabulatedMorphism(minimal, target, order, f), a, s)


# ---------------------------------------------------------------------------
# projection morphism g: A -> H with g o f = 1


class ProjectionMorphism(AInfinityMorphism):
    """``g: A -> H(A)`` evaluated lazily on basis tuples of ``A``.

    ``g_1 = p``. For ``n >= 2`` the morphism relation prescribes ``g_n`` on the
    image of the tensor differential (``g_n D_n = Phi_n``), and ``g o f = 1``
    prescribes ``g_n`` on ``f_1(H)^n`` (``g_n f_1^n = Psi_n``). Both are met by
    ``g_n = Phi_n H_n + Psi_n p^n`` with the tensor homotopy
    ``H_n = (-1)^(n-1) sum_k (f_1 p)^(k-1) (x) h (x) 1^(n-k)``; the remaining
    complement is sent to zero.
    """

    def __init__(self, result: TransferResult, order: int):
        dga_alg = dga_as_ainf(result.dga, order)
        super().__init__(dga_alg, result.minimal, order)
        self.result = result
        self.a = result.dga
        self.s = result.splitting
        self.f = result.f
        self._g: dict[tuple[int, ...], Vec] = {}
        self._phi: dict[tuple[int, ...], Vec] = {}
        self._psi: dict[tuple[int, ...], Vec] = {}

    def component(self, n: int, args: tuple[int, ...]) -> Vec:
        if n == 1:
            return self.s.p.get(args[0], {})
        if n > self.order:
            return {}
        hit = self._g.get(args)
        if hit is not None:
            return hit
        deg = self.a.space.degrees
        out: Vec = {}
        sign0 = -1 if (n - 1) & 1 else 1
        ip = [self.s.apply_f1(self.s.p.get(x, {})) for x in args]
        prefix = 0
        for k in range(n):
            hk = self.s.h.get(args[k])
            if hk:
                vecs = ip[:k] + [hk] + [{x: ONE} for x in args[k + 1:]]
                sign = sign0 * (-1 if prefix & 1 else 1)
                vec_add(out, _expand(self._phi_at, vecs), sign)
            prefix += deg[args[k]]
        pv = [self.s.p.get(x, {}) for x in args]
        if all(pv):
            vec_add(out, _expand(self._psi_at, pv))
        self._g[args] = out
        return out

    def _phi_at(self, args: tuple[int, ...]) -> Vec:
        hit = self._phi.get(args)
        if hit is not None:
            return hit
        out = self._phi_raw(args)
        self._phi[args] = out
        return out

    def _phi_raw(self, args: tuple[int, ...]) -> Vec:
        n = len(args)
        deg = self.a.space.degrees
        degs = [deg[x] for x in args]
        Hm = self.result.minimal
        out: Vec = {}
        for parts in compositions(n):
            r = len(parts)
            if r < 2 or not Hm.has_op(r):
                continue
            vecs = [self.component(p, b) for p, b in zip(parts, _blocks(args, parts))]
            if any(not v for v in vecs):
                continue
            sign = composition_sign(parts) * koszul_sign([1 - p for p in parts], parts, degs)
            vec_add(out, _expand(lambda key: Hm.op(r, key), vecs), sign)
        for r in range(0, n - 1):
            t = n - 2 - r
            prod = self.a.mul.get((args[r], args[r + 1]))
            if not prod:
                continue
            sign = -1 if t & 1 else 1
            for k, c in prod.items():
                val = self.component(n - 1, args[:r] + (k,) + args[r + 2:])
                if val:
                    vec_add(out, val, -sign * c)
        return out

    def _psi_at(self, hargs: tuple[int, ...]) -> Vec:
        hit = self._psi.get(hargs)
        if hit is not None:
            return hit
        n = len(hargs)
        hdeg = self.s.H.degrees
        degs = [hdeg[x] for x in hargs]
        out: Vec = {}
        for parts in compositions(n):
            r = len(parts)
            if r == n:
                continue
            vecs = [self.f.component(p, b) for p, b in zip(parts, _blocks(hargs, parts))]
            if any(not v for v in vecs):
                continue
            sign = composition_sign(parts) * koszul_sign([1 - p for p in parts], parts, degs)
            vec_add(out, self.apply_vecs(r, vecs), -sign)
        self._psi[hargs] = out
        return out

    def feasibility_defects(self, n: int) -> Tensor:
        """``Phi_n`` on ``f_1(H)^n``; it must vanish for the relation to be solvable."""
        H = self.s.H
        occ = set(H.occupied_degrees())
        bad: Tensor = {}
        for hargs in H.tuples(n, {q - 2 + n for q in occ}):
            vecs = [self.s.f1.get(x, {}) for x in hargs]
            v = _expand(self._phi_at, vecs)
            if v:
                bad[hargs] = v
        return bad


def build_g(result: TransferResult, order: int | None = None, check: bool = True) -> ProjectionMorphism:
    order = result.order if order is None else order
    g = ProjectionMorphism(result, order)
    if check:
        for n in range(2, order + 1):
            bad = g.feasibility_defects(n)
            if bad:
                raise InfeasibleConstraints(f"arity {n}: Phi_n does not vanish on f1(H)^n, e.g. {next(iter(bad.items()))}")
    return g


def compose(g: AInfinityMorphism, f: AInfinityMorphism, order: int | None = None) -> TabulatedMorphism:
    """``(g o f)_n = sum (-1)^(sum_{j<k} i_j (i_k+1)) g_r (f_{i_1} (x) ... (x) f_{i_r})``."""
    if f.target.space.dim != g.source.space.dim or f.target.space.degrees != g.source.space.degrees:
        raise ValueError("target of f does not match source of g")
    if order is None:
        if f.order != g.order:
            raise ValueError("morphisms of different orders")
        order = f.order
    sp = f.source.space
    deg = sp.degrees
    occ = set(g.target.space.occupied_degrees())
    maps: dict[int, Tensor] = {}
    for n in range(1, order + 1):
        t: Tensor = {}
        plist = [p for p in compositions(n)
                 if not g.is_zero_component(len(p)) and not any(f.is_zero_component(i) for i in p)]
        if plist:
            for args in sp.tuples(n, {q - 1 + n for q in occ}):
                degs = [deg[x] for x in args]
                out: Vec = {}
                for parts in plist:
                    vecs = [f.component(p, b) for p, b in zip(parts, _blocks(args, parts))]
                    if any(not v for v in vecs):
                        continue
                    sign = composition_sign(parts) * koszul_sign([1 - p for p in parts], parts, degs)
                    vec_add(out, g.apply_vecs(len(parts), vecs), sign)
                if out:
                    t[args] = out
        maps[n] = t
    return TabulatedMorphism(f.source, g.target, order, maps)


def morphism_difference(f: AInfinityMorphism, g: AInfinityMorphism, order: int) -> dict[int, Tensor]:
    """Components where two morphisms with the same source differ."""
    ft, gt = f.tabulate(), g.tabulate()
    out: dict[int, Tensor] = {}
    for n in range(1, order + 1):
        a, b = ft.maps.get(n, {}), gt.maps.get(n, {})
        diff: Tensor = {}
        for key in set(a) | set(b):
            v = vec_add(dict(a.get(key, {})), b.get(key, {}), -1)
            if v:
                diff[key] = v
        if diff:
            out[n] = diff
    return out


def is_identity(f: AInfinityMorphism, order: int) -> bool:
    return not morphism_difference(f, identity_morphism(f.source, order), order)
