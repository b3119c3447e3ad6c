"""Graded vector spaces, sparse vectors and the Koszul sign rule.

Vectors are ``dict[int, Fraction]`` keyed by global basis index. A multilinear
map is stored as a sparse tensor ``dict[tuple[int, ...], vector]`` holding its
values on basis tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .linalg import as_fraction, format_fraction

Vec = dict  # dict[int, Fraction]
Tensor = dict  # dict[tuple[int, ...], Vec]


def vec_add(acc: Vec, v: Vec, c=1) -> Vec:
    """In-place ``acc += c * v``; zero entries are dropped."""
    if not c:
        return acc
    for k, x in v.items():
        nv = acc.get(k, 0) + c * x
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)
    return acc


def vec_scale(v: Vec, c) -> Vec:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_sub(a: Vec, b: Vec) -> Vec:
    return vec_add(dict(a), b, -1)


def clean(v: Vec) -> Vec:
    return {k: x for k, x in v.items() if x}


def koszul_sign(map_degrees: Sequence[int], arities: Sequence[int], elem_degrees: Sequence[int]) -> int:
    """Sign of ``(f_1 (x) ... (x) f_r)(x_1 (x) ... (x) x_n)``.

    Each ``f_k`` is moved past every element consumed by ``f_1 .. f_{k-1}``,
    contributing ``(-1)^(|f_k| * |x|)``.
    """
    parity = 0
    consumed = 0
    pos = 0
    for deg, ar in zip(map_degrees, arities):
        if deg & 1:
            parity ^= consumed & 1
        for q in elem_degrees[pos:pos + ar]:
            consumed += q
        pos += ar
    return -1 if parity else 1


def insert_sign(map_degree: int, prefix_degrees: Iterable[int]) -> int:
    """Sign of ``(1^r (x) g (x) 1^t)`` applied to a tuple whose first ``r`` degrees are given."""
    if not map_degree & 1:
        return 1
    return -1 if sum(prefix_degrees) & 1 else 1


@dataclass
class GradedSpace:
    """Finite-dimensional graded space with a global, degree-sorted basis."""

    degrees: list[int]
    labels: list[str] = field(default_factory=list)
    points: list[tuple[int, int]] | None = None

    def __post_init__(self):
        self.degrees = [int(q) for q in self.degrees]
        if any(a > b for a, b in zip(self.degrees, self.degrees[1:])):
            raise ValueError("basis must be sorted by degree")
        if not self.labels:
            self.labels = [f"e{i}" for i in range(len(self.degrees))]
        if len(self.labels) != len(self.degrees):
            raise ValueError("label count does not match dimension")
        if self.points is not None:
            self.points = [tuple(int(s) for s in p) for p in self.points]
            if len(self.points) != len(self.degrees):
                raise ValueError("point label count does not match dimension")
        self._by_degree: dict[int, list[int]] = {}
        for i, q in enumerate(self.degrees):
            self._by_degree.setdefault(q, []).append(i)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def degree_range(self) -> tuple[int, int]:
        if not self.degrees:
            return (0, -1)
        return (self.degrees[0], self.degrees[-1])

    def in_degree(self, q: int) -> list[int]:
        return self._by_degree.get(q, [])

    def dims(self) -> dict[int, int]:
        return {q: len(v) for q, v in sorted(self._by_degree.items())}

    def occupied_degrees(self) -> list[int]:
        return sorted(self._by_degree)

    def vec_degree(self, v: Vec) -> int | None:
        qs = {self.degrees[i] for i in v}
        if len(qs) > 1:
            raise ValueError("inhomogeneous vector")
        return qs.pop() if qs else None

    def tuples(self, n: int, total_degrees: set[int] | None = None) -> Iterator[tuple[int, ...]]:
        """Basis tuples of length ``n``, optionally restricted by their degree sum."""
        occ = self.occupied_degrees()
        if total_degrees is None:
            yield from itertools.product(range(self.dim), repeat=n)
            return
        for qs in itertools.product(occ, repeat=n):
            if sum(qs) in total_degrees:
                yield from itertools.product(*(self._by_degree[q] for q in qs))

    def point_count(self) -> int:
        if not self.points:
            return 1
        return max(max(p) for p in self.points)


def tensor_apply(t: Tensor, args: tuple[int, ...]) -> Vec:
    return t.get(args, {})


def tensor_apply_vecs(t: Tensor, vecs: Sequence[Vec]) -> Vec:
    """Multilinear extension of a tensor to vector arguments (no signs)."""
    out: Vec = {}
    for combo in itertools.product(*(v.items() for v in vecs)):
        key = tuple(k for k, _ in combo)
        val = t.get(key)
        if val:
            c = Fraction(1)
            for _, x in combo:
                c *= x
            vec_add(out, val, c)
    return out


def tensor_to_json(t: Tensor) -> list:
    """Sparse tensor as ``[[i1, ..., in], k, "p/q"]`` entries in sorted order."""
    return [[list(key), k, format_fraction(c)] for key in sorted(t) for k, c in sorted(t[key].items())]


def tensor_from_json(entries: Iterable) -> Tensor:
    out: Tensor = {}
    for key, k, c in entries:
        vec_add(out.setdefault(tuple(int(i) for i in key), {}), {int(k): as_fraction(c)})
    return {key: v for key, v in out.items() if v}
