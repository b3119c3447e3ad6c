"""Free path algebras over ``k^r``, non-commutative polynomials and truncated quotients.

A word is a tuple of generator indices read left to right; ``g h`` is
composable iff ``target(g) == source(h)``. Degree-0 words are the idempotents,
encoded as ``(-s,)`` for the point ``s`` in ``1..r``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .linalg import EchelonBasis, as_fraction, format_fraction

Word = tuple


class RelationError(ValueError):
    """Relations that would collapse the degree-0 or degree-1 part."""


def idempotent(s: int) -> Word:
    return (-s,)


def is_idempotent(w: Word) -> bool:
    return len(w) == 1 and w[0] < 0


def word_degree(w: Word) -> int:
    return 0 if is_idempotent(w) else len(w)


@dataclass(frozen=True)
class GeneratorSet:
    names: tuple[str, ...]
    points: int = 1
    sources: tuple[int, ...] = ()
    targets: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        n = len(self.names)
        if len(set(self.names)) != n:
            raise ValueError("generator names must be distinct")
        if self.points < 1:
            raise ValueError("need at least one point")
        src = tuple(self.sources) or (1,) * n
        tgt = tuple(self.targets) or (1,) * n
        if len(src) != n or len(tgt) != n:
            raise ValueError("sources/targets do not match the generators")
        if any(not 1 <= p <= self.points for p in src + tgt):
            raise ValueError("point index out of range")
        object.__setattr__(self, "sources", src)
        object.__setattr__(self, "targets", tgt)

    @classmethod
    def single_point(cls, names: Iterable[str]) -> "GeneratorSet":
        return cls(tuple(names))

    def __len__(self) -> int:
        return len(self.names)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {nm: i for i, nm in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def word_source(self, w: Word) -> int:
        return -w[0] if is_idempotent(w) else self.sources[w[0]]

    def word_target(self, w: Word) -> int:
        return -w[0] if is_idempotent(w) else self.targets[w[-1]]

    def is_word(self, w: Word) -> bool:
        if is_idempotent(w):
            return 1 <= -w[0] <= self.points
        if not w or any(not 0 <= g < len(self) for g in w):
            return False
        return all(self.targets[a] == self.sources[b] for a, b in zip(w, w[1:]))

    def mul_words(self, u: Word, v: Word) -> Word | None:
        """Concatenation, or None when not composable."""
        if self.word_target(u) != self.word_source(v):
            return None
        if is_idempotent(u):
            return v
        if is_idempotent(v):
            return u
        return u + v

    def words(self, d: int) -> list[Word]:
        """Composable words of length ``d`` in lexicographic order."""
        return list(self._words(d))

    def _words(self, d: int) -> tuple[Word, ...]:
        cache = self.__dict__.setdefault("_word_cache", {})
        if d in cache:
            return cache[d]
        if d == 0:
            out = tuple(idempotent(s) for s in range(1, self.points + 1))
        elif d == 1:
            out = tuple((g,) for g in range(len(self)))
        else:
            out = tuple(w + (g,) for w in self._words(d - 1) for g in range(len(self))
                        if self.targets[w[-1]] == self.sources[g])
        cache[d] = out
        return out

    def word_counts(self, n: int) -> list[int]:
        return [len(self._words(d)) for d in range(n + 1)]

    def unit(self) -> "NCPoly":
        return NCPoly(self, {idempotent(s): Fraction(1) for s in range(1, self.points + 1)})

    def gen(self, name: str) -> "NCPoly":
        return NCPoly(self, {(self.index(name),): Fraction(1)})

    def word_str(self, w: Word) -> str:
        if is_idempotent(w):
            return "1" if self.points == 1 else f"e{-w[0]}"
        return "*".join(self.names[g] for g in w)

    def to_json(self) -> dict:
        return {"names": list(self.names), "points": self.points,
                "sources": list(self.sources), "targets": list(self.targets)}

    @classmethod
    def from_json(cls, data: Mapping) -> "GeneratorSet":
        return cls(tuple(data["names"]), int(data.get("points", 1)),
                   tuple(data.get("sources", ())), tuple(data.get("targets", ())))


class NCPoly:
    """Finitely supported map from composable words to rationals."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: GeneratorSet, terms: Mapping[Word, object] | None = None):
        self.gens = gens
        clean = {}
        for w, c in (terms or {}).items():
            c = as_fraction(c)
            if c:
                w = tuple(w)
                if not gens.is_word(w):
                    raise ValueError(f"not a composable word: {w}")
                clean[w] = clean.get(w, 0) + c
        self.terms: dict[Word, Fraction] = {w: c for w, c in clean.items() if c}

    @classmethod
    def _raw(cls, gens: GeneratorSet, terms: dict) -> "NCPoly":
        p = cls.__new__(cls)
        p.gens = gens
        p.terms = terms
        return p

    def _check(self, other: "NCPoly") -> None:
        if other.gens != self.gens:
            raise ValueError("polynomials over different generator sets")

    def __add__(self, other: "NCPoly") -> "NCPoly":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, 0) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return NCPoly._raw(self.gens, out)

    def __neg__(self) -> "NCPoly":
        return NCPoly._raw(self.gens, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def scale(self, c) -> "NCPoly":
        c = as_fraction(c)
        if not c:
            return NCPoly._raw(self.gens, {})
        return NCPoly._raw(self.gens, {w: c * x for w, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            return nc_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        return isinstance(other, NCPoly) and self.gens == other.gens and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degrees(self) -> list[int]:
        return sorted({word_degree(w) for w in self.terms})

    def min_degree(self) -> int | None:
        ds = self.degrees()
        return ds[0] if ds else None

    def max_degree(self) -> int | None:
        ds = self.degrees()
        return ds[-1] if ds else None

    def part(self, d: int) -> "NCPoly":
        return NCPoly._raw(self.gens, {w: c for w, c in self.terms.items() if word_degree(w) == d})

    def truncate(self, n: int) -> "NCPoly":
        return NCPoly._raw(self.gens, {w: c for w, c in self.terms.items() if word_degree(w) <= n})

    def sorted_terms(self) -> list[tuple[Word, Fraction]]:
        return sorted(self.terms.items(), key=lambda wc: word_key(wc[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            ws = self.gens.word_str(w)
            mag = abs(c)
            if is_idempotent(w):
                body = format_fraction(mag) if mag != 1 or ws == "1" else ws
                if mag != 1 and ws != "1":
                    body = f"{format_fraction(mag)}*{ws}"
            elif mag == 1:
                body = ws
            else:
                body = f"{format_fraction(mag)}*{ws}"
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sg, body in parts[1:]:
            out += f" {sg} {body}"
        return out

    def __repr__(self) -> str:
        return f"NCPoly({self})"

    def to_json(self) -> list:
        out = []
        for w, c in self.sorted_terms():
            if is_idempotent(w):
                out.append({"word": [], "point": -w[0], "coeff": format_fraction(c)})
            else:
                out.append({"word": [self.gens.names[g] for g in w], "coeff": format_fraction(c)})
        return out

    @classmethod
    def from_json(cls, gens: GeneratorSet, data: list) -> "NCPoly":
        terms: dict[Word, Fraction] = {}
        for t in data:
            names = t["word"]
            if names:
                w = tuple(gens.index(nm) for nm in names)
            else:
                w = idempotent(int(t.get("point", 1)))
            terms[w] = terms.get(w, 0) + as_fraction(t["coeff"])
        return cls(gens, terms)

    @classmethod
    def parse(cls, gens: GeneratorSet, text: str) -> "NCPoly":
        return parse_ncpoly(gens, text)


def word_key(w: Word) -> tuple:
    """Degree first, then lexicographic by generator index."""
    if is_idempotent(w):
        return (0, w[0] * -1)
    return (len(w),) + tuple(w)


def nc_mul(a: NCPoly, b: NCPoly) -> NCPoly:
    a._check(b)
    gens = a.gens
    out: dict[Word, Fraction] = {}
    for u, x in a.terms.items():
        for v, y in b.terms.items():
            w = gens.mul_words(u, v)
            if w is None:
                continue
            c = out.get(w, 0) + x * y
            if c:
                out[w] = c
            else:
                out.pop(w, None)
    return NCPoly._raw(gens, out)


def parse_ncpoly(gens: GeneratorSet, text: str) -> NCPoly:
    """Parse a sympy expression in non-commuting generator symbols.

    Products use ``*``, powers ``**``; ``1`` denotes the unit (one point only)
    and ``e<s>`` the idempotents when there are several points.
    """
    import sympy
    from sympy.parsing.sympy_parser import parse_expr, standard_transformations

    local = {nm: sympy.Symbol(nm, commutative=False) for nm in gens.names}
    idem = {}
    if gens.points > 1:
        for s in range(1, gens.points + 1):
            nm = f"e{s}"
            if nm not in local:
                local[nm] = sympy.Symbol(nm, commutative=False)
                idem[nm] = s
    try:
        expr = parse_expr(text, local_dict=local, transformations=standard_transformations, evaluate=True)
    except Exception as exc:  # sympy raises a zoo of exception types
        raise ValueError(f"cannot parse polynomial {text!r}: {exc}") from exc
    expr = sympy.expand(expr)
    terms: dict[Word, Fraction] = {}
    for term in sympy.Add.make_args(expr):
        if term == 0:
            continue
        comm, nc = term.args_cnc()
        coeff = sympy.Mul(*comm)
        if not coeff.is_Rational:
            raise ValueError(f"non-rational coefficient {coeff} in {text!r}")
        factors: list[str] = []
        for f in nc:
            base, exp = (f.base, f.exp) if isinstance(f, sympy.Pow) else (f, sympy.Integer(1))
            if not isinstance(base, sympy.Symbol) or not exp.is_Integer or exp < 1:
                raise ValueError(f"unsupported factor {f} in {text!r}")
            factors.extend([base.name] * int(exp))
        w: Word | None
        if not factors:
            if gens.points != 1:
                raise ValueError("constant terms need an explicit idempotent e<s>")
            w = idempotent(1)
        else:
            w = None
            for nm in factors:
                piece = idempotent(idem[nm]) if nm in idem else (gens.index(nm),)
                w = piece if w is None else gens.mul_words(w, piece)
                if w is None:
                    break
            if w is None:
                continue
        c = Fraction(int(coeff.p), int(coeff.q))
        terms[w] = terms.get(w, 0) + c
    return NCPoly(gens, terms)


# ---------------------------------------------------------------------------
# truncated two-sided ideals and quotients


class WordIndex:
    """Column numbering of all composable words of degree ``<= n``."""

    def __init__(self, gens: GeneratorSet, n: int):
        self.gens = gens
        self.order = n
        self.words: list[Word] = []
        self.start: list[int] = []
        for d in range(n + 1):
            self.start.append(len(self.words))
            self.words.extend(gens._words(d))
        self.start.append(len(self.words))
        self.col = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def degree_of(self, col: int) -> int:
        for d in range(self.order + 1):
            if col < self.start[d + 1]:
                return d
        raise IndexError(col)

    def vector(self, p: NCPoly) -> dict[int, Fraction]:
        col = self.col
        return {col[w]: c for w, c in p.terms.items() if w in col}

    def poly(self, v: Mapping[int, Fraction]) -> NCPoly:
        return NCPoly._raw(self.gens, {self.words[i]: c for i, c in v.items() if c})


def _ideal_echelon(gens: GeneratorSet, relations: list[NCPoly], n: int) -> tuple[WordIndex, EchelonBasis]:
    index = WordIndex(gens, n)
    ech = EchelonBasis()
    by_degree = [gens._words(d) for d in range(n + 1)]
    for rho in relations:
        if rho.gens != gens:
            raise ValueError("relation over a different generator set")
        rho = rho.truncate(n)
        low = rho.min_degree()
        if low is None:
            continue
        room = n - low
        for du in range(room + 1):
            for dv in range(room - du + 1):
                for u in by_degree[du]:
                    left = nc_mul(NCPoly._raw(gens, {u: Fraction(1)}), rho)
                    if not left:
                        continue
                    for v in by_degree[dv]:
                        prod = nc_mul(left, NCPoly._raw(gens, {v: Fraction(1)}))
                        if prod:
                            ech.add(index.vector(prod.truncate(n)))
    return index, ech


def ideal_degree_span(relations: list[NCPoly], n: int, gens: GeneratorSet | None = None) -> list[list[NCPoly]]:
    """Per-degree basis of the (leading forms of the) truncated two-sided ideal.

    For homogeneous relations these are exactly the degree slices of the ideal;
    for inhomogeneous ones they are the slices of the associated graded ideal.
    """
    if gens is None:
        if not relations:
            raise ValueError("generator set needed when there are no relations")
        gens = relations[0].gens
    index, ech = _ideal_echelon(gens, relations, n)
    out: list[list[NCPoly]] = [[] for _ in range(n + 1)]
    for piv in ech.pivots():
        d = index.degree_of(piv)
        row = ech.rows[piv]
        lead = {i: c for i, c in row.items() if index.start[d] <= i < index.start[d + 1]}
        out[d].append(index.poly(lead))
    return out


def relabel(p: NCPoly, gens: GeneratorSet) -> NCPoly:
    """Rewrite ``p`` over ``gens``, matching generators by name."""
    if p.gens == gens:
        return p
    try:
        moves = [gens.index(nm) for nm in p.gens.names]
    except (KeyError, ValueError) as exc:
        raise RelationError(f"generator missing from target set: {exc}") from exc
    out = {}
    for w, c in p.terms.items():
        out[w if is_idempotent(w) else tuple(moves[i] for i in w)] = c
    return NCPoly(gens, out)


def relations_to_json(gens: GeneratorSet, relations: list[NCPoly]) -> dict:
    return {"generators": gens.to_json(), "relations": [p.to_json() for p in relations],
            "text": [str(p) for p in relations]}


def relations_from_json(data: Mapping) -> tuple[GeneratorSet, list[NCPoly]]:
    """Generators plus relations given as strings or as term lists.

    An optional ``rename`` table maps the stored generator names to new ones.
    """
    try:
        g = data["generators"]
        gens = GeneratorSet.from_json(g) if isinstance(g, Mapping) else GeneratorSet(tuple(g))
        polys = [parse_ncpoly(gens, r) if isinstance(r, str) else NCPoly.from_json(gens, r)
                 for r in data["relations"]]
        rename = data.get("rename")
        if rename:
            target = GeneratorSet(tuple(rename.get(nm, nm) for nm in gens.names), gens.points,
                                  gens.sources, gens.targets)
            polys = [NCPoly(target, p.terms) for p in polys]
            gens = target
    except (KeyError, TypeError, ValueError) as exc:
        raise RelationError(f"malformed relation file: {exc}") from exc
    return gens, polys


def span_mismatch(a: list[NCPoly], b: list[NCPoly], n: int, gens: GeneratorSet | None = None) -> int | None:
    """Lowest ``d <= n`` at which the spans of the degree-``<= d`` truncations differ, else ``None``."""
    if gens is None:
        gens = (a or b)[0].gens if (a or b) else GeneratorSet(())
    a = [relabel(p, gens) for p in a]
    b = [relabel(p, gens) for p in b]
    index = WordIndex(gens, n)
    for d in range(n + 1):
        ea, eb, both = EchelonBasis(), EchelonBasis(), EchelonBasis()
        for p in a:
            v = index.vector(p.truncate(d))
            ea.add(v)
            both.add(v)
        for p in b:
            v = index.vector(p.truncate(d))
            eb.add(v)
            both.add(v)
        if not (len(ea.rows) == len(eb.rows) == len(both.rows)):
            return d
    return None


@dataclass
class TruncatedQuotientRing:
    """``T(V) / (relations)`` with all words of degree ``> order`` set to zero."""

    generators: GeneratorSet
    order: int
    relations: list[NCPoly]
    index: WordIndex = field(repr=False)
    ideal: EchelonBasis = field(repr=False)

    def __post_init__(self):
        pivots = set(self.ideal.rows)
        self.basis: list[list[Word]] = []
        for d in range(self.order + 1):
            lo, hi = self.index.start[d], self.index.start[d + 1]
            self.basis.append([self.index.words[i] for i in range(lo, hi) if i not in pivots])
        self.basis_words: list[Word] = [w for ws in self.basis for w in ws]
        self.basis_pos = {w: i for i, w in enumerate(self.basis_words)}
        self._table: dict[tuple[int, int], dict[int, Fraction]] = {}

    @property
    def points(self) -> int:
        return self.generators.points

    @property
    def filtration_dims(self) -> list[int]:
        return [len(ws) for ws in self.basis]

    @property
    def dim(self) -> int:
        return len(self.basis_words)

    def normal_form(self, p: NCPoly) -> NCPoly:
        return self.index.poly(self.ideal.reduce(self.index.vector(p.truncate(self.order))))

    def is_zero(self, p: NCPoly) -> bool:
        return not self.ideal.reduce(self.index.vector(p.truncate(self.order)))

    def coords(self, p: NCPoly) -> dict[int, Fraction]:
        nf = self.normal_form(p)
        return {self.basis_pos[w]: c for w, c in nf.terms.items()}

    def element(self, coords: Mapping[int, Fraction]) -> NCPoly:
        return NCPoly._raw(self.generators, {self.basis_words[i]: as_fraction(c) for i, c in coords.items() if c})

    def mul(self, a: NCPoly, b: NCPoly) -> NCPoly:
        return self.normal_form(nc_mul(a, b))

    def product(self, i: int, j: int) -> dict[int, Fraction]:
        """Coordinates of ``basis[i] * basis[j]``."""
        key = (i, j)
        hit = self._table.get(key)
        if hit is None:
            g = self.generators
            w = g.mul_words(self.basis_words[i], self.basis_words[j])
            if w is None or word_degree(w) > self.order:
                hit = {}
            else:
                hit = self.coords(NCPoly._raw(g, {w: Fraction(1)}))
            self._table[key] = hit
        return hit

    def mult_table(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        n = self.dim
        return {(i, j): v for i in range(n) for j in range(n) if (v := self.product(i, j))}

    def associativity_defects(self, limit: int | None = None) -> list[tuple[int, int, int]]:
        """Basis triples on which the multiplication table is not associative."""
        n = self.dim
        bad = []
        for count, (i, j, k) in enumerate(itertools.product(range(n), repeat=3)):
            if limit is not None and count >= limit:
                break
            left: dict[int, Fraction] = {}
            for a, x in self.product(i, j).items():
                for b, y in self.product(a, k).items():
                    left[b] = left.get(b, 0) + x * y
            right: dict[int, Fraction] = {}
            for a, x in self.product(j, k).items():
                for b, y in self.product(i, a).items():
                    right[b] = right.get(b, 0) + x * y
            if {b: c for b, c in left.items() if c} != {b: c for b, c in right.items() if c}:
                bad.append((i, j, k))
        return bad

    def degree_of(self, i: int) -> int:
        return word_degree(self.basis_words[i])

    def summary(self) -> dict:
        return {
            "generators": self.generators.to_json(),
            "order": self.order,
            "filtration_dims": self.filtration_dims,
            "total_dim": self.dim,
            "relations": [str(r) for r in self.relations],
            "basis": [[self.generators.word_str(w) for w in ws] for ws in self.basis],
        }


def quotient_ring(gens: GeneratorSet, relations: list[NCPoly], n: int) -> TruncatedQuotientRing:
    for rho in relations:
        low = rho.min_degree()
        if low is not None and low < 2:
            raise RelationError(f"relation {rho} has terms of degree < 2")
    index, ech = _ideal_echelon(gens, relations, n)
    for piv in ech.rows:
        if index.degree_of(piv) < 2:
            raise RelationError("relations collapse the degree-0 or degree-1 part")
    return TruncatedQuotientRing(gens, n, list(relations), index, ech)


def commutators(gens: GeneratorSet) -> list[NCPoly]:
    out = []
    for i, j in itertools.combinations(range(len(gens)), 2):
        out.append(NCPoly._raw(gens, {(i, j): Fraction(1), (j, i): Fraction(-1)}))
    return out


def abelianization_dims(ring: TruncatedQuotientRing) -> list[int]:
    if ring.points != 1:
        raise ValueError("abelianization is only supported for one point")
    q = quotient_ring(ring.generators, list(ring.relations) + commutators(ring.generators), ring.order)
    return q.filtration_dims


def free_dims(gens: GeneratorSet, n: int) -> list[int]:
    return gens.word_counts(n)


def iter_words(gens: GeneratorSet, n: int) -> Iterator[Word]:
    for d in range(n + 1):
        yield from gens._words(d)
