"""Brute-force reference computations, written without the package's algorithms."""

from __future__ import annotations

import itertools
from fractions import Fraction

import sympy


def count_words_avoiding(letters: int, forbidden: list[tuple[int, ...]], n: int,
                         labels: list[tuple[int, int]] | None = None, points: int = 1) -> list[int]:
    """Per-degree count of composable words with no forbidden factor.

    With ``labels`` (source, target) per letter, degree 0 counts ``points``
    idempotents and a word ``g h`` needs ``target(g) == source(h)``.
    """
    out = [points if labels else 1]
    for d in range(1, n + 1):
        count = 0
        for w in itertools.product(range(letters), repeat=d):
            if labels and any(labels[a][1] != labels[b][0] for a, b in zip(w, w[1:])):
                continue
            if any(w[i:i + len(f)] == f for f in forbidden for i in range(d - len(f) + 1)):
                continue
            count += 1
        out.append(count)
    return out


def _sign(parity: int) -> int:
    return -1 if parity & 1 else 1


def _lookup(ops: dict, k: int, args: tuple[int, ...]) -> dict:
    return ops.get(k, {}).get(args, {})


def ainf_relation_failures(ops: dict, degrees: list[int], n: int, limit: int = 5) -> list[tuple]:
    """Basis tuples of length ``n`` where the A-infinity relation fails.

    ``sum (-1)^(rs+t) m_{r+1+t}(1^r (x) m_s (x) 1^t)``, with ``m_s`` of degree
    ``2 - s`` picking up ``(-1)^(|m_s| (|x_1| + ... + |x_r|))``.
    """
    dim = len(degrees)
    occupied = set(degrees)
    failures = []
    for x in itertools.product(range(dim), repeat=n):
        total = sum(degrees[i] for i in x)
        if total + 3 - n not in occupied:
            continue
        acc: dict[int, Fraction] = {}
        for s in range(1, n + 1):
            for r in range(0, n - s + 1):
                t = n - r - s
                inner = _lookup(ops, s, x[r:r + s])
                if not inner:
                    continue
                prefix = sum(degrees[i] for i in x[:r])
                sign = _sign(r * s + t + (2 - s) * prefix)
                for y, c in inner.items():
                    outer = _lookup(ops, r + 1 + t, x[:r] + (y,) + x[r + s:])
                    for z, e in outer.items():
                        acc[z] = acc.get(z, 0) + sign * c * e
        if any(acc.values()):
            failures.append(x)
            if len(failures) >= limit:
                break
    return failures


def morphism_relation_failures(h_ops: dict, h_degrees: list[int], a_d: dict, a_mul: dict,
                               f_maps: dict, n: int, limit: int = 5) -> list[tuple]:
    """Tuples where ``f: H -> A`` (``A`` a DGA) breaks the morphism relation in arity ``n``.

    Left: ``sum (-1)^(rs+t) f_{r+1+t}(1^r (x) m_s (x) 1^t)``. Right:
    ``d f_n + sum_i (-1)^(i(n-i+1)) m_2(f_i (x) f_{n-i})`` where moving
    ``f_{n-i}`` (degree ``1 - (n-i)``) past ``x_1 .. x_i`` gives a Koszul sign.
    """
    dim = len(h_degrees)
    failures = []
    for x in itertools.product(range(dim), repeat=n):
        acc: dict[int, Fraction] = {}
        for s in range(1, n + 1):
            for r in range(0, n - s + 1):
                t = n - r - s
                inner = _lookup(h_ops, s, x[r:r + s])
                if not inner:
                    continue
                prefix = sum(h_degrees[i] for i in x[:r])
                sign = _sign(r * s + t + (2 - s) * prefix)
                for y, c in inner.items():
                    for z, e in f_maps.get(r + 1 + t, {}).get(x[:r] + (y,) + x[r + s:], {}).items():
                        acc[z] = acc.get(z, 0) + sign * c * e
        for y, c in f_maps.get(n, {}).get(x, {}).items():
            for z, e in a_d.get(y, {}).items():
                acc[z] = acc.get(z, 0) - c * e
        for i in range(1, n):
            left = f_maps.get(i, {}).get(x[:i], {})
            right = f_maps.get(n - i, {}).get(x[i:], {})
            if not left or not right:
                continue
            prefix = sum(h_degrees[k] for k in x[:i])
            sign = _sign(i * (n - i + 1) + (1 - (n - i)) * prefix)
            for u, cu in left.items():
                for v, cv in right.items():
                    for z, e in a_mul.get((u, v), {}).items():
                        acc[z] = acc.get(z, 0) - sign * cu * cv * e
        if any(acc.values()):
            failures.append(x)
            if len(failures) >= limit:
                break
    return failures


def nc_symbols(names):
    return sympy.symbols(" ".join(names) + ",", commutative=False)


def ideal_contains(relations: list, target, symbols, n: int) -> bool:
    """Is ``target`` in the two-sided ideal of ``relations``, truncated at word length ``n``?

    Relations and target are non-commutative sympy expressions; membership is a
    rank test over all products ``u * rho * v`` with ``|u| + |v| + |rho| <= n``.
    """
    words = [()]
    for d in range(1, n + 1):
        words += list(itertools.product(range(len(symbols)), repeat=d))

    def monomial(w):
        out = sympy.Integer(1)
        for g in w:
            out = out * symbols[g]
        return out

    def vector(expr) -> dict:
        expr = sympy.expand(expr)
        vec: dict = {}
        for term in sympy.Add.make_args(expr):
            if term == 0:
                continue
            c, nc = term.args_cnc()
            coeff = sympy.Mul(*c)
            key = []
            for f in nc:
                base, exp = f.as_base_exp()
                key += [symbols.index(base)] * int(exp)
            if len(key) <= n:
                vec[tuple(key)] = vec.get(tuple(key), 0) + coeff
        return {k: v for k, v in vec.items() if v != 0}

    rows = []
    for rho in relations:
        for u in words:
            for v in words:
                if len(u) + len(v) + 1 > n:
                    continue
                vec = vector(monomial(u) * rho * monomial(v))
                if vec:
                    rows.append(vec)
    cols = sorted({k for r in rows for k in r} | set(vector(target)), key=lambda w: (len(w), w))
    if not cols:
        return True
    base = sympy.Matrix([[r.get(w, 0) for w in cols] for r in rows]) if rows else sympy.zeros(0, len(cols))
    tv = vector(target)
    aug = base.col_join(sympy.Matrix([[tv.get(w, 0) for w in cols]]))
    return aug.rank() == (base.rank() if rows else 0)


def mc_residual_words(products: dict, ext2: int, letters: int, n: int) -> list[dict[tuple[int, ...], Fraction]]:
    """``sum_k m_k(x^k)`` for ``x = sum_i v_i* (x) v_i`` before reduction, enumerated over all words."""
    out: list[dict] = [dict() for _ in range(ext2)]
    for k in range(2, n + 1):
        for w in itertools.product(range(letters), repeat=k):
            for j, c in products.get(k, {}).get(w, {}).items():
                out[j][w] = out[j].get(w, 0) + c
    return out


def commutator_pattern_m2() -> list:
    """``m_2(a_i, b_j) = -m_2(b_j, a_i) = d_{i+j}`` and likewise for ``(a, c)``, ``(b, c)``, dualised."""
    from ncdef.ncfree import GeneratorSet, NCPoly

    names = [f"a{i}" for i in range(3)] + [f"b{i}" for i in range(3)] + [f"c{i}" for i in range(5)]
    gens = GeneratorSet(tuple(names))
    ix = {nm: k for k, nm in enumerate(names)}
    out = []
    for left, right, top in (("a", "b", 4), ("a", "c", 6), ("b", "c", 6)):
        for k in range(top + 1):
            terms = {}
            for i in range(3 if left != "c" else 5):
                j = k - i
                if 0 <= j < (5 if right == "c" else 3):
                    terms[(ix[f"{left}{i}"], ix[f"{right}{j}"])] = 1
                    terms[(ix[f"{right}{j}"], ix[f"{left}{i}"])] = -1
            out.append(NCPoly(gens, terms))
    return out
