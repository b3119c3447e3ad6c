"""Relations of deformation rings from left-ideal presentations of structure sheaves.

A mixed polynomial is a finite sum ``sum_k r_k * m_k`` with ``r_k`` a word in
non-commuting parameters and ``m_k`` a monomial in commuting sheaf variables.
Sheaf variables are central. Each ideal generator is normalised to
``g = L + T`` with ``L`` a bare sheaf monomial; rewriting ``L -> -T`` inside the
left ideal appends the tail's parameter word on the right:
``r * (L q)  ==  -sum (r w_T) * (q m_T)``.
Obstructions are the commutators ``g g' - g' g = T T' - T' T``; after
reduction, the parameter coefficient of every surviving sheaf monomial must
vanish in the deformation ring.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .defring import MinimalAInfData
from .linalg import EchelonBasis
from .ncfree import GeneratorSet, NCPoly, quotient_ring

Monomial = tuple  # exponents of the sheaf variables
MixedPoly = dict  # dict[(Monomial, parameter word), Fraction]


class AnsatzError(ValueError):
    pass


def mixed_mul(p: MixedPoly, q: MixedPoly, cap: int | None = None) -> MixedPoly:
    out: MixedPoly = {}
    for (m1, w1), c1 in p.items():
        for (m2, w2), c2 in q.items():
            w = w1 + w2
            if cap is not None and len(w) > cap:
                continue
            key = (tuple(a + b for a, b in zip(m1, m2)), w)
            v = out.get(key, 0) + c1 * c2
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def mixed_add(p: MixedPoly, q: MixedPoly, c=1) -> MixedPoly:
    out = dict(p)
    for k, x in q.items():
        v = out.get(k, 0) + c * x
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


@dataclass
class MonomialOrder:
    """Lexicographic order on exponent vectors, by the given variable priority."""

    priority: tuple[int, ...]

    def key(self, m: Monomial) -> tuple:
        return tuple(m[i] for i in self.priority)

    def greater(self, a: Monomial, b: Monomial) -> bool:
        return self.key(a) > self.key(b)


@dataclass
class Rule:
    lead: Monomial
    tail: MixedPoly  # g = lead + tail; lead -> -tail


@dataclass
class AnsatzIdeal:
    params: GeneratorSet
    sheaf_vars: tuple[str, ...]
    generators: list[MixedPoly]
    leads: list[Monomial]
    order: MonomialOrder

    def __post_init__(self):
        if self.params.points != 1:
            raise AnsatzError("parameters must form a one-point generator set")
        if set(self.sheaf_vars) & set(self.params.names):
            raise AnsatzError("sheaf variables and parameters must have distinct names")
        if len(set(self.sheaf_vars)) != len(self.sheaf_vars):
            raise AnsatzError("sheaf variable names must be distinct")
        self.rules = [self._normalise(g, L) for g, L in zip(self.generators, self.leads)]

    def _normalise(self, g: MixedPoly, lead: Monomial) -> Rule:
        lead = tuple(lead)
        hits = [(k, c) for k, c in g.items() if k[0] == lead]
        if len(hits) != 1 or hits[0][0][1] != ():
            raise AnsatzError(f"leading monomial {self.monomial_str(lead)} must occur once, with a scalar coefficient")
        c = hits[0][1]
        tail = {k: v / c for k, v in g.items() if k[0] != lead}
        for (m, _), _ in tail.items():
            if not self.order.greater(lead, m):
                raise AnsatzError(f"tail monomial {self.monomial_str(m)} is not below the lead {self.monomial_str(lead)}")
        return Rule(lead, tail)

    def monomial_str(self, m: Monomial) -> str:
        parts = []
        for nm, e in zip(self.sheaf_vars, m):
            if e == 1:
                parts.append(nm)
            elif e > 1:
                parts.append(f"{nm}**{e}")
        return "*".join(parts) or "1"

    def mixed_str(self, p: MixedPoly) -> str:
        if not p:
            return "0"
        out = []
        for (m, w), c in sorted(p.items(), key=lambda kv: (self.order.key(kv[0][0]), kv[0][1]), reverse=True):
            factors = [self.params.names[i] for i in w]
            ms = self.monomial_str(m)
            if ms != "1":
                factors.append(ms)
            body = "*".join(factors) or "1"
            coeff = "" if abs(c) == 1 and factors else f"{abs(c)}*" if factors else f"{abs(c)}"
            out.append(("-" if c < 0 else "+", coeff + (body if factors else "")))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sg, b in out[1:]:
            s += f" {sg} {b}"
        return s

    def to_json(self) -> dict:
        return {
            "params": list(self.params.names),
            "sheaf_vars": list(self.sheaf_vars),
            "variable_order": [self.sheaf_vars[i] for i in self.order.priority],
            "generators": [self.mixed_str(g) for g in self.generators],
            "leads": [self.monomial_str(L) for L in self.leads],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "AnsatzIdeal":
        try:
            return build_ansatz(data["params"], data["sheaf_vars"], data["generators"],
                                data["leads"], data.get("variable_order"))
        except KeyError as exc:
            raise AnsatzError(f"missing field {exc}") from exc


def parse_mixed(text: str, params: Sequence[str], sheaf_vars: Sequence[str]) -> MixedPoly:
    """Parse e.g. ``"zt - w**2 + c0*z**2"`` with non-commuting parameters."""
    import sympy
    from sympy.parsing.sympy_parser import parse_expr, standard_transformations

    local = {nm: sympy.Symbol(nm, commutative=False) for nm in params}
    local.update({nm: sympy.Symbol(nm) for nm in sheaf_vars})
    try:
        expr = sympy.expand(parse_expr(text, local_dict=local, transformations=standard_transformations))
    except Exception as exc:  # sympy raises many exception types
        raise AnsatzError(f"cannot parse {text!r}: {exc}") from exc
    pidx = {nm: i for i, nm in enumerate(params)}
    sidx = {nm: i for i, nm in enumerate(sheaf_vars)}
    out: MixedPoly = {}
    for term in sympy.Add.make_args(expr):
        if term == 0:
            continue
        comm, nc = term.args_cnc()
        coeff = Fraction(1)
        mono = [0] * len(sheaf_vars)
        for f in comm:
            base, exp = (f.base, f.exp) if isinstance(f, sympy.Pow) else (f, sympy.Integer(1))
            if base.is_Rational and exp.is_Integer:
                val = base ** exp
                coeff *= Fraction(int(val.p), int(val.q))
            elif isinstance(base, sympy.Symbol) and base.name in sidx and exp.is_Integer and exp > 0:
                mono[sidx[base.name]] += int(exp)
            else:
                raise AnsatzError(f"unsupported factor {f} in {text!r}")
        word: list[int] = []
        for f in nc:
            base, exp = (f.base, f.exp) if isinstance(f, sympy.Pow) else (f, sympy.Integer(1))
            if not isinstance(base, sympy.Symbol) or base.name not in pidx or not exp.is_Integer or exp < 1:
                raise AnsatzError(f"unsupported factor {f} in {text!r}")
            word.extend([pidx[base.name]] * int(exp))
        key = (tuple(mono), tuple(word))
        v = out.get(key, 0) + coeff
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return out


def parse_monomial(text: str, sheaf_vars: Sequence[str]) -> Monomial:
    p = parse_mixed(text, [], sheaf_vars)
    if len(p) != 1:
        raise AnsatzError(f"{text!r} is not a monomial")
    (m, w), c = next(iter(p.items()))
    if w or c != 1:
        raise AnsatzError(f"{text!r} is not a bare monomial")
    return m


def build_ansatz(params: Sequence[str], sheaf_vars: Sequence[str], generators: Sequence[str],
                 leads: Sequence[str], variable_order: Sequence[str] | None = None) -> AnsatzIdeal:
    sheaf_vars = tuple(sheaf_vars)
    order_names = list(variable_order) if variable_order else list(sheaf_vars)
    if sorted(order_names) != sorted(sheaf_vars):
        raise AnsatzError("variable order must list every sheaf variable once")
    order = MonomialOrder(tuple(sheaf_vars.index(v) for v in order_names))
    gens = GeneratorSet(tuple(params))
    polys = [parse_mixed(g, params, sheaf_vars) for g in generators]
    if len(leads) != len(polys):
        raise AnsatzError("one leading monomial per generator")
    return AnsatzIdeal(gens, sheaf_vars, polys, [parse_monomial(L, sheaf_vars) for L in leads], order)


def normal_form(p: MixedPoly, ansatz: AnsatzIdeal, cap: int) -> MixedPoly:
    """Rewrite until no leading monomial divides a sheaf monomial; drop words longer than ``cap``."""
    order = ansatz.order
    rules = ansatz.rules
    p = {k: c for k, c in p.items() if c and len(k[1]) <= cap}
    done: MixedPoly = {}
    while p:
        (m, w) = max(p, key=lambda k: (order.key(k[0]), k[1]))
        c = p.pop((m, w))
        rule = next((r for r in rules if all(a <= b for a, b in zip(r.lead, m))), None)
        if rule is None:
            done[(m, w)] = done.get((m, w), 0) + c
            if not done[(m, w)]:
                del done[(m, w)]
            continue
        q = tuple(b - a for a, b in zip(rule.lead, m))
        for (mt, wt), ct in rule.tail.items():
            nw = w + wt
            if len(nw) > cap:
                continue
            key = (tuple(a + b for a, b in zip(q, mt)), nw)
            v = p.get(key, 0) - c * ct
            if v:
                p[key] = v
            else:
                p.pop(key, None)
    return done


def coefficients(p: MixedPoly, params: GeneratorSet) -> dict[Monomial, NCPoly]:
    """Group by sheaf monomial; each group is a polynomial in the parameters."""
    groups: dict[Monomial, dict] = {}
    for (m, w), c in p.items():
        g = groups.setdefault(m, {})
        g[w] = g.get(w, 0) + c
    out = {}
    for m, terms in groups.items():
        poly = NCPoly(params, {w if w else (-1,): c for w, c in terms.items()})
        if poly:
            out[m] = poly
    return out


def obstructions(ansatz: AnsatzIdeal, cap: int) -> list[tuple[tuple[int, int], Monomial, NCPoly]]:
    """Reduced commutators of all generator pairs, split by surviving sheaf monomial."""
    out = []
    rules = ansatz.rules
    for i, j in itertools.combinations(range(len(rules)), 2):
        t, u = rules[i].tail, rules[j].tail
        comm = mixed_add(mixed_mul(t, u, cap), mixed_mul(u, t, cap), -1)
        nf = normal_form(comm, ansatz, cap)
        for m, poly in sorted(coefficients(nf, ansatz.params).items(), key=lambda kv: ansatz.order.key(kv[0]), reverse=True):
            out.append(((i, j), m, poly))
    return out


@dataclass
class ObstructionResult:
    relations: list[NCPoly]
    closed: bool
    rounds: int
    cap: int
    sources: list[str] = field(default_factory=list)

    @property
    def max_degree(self) -> int:
        return max((r.max_degree() for r in self.relations), default=0)

    def to_json(self) -> dict:
        return {
            "relations": [str(r) for r in self.relations],
            "count": len(self.relations),
            "max_degree": self.max_degree,
            "closed": self.closed,
            "rounds": self.rounds,
            "cap": self.cap,
        }


def _span_vector(p: NCPoly) -> dict:
    return {w: c for w, c in p.terms.items()}


class _SpanTracker:
    """Linear span of NCPolys, keyed by word."""

    def __init__(self):
        self.col: dict = {}
        self.ech = EchelonBasis()

    def _vec(self, p: NCPoly) -> dict[int, Fraction]:
        out = {}
        for w, c in p.terms.items():
            k = self.col.setdefault((len(w),) + tuple(w), len(self.col))
            out[k] = c
        return out

    def add(self, p: NCPoly) -> bool:
        return self.ech.add(self._vec(p))

    def contains(self, p: NCPoly) -> bool:
        return self.ech.contains(self._vec(p))


def obstruction_relations(ansatz: AnsatzIdeal, cap: int = 4, max_rounds: int = 4) -> ObstructionResult:
    """Independent relations from the commutator obstructions, closed under re-reduction.

    Round 1 collects the coefficients; each later round recomputes them and keeps
    only those not already in the truncated two-sided ideal of the relations so
    far. ``closed`` is True once a round contributes nothing new.
    """
    relations: list[NCPoly] = []
    sources: list[str] = []
    span = _SpanTracker()
    closed = False
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        ring = quotient_ring(ansatz.params, relations, cap) if rounds > 1 and relations else None
        new = 0
        for (i, j), m, poly in obstructions(ansatz, cap):
            if span.contains(poly) or (ring is not None and ring.is_zero(poly)):
                continue
            span.add(poly)
            relations.append(poly)
            sources.append(f"[g{i},g{j}] at {ansatz.monomial_str(m)}")
            new += 1
        if new == 0:
            closed = True
            break
    return ObstructionResult(relations, closed, rounds, cap, sources)


def quadratic_part_to_m2(relations: Sequence[NCPoly], ext2_prefix: str = "w") -> MinimalAInfData:
    """The degree-2 parts as an ``m_2`` table: one Ext^2 class per independent quadratic part."""
    if not relations:
        return MinimalAInfData([], [], {})
    gens = relations[0].gens
    span = _SpanTracker()
    basis: list[NCPoly] = []
    for r in relations:
        q = r.part(2)
        if q and span.add(q):
            basis.append(q)
    products: dict[tuple[int, ...], dict[int, Fraction]] = {}
    for j, q in enumerate(basis):
        for w, c in q.terms.items():
            products.setdefault(tuple(w), {})[j] = c
    return MinimalAInfData(list(gens.names), [f"{ext2_prefix}{j}" for j in range(len(basis))], {2: products})


def image_dimension(data: MinimalAInfData) -> int:
    """Dimension of the image of ``m_2^*: (Ext^2)^* -> (Ext^1)^* (x) (Ext^1)^*``."""
    return data.m2_rank()


# ---------------------------------------------------------------------------
# presets


def lines_pn(n: int) -> AnsatzIdeal:
    """Line ``x_1 = ... = x_{n-1} = 0`` in ``P^n``: generators ``x_i + a_i x_n + b_i x_{n+1}``."""
    if n < 2:
        raise AnsatzError("lines need n >= 2")
    sheaf = [f"x{i}" for i in range(1, n + 2)]
    params = [f"a{i}" for i in range(1, n)] + [f"b{i}" for i in range(1, n)]
    gens = [f"x{i} + a{i}*x{n} + b{i}*x{n + 1}" for i in range(1, n)]
    leads = [f"x{i}" for i in range(1, n)]
    return build_ansatz(params, sheaf, gens, leads)


CONIC_GENERATORS = (
    "x + a0*z + a1*w + a2*t",
    "y + b0*z + b1*w + b2*t",
    "z*t - w**2 + c0*z**2 + c1*z*w + c2*z*t + c3*w*t + c4*t**2",
)


def conic_p4() -> AnsatzIdeal:
    """Conic ``x = y = zt - w^2 = 0`` in ``P^4``; ``w^2`` is the rewritten monomial."""
    params = [f"a{i}" for i in range(3)] + [f"b{i}" for i in range(3)] + [f"c{i}" for i in range(5)]
    return build_ansatz(params, ["x", "y", "z", "w", "t"], list(CONIC_GENERATORS),
                        ["x", "y", "w**2"], ["x", "y", "w", "z", "t"])


PRESETS = {"lines_pn": lines_pn, "conic_p4": conic_p4}


def preset(name: str, n: int | None = None) -> AnsatzIdeal:
    if name == "lines_pn":
        if n is None:
            raise AnsatzError("lines_pn needs n")
        return lines_pn(n)
    if name == "conic_p4":
        return conic_p4()
    raise AnsatzError(f"unknown preset {name!r}")
