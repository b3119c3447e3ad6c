"""``ncdef`` command line.

Exit codes: 0 success, 1 verification mismatch, 2 parse error, 3 internal
consistency failure, 4 cap exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .defring import (
    DataError,
    MCViolation,
    MinimalAInfData,
    ModelComplex,
    end_dga,
    embed_via,
    ext1_positions,
    gauge_mc_element,
    graded_invariants,
    deformation_ring,
    largest_quotient_defects,
    mc_residual_minimal,
    minimal_data_from_relations,
    minimal_data_from_transfer,
    push_mc,
    tautological_element,
    twisted_homology,
)
from .dga import DGAError, DGAlgebra, cohomology, splitting_residuals, validate_dga
from .graded import tensor_to_json
from .linalg import format_fraction
from .ncfree import (
    NCPoly,
    RelationError,
    parse_ncpoly,
    quotient_ring,
    relations_from_json,
    relations_to_json,
    span_mismatch,
)
from .subvariety import PRESETS, AnsatzError, AnsatzIdeal, obstruction_relations, preset
from .transfer import (
    InfeasibleConstraints,
    TransferConsistencyError,
    check_ainf_relations,
    check_morphism_relations,
    kadeishvili,
)

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_INTERNAL, EXIT_CAP = 0, 1, 2, 3, 4
DEFAULT_ORDER = 6
DEFAULT_CAP = 4


class CLIError(Exception):
    def __init__(self, code: int, message: str, report: dict | None = None):
        super().__init__(message)
        self.code = code
        self.report = report


# ---------------------------------------------------------------------------
# input


def read_json(path: str | None) -> Any:
    if path is None:
        raise CLIError(EXIT_PARSE, "an input file is required")
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise CLIError(EXIT_PARSE, f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(EXIT_PARSE, f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _parsed(path: str | None, build: Callable[[Any], Any]) -> Any:
    data = read_json(path)
    try:
        return build(data)
    except (DGAError, DataError, RelationError, AnsatzError, KeyError, TypeError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, f"{path}: {exc}") from exc


def load_dga(path: str | None) -> DGAlgebra:
    return _parsed(path, DGAlgebra.from_json)


def _minimal_data(data: Any) -> MinimalAInfData:
    if "relations" in data:
        _, rels = relations_from_json(data)
        return minimal_data_from_relations(rels)
    return MinimalAInfData.from_json(data)


def load_minimal_data(path: str | None) -> MinimalAInfData:
    return _parsed(path, _minimal_data)


def load_expected(path: str) -> list[NCPoly]:
    return _parsed(path, lambda d: relations_from_json(d)[1])


def threads() -> int:
    raw = os.environ.get("NCDEF_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise CLIError(EXIT_PARSE, f"NCDEF_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise CLIError(EXIT_PARSE, f"NCDEF_THREADS must be a positive integer, got {raw!r}")
    return n


def compare_expected(relations: list[NCPoly], path: str, n: int, gens) -> dict:
    """Per-degree span comparison against a golden relation file."""
    expected = load_expected(path)
    out = {"file": path}
    try:
        d = span_mismatch(relations, expected, n, gens)
    except RelationError as exc:
        return out | {"span_equal": False, "first_differing_degree": None, "error": str(exc)}
    if d is not None:
        print(f"relation spans differ first in degree {d}", file=sys.stderr)
    return out | {"span_equal": d is None, "first_differing_degree": d}


# ---------------------------------------------------------------------------
# output


def jsonable(x: Any) -> Any:
    """Make ``x`` JSON-stable: string keys, rationals as ``"p/q"``."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, NCPoly):
        return str(x)
    return x


def render_text(report: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(report, dict):
        lines = []
        for k, v in report.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(u, (dict, list)) for u in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            elif isinstance(v, list) and v and all(isinstance(u, str) for u in v):
                lines.append(f"{pad}{k}:")
                lines.extend(f"{pad}  {u}" for u in v)
            else:
                lines.append(f"{pad}{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
        return "\n".join(lines)
    if isinstance(report, list):
        return "\n".join(f"{pad}- {json.dumps(v)}" if not isinstance(v, str) else f"{pad}- {v}" for v in report)
    return f"{pad}{report}"


def emit(report: dict, fmt: str, output: str | None) -> None:
    text = json.dumps(report, indent=1) if fmt == "json" else render_text(report)
    text += "\n"
    if output is None:
        sys.stdout.write(text)
        return
    target = Path(output)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


# ---------------------------------------------------------------------------
# commands


def cmd_check_dga(args) -> tuple[int, dict]:
    a = load_dga(args.input)
    violations = validate_dga(a)
    report = {
        "dim": a.dim,
        "valid": not violations,
        "violations": [{"identity": v.identity, "witness": list(v.witness), "residual": v.residual} for v in violations],
    }
    return (EXIT_OK if not violations else EXIT_MISMATCH), report


def _checked_cohomology(a: DGAlgebra):
    violations = validate_dga(a)
    if violations:
        raise CLIError(EXIT_MISMATCH, f"input is not a DG algebra: {violations[0]}",
                       {"valid": False, "violations": [str(v) for v in violations]})
    return cohomology(a, validate=False)


def cmd_cohomology(args) -> tuple[int, dict]:
    a = load_dga(args.input)
    s = _checked_cohomology(a)
    bad = splitting_residuals(a, s)
    H = s.H
    lo, hi = a.space.degree_range()
    report = {
        "dims": {q: len(H.in_degree(q)) for q in range(lo, hi + 1)},
        "labels": list(H.labels),
        "representatives": {H.labels[i]: s.f1[i] for i in range(H.dim)},
        "formal_splitting": s.is_formal(),
        "splitting_residuals": bad,
    }
    return (EXIT_OK if not bad else EXIT_INTERNAL), report


def cmd_transfer(args) -> tuple[int, dict]:
    a = load_dga(args.input)
    s = _checked_cohomology(a)
    n = args.order
    try:
        res = kadeishvili(a, s, n)
    except TransferConsistencyError as exc:
        raise CLIError(EXIT_INTERNAL, str(exc)) from exc
    tab = res.f.tabulate()
    ainf = check_ainf_relations(res.minimal, n)
    morph = check_morphism_relations(res.f, n)
    report = {
        "order": n,
        "cohomology": {"degrees": res.minimal.space.degrees, "labels": res.minimal.space.labels},
        "m": {k: tensor_to_json(res.minimal.ops.get(k, {})) for k in range(2, n + 1)},
        "f": {k: tensor_to_json(tab.maps.get(k, {})) for k in range(1, n + 1)},
        "residuals": {
            "ainf": {k: tensor_to_json(t) for k, t in ainf.items()},
            "morphism": {k: tensor_to_json(t) for k, t in morph.items()},
        },
    }
    return (EXIT_OK if not ainf and not morph else EXIT_MISMATCH), report


def cmd_defring(args) -> tuple[int, dict]:
    data = load_minimal_data(args.input)
    n = args.order
    try:
        ring = deformation_ring(data, n, args.points)
    except (DataError, RelationError) as exc:
        raise CLIError(EXIT_PARSE, str(exc)) from exc
    report = ring.summary()
    report["relations_json"] = relations_to_json(ring.ring.generators, ring.relations)["relations"]
    report["invariants"] = graded_invariants(ring, data)
    code = EXIT_OK
    if args.expected:
        report["expected"] = compare_expected(ring.relations, args.expected, n, ring.ring.generators)
        if not report["expected"]["span_equal"]:
            code = EXIT_MISMATCH
    return code, report


def cmd_mc_verify(args) -> tuple[int, dict]:
    data = load_minimal_data(args.input)
    n = args.order
    pts = args.points
    ring = deformation_ring(data, n, pts)
    x = tautological_element(data, ring)
    residual = mc_residual_minimal(data, ring, x, n)
    defects = largest_quotient_defects(data, n, pts)
    report = {
        "order": n,
        "points": ring.points,
        "relations": [str(r) for r in ring.relations],
        "residual": {data.ext2[j]: str(p) for j, p in residual.items()},
        "mc_holds": not residual,
        "removable_relations": [str(ring.relations[j]) for j in defects],
        "largest_quotient": not defects,
    }
    return (EXIT_OK if not residual and not defects else EXIT_MISMATCH), report


def _two_lines_y(points: int, order: int):
    from .fixtures import two_lines_model

    model, a, incl = two_lines_model(points)
    res = kadeishvili(a, cohomology(a), order)
    data = minimal_data_from_transfer(res)
    ring = deformation_ring(data, order, points)
    x = tautological_element(data, ring)
    y = embed_via(model, incl, push_mc(res.f, x, positions=ext1_positions(res)))
    return model, ring, y


def _gauge_y(model_file: dict, order: int, points: int | None, seed: int):
    c = ModelComplex.from_json(model_file["complex"])
    data = _minimal_data(model_file["ring"])
    model = end_dga(c)
    ring = deformation_ring(data, order, points)
    gens = ring.ring.generators
    g: dict[int, NCPoly] = {}
    if "gauge" in model_file:
        for a, b, poly in model_file["gauge"]:
            k = model.element(int(a), int(b))
            p = parse_ncpoly(gens, poly) if isinstance(poly, str) else NCPoly.from_json(gens, poly)
            g[k] = g[k] + p if k in g else p
    else:
        rng = random.Random(seed)
        deg0 = [k for k, q in enumerate(model.dga.space.degrees) if q == 0]
        for k in rng.sample(deg0, min(len(deg0), 4)):
            words = [w for d in range(1, min(order, 2) + 1) for w in gens.words(d)]
            if not words:
                break
            g[k] = NCPoly(gens, {rng.choice(words): rng.choice([-2, -1, 1, 2])})
    return model, ring, gauge_mc_element(model, ring.ring, g)


def cmd_twisted(args) -> tuple[int, dict]:
    n = args.order
    if args.preset == "two_lines":
        model, ring, y = _two_lines_y(args.points or 2, n)
    elif args.preset:
        raise CLIError(EXIT_PARSE, f"unknown twisted preset {args.preset!r}; choose two_lines")
    else:
        model_file = read_json(args.input)
        try:
            model, ring, y = _gauge_y(model_file, n, args.points, args.seed)
        except (DataError, RelationError, KeyError, TypeError, ValueError) as exc:
            raise CLIError(EXIT_PARSE, f"{args.input}: {exc}") from exc
    try:
        th = twisted_homology(model, y)
    except MCViolation as exc:
        raise CLIError(EXIT_MISMATCH, str(exc)) from exc
    report = th.to_json()
    report["ring_filtration_dims"] = ring.filtration_dims
    ok = th.flat and th.square_zero
    return (EXIT_OK if ok else EXIT_MISMATCH), report


def cmd_subvariety(args) -> tuple[int, dict]:
    if args.preset:
        if args.preset not in PRESETS:
            raise CLIError(EXIT_PARSE, f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
        try:
            ansatz = preset(args.preset, args.n)
        except (AnsatzError, ValueError) as exc:
            raise CLIError(EXIT_PARSE, str(exc)) from exc
    else:
        ansatz = _parsed(args.input, AnsatzIdeal.from_json)
    cap = args.order if args.order is not None else DEFAULT_CAP
    res = obstruction_relations(ansatz, cap=cap)
    report = res.to_json()
    report["generators"] = list(ansatz.params.names)
    code = EXIT_OK
    if args.expected:
        report["expected"] = compare_expected(res.relations, args.expected, cap, ansatz.params)
        if not report["expected"]["span_equal"]:
            code = EXIT_MISMATCH
    if not res.closed:
        raise CLIError(EXIT_CAP, f"closure not reached within cap {cap}", report)
    return code, report


def cmd_dims(args) -> tuple[int, dict]:
    gens, rels = _parsed(args.input, relations_from_json)
    n = args.order
    try:
        ring = quotient_ring(gens, rels, n)
    except (RelationError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, str(exc)) from exc
    report = {
        "order": n,
        "generators": list(gens.names),
        "relations": [str(r) for r in rels],
        "filtration_dims": ring.filtration_dims,
        "total_dim": ring.dim,
        "word_counts": [len(gens.words(d)) for d in range(n + 1)],
    }
    return EXIT_OK, report


COMMANDS = {
    "check-dga": (cmd_check_dga, "validate a DG algebra"),
    "cohomology": (cmd_cohomology, "cohomology and a splitting"),
    "transfer": (cmd_transfer, "minimal A-infinity structure on cohomology"),
    "defring": (cmd_defring, "truncated deformation ring from A-infinity data"),
    "mc-verify": (cmd_mc_verify, "Maurer-Cartan check for the tautological element"),
    "twisted": (cmd_twisted, "homology of a twisted complex"),
    "subvariety": (cmd_subvariety, "relations from an ansatz ideal"),
    "dims": (cmd_dims, "graded dimensions of a truncated quotient ring"),
}


def positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncdef", description="Noncommutative deformation computations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="input JSON file ('-' for stdin)")
    common.add_argument("-N", "--order", type=positive, default=None,
                        help=f"truncation order (default {DEFAULT_ORDER}; subvariety cap default {DEFAULT_CAP})")
    common.add_argument("-r", "--points", type=positive, default=None, help="number of points")
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--expected", help="golden relation file for span comparison")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", "-o", help="write the report here (atomically)")
    common.add_argument("--preset", help="built-in input")
    common.add_argument("--n", type=positive, help="preset size parameter")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    if args.order is None and args.command != "subvariety":
        args.order = DEFAULT_ORDER
    func = COMMANDS[args.command][0]
    try:
        threads()
        code, report = func(args)
    except CLIError as exc:
        print(f"ncdef {args.command}: {exc}", file=sys.stderr)
        if exc.report is not None:
            emit(jsonable(exc.report), args.format, args.output)
        return exc.code
    except (TransferConsistencyError, InfeasibleConstraints) as exc:
        print(f"ncdef {args.command}: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    emit(jsonable(report), args.format, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
