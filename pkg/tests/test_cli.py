from __future__ import annotations

import json
from importlib import resources

import pytest

from ncdef import cli
from ncdef.ncfree import GeneratorSet, NCPoly, parse_ncpoly
from ncdef.subvariety import ObstructionResult
from ncdef.transfer import TransferConsistencyError

DATA = resources.files("ncdef.data")


def data(name: str) -> str:
    return str(DATA.joinpath(name))


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip().startswith("{") else None
    if report is not None:
        assert json.loads(json.dumps(report)) == report
    return code, report, out


def test_check_dga_codes(capsys, tmp_path):
    code, report, _ = run(capsys, "check-dga", data("massey_dga.json"))
    assert code == 0 and report["valid"]
    bad = json.loads(DATA.joinpath("massey_dga.json").read_text())
    bad["mul"].append([1, 1, 1, "1"])
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    code, report, _ = run(capsys, "check-dga", p)
    assert code == 1
    assert "product is degree-additive" in {v["identity"] for v in report["violations"]}
    p.write_text('{"degrees": [0, 1], "dims": [1')
    code, _, out = run(capsys, "check-dga", p)
    assert code == 2 and "bad.json:1:" in out.err
    code, _, _ = run(capsys, "check-dga", tmp_path / "missing.json")
    assert code == 2


def test_cohomology(capsys):
    code, report, _ = run(capsys, "cohomology", data("massey_dga.json"))
    assert code == 0
    assert report["dims"] == {"0": 1, "1": 3, "2": 1, "3": 0}
    assert report["splitting_residuals"] == []


def test_transfer_outputs(capsys):
    code, report, _ = run(capsys, "transfer", data("exterior2_dga.json"), "-N", 4)
    assert code == 0
    assert all(report["m"][str(n)] == [] for n in (3, 4))
    code, report, _ = run(capsys, "transfer", data("massey_dga.json"), "-N", 4)
    assert code == 0
    assert report["m"]["3"]
    assert report["residuals"] == {"ainf": {}, "morphism": {}}


def test_transfer_consistency_failure(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise TransferConsistencyError("d(U_3) != 0")
    monkeypatch.setattr(cli, "kadeishvili", boom)
    code, _, out = run(capsys, "transfer", data("massey_dga.json"), "-N", 3)
    assert code == 3 and "U_3" in out.err


def test_defring_against_golden(capsys):
    code, report, _ = run(capsys, "defring", data("lines_p3_data.json"), "-N", 3,
                          "--expected", data("lines_p3_relations.json"))
    assert code == 0 and report["expected"]["span_equal"]
    gens = GeneratorSet.from_json(report["generators"])
    rels = [NCPoly.from_json(gens, r) for r in report["relations_json"]]
    assert [parse_ncpoly(gens, s) for s in report["relations"]] == rels


def test_defring_mismatch(capsys, tmp_path):
    golden = json.loads(DATA.joinpath("lines_p3_relations.json").read_text())
    golden["relations"][2] = "a*d - d*a"
    p = tmp_path / "golden.json"
    p.write_text(json.dumps(golden))
    code, report, out = run(capsys, "defring", data("lines_p3_data.json"), "-N", 3, "--expected", p)
    assert code == 1
    assert report["expected"]["first_differing_degree"] == 2
    assert "degree 2" in out.err


def test_defring_examples(capsys):
    code, report, _ = run(capsys, "defring", data("two_lines_data.json"), "-N", 4)
    assert code == 0 and report["total_dim"] == 4
    code, report, _ = run(capsys, "defring", data("x2_y3_relations.json"), "-N", 12)
    assert code == 0 and len(report["filtration_dims"]) == 13 and all(report["filtration_dims"])


def test_mc_verify(capsys):
    for name, n in (("lines_p3_data.json", 3), ("two_lines_data.json", 4)):
        code, report, _ = run(capsys, "mc-verify", data(name), "-N", n)
        assert code == 0 and report["mc_holds"] and report["largest_quotient"]


def test_twisted(capsys):
    code, report, _ = run(capsys, "twisted", "--preset", "two_lines", "-N", 4)
    assert code == 0 and report["h0"] == 4 and report["flat"]
    code, report, _ = run(capsys, "twisted", data("gauge_model.json"), "-N", 3, "--seed", 7)
    assert code == 0 and report["flat"] and report["square_zero"]


def test_subvariety_presets(capsys):
    code, report, _ = run(capsys, "subvariety", "--preset", "lines_pn", "--n", 3, "-N", 3,
                          "--expected", data("lines_p3_relations.json"))
    assert code == 0 and report["count"] == 3 and report["expected"]["span_equal"]
    code, report, _ = run(capsys, "subvariety", "--preset", "lines_pn", "--n", 2)
    assert code == 0 and report["count"] == 0
    code, report, _ = run(capsys, "subvariety", "--preset", "conic_p4",
                          "--expected", data("conic_p4_relations.json"))
    assert code == 0 and report["count"] == 19 and report["max_degree"] == 3
    assert report["expected"]["span_equal"]
    gens = GeneratorSet(tuple(report["generators"]))
    assert all(str(parse_ncpoly(gens, s)) == s for s in report["relations"])


def test_subvariety_from_file(capsys):
    code, report, _ = run(capsys, "subvariety", data("lines_p3_ansatz.json"), "-N", 3)
    assert code == 0 and report["count"] == 3


def test_cap_exhausted(capsys, monkeypatch):
    monkeypatch.setattr(cli, "obstruction_relations",
                        lambda ansatz, cap: ObstructionResult([], False, 4, cap))
    code, report, _ = run(capsys, "subvariety", "--preset", "lines_pn", "--n", 3)
    assert code == 4 and report["closed"] is False


def test_dims(capsys):
    code, report, _ = run(capsys, "dims", data("x2_y3_relations.json"), "-N", 6)
    assert code == 0 and report["filtration_dims"] == [1, 2, 3, 4, 5, 7, 9]


def test_bad_arguments(capsys, monkeypatch):
    assert run(capsys, "subvariety", "--preset", "nope")[0] == 2
    assert run(capsys, "dims", data("x2_y3_relations.json"), "-N", 0)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    monkeypatch.setenv("NCDEF_THREADS", "zero")
    assert run(capsys, "dims", data("x2_y3_relations.json"))[0] == 2
    monkeypatch.setenv("NCDEF_THREADS", "2")
    assert run(capsys, "dims", data("x2_y3_relations.json"), "-N", 3)[0] == 0


def test_output_file_and_text_format(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, _, out = run(capsys, "dims", data("x2_y3_relations.json"), "-N", 4, "--output", target)
    assert code == 0 and out.out == ""
    assert json.loads(target.read_text())["filtration_dims"] == [1, 2, 3, 4, 5]
    assert [p.name for p in tmp_path.iterdir()] == ["report.json"]
    code, _, out = run(capsys, "defring", data("two_lines_data.json"), "-N", 3, "--format", "text")
    assert code == 0 and "total_dim: 4" in out.out


@pytest.mark.parametrize("name", sorted(p.name for p in DATA.iterdir() if p.name.endswith(".json")))
def test_shipped_files_parse(name):
    json.loads(DATA.joinpath(name).read_text())
