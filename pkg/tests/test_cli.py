import json
import subprocess
import sys

import pytest

from stratcalc.checks import CHECKS, InputError, make_family, run_check
from stratcalc.cli import main
from stratcalc.inputs import catalog_json, load_catalog, load_degrees, load_map, load_poset
from stratcalc.poset import FinitePoset, named_poset

SQUARE = {"elements": ["0", "a", "b", "1"], "relations": [["0", "a"], ["0", "b"], ["a", "1"], ["b", "1"]]}
CHAIN3 = {"elements": ["0", "1", "2"], "relations": [["0", "1"], ["1", "2"]]}


@pytest.fixture
def files(tmp_path):
    sq = tmp_path / "square.json"
    sq.write_text(json.dumps(SQUARE))
    ch = tmp_path / "chain3.json"
    ch.write_text(json.dumps(CHAIN3))
    return {"square": str(sq), "chain3": str(ch), "dir": tmp_path}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------- worked examples


def test_microcosm_on_the_square(files, capsys):
    code, out, _ = run(capsys, "strat", "check", "microcosm", "--poset", files["square"], "--trials", "5", "--seed", "1", "--field", "Q")
    assert code == 0
    verdicts = [json.loads(line) for line in out.splitlines()]
    assert len(verdicts) == 5
    assert [v["seed"] for v in verdicts] == [1, 2, 3, 4, 5]
    for v in verdicts:
        assert set(v) == {"check", "poset", "seed", "field", "pass", "witness"}
        assert v["pass"] and v["witness"] is None and v["field"] == "Q"


def test_mobius_table_of_a_chain(files, capsys):
    code, out, _ = run(capsys, "poset", "mobius", files["chain3"])
    assert code == 0
    rows = out.splitlines()
    assert rows[0].startswith("r,p,mu") or "mu" in rows[0]
    assert "0,2,0" in rows


def test_skeleton_of_s3(capsys):
    code, out, _ = run(capsys, "equivariant", "skeleton", "--group", "S3")
    assert code == 0
    edges = {f"{e['from']}->{e['to']}": e for e in json.loads(out)["edges"]}
    assert {k for k, e in edges.items() if e["verdict"] == "PossiblyNonzero"} == {"e->C2", "e->C3", "C3->S3"}
    assert edges["e->S3"]["verdict"] == "Zero" and edges["C2->S3"]["reason"] == "EmptyCTilde"


def test_skeleton_text_format(capsys):
    code, out, _ = run(capsys, "equivariant", "skeleton", "--group", "C6", "--format", "text")
    assert code == 0
    assert "Zero: e->C6" in out


# ---------------------------------------------------------------- other commands


@pytest.mark.parametrize("action", ["sd", "twar", "hasse"])
def test_poset_reports(files, capsys, action):
    code, out, _ = run(capsys, "poset", action, files["square"])
    assert code == 0
    json.loads(out)


def test_named_and_inline_posets(capsys):
    assert run(capsys, "poset", "mobius", "B2")[0] == 0
    assert run(capsys, "poset", "mobius", json.dumps(CHAIN3))[0] == 0
    assert run(capsys, "poset", "mobius", "P4.3")[0] == 0


def test_specseq_pages(files, capsys):
    deg = json.dumps({"0": 0, "a": 1, "b": 1, "1": 2})
    code, out, _ = run(capsys, "specseq", "pages", "--poset", files["square"], "--degree-map", deg)
    assert code == 0
    data = json.loads(out)
    assert data["range"] == [0, 2] and data["pages"][0]["r"] == 1
    code, out, _ = run(capsys, "specseq", "pages", "--poset", files["square"], "--degree-map", deg, "--format", "text", "--upto", "2")
    assert code == 0 and out.startswith("E^1")


def test_specseq_fibered_along_a_map(files, capsys):
    f = json.dumps({"target": "[1]", "assignment": {"0": "0", "a": "0", "b": "1", "1": "1"}})
    code, _, err = run(capsys, "specseq", "pages", "--poset", files["square"], "--family", "fibered", "--map", f, "--degree-map", json.dumps({"0": 1, "1": 0}))
    # the degree map lives on the stratifying poset, which is [1] here, not the square
    assert code == 2 and "degree map" in err


def test_equivariant_poset_and_shape(capsys):
    code, out, _ = run(capsys, "equivariant", "poset", "--group", "S3")
    assert code == 0 and len(json.loads(out)["classes"]) == 4
    code, out, _ = run(capsys, "equivariant", "shape", "--group", "C5", "--subgroup", "C5")
    assert code == 0 and len(json.loads(out)["nodes"]) == 3
    code, out, _ = run(capsys, "equivariant", "shape", "--group", "C4", "--subgroup", "C2", "--restrict", "C4", "--transfer")
    assert code == 0 and json.loads(out)["direction"] == "covariant"


def test_strat_check_failure_exits_one(capsys):
    # the strictness check fails for the tautological [2] on δ_0-like objects at some seed
    codes = [run(capsys, "strat", "check", "strict", "--poset", "[2]", "--seed", str(s))[0] for s in range(1, 6)]
    assert 1 in codes and set(codes) <= {0, 1}


def test_pushforward_and_refine_checks(capsys):
    alpha = json.dumps({"target": "[1]", "assignment": {"0": "0", "1": "0", "2": "1"}})
    assert run(capsys, "strat", "check", "pushforward", "--poset", "[2]", "--alpha", alpha)[0] == 0
    assert run(capsys, "strat", "check", "pushforward", "--poset", "B2")[0] == 0
    fibers = json.dumps({"0": "[1]", "1": "pt", "2": "[1]"})
    assert run(capsys, "strat", "check", "refine", "--poset", "[2]", "--fibers", fibers)[0] == 0


def test_fibered_check_along_a_map(capsys):
    f = json.dumps({"target": "[1]", "assignment": {"0": "0", "1": "0", "2": "1"}})
    code, out, _ = run(capsys, "strat", "check", "strict", "--poset", "[2]", "--family", "fibered", "--map", f)
    assert code == 0 and json.loads(out)["pass"]


# ---------------------------------------------------------------- input errors


@pytest.mark.parametrize(
    "argv",
    [
        ["poset", "mobius", "/no/such/file.json"],
        ["poset", "mobius", '{"elements": ["a", "b"], "relations": [["a", "b"], ["b", "a"]]}'],
        ["poset", "mobius", "{not json"],
        ["strat", "check", "microcosm", "--poset", "B2", "--field", "F4"],
        ["strat", "check", "microcosm", "--poset", "B2", "--trials", "0"],
        ["strat", "check", "nonsense", "--poset", "B2"],
        ["strat", "check", "refine", "--poset", "B2", "--family", "fibered"],
        ["specseq", "pages", "--poset", "[1]", "--degree-map", '{"0": 0, "1": 0}'],
        ["specseq", "pages", "--poset", "[1]", "--degree-map", '{"0": 0}'],
        ["specseq", "pages", "--poset", "[1]", "--degree-map", '{"0": 0, "1": 1}', "--kind", "Sideways"],
        ["equivariant", "skeleton", "--group", "Z9"],
        ["equivariant", "shape", "--group", "S3"],
        ["equivariant", "shape", "--group", "S3", "--subgroup", "C7"],
        ["suite", "--catalog", "/no/such/catalog.json"],
        ["suite", "--families", "weird"],
        [],
    ],
)
def test_input_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


# ---------------------------------------------------------------- suite


def test_suite_on_an_empty_catalog_passes(tmp_path, capsys):
    cat = tmp_path / "empty.json"
    cat.write_text(json.dumps({"posets": [], "fixtures": []}))
    code, out, _ = run(capsys, "suite", "--catalog", str(cat))
    assert code == 0
    report = json.loads(out)
    assert report["runs"] == 0 and report["pass"]


def _arrow_fixture():
    from stratcalc.diagram import random_diagram

    return dict(random_diagram(named_poset("[1]"), 3, complexity=1).to_json(), name="broken")


def _wrong_shape(fx):
    fx["edges"][0]["map"]["components"] = {"0": [["1", "1", "1"]]}


def _unknown_element(fx):
    fx["values"]["7"] = fx["values"]["0"]


def _stray_field(fx):
    fx["maps"] = []


@pytest.mark.parametrize("corrupt", [_wrong_shape, _unknown_element, _stray_field])
def test_suite_rejects_a_corrupted_fixture(tmp_path, capsys, corrupt):
    fx = _arrow_fixture()
    corrupt(fx)
    cat = tmp_path / "bad.json"
    cat.write_text(json.dumps({"posets": [SQUARE], "fixtures": [fx]}))
    code, out, err = run(capsys, "suite", "--catalog", str(cat), "--checks", "microcosm")
    assert code == 2 and "broken" in err and out == ""


def test_suite_with_fixtures_and_threads(tmp_path, capsys):
    from stratcalc.diagram import random_diagram

    P = named_poset("[1]")
    fixture = dict(random_diagram(P, 3).to_json(), name="arrow")
    cat = tmp_path / "cat.json"
    cat.write_text(json.dumps(dict(catalog_json([named_poset("V"), named_poset("[2]")]), fixtures=[fixture])))
    args = ["suite", "--catalog", str(cat), "--checks", "microcosm,reflection,strict", "--fields", "Q,F2", "--seeds", "1,2"]
    code, out, _ = run(capsys, *args, "--jobs", "2", "--out", str(tmp_path / "rep"))
    assert code == 1  # strict is not expected to hold everywhere on the tautological family
    report = json.loads(out)
    assert report["fixtures"] == 1
    assert all(f["check"] == "strict" for f in report["failures"])
    code2, out2, _ = run(capsys, *args, "--jobs", "1")
    assert code2 == code and json.loads(out2) == report
    rep = tmp_path / "rep"
    assert (rep / "suite.json").exists() and (rep / "timing.png").stat().st_size > 0
    assert len((rep / "verdicts.jsonl").read_text().splitlines()) == report["runs"]


def test_small_default_suite_passes(capsys):
    code, out, _ = run(capsys, "suite", "--max-size", "2", "--fields", "Q")
    assert code == 0
    assert json.loads(out)["posets"] == 3


# ---------------------------------------------------------------- reports and figures


def test_reports_are_stable_under_rerun(files, capsys):
    argv = ["strat", "check", "excision", "--poset", files["square"], "--seed", "4", "--field", "F3"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_out_directory_gets_report_and_figure(files, capsys):
    d = files["dir"]
    assert main(["poset", "sd", files["square"], "--out", str(d / "sd")]) == 0
    assert main(["equivariant", "skeleton", "--group", "S3", "--out", str(d / "sk")]) == 0
    assert main(["strat", "check", "microcosm", "--poset", "[1]", "--out", str(d / "chk")]) == 0
    deg = json.dumps({"0": 0, "a": 1, "b": 1, "1": 2})
    assert main(["specseq", "pages", "--poset", files["square"], "--degree-map", deg, "--out", str(d / "ss")]) == 0
    capsys.readouterr()
    for sub, names in {"sd": ["sd.json", "sd.png"], "sk": ["skeleton.json", "skeleton.png"], "chk": ["verdicts.jsonl", "verdicts.png"], "ss": ["pages.json", "page1.png"]}.items():
        for n in names:
            assert (d / sub / n).stat().st_size > 0, (sub, n)


def test_module_entry_point(files):
    r = subprocess.run([sys.executable, "-m", "stratcalc", "poset", "mobius", files["chain3"]], capture_output=True, text=True)
    assert r.returncode == 0 and "0,2,0" in r.stdout
    r = subprocess.run([sys.executable, "-m", "stratcalc", "poset", "mobius", "/nope"], capture_output=True, text=True)
    assert r.returncode == 2


# ---------------------------------------------------------------- loaders


def test_loaders():
    P = load_poset(json.dumps(SQUARE))
    assert len(P) == 4
    f = load_map(json.dumps({"target": "[1]", "assignment": {"0": "0", "a": "0", "b": "1", "1": "1"}}), P)
    assert f.assignment["b"] == "1"
    assert load_degrees(json.dumps({"0": 0, "a": 1, "b": 1, "1": 2}), P)["1"] == 2
    with pytest.raises(InputError):
        load_degrees(json.dumps({"0": "x", "a": 1, "b": 1, "1": 2}), P)
    with pytest.raises(InputError):
        load_map(json.dumps({"target": "[1]", "assignment": {"0": "1", "a": "0", "b": "0", "1": "0"}}), P)
    with pytest.raises(InputError):
        load_poset("P9.999")


def test_bundled_catalog():
    cat = load_catalog()
    assert len(cat.posets) == 87 and max(len(P) for P in cat.posets) == 5
    assert len(load_catalog(max_size=3).posets) == 1 + 2 + 5


def test_run_check_verdict_shape():
    v = run_check("microcosm", make_family("taut", named_poset("V")), 3)
    assert {"check", "poset", "seed", "field", "pass", "witness", "seconds"} == set(v)
    with pytest.raises(InputError):
        run_check("nope", make_family("taut", named_poset("V")), 3)
    assert "specseq" in CHECKS
