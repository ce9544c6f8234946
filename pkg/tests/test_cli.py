import io
import json
import subprocess
import sys

import pytest

from conftest import perturbed_sl2_spec, u1_spec
from qli import cli
from qli.carving import NotRealizable
from qli.corpus import NAMED
from qli.diagram import parse_pd
from qli.engine import compute_invariant


@pytest.fixture
def pd_file(tmp_path):
    def make(text, name="d.pd"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_trefoil_text(capsys, pd_file, sl2):
    path = pd_file(NAMED["left_trefoil"])
    code, out, _ = run(capsys, "compute", path, "--normalize-framing")
    assert code == 0
    lines = out.splitlines()
    want = compute_invariant(parse_pd(NAMED["left_trefoil"]), sl2, normalize=True).value
    assert lines[0] == str(want)
    assert lines[1] == "jones: t^-1 + t^-3 - t^-4"


def test_compute_json_roundtrip(capsys, pd_file, sl2):
    path = pd_file(NAMED["figure_eight"])
    code, out, _ = run(capsys, "compute", path, "--json", "--emit-plan", "--oracle-check")
    rep = json.loads(out)
    assert code == 0 and rep["schema_version"] == cli.SCHEMA_VERSION
    assert rep["oracle"]["verdict"] == "agree"
    assert rep["raw"] == str(compute_invariant(parse_pd(NAMED["figure_eight"]), sl2).raw)
    cost = rep["plans"][0]["cost"]
    assert cost["min_exponent_bound"] <= cost["degree_bound"]


def test_compute_modular_matches_exact(capsys, pd_file):
    path = pd_file(NAMED["hopf"])
    _, exact, _ = run(capsys, "compute", path, "--json")
    _, modular, _ = run(capsys, "compute", path, "--json", "--backend", "modular", "--jobs", "1")
    assert json.loads(exact)["raw"] == json.loads(modular)["raw"]


def test_compute_options(capsys, pd_file):
    path = pd_file(NAMED["borromean"])
    outs = set()
    for extra in ([], ["--cheapest"], ["--decomposition", "sweep"], ["--root-edge", "1"]):
        code, out, _ = run(capsys, "compute", path, *extra)
        assert code == 0
        outs.add(out.splitlines()[0])
    assert len(outs) == 1
    code, out, _ = run(capsys, "compute", path, "--category", "trivial")
    assert out.strip() == "1"
    code, out, _ = run(capsys, "compute", pd_file("X[1,1,2,2]"), "--normalize-framing", "--reduce")
    assert out.strip() == "1"


def test_colour_flag(capsys, pd_file, category_file):
    cat = str(category_file(u1_spec()))
    code, out, _ = run(capsys, "compute", pd_file(NAMED["hopf"]), "--category", cat, "--color", "2=W")
    assert code == 0 and out.strip()
    assert run(capsys, "compute", pd_file(NAMED["hopf"]), "--color", "2")[0] == 1


def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(NAMED["hopf"]))
    code, out, _ = run(capsys, "oracle", "-")
    assert code == 0 and "agreement: yes" in out


def test_decompose(capsys, pd_file):
    code, out, _ = run(capsys, "decompose", pd_file(NAMED["figure_eight"]), "--json",
                       "--decomposition", "exact")
    rep = json.loads(out)
    assert code == 0 and rep["realizable"] and rep["congestion"] == 4
    code, out, _ = run(capsys, "decompose", pd_file(NAMED["figure_eight"]))
    assert out.startswith("root")


def test_check_category(capsys, category_file):
    code, out, _ = run(capsys, "check-category", "sl2")
    assert code == 0 and "all axioms pass" in out
    code, out, _ = run(capsys, "check-category", str(category_file(perturbed_sl2_spec())))
    assert code == 2 and "Yang-Baxter" in out and "FAIL" in out


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--min", "3", "--max", "6", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["monotone"] and len(rep["rows"]) == 4
    assert all(r["scalar_ops"] <= r["bound"] for r in rep["rows"])
    assert run(capsys, "bench", "--family", "pretzel")[0] == 1


def test_exit_codes(capsys, pd_file, tmp_path, monkeypatch, category_file):
    assert run(capsys, "compute", pd_file("X[1,2,3"))[0] == 1
    assert run(capsys, "compute", str(tmp_path / "nope.pd"))[0] == 1
    assert run(capsys, "compute", pd_file(NAMED["hopf"]), "--category", "sl7")[0] == 2
    assert run(capsys, "compute", pd_file(NAMED["hopf"]), "--category",
               str(category_file(perturbed_sl2_spec())))[0] == 2

    def refuse(*a, **k):
        raise NotRealizable("refused")
    monkeypatch.setattr(cli, "prepare", refuse)
    assert run(capsys, "compute", pd_file(NAMED["hopf"]))[0] == 3
    monkeypatch.undo()

    monkeypatch.setattr(cli, "run_oracles", lambda *a: {"kauffman": "0"})
    code, out, _ = run(capsys, "compute", pd_file(NAMED["hopf"]), "--oracle-check")
    assert code == 5 and "disagree" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qli", "check-category", "trivial"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "all axioms pass" in res.stdout
