import json

import numpy as np
import pytest

from conftest import perturbed_sl2_spec, rescaled_sl2_spec, u1_spec
from qli.category import (
    CategoryError,
    axiom_check,
    block_braid_ops,
    builtin,
    load_category,
    parse_category,
)
from qli.engine import loop_value
from qli.ring import LaurentPoly

FAMILIES = {"inverse", "Yang-Baxter", "zig-zag", "twist", "pivotal", "framing", "naturality"}


@pytest.mark.parametrize("name", ["sl2", "trivial"])
def test_builtins_pass_every_family(name):
    rep = axiom_check(builtin(name))
    assert set(rep.summary()) == FAMILIES
    assert rep.ok, rep.failures()


def test_sl2_constants(sl2):
    A = lambda e: LaurentPoly.monomial(e, "A")  # noqa: E731
    assert sl2.framing_unit == -A(3)
    assert loop_value(sl2) == -A(2) - A(-2)
    assert sl2.max_dim == 2 and sl2.dual("V") == "V"


def test_trivial_loop(trivial):
    assert loop_value(trivial) == 1


def test_load_builtin_from_file_path(tmp_path):
    path = tmp_path / "sl2.json"
    path.write_text(json.dumps(builtin("sl2").to_json()))
    cat = load_category(str(path))
    assert cat.to_json() == builtin("sl2").to_json()


def test_json_roundtrip(sl2):
    again = parse_category(json.loads(json.dumps(sl2.to_json())))
    assert again.to_json() == sl2.to_json()


def test_u1_passes(u1):
    assert axiom_check(u1).ok


def test_rescaled_passes(category_file):
    cat = load_category(str(category_file(rescaled_sl2_spec())))
    assert cat.variable == "q" and axiom_check(cat).ok


def test_perturbed_rejected_with_named_identity():
    with pytest.raises(CategoryError) as err:
        parse_category(perturbed_sl2_spec())
    report = err.value.report
    assert report is not None and not report.summary()["Yang-Baxter"]
    assert any(f.startswith("Yang-Baxter") for f in report.failures())


def test_bad_framing_unit_detected():
    spec = builtin("sl2").to_json()
    spec["framing_unit"] = "A^3"
    with pytest.raises(CategoryError, match="framing"):
        parse_category(spec)
    spec["framing_unit"] = "A + 1"
    with pytest.raises(CategoryError, match="unit monomial"):
        parse_category(spec)


def test_broken_twist_detected():
    spec = u1_spec()
    spec["twist"]["V"] = [["q^2"]]
    spec["twist_inv"]["V"] = [["q^-2"]]
    rep = axiom_check(parse_category(spec, check=False))
    assert not rep.summary()["twist"]


@pytest.mark.parametrize("mutate, msg", [
    (lambda s: s.pop("variable"), "missing field"),
    (lambda s: s["braiding"].pop("V,V"), "missing pair"),
    (lambda s: s["objects"][0].update(dual="X"), "unknown dual"),
    (lambda s: s["twist"].update(V=[["A"]]), "shape"),
    (lambda s: s["eval"].update(V=[["0", "A", "q", "0"]]), "eval"),
    (lambda s: s.pop("coeval"), "coeval"),
])
def test_malformed_files(mutate, msg):
    spec = builtin("sl2").to_json()
    mutate(spec)
    with pytest.raises(CategoryError, match=msg):
        parse_category(spec)


def test_load_errors(tmp_path):
    with pytest.raises(CategoryError):
        load_category(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(CategoryError, match="invalid JSON"):
        load_category(str(bad))
    with pytest.raises(CategoryError):
        builtin("sl3")


def test_block_braid_ops_count():
    ops = block_braid_ops(["a", "b"], ["c", "d", "e"])
    assert len(ops) == 6
    labels = ["a", "b", "c", "d", "e"]
    for pos, x, y in ops:
        assert labels[pos:pos + 2] == [x, y]
        labels[pos], labels[pos + 1] = y, x
    assert labels == ["c", "d", "e", "a", "b"]


def test_braiding_matrices_are_inverse(sl2):
    c, ci = sl2.braiding[("V", "V")], sl2.braiding_inv[("V", "V")]
    prod = c.dot(ci)
    assert all(prod[i, j] == int(i == j) for i in range(4) for j in range(4))
    assert isinstance(prod, np.ndarray)
