import copy
import json
import os

import pytest
from hypothesis import settings

from qli.category import builtin, parse_category
from qli.corpus import corpus
from qli.diagram import parse_pd
from qli.ring import LaurentPoly

settings.register_profile("qli", max_examples=60, deadline=None)
settings.load_profile("qli")

SEED = int(os.environ.get("QLI_SEED", "20240611"))


@pytest.fixture(scope="session")
def sl2():
    return builtin("sl2")


@pytest.fixture(scope="session")
def trivial():
    return builtin("trivial")


@pytest.fixture(scope="session")
def diagrams():
    return {name: parse_pd(text) for name, text in corpus(seed=SEED).items()}


def u1_spec():
    """Abelian category: V and V* of dimension 1, c = q^(e e'), theta = q, b = d = 1."""
    sign = {"V": 1, "W": -1}
    spec = {
        "name": "u1",
        "variable": "q",
        "objects": [{"name": "V", "dim": 1, "dual": "W"}, {"name": "W", "dim": 1, "dual": "V"}],
        "braiding": {}, "braiding_inv": {},
        "twist": {"V": [["q"]], "W": [["q"]]},
        "twist_inv": {"V": [["q^-1"]], "W": [["q^-1"]]},
        "eval": {"V": [["1"]], "W": [["1"]]},
        "coeval": {"V": [["1"]], "W": [["1"]]},
        "framing_unit": "q",
    }
    for a in sign:
        for b in sign:
            e = sign[a] * sign[b]
            spec["braiding"][f"{a},{b}"] = [[f"q^{e}"]]
            spec["braiding_inv"][f"{a},{b}"] = [[f"q^{-e}"]]
    return spec


@pytest.fixture(scope="session")
def u1():
    return parse_category(u1_spec())


def _map_table(table, fn):
    return {k: [[fn(x) for x in row] for row in m] for k, m in table.items()}


def rescaled_sl2_spec():
    """sl2 with A -> q^2, cups scaled by q and caps by q^-1.

    Every closed diagram has as many cups as caps, so the invariant becomes
    the sl2 value with A replaced by q^2.
    """
    base = builtin("sl2").to_json()

    def sub(scale):
        def fn(s):
            p = LaurentPoly.parse(s, "A").substitute("q", 2) * LaurentPoly.monomial(scale, "q")
            return str(p)
        return fn

    spec = copy.deepcopy(base)
    spec["name"] = "sl2-rescaled"
    spec["variable"] = "q"
    for key in ("braiding", "braiding_inv", "twist", "twist_inv"):
        spec[key] = _map_table(base[key], sub(0))
    spec["coeval"] = _map_table(base["coeval"], sub(1))
    spec["eval"] = _map_table(base["eval"], sub(-1))
    spec["framing_unit"] = sub(0)(base["framing_unit"])
    return spec


def perturbed_sl2_spec():
    """sl2 with one braiding entry increased by 1."""
    spec = builtin("sl2").to_json()
    m = spec["braiding"]["V,V"]
    m[0][0] = str(LaurentPoly.parse(m[0][0], "A") + 1)
    spec["name"] = "sl2-perturbed"
    return spec


@pytest.fixture
def category_file(tmp_path):
    def write(spec, name="cat.json"):
        path = tmp_path / name
        path.write_text(json.dumps(spec))
        return path
    return write
