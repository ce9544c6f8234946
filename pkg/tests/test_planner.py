import dataclasses
import json

import pytest

from qli.corpus import NAMED
from qli.diagram import parse_pd
from qli.engine import execute, prepare
from qli.planner import (
    LeafAtom,
    Merge,
    PlanError,
    Slide,
    apply_ops_to_labels,
    estimate_cost,
    validate_plan,
)


def plans(d, cat, **kw):
    return [p.plan for p in prepare(d, cat, **kw)]


def test_corpus_plans_validate(diagrams, sl2, u1):
    for d in diagrams.values():
        for cat in (sl2, u1):
            for plan in plans(d, cat):
                validate_plan(plan, cat)


def test_step_kinds_and_json(diagrams, sl2):
    kinds = set()
    for d in diagrams.values():
        for plan in plans(d, sl2):
            kinds |= {type(s).__name__ for s in plan.steps}
            json.dumps(plan.to_json())
    assert kinds == {"LeafAtom", "Slide", "Merge"}


def test_every_leaf_appears_once(diagrams, sl2):
    d = diagrams["borromean"]
    (plan,) = plans(d, sl2)
    leaves = [s.vertex for s in plan.steps if isinstance(s, LeafAtom)]
    assert sorted(leaves) == list(range(d.n_vertices))
    merges = [s for s in plan.steps if isinstance(s, Merge)]
    assert len(merges) == d.n_vertices - 1


def test_slides_move_the_smaller_block(diagrams, sl2):
    seen = 0
    for d in diagrams.values():
        for plan in plans(d, sl2):
            for s in plan.steps:
                if isinstance(s, Slide):
                    seen += 1
                    assert s.j <= len(s.before) - s.j
                    labels = apply_ops_to_labels([x.obj for x in s.before], s.ops)
                    assert labels == [x.obj for x in s.after]
    assert seen > 0


def test_tampered_plan_rejected(sl2):
    (plan,) = plans(parse_pd(NAMED["figure_eight"]), sl2)
    i = next(i for i, s in enumerate(plan.steps) if isinstance(s, Merge))
    m = plan.steps[i]
    bad = dataclasses.replace(m, right_state=m.right_state[::-1])
    broken = dataclasses.replace(plan, steps=plan.steps[:i] + [bad] + plan.steps[i + 1:])
    with pytest.raises(PlanError):
        validate_plan(broken, sl2)
    with pytest.raises(PlanError):
        validate_plan(dataclasses.replace(plan, steps=plan.steps[::-1]), sl2)


def test_bad_label_ops_rejected():
    with pytest.raises(PlanError):
        apply_ops_to_labels(["V", "W"], [("braid", 0, "W", "V")])
    with pytest.raises(PlanError):
        apply_ops_to_labels(["V"], [("theta", 0, "W")])


def test_cost_estimate_bounds_actual_run(diagrams, sl2):
    for name, d in diagrams.items():
        for plan in plans(d, sl2):
            est = estimate_cost(plan, sl2)
            val, stats = execute(plan, sl2)
            assert stats.peak_len <= est.peak_len, name
            assert stats.scalar_ops <= est.scalar_ops, name
            if val:
                assert est.degree_lo <= val.min_exp and val.max_exp <= est.degree_hi, name
                assert val.max_abs_coeff() <= 2 ** est.log2C, name


def test_colouring_resolution(u1):
    d = parse_pd("component 2 color W\n" + NAMED["hopf"])
    (plan,) = plans(d, u1)
    assert plan.colouring == {1: "V", 2: "W"}
    (plan,) = plans(d, u1, colouring={2: "V"})
    assert plan.colouring == {1: "V", 2: "V"}
