from __future__ import annotations

from limsketch.elim import (
    BASE_TAG,
    FAITHFUL,
    FREE_TAG,
    PRUNED,
    elim_stage,
    free_element_id,
    initial_stage,
    reflect_elim,
    relation_one,
    relation_two,
    tag_base,
    tag_free,
)
from limsketch.setops import make_presentation
from limsketch.sketchlib import gap_map, is_model

from tests.fixtures import (
    binary_collapsed_fixture,
    binary_fixture,
    binary_model,
    binary_sketch,
    iso_fixture,
    iso_model,
    iso_sketch,
    sheaf_fixture,
    sheaf_sketch,
)


# -- e_step (exercised through elim_stage, which wires the pruning inputs) ----


def test_free_sizes_iso_stage_one():
    sketch = iso_sketch()
    stage1 = elim_stage(initial_stage(iso_fixture(sketch), sketch), sketch, FAITHFUL)
    assert stage1.free.size() == {"a": 1, "b": 1}
    # the single limit tuple is the tagged y
    assert stage1.limits_prev["c0"] == ((tag_base("y"),),)


def test_free_sizes_binary_stage_one():
    sketch = binary_sketch()
    stage1 = elim_stage(initial_stage(binary_fixture(sketch), sketch), sketch, FAITHFUL)
    assert stage1.free.size() == {"a": 8, "p": 4}


def test_free_empty_when_diagram_carriers_empty():
    sketch = binary_sketch()
    pres = make_presentation(sketch.base, {"a": [], "p": []}, {"pi1": {}, "pi2": {}})
    stage1 = elim_stage(initial_stage(pres, sketch), sketch, FAITHFUL)
    assert stage1.free.size() == {"a": 0, "p": 0}


def test_free_action_post_composes_arrows():
    sketch = binary_sketch()
    stage1 = elim_stage(initial_stage(binary_fixture(sketch), sketch), sketch, FAITHFUL)
    for fid in stage1.free.carrier["p"]:
        cone, arrow, w = stage1.free_prov[fid]
        assert arrow == "id_p"
        for proj in ("pi1", "pi2"):
            image = stage1.free.action[proj][fid]
            assert image == free_element_id(cone, proj, w)


def test_kan_unit_points_at_identity_witnesses():
    sketch = iso_sketch()
    stage1 = elim_stage(initial_stage(iso_fixture(sketch), sketch), sketch, FAITHFUL)
    unit = stage1.kan_unit["c0"]
    (w,) = stage1.limits_prev["c0"]
    assert unit[w] == tag_free(free_element_id("c0", "id_a", w))
    assert unit[w] in stage1.total.carrier["a"]


# -- relation_one -------------------------------------------------------------


def test_rule_one_merges_gap_fiber_at_stage_zero():
    sketch = iso_sketch()
    stage0 = initial_stage(iso_fixture(sketch), sketch)
    pairs = relation_one(stage0, sketch)
    assert pairs == {"a": ((tag_base("x1"), tag_base("x2")),)}


def test_rule_one_empty_on_injective_gaps():
    sketch = binary_sketch()
    stage0 = initial_stage(binary_model(sketch), sketch)
    assert relation_one(stage0, sketch) == {}


def test_rule_one_merges_duplicate_witnesses_at_stage_two():
    sketch = iso_sketch()
    trace = reflect_elim(iso_fixture(sketch), sketch, budget=8, mode=FAITHFUL)
    stage2 = trace.stages[2]
    pairs = relation_one(stage2, sketch)
    base_pairs = [
        p for p in pairs.get("a", ())
        if p[0].startswith(f"{BASE_TAG}:") and p[1].startswith(f"{BASE_TAG}:")
    ]
    # the two surviving classes at a (old [x1 x2] and the freshly added witness)
    assert len(base_pairs) == 1
    assert sorted(base_pairs[0]) == sorted(stage2.total.carrier["a"][:2])


# -- relation_two -------------------------------------------------------------


def test_rule_two_empty_at_stage_zero():
    sketch = iso_sketch()
    assert relation_two(initial_stage(iso_fixture(sketch), sketch), sketch) == {}


def test_rule_two_iso_stage_one_pair():
    sketch = iso_sketch()
    stage1 = elim_stage(initial_stage(iso_fixture(sketch), sketch), sketch, FAITHFUL)
    pairs = relation_two(stage1, sketch)
    w = (tag_base("y"),)
    expected = (tag_free(free_element_id("c0", "t", w)), tag_base(tag_base("y")))
    assert pairs == {"b": (expected,)}


def test_rule_two_binary_stage_one_eight_pairs():
    sketch = binary_sketch()
    stage1 = elim_stage(initial_stage(binary_fixture(sketch), sketch), sketch, FAITHFUL)
    pairs = relation_two(stage1, sketch)
    assert set(pairs) == {"a"}
    assert len(pairs["a"]) == 8
    for free_elem, base_elem in pairs["a"]:
        assert free_elem.startswith(f"{FREE_TAG}:")
        assert base_elem in (tag_base(tag_base("u")), tag_base(tag_base("v")))


def test_rule_two_empty_when_free_part_empty():
    sketch = iso_sketch()
    trace = reflect_elim(iso_fixture(sketch), sketch, budget=8, mode=PRUNED)
    final = trace.stages[-1]
    assert final.free.size() == {"a": 0, "b": 0}
    assert relation_two(final, sketch) == {}


# -- elim_stage ---------------------------------------------------------------


def test_stage_one_sizes_iso():
    sketch = iso_sketch()
    stage1 = elim_stage(initial_stage(iso_fixture(sketch), sketch), sketch, FAITHFUL)
    assert stage1.base.size() == {"a": 1, "b": 1}
    assert stage1.total.size() == {"a": 2, "b": 2}


def test_model_input_is_a_fixpoint():
    sketch = iso_sketch()
    stage0 = initial_stage(iso_model(sketch), sketch)
    assert relation_one(stage0, sketch) == {}
    stage1 = elim_stage(stage0, sketch, PRUNED)
    assert stage1.free.size() == {"a": 0, "b": 0}
    assert stage1.base.size() == iso_model(sketch).size()


def test_binary_pruned_stage_two_reaches_fixpoint():
    sketch = binary_sketch()
    stage1 = elim_stage(initial_stage(binary_fixture(sketch), sketch), sketch, PRUNED)
    stage2 = elim_stage(stage1, sketch, PRUNED)
    assert stage2.base.size() == {"a": 2, "p": 4}
    assert stage2.free.size() == {"a": 0, "p": 0}


# -- reflect_elim -------------------------------------------------------------


def test_model_converges_at_stage_zero_with_identity_reflection():
    sketch = iso_sketch()
    model = iso_model(sketch)
    trace = reflect_elim(model, sketch, budget=4)
    assert trace.converged and trace.converged_at == 0
    assert trace.rho is not None
    for obj in sketch.base.objects:
        assert trace.rho.components[obj] == {x: x for x in model.carrier[obj]}


def test_iso_converges_within_spec_bounds():
    sketch = iso_sketch()
    pruned = reflect_elim(iso_fixture(sketch), sketch, budget=8, mode=PRUNED)
    faithful = reflect_elim(iso_fixture(sketch), sketch, budget=8, mode=FAITHFUL)
    assert pruned.converged and pruned.converged_at <= 2
    assert faithful.converged and faithful.converged_at <= 3
    assert pruned.core.size() == faithful.core.size() == {"a": 1, "b": 1}


def test_binary_pruned_converges_with_bijective_gap():
    sketch = binary_sketch()
    trace = reflect_elim(binary_fixture(sketch), sketch, budget=8, mode=PRUNED)
    assert trace.converged and trace.converged_at == 2
    assert trace.core.size() == {"a": 2, "p": 4}
    gm = gap_map(trace.core, sketch.cones[0])
    assert len(set(gm.values())) == 4


def test_budget_zero_returns_stage_zero_trace():
    sketch = iso_sketch()
    trace = reflect_elim(iso_fixture(sketch), sketch, budget=0)
    assert trace.verdict == "budget-exhausted"
    assert len(trace.stages) == 1 and trace.core is None


def test_reflection_map_is_natural_and_lands_in_core():
    sketch = sheaf_sketch()
    trace = reflect_elim(sheaf_fixture(sketch), sketch, budget=8, mode=PRUNED)
    assert trace.converged
    assert trace.rho.validate().ok
    for obj in sketch.base.objects:
        assert set(trace.rho.components[obj].values()) <= set(trace.core.carrier[obj])


# -- structural invariants ------------------------------------------------------


def _stage_invariants(trace, sketch):
    for stage in trace.stages:
        for obj in sketch.base.objects:
            tagged = set(stage.total.carrier[obj])
            base_part = {tag_base(x) for x in stage.base.carrier[obj]}
            free_part = {tag_free(x) for x in stage.free.carrier[obj]}
            assert tagged == base_part | free_part
            assert not (base_part & free_part)
        if stage.index >= 1:
            assert stage.p_prev is not None
            for obj in sketch.base.objects:
                assert set(stage.p_prev[obj].values()) == set(stage.base.carrier[obj])
        for name, arrow in sketch.base.arrows.items():
            for fid in stage.free.carrier[arrow.dom]:
                cone, t, w = stage.free_prov[fid]
                composed = sketch.base.compose(name, t)
                assert stage.free.action[name][fid] == free_element_id(cone, composed, w)


def test_stage_invariants_on_all_fixtures():
    cases = [
        (iso_sketch(), iso_fixture()),
        (binary_sketch(), binary_fixture()),
        (binary_sketch(), binary_collapsed_fixture()),
        (sheaf_sketch(), sheaf_fixture()),
    ]
    for sketch, pres in cases:
        for mode in (FAITHFUL, PRUNED):
            budget = 3 if mode == FAITHFUL else 8
            trace = reflect_elim(pres, sketch, budget=budget, mode=mode)
            _stage_invariants(trace, sketch)


def test_idempotence_of_the_reflector():
    for sketch, pres in (
        (iso_sketch(), iso_fixture()),
        (binary_sketch(), binary_fixture()),
        (sheaf_sketch(), sheaf_fixture()),
    ):
        core = reflect_elim(pres, sketch, budget=8, mode=PRUNED).core
        again = reflect_elim(core, sketch, budget=2)
        assert again.converged_at == 0
        assert is_model(core, sketch).is_model


def test_traces_are_byte_identical_across_runs():
    sketch = binary_sketch()
    one = reflect_elim(binary_fixture(sketch), sketch, budget=8, mode=PRUNED).dumps()
    two = reflect_elim(binary_fixture(sketch), sketch, budget=8, mode=PRUNED).dumps()
    assert one == two


def test_relation_generators_are_deterministic():
    sketch = binary_sketch()
    stage1 = elim_stage(initial_stage(binary_fixture(sketch), sketch), sketch, FAITHFUL)
    assert relation_one(stage1, sketch) == relation_one(stage1, sketch)
    assert relation_two(stage1, sketch) == relation_two(stage1, sketch)


def test_stage_element_provenance_view():
    sketch = iso_sketch()
    trace = reflect_elim(iso_fixture(sketch), sketch, budget=8, mode=FAITHFUL)
    stage1 = trace.stages[1]
    for tagged in stage1.total.carrier["b"]:
        elem = stage1.element("b", tagged)
        if elem.kind == "free":
            assert elem.cone == "c0"
            assert elem.limit_tuple == (tag_base("y"),)
        else:
            assert elem.base_class == tag_base("y")
