from __future__ import annotations

import pytest

from limsketch.compare import build_alpha, reflector_iso_check
from limsketch.elim import BASE_TAG, FAITHFUL, PRUNED, reflect_elim
from limsketch.errors import PreconditionError
from limsketch.kelly import reflect_kelly

from tests.fixtures import (
    binary_collapsed_fixture,
    binary_fixture,
    binary_sketch,
    iso_fixture,
    iso_model,
    iso_sketch,
    sheaf_fixture,
    sheaf_sketch,
)


def _aligned_traces(pres, sketch, budget=3):
    faithful = reflect_elim(pres, sketch, budget=budget, mode=FAITHFUL)
    depth = len(faithful.stages) - 1
    stages = reflect_kelly(pres, sketch, budget=max(depth, 1), stop_on_convergence=False)
    return faithful, stages


def test_alpha_stage_zero_is_identity():
    sketch = iso_sketch()
    pres = iso_fixture(sketch)
    faithful, stages = _aligned_traces(pres, sketch)
    alpha = build_alpha(faithful, stages, sketch)
    comp0 = alpha.stages[0].components
    for obj in sketch.base.objects:
        for x in pres.carrier[obj]:
            assert comp0[obj][f"{BASE_TAG}:{x}"] == x


def test_alpha_squares_pass_on_iso_faithful_stages():
    sketch = iso_sketch()
    faithful, stages = _aligned_traces(iso_fixture(sketch), sketch)
    assert len(faithful.stages) - 1 == 2
    alpha = build_alpha(faithful, stages, sketch)
    assert [s.index for s in alpha.stages] == [0, 1, 2]
    assert all(s.naturality_ok for s in alpha.stages)
    assert all(s.commutation_ok for s in alpha.stages)


def test_alpha_squares_pass_on_collapsed_binary():
    sketch = binary_sketch()
    faithful, stages = _aligned_traces(binary_collapsed_fixture(sketch), sketch)
    alpha = build_alpha(faithful, stages, sketch)
    assert alpha.ok


def test_alpha_rejects_pruned_traces():
    sketch = iso_sketch()
    pruned = reflect_elim(iso_fixture(sketch), sketch, budget=8, mode=PRUNED)
    stages = reflect_kelly(iso_fixture(sketch), sketch, budget=2, stop_on_convergence=False)
    with pytest.raises(PreconditionError):
        build_alpha(pruned, stages, sketch)


def test_alpha_components_are_total():
    sketch = iso_sketch()
    faithful, stages = _aligned_traces(iso_fixture(sketch), sketch)
    alpha = build_alpha(faithful, stages, sketch)
    for alpha_stage, elim_stage in zip(alpha.stages, faithful.stages):
        for obj in sketch.base.objects:
            assert set(alpha_stage.components[obj]) == set(elim_stage.total.carrier[obj])


def test_reflector_iso_on_all_fixture_families():
    cases = [
        (iso_sketch(), iso_fixture()),
        (binary_sketch(), binary_fixture()),
        (sheaf_sketch(), sheaf_fixture()),
    ]
    for sketch, pres in cases:
        elim_trace = reflect_elim(pres, sketch, budget=8, mode=PRUNED)
        kelly_trace = reflect_kelly(pres, sketch, budget=8)
        verdict = reflector_iso_check(elim_trace, kelly_trace, sketch)
        assert verdict.ok, verdict.detail


def test_reflector_iso_for_model_input_is_transported_identity():
    sketch = iso_sketch()
    model = iso_model(sketch)
    elim_trace = reflect_elim(model, sketch, budget=4)
    kelly_trace = reflect_kelly(model, sketch, budget=4)
    verdict = reflector_iso_check(elim_trace, kelly_trace, sketch)
    assert verdict.ok
    assert verdict.forward.g.components == {
        "a": {"m": "m"}, "b": {"n": "n"}
    }


def test_reflector_iso_requires_converged_traces():
    sketch = iso_sketch()
    unconverged = reflect_elim(iso_fixture(sketch), sketch, budget=0)
    converged = reflect_kelly(iso_fixture(sketch), sketch, budget=4)
    with pytest.raises(PreconditionError):
        reflector_iso_check(unconverged, converged, sketch)


def test_mode_soundness_via_iso_check():
    cases = [
        (iso_sketch(), iso_fixture()),
        (binary_sketch(), binary_collapsed_fixture()),
        (sheaf_sketch(), sheaf_fixture()),
    ]
    for sketch, pres in cases:
        faithful = reflect_elim(pres, sketch, budget=8, mode=FAITHFUL)
        pruned = reflect_elim(pres, sketch, budget=8, mode=PRUNED)
        assert faithful.converged and pruned.converged
        assert reflector_iso_check(faithful, pruned, sketch).ok
