"""Stage-wise comparison between the staged and the classical construction.

The comparison transformation is built by structural recursion on
provenance: stage 0 is the identity on X, a base class maps through the
already-established image of any member (all members are checked to
agree), and a free element over a limit tuple maps to the class of the
corresponding formal pair in the completion.  Every naturality square
and every stage-commutation square is checked explicitly; a failure is
reported with a witness and never repaired.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .elim import BASE_TAG, FAITHFUL, FREE_TAG, ReflectionTrace
from .errors import EngineError, InputError, PreconditionError
from .kelly import KellyTrace, pair_element_id, tag_sum_pair
from .setops import NatTransSpec, SetPresentation, compose_nat, identity_nat
from .sketchlib import LimitSketch
from .universal import FactorisationResult, solve_factorisation


@dataclass
class AlphaStage:
    index: int
    components: dict[str, dict[str, str]]
    naturality_ok: bool
    commutation_ok: bool
    witness: str | None = None


@dataclass
class AlphaTrace:
    stages: list[AlphaStage]

    @property
    def ok(self) -> bool:
        return all(s.naturality_ok and s.commutation_ok for s in self.stages)

    def to_json_dict(self) -> dict:
        return {
            "squares_ok": self.ok,
            "stages": [
                {
                    "index": s.index,
                    "components": {
                        o: dict(sorted(s.components[o].items()))
                        for o in sorted(s.components)
                    },
                    "naturality_ok": s.naturality_ok,
                    "commutation_ok": s.commutation_ok,
                    "witness": s.witness,
                }
                for s in self.stages
            ],
        }


def _check_naturality(
    source: SetPresentation,
    target: SetPresentation,
    components: dict[str, dict[str, str]],
) -> str | None:
    base = source.base
    for name, arrow in sorted(base.arrows.items()):
        for x in source.carrier[arrow.dom]:
            left = target.action[name][components[arrow.dom][x]]
            right = components[arrow.cod][source.action[name][x]]
            if left != right:
                return f"naturality breaks at arrow {name!r} on {x!r}"
    return None


def build_alpha(
    elim_trace: ReflectionTrace,
    kelly_trace: KellyTrace,
    sketch: LimitSketch,
    stage_budget: int | None = None,
) -> AlphaTrace:
    """Construct and check the stage comparison for faithful stages.

    The staged trace must be faithful (pruned stages drop free elements
    the completion still carries) and the completion trace must provide
    at least as many stages as are compared.
    """
    if elim_trace.mode != FAITHFUL:
        raise PreconditionError("alpha comparison needs a faithful staged trace")
    x_elim = elim_trace.stages[0].base
    if x_elim != kelly_trace.start:
        raise InputError("the two traces start from different presentations")
    depth = len(elim_trace.stages) - 1
    if stage_budget is not None:
        depth = min(depth, stage_budget)
    if len(kelly_trace.stages) < depth:
        raise InputError(
            f"completion trace has {len(kelly_trace.stages)} stages, need {depth}"
        )
    base = sketch.base
    cones = {c.name: c for c in sketch.cones}

    # Stage 0: identity on X up to the base tag.
    components = {
        d: {f"{BASE_TAG}:{x}": x for x in x_elim.carrier[d]} for d in base.objects
    }
    stages = [
        AlphaStage(
            0,
            components,
            _check_naturality(elim_trace.stages[0].total, kelly_trace.object_at(0), components)
            is None,
            True,
        )
    ]
    for i in range(1, depth + 1):
        stage = elim_trace.stages[i]
        kelly_step = kelly_trace.stages[i - 1].step
        prev_alpha = stages[-1].components
        unit = kelly_step.unit.components
        proj = kelly_step.quotient.projection
        target = kelly_trace.object_at(i)
        comp: dict[str, dict[str, str]] = {d: {} for d in base.objects}
        witness: str | None = None
        assert stage.prev_classes is not None and stage.p_prev is not None
        for d in base.objects:
            for class_id, members in stage.prev_classes[d].items():
                images = {unit[d][prev_alpha[d][m]] for m in members}
                if len(images) != 1:
                    raise EngineError(
                        f"alpha construction failed: class {class_id!r} at {d!r} "
                        f"has inconsistent images {sorted(images)}"
                    )
                comp[d][f"{BASE_TAG}:{class_id}"] = images.pop()
            for fid in stage.free.carrier[d]:
                cone_name, t, w = stage.free_prov[fid]
                cone = cones[cone_name]
                order = cone.shape_order()
                imaged = tuple(
                    prev_alpha[cone.diagram.on_object(z)][w[k]]
                    for k, z in enumerate(order)
                )
                pid = pair_element_id(cone_name, t, imaged)
                tagged = tag_sum_pair(pid)
                if tagged not in proj[d]:
                    raise EngineError(
                        f"alpha construction failed: pair {pid!r} missing in the "
                        f"completion sum at {d!r}"
                    )
                comp[d][f"{FREE_TAG}:{fid}"] = proj[d][tagged]
        nat_witness = _check_naturality(stage.total, target, comp)
        commutation_ok = True
        for d in base.objects:
            for x in elim_trace.stages[i - 1].total.carrier[d]:
                left = comp[d][f"{BASE_TAG}:{stage.p_prev[d][x]}"]
                right = unit[d][prev_alpha[d][x]]
                if left != right:
                    commutation_ok = False
                    witness = f"stage {i}: square breaks at {d!r} on {x!r}"
                    break
            if not commutation_ok:
                break
        stages.append(
            AlphaStage(
                i,
                comp,
                nat_witness is None,
                commutation_ok,
                witness or nat_witness,
            )
        )
    return AlphaTrace(stages)


@dataclass
class IsoVerdict:
    ok: bool
    forward: FactorisationResult
    backward: FactorisationResult
    detail: str = ""

    def to_json_dict(self) -> dict:
        return {"isomorphic": self.ok, "detail": self.detail}


def reflector_iso_check(
    first: ReflectionTrace | KellyTrace,
    second: ReflectionTrace | KellyTrace,
    sketch: LimitSketch,
) -> IsoVerdict:
    """Certify that two converged reflections of one X are isomorphic.

    Each reflection map is factored through the other trace; the verdict
    holds when the two factorisations compose to identities both ways.
    """
    for trace in (first, second):
        if not trace.converged or trace.core is None or trace.rho is None:
            raise PreconditionError("reflector comparison needs converged traces")
    forward = solve_factorisation(first, second.rho, second.core, sketch)
    backward = solve_factorisation(second, first.rho, first.core, sketch)
    round_first = compose_nat(backward.g, forward.g)
    round_second = compose_nat(forward.g, backward.g)
    ok_first = round_first.components == identity_nat(first.core).components
    ok_second = round_second.components == identity_nat(second.core).components
    detail = ""
    if not ok_first:
        detail = "backward . forward is not the identity on the first core"
    elif not ok_second:
        detail = "forward . backward is not the identity on the second core"
    return IsoVerdict(ok_first and ok_second, forward, backward, detail)


def comparison_report(alpha: AlphaTrace, iso: IsoVerdict) -> str:
    payload = {"alpha": alpha.to_json_dict(), "reflector_iso": iso.to_json_dict()}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
