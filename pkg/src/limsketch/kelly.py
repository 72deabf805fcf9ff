"""The classical one-step completion and its iteration, as a cross-check.

For one cone the completion of a presentation X is the quotiented sum

    P_c(X)(d) = ( X(d) + hom(peak, d) x X[c] ) / (R0 + R1)

where R0 glues a formal pair (t, gap-image of a) to the actual value
X(t)(a) and R1 glues a pair reached through a leg composite to the
matching tuple component.  The multi-cone step P(X) glues all per-cone
sums along their shared copy of X; since R0 and R1 only ever relate a
formal pair to an X element, this is computed here as one quotient of
X plus all pair summands, which is the wide pushout up to isomorphism
and keeps class identifiers flat for provenance replay.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import InputError
from .setops import (
    DEFAULT_TUPLE_BUDGET,
    NatTransSpec,
    QuotientMap,
    SetPresentation,
    compose_nat,
    functorial_quotient,
    identity_nat,
    validate_presentation,
)
from .sketchlib import Cone, LimitSketch, cone_limit, gap_map, is_model

SUM_BASE_TAG = "X"
SUM_PAIR_TAG = "P"


def _lp(s: str) -> str:
    return f"{len(s)}:{s}"


def pair_element_id(cone_name: str, arrow: str, w: tuple[str, ...]) -> str:
    """Injective identifier for a formal pair (arrow, limit tuple)."""
    return "K" + _lp(cone_name) + _lp(arrow) + str(len(w)) + "#" + "".join(_lp(c) for c in w)


def tag_sum_base(x: str) -> str:
    return f"{SUM_BASE_TAG}:{x}"


def tag_sum_pair(pid: str) -> str:
    return f"{SUM_PAIR_TAG}:{pid}"


@dataclass
class CompletionStep:
    """One application of the completion to a presentation."""

    obj: SetPresentation
    unit: NatTransSpec
    quotient: QuotientMap
    pair_prov: dict[str, tuple[str, str, tuple[str, ...]]]
    r0: dict[str, tuple[tuple[str, str], ...]]
    r1: dict[str, tuple[tuple[str, str], ...]]

    def r_counts(self) -> tuple[int, int]:
        return (
            sum(len(v) for v in self.r0.values()),
            sum(len(v) for v in self.r1.values()),
        )


def _completion(
    pres: SetPresentation,
    cones: tuple[Cone, ...],
    max_tuples: int,
) -> CompletionStep:
    base = pres.base
    limits = {c.name: cone_limit(pres, c, max_tuples=max_tuples) for c in cones}
    carrier: dict[str, list[str]] = {
        d: [tag_sum_base(x) for x in pres.carrier[d]] for d in base.objects
    }
    pair_prov: dict[str, tuple[str, str, tuple[str, ...]]] = {}
    for cone in cones:
        for d in base.objects:
            for t in base.hom(cone.peak, d):
                for w in limits[cone.name]:
                    pid = pair_element_id(cone.name, t, w)
                    pair_prov[pid] = (cone.name, t, w)
                    carrier[d].append(tag_sum_pair(pid))
    action: dict[str, dict[str, str]] = {}
    for name, arrow in base.arrows.items():
        mapping: dict[str, str] = {}
        for x in pres.carrier[arrow.dom]:
            mapping[tag_sum_base(x)] = tag_sum_base(pres.action[name][x])
        for tagged in carrier[arrow.dom]:
            if not tagged.startswith(f"{SUM_PAIR_TAG}:"):
                continue
            pid = tagged[len(SUM_PAIR_TAG) + 1 :]
            cone_name, t, w = pair_prov[pid]
            mapping[tagged] = tag_sum_pair(
                pair_element_id(cone_name, base.compose(name, t), w)
            )
        action[name] = mapping
    sum_pres = SetPresentation(
        base, {d: tuple(sorted(carrier[d])) for d in base.objects}, action
    )

    r0: dict[str, set[tuple[str, str]]] = {d: set() for d in base.objects}
    r1: dict[str, set[tuple[str, str]]] = {d: set() for d in base.objects}
    for cone in cones:
        gm = gap_map(pres, cone)
        order = cone.shape_order()
        for d in base.objects:
            for t in base.hom(cone.peak, d):
                for a in pres.carrier[cone.peak]:
                    r0[d].add(
                        (
                            tag_sum_pair(pair_element_id(cone.name, t, gm[a])),
                            tag_sum_base(pres.action[t][a]),
                        )
                    )
        for z_idx, z in enumerate(order):
            zobj = cone.diagram.on_object(z)
            leg = cone.legs[z]
            for d in base.objects:
                for t in base.hom(zobj, d):
                    t_leg = base.compose(t, leg)
                    for w in limits[cone.name]:
                        r1[d].add(
                            (
                                tag_sum_pair(pair_element_id(cone.name, t_leg, w)),
                                tag_sum_base(pres.action[t][w[z_idx]]),
                            )
                        )
    pairs = {
        d: tuple(sorted(r0[d] | r1[d]))
        for d in base.objects
        if r0[d] or r1[d]
    }
    quotient = functorial_quotient(sum_pres, pairs)
    unit_components = {
        d: {x: quotient.projection[d][tag_sum_base(x)] for x in pres.carrier[d]}
        for d in base.objects
    }
    unit = NatTransSpec(pres, quotient.target, unit_components)
    return CompletionStep(
        quotient.target,
        unit,
        quotient,
        pair_prov,
        {d: tuple(sorted(r0[d])) for d in base.objects if r0[d]},
        {d: tuple(sorted(r1[d])) for d in base.objects if r1[d]},
    )


def kelly_Pc(
    pres: SetPresentation,
    cone: Cone,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
) -> CompletionStep:
    """The one-cone completion with its unit."""
    return _completion(pres, (cone,), max_tuples)


def kelly_P(
    pres: SetPresentation,
    sketch: LimitSketch,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
) -> CompletionStep:
    """The completion over every cone, glued along the shared copy of X."""
    return _completion(pres, sketch.cones, max_tuples)


@dataclass
class KellyStage:
    index: int
    step: CompletionStep

    @property
    def obj(self) -> SetPresentation:
        return self.step.obj


@dataclass
class KellyTrace:
    sketch: LimitSketch
    start: SetPresentation
    stages: list[KellyStage]
    verdict: str  # "converged" | "budget-exhausted"
    converged_at: int | None
    core: SetPresentation | None
    rho: NatTransSpec | None

    @property
    def converged(self) -> bool:
        return self.verdict == "converged"

    def object_at(self, index: int) -> SetPresentation:
        if index == 0:
            return self.start
        return self.stages[index - 1].obj

    def to_json_dict(self) -> dict:
        stages = []
        for st in self.stages:
            r0, r1 = st.step.r_counts()
            stages.append(
                {
                    "index": st.index,
                    "carrier": {o: list(st.obj.carrier[o]) for o in st.obj.base.objects},
                    "unit": {
                        o: dict(sorted(st.step.unit.components[o].items()))
                        for o in sorted(st.step.unit.components)
                    },
                    "r0": r0,
                    "r1": r1,
                }
            )
        return {
            "engine": "kelly",
            "verdict": self.verdict,
            "converged_at": self.converged_at,
            "stages": stages,
            "core": None
            if self.core is None
            else {o: list(self.core.carrier[o]) for o in self.core.base.objects},
            "rho": None
            if self.rho is None
            else {
                o: dict(sorted(self.rho.components[o].items()))
                for o in sorted(self.rho.components)
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def reflect_kelly(
    pres: SetPresentation,
    sketch: LimitSketch,
    budget: int = 8,
    stop_on_convergence: bool = True,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
) -> KellyTrace:
    """Iterate the completion until a model appears (or the budget runs out).

    With ``stop_on_convergence`` off the full ``budget`` worth of stages
    is materialized even past convergence; the comparison machinery uses
    that to line stages up with another trace.
    """
    report = validate_presentation(pres)
    if not report.ok:
        raise InputError(f"invalid presentation: {report.violations[0]}")
    if pres.base != sketch.base:
        raise InputError("presentation is not over the sketch category")
    stages: list[KellyStage] = []
    converged_at: int | None = None
    if is_model(pres, sketch, max_tuples=max_tuples).is_model:
        converged_at = 0
    current = pres
    for n in range(1, budget + 1):
        if converged_at is not None and stop_on_convergence:
            break
        step = kelly_P(current, sketch, max_tuples=max_tuples)
        stages.append(KellyStage(n, step))
        current = step.obj
        if converged_at is None and is_model(current, sketch, max_tuples=max_tuples).is_model:
            converged_at = n
    if converged_at is None:
        return KellyTrace(sketch, pres, stages, "budget-exhausted", None, None, None)
    core = pres if converged_at == 0 else stages[converged_at - 1].obj
    rho = identity_nat(pres)
    for st in stages[:converged_at]:
        rho = compose_nat(st.step.unit, rho)
    return KellyTrace(sketch, pres, stages, "converged", converged_at, core, rho)
