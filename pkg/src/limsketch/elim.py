"""The staged reflector: free extension, identification rules, convergence.

Each stage holds a quotient-free part E (freshly added limit witnesses)
next to a base part B (everything previously built, quotiented).  The
next base merges the current total S = B + E under two kinds of pairs:

* rule (1) merges elements of S(d) with equal image in the pushout of
  the gap map along an arrow action, forcing gap injectivity;
* rule (2) merges a freshly added witness with the base element it
  rectifies, via their common lift through the previous stage's limits.

The free part of the next stage is rebuilt from the current limits (in
pruned mode, only from tuples the new base does not already hit), and a
run converges either when the stable core of the base is a model or when
the free part dies out on a model base.

Element identifiers carry full provenance.  A base identifier is the
least member of the merged class; a free identifier encodes its cone,
arrow and limit tuple with length-prefixed fields, so no escaping is
needed and identifiers stay unambiguous at any stage depth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import BudgetExceeded, InputError, PreconditionError
from .setops import (
    DEFAULT_TUPLE_BUDGET,
    NatTransSpec,
    SetPresentation,
    disjoint_sum,
    empty_presentation,
    functorial_quotient,
    identity_nat,
    same_fiber_pairs,
    validate_presentation,
)
from .sketchlib import LimitSketch, cone_limit, gap_map, is_model

FAITHFUL = "faithful"
PRUNED = "pruned"
DEFAULT_ELEMENT_CAP = 200_000
DEFAULT_STAGE_BUDGET = 8

BASE_TAG = "B"
FREE_TAG = "E"


def _lp(s: str) -> str:
    return f"{len(s)}:{s}"


def free_element_id(cone_name: str, arrow: str, w: tuple[str, ...]) -> str:
    """Injective, deterministic identifier for a free element."""
    return "F" + _lp(cone_name) + _lp(arrow) + str(len(w)) + "#" + "".join(_lp(c) for c in w)


def tag_base(class_id: str) -> str:
    return f"{BASE_TAG}:{class_id}"


def tag_free(free_id: str) -> str:
    return f"{FREE_TAG}:{free_id}"


@dataclass(frozen=True)
class StageElement:
    """Provenance view of one element of a stage total."""

    kind: str  # "base" | "free"
    obj: str
    base_class: str | None = None
    cone: str | None = None
    arrow: str | None = None
    limit_tuple: tuple[str, ...] | None = None


@dataclass
class Stage:
    """One stage of the staged reflection.

    ``total`` is the tagged disjoint sum of ``base`` and ``free``;
    ``p_prev`` projects the previous total onto this base (absent at
    stage 0); ``limits_prev`` holds the previous stage's full limit sets
    from which ``free`` was carved; ``prev_classes`` lists the members of
    each base class.
    """

    index: int
    base: SetPresentation
    free: SetPresentation
    total: SetPresentation
    free_prov: dict[str, tuple[str, str, tuple[str, ...]]]
    limits_prev: dict[str, tuple[tuple[str, ...], ...]]
    kan_unit: dict[str, dict[tuple[str, ...], str]]
    p_prev: dict[str, dict[str, str]] | None = None
    prev_total: SetPresentation | None = None
    prev_classes: dict[str, dict[str, tuple[str, ...]]] | None = None
    rule1: dict[str, tuple[tuple[str, str], ...]] = field(default_factory=dict)
    rule2: dict[str, tuple[tuple[str, str], ...]] = field(default_factory=dict)

    def element(self, obj: str, tagged_id: str) -> StageElement:
        if tagged_id.startswith(f"{BASE_TAG}:"):
            return StageElement("base", obj, base_class=tagged_id[len(BASE_TAG) + 1 :])
        if tagged_id.startswith(f"{FREE_TAG}:"):
            fid = tagged_id[len(FREE_TAG) + 1 :]
            cone, arrow, w = self.free_prov[fid]
            return StageElement("free", obj, cone=cone, arrow=arrow, limit_tuple=w)
        raise InputError(f"untagged stage element {tagged_id!r}")

    def pair_counts(self) -> tuple[int, int]:
        one = sum(len(v) for v in self.rule1.values())
        two = sum(len(v) for v in self.rule2.values())
        return one, two


@dataclass
class ReflectionTrace:
    """The full staged record of one reflection run."""

    mode: str
    sketch: LimitSketch
    stages: list[Stage]
    verdict: str  # "converged" | "budget-exhausted"
    converged_at: int | None
    core: SetPresentation | None
    rho: NatTransSpec | None
    core_kind: str | None = None  # "model-input" | "stable-core" | "base-fixpoint"

    @property
    def converged(self) -> bool:
        return self.verdict == "converged"

    def to_json_dict(self) -> dict:
        stages = []
        for st in self.stages:
            r1, r2 = st.pair_counts()
            stages.append(
                {
                    "index": st.index,
                    "base": {o: list(st.base.carrier[o]) for o in st.base.base.objects},
                    "free": {o: list(st.free.carrier[o]) for o in st.free.base.objects},
                    "total": {o: list(st.total.carrier[o]) for o in st.total.base.objects},
                    "p": None
                    if st.p_prev is None
                    else {o: dict(sorted(st.p_prev[o].items())) for o in sorted(st.p_prev)},
                    "rule1": r1,
                    "rule2": r2,
                }
            )
        return {
            "engine": "elim",
            "mode": self.mode,
            "verdict": self.verdict,
            "converged_at": self.converged_at,
            "core_kind": self.core_kind,
            "stages": stages,
            "core": None
            if self.core is None
            else {o: list(self.core.carrier[o]) for o in self.core.base.objects},
            "rho": None
            if self.rho is None
            else {o: dict(sorted(self.rho.components[o].items())) for o in sorted(self.rho.components)},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def initial_stage(pres: SetPresentation, sketch: LimitSketch) -> Stage:
    report = validate_presentation(pres)
    if not report.ok:
        raise InputError(f"invalid presentation: {report.violations[0]}")
    if pres.base != sketch.base:
        raise InputError("presentation is not over the sketch category")
    empty = empty_presentation(sketch.base)
    total, _, _ = disjoint_sum(pres, empty, tags=(BASE_TAG, FREE_TAG))
    return Stage(
        index=0,
        base=pres,
        free=empty,
        total=total,
        free_prov={},
        limits_prev={},
        kan_unit={},
    )


def relation_one(
    stage: Stage,
    sketch: LimitSketch,
) -> dict[str, tuple[tuple[str, str], ...]]:
    """Rule (1) pairs: equal images in the pushout of the gap map along t.

    For every cone c, object d and arrow t from the cone peak to d, two
    elements of S(d) are paired when the pushout of the gap map of S at c
    along the action of t maps them to one point.  Only elements reached
    from the shared peak can merge, so the pushout is explored from the
    peak carrier alone.
    """
    base = sketch.base
    total = stage.total
    out: dict[str, set[tuple[str, str]]] = {d: set() for d in base.objects}
    for cone in sketch.cones:
        gm = gap_map(total, cone)
        for d in base.objects:
            for t in base.hom(cone.peak, d):
                act = total.action[t]
                for pair in same_fiber_pairs(gm, act, total.carrier[d]):
                    out[d].add(pair)
    return {d: tuple(sorted(out[d])) for d in base.objects if out[d]}


def relation_two(
    stage: Stage,
    sketch: LimitSketch,
) -> dict[str, tuple[tuple[str, str], ...]]:
    """Rule (2) pairs: a free witness against the base element it rectifies.

    For a cone c, shape object z, arrow t out of the diagram image of z
    and limit tuple w of the previous stage, the free element carried by
    the composite t . leg_z over w is paired with the projection of the
    t-action of the z-component of w.  In pruned mode the free element
    may have been skipped, in which case no pair is emitted.
    """
    if stage.index < 1:
        return {}
    if stage.prev_total is None or stage.p_prev is None:
        raise PreconditionError("relation_two needs the previous stage")
    base = sketch.base
    prev = stage.prev_total
    proj = stage.p_prev
    present = {d: set(stage.total.carrier[d]) for d in base.objects}
    out: dict[str, set[tuple[str, str]]] = {d: set() for d in base.objects}
    for cone in sketch.cones:
        tuples = stage.limits_prev.get(cone.name, ())
        order = cone.shape_order()
        for z_idx, z in enumerate(order):
            zobj = cone.diagram.on_object(z)
            leg = cone.legs[z]
            for d in base.objects:
                for t in base.hom(zobj, d):
                    t_leg = base.compose(t, leg)
                    act = prev.action[t]
                    for w in tuples:
                        free_tagged = tag_free(free_element_id(cone.name, t_leg, w))
                        if free_tagged not in present[d]:
                            continue
                        base_tagged = tag_base(proj[d][act[w[z_idx]]])
                        out[d].add((free_tagged, base_tagged))
    return {d: tuple(sorted(out[d])) for d in base.objects if out[d]}


@dataclass
class FreeStep:
    free: SetPresentation
    prov: dict[str, tuple[str, str, tuple[str, ...]]]
    limits: dict[str, tuple[tuple[str, ...], ...]]
    kan_unit_raw: dict[str, dict[tuple[str, ...], str]]


def e_step(
    stage: Stage,
    sketch: LimitSketch,
    mode: str = FAITHFUL,
    next_base: SetPresentation | None = None,
    next_p: dict[str, dict[str, str]] | None = None,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
    max_elements: int = DEFAULT_ELEMENT_CAP,
) -> FreeStep:
    """Build the next free part from the current stage's limits.

    Faithful mode adds one element per (cone, arrow out of the peak,
    limit tuple).  Pruned mode drops a tuple when its projection into the
    next base already lies in that base's gap image, which keeps the
    transient population from growing without changing the reflection up
    to isomorphism; this requires ``next_base`` and ``next_p``.
    """
    if mode not in (FAITHFUL, PRUNED):
        raise InputError(f"unknown mode {mode!r}")
    base = sketch.base
    limits: dict[str, tuple[tuple[str, ...], ...]] = {}
    kept: dict[str, tuple[tuple[str, ...], ...]] = {}
    for cone in sketch.cones:
        try:
            tuples = cone_limit(stage.total, cone, max_tuples=max_tuples)
        except BudgetExceeded as exc:
            raise BudgetExceeded(f"stage {stage.index + 1}: {exc}") from None
        limits[cone.name] = tuples
        if mode == FAITHFUL:
            kept[cone.name] = tuples
            continue
        if next_base is None or next_p is None:
            raise PreconditionError("pruned e_step needs the next base and projection")
        gap_image = set(gap_map(next_base, cone).values())
        order = cone.shape_order()
        objs = [cone.diagram.on_object(z) for z in order]
        selected = []
        for w in tuples:
            pushed = tuple(next_p[objs[i]][w[i]] for i in range(len(order)))
            if pushed not in gap_image:
                selected.append(w)
        kept[cone.name] = tuple(selected)

    carrier: dict[str, list[str]] = {d: [] for d in base.objects}
    prov: dict[str, tuple[str, str, tuple[str, ...]]] = {}
    kan_unit_raw: dict[str, dict[tuple[str, ...], str]] = {}
    for cone in sketch.cones:
        unit: dict[tuple[str, ...], str] = {}
        for d in base.objects:
            for t in base.hom(cone.peak, d):
                for w in kept[cone.name]:
                    fid = free_element_id(cone.name, t, w)
                    prov[fid] = (cone.name, t, w)
                    carrier[d].append(fid)
                    if t == base.identities[cone.peak]:
                        unit[w] = fid
        kan_unit_raw[cone.name] = unit
    for d in base.objects:
        if len(carrier[d]) > max_elements:
            raise BudgetExceeded(
                f"free part at stage {stage.index + 1} object {d!r} has "
                f"{len(carrier[d])} elements (cap {max_elements})"
            )
    action: dict[str, dict[str, str]] = {}
    for name, arrow in base.arrows.items():
        mapping: dict[str, str] = {}
        for fid in carrier[arrow.dom]:
            cone_name, t, w = prov[fid]
            composed = base.compose(name, t)
            mapping[fid] = free_element_id(cone_name, composed, w)
        action[name] = mapping
    free = SetPresentation(
        base, {d: tuple(sorted(carrier[d])) for d in base.objects}, action
    )
    return FreeStep(free, prov, limits, kan_unit_raw)


def elim_stage(
    stage: Stage,
    sketch: LimitSketch,
    mode: str = FAITHFUL,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
    max_elements: int = DEFAULT_ELEMENT_CAP,
) -> Stage:
    """One full step: quotient the total, then re-extend freely."""
    pairs1 = relation_one(stage, sketch)
    pairs2 = relation_two(stage, sketch)
    merged: dict[str, list[tuple[str, str]]] = {}
    for source in (pairs1, pairs2):
        for d, pairs in source.items():
            merged.setdefault(d, []).extend(pairs)
    quotient = functorial_quotient(stage.total, merged)
    step = e_step(
        stage,
        sketch,
        mode,
        next_base=quotient.target,
        next_p=quotient.projection,
        max_tuples=max_tuples,
        max_elements=max_elements,
    )
    total, _, _ = disjoint_sum(quotient.target, step.free, tags=(BASE_TAG, FREE_TAG))
    for d in sketch.base.objects:
        if len(total.carrier[d]) > max_elements:
            raise BudgetExceeded(
                f"stage {stage.index + 1} object {d!r} has "
                f"{len(total.carrier[d])} elements (cap {max_elements})"
            )
    kan_unit = {
        cone: {w: tag_free(fid) for w, fid in units.items()}
        for cone, units in step.kan_unit_raw.items()
    }
    return Stage(
        index=stage.index + 1,
        base=quotient.target,
        free=step.free,
        total=total,
        free_prov=step.prov,
        limits_prev=step.limits,
        kan_unit=kan_unit,
        p_prev=quotient.projection,
        prev_total=stage.total,
        prev_classes=quotient.classes,
        rule1=pairs1,
        rule2=pairs2,
    )


def _subpresentation(pres: SetPresentation, keep: dict[str, tuple[str, ...]]) -> SetPresentation:
    carrier = {o: tuple(sorted(keep.get(o, ()))) for o in pres.base.objects}
    kept = {o: set(carrier[o]) for o in pres.base.objects}
    action: dict[str, dict[str, str]] = {}
    for name, arrow in pres.base.arrows.items():
        mapping: dict[str, str] = {}
        for x in carrier[arrow.dom]:
            y = pres.action[name][x]
            if y not in kept[arrow.cod]:
                raise PreconditionError(
                    f"subfunctor not closed: {name!r} sends {x!r} outside"
                )
            mapping[x] = y
        action[name] = mapping
    return SetPresentation(pres.base, carrier, action)


def _core_class_ids(stage: Stage) -> dict[str, tuple[str, ...]]:
    """Classes of the base that contain at least one previous-base member."""
    assert stage.prev_classes is not None
    out: dict[str, tuple[str, ...]] = {}
    prefix = f"{BASE_TAG}:"
    for d in stage.base.base.objects:
        out[d] = tuple(
            sorted(
                k
                for k in stage.base.carrier[d]
                if any(m.startswith(prefix) for m in stage.prev_classes[d][k])
            )
        )
    return out


def _core_stable(
    prev_core: dict[str, tuple[str, ...]],
    stage: Stage,
    core: dict[str, tuple[str, ...]],
) -> bool:
    """Is the projection restricted to the previous core a bijection onto the core?"""
    assert stage.p_prev is not None
    for d, prev_ids in prev_core.items():
        images = [stage.p_prev[d][tag_base(k)] for k in prev_ids]
        if len(set(images)) != len(images):
            return False
        if sorted(set(images)) != list(core.get(d, ())):
            return False
    for d in core:
        if d not in prev_core:
            return False
    return True


def reflect_elim(
    pres: SetPresentation,
    sketch: LimitSketch,
    budget: int = DEFAULT_STAGE_BUDGET,
    mode: str = PRUNED,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
    max_elements: int = DEFAULT_ELEMENT_CAP,
) -> ReflectionTrace:
    """Iterate the staged construction until a model core stabilizes.

    Convergence is declared when either (a) the core of the new base (the
    classes reached from the previous base) is carried bijectively from
    the previous core and is a model, or (b) the free part is empty while
    the whole base is a model.  Exhausting the stage budget returns the
    trace with a "budget-exhausted" verdict rather than failing.
    """
    if mode not in (FAITHFUL, PRUNED):
        raise InputError(f"unknown mode {mode!r}")
    if budget < 0:
        raise InputError("budget must be >= 0")
    stage0 = initial_stage(pres, sketch)
    stages = [stage0]
    if is_model(pres, sketch, max_tuples=max_tuples).is_model:
        return ReflectionTrace(
            mode,
            sketch,
            stages,
            "converged",
            0,
            pres,
            identity_nat(pres),
            core_kind="model-input",
        )
    prev_core = {d: tuple(pres.carrier[d]) for d in sketch.base.objects}
    core_pres: SetPresentation | None = None
    converged_at: int | None = None
    core_kind: str | None = None
    for _ in range(budget):
        stage = elim_stage(
            stages[-1], sketch, mode, max_tuples=max_tuples, max_elements=max_elements
        )
        stages.append(stage)
        core_ids = _core_class_ids(stage)
        if _core_stable(prev_core, stage, core_ids):
            candidate = _subpresentation(stage.base, core_ids)
            if is_model(candidate, sketch, max_tuples=max_tuples).is_model:
                core_pres = candidate
                converged_at = stage.index
                core_kind = "stable-core"
                break
        if all(not stage.free.carrier[d] for d in sketch.base.objects):
            if is_model(stage.base, sketch, max_tuples=max_tuples).is_model:
                core_pres = stage.base
                converged_at = stage.index
                core_kind = "base-fixpoint"
                break
        prev_core = core_ids
    if core_pres is None:
        return ReflectionTrace(mode, sketch, stages, "budget-exhausted", None, None, None)
    rho_components: dict[str, dict[str, str]] = {}
    for d in sketch.base.objects:
        comp: dict[str, str] = {}
        for x in pres.carrier[d]:
            v = x
            for stage in stages[1 : converged_at + 1]:
                assert stage.p_prev is not None
                v = stage.p_prev[d][tag_base(v)]
            comp[x] = v
        rho_components[d] = comp
    rho = NatTransSpec(pres, core_pres, rho_components)
    return ReflectionTrace(
        mode,
        sketch,
        stages,
        "converged",
        converged_at,
        core_pres,
        rho,
        core_kind=core_kind,
    )
