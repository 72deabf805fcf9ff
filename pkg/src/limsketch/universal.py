"""Executable reflection property: construct the factorisation, certify uniqueness.

Given a converged reflection trace for X and a map f from X into a model
M, the factorisation g with g . rho = f is built by replaying the trace:
base classes inherit the (checked) common image of their members, and a
free element over a limit tuple w maps through the inverse of M's gap
map, which exists exactly because M is a model.  Uniqueness is certified
separately by exhausting all natural transformations from the core when
the search space is small enough; the construction never feeds the search.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .elim import BASE_TAG, FREE_TAG, ReflectionTrace
from .errors import EngineError, InputError, PreconditionError
from .kelly import SUM_BASE_TAG, SUM_PAIR_TAG, KellyTrace
from .setops import NatTransSpec, SetPresentation, compose_nat
from .sketchlib import LimitSketch, gap_map, is_model

DEFAULT_ENUM_CAP = 10**6


@dataclass
class FactorisationResult:
    g: NatTransSpec
    commutes: bool
    log: list[dict] = field(default_factory=list)


def _gap_inverses(model: SetPresentation, sketch: LimitSketch) -> dict[str, dict[tuple[str, ...], str]]:
    inverses: dict[str, dict[tuple[str, ...], str]] = {}
    for cone in sketch.cones:
        gm = gap_map(model, cone)
        inv: dict[tuple[str, ...], str] = {}
        for x, t in gm.items():
            if t in inv:
                raise PreconditionError(f"gap map of cone {cone.name!r} is not injective")
            inv[t] = x
        inverses[cone.name] = inv
    return inverses


def _check_model(model: SetPresentation, sketch: LimitSketch, max_tuples: int) -> None:
    report = is_model(model, sketch, max_tuples=max_tuples)
    if not report.is_model:
        bad = next(c for c in report.checks if not c.ok)
        raise PreconditionError(f"not a model: cone {bad.cone!r} gap map not bijective")


def _solve_elim(
    trace: ReflectionTrace,
    f: NatTransSpec,
    model: SetPresentation,
    sketch: LimitSketch,
    inverses: dict[str, dict[tuple[str, ...], str]],
    log: list[dict],
) -> dict[str, dict[str, str]]:
    objects = sketch.base.objects
    cones = {c.name: c for c in sketch.cones}
    # g_tagged maps tagged elements of the current stage total into M.
    g_tagged = {
        d: {f"{BASE_TAG}:{x}": f.components[d][x] for x in trace.stages[0].base.carrier[d]}
        for d in objects
    }
    assert trace.converged_at is not None
    for stage in trace.stages[1 : trace.converged_at + 1]:
        assert stage.prev_classes is not None
        nxt: dict[str, dict[str, str]] = {d: {} for d in objects}
        for d in objects:
            for class_id, members in stage.prev_classes[d].items():
                values = {g_tagged[d][m] for m in members}
                if len(values) != 1:
                    raise EngineError(
                        f"class image conflict at stage {stage.index} object {d!r}: "
                        f"class {class_id!r} maps to {sorted(values)}"
                    )
                nxt[d][f"{BASE_TAG}:{class_id}"] = values.pop()
            for fid in stage.free.carrier[d]:
                cone_name, t, w = stage.free_prov[fid]
                cone = cones[cone_name]
                order = cone.shape_order()
                mvec = tuple(
                    g_tagged[cone.diagram.on_object(z)][w[i]] for i, z in enumerate(order)
                )
                try:
                    u = inverses[cone_name][mvec]
                except KeyError:
                    raise EngineError(
                        f"image tuple {mvec!r} is not hit by the gap map of {cone_name!r}"
                    ) from None
                nxt[d][f"{FREE_TAG}:{fid}"] = model.action[t][u]
                log.append(
                    {
                        "stage": stage.index,
                        "object": d,
                        "free": fid,
                        "tuple": list(mvec),
                        "gap_inverse": u,
                        "arrow": t,
                    }
                )
        g_tagged = nxt
    assert trace.core is not None
    return {
        d: {k: g_tagged[d][f"{BASE_TAG}:{k}"] for k in trace.core.carrier[d]}
        for d in objects
    }


def _solve_kelly(
    trace: KellyTrace,
    f: NatTransSpec,
    model: SetPresentation,
    sketch: LimitSketch,
    inverses: dict[str, dict[tuple[str, ...], str]],
    log: list[dict],
) -> dict[str, dict[str, str]]:
    objects = sketch.base.objects
    cones = {c.name: c for c in sketch.cones}
    g_prev = {d: dict(f.components[d]) for d in objects}
    assert trace.converged_at is not None
    for st in trace.stages[: trace.converged_at]:
        step = st.step
        nxt: dict[str, dict[str, str]] = {d: {} for d in objects}
        for d in objects:
            for class_id, members in step.quotient.classes[d].items():
                values = set()
                for m in members:
                    if m.startswith(f"{SUM_BASE_TAG}:"):
                        values.add(g_prev[d][m[len(SUM_BASE_TAG) + 1 :]])
                    else:
                        pid = m[len(SUM_PAIR_TAG) + 1 :]
                        cone_name, t, w = step.pair_prov[pid]
                        cone = cones[cone_name]
                        order = cone.shape_order()
                        mvec = tuple(
                            g_prev[cone.diagram.on_object(z)][w[i]]
                            for i, z in enumerate(order)
                        )
                        try:
                            u = inverses[cone_name][mvec]
                        except KeyError:
                            raise EngineError(
                                f"image tuple {mvec!r} is not hit by the gap map "
                                f"of {cone_name!r}"
                            ) from None
                        values.add(model.action[t][u])
                        log.append(
                            {
                                "stage": st.index,
                                "object": d,
                                "pair": pid,
                                "tuple": list(mvec),
                                "gap_inverse": u,
                                "arrow": t,
                            }
                        )
                if len(values) != 1:
                    raise EngineError(
                        f"class image conflict at completion stage {st.index} "
                        f"object {d!r}: class {class_id!r} maps to {sorted(values)}"
                    )
                nxt[d][class_id] = values.pop()
        g_prev = nxt
    return g_prev


def solve_factorisation(
    trace: ReflectionTrace | KellyTrace,
    f: NatTransSpec,
    model: SetPresentation,
    sketch: LimitSketch,
    max_tuples: int = 10**6,
) -> FactorisationResult:
    """Construct g with g . rho = f by provenance replay through the trace.

    Accepts either engine's trace; both are extended stage by stage.  The
    returned g is verified to commute with rho and to be natural before
    being handed back; a broken trace surfaces as an error, never as a
    silently wrong g.
    """
    if not trace.converged:
        raise PreconditionError("factorisation needs a converged trace")
    _check_model(model, sketch, max_tuples)
    inverses = _gap_inverses(model, sketch)
    log: list[dict] = []
    if isinstance(trace, ReflectionTrace):
        components = _solve_elim(trace, f, model, sketch, inverses, log)
    else:
        components = _solve_kelly(trace, f, model, sketch, inverses, log)
    assert trace.core is not None and trace.rho is not None
    g = NatTransSpec(trace.core, model, components)
    report = g.validate()
    if not report.ok:
        raise EngineError(f"constructed factorisation is not natural: {report.violations[0]}")
    commutes = compose_nat(g, trace.rho).components == f.components
    if not commutes:
        raise EngineError("constructed factorisation does not commute with the reflection")
    return FactorisationResult(g, commutes, log)


@dataclass
class EnumerationResult:
    status: str  # "ok" | "inconclusive"
    transformations: list[NatTransSpec]
    search_space: int


def _search_space(source: SetPresentation, target: SetPresentation) -> int:
    size = 1
    for d in source.base.objects:
        size *= len(target.carrier[d]) ** len(source.carrier[d])
    return size


def enumerate_nat_trans(
    source: SetPresentation,
    target: SetPresentation,
    cap: int = DEFAULT_ENUM_CAP,
) -> EnumerationResult:
    """All natural transformations source => target, by exhaustive search.

    The candidate space is the product over objects of all component
    functions; above ``cap`` candidates the enumeration refuses and
    reports the computed size instead of guessing.
    """
    if source.base != target.base:
        raise InputError("enumeration needs presentations over one category")
    space = _search_space(source, target)
    if space > cap:
        return EnumerationResult("inconclusive", [], space)
    base = source.base
    objects = [d for d in base.objects if source.carrier[d]]
    per_object: list[list[dict[str, str]]] = []
    for d in objects:
        xs = source.carrier[d]
        choices = list(itertools.product(target.carrier[d], repeat=len(xs)))
        per_object.append([dict(zip(xs, combo)) for combo in choices])
    found: list[NatTransSpec] = []
    for assignment in itertools.product(*per_object):
        components = {d: dict(comp) for d, comp in zip(objects, assignment)}
        for d in base.objects:
            components.setdefault(d, {})
        cand = NatTransSpec(source, target, components)
        if cand.validate().ok:
            found.append(cand)
    return EnumerationResult("ok", found, space)


@dataclass
class UniquenessVerdict:
    status: str  # "unique" | "counterexample" | "inconclusive"
    search_space: int
    witnesses: list[NatTransSpec] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "uniqueness": self.status,
            "search_space": self.search_space,
            "witnesses": [
                {o: dict(sorted(w.components[o].items())) for o in sorted(w.components)}
                for w in self.witnesses
            ],
        }


def check_uniqueness(
    trace: ReflectionTrace | KellyTrace,
    f: NatTransSpec,
    model: SetPresentation,
    sketch: LimitSketch,
    cap: int = DEFAULT_ENUM_CAP,
) -> UniquenessVerdict:
    """Count the natural transformations core => M commuting with rho.

    Exactly one commuting transformation is the "unique" verdict; two or
    more are returned as a counterexample pair; a search space above the
    cap is reported inconclusive.
    """
    if not trace.converged or trace.core is None or trace.rho is None:
        raise PreconditionError("uniqueness check needs a converged trace")
    enum = enumerate_nat_trans(trace.core, model, cap=cap)
    if enum.status == "inconclusive":
        return UniquenessVerdict("inconclusive", enum.search_space)
    commuting = [
        g for g in enum.transformations
        if compose_nat(g, trace.rho).components == f.components
    ]
    if len(commuting) == 1:
        return UniquenessVerdict("unique", enum.search_space, commuting)
    if len(commuting) >= 2:
        return UniquenessVerdict("counterexample", enum.search_space, commuting[:2])
    raise EngineError("no commuting transformation found although one was constructed")


def universal_report(
    result: FactorisationResult | None,
    verdict: UniquenessVerdict,
) -> str:
    payload = {
        "exists": result is not None,
        "commutes": bool(result and result.commutes),
        "uniqueness": verdict.status,
        "search_space": verdict.search_space,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
