"""Concrete limits, quotients, pushouts and sums of finite set-valued data.

Presentations are functors from an explicit finite category to finite
sets: a carrier per object and a total function per arrow.  Limits are
enumerated as compatible tuples, quotients are congruence closures
computed with a disjoint-set forest plus a worklist, and every output is
ordered lexicographically so identical inputs give identical bytes.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import BudgetExceeded, InputError
from .fincat import FinCategory, ValidationReport, category_from_json_dict, category_to_json_dict

DEFAULT_TUPLE_BUDGET = 10**6


@dataclass
class SetPresentation:
    """A functor ``base -> Set`` given by explicit carriers and actions.

    ``carrier`` maps each object to a sorted tuple of element identifiers
    and ``action`` maps each arrow to a total function between the
    corresponding carriers.
    """

    base: FinCategory
    carrier: dict[str, tuple[str, ...]]
    action: dict[str, dict[str, str]]
    name: str = field(default="", compare=False)

    def elements(self, obj: str) -> tuple[str, ...]:
        try:
            return self.carrier[obj]
        except KeyError:
            raise InputError(f"presentation has no carrier for object {obj!r}") from None

    def apply(self, arrow_name: str, element: str) -> str:
        try:
            return self.action[arrow_name][element]
        except KeyError:
            raise InputError(
                f"action of {arrow_name!r} undefined on element {element!r}"
            ) from None

    def size(self) -> dict[str, int]:
        return {o: len(self.carrier[o]) for o in self.base.objects}


def make_presentation(
    base: FinCategory,
    carrier: Mapping[str, Iterable[str]],
    action: Mapping[str, Mapping[str, str]],
    name: str = "",
) -> SetPresentation:
    """Normalize carriers/actions, filling identity actions automatically."""
    carr = {o: tuple(sorted(set(carrier.get(o, ())))) for o in base.objects}
    act: dict[str, dict[str, str]] = {}
    for arrow_name, arrow in base.arrows.items():
        if base.is_identity(arrow_name):
            act[arrow_name] = {x: x for x in carr[arrow.dom]}
        else:
            try:
                given = action[arrow_name]
            except KeyError:
                raise InputError(f"no action given for arrow {arrow_name!r}") from None
            act[arrow_name] = {x: given[x] for x in carr[arrow.dom]}
    return SetPresentation(base, carr, act, name=name)


def empty_presentation(base: FinCategory) -> SetPresentation:
    return SetPresentation(
        base,
        {o: () for o in base.objects},
        {a: {} for a in base.arrows},
    )


def terminal_presentation(base: FinCategory) -> SetPresentation:
    """Every carrier a singleton; a model for any sketch over ``base``."""
    return SetPresentation(
        base,
        {o: ("*",) for o in base.objects},
        {a: {"*": "*"} for a in base.arrows},
    )


def validate_presentation(pres: SetPresentation) -> ValidationReport:
    """Check totality, identity actions and composition of actions."""
    report = ValidationReport()
    base = pres.base
    for obj in base.objects:
        if obj not in pres.carrier:
            report.add("carrier-missing", f"no carrier for {obj!r}")
    for name, arrow in sorted(base.arrows.items()):
        act = pres.action.get(name)
        if act is None:
            report.add("action-missing", f"no action for arrow {name!r}")
            continue
        dom = pres.carrier.get(arrow.dom, ())
        cod = set(pres.carrier.get(arrow.cod, ()))
        for x in dom:
            if x not in act:
                report.add("action-partial", f"{name!r} undefined on {x!r}")
            elif act[x] not in cod:
                report.add("action-range", f"{name!r} sends {x!r} outside the carrier")
        for x in act:
            if x not in dom:
                report.add("action-domain", f"{name!r} defined on foreign {x!r}")
    for obj in base.objects:
        ident = base.identities[obj]
        act = pres.action.get(ident, {})
        for x in pres.carrier.get(obj, ()):
            if act.get(x) != x:
                report.add("identity-action", f"id action moves {x!r} at {obj!r}")
    for (g, f), gf in sorted(base.composition.items()):
        fa = pres.action.get(f, {})
        ga = pres.action.get(g, {})
        gfa = pres.action.get(gf, {})
        for x in pres.carrier.get(base.arrows[f].dom, ()):
            via = ga.get(fa.get(x, ""), None)
            direct = gfa.get(x)
            if via != direct:
                report.add(
                    "action-composition",
                    f"action({gf!r})({x!r}) = {direct!r} but "
                    f"action({g!r})(action({f!r})({x!r})) = {via!r}",
                )
    return report


@dataclass
class NatTransSpec:
    """A natural transformation between presentations over one base."""

    source: SetPresentation
    target: SetPresentation
    components: dict[str, dict[str, str]]

    def at(self, obj: str, element: str) -> str:
        try:
            return self.components[obj][element]
        except KeyError:
            raise InputError(f"component at {obj!r} undefined on {element!r}") from None

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        base = self.source.base
        for obj in base.objects:
            comp = self.components.get(obj)
            if comp is None:
                report.add("component-missing", f"no component at {obj!r}")
                continue
            tgt = set(self.target.carrier.get(obj, ()))
            for x in self.source.carrier.get(obj, ()):
                if x not in comp:
                    report.add("component-partial", f"at {obj!r}: undefined on {x!r}")
                elif comp[x] not in tgt:
                    report.add("component-range", f"at {obj!r}: {x!r} maps outside")
        for name, arrow in sorted(base.arrows.items()):
            src_act = self.source.action.get(name, {})
            tgt_act = self.target.action.get(name, {})
            comp_d = self.components.get(arrow.dom, {})
            comp_c = self.components.get(arrow.cod, {})
            for x in self.source.carrier.get(arrow.dom, ()):
                left = tgt_act.get(comp_d.get(x, ""), None)
                right = comp_c.get(src_act.get(x, ""), None)
                if left != right:
                    report.add(
                        "naturality",
                        f"arrow {name!r} on {x!r}: {left!r} != {right!r}",
                    )
        return report


def identity_nat(pres: SetPresentation) -> NatTransSpec:
    return NatTransSpec(
        pres, pres, {o: {x: x for x in pres.carrier[o]} for o in pres.base.objects}
    )


def compose_nat(second: NatTransSpec, first: NatTransSpec) -> NatTransSpec:
    """Return ``second after first``."""
    comps = {
        o: {x: second.components[o][first.components[o][x]] for x in first.components[o]}
        for o in first.source.base.objects
    }
    return NatTransSpec(first.source, second.target, comps)


# -- limits ----------------------------------------------------------------


def limit_of_diagram(
    shape: FinCategory,
    diag: SetPresentation,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
    label: str = "",
) -> tuple[tuple[str, ...], ...]:
    """Enumerate the limit of ``diag`` as compatible tuples.

    Tuple components follow ``sorted(shape.objects)``.  A tuple is kept
    when every shape arrow carries its source component to its target
    component.  The full cartesian product is budgeted by ``max_tuples``.
    """
    order = sorted(shape.objects)
    size = 1
    for obj in order:
        size *= len(diag.carrier.get(obj, ()))
        if size > max_tuples:
            where = f" at {label}" if label else ""
            raise BudgetExceeded(
                f"limit tuple budget exceeded{where}: product exceeds {max_tuples}"
            )
    index = {obj: i for i, obj in enumerate(order)}
    checks = [
        (index[arrow.dom], index[arrow.cod], diag.action[name])
        for name, arrow in sorted(shape.arrows.items())
        if not shape.is_identity(name)
    ]
    out: list[tuple[str, ...]] = []
    for combo in itertools.product(*(diag.carrier.get(obj, ()) for obj in order)):
        if all(act.get(combo[i]) == combo[j] for i, j, act in checks):
            out.append(combo)
    return tuple(out)


# -- quotients ---------------------------------------------------------------


class _DisjointSet:
    """Union-find with canonical (lexicographically least) representatives."""

    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        parent = self.parent
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        lo, hi = (ra, rb) if ra < rb else (rb, ra)
        self.parent[hi] = lo
        return True


@dataclass
class QuotientMap:
    """A pointwise-surjective natural projection onto a quotient."""

    source: SetPresentation
    target: SetPresentation
    projection: dict[str, dict[str, str]]
    classes: dict[str, dict[str, tuple[str, ...]]]


def functorial_quotient(
    pres: SetPresentation,
    pairs: Mapping[str, Iterable[tuple[str, str]]],
) -> QuotientMap:
    """Quotient by the smallest action-closed equivalence containing ``pairs``.

    Merged pairs are pushed through every arrow action until no merge
    fires (congruence closure); the target carrier at each object is the
    set of classes, named by their least member.
    """
    base = pres.base
    forests = {o: _DisjointSet() for o in base.objects}
    out_arrows: dict[str, list[str]] = {o: [] for o in base.objects}
    for name, arrow in sorted(base.arrows.items()):
        if not base.is_identity(name):
            out_arrows[arrow.dom].append(name)

    work: list[tuple[str, str, str]] = []
    for obj in sorted(pairs):
        carrier = set(pres.carrier.get(obj, ()))
        for u, v in pairs[obj]:
            if u not in carrier or v not in carrier:
                raise InputError(f"pair ({u!r}, {v!r}) outside carrier of {obj!r}")
            work.append((obj, u, v))
    while work:
        obj, u, v = work.pop()
        if not forests[obj].union(u, v):
            continue
        for arrow_name in out_arrows[obj]:
            cod = base.arrows[arrow_name].cod
            act = pres.action[arrow_name]
            work.append((cod, act[u], act[v]))

    projection: dict[str, dict[str, str]] = {}
    classes: dict[str, dict[str, tuple[str, ...]]] = {}
    carrier: dict[str, tuple[str, ...]] = {}
    for obj in base.objects:
        members: dict[str, list[str]] = {}
        proj: dict[str, str] = {}
        for x in pres.carrier[obj]:
            rep = forests[obj].find(x)
            proj[x] = rep
            members.setdefault(rep, []).append(x)
        projection[obj] = proj
        classes[obj] = {rep: tuple(sorted(ms)) for rep, ms in members.items()}
        carrier[obj] = tuple(sorted(members))
    action: dict[str, dict[str, str]] = {}
    for name, arrow in pres.base.arrows.items():
        act = pres.action[name]
        action[name] = {rep: projection[arrow.cod][act[rep]] for rep in carrier[arrow.dom]}
    target = SetPresentation(base, carrier, action)
    return QuotientMap(pres, target, projection, classes)


def pushout_classes(
    f: Mapping[str, object],
    g: Mapping[str, object],
    cod_f: Iterable[object],
    cod_g: Iterable[object],
) -> dict[tuple[str, object], tuple[str, object]]:
    """Partition ``cod_f + cod_g`` by identifying ``f(a)`` with ``g(a)``.

    Elements are tagged ``("f", x)`` / ``("g", y)``; the returned lookup
    sends each tagged element to the least tagged member of its class.
    ``f`` and ``g`` must share the same domain keys.
    """
    if set(f) != set(g):
        raise InputError("pushout legs have different domains")
    parent: dict[tuple[str, object], tuple[str, object]] = {}

    def find(x: tuple[str, object]) -> tuple[str, object]:
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    for a in sorted(f):
        left, right = find(("f", f[a])), find(("g", g[a]))
        if left != right:
            lo, hi = (left, right) if left < right else (right, left)
            parent[hi] = lo
    lookup: dict[tuple[str, object], tuple[str, object]] = {}
    for y in cod_f:
        lookup[("f", y)] = find(("f", y))
    for y in cod_g:
        lookup[("g", y)] = find(("g", y))
    return lookup


def same_fiber_pairs(
    gamma: Mapping[str, object],
    act: Mapping[str, str],
    targets: Iterable[str],
) -> tuple[tuple[str, str], ...]:
    """Pairs of ``targets`` merged by the pushout of ``gamma`` along ``act``.

    Only classes containing at least two target elements matter, so the
    pushout is explored from the shared domain alone; per class a sorted
    chain of pairs is emitted (same closure as all pairs).
    """
    parent: dict[tuple[str, object], tuple[str, object]] = {}

    def find(x: tuple[str, object]) -> tuple[str, object]:
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    for a in sorted(gamma):
        left, right = find(("f", gamma[a])), find(("g", act[a]))
        if left != right:
            lo, hi = (left, right) if left < right else (right, left)
            parent[hi] = lo
    groups: dict[tuple[str, object], list[str]] = {}
    for y in targets:
        groups.setdefault(find(("g", y)), []).append(y)
    pairs: list[tuple[str, str]] = []
    for _, members in sorted(groups.items(), key=lambda kv: kv[1][0]):
        members.sort()
        pairs.extend(zip(members, members[1:]))
    return tuple(sorted(pairs))


def disjoint_sum(
    left: SetPresentation,
    right: SetPresentation,
    tags: tuple[str, str] = ("L", "R"),
) -> tuple[SetPresentation, dict[str, dict[str, str]], dict[str, dict[str, str]]]:
    """Pointwise tagged disjoint union with its two natural injections."""
    if left.base is not right.base and left.base != right.base:
        raise InputError("disjoint_sum requires presentations over the same category")
    ltag, rtag = tags
    if ltag == rtag:
        raise InputError("disjoint_sum tags must differ")
    base = left.base
    carrier: dict[str, tuple[str, ...]] = {}
    inj_left: dict[str, dict[str, str]] = {}
    inj_right: dict[str, dict[str, str]] = {}
    for obj in base.objects:
        inj_left[obj] = {x: f"{ltag}:{x}" for x in left.carrier[obj]}
        inj_right[obj] = {x: f"{rtag}:{x}" for x in right.carrier[obj]}
        carrier[obj] = tuple(
            sorted(list(inj_left[obj].values()) + list(inj_right[obj].values()))
        )
    action: dict[str, dict[str, str]] = {}
    for name, arrow in base.arrows.items():
        mapping: dict[str, str] = {}
        for x, tagged in inj_left[arrow.dom].items():
            mapping[tagged] = inj_left[arrow.cod][left.action[name][x]]
        for x, tagged in inj_right[arrow.dom].items():
            mapping[tagged] = inj_right[arrow.cod][right.action[name][x]]
        action[name] = mapping
    return SetPresentation(base, carrier, action), inj_left, inj_right


# -- JSON interchange --------------------------------------------------------

_PRESENTATION_FIELDS = {"category", "carrier", "action"}


def presentation_to_json_dict(pres: SetPresentation, category: str | dict | None = None) -> dict:
    cat: str | dict = category if category is not None else category_to_json_dict(pres.base)
    return {
        "category": cat,
        "carrier": {o: list(pres.carrier[o]) for o in pres.base.objects},
        "action": {
            a: dict(sorted(pres.action[a].items()))
            for a in sorted(pres.base.arrows)
            if not pres.base.is_identity(a)
        },
    }


def presentation_from_json_dict(
    data: dict,
    base: FinCategory | None = None,
    resolve_category=None,
) -> SetPresentation:
    """Parse a presentation document.

    ``category`` may be an inline category object or a name resolved by
    ``resolve_category``; when ``base`` is supplied the document must
    describe a presentation over that same category.
    """
    if not isinstance(data, dict):
        raise InputError("presentation document must be a JSON object")
    unknown = set(data) - _PRESENTATION_FIELDS
    if unknown:
        raise InputError(f"unknown presentation fields: {sorted(unknown)}")
    if "carrier" not in data or "action" not in data:
        raise InputError("presentation document needs 'carrier' and 'action'")
    cat = base
    cat_field = data.get("category")
    if cat_field is not None:
        if isinstance(cat_field, str):
            if resolve_category is None:
                raise InputError(f"cannot resolve category name {cat_field!r}")
            named = resolve_category(cat_field)
            if named is None:
                raise InputError(f"unknown category name {cat_field!r}")
            cat = named
        elif isinstance(cat_field, dict):
            cat = category_from_json_dict(cat_field)
        else:
            raise InputError("'category' must be a name or an inline object")
        if base is not None and cat != base:
            raise InputError("presentation category differs from the sketch category")
    if cat is None:
        raise InputError("presentation document has no category and none was supplied")
    carrier = data["carrier"]
    action = data["action"]
    if not isinstance(carrier, dict) or not isinstance(action, dict):
        raise InputError("'carrier' and 'action' must be objects")
    for obj in carrier:
        if obj not in cat.objects:
            raise InputError(f"carrier names unknown object {obj!r}")
    for arrow in action:
        if arrow not in cat.arrows:
            raise InputError(f"action names unknown arrow {arrow!r}")
    pres = make_presentation(cat, carrier, action)
    report = validate_presentation(pres)
    if not report.ok:
        raise InputError(f"invalid presentation: {report.violations[0]}")
    return pres


def presentation_dumps(pres: SetPresentation) -> str:
    return json.dumps(presentation_to_json_dict(pres), sort_keys=True, indent=2) + "\n"


def presentation_loads(text: str, base: FinCategory | None = None, resolve_category=None) -> SetPresentation:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"presentation JSON parse error: {exc}") from None
    return presentation_from_json_dict(data, base=base, resolve_category=resolve_category)
