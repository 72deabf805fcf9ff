"""Finite categories, functors and their validators.

A category is stored as a total, explicit composition table over string
identifiers; nothing is derived from generators at lookup time.  All
iteration happens in lexicographic identifier order so that every
construction built on top of a category is reproducible byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InputError


@dataclass(frozen=True)
class Arrow:
    name: str
    dom: str
    cod: str


@dataclass
class Violation:
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.detail}"


@dataclass
class ValidationReport:
    """A list of violated laws with witnesses; empty means valid."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, detail: str) -> None:
        self.violations.append(Violation(rule, detail))

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


@dataclass
class FinCategory:
    """An explicit finite category.

    ``composition`` maps ``(g, f)`` to ``g after f`` and must contain an
    entry for exactly the composable pairs (``cod(f) == dom(g)``),
    identities included.  Instances are treated as immutable after
    construction.
    """

    objects: tuple[str, ...]
    arrows: dict[str, Arrow]
    identities: dict[str, str]
    composition: dict[tuple[str, str], str]
    name: str = field(default="", compare=False)

    @classmethod
    def build(
        cls,
        name: str,
        objects: list[str],
        arrows: list[tuple[str, str, str]],
        compose: dict[tuple[str, str], str] | None = None,
    ) -> "FinCategory":
        """Assemble a category from non-identity generators.

        ``arrows`` lists ``(name, dom, cod)`` for the non-identity arrows and
        ``compose`` gives their composites; identity arrows ``id_<obj>`` and
        all unit-law table entries are filled in automatically.
        """
        objs = tuple(sorted(objects))
        arrow_map: dict[str, Arrow] = {}
        identities: dict[str, str] = {}
        for o in objs:
            ident = f"id_{o}"
            if any(a[0] == ident for a in arrows):
                raise InputError(f"arrow name {ident!r} collides with an identity")
            arrow_map[ident] = Arrow(ident, o, o)
            identities[o] = ident
        for aname, dom, cod in arrows:
            if aname in arrow_map:
                raise InputError(f"duplicate arrow name {aname!r}")
            if dom not in objs or cod not in objs:
                raise InputError(f"arrow {aname!r} uses unknown object")
            arrow_map[aname] = Arrow(aname, dom, cod)
        table: dict[tuple[str, str], str] = {}
        for f in arrow_map.values():
            table[(identities[f.cod], f.name)] = f.name
            table[(f.name, identities[f.dom])] = f.name
        for (g, f), gf in (compose or {}).items():
            for nm in (g, f, gf):
                if nm not in arrow_map:
                    raise InputError(f"compose table names unknown arrow {nm!r}")
            table[(g, f)] = gf
        return cls(objs, arrow_map, identities, table, name=name)

    # -- lookups ---------------------------------------------------------

    def arrow(self, name: str) -> Arrow:
        try:
            return self.arrows[name]
        except KeyError:
            raise InputError(f"unknown arrow {name!r}") from None

    def identity(self, obj: str) -> str:
        try:
            return self.identities[obj]
        except KeyError:
            raise InputError(f"unknown object {obj!r}") from None

    def compose(self, g: str, f: str) -> str:
        """Return ``g after f``; both must be composable arrows."""
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise InputError(f"no composite for ({g!r}, {f!r})") from None

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        """Arrows from ``a`` to ``b`` in lexicographic order."""
        if a not in self.objects or b not in self.objects:
            raise InputError(f"unknown object in hom({a!r}, {b!r})")
        return tuple(
            sorted(n for n, ar in self.arrows.items() if ar.dom == a and ar.cod == b)
        )

    def is_identity(self, arrow_name: str) -> bool:
        a = self.arrow(arrow_name)
        return self.identities.get(a.dom) == arrow_name and a.dom == a.cod


def hom(category: FinCategory, a: str, b: str) -> tuple[str, ...]:
    return category.hom(a, b)


def validate_category(category: FinCategory) -> ValidationReport:
    """Check every category law exhaustively and report violations."""
    report = ValidationReport()
    objs = set(category.objects)
    for name, arrow in sorted(category.arrows.items()):
        if name != arrow.name:
            report.add("arrow-key", f"arrow {name!r} stored under wrong key")
        if arrow.dom not in objs:
            report.add("arrow-dom", f"arrow {name!r} has unknown domain {arrow.dom!r}")
        if arrow.cod not in objs:
            report.add("arrow-cod", f"arrow {name!r} has unknown codomain {arrow.cod!r}")
    for obj in category.objects:
        ident = category.identities.get(obj)
        if ident is None:
            report.add("identity-missing", f"object {obj!r} has no identity")
            continue
        arrow = category.arrows.get(ident)
        if arrow is None:
            report.add("identity-missing", f"identity {ident!r} of {obj!r} not an arrow")
        elif arrow.dom != obj or arrow.cod != obj:
            report.add(
                "identity-endpoints",
                f"identity {ident!r} of {obj!r} has endpoints {arrow.dom!r}->{arrow.cod!r}",
            )

    arrows = category.arrows
    table = category.composition
    for (g, f), gf in sorted(table.items()):
        if g not in arrows or f not in arrows or gf not in arrows:
            report.add("compose-unknown", f"entry ({g!r},{f!r})->{gf!r} names unknown arrow")
            continue
        if arrows[f].cod != arrows[g].dom:
            report.add("compose-shape", f"entry ({g!r},{f!r}) is not composable")
        else:
            if arrows[gf].dom != arrows[f].dom or arrows[gf].cod != arrows[g].cod:
                report.add(
                    "compose-endpoints",
                    f"({g!r},{f!r})->{gf!r} has endpoints "
                    f"{arrows[gf].dom!r}->{arrows[gf].cod!r}",
                )
    for g in sorted(arrows):
        for f in sorted(arrows):
            if arrows[f].cod != arrows[g].dom:
                continue
            if (g, f) not in table:
                report.add("compose-partial", f"composable pair ({g!r},{f!r}) has no entry")
    for f in sorted(arrows.values(), key=lambda a: a.name):
        left = table.get((category.identities.get(f.cod, ""), f.name))
        if left is not None and left != f.name:
            report.add("unit-left", f"compose(id_{f.cod}, {f.name!r}) = {left!r}")
        right = table.get((f.name, category.identities.get(f.dom, "")))
        if right is not None and right != f.name:
            report.add("unit-right", f"compose({f.name!r}, id_{f.dom}) = {right!r}")
    # Associativity over every composable triple; built-in categories are
    # small enough that the cubic loop is immediate.
    for h in sorted(arrows):
        for g in sorted(arrows):
            if arrows[g].cod != arrows[h].dom or (h, g) not in table:
                continue
            for f in sorted(arrows):
                if arrows[f].cod != arrows[g].dom:
                    continue
                if (g, f) not in table:
                    continue
                gf = table[(g, f)]
                hg = table[(h, g)]
                left = table.get((h, gf))
                right = table.get((hg, f))
                if left is None or right is None or left != right:
                    report.add(
                        "associativity",
                        f"h={h!r} g={g!r} f={f!r}: {left!r} != {right!r}",
                    )
    return report


@dataclass
class CatFunctor:
    """A functor between explicit finite categories."""

    source: FinCategory
    target: FinCategory
    object_map: dict[str, str]
    arrow_map: dict[str, str]

    def on_object(self, obj: str) -> str:
        try:
            return self.object_map[obj]
        except KeyError:
            raise InputError(f"functor undefined on object {obj!r}") from None

    def on_arrow(self, arrow_name: str) -> str:
        try:
            return self.arrow_map[arrow_name]
        except KeyError:
            raise InputError(f"functor undefined on arrow {arrow_name!r}") from None


def validate_functor(functor: CatFunctor) -> ValidationReport:
    """Check functor laws (totality, endpoints, identities, composition)."""
    report = ValidationReport()
    src, tgt = functor.source, functor.target
    for obj in src.objects:
        img = functor.object_map.get(obj)
        if img is None:
            report.add("object-map-partial", f"no image for object {obj!r}")
        elif img not in tgt.objects:
            report.add("object-map-range", f"object {obj!r} maps to unknown {img!r}")
    for name in sorted(src.arrows):
        img = functor.arrow_map.get(name)
        if img is None:
            report.add("arrow-map-partial", f"no image for arrow {name!r}")
            continue
        if img not in tgt.arrows:
            report.add("arrow-map-range", f"arrow {name!r} maps to unknown {img!r}")
            continue
        a = src.arrows[name]
        b = tgt.arrows[img]
        if functor.object_map.get(a.dom) != b.dom or functor.object_map.get(a.cod) != b.cod:
            report.add("endpoint", f"arrow {name!r} image {img!r} breaks dom/cod")
    for obj in src.objects:
        ident = src.identities[obj]
        img = functor.arrow_map.get(ident)
        want = tgt.identities.get(functor.object_map.get(obj, ""), None)
        if img is not None and want is not None and img != want:
            report.add("identity-preservation", f"id of {obj!r} maps to {img!r}")
    for (g, f), gf in sorted(src.composition.items()):
        ig, iff, igf = (functor.arrow_map.get(x) for x in (g, f, gf))
        if None in (ig, iff, igf):
            continue
        want = tgt.composition.get((ig, iff))
        if want != igf:
            report.add(
                "composition-preservation",
                f"F({g!r} . {f!r}) = {igf!r} but F{g!r} . F{f!r} = {want!r}",
            )
    return report


def identity_functor(category: FinCategory) -> CatFunctor:
    return CatFunctor(
        category,
        category,
        {o: o for o in category.objects},
        {a: a for a in category.arrows},
    )


# -- JSON interchange ------------------------------------------------------

_CATEGORY_FIELDS = {"objects", "arrows", "identities", "compose"}


def category_to_json_dict(category: FinCategory) -> dict:
    return {
        "objects": sorted(category.objects),
        "arrows": [
            {"id": a.name, "dom": a.dom, "cod": a.cod}
            for a in sorted(category.arrows.values(), key=lambda x: x.name)
        ],
        "identities": dict(sorted(category.identities.items())),
        "compose": [
            {"g": g, "f": f, "gf": gf}
            for (g, f), gf in sorted(category.composition.items())
        ],
    }


def category_from_json_dict(data: dict, name: str = "") -> FinCategory:
    if not isinstance(data, dict):
        raise InputError("category document must be a JSON object")
    unknown = set(data) - _CATEGORY_FIELDS
    if unknown:
        raise InputError(f"unknown category fields: {sorted(unknown)}")
    missing = _CATEGORY_FIELDS - set(data)
    if missing:
        raise InputError(f"missing category fields: {sorted(missing)}")
    arrows: dict[str, Arrow] = {}
    for rec in data["arrows"]:
        if set(rec) != {"id", "dom", "cod"}:
            raise InputError(f"bad arrow record {rec!r}")
        if rec["id"] in arrows:
            raise InputError(f"duplicate arrow {rec['id']!r}")
        arrows[rec["id"]] = Arrow(rec["id"], rec["dom"], rec["cod"])
    compose: dict[tuple[str, str], str] = {}
    for rec in data["compose"]:
        if set(rec) != {"g", "f", "gf"}:
            raise InputError(f"bad compose record {rec!r}")
        key = (rec["g"], rec["f"])
        if key in compose:
            raise InputError(f"duplicate compose entry {key!r}")
        compose[key] = rec["gf"]
    return FinCategory(
        tuple(sorted(data["objects"])),
        arrows,
        dict(data["identities"]),
        compose,
        name=name,
    )


def category_dumps(category: FinCategory) -> str:
    return json.dumps(category_to_json_dict(category), sort_keys=True, indent=2) + "\n"


def category_loads(text: str, name: str = "") -> FinCategory:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"category JSON parse error: {exc}") from None
    return category_from_json_dict(data, name=name)
