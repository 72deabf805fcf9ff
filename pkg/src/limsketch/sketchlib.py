"""Cones, limit sketches, the model checker and built-in sketch builders.

A sketch is an explicit finite category together with an ordered list of
cones.  A presentation is a model exactly when, for every cone, the gap
map from the peak carrier to the set of compatible tuples over the cone
diagram is a bijection; the checker reports a witness for each failure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import BudgetExceeded, InputError
from .fincat import (
    CatFunctor,
    FinCategory,
    ValidationReport,
    category_from_json_dict,
    category_to_json_dict,
    validate_category,
    validate_functor,
)
from .setops import (
    DEFAULT_TUPLE_BUDGET,
    SetPresentation,
    limit_of_diagram,
)


@dataclass
class Cone:
    """A cone: peak object, shape category, diagram functor and legs.

    ``legs`` maps each shape object ``z`` to a base arrow
    ``peak -> diagram(z)``; leg naturality (``diagram(u) . leg_z = leg_z'``
    for every shape arrow ``u: z -> z'``) is what :func:`validate_cone`
    checks.
    """

    name: str
    base: FinCategory
    peak: str
    shape: FinCategory
    diagram: CatFunctor
    legs: dict[str, str]

    def shape_order(self) -> tuple[str, ...]:
        """Component order used for every limit tuple of this cone."""
        return tuple(sorted(self.shape.objects))


@dataclass
class LimitSketch:
    base: FinCategory
    cones: tuple[Cone, ...]
    name: str = field(default="", compare=False)

    def cone(self, name: str) -> Cone:
        for c in self.cones:
            if c.name == name:
                return c
        raise InputError(f"unknown cone {name!r}")


def validate_cone(cone: Cone) -> ValidationReport:
    """Check the diagram functor and the leg-naturality equations."""
    report = validate_functor(cone.diagram)
    if cone.peak not in cone.base.objects:
        report.add("peak", f"peak {cone.peak!r} not an object of the base")
    for z in cone.shape.objects:
        leg = cone.legs.get(z)
        if leg is None:
            report.add("leg-missing", f"no leg at shape object {z!r}")
            continue
        arrow = cone.base.arrows.get(leg)
        if arrow is None:
            report.add("leg-unknown", f"leg {leg!r} is not a base arrow")
            continue
        if arrow.dom != cone.peak or arrow.cod != cone.diagram.object_map.get(z):
            report.add(
                "leg-endpoints",
                f"leg at {z!r} runs {arrow.dom!r}->{arrow.cod!r}",
            )
    for name, arrow in sorted(cone.shape.arrows.items()):
        if cone.shape.is_identity(name):
            continue
        leg_src = cone.legs.get(arrow.dom)
        leg_tgt = cone.legs.get(arrow.cod)
        img = cone.diagram.arrow_map.get(name)
        if None in (leg_src, leg_tgt, img):
            continue
        composite = cone.base.composition.get((img, leg_src))
        if composite != leg_tgt:
            report.add(
                "leg-naturality",
                f"shape arrow {name!r}: diagram . leg_{arrow.dom} = "
                f"{composite!r} but leg_{arrow.cod} = {leg_tgt!r}",
            )
    return report


def validate_sketch(sketch: LimitSketch) -> ValidationReport:
    report = validate_category(sketch.base)
    for cone in sketch.cones:
        sub = validate_cone(cone)
        for v in sub.violations:
            report.add(f"cone {cone.name}: {v.rule}", v.detail)
    return report


def restrict_along(pres: SetPresentation, cone: Cone) -> SetPresentation:
    """The composite ``pres . diagram`` as a presentation over the shape."""
    carrier = {z: pres.carrier[cone.diagram.on_object(z)] for z in cone.shape.objects}
    action = {
        a: dict(pres.action[cone.diagram.on_arrow(a)]) for a in cone.shape.arrows
    }
    return SetPresentation(cone.shape, carrier, action)


def cone_limit(
    pres: SetPresentation,
    cone: Cone,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
) -> tuple[tuple[str, ...], ...]:
    """All compatible tuples of ``pres`` over the cone diagram."""
    return limit_of_diagram(
        cone.shape, restrict_along(pres, cone), max_tuples=max_tuples, label=f"cone {cone.name}"
    )


def gap_map(pres: SetPresentation, cone: Cone) -> dict[str, tuple[str, ...]]:
    """The canonical map peak carrier -> limit, sending x to its leg images."""
    order = cone.shape_order()
    legs = [pres.action[cone.legs[z]] for z in order]
    return {x: tuple(act[x] for act in legs) for x in pres.carrier[cone.peak]}


@dataclass
class ConeCheck:
    cone: str
    injective: bool
    surjective: bool
    injectivity_witness: tuple[str, str] | None
    unhit_tuple: tuple[str, ...] | None

    @property
    def ok(self) -> bool:
        return self.injective and self.surjective


@dataclass
class ModelReport:
    checks: list[ConeCheck]

    @property
    def is_model(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "is_model": self.is_model,
            "cones": [
                {
                    "cone": c.cone,
                    "injective": c.injective,
                    "surjective": c.surjective,
                    "injectivity_witness": list(c.injectivity_witness)
                    if c.injectivity_witness
                    else None,
                    "unhit_tuple": list(c.unhit_tuple) if c.unhit_tuple else None,
                }
                for c in self.checks
            ],
        }


def is_model(
    pres: SetPresentation,
    sketch: LimitSketch,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
) -> ModelReport:
    """Check gap-map bijectivity cone by cone, with explicit witnesses."""
    checks: list[ConeCheck] = []
    for cone in sketch.cones:
        tuples = cone_limit(pres, cone, max_tuples=max_tuples)
        gm = gap_map(pres, cone)
        seen: dict[tuple[str, ...], str] = {}
        inj_witness: tuple[str, str] | None = None
        for x in pres.carrier[cone.peak]:
            img = gm[x]
            if img in seen and inj_witness is None:
                inj_witness = (seen[img], x)
            seen.setdefault(img, x)
        unhit: tuple[str, ...] | None = None
        for t in tuples:
            if t not in seen:
                unhit = t
                break
        checks.append(
            ConeCheck(cone.name, inj_witness is None, unhit is None, inj_witness, unhit)
        )
    return ModelReport(checks)


# -- built-in sketches -------------------------------------------------------


def _one_object_shape(name: str = "shape") -> FinCategory:
    return FinCategory.build(name, ["z"], [], {})


def sketch_iso_forcing() -> LimitSketch:
    """Two objects, one arrow t: a -> b; the single cone forces t bijective."""
    base = FinCategory.build("iso_forcing", ["a", "b"], [("t", "a", "b")], {})
    shape = _one_object_shape("iso_shape")
    diagram = CatFunctor(shape, base, {"z": "b"}, {"id_z": "id_b"})
    cone = Cone("c0", base, "a", shape, diagram, {"z": "t"})
    return LimitSketch(base, (cone,), name="iso_forcing")


def sketch_binary_product() -> LimitSketch:
    """Objects a, p with projections; the cone forces p to be a times a."""
    base = FinCategory.build(
        "binary_product", ["a", "p"], [("pi1", "p", "a"), ("pi2", "p", "a")], {}
    )
    shape = FinCategory.build("pair_shape", ["zl", "zr"], [], {})
    diagram = CatFunctor(
        shape, base, {"zl": "a", "zr": "a"}, {"id_zl": "id_a", "id_zr": "id_a"}
    )
    cone = Cone("c0", base, "p", shape, diagram, {"zl": "pi1", "zr": "pi2"})
    return LimitSketch(base, (cone,), name="binary_product")


def sketch_equalizer() -> LimitSketch:
    """Parallel pair f, g: a -> b and e: q -> a; the cone carves the equalizer."""
    base = FinCategory.build(
        "equalizer",
        ["a", "b", "q"],
        [("f", "a", "b"), ("g", "a", "b"), ("e", "q", "a"), ("w", "q", "b")],
        {("f", "e"): "w", ("g", "e"): "w"},
    )
    shape = FinCategory.build(
        "parallel_shape", ["za", "zb"], [("u1", "za", "zb"), ("u2", "za", "zb")], {}
    )
    diagram = CatFunctor(
        shape,
        base,
        {"za": "a", "zb": "b"},
        {"u1": "f", "u2": "g", "id_za": "id_a", "id_zb": "id_b"},
    )
    cone = Cone("c0", base, "q", shape, diagram, {"za": "e", "zb": "w"})
    return LimitSketch(base, (cone,), name="equalizer")


def sketch_two_cover_sheaf() -> LimitSketch:
    """Poset on T, U, V, W; the cone makes T the matching pairs of U and V over W.

    This is the sheaf condition for a two-element cover written by hand:
    the diagram is the cospan U -> W <- V and the legs are the three
    restriction arrows out of T.
    """
    base = FinCategory.build(
        "two_cover",
        ["T", "U", "V", "W"],
        [
            ("tu", "T", "U"),
            ("tv", "T", "V"),
            ("tw", "T", "W"),
            ("uw", "U", "W"),
            ("vw", "V", "W"),
        ],
        {("uw", "tu"): "tw", ("vw", "tv"): "tw"},
    )
    shape = FinCategory.build(
        "cospan_shape",
        ["zU", "zV", "zW"],
        [("zuw", "zU", "zW"), ("zvw", "zV", "zW")],
        {},
    )
    diagram = CatFunctor(
        shape,
        base,
        {"zU": "U", "zV": "V", "zW": "W"},
        {
            "zuw": "uw",
            "zvw": "vw",
            "id_zU": "id_U",
            "id_zV": "id_V",
            "id_zW": "id_W",
        },
    )
    cone = Cone("c0", base, "T", shape, diagram, {"zU": "tu", "zV": "tv", "zW": "tw"})
    return LimitSketch(base, (cone,), name="two_cover_sheaf")


# Generators and relations of the monoid sketch: four objects, thirteen
# arrows, and the commutativity relations that present multiplication,
# unit, and the two product decompositions of the triple object.
MONOID_OBJECTS = ("g0", "g1", "g2", "g3")

MONOID_GENERATORS: tuple[tuple[str, str, str], ...] = (
    ("mu", "g2", "g1"),
    ("eta", "g0", "g1"),
    ("p12_1", "g3", "g1"),
    ("p12_2", "g3", "g2"),
    ("p21_1", "g3", "g1"),
    ("p21_2", "g3", "g2"),
    ("p1", "g2", "g1"),
    ("p2", "g2", "g1"),
    ("mu_up", "g3", "g2"),
    ("mu_dn", "g3", "g2"),
    ("eta_up", "g1", "g2"),
    ("eta_dn", "g1", "g2"),
    ("bang", "g1", "g0"),
)

# Each relation equates two parallel composites, written as generator
# words with the rightmost arrow applied first.  The empty word is the
# identity on the shared endpoint.
MONOID_RELATIONS: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = (
    (("p1", "mu_up"), ("p12_1",)),
    (("p2", "mu_up"), ("mu", "p12_2")),
    (("p1", "mu_dn"), ("p21_1",)),
    (("p2", "mu_dn"), ("mu", "p21_2")),
    (("mu", "mu_dn"), ("mu", "mu_up")),
    (("p1", "eta_up"), ()),
    (("p2", "eta_up"), ("eta", "bang")),
    (("p2", "eta_dn"), ()),
    (("p1", "eta_dn"), ("eta", "bang")),
    (("mu", "eta_dn"), ()),
    (("mu", "eta_up"), ()),
)


def monoid_quiver() -> tuple[tuple[str, str, str], ...]:
    """The thirteen generating arrows of the monoid sketch."""
    return MONOID_GENERATORS


def build_category_budgeted(
    name: str,
    objects: list[str],
    generators: list[tuple[str, str, str]],
    relations: list[tuple[tuple[str, ...], tuple[str, ...]]],
    budget: int,
) -> FinCategory:
    """Materialize a finitely presented category by bounded word rewriting.

    Words are composable generator sequences (rightmost applied first),
    rewritten leftmost-first by the relations oriented shortlex-decreasing.
    The build fails with :class:`BudgetExceeded` unless the set of normal
    forms stops growing strictly below the length budget and is closed
    under composition; no silent guess is ever returned.
    """
    if budget <= 0:
        raise InputError("budget must be positive")
    gen = {g[0]: (g[1], g[2]) for g in generators}

    def endpoints(word: tuple[str, ...]) -> tuple[str, str]:
        return gen[word[-1]][0], gen[word[0]][1]

    def shortlex_key(word: tuple[str, ...]) -> tuple[int, tuple[str, ...]]:
        return (len(word), word)

    rules: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
    for lhs, rhs in relations:
        if shortlex_key(lhs) == shortlex_key(rhs):
            continue
        big, small = (lhs, rhs) if shortlex_key(lhs) > shortlex_key(rhs) else (rhs, lhs)
        rules.append((big, small))
    rules.sort(key=lambda r: shortlex_key(r[0]))

    def reduce_word(word: tuple[str, ...]) -> tuple[str, ...]:
        changed = True
        steps = 0
        while changed:
            changed = False
            steps += 1
            if steps > 10 * budget + 100:
                raise BudgetExceeded(f"rewriting of {word!r} did not terminate in budget")
            for big, small in rules:
                k = len(big)
                for i in range(len(word) - k + 1):
                    if word[i : i + k] == big:
                        word = word[:i] + small + word[i + k :]
                        changed = True
                        break
                if changed:
                    break
        return word

    # Breadth-first enumeration of composable words by length; a level
    # contributing no new normal form ends the search.
    normal: set[tuple[str, ...]] = set()
    frontier: list[tuple[str, ...]] = [(g,) for g in sorted(gen)]
    for word in frontier:
        normal.add(reduce_word(word))
    stabilized_at = None
    for length in range(2, budget + 1):
        new_found = False
        next_frontier: list[tuple[str, ...]] = []
        for word in frontier:
            _, cod = endpoints(word)
            for g in sorted(gen):
                if gen[g][0] != cod:
                    continue
                # word applies first, g last: prepend in composite order
                extended = (g,) + word
                nf = reduce_word(extended)
                if nf not in normal and nf != ():
                    normal.add(nf)
                    new_found = True
                next_frontier.append(extended)
        frontier = next_frontier
        if not new_found:
            stabilized_at = length
            break
    if stabilized_at is None:
        raise BudgetExceeded(
            f"hom-sets not stabilized within budget {budget}: "
            f"{len(normal)} normal forms and still growing"
        )

    arrow_names: dict[tuple[str, ...], str] = {}
    arrows: list[tuple[str, str, str]] = []
    for word in sorted(normal, key=shortlex_key):
        label = ".".join(word)
        dom, cod = endpoints(word)
        arrow_names[word] = label
        arrows.append((label, dom, cod))
    compose: dict[tuple[str, str], str] = {}
    for wg in sorted(normal, key=shortlex_key):
        for wf in sorted(normal, key=shortlex_key):
            if endpoints(wf)[1] != endpoints(wg)[0]:
                continue
            nf = reduce_word(wg + wf)
            if nf == ():
                target = f"id_{endpoints(wf)[0]}"
            else:
                if nf not in arrow_names:
                    raise BudgetExceeded(
                        f"composition escapes the budget {budget}: "
                        f"{wg!r} . {wf!r} reduces to unseen {nf!r}"
                    )
                target = arrow_names[nf]
            compose[(arrow_names[wg], arrow_names[wf])] = target
    category = FinCategory.build(name, objects, arrows, compose)
    report = validate_category(category)
    if not report.ok:
        # Non-confluent rewriting shows up as a broken table; never guess.
        raise BudgetExceeded(
            f"presentation not confluent within budget {budget}: {report.violations[0]}"
        )
    return category


def sketch_monoid_budgeted(budget: int) -> LimitSketch:
    """Materialize the monoid sketch by bounded rewriting.

    The presentation has unbounded hom-sets (words alternating the unit
    and the terminal arrow never reduce), so for every budget this raises
    :class:`BudgetExceeded` rather than returning a truncated category.
    """
    base = build_category_budgeted(
        "monoid",
        list(MONOID_OBJECTS),
        list(MONOID_GENERATORS),
        list(MONOID_RELATIONS),
        budget,
    )
    empty_shape = FinCategory.build("empty_shape", [], [], {})
    cones = [
        Cone(
            "c0",
            base,
            "g0",
            empty_shape,
            CatFunctor(empty_shape, base, {}, {}),
            {},
        )
    ]
    span = FinCategory.build("span_shape", ["zl", "zr"], [], {})
    for idx, (peak, left_leg, right_leg) in enumerate(
        [("g2", "p1", "p2"), ("g3", "p21_1", "p21_2"), ("g3", "p12_1", "p12_2")],
        start=1,
    ):
        left_obj = base.arrows[left_leg].cod
        right_obj = base.arrows[right_leg].cod
        diagram = CatFunctor(
            span,
            base,
            {"zl": left_obj, "zr": right_obj},
            {"id_zl": base.identities[left_obj], "id_zr": base.identities[right_obj]},
        )
        cones.append(Cone(f"c{idx}", base, peak, span, diagram, {"zl": left_leg, "zr": right_leg}))
    return LimitSketch(base, tuple(cones), name="monoid")


BUILDERS = {
    "iso_forcing": sketch_iso_forcing,
    "binary_product": sketch_binary_product,
    "equalizer": sketch_equalizer,
    "two_cover_sheaf": sketch_two_cover_sheaf,
}


def builder_names() -> tuple[str, ...]:
    return tuple(sorted(BUILDERS)) + ("monoid_budgeted",)


def build_sketch(name: str, budget: int = 6) -> LimitSketch:
    if name in BUILDERS:
        return BUILDERS[name]()
    if name == "monoid_budgeted":
        return sketch_monoid_budgeted(budget)
    raise InputError(f"unknown builder {name!r}")


# -- JSON interchange --------------------------------------------------------

_SKETCH_FIELDS = {"category", "cones"}
_CONE_FIELDS = {"peak", "shape", "diagram", "legs"}


def sketch_to_json_dict(sketch: LimitSketch) -> dict:
    cones = []
    for cone in sketch.cones:
        cones.append(
            {
                "peak": cone.peak,
                "shape": category_to_json_dict(cone.shape),
                "diagram": {
                    "objects": dict(sorted(cone.diagram.object_map.items())),
                    "arrows": dict(sorted(cone.diagram.arrow_map.items())),
                },
                "legs": dict(sorted(cone.legs.items())),
            }
        )
    return {"category": category_to_json_dict(sketch.base), "cones": cones}


def sketch_from_json_dict(data: dict, name: str = "") -> LimitSketch:
    if not isinstance(data, dict):
        raise InputError("sketch document must be a JSON object")
    unknown = set(data) - _SKETCH_FIELDS
    if unknown:
        raise InputError(f"unknown sketch fields: {sorted(unknown)}")
    if "category" not in data or "cones" not in data:
        raise InputError("sketch document needs 'category' and 'cones'")
    base = category_from_json_dict(data["category"])
    cones: list[Cone] = []
    for idx, rec in enumerate(data["cones"]):
        if not isinstance(rec, dict):
            raise InputError(f"cone {idx} must be an object")
        unknown = set(rec) - _CONE_FIELDS
        if unknown:
            raise InputError(f"cone {idx}: unknown fields {sorted(unknown)}")
        shape = category_from_json_dict(rec["shape"])
        diag = rec["diagram"]
        if not isinstance(diag, dict) or set(diag) != {"objects", "arrows"}:
            raise InputError(f"cone {idx}: diagram needs exactly 'objects' and 'arrows'")
        diagram = CatFunctor(shape, base, dict(diag["objects"]), dict(diag["arrows"]))
        cones.append(Cone(f"c{idx}", base, rec["peak"], shape, diagram, dict(rec["legs"])))
    sketch = LimitSketch(base, tuple(cones), name=name)
    report = validate_sketch(sketch)
    if not report.ok:
        raise InputError(f"invalid sketch: {report.violations[0]}")
    return sketch


def sketch_dumps(sketch: LimitSketch) -> str:
    return json.dumps(sketch_to_json_dict(sketch), sort_keys=True, indent=2) + "\n"


def sketch_loads(text: str, name: str = "") -> LimitSketch:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"sketch JSON parse error: {exc}") from None
    return sketch_from_json_dict(data, name=name)
