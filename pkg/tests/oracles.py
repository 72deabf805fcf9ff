"""Independent brute-force oracles and seeded instance generators.

These deliberately avoid the engine's own data paths: limits are checked
by filtering the full cartesian product with nested loops, quotients by a
naive merge-and-push fixpoint over explicit partitions, pushouts by a
plain disjoint-set over the literal pair lists.
"""

from __future__ import annotations

import random

from limsketch.fincat import FinCategory
from limsketch.setops import SetPresentation, make_presentation


def brute_limit(shape: FinCategory, diag: SetPresentation) -> set[tuple[str, ...]]:
    """Filter the full product by compatibility, one shape arrow at a time."""
    order = sorted(shape.objects)
    combos: list[tuple[str, ...]] = [()]
    for obj in order:
        combos = [c + (x,) for c in combos for x in diag.carrier.get(obj, ())]
    index = {obj: i for i, obj in enumerate(order)}
    out: set[tuple[str, ...]] = set()
    for combo in combos:
        good = True
        for name, arrow in shape.arrows.items():
            if shape.is_identity(name):
                continue
            if diag.action[name][combo[index[arrow.dom]]] != combo[index[arrow.cod]]:
                good = False
                break
        if good:
            out.add(combo)
    return out


def naive_quotient_partition(
    pres: SetPresentation,
    pairs: dict[str, list[tuple[str, str]]],
) -> dict[str, set[frozenset[str]]]:
    """Fixpoint of "merge pairs, push merged pairs through all actions"."""
    parts: dict[str, list[set[str]]] = {
        o: [{x} for x in pres.carrier[o]] for o in pres.base.objects
    }

    def merge(obj: str, u: str, v: str) -> bool:
        cu = next(c for c in parts[obj] if u in c)
        cv = next(c for c in parts[obj] if v in c)
        if cu is cv:
            return False
        parts[obj].remove(cv)
        cu |= cv
        return True

    todo = [(o, u, v) for o, ps in pairs.items() for (u, v) in ps]
    changed = True
    while changed:
        changed = False
        for obj, u, v in todo:
            if merge(obj, u, v):
                changed = True
        extra: list[tuple[str, str, str]] = []
        for name, arrow in pres.base.arrows.items():
            act = pres.action[name]
            for cls in parts[arrow.dom]:
                members = sorted(cls)
                for a, b in zip(members, members[1:]):
                    extra.append((arrow.cod, act[a], act[b]))
        todo = todo + extra
    return {o: {frozenset(c) for c in parts[o]} for o in pres.base.objects}


def dsu_partition(elements: list, pairs: list[tuple]) -> set[frozenset]:
    """Plain disjoint-set partition of ``elements`` under literal pairs."""
    parent = {e: e for e in elements}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict = {}
    for e in elements:
        groups.setdefault(find(e), set()).add(e)
    return {frozenset(g) for g in groups.values()}


def model_oracle(pres, sketch) -> bool:
    """Bijectivity of every gap map, checked by inverting it element-wise."""
    from limsketch.sketchlib import restrict_along

    for cone in sketch.cones:
        tuples = brute_limit(cone.shape, restrict_along(pres, cone))
        order = sorted(cone.shape.objects)
        hits: dict[tuple[str, ...], list[str]] = {t: [] for t in tuples}
        for x in pres.carrier[cone.peak]:
            img = tuple(pres.action[cone.legs[z]][x] for z in order)
            hits[img].append(x)
        if any(len(v) != 1 for v in hits.values()):
            return False
    return True


# -- seeded random instances -------------------------------------------------


def shape_pool() -> list[FinCategory]:
    empty = FinCategory.build("sh_empty", [], [], {})
    one = FinCategory.build("sh_one", ["z"], [], {})
    discrete2 = FinCategory.build("sh_disc2", ["z1", "z2"], [], {})
    cospan = FinCategory.build(
        "sh_cospan", ["l", "m", "r"], [("lm", "l", "m"), ("rm", "r", "m")], {}
    )
    span = FinCategory.build(
        "sh_span", ["l", "m", "r"], [("ml", "m", "l"), ("mr", "m", "r")], {}
    )
    parallel = FinCategory.build(
        "sh_par", ["s", "t"], [("u1", "s", "t"), ("u2", "s", "t")], {}
    )
    chain = FinCategory.build(
        "sh_chain",
        ["x", "y", "z"],
        [("xy", "x", "y"), ("yz", "y", "z"), ("xz", "x", "z")],
        {("yz", "xy"): "xz"},
    )
    return [empty, one, discrete2, cospan, span, parallel, chain]


def random_presentation(
    rng: random.Random, base: FinCategory, max_size: int = 20
) -> SetPresentation:
    carrier = {
        o: [f"{o}e{i}" for i in range(rng.randint(0, max_size))] for o in base.objects
    }
    action: dict[str, dict[str, str]] = {}
    for name, arrow in base.arrows.items():
        if base.is_identity(name):
            continue
        cod = carrier[arrow.cod]
        if not cod and carrier[arrow.dom]:
            # a total function needs a nonempty codomain
            cod.append(f"{arrow.cod}e0")
    for name, arrow in base.arrows.items():
        if base.is_identity(name):
            continue
        action[name] = {x: rng.choice(carrier[arrow.cod]) for x in carrier[arrow.dom]}
    return make_presentation(base, carrier, action)


def random_functorial_base(rng: random.Random) -> FinCategory:
    pool = [
        FinCategory.build("rb_arrow", ["a", "b"], [("t", "a", "b")], {}),
        FinCategory.build(
            "rb_par", ["a", "b"], [("t1", "a", "b"), ("t2", "a", "b")], {}
        ),
        FinCategory.build(
            "rb_chain",
            ["a", "b", "c"],
            [("ab", "a", "b"), ("bc", "b", "c"), ("ac", "a", "c")],
            {("bc", "ab"): "ac"},
        ),
    ]
    return rng.choice(pool)


def random_pairs(
    rng: random.Random, pres: SetPresentation, count: int = 4
) -> dict[str, list[tuple[str, str]]]:
    out: dict[str, list[tuple[str, str]]] = {}
    objs = [o for o in pres.base.objects if len(pres.carrier[o]) >= 2]
    for _ in range(count):
        if not objs:
            break
        o = rng.choice(objs)
        u, v = rng.sample(list(pres.carrier[o]), 2)
        out.setdefault(o, []).append((u, v))
    return out
