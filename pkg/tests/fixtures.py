"""Shared desk-scale fixtures for the three sketch families."""

from __future__ import annotations

from limsketch.setops import NatTransSpec, SetPresentation, make_presentation
from limsketch.sketchlib import (
    LimitSketch,
    sketch_binary_product,
    sketch_iso_forcing,
    sketch_two_cover_sheaf,
)


def iso_sketch() -> LimitSketch:
    return sketch_iso_forcing()


def iso_fixture(sketch: LimitSketch | None = None) -> SetPresentation:
    s = sketch or iso_sketch()
    return make_presentation(
        s.base, {"a": ["x1", "x2"], "b": ["y"]}, {"t": {"x1": "y", "x2": "y"}}
    )


def iso_model(sketch: LimitSketch | None = None) -> SetPresentation:
    s = sketch or iso_sketch()
    return make_presentation(s.base, {"a": ["m"], "b": ["n"]}, {"t": {"m": "n"}})


def binary_sketch() -> LimitSketch:
    return sketch_binary_product()


def binary_fixture(sketch: LimitSketch | None = None) -> SetPresentation:
    s = sketch or binary_sketch()
    return make_presentation(s.base, {"a": ["u", "v"], "p": []}, {"pi1": {}, "pi2": {}})


def binary_model(sketch: LimitSketch | None = None) -> SetPresentation:
    """The square of a two-element set with its projections."""
    s = sketch or binary_sketch()
    pairs = [f"{x}{y}" for x in "uv" for y in "uv"]
    return make_presentation(
        s.base,
        {"a": ["u", "v"], "p": pairs},
        {"pi1": {p: p[0] for p in pairs}, "pi2": {p: p[1] for p in pairs}},
    )


def binary_collapsed_fixture(sketch: LimitSketch | None = None) -> SetPresentation:
    """Two witnesses over one point: gap map fails injectivity only."""
    s = sketch or binary_sketch()
    return make_presentation(
        s.base,
        {"a": ["u"], "p": ["q0", "q1"]},
        {"pi1": {"q0": "u", "q1": "u"}, "pi2": {"q0": "u", "q1": "u"}},
    )


def binary_singleton_model(sketch: LimitSketch | None = None) -> SetPresentation:
    s = sketch or binary_sketch()
    return make_presentation(
        s.base, {"a": ["u"], "p": ["q"]}, {"pi1": {"q": "u"}, "pi2": {"q": "u"}}
    )


def sheaf_sketch() -> LimitSketch:
    return sketch_two_cover_sheaf()


def sheaf_fixture(sketch: LimitSketch | None = None) -> SetPresentation:
    s = sketch or sheaf_sketch()
    return make_presentation(
        s.base,
        {"T": [], "U": ["0", "1"], "V": ["0", "1"], "W": ["0", "1"]},
        {
            "tu": {},
            "tv": {},
            "tw": {},
            "uw": {"0": "0", "1": "1"},
            "vw": {"0": "0", "1": "1"},
        },
    )


def sheaf_model(sketch: LimitSketch | None = None) -> SetPresentation:
    """Sections glued from the matching pairs of the two-element cover."""
    s = sketch or sheaf_sketch()
    return make_presentation(
        s.base,
        {"T": ["s0", "s1"], "U": ["0", "1"], "V": ["0", "1"], "W": ["0", "1"]},
        {
            "tu": {"s0": "0", "s1": "1"},
            "tv": {"s0": "0", "s1": "1"},
            "tw": {"s0": "0", "s1": "1"},
            "uw": {"0": "0", "1": "1"},
            "vw": {"0": "0", "1": "1"},
        },
    )


def nat(source: SetPresentation, target: SetPresentation, components) -> NatTransSpec:
    full = {o: dict(components.get(o, {})) for o in source.base.objects}
    spec = NatTransSpec(source, target, full)
    assert spec.validate().ok, str(spec.validate())
    return spec
