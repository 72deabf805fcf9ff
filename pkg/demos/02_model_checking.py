"""
Sketches, gap maps, and the model checker
=========================================

A limit sketch is a category plus chosen cones.  A presentation is a
model exactly when every cone's gap map (peak carrier -> compatible
tuples over the diagram) is a bijection; the checker names a witness
for every failure.
"""

from limsketch import (
    cone_limit,
    gap_map,
    is_model,
    make_presentation,
    sketch_binary_product,
    sketch_two_cover_sheaf,
    terminal_presentation,
)

sketch = sketch_binary_product()
cone = sketch.cones[0]
print("sketch:", sketch.name, "cone peak:", cone.peak)

# The square of a two-element set, with its projections: a model.
pairs = ["uu", "uv", "vu", "vv"]
square = make_presentation(
    sketch.base,
    {"a": ["u", "v"], "p": pairs},
    {"pi1": {p: p[0] for p in pairs}, "pi2": {p: p[1] for p in pairs}},
)
print("limit tuples:", cone_limit(square, cone))
print("gap map:", gap_map(square, cone))
print("square is a model:", is_model(square, sketch).is_model)

# Remove the witnesses and surjectivity fails, with the first unhit tuple.
empty_peak = make_presentation(
    sketch.base, {"a": ["u"], "p": []}, {"pi1": {}, "pi2": {}}
)
report = is_model(empty_peak, sketch)
check = report.checks[0]
print("\nempty peak is a model:", report.is_model)
print("unhit tuple:", check.unhit_tuple)

# The terminal presentation is a model for any sketch.
sheaf = sketch_two_cover_sheaf()
print("\nterminal presentation is a sheaf:", is_model(terminal_presentation(sheaf.base), sheaf).is_model)

# The sheaf condition concretely: each matching family over the cover
# needs exactly one global section.  Two sections with the same
# restrictions break injectivity of the gap map.
sections = make_presentation(
    sheaf.base,
    {"T": ["s", "s_dup"], "U": ["0", "1"], "V": ["0", "1"], "W": ["0", "1"]},
    {
        "tu": {"s": "0", "s_dup": "0"},
        "tv": {"s": "0", "s_dup": "0"},
        "tw": {"s": "0", "s_dup": "0"},
        "uw": {"0": "0", "1": "1"},
        "vw": {"0": "0", "1": "1"},
    },
)
report = is_model(sections, sheaf)
print("duplicated section forms a sheaf:", report.is_model)
print("merged pair:", report.checks[0].injectivity_witness)
print("missing family:", report.checks[0].unhit_tuple)
