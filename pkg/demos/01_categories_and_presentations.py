"""
Finite categories and set-valued presentations
==============================================

A category is an explicit, validated composition table; a presentation
assigns a finite carrier to each object and a total function to each
arrow.  Everything is ordinary Python data and serializes to JSON.
"""

from limsketch import FinCategory, make_presentation, validate_category
from limsketch.fincat import category_dumps
from limsketch.setops import presentation_dumps, validate_presentation

# The walking arrow t: a -> b, with identities and the full table filled in.
walking = FinCategory.build("walking", ["a", "b"], [("t", "a", "b")], {})
print("objects:", walking.objects)
print("arrows:", sorted(walking.arrows))
print("hom(a, b):", walking.hom("a", "b"))
print("category laws:", validate_category(walking))

# A presentation over it: two points upstairs collapsing to one downstairs.
X = make_presentation(
    walking,
    {"a": ["x1", "x2"], "b": ["y"]},
    {"t": {"x1": "y", "x2": "y"}},
)
print("\ncarriers:", X.size())
print("presentation laws:", validate_presentation(X))

# Both kinds of value round-trip through JSON byte for byte.
print("\ncategory document:")
print(category_dumps(walking))
print("presentation document:")
print(presentation_dumps(X))

# A planted defect is reported with a witness, not silently accepted.
broken = FinCategory.build("walking2", ["a", "b"], [("t", "a", "b")], {})
broken.composition[("t", "id_a")] = "id_b"
report = validate_category(broken)
print("planted unit defect ->", report)
