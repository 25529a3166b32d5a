#!/usr/bin/env python3
"""Walk through the taxonomy: schema, validation, and label vectors.

Run from the repo root: python3 demos/01_taxonomy_basics.py
"""

from hairmony import (
    flatten_labels,
    load_canonical_taxonomy,
    unflatten_labels,
    validate_annotation,
)
from hairmony.taxonomy import HairstyleAnnotation, read_annotations

tax = load_canonical_taxonomy()

print("The taxonomy describes a hairstyle with", tax.num_slots, "label slots:")
print(" ", len(tax.global_attributes), "whole-style attributes")
print(" ", len(tax.regional_attributes), "attributes on each of", len(tax.regions), "scalp regions")
print()

print("Scalp regions:", ", ".join(tax.regions))
print()
print("Hair Type values:", ", ".join(tax.attribute("Hair Type").values))
print("Hair Length values:")
for value in tax.attribute("Hair Length").values:
    print("   -", value)
print()

library = read_annotations("data/styles.v1.jsonl")
print("The shipped style library holds", len(library), "annotated styles.")
style = library["style_0003"]
print("style_0003 front region:", dict(style.regional_values["Front"]))
print()

# Consistency rules catch contradictory labelings. Claim a bangs length
# while Bangs Style says there are no bangs:
doc = style.to_dict()
doc["global"]["Bangs Style"] = "None"
doc["global"]["Bangs Length"] = "To eyebrows (~10cm)"
broken = HairstyleAnnotation.from_dict(doc)
for violation in validate_annotation(tax, broken):
    print("violation:", violation.rule_id, "at", violation.path)
    print("  ", violation.message)
print()

# Annotations flatten to fixed-length index vectors for the model heads,
# and the flattening is invertible.
vec = flatten_labels(tax, style)
print("label vector (first 10 slots):", vec.labels[:10])
assert unflatten_labels(tax, vec.labels, style.style_id) == style
print("flatten -> unflatten reproduces the annotation exactly")
