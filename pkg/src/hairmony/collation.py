"""Collation v1: reduce 8 regional labels to one per-sample value per metric.

Regional attributes cannot be reported per-region in a compact table, so
they are collated: Hair Length takes the ordinal maximum over regions,
other regional attributes take the modal value over regions (ignoring
``N/A``, ties broken by region order, Front first). Bald and Gathered are
any/all flags, Bang Styling passes the global value through. These rules
are versioned so reports can state which collation produced them.
"""

from __future__ import annotations

from collections import Counter
from typing import Mapping

from .taxonomy import (
    NA,
    NOT_GATHERED_VALUE,
    NOT_VISIBLE_LENGTH,
    HairstyleAnnotation,
    Taxonomy,
    is_bald,
)

COLLATION_VERSION = "collation v1"

METRICS = ("Bald", "Bang Styling", "Gathered", "Length", "Hair Type", "Strands")

# Buckets over the 11-value Hair Length scale, by value index:
# everything up to Ear length is Short, Chin/Shoulder are Medium,
# Armpit through Waist-or-longer are Long. "Hair not visible" has no bucket.
_SHORT_MAX_INDEX = 4
_MEDIUM_MAX_INDEX = 6
_LONG_MAX_INDEX = 9

LENGTH_BUCKETS = ("Short", "Medium", "Long")


def modal_regional_value(tax: Taxonomy, ann: HairstyleAnnotation, attribute: str) -> str:
    """Most frequent non-N/A value across regions; ties go to the earliest
    region (Front first) holding one of the tied values. All-N/A -> N/A."""
    values = [ann.regional_values[r][attribute] for r in tax.regions]
    counts = Counter(v for v in values if v != NA)
    if not counts:
        return NA
    top = max(counts.values())
    tied = {v for v, c in counts.items() if c == top}
    for v in values:
        if v in tied:
            return v
    raise AssertionError("unreachable: tied value must occur in some region")


def max_regional_length(tax: Taxonomy, ann: HairstyleAnnotation) -> str:
    """Ordinal maximum of regional Hair Length.

    "Hair not visible" is excluded from the maximum (an unseen region says
    nothing about length); it is only returned when every region is unseen.
    """
    attr = tax.attribute("Hair Length")
    values = [ann.regional_values[r]["Hair Length"] for r in tax.regions]
    visible = [v for v in values if v != NOT_VISIBLE_LENGTH]
    if not visible:
        return NOT_VISIBLE_LENGTH
    return max(visible, key=attr.index_of)


def any_region_gathered(tax: Taxonomy, ann: HairstyleAnnotation) -> bool:
    """True when any region's Hair Gathered is anything but not-gathered."""
    return any(
        ann.regional_values[r]["Hair Gathered"] != NOT_GATHERED_VALUE
        for r in tax.regions
    )


def length_bucket(tax: Taxonomy, length_value: str) -> str | None:
    """Map a Hair Length value to Short/Medium/Long; None for 'Hair not visible'."""
    idx = tax.attribute("Hair Length").index_of(length_value)
    if idx <= _SHORT_MAX_INDEX:
        return "Short"
    if idx <= _MEDIUM_MAX_INDEX:
        return "Medium"
    if idx <= _LONG_MAX_INDEX:
        return "Long"
    return None


def collate_attribute(tax: Taxonomy, ann: HairstyleAnnotation, name: str) -> str:
    """One collated value for any taxonomy attribute: globals pass through,
    Hair Length takes the regional maximum, other regionals the modal value."""
    attr = tax.attribute(name)
    if attr.scope == "global":
        return ann.global_values[name]
    if name == "Hair Length":
        return max_regional_length(tax, ann)
    return modal_regional_value(tax, ann, name)


def collate(tax: Taxonomy, ann: HairstyleAnnotation) -> dict:
    """Collated labels for the six reported metrics."""
    return {
        "Bald": is_bald(tax, ann),
        "Bang Styling": ann.global_values["Bangs Style"],
        "Gathered": any_region_gathered(tax, ann),
        "Length": max_regional_length(tax, ann),
        "Hair Type": modal_regional_value(tax, ann, "Hair Type"),
        "Strands": modal_regional_value(tax, ann, "Strand Styling"),
    }


def collated_marginals(
    tax: Taxonomy,
    styles: Mapping[str, HairstyleAnnotation],
    weights: Mapping[str, float] | None = None,
) -> dict[str, dict[str, float]]:
    """Per-attribute value distribution induced by per-style weights.

    Covers all 18 attributes using the collation rules above; uniform
    weights when none are given. Each distribution sums to 1 because every
    style contributes its whole weight to exactly one value per attribute.
    """
    if not styles:
        raise ValueError("empty style library")
    if weights is None:
        w = {sid: 1.0 / len(styles) for sid in styles}
    else:
        missing = set(styles) - set(weights)
        if missing:
            raise ValueError(f"weights missing styles: {sorted(missing)[:5]}")
        total = sum(weights[sid] for sid in styles)
        if any(weights[sid] < 0 for sid in styles):
            raise ValueError("negative weight")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total!r}, expected 1")
        w = {sid: weights[sid] for sid in styles}

    names = [a.name for a in tax.global_attributes + tax.regional_attributes]
    table: dict[str, dict[str, float]] = {name: {} for name in names}
    for sid, ann in styles.items():
        for name in names:
            value = collate_attribute(tax, ann, name)
            table[name][value] = table[name].get(value, 0.0) + w[sid]
    return table
