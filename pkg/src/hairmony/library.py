"""Seeded generation of valid hairstyle annotations and the style library.

The shipped library of 480 annotated styles is produced by
``generate_library`` with a fixed seed; regenerating it is byte-stable.
The sampler is deliberately imbalanced (straight hair over-represented,
as typical asset libraries are) so that balancing has something to do.
"""

from __future__ import annotations

import numpy as np

from .taxonomy import (
    BALD_VALUE,
    NA,
    NOT_GATHERED_VALUE,
    HairstyleAnnotation,
    Taxonomy,
)

_TYPE_WEIGHTS = {"Straight": 0.45, "Wavy": 0.25, "Curly": 0.18, "Coily": 0.12}
# Base length indexes into the 11-value Hair Length scale (bald..waist).
_LENGTH_BASE_WEIGHTS = {1: 0.05, 2: 0.08, 3: 0.17, 4: 0.14, 5: 0.16, 6: 0.14, 7: 0.12, 8: 0.08, 9: 0.06}


def _choice(rng: np.random.Generator, weighted: dict) -> object:
    keys = list(weighted.keys())
    probs = np.asarray(list(weighted.values()), dtype=float)
    return keys[int(rng.choice(len(keys), p=probs / probs.sum()))]


def _pick(rng: np.random.Generator, values) -> str:
    return values[int(rng.integers(len(values)))]


def random_annotation(
    tax: Taxonomy,
    rng: np.random.Generator,
    style_id: str = "",
    bald_probability: float = 0.04,
) -> HairstyleAnnotation:
    """Draw one annotation that satisfies every consistency rule."""
    bald = rng.random() < bald_probability

    g: dict[str, str] = {}
    if bald:
        g["Bangs Style"] = "None"
    else:
        bangs_values = tax.attribute("Bangs Style").values
        g["Bangs Style"] = (
            "None" if rng.random() < 0.55 else _pick(rng, [v for v in bangs_values if v != "None"])
        )
    bangs_length = tax.attribute("Bangs Length")
    g["Bangs Length"] = (
        NA if g["Bangs Style"] == "None" else _pick(rng, [v for v in bangs_length.values if v != NA])
    )
    g["Hair Accessories"] = (
        "None" if rng.random() < 0.8 else _pick(rng, tax.attribute("Hair Accessories").values)
    )
    g["Parting Location"] = _pick(rng, tax.attribute("Parting Location").values)
    g["Hairline Visibility"] = _pick(rng, tax.attribute("Hairline Visibility").values)
    shape_values = list(tax.attribute("Hairline Shape").values)
    position_values = list(tax.attribute("Hairline Position").values)
    if g["Hairline Visibility"] == "Full":
        shape_values = [v for v in shape_values if v != "I don't know"]
        position_values = [v for v in position_values if v != "I don't know"]
    g["Hairline Shape"] = _pick(rng, shape_values)
    g["Hairline Position"] = _pick(rng, position_values)
    g["Surface Appearance"] = _pick(rng, tax.attribute("Surface Appearance").values)
    g["Baby Hair"] = _pick(rng, tax.attribute("Baby Hair").values)
    g["Hair Attribute Varies"] = "Yes" if rng.random() < 0.05 else "No"

    length_values = tax.attribute("Hair Length").values
    regions = tax.regions
    r: dict[str, dict[str, str]] = {}

    if bald:
        for region in regions:
            r[region] = {
                "Hair Type": NA,
                "Strand Styling": NA,
                "Strand Thickness": NA,
                "Hair Gathered": NOT_GATHERED_VALUE,
                "Hair Direction": NA,
                "Hair Length": BALD_VALUE,
                "Layering": NA,
                "Decorative patterns": "None",
            }
        return HairstyleAnnotation(style_id, g, r)

    hair_type = _choice(rng, _TYPE_WEIGHTS)
    styling = (
        "None"
        if rng.random() < 0.72
        else _pick(rng, ["Braids", "Dreadlocks", "Twists/Ringlets", "Other"])
    )
    thickness = (
        NA
        if styling == "None"
        else _pick(rng, [v for v in tax.attribute("Strand Thickness").values if v != NA])
    )
    base_length = int(_choice(rng, _LENGTH_BASE_WEIGHTS))
    direction = _pick(rng, [v for v in tax.attribute("Hair Direction").values if v != NA])
    layering = _pick(rng, [v for v in tax.attribute("Layering").values if v != NA])

    gathered_region = None
    if rng.random() < 0.45 and base_length >= 3:
        gathered_region = _pick(rng, ["Crown", "Nape", "Top"])
    gathered_value = (
        None
        if gathered_region is None
        else _pick(
            rng,
            [
                v
                for v in tax.attribute("Hair Gathered").values
                if v != NOT_GATHERED_VALUE
            ],
        )
    )

    lengths = []
    for _ in regions:
        jitter = int(rng.integers(-1, 2))
        lengths.append(min(9, max(0, base_length + jitter)))
    if all(v == 0 for v in lengths):
        lengths[1] = base_length  # keep at least one region non-bald

    for region, length_idx in zip(regions, lengths):
        r[region] = {
            "Hair Type": hair_type,
            "Strand Styling": styling,
            "Strand Thickness": thickness,
            "Hair Gathered": (
                gathered_value if region == gathered_region else NOT_GATHERED_VALUE
            ),
            "Hair Direction": direction,
            "Hair Length": length_values[length_idx],
            "Layering": layering,
            "Decorative patterns": "Decorated" if rng.random() < 0.06 else "None",
        }
    return HairstyleAnnotation(style_id, g, r)


def generate_library(
    tax: Taxonomy, count: int = 480, seed: int = 20240521
) -> dict[str, HairstyleAnnotation]:
    """Deterministic annotated style library keyed by style_id."""
    rng = np.random.default_rng(seed)
    out = {}
    for i in range(count):
        style_id = f"style_{i:04d}"
        out[style_id] = random_annotation(tax, rng, style_id=style_id)
    return out
