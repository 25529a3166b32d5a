"""Hand-evaluated 8-sample fixture for the fairness report golden test.

Four styles with obvious collated values, eight demographically diverse
samples, and a constant predictor that always answers the straight style.
Every accuracy and fairness cell below was worked out by hand from the
collation rules; the test asserts them before comparing the full report
against the golden file.
"""

from __future__ import annotations

import json

import numpy as np

from hairmony.datastore import Dataset, FeatureStore, SampleRecord, join
from hairmony.taxonomy import Taxonomy

from helpers import build_annotation

CONSTANT_PREDICTION = "style_straight"

# Hand-computed expectations for the constant predictor.
EXPECTED_ACCURACY = {
    "Bald": 0.75,        # misses only the two bald samples
    "Bang Styling": 0.75,  # misses the two fringed ponytail samples
    "Gathered": 0.75,    # misses the two gathered samples
    "Length": 0.25,      # only the two straight samples share Shoulder length
    "Hair Type": 0.25,   # only the two straight samples match
    "Strands": 0.75,     # bald samples collate Strands to N/A
}
EXPECTED_MEAN_ACCURACY = 3.5 / 6
# gender and age split symmetrically except Length/Hair Type by age.
EXPECTED_FAIRNESS = {
    ("Length", "age"): 50.0,
    ("Hair Type", "age"): 50.0,
    ("Bald", "ancestry"): 100.0 * (7.0 / 9.0),
    ("Strands", "ancestry"): 100.0 * (7.0 / 9.0),
    ("Bang Styling", "ancestry"): 100.0 * (2.0 / 3.0),
    ("Gathered", "ancestry"): 100.0 * (2.0 / 3.0),
    ("Length", "ancestry"): 100.0 * (2.0 / 9.0) / (1.0 / 3.0),
    ("Hair Type", "ancestry"): 100.0 * (2.0 / 9.0) / (1.0 / 3.0),
}
EXPECTED_MEAN_FAIRNESS = 13700.0 / 162.0


def fixture_styles(tax: Taxonomy):
    return {
        "style_straight": build_annotation(tax, "style_straight"),
        "style_coily_short": build_annotation(
            tax,
            "style_coily_short",
            all_region_mods={
                "Hair Type": "Coily",
                "Hair Length": "Short (1-5cm, clipper 4-10)",
            },
        ),
        "style_wavy_pony": build_annotation(
            tax,
            "style_wavy_pony",
            global_mods={
                "Bangs Style": "Straight",
                "Bangs Length": "To eyebrows (~10cm)",
            },
            all_region_mods={"Hair Type": "Wavy", "Hair Length": "Armpit length"},
            per_region={"Crown": {"Hair Gathered": "Pony tail, single"}},
        ),
        "style_bald": build_annotation(tax, "style_bald", bald=True),
    }


def fixture_dataset(tax: Taxonomy) -> Dataset:
    rows = [
        ("s1", "style_straight", "Female", "20-29", "White"),
        ("s2", "style_straight", "Male", "20-29", "Black"),
        ("s3", "style_coily_short", "Female", "30-39", "Black"),
        ("s4", "style_coily_short", "Male", "30-39", "White"),
        ("s5", "style_wavy_pony", "Female", "20-29", "East Asian"),
        ("s6", "style_wavy_pony", "Male", "30-39", "East Asian"),
        ("s7", "style_bald", "Male", "20-29", "White"),
        ("s8", "style_bald", "Female", "30-39", "Black"),
    ]
    samples = [
        SampleRecord(sid, style, {"gender": g, "age": a, "ancestry": c})
        for sid, style, g, a, c in rows
    ]
    features = FeatureStore(
        ids=tuple(r[0] for r in rows),
        vectors=np.zeros((len(rows), 4), dtype=np.float32),
    )
    return join(features, samples, fixture_styles(tax))


def canonical_dump(doc: dict) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
