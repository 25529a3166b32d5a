#!/usr/bin/env python3
"""Score predictions for accuracy and demographic fairness.

A deliberately lazy predictor (always the same style) shows how per-group
accuracies diverge and how the mean/max fairness percentage captures it.

Run from the repo root: python3 demos/04_fairness_report.py
"""

import numpy as np

from hairmony.datastore import FeatureStore, SampleRecord, join
from hairmony.evaluation import fairness, render_fairness_table, render_table, report
from hairmony.taxonomy import load_canonical_taxonomy, read_annotations

tax = load_canonical_taxonomy()
library = read_annotations("data/styles.v1.jsonl")

print("fairness({0.8, 0.9, 1.0}) =", fairness({"a": 0.8, "b": 0.9, "c": 1.0}))
print("fairness of equal groups  =", fairness({"F": 0.9, "M": 0.9}))
print()

# A small labeled evaluation set: alternating styles and demographics.
style_ids = list(library)[:6]
genders = ("Female", "Male")
ages = ("20-29", "30-39", "40-49")
ancestries = ("Black", "White", "East Asian", "Indian")
samples = [
    SampleRecord(
        f"e{i:02d}",
        style_ids[i % len(style_ids)],
        {
            "gender": genders[i % 2],
            "age": ages[i % 3],
            "ancestry": ancestries[i % 4],
        },
    )
    for i in range(36)
]
features = FeatureStore(
    ids=tuple(r.sample_id for r in samples),
    vectors=np.zeros((len(samples), 4), dtype=np.float32),
)
dataset = join(features, samples, library)

constant = [style_ids[0]] * len(samples)
doc = report(tax, dataset, constant, label="always-first-style")
perfect = report(tax, dataset, [r.style_id for r in samples], label="oracle")

print(render_table([perfect, doc]))
print(render_fairness_table([doc]))
