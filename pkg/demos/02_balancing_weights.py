#!/usr/bin/env python3
"""Balance the style library so sampled attributes hit target shares.

Run from the repo root: python3 demos/02_balancing_weights.py
"""

import collections

from hairmony.balancer import balanced_preset, fit_weights, sample, style_target_value
from hairmony.datastore import attribute_marginals
from hairmony.taxonomy import load_canonical_taxonomy, read_annotations

tax = load_canonical_taxonomy()
library = read_annotations("data/styles.v1.jsonl")
targets = balanced_preset()

print("Uniform sampling propagates the library's imbalance:")
uniform = attribute_marginals(tax, library)
for value, share in sorted(uniform["Hair Type"].items()):
    print(f"   Hair Type {value:10s} {share:6.1%}")
print()

fitted = fit_weights(tax, library, targets, tol=1e-8)
print(
    f"IPF converged in {fitted.iterations_used} iterations; "
    f"max residual {max(fitted.residuals.values()):.2e}"
)
weighted = attribute_marginals(tax, library, fitted.weights)
print("After reweighting:")
for value, target in targets.entries["Hair Type"].items():
    print(
        f"   Hair Type {value:10s} {weighted['Hair Type'].get(value, 0.0):6.1%}"
        f"   (target {target:.0%})"
    )
print()

draws = sample(fitted, n=10_000, seed=42)
counts = collections.Counter(
    style_target_value(tax, library[sid], "collated-length") for sid in draws
)
print("10k seeded draws, collated length buckets (target 40/30/30):")
for bucket in ("Short", "Medium", "Long"):
    print(f"   {bucket:6s} {counts[bucket] / len(draws):6.1%}")
