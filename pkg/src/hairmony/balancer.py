"""Attribute-balanced sampling weights via iterative proportional fitting.

Given target marginal distributions over taxonomy attributes (or the
derived fringe/gathered flags and Short/Medium/Long length buckets), IPF
starts from uniform per-style weights and cycles over the targets,
rescaling each style's weight by target/current for its value and
renormalizing, until every per-attribute L1 residual drops below
tolerance. Weights then feed a seeded categorical sampler.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .collation import (
    any_region_gathered,
    collate_attribute,
    length_bucket,
    max_regional_length,
)
from .taxonomy import HairstyleAnnotation, Taxonomy

# derived-flag names usable as target attributes alongside taxonomy attributes
FRINGE_FLAG = "fringe-present"
GATHERED_FLAG = "gathered-present"
LENGTH_BUCKET_FLAG = "collated-length"

_FLAG_YES = "yes"
_FLAG_NO = "no"

_SUM_TOL = 1e-9


class BalancerError(ValueError):
    """Bad targets, empty library, or a value no reweighting can reach."""


class InfeasibleTargetError(BalancerError):
    """A target assigns positive probability to a value no style exhibits."""

    def __init__(self, attribute: str, value: str):
        self.attribute = attribute
        self.value = value
        super().__init__(
            f"target for {attribute!r} puts mass on {value!r}, "
            f"but no style in the library exhibits it"
        )


@dataclass(frozen=True)
class TargetMarginals:
    """Target distribution per attribute or derived flag; each sums to 1."""

    entries: Mapping[str, Mapping[str, float]]

    def __post_init__(self):
        for name, dist in self.entries.items():
            if not dist:
                raise BalancerError(f"empty target distribution for {name!r}")
            total = 0.0
            for value, p in dist.items():
                if p < 0:
                    raise BalancerError(f"negative probability for {name!r}/{value!r}")
                total += p
            if abs(total - 1.0) > _SUM_TOL:
                raise BalancerError(
                    f"target for {name!r} sums to {total!r}, expected 1"
                )

    @classmethod
    def from_json(cls, path: str | Path) -> "TargetMarginals":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls(entries={k: dict(v) for k, v in doc.items() if not k.startswith("_")})


def balanced_preset() -> TargetMarginals:
    """The balanced training distribution: half fringed, three quarters
    gathered, 40/30/30 short/medium/long, 50/15/15/20 hair types."""
    return TargetMarginals(
        entries={
            FRINGE_FLAG: {_FLAG_YES: 0.5, _FLAG_NO: 0.5},
            GATHERED_FLAG: {_FLAG_YES: 0.75, _FLAG_NO: 0.25},
            LENGTH_BUCKET_FLAG: {"Short": 0.4, "Medium": 0.3, "Long": 0.3},
            "Hair Type": {"Straight": 0.5, "Wavy": 0.15, "Curly": 0.15, "Coily": 0.2},
        }
    )


def style_target_value(tax: Taxonomy, ann: HairstyleAnnotation, name: str) -> str:
    """Resolve a style's value for a target attribute or derived flag."""
    if name == FRINGE_FLAG:
        return _FLAG_YES if ann.global_values["Bangs Style"] != "None" else _FLAG_NO
    if name == GATHERED_FLAG:
        return _FLAG_YES if any_region_gathered(tax, ann) else _FLAG_NO
    if name == LENGTH_BUCKET_FLAG:
        bucket = length_bucket(tax, max_regional_length(tax, ann))
        if bucket is None:
            raise BalancerError(
                f"style {ann.style_id!r} has no length bucket "
                f"(collated length is not a visible length)"
            )
        return bucket
    if not tax.has_attribute(name):
        raise BalancerError(f"unknown target attribute {name!r}")
    return collate_attribute(tax, ann, name)


@dataclass(frozen=True)
class SamplingWeights:
    """Fitted per-style probabilities plus the fit diagnostics."""

    weights: Mapping[str, float]
    residuals: Mapping[str, float]
    iterations_used: int
    converged: bool

    def to_json_doc(self) -> dict:
        doc = {sid: w for sid, w in self.weights.items()}
        doc["_meta"] = {
            "residuals": dict(self.residuals),
            "iterations": self.iterations_used,
            "converged": self.converged,
        }
        return doc

    @classmethod
    def from_json(cls, path: str | Path) -> "SamplingWeights":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        meta = doc.pop("_meta", {})
        return cls(
            weights=doc,
            residuals=meta.get("residuals", {}),
            iterations_used=int(meta.get("iterations", 0)),
            converged=bool(meta.get("converged", False)),
        )


def _residual(w: np.ndarray, values: list[str], target: Mapping[str, float]) -> float:
    """L1 gap between the marginal induced by w and the target distribution."""
    current: dict[str, float] = {}
    for weight, value in zip(w, values):
        current[value] = current.get(value, 0.0) + float(weight)
    gap = 0.0
    for value in set(current) | set(target):
        gap += abs(current.get(value, 0.0) - target.get(value, 0.0))
    return float(gap)


def fit_weights(
    tax: Taxonomy,
    styles: Mapping[str, HairstyleAnnotation],
    targets: TargetMarginals,
    max_iters: int = 1000,
    tol: float = 1e-6,
    damping: float = 1.0,
) -> SamplingWeights:
    """Iterative proportional fitting of per-style sampling weights.

    Starts uniform; each cycle visits the target attributes in order and
    multiplies every style's weight by (target/current) for the style's
    value (raised to ``damping``), then renormalizes. A value present in
    the library but absent from a target distribution is treated as target
    probability zero, so such styles are excluded from the balanced pool.
    Stops once the largest per-attribute L1 residual is at most ``tol``.
    """
    if not styles:
        raise BalancerError("empty style library")
    if not targets.entries:
        raise BalancerError("no target attributes")

    style_ids = list(styles.keys())
    value_of: dict[str, list[str]] = {
        name: [style_target_value(tax, styles[sid], name) for sid in style_ids]
        for name in targets.entries
    }

    # Every positively-weighted target value must be reachable.
    for name, dist in targets.entries.items():
        exhibited = set(value_of[name])
        for value, p in dist.items():
            if p > 0 and value not in exhibited:
                raise InfeasibleTargetError(name, value)

    n = len(style_ids)
    w = np.full(n, 1.0 / n)

    def residuals_now() -> dict[str, float]:
        return {
            name: _residual(w, value_of[name], dist)
            for name, dist in targets.entries.items()
        }

    residuals = residuals_now()
    iterations = 0
    converged = max(residuals.values()) <= tol
    while not converged and iterations < max_iters:
        for name, dist in targets.entries.items():
            values = value_of[name]
            current: dict[str, float] = {}
            for weight, value in zip(w, values):
                current[value] = current.get(value, 0.0) + weight
            factors = np.empty(n)
            for i, value in enumerate(values):
                target_p = dist.get(value, 0.0)
                if target_p == 0.0:
                    factors[i] = 0.0
                    continue
                cur = current.get(value, 0.0)
                if cur <= 0.0:
                    raise InfeasibleTargetError(name, value)
                factors[i] = (target_p / cur) ** damping
            w = w * factors
            total = w.sum()
            if total <= 0.0:
                raise BalancerError("all weights collapsed to zero")
            w = w / total
        iterations += 1
        residuals = residuals_now()
        converged = max(residuals.values()) <= tol

    return SamplingWeights(
        weights={sid: float(x) for sid, x in zip(style_ids, w)},
        residuals=residuals,
        iterations_used=iterations,
        converged=bool(converged),
    )


def sample(
    weights: SamplingWeights | Mapping[str, float], n: int, seed: int
) -> list[str]:
    """n i.i.d. style draws by inverse-CDF over a PCG64 stream.

    Identical (weights, n, seed) always produce the identical list.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    mapping = weights.weights if isinstance(weights, SamplingWeights) else weights
    ids = list(mapping.keys())
    probs = np.asarray([mapping[sid] for sid in ids], dtype=float)
    if probs.size == 0:
        raise ValueError("no styles to sample from")
    if (probs < 0).any():
        raise ValueError("negative weight")
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"weights sum to {total!r}, expected 1")
    if n == 0:
        return []
    cumulative = np.cumsum(probs)
    cumulative[-1] = 1.0  # guard against float shortfall at the tail
    rng = np.random.default_rng(seed)
    draws = rng.random(n)
    idx = np.searchsorted(cumulative, draws, side="right")
    return [ids[int(i)] for i in idx]
