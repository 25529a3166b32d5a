"""Accuracy and demographic fairness over collated taxonomy metrics.

Six metrics are reported: Bald, Bang Styling, Gathered, Length, Hair Type
and Strands, each a single collated value per sample. Fairness of a
demographic category is the mean of per-group accuracies divided by the
maximum, as a percentage: 100 means all groups score identically, lower
means some group falls behind the best one. Predictions are evaluated via
the predicted style's library annotation, so the metrics measure
perceptual similarity rather than exact class hits.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Mapping, Sequence

import numpy as np

from .collation import COLLATION_VERSION, METRICS, collate
from .datastore import CANONICAL_DEMOGRAPHICS, Dataset, DemographicSchema
from .taxonomy import Taxonomy

CATEGORIES = ("gender", "age", "ancestry")


class EvaluationError(ValueError):
    pass


def attribute_accuracy(
    preds: Sequence[Mapping], truths: Sequence[Mapping], metric: str
) -> float:
    """Fraction of samples whose collated value matches exactly."""
    if len(preds) != len(truths):
        raise EvaluationError(
            f"{len(preds)} predictions for {len(truths)} ground truths"
        )
    if not preds:
        raise EvaluationError("no samples")
    if metric not in METRICS:
        raise EvaluationError(f"unknown metric {metric!r}")
    hits = sum(1 for p, t in zip(preds, truths) if p[metric] == t[metric])
    return hits / len(preds)


def fairness(group_accuracies: Mapping[str, float]) -> float:
    """100 x mean over groups divided by the best group; 100 = parity.

    Computed as fsum(values) / (n * max): the exactly-rounded numerator
    keeps the ratio at most 1 and makes equal groups land on 100.0 exactly.
    """
    if not group_accuracies:
        raise EvaluationError("no groups")
    values = list(group_accuracies.values())
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise EvaluationError("accuracies must lie in [0, 1]")
    top = max(values)
    if top <= 0.0:
        raise EvaluationError("fairness undefined: all group accuracies are zero")
    return 100.0 * (math.fsum(values) / (len(values) * top))


def report(
    tax: Taxonomy,
    dataset: Dataset,
    predicted_style_ids: Sequence[str],
    label: str = "model",
    schema: DemographicSchema = CANONICAL_DEMOGRAPHICS,
) -> dict:
    """Full accuracy/fairness report across metrics and demographic categories.

    Every evaluated sample needs demographics; missing ones are listed in
    the raised error rather than skipped. Mean accuracy averages the six
    metric accuracies; mean fairness averages every metric x category
    fairness cell.
    """
    samples = dataset.samples
    if len(predicted_style_ids) != len(samples):
        raise EvaluationError(
            f"{len(predicted_style_ids)} predictions for {len(samples)} samples"
        )
    missing = [rec.sample_id for rec in samples if not rec.demographics]
    if missing:
        raise EvaluationError(
            "samples missing demographics: " + ", ".join(missing)
        )
    unknown = [sid for sid in predicted_style_ids if sid not in dataset.styles]
    if unknown:
        raise EvaluationError(f"predicted styles not in library: {sorted(set(unknown))}")

    truths = [collate(tax, dataset.styles[rec.style_id]) for rec in samples]
    preds = [collate(tax, dataset.styles[sid]) for sid in predicted_style_ids]

    metrics_doc: dict[str, dict] = {}
    fairness_cells: list[float] = []
    for metric in METRICS:
        overall = attribute_accuracy(preds, truths, metric)
        per_category: dict[str, dict] = {}
        for category in CATEGORIES:
            group_acc: dict[str, float] = {}
            for group in schema.categories[category]:
                rows = [
                    i
                    for i, rec in enumerate(samples)
                    if rec.demographics.get(category) == group
                ]
                if not rows:
                    continue
                hits = sum(1 for i in rows if preds[i][metric] == truths[i][metric])
                group_acc[group] = hits / len(rows)
            if not group_acc:
                raise EvaluationError(f"no samples carry a {category!r} group")
            cell = fairness(group_acc)
            fairness_cells.append(cell)
            per_category[category] = {
                "group_accuracy": group_acc,
                "fairness": cell,
            }
        metrics_doc[metric] = {
            "overall_accuracy": overall,
            "per_category": per_category,
        }

    return {
        "_meta": {
            "label": label,
            "collation": COLLATION_VERSION,
            "metrics": list(METRICS),
            "categories": list(CATEGORIES),
            "fairness_cells": "all metric x category pairs",
            "num_samples": len(samples),
        },
        "metrics": metrics_doc,
        "mean_accuracy": float(
            np.mean([metrics_doc[m]["overall_accuracy"] for m in METRICS])
        ),
        "mean_fairness": float(np.mean(fairness_cells)),
    }


def attr_head_agreement(
    predicted_labels: np.ndarray, true_labels: np.ndarray
) -> float:
    """Diagnostic: fraction of label slots the attribute heads got right."""
    predicted_labels = np.asarray(predicted_labels)
    true_labels = np.asarray(true_labels)
    if predicted_labels.shape != true_labels.shape:
        raise EvaluationError("label matrices must have the same shape")
    return float((predicted_labels == true_labels).mean())


def _row_cells(doc: Mapping) -> list[str]:
    cells = [f"{100.0 * doc['metrics'][m]['overall_accuracy']:.1f}%" for m in METRICS]
    cells.append(f"{100.0 * doc['mean_accuracy']:.1f}%")
    cells.append(f"{doc['mean_fairness']:.1f}%")
    return cells


def render_table(reports: Sequence[Mapping]) -> str:
    """Plain-text accuracy table, one row per report, ablation-table layout."""
    header = ["Method", *METRICS, "Mean Accuracy", "Mean Fairness"]
    rows = [[doc["_meta"].get("label", "model"), *_row_cells(doc)] for doc in reports]
    widths = [
        max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]

    def fmt(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    lines = [f"# {COLLATION_VERSION}", fmt(header), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in rows)
    return "\n".join(lines) + "\n"


def render_fairness_table(reports: Sequence[Mapping]) -> str:
    """Per metric x category fairness percentages, one row per report."""
    header = ["Method"]
    for metric in METRICS:
        for category in CATEGORIES:
            header.append(f"{metric}/{category}")
    header.append("Mean Fairness")
    rows = []
    for doc in reports:
        row = [doc["_meta"].get("label", "model")]
        for metric in METRICS:
            for category in CATEGORIES:
                cell = doc["metrics"][metric]["per_category"][category]["fairness"]
                row.append(f"{cell:.1f}%")
        row.append(f"{doc['mean_fairness']:.1f}%")
        rows.append(row)
    widths = [
        max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]

    def fmt(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    lines = [f"# {COLLATION_VERSION}", fmt(header), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in rows)
    return "\n".join(lines) + "\n"


def to_csv(reports: Sequence[Mapping]) -> str:
    """CSV export with the same cells as the plain-text accuracy table."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", *METRICS, "mean_accuracy", "mean_fairness"])
    for doc in reports:
        writer.writerow(
            [
                doc["_meta"].get("label", "model"),
                *(doc["metrics"][m]["overall_accuracy"] for m in METRICS),
                doc["mean_accuracy"],
                doc["mean_fairness"],
            ]
        )
    return buf.getvalue()
