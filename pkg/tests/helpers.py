"""Shared builders for tests: deterministic annotations and toy datasets."""

from __future__ import annotations

import copy

import numpy as np

from hairmony.model import HeadConfig, label_matrix
from hairmony.taxonomy import HairstyleAnnotation, Taxonomy

BASE_GLOBAL = {
    "Bangs Style": "None",
    "Bangs Length": "N/A",
    "Hair Accessories": "None",
    "Parting Location": "Central",
    "Hairline Shape": "Straight",
    "Hairline Position": "Medium",
    "Hairline Visibility": "Full",
    "Surface Appearance": "Matte",
    "Baby Hair": "No baby hair",
    "Hair Attribute Varies": "No",
}
BASE_REGION = {
    "Hair Type": "Straight",
    "Strand Styling": "None",
    "Strand Thickness": "N/A",
    "Hair Gathered": "None, not gathered",
    "Hair Direction": "Brushed/flowing down",
    "Hair Length": "Shoulder length",
    "Layering": "None/Single length",
    "Decorative patterns": "None",
}
BALD_REGION = {
    "Hair Type": "N/A",
    "Strand Styling": "N/A",
    "Strand Thickness": "N/A",
    "Hair Gathered": "None, not gathered",
    "Hair Direction": "N/A",
    "Hair Length": "No hair/Bald (clipper 0)",
    "Layering": "N/A",
    "Decorative patterns": "None",
}


def build_annotation(
    tax: Taxonomy,
    style_id: str,
    global_mods: dict | None = None,
    all_region_mods: dict | None = None,
    per_region: dict | None = None,
    bald: bool = False,
) -> HairstyleAnnotation:
    """Valid base annotation with targeted slot overrides."""
    g = copy.deepcopy(BASE_GLOBAL)
    g.update(global_mods or {})
    base = BALD_REGION if bald else BASE_REGION
    regions = {r: copy.deepcopy(base) for r in tax.regions}
    for r in regions:
        regions[r].update(all_region_mods or {})
    for r, mods in (per_region or {}).items():
        regions[r].update(mods)
    return HairstyleAnnotation(style_id, g, regions)


def toy_styles(tax: Taxonomy) -> dict[str, HairstyleAnnotation]:
    """Five visually distinct styles for cluster-classification toys."""
    specs = [
        ("toy_straight_long", {"Hair Type": "Straight", "Hair Length": "Waist length or longer"}, {}),
        ("toy_wavy_medium", {"Hair Type": "Wavy", "Hair Length": "Chin length"}, {}),
        (
            "toy_curly_bangs",
            {"Hair Type": "Curly", "Hair Length": "Ear length"},
            {"Bangs Style": "Straight", "Bangs Length": "To eyebrows (~10cm)"},
        ),
        (
            "toy_coily_gathered",
            {"Hair Type": "Coily", "Hair Length": "Short (1-5cm, clipper 4-10)"},
            {},
        ),
        ("toy_straight_short", {"Hair Type": "Straight", "Hair Length": "Very short (<1cm, clipper 1-3)"}, {}),
    ]
    styles = {}
    for sid, region_mods, global_mods in specs:
        per_region = None
        if sid == "toy_coily_gathered":
            per_region = {"Crown": {"Hair Gathered": "Pony tail, single"}}
        styles[sid] = build_annotation(
            tax, sid, global_mods=global_mods, all_region_mods=region_mods, per_region=per_region
        )
    return styles


def toy_dataset(
    tax: Taxonomy,
    n_train: int = 500,
    n_eval: int = 100,
    dim: int = 32,
    separation: float = 6.0,
    noise: float = 1.0,
    seed: int = 20240723,
):
    """Gaussian clusters in feature space, one per toy style.

    Returns (style_ids, head label matrix, train arrays, eval arrays);
    arrays are (features, style indices, per-sample label matrix).
    """
    styles = toy_styles(tax)
    style_ids = list(styles.keys())
    labels = label_matrix(tax, styles, style_ids)
    k = len(style_ids)
    rng = np.random.default_rng(seed)
    means = np.zeros((k, dim))
    for i in range(k):
        means[i, i] = separation

    def draw(n):
        cluster = rng.integers(0, k, size=n)
        feats = means[cluster] + noise * rng.normal(size=(n, dim))
        return feats, cluster, labels[cluster]

    return styles, style_ids, labels, draw(n_train), draw(n_eval)


def toy_head_config(tax: Taxonomy, dim: int = 32, dropout: float = 0.1) -> HeadConfig:
    return HeadConfig.for_taxonomy(
        tax,
        feature_dim=dim,
        hidden_dim=32,
        num_styles=5,
        dropout_rate=dropout,
        attr_head_input="hidden",
    )
