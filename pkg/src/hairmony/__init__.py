"""Fairness-aware hairstyle classification toolkit.

Submodules:

- ``taxonomy``: schema loading, annotation validation, label flattening
- ``datastore``: feature files, sample records, dataset joins, marginals
- ``balancer``: sampling weights via iterative proportional fitting
- ``model``: linear-head classifier, losses, AdamW training, checkpoints
- ``evaluation``: collated accuracy metrics and demographic fairness
- ``service``: HTTP annotation service backing the labeling UI
- ``cli``: the ``hairmony`` command
"""

from .taxonomy import (
    AnnotationError,
    AttributeDef,
    HairstyleAnnotation,
    LabelVector,
    Taxonomy,
    TaxonomyError,
    Violation,
    flatten_labels,
    is_bald,
    load_canonical_taxonomy,
    load_taxonomy,
    unflatten_labels,
    validate_annotation,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationError",
    "AttributeDef",
    "HairstyleAnnotation",
    "LabelVector",
    "Taxonomy",
    "TaxonomyError",
    "Violation",
    "flatten_labels",
    "is_bald",
    "load_canonical_taxonomy",
    "load_taxonomy",
    "unflatten_labels",
    "validate_annotation",
    "__version__",
]
