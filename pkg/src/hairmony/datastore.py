"""Feature vectors, sample records, demographic profiles, and dataset joins.

Feature vectors live in a little-endian binary file: magic ``HMFT``,
u32 version (=1), u32 dim, u64 count, then count x dim float32 row-major.
Sample ids sit in a JSON Lines sidecar at ``<path>.ids.jsonl`` whose line i
corresponds to row i. Neither write nor read converts lossily: the payload
round-trips bit for bit.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .collation import collated_marginals
from .taxonomy import HairstyleAnnotation, Taxonomy

MAGIC = b"HMFT"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")  # magic, version, dim, count

DEFAULT_FEATURE_DIM = 8192  # class + pooled patch tokens from 4 backbone layers


class FeatureStoreError(ValueError):
    """Feature file failed a header, payload, or finiteness check."""


class JoinError(ValueError):
    """One or more sample records could not be resolved."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class FeatureStore:
    """Immutable block of float32 feature vectors keyed by sample id."""

    ids: tuple[str, ...]
    vectors: np.ndarray  # (count, dim) float32

    def __post_init__(self):
        vectors = np.ascontiguousarray(self.vectors, dtype=np.float32)
        object.__setattr__(self, "vectors", vectors)
        if vectors.ndim != 2:
            raise FeatureStoreError("vectors must be a 2-d array")
        if len(self.ids) != vectors.shape[0]:
            raise FeatureStoreError(
                f"{len(self.ids)} ids for {vectors.shape[0]} vectors"
            )
        if len(set(self.ids)) != len(self.ids):
            raise FeatureStoreError("duplicate sample id")
        if vectors.size and not np.isfinite(vectors).all():
            raise FeatureStoreError("non-finite value in feature vectors")

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def count(self) -> int:
        return int(self.vectors.shape[0])

    def row(self, sample_id: str) -> np.ndarray:
        return self.vectors[self.ids.index(sample_id)]

    @classmethod
    def empty(cls, dim: int) -> "FeatureStore":
        return cls(ids=(), vectors=np.zeros((0, dim), dtype=np.float32))


def _sidecar(path: str | Path) -> Path:
    return Path(str(path) + ".ids.jsonl")


def write_feature_store(store: FeatureStore, path: str | Path) -> None:
    """Write vectors plus the id sidecar; overwrites both files."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, store.dim, store.count))
        fh.write(store.vectors.astype("<f4", copy=False).tobytes(order="C"))
    with open(_sidecar(path), "w", encoding="utf-8") as fh:
        for sample_id in store.ids:
            fh.write(json.dumps({"sample_id": sample_id}) + "\n")


def read_feature_store(path: str | Path) -> FeatureStore:
    """Read a feature file and its sidecar, verifying every header field."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise FeatureStoreError(f"{path}: truncated header")
    magic, version, dim, count = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FeatureStoreError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FeatureStoreError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 4 * dim * count
    if len(raw) != expected:
        raise FeatureStoreError(
            f"{path}: truncated payload (expected {expected} bytes, got {len(raw)})"
        )
    vectors = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(count, dim)
    if vectors.size and not np.isfinite(vectors).all():
        raise FeatureStoreError(f"{path}: NaN or Inf in payload")

    sidecar = _sidecar(path)
    if not sidecar.exists():
        raise FeatureStoreError(f"{sidecar}: missing id sidecar")
    ids = []
    with open(sidecar, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                ids.append(str(json.loads(line)["sample_id"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FeatureStoreError(f"{sidecar}: line {lineno}: {exc}") from exc
    if len(ids) != count:
        raise FeatureStoreError(
            f"{sidecar}: {len(ids)} ids for {count} vectors"
        )
    return FeatureStore(ids=tuple(ids), vectors=vectors.copy())


GENDER_GROUPS = ("Female", "Male")
AGE_GROUPS = ("10-19", "20-29", "30-39", "40-49", "50-59", "60-69", "70+")
ANCESTRY_GROUPS = (
    "Black",
    "East Asian",
    "Indian",
    "Latino",
    "Middle Eastern",
    "Southeast Asian",
    "White",
)


@dataclass(frozen=True)
class DemographicSchema:
    """Allowed demographic categories and their group names."""

    categories: Mapping[str, tuple[str, ...]] = field(
        default_factory=lambda: {
            "gender": GENDER_GROUPS,
            "age": AGE_GROUPS,
            "ancestry": ANCESTRY_GROUPS,
        }
    )

    def check(self, demographics: Mapping[str, str], where: str) -> list[str]:
        problems = []
        for key, group in demographics.items():
            if key not in self.categories:
                problems.append(f"{where}: unknown demographic category {key!r}")
            elif group not in self.categories[key]:
                problems.append(
                    f"{where}: unknown {key} group {group!r}"
                )
        return problems


CANONICAL_DEMOGRAPHICS = DemographicSchema()


@dataclass(frozen=True)
class SampleRecord:
    """One evaluation or training sample: feature row id plus its style."""

    sample_id: str
    style_id: str
    demographics: Mapping[str, str] | None = None

    def to_dict(self) -> dict:
        doc = {"sample_id": self.sample_id, "style_id": self.style_id}
        if self.demographics is not None:
            doc["demographics"] = dict(self.demographics)
        return doc


def read_samples(path: str | Path) -> list[SampleRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                records.append(
                    SampleRecord(
                        sample_id=str(doc["sample_id"]),
                        style_id=str(doc["style_id"]),
                        demographics=doc.get("demographics"),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise JoinError([f"{path}: line {lineno}: {exc}"]) from exc
    return records


def write_samples(records: Iterable[SampleRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class Dataset:
    """Joined features + samples + annotated styles, fully resolved."""

    features: FeatureStore
    samples: tuple[SampleRecord, ...]
    styles: Mapping[str, HairstyleAnnotation]

    def feature_matrix(self) -> np.ndarray:
        index = {sid: i for i, sid in enumerate(self.features.ids)}
        rows = [index[rec.sample_id] for rec in self.samples]
        return self.features.vectors[rows]


def join(
    features: FeatureStore,
    samples: Sequence[SampleRecord],
    styles: Mapping[str, HairstyleAnnotation],
    schema: DemographicSchema = CANONICAL_DEMOGRAPHICS,
) -> Dataset:
    """Resolve every sample against features and styles.

    Nothing is dropped silently: every dangling reference, duplicate id,
    and unknown demographic group is collected and raised together.
    """
    problems: list[str] = []
    seen: set[str] = set()
    feature_ids = set(features.ids)
    for rec in samples:
        if rec.sample_id in seen:
            problems.append(f"duplicate id {rec.sample_id!r}")
        seen.add(rec.sample_id)
        if rec.sample_id not in feature_ids:
            problems.append(f"sample {rec.sample_id!r}: no feature vector")
        if rec.style_id not in styles:
            problems.append(
                f"sample {rec.sample_id!r}: unknown style {rec.style_id!r}"
            )
        if rec.demographics:
            problems.extend(schema.check(rec.demographics, f"sample {rec.sample_id!r}"))
    if problems:
        raise JoinError(problems)
    return Dataset(features=features, samples=tuple(samples), styles=dict(styles))


def attribute_marginals(
    tax: Taxonomy,
    styles: Mapping[str, HairstyleAnnotation],
    weights: Mapping[str, float] | None = None,
) -> dict[str, dict[str, float]]:
    """Weighted per-attribute value distributions over a style library.

    Regional attributes are first collated to one value per style (modal
    rule, ordinal maximum for Hair Length), so the result has one
    distribution per taxonomy attribute, each summing to 1.
    """
    return collated_marginals(tax, styles, weights)
