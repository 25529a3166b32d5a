"""Hairstyle taxonomy: schema loading, annotation validation, label flattening.

A taxonomy describes hairstyles with 10 whole-style attributes plus 8
per-region attributes over 8 scalp regions, giving 74 categorical label
slots per style. Attributes that are only conditionally applicable carry
an extra sentinel value ``N/A`` so every slot is always filled and label
vectors stay fixed-length. Consistency rules are part of the schema and
are evaluated by a small predicate engine, so extending the taxonomy does
not require code changes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

NA = "N/A"

EXPECTED_REGION_COUNT = 8
EXPECTED_GLOBAL_COUNT = 10
EXPECTED_REGIONAL_COUNT = 8
TOTAL_SLOTS = EXPECTED_GLOBAL_COUNT + EXPECTED_REGION_COUNT * EXPECTED_REGIONAL_COUNT

BALD_VALUE = "No hair/Bald (clipper 0)"
NOT_GATHERED_VALUE = "None, not gathered"
NOT_VISIBLE_LENGTH = "Hair not visible"

_DEFAULT_SCHEMA = Path(__file__).parent / "data" / "taxonomy.v1.json"


class TaxonomyError(ValueError):
    """Schema document is malformed or breaks a structural invariant."""


class AnnotationError(ValueError):
    """Annotation references unknown attributes/values or misses slots.

    Distinct from consistency-rule violations, which are ordinary data
    returned by :func:`validate_annotation`.
    """


@dataclass(frozen=True)
class AttributeDef:
    """One categorical attribute: its name, ordered values, and scope."""

    name: str
    values: tuple[str, ...]
    scope: str  # "global" | "regional"
    ordinal: bool = False
    allows_na: bool = False

    def index_of(self, value: str) -> int:
        try:
            return self.values.index(value)
        except ValueError:
            raise AnnotationError(
                f"unknown value {value!r} for attribute {self.name!r}"
            ) from None

    @property
    def cardinality(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ConsistencyRule:
    """Schema-level implication: when ``condition`` holds, ``requirement`` must."""

    id: str
    scope: str  # "global" | "per_region"
    path: str
    condition: Mapping
    requirement: Mapping
    message: str


@dataclass(frozen=True)
class Violation:
    """A single consistency-rule failure with the offending slot path."""

    rule_id: str
    path: str
    message: str

    def to_dict(self) -> dict:
        return {"rule_id": self.rule_id, "path": self.path, "message": self.message}


@dataclass(frozen=True)
class LayoutSlot:
    """One entry of the deterministic label layout."""

    slot: str  # "Bangs Style" or "Front/Hair Type"
    attribute: str
    cardinality: int


@dataclass(frozen=True)
class LabelVector:
    """Flattened annotation: one categorical index per layout slot."""

    labels: tuple[int, ...]
    layout: tuple[LayoutSlot, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.layout):
            raise ValueError("label/layout length mismatch")
        for idx, slot in zip(self.labels, self.layout):
            if not 0 <= idx < slot.cardinality:
                raise ValueError(
                    f"label {idx} out of range for slot {slot.slot!r} "
                    f"(cardinality {slot.cardinality})"
                )


@dataclass(frozen=True)
class HairstyleAnnotation:
    """Complete labeling of one style: 10 global + 8x8 regional values."""

    style_id: str
    global_values: Mapping[str, str]
    regional_values: Mapping[str, Mapping[str, str]]

    def value(self, region: str | None, attribute: str) -> str:
        if region is None:
            return self.global_values[attribute]
        return self.regional_values[region][attribute]

    def to_dict(self) -> dict:
        return {
            "style_id": self.style_id,
            "global": dict(self.global_values),
            "regions": {r: dict(a) for r, a in self.regional_values.items()},
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "HairstyleAnnotation":
        try:
            return cls(
                style_id=str(doc["style_id"]),
                global_values=dict(doc["global"]),
                regional_values={r: dict(a) for r, a in doc["regions"].items()},
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise AnnotationError(f"malformed annotation document: {exc}") from exc


@dataclass(frozen=True)
class Taxonomy:
    """Immutable taxonomy schema: attributes, regions, and consistency rules."""

    global_attributes: tuple[AttributeDef, ...]
    regional_attributes: tuple[AttributeDef, ...]
    regions: tuple[str, ...]
    rules: tuple[ConsistencyRule, ...]
    version: str
    _by_name: dict = field(repr=False, hash=False, compare=False, default_factory=dict)

    def __post_init__(self):
        by_name = {a.name: a for a in self.global_attributes + self.regional_attributes}
        object.__setattr__(self, "_by_name", by_name)

    def attribute(self, name: str) -> AttributeDef:
        try:
            return self._by_name[name]
        except KeyError:
            raise AnnotationError(f"unknown attribute {name!r}") from None

    def has_attribute(self, name: str) -> bool:
        return name in self._by_name

    def layout(self) -> tuple[LayoutSlot, ...]:
        """Deterministic slot layout: globals in schema order, then
        region-major regional slots (regions x regional attributes)."""
        slots = [
            LayoutSlot(a.name, a.name, a.cardinality) for a in self.global_attributes
        ]
        for region in self.regions:
            for a in self.regional_attributes:
                slots.append(LayoutSlot(f"{region}/{a.name}", a.name, a.cardinality))
        return tuple(slots)

    @property
    def num_slots(self) -> int:
        return len(self.global_attributes) + len(self.regions) * len(
            self.regional_attributes
        )


def _parse_attribute(doc: Mapping, scope: str) -> AttributeDef:
    try:
        name = doc["name"]
        values = list(doc["values"])
    except (KeyError, TypeError) as exc:
        raise TaxonomyError(f"malformed attribute entry: {exc}") from exc
    if len(values) < 2:
        raise TaxonomyError(f"attribute {name!r} needs at least 2 values")
    if len(set(values)) != len(values):
        raise TaxonomyError(f"duplicate value in attribute {name!r}")
    allows_na = bool(doc.get("allows_na", False))
    if allows_na:
        if NA in values:
            raise TaxonomyError(f"attribute {name!r} lists the reserved sentinel {NA!r}")
        values.append(NA)
    return AttributeDef(
        name=name,
        values=tuple(values),
        scope=scope,
        ordinal=bool(doc.get("ordinal", False)),
        allows_na=allows_na,
    )


def _check_predicate(tax: Taxonomy, rule_id: str, pred: Mapping) -> None:
    """Load-time check that a rule predicate only references known slots/values."""
    if not isinstance(pred, Mapping):
        raise TaxonomyError(f"rule {rule_id!r}: predicate must be an object")
    if "const" in pred:
        return
    for key in ("all", "any"):
        if key in pred:
            for sub in pred[key]:
                _check_predicate(tax, rule_id, sub)
            return
    if "not" in pred:
        _check_predicate(tax, rule_id, pred["not"])
        return
    for key in ("all_regions", "any_region"):
        if key in pred:
            inner = pred[key]
            attr_name = inner.get("slot")
            if not any(a.name == attr_name for a in tax.regional_attributes):
                raise TaxonomyError(
                    f"rule {rule_id!r} references unknown regional attribute {attr_name!r}"
                )
            _check_predicate(tax, rule_id, inner)
            return
    if "slot" in pred:
        name = pred["slot"]
        if not tax.has_attribute(name):
            raise TaxonomyError(f"rule {rule_id!r} references unknown attribute {name!r}")
        attr = tax.attribute(name)
        values = pred.get("values", [pred["value"]] if "value" in pred else [])
        for v in values:
            if v not in attr.values:
                raise TaxonomyError(
                    f"rule {rule_id!r} references unknown value {v!r} of {name!r}"
                )
        if pred.get("op") not in ("eq", "ne", "in", "not_in"):
            raise TaxonomyError(f"rule {rule_id!r}: unknown op {pred.get('op')!r}")
        return
    raise TaxonomyError(f"rule {rule_id!r}: unrecognized predicate {dict(pred)!r}")


def load_taxonomy(document: str | Path | Mapping) -> Taxonomy:
    """Parse and validate a taxonomy schema from a path, JSON text, or dict."""
    if isinstance(document, Mapping):
        doc = document
    else:
        text = Path(document).read_text(encoding="utf-8") if _looks_like_path(
            document
        ) else str(document)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TaxonomyError(f"malformed schema document: {exc}") from exc
    if not isinstance(doc, Mapping):
        raise TaxonomyError("schema document must be a JSON object")

    try:
        regions = tuple(doc["regions"])
        global_docs = doc["global_attributes"]
        regional_docs = doc["regional_attributes"]
    except (KeyError, TypeError) as exc:
        raise TaxonomyError(f"malformed schema document: {exc}") from exc

    if len(regions) != EXPECTED_REGION_COUNT:
        raise TaxonomyError(
            f"wrong region count: expected {EXPECTED_REGION_COUNT}, got {len(regions)}"
        )
    if len(set(regions)) != len(regions):
        raise TaxonomyError("duplicate region name")

    global_attrs = tuple(_parse_attribute(d, "global") for d in global_docs)
    regional_attrs = tuple(_parse_attribute(d, "regional") for d in regional_docs)
    names = [a.name for a in global_attrs + regional_attrs]
    if len(set(names)) != len(names):
        raise TaxonomyError("duplicate attribute name")
    if len(global_attrs) != EXPECTED_GLOBAL_COUNT:
        raise TaxonomyError(
            f"wrong global attribute count: expected {EXPECTED_GLOBAL_COUNT}, "
            f"got {len(global_attrs)}"
        )
    if len(regional_attrs) != EXPECTED_REGIONAL_COUNT:
        raise TaxonomyError(
            f"wrong regional attribute count: expected {EXPECTED_REGIONAL_COUNT}, "
            f"got {len(regional_attrs)}"
        )

    rules = []
    for rdoc in doc.get("rules", []):
        try:
            rules.append(
                ConsistencyRule(
                    id=rdoc["id"],
                    scope=rdoc.get("scope", "global"),
                    path=rdoc.get("path", rdoc["id"]),
                    condition=rdoc["condition"],
                    requirement=rdoc["requirement"],
                    message=rdoc["message"],
                )
            )
        except (KeyError, TypeError) as exc:
            raise TaxonomyError(f"malformed rule entry: {exc}") from exc
    if len({r.id for r in rules}) != len(rules):
        raise TaxonomyError("duplicate rule id")

    tax = Taxonomy(
        global_attributes=global_attrs,
        regional_attributes=regional_attrs,
        regions=regions,
        rules=tuple(rules),
        version=str(doc.get("version", "")),
    )
    for rule in tax.rules:
        if rule.scope not in ("global", "per_region"):
            raise TaxonomyError(f"rule {rule.id!r}: unknown scope {rule.scope!r}")
        _check_predicate(tax, rule.id, rule.condition)
        _check_predicate(tax, rule.id, rule.requirement)
    return tax


def _looks_like_path(document) -> bool:
    if isinstance(document, Path):
        return True
    s = str(document)
    return not s.lstrip().startswith("{")


def data_dir() -> Path:
    """Directory holding the canonical schema and style library.

    ``HAIRMONY_DATA_DIR`` overrides the packaged copies.
    """
    override = os.environ.get("HAIRMONY_DATA_DIR")
    if override:
        return Path(override)
    return _DEFAULT_SCHEMA.parent


def load_canonical_taxonomy() -> Taxonomy:
    """Load the schema shipped with the package (or from HAIRMONY_DATA_DIR)."""
    return load_taxonomy(data_dir() / "taxonomy.v1.json")


def _structural_check(tax: Taxonomy, ann: HairstyleAnnotation) -> None:
    """Raise AnnotationError unless every slot exists and is filled validly."""
    expected_globals = [a.name for a in tax.global_attributes]
    got_globals = list(ann.global_values.keys())
    missing = set(expected_globals) - set(got_globals)
    extra = set(got_globals) - set(expected_globals)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing global attributes {sorted(missing)}")
        if extra:
            parts.append(f"unknown attribute {sorted(extra)}")
        raise AnnotationError(f"style {ann.style_id!r}: " + "; ".join(parts))
    for name, value in ann.global_values.items():
        tax.attribute(name).index_of(value)

    expected_regions = set(tax.regions)
    got_regions = set(ann.regional_values.keys())
    if expected_regions != got_regions:
        raise AnnotationError(
            f"style {ann.style_id!r}: regions {sorted(got_regions)} do not match "
            f"schema regions {sorted(expected_regions)}"
        )
    expected_regional = {a.name for a in tax.regional_attributes}
    for region, values in ann.regional_values.items():
        if set(values.keys()) != expected_regional:
            raise AnnotationError(
                f"style {ann.style_id!r}: region {region!r} slots do not match schema"
            )
        for name, value in values.items():
            tax.attribute(name).index_of(value)


def _eval_predicate(
    tax: Taxonomy, ann: HairstyleAnnotation, pred: Mapping, region: str | None
) -> bool:
    if "const" in pred:
        return bool(pred["const"])
    if "all" in pred:
        return all(_eval_predicate(tax, ann, p, region) for p in pred["all"])
    if "any" in pred:
        return any(_eval_predicate(tax, ann, p, region) for p in pred["any"])
    if "not" in pred:
        return not _eval_predicate(tax, ann, pred["not"], region)
    if "all_regions" in pred:
        return all(
            _eval_predicate(tax, ann, pred["all_regions"], r) for r in tax.regions
        )
    if "any_region" in pred:
        return any(
            _eval_predicate(tax, ann, pred["any_region"], r) for r in tax.regions
        )
    attr = tax.attribute(pred["slot"])
    actual = ann.value(region if attr.scope == "regional" else None, attr.name)
    op = pred["op"]
    if op == "eq":
        return actual == pred["value"]
    if op == "ne":
        return actual != pred["value"]
    if op == "in":
        return actual in pred["values"]
    if op == "not_in":
        return actual not in pred["values"]
    raise TaxonomyError(f"unknown predicate op {op!r}")


def validate_annotation(tax: Taxonomy, ann: HairstyleAnnotation) -> list[Violation]:
    """Check every consistency rule; an empty result means the annotation is valid.

    Structural problems (unknown attributes or values, missing slots) raise
    :class:`AnnotationError` instead of being reported as violations.
    Evaluation is deterministic: violations come out ordered by rule schema
    order, then region order for per-region rules.
    """
    _structural_check(tax, ann)
    violations: list[Violation] = []
    for rule in tax.rules:
        if rule.scope == "per_region":
            for region in tax.regions:
                if _eval_predicate(tax, ann, rule.condition, region) and not (
                    _eval_predicate(tax, ann, rule.requirement, region)
                ):
                    violations.append(
                        Violation(rule.id, f"{region}/{rule.path}", rule.message)
                    )
        else:
            if _eval_predicate(tax, ann, rule.condition, None) and not (
                _eval_predicate(tax, ann, rule.requirement, None)
            ):
                violations.append(Violation(rule.id, rule.path, rule.message))
    return violations


def flatten_labels(tax: Taxonomy, ann: HairstyleAnnotation) -> LabelVector:
    """Turn an annotation into its fixed-length vector of categorical indices."""
    _structural_check(tax, ann)
    layout = tax.layout()
    labels = []
    for a in tax.global_attributes:
        labels.append(a.index_of(ann.global_values[a.name]))
    for region in tax.regions:
        for a in tax.regional_attributes:
            labels.append(a.index_of(ann.regional_values[region][a.name]))
    return LabelVector(labels=tuple(labels), layout=layout)


def unflatten_labels(
    tax: Taxonomy, labels: Iterable[int], style_id: str = ""
) -> HairstyleAnnotation:
    """Inverse of :func:`flatten_labels` for the same taxonomy."""
    labels = list(labels)
    layout = tax.layout()
    if len(labels) != len(layout):
        raise AnnotationError(
            f"expected {len(layout)} labels, got {len(labels)}"
        )
    globals_count = len(tax.global_attributes)
    global_values = {}
    for a, idx in zip(tax.global_attributes, labels[:globals_count]):
        if not 0 <= idx < a.cardinality:
            raise AnnotationError(f"label {idx} out of range for {a.name!r}")
        global_values[a.name] = a.values[idx]
    regional_values: dict[str, dict[str, str]] = {}
    pos = globals_count
    for region in tax.regions:
        row = {}
        for a in tax.regional_attributes:
            idx = labels[pos]
            if not 0 <= idx < a.cardinality:
                raise AnnotationError(
                    f"label {idx} out of range for {region}/{a.name}"
                )
            row[a.name] = a.values[idx]
            pos += 1
        regional_values[region] = row
    return HairstyleAnnotation(
        style_id=style_id, global_values=global_values, regional_values=regional_values
    )


def is_bald(tax: Taxonomy, ann: HairstyleAnnotation) -> bool:
    """True iff every region's Hair Length is the bald value (shaved is not bald)."""
    return all(
        ann.regional_values[r]["Hair Length"] == BALD_VALUE for r in tax.regions
    )


def read_annotations(path: str | Path) -> dict[str, HairstyleAnnotation]:
    """Read a JSON Lines style library, keyed by style_id in file order."""
    out: dict[str, HairstyleAnnotation] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AnnotationError(f"{path}: line {lineno}: {exc}") from exc
            ann = HairstyleAnnotation.from_dict(doc)
            if ann.style_id in out:
                raise AnnotationError(
                    f"{path}: line {lineno}: duplicate style_id {ann.style_id!r}"
                )
            out[ann.style_id] = ann
    return out


def write_annotations(
    annotations: Iterable[HairstyleAnnotation], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ann in annotations:
            fh.write(json.dumps(ann.to_dict(), ensure_ascii=False) + "\n")


def iter_slots(tax: Taxonomy) -> Iterator[tuple[str | None, AttributeDef]]:
    """Yield (region, attribute) for every slot in layout order; region None = global."""
    for a in tax.global_attributes:
        yield None, a
    for region in tax.regions:
        for a in tax.regional_attributes:
            yield region, a
