"""Collation rules, accuracy/fairness math, and the golden report."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hairmony.collation import METRICS, collate, length_bucket, max_regional_length
from hairmony.evaluation import (
    EvaluationError,
    attr_head_agreement,
    attribute_accuracy,
    fairness,
    render_fairness_table,
    render_table,
    report,
    to_csv,
)

from fairness_fixture import (
    CONSTANT_PREDICTION,
    EXPECTED_ACCURACY,
    EXPECTED_FAIRNESS,
    EXPECTED_MEAN_ACCURACY,
    EXPECTED_MEAN_FAIRNESS,
    canonical_dump,
    fixture_dataset,
)
from helpers import build_annotation


class TestCollate:
    def test_unanimous_regions_pass_through(self, tax):
        ann = build_annotation(
            tax, "x", all_region_mods={"Hair Type": "Curly", "Hair Length": "Chin length"}
        )
        got = collate(tax, ann)
        assert got["Hair Type"] == "Curly"
        assert got["Length"] == "Chin length"
        assert got["Bald"] is False
        assert got["Gathered"] is False
        assert got["Strands"] == "None"
        assert got["Bang Styling"] == "None"

    def test_modal_rule_seven_to_one(self, tax):
        ann = build_annotation(
            tax, "x", per_region={"Nape": {"Hair Type": "Coily"}}
        )
        assert collate(tax, ann)["Hair Type"] == "Straight"

    def test_modal_tie_breaks_by_region_order(self, tax):
        # four Straight vs four Coily; Front holds Straight, so Straight wins
        per_region = {
            r: {"Hair Type": "Coily"}
            for r in ("Top", "Nape", "Right Temple", "Left Temple")
        }
        ann = build_annotation(tax, "x", per_region=per_region)
        assert collate(tax, ann)["Hair Type"] == "Straight"
        # now give Front (and three others) Coily: Coily wins the tie
        per_region = {
            r: {"Hair Type": "Coily"}
            for r in ("Front", "Nape", "Right Temple", "Left Temple")
        }
        ann = build_annotation(tax, "x", per_region=per_region)
        assert collate(tax, ann)["Hair Type"] == "Coily"

    def test_length_is_ordinal_maximum(self, tax):
        per_region = {
            r: {"Hair Length": "Waist length or longer"}
            for r in ("Nape", "Crown", "Left Side", "Left Temple")
        }
        ann = build_annotation(
            tax, "x", all_region_mods={"Hair Length": "Chin length"}, per_region=per_region
        )
        assert collate(tax, ann)["Length"] == "Waist length or longer"

    def test_not_visible_excluded_from_maximum(self, tax):
        ann = build_annotation(
            tax,
            "x",
            all_region_mods={"Hair Length": "Ear length"},
            per_region={"Nape": {"Hair Length": "Hair not visible"}},
        )
        assert max_regional_length(tax, ann) == "Ear length"
        all_hidden = build_annotation(
            tax, "x", all_region_mods={"Hair Length": "Hair not visible"}
        )
        assert max_regional_length(tax, all_hidden) == "Hair not visible"

    def test_bald_collates_to_na_type_and_strands(self, tax):
        got = collate(tax, build_annotation(tax, "x", bald=True))
        assert got["Bald"] is True
        assert got["Hair Type"] == "N/A"
        assert got["Strands"] == "N/A"
        assert got["Length"] == "No hair/Bald (clipper 0)"

    def test_gathered_any_region(self, tax):
        ann = build_annotation(
            tax, "x", per_region={"Nape": {"Hair Gathered": "Bun, single"}}
        )
        assert collate(tax, ann)["Gathered"] is True

    def test_length_bucket_none_for_hidden(self, tax):
        assert length_bucket(tax, "Hair not visible") is None
        assert length_bucket(tax, "Ear length") == "Short"


class TestAccuracy:
    def _labels(self, tax, *anns):
        return [collate(tax, a) for a in anns]

    def test_perfect_and_zero(self, tax):
        a = build_annotation(tax, "a")
        b = build_annotation(tax, "b", all_region_mods={"Hair Type": "Coily"})
        same = self._labels(tax, a, a)
        assert attribute_accuracy(same, same, "Hair Type") == 1.0
        assert attribute_accuracy(self._labels(tax, a, a), self._labels(tax, b, b), "Hair Type") == 0.0

    def test_three_of_four(self, tax):
        a = build_annotation(tax, "a")
        b = build_annotation(tax, "b", all_region_mods={"Hair Type": "Coily"})
        preds = self._labels(tax, a, a, a, a)
        truths = self._labels(tax, a, a, a, b)
        assert attribute_accuracy(preds, truths, "Hair Type") == 0.75

    def test_length_mismatch(self, tax):
        a = self._labels(tax, build_annotation(tax, "a"))
        with pytest.raises(EvaluationError, match="predictions"):
            attribute_accuracy(a, a + a, "Bald")

    def test_permutation_invariant(self, tax):
        rng = np.random.default_rng(0)
        a = build_annotation(tax, "a")
        b = build_annotation(tax, "b", all_region_mods={"Hair Type": "Coily"})
        preds = self._labels(tax, a, a, b, b, a)
        truths = self._labels(tax, a, b, b, a, a)
        base = attribute_accuracy(preds, truths, "Hair Type")
        perm = rng.permutation(5)
        shuffled = attribute_accuracy(
            [preds[i] for i in perm], [truths[i] for i in perm], "Hair Type"
        )
        assert shuffled == base


class TestFairness:
    def test_equal_groups_exactly_100(self):
        assert fairness({"F": 0.9, "M": 0.9}) == 100.0

    def test_mean_over_max_exactly_90(self):
        assert fairness({"a": 0.8, "b": 0.9, "c": 1.0}) == 90.0

    def test_single_group(self):
        assert fairness({"x": 0.7}) == 100.0

    def test_all_zero_is_an_error(self):
        with pytest.raises(EvaluationError, match="undefined"):
            fairness({"a": 0.0, "b": 0.0})

    def test_scale_invariance(self):
        base = fairness({"a": 0.4, "b": 0.8, "c": 0.6})
        for c in (0.1, 0.5, 1.0):
            scaled = fairness({k: c * v for k, v in {"a": 0.4, "b": 0.8, "c": 0.6}.items()})
            assert scaled == pytest.approx(base, abs=1e-12)

    @given(
        st.dictionaries(
            st.text(min_size=1, max_size=4),
            st.floats(min_value=0.0, max_value=1.0),
            min_size=1,
            max_size=6,
        ).filter(lambda d: max(d.values()) > 0)
    )
    def test_bounded_and_equality_condition(self, groups):
        value = fairness(groups)
        assert 0.0 < value <= 100.0
        values = list(groups.values())
        if max(values) == min(values):
            assert value == 100.0
        if value >= 100.0 - 1e-12:
            # near-100 only happens when groups are (relatively) near-equal
            assert max(values) - min(values) <= 1e-10 * max(values)


class TestReport:
    def test_perfect_predictor(self, tax):
        ds = fixture_dataset(tax)
        doc = report(tax, ds, [rec.style_id for rec in ds.samples], label="oracle")
        for metric in METRICS:
            entry = doc["metrics"][metric]
            assert entry["overall_accuracy"] == 1.0
            for cat in ("gender", "age", "ancestry"):
                assert entry["per_category"][cat]["fairness"] == 100.0
        assert doc["mean_accuracy"] == 1.0
        assert doc["mean_fairness"] == 100.0

    def test_constant_predictor_hand_values(self, tax):
        ds = fixture_dataset(tax)
        doc = report(tax, ds, [CONSTANT_PREDICTION] * 8, label="constant")
        for metric, acc in EXPECTED_ACCURACY.items():
            assert doc["metrics"][metric]["overall_accuracy"] == pytest.approx(acc), metric
        for (metric, cat), value in EXPECTED_FAIRNESS.items():
            got = doc["metrics"][metric]["per_category"][cat]["fairness"]
            assert got == pytest.approx(value, abs=1e-9), (metric, cat)
        assert doc["mean_accuracy"] == pytest.approx(EXPECTED_MEAN_ACCURACY, abs=1e-12)
        assert doc["mean_fairness"] == pytest.approx(EXPECTED_MEAN_FAIRNESS, abs=1e-9)

    def test_golden_file_byte_for_byte(self, tax, golden_dir):
        ds = fixture_dataset(tax)
        doc = report(tax, ds, [CONSTANT_PREDICTION] * 8, label="constant")
        golden = (golden_dir / "fairness_report.json").read_bytes()
        assert canonical_dump(doc) == golden

    def test_missing_demographics_listed(self, tax):
        ds = fixture_dataset(tax)
        stripped = ds.samples[3]
        broken = list(ds.samples)
        broken[3] = type(stripped)(stripped.sample_id, stripped.style_id, None)
        ds2 = type(ds)(features=ds.features, samples=tuple(broken), styles=ds.styles)
        with pytest.raises(EvaluationError, match="s4"):
            report(tax, ds2, [CONSTANT_PREDICTION] * 8)

    def test_prediction_count_mismatch(self, tax):
        ds = fixture_dataset(tax)
        with pytest.raises(EvaluationError, match="predictions"):
            report(tax, ds, [CONSTANT_PREDICTION] * 7)

    def test_unknown_predicted_style(self, tax):
        ds = fixture_dataset(tax)
        with pytest.raises(EvaluationError, match="not in library"):
            report(tax, ds, ["mystery"] * 8)

    def test_report_header_names_collation(self, tax):
        ds = fixture_dataset(tax)
        doc = report(tax, ds, [CONSTANT_PREDICTION] * 8)
        assert doc["_meta"]["collation"] == "collation v1"


class TestRenderers:
    @pytest.fixture
    def doc(self, tax):
        ds = fixture_dataset(tax)
        return report(tax, ds, [CONSTANT_PREDICTION] * 8, label="constant")

    def test_text_table_layout(self, doc):
        text = render_table([doc])
        lines = text.splitlines()
        assert lines[0] == "# collation v1"
        header = lines[1]
        for column in (*METRICS, "Mean Accuracy", "Mean Fairness"):
            assert column in header
        assert "constant" in lines[3]
        assert "75.0%" in lines[3]

    def test_fairness_table(self, doc):
        text = render_fairness_table([doc])
        assert "Length/age" in text.splitlines()[1]
        assert "50.0%" in text

    def test_csv(self, doc):
        rows = to_csv([doc]).splitlines()
        assert rows[0].startswith("method,Bald,")
        assert rows[1].startswith("constant,0.75,")


class TestDiagnostics:
    def test_attr_head_agreement(self):
        a = np.array([[0, 1, 2], [1, 1, 1]])
        b = np.array([[0, 1, 0], [1, 1, 1]])
        assert attr_head_agreement(a, b) == pytest.approx(5 / 6)
        with pytest.raises(EvaluationError, match="shape"):
            attr_head_agreement(a, b[:, :2])
