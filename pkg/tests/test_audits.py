import numpy as np
import pytest

from anobench import metrics
from anobench.audits import (
    audit_class_swap,
    audit_ratio_manipulation,
    audit_split_bias,
    class_swap_rows,
)
from anobench.metrics import ScoreSet, Threshold

from .conftest import synthetic_dataset


class TestClassSwap:
    def test_all_negative_predictor_inflation(self):
        ss = ScoreSet(np.zeros(100), [1] * 10 + [0] * 90)
        rows = class_swap_rows(ss, Threshold(value=1.0))
        minority = next(r for r in rows if r["positive_class"] == "minority")
        majority = next(r for r in rows if r["positive_class"] == "majority")
        assert minority["f1"] == 0.0
        assert majority["f1"] == pytest.approx(2 * 0.9 / 1.9)  # ~0.947
        assert majority["inflation"] == pytest.approx(majority["f1"])

    def test_symmetric_balanced_scores_show_no_gap(self):
        gen = np.random.default_rng(0)
        n = 2000
        labels = np.array([0, 1] * (n // 2))
        scores = np.where(labels == 1, 1.0, -1.0) + gen.normal(0, 0.8, n)
        rows = class_swap_rows(ScoreSet(scores, labels), Threshold(value=0.0))
        gap = rows[1]["f1"] - rows[0]["f1"]
        assert abs(gap) < 0.02

    def test_detector_wrapper_runs_end_to_end(self):
        ds = synthetic_dataset(seed=21)
        rows = audit_class_swap(ds, "lof", {"k": 10}, seed=3)
        assert {r["positive_class"] for r in rows} == {"minority", "majority"}
        majority = next(r for r in rows if r["positive_class"] == "majority")
        minority = next(r for r in rows if r["positive_class"] == "minority")
        if majority["accuracy"] > ds.anomaly_ratio:
            assert majority["f1"] >= minority["f1"] - 1e-9


class TestRatioManipulation:
    def make_noisy_scoreset(self, seed=1, n_neg=900, n_pos=100):
        gen = np.random.default_rng(seed)
        scores = np.concatenate(
            [gen.normal(0.0, 1.0, n_neg), gen.normal(1.5, 1.0, n_pos)]
        )
        labels = np.array([0] * n_neg + [1] * n_pos)
        return ScoreSet(scores, labels)

    def test_ratio_one_is_identity(self):
        ss = self.make_noisy_scoreset()
        rows = audit_ratio_manipulation(ss, ratios=(1.0,))
        tau = metrics.percentile_threshold(ss, ss.rho)
        base = metrics.prf1(ss, Threshold(value=tau.value))
        assert rows[0]["f1"] == pytest.approx(base.f1)
        assert rows[0]["n_pos"] == ss.n_pos

    def test_doubling_positives_raises_f1_but_not_auroc(self):
        ss = self.make_noisy_scoreset()
        rows = audit_ratio_manipulation(ss, ratios=(1.0, 2.0))
        assert rows[1]["f1"] - rows[0]["f1"] > 0.05
        assert abs(rows[1]["delta_auroc"]) < 0.005

    def test_monotone_in_duplication(self):
        ss = self.make_noisy_scoreset(seed=2)
        rows = audit_ratio_manipulation(ss, ratios=(1.0, 2.0, 3.0, 4.0))
        f1s = [r["f1"] for r in rows]
        assert all(b > a for a, b in zip(f1s, f1s[1:]))

    def test_subsampling_positives(self):
        ss = self.make_noisy_scoreset(seed=3)
        rows = audit_ratio_manipulation(ss, ratios=(0.5,), seed=5)
        assert rows[0]["n_pos"] == 50
        again = audit_ratio_manipulation(ss, ratios=(0.5,), seed=5)
        assert rows[0]["f1"] == again[0]["f1"]  # seeded subsample

    def test_bad_ratio_rejected(self):
        ss = self.make_noisy_scoreset()
        with pytest.raises(ValueError):
            audit_ratio_manipulation(ss, ratios=(0.0,))


class TestSplitBias:
    def test_test_anomaly_counts_by_construction(self):
        ds = synthetic_dataset(n_normals=600, n_anomalies=80, seed=22)
        rows = audit_split_bias(ds, "lof", {"k": 10}, seed=4)
        by_strategy = {r["strategy"]: r for r in rows}
        assert by_strategy["proposed"]["test_anomalies"] == 80
        assert by_strategy["recycling"]["test_anomalies"] == 80
        # discarding keeps roughly half of the anomalies in its test half
        assert 20 <= by_strategy["discarding"]["test_anomalies"] <= 60

    def test_proposed_keeps_every_anomaly_from_the_catalog_ratio(self):
        ds = synthetic_dataset(n_normals=500, n_anomalies=55, seed=23)
        rows = audit_split_bias(ds, "lof", {"k": 10}, seed=5)
        proposed = next(r for r in rows if r["strategy"] == "proposed")
        # all anomalies present: count / dataset size reproduces dataset rho
        assert proposed["test_anomalies"] / ds.n_samples == pytest.approx(
            ds.anomaly_ratio
        )

    def test_fixed_tau_f1_delta_reported(self):
        ds = synthetic_dataset(n_normals=800, n_anomalies=100, seed=24)
        rows = audit_split_bias(ds, "lof", {"k": 15}, seed=6)
        by_strategy = {r["strategy"]: r for r in rows}
        assert by_strategy["proposed"]["delta_f1"] == 0.0
        assert "delta_f1" in by_strategy["discarding"]
        assert by_strategy["discarding"]["test_rho"] != pytest.approx(
            by_strategy["recycling"]["test_rho"], abs=1e-3
        )
