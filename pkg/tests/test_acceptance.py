"""Acceptance suite: one test per criterion, printing PASS/FAIL per check.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Criteria that need the real benchmark files (Thyroid/Arrhythmia
.mat, NSL-KDD) skip with an explanatory message when the files are absent;
everything else runs self-contained.
"""

import time

import numpy as np
import pytest

from anobench import catalog, metrics, rng, splits
from anobench.audits import audit_ratio_manipulation, class_swap_rows
from anobench.detectors import DaeConfig, lof_fit, lof_score
from anobench.detectors import autograd as ag
from anobench.detectors.dae import _forward_loss
from anobench.engine import ExperimentSpec, run_experiment
from anobench.metrics import ScoreSet, Threshold

from . import oracles
from .conftest import DATA_DIR, require_file
from .test_dae import finite_difference_grads, make_params


def check(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"{status}: {name}" + (f" [{detail}]" if detail else ""))
    assert ok, f"{name} {detail}"


def load_real(name: str, filename: str):
    require_file(filename)
    return catalog.load_catalog_dataset(name, DATA_DIR)


# ---------------------------------------------------------------------------
# Reference-detector criteria on the real benchmark files (skip when absent)
# ---------------------------------------------------------------------------


class TestReferenceDetectors:
    def test_lof_on_arrhythmia(self):
        ds = load_real("arrhythmia", "arrhythmia.mat")
        start = time.time()
        spec = ExperimentSpec(
            name="arrhythmia-lof",
            detector="lof",
            detector_params={"k": catalog.LOF_NEIGHBORS["arrhythmia"]},
            split=splits.SplitSpec(seed=0),
            n_runs=20,
        )
        agg = run_experiment(ds, spec)
        elapsed = time.time() - start
        f1, prec, rec = agg.mean("f1"), agg.mean("precision"), agg.mean("recall")
        auroc_m, aupr_m = agg.mean("auroc"), agg.mean("aupr")
        check("lof/arrhythmia F1 within ±4 of 61.5", abs(100 * f1 - 61.5) <= 4.0,
              f"f1={100 * f1:.1f}")
        check("lof/arrhythmia precision ≈ 57.1", abs(100 * prec - 57.1) <= 5.0,
              f"precision={100 * prec:.1f}")
        check("lof/arrhythmia recall ≈ 66.7", abs(100 * rec - 66.7) <= 5.0,
              f"recall={100 * rec:.1f}")
        check("lof/arrhythmia std = 0 over 20 fixed-split runs",
              all(agg.std(m) == 0.0 for m in ("precision", "recall", "f1")),
              f"std_f1={agg.std('f1'):.4f}")
        check("lof/arrhythmia AUROC within ±3 of 81.3",
              abs(100 * auroc_m - 81.3) <= 3.0, f"auroc={100 * auroc_m:.1f}")
        check("lof/arrhythmia AUPR within ±4 of 67.0",
              abs(100 * aupr_m - 67.0) <= 4.0, f"aupr={100 * aupr_m:.1f}")
        check("lof/arrhythmia runtime < 1 min", elapsed < 60.0, f"{elapsed:.1f}s")

    def test_lof_on_thyroid(self):
        ds = load_real("thyroid", "thyroid.mat")
        start = time.time()
        spec = ExperimentSpec(
            name="thyroid-lof",
            detector="lof",
            detector_params={"k": catalog.LOF_NEIGHBORS["thyroid"]},
            split=splits.SplitSpec(seed=0),
            n_runs=20,
        )
        agg = run_experiment(ds, spec)
        elapsed = time.time() - start
        check("lof/thyroid F1 within ±4 of 68.6",
              abs(100 * agg.mean("f1") - 68.6) <= 4.0, f"f1={100 * agg.mean('f1'):.1f}")
        check("lof/thyroid AUROC within ±2 of 97.2",
              abs(100 * agg.mean("auroc") - 97.2) <= 2.0,
              f"auroc={100 * agg.mean('auroc'):.1f}")
        check("lof/thyroid AUPR within ±5 of 72.2",
              abs(100 * agg.mean("aupr") - 72.2) <= 5.0,
              f"aupr={100 * agg.mean('aupr'):.1f}")
        check("lof/thyroid runtime < 1 min", elapsed < 60.0, f"{elapsed:.1f}s")

    def test_lof_thyroid_split_counts_match_label_scan(self):
        ds = load_real("thyroid", "thyroid.mat")
        result = splits.split(ds, splits.SplitSpec(seed=0))
        check("thyroid proposed split counts 1839/1840+93",
              result.counts == (1839, 0, 1840, 93), str(tuple(result.counts)))

    def test_dae_on_arrhythmia(self):
        ds = load_real("arrhythmia", "arrhythmia.mat")
        start = time.time()
        settings = catalog.DAE_SETTINGS["arrhythmia"]
        spec = ExperimentSpec(
            name="arrhythmia-dae",
            detector="dae",
            detector_params={
                "latent_dim": settings["latent_dim"],   # 3
                "epochs": settings["epochs"],           # 10000
                "batch_size": settings["batch_size"],   # 128
                "learning_rate": 1e-4,
            },
            split=splits.SplitSpec(seed=0),
            n_runs=5,  # run count not pinned by the criterion; 5 seeded runs
        )
        agg = run_experiment(ds, spec)
        elapsed = time.time() - start
        check("dae/arrhythmia F1 mean within ±6 of 61.5",
              abs(100 * agg.mean("f1") - 61.5) <= 6.0,
              f"f1={100 * agg.mean('f1'):.1f}±{100 * agg.std('f1'):.1f}")
        check("dae/arrhythmia nonzero std over seeded runs", agg.std("f1") > 0.0,
              f"std={100 * agg.std('f1'):.2f}")
        check("dae/arrhythmia AUROC within ±4 of 81.7",
              abs(100 * agg.mean("auroc") - 81.7) <= 4.0,
              f"auroc={100 * agg.mean('auroc'):.1f}")
        check("dae/arrhythmia runtime < 15 min", elapsed < 900.0, f"{elapsed:.0f}s")

    def test_table1_statistics_for_present_datasets(self):
        checked = 0
        for name, filename in (("thyroid", "thyroid.mat"), ("arrhythmia", "arrhythmia.mat")):
            if not (DATA_DIR / filename).exists():
                continue
            ds = catalog.load_catalog_dataset(name, DATA_DIR)
            n, d, rho = catalog.EXPECTED_STATS[name]
            check(f"{name} catalog stats (N, D, rho)",
                  ds.n_samples == n and ds.n_features == d
                  and abs(ds.anomaly_ratio - rho) <= 1e-4,
                  f"N={ds.n_samples} D={ds.n_features} rho={ds.anomaly_ratio:.4f}")
            checked += 1
        if not checked:
            pytest.skip(f"no catalog .mat files under {DATA_DIR}")


# ---------------------------------------------------------------------------
# Metric property suite (no dataset required, < 1 min)
# ---------------------------------------------------------------------------


class TestMetricProperties:
    def test_random_scorer_aupr_equals_prevalence(self):
        start = time.time()
        for rho in (0.05, 0.1, 0.3):
            gen = np.random.Generator(np.random.PCG64(1234))
            values = []
            for _ in range(100):
                labels = (gen.random(10_000) < rho).astype(int)
                scores = gen.random(10_000)
                values.append(metrics.aupr(ScoreSet(scores, labels)))
            mean = float(np.mean(values))
            check(f"random-scorer AUPR = rho ± 0.02 (rho={rho})",
                  abs(mean - rho) <= 0.02, f"mean={mean:.4f}")
        check("metric property suite timing", time.time() - start < 60.0)

    def test_perfect_scorer_all_metrics_one(self):
        labels = np.array([0] * 80 + [1] * 20)
        scores = np.linspace(0, 1, 100)  # positives hold the top scores
        ss = ScoreSet(scores, labels)
        report = metrics.evaluate(ss, policy=metrics.POLICY_OPTIMAL_F1)
        ok = all(
            v == 1.0
            for v in (report.precision, report.recall, report.f1,
                      report.auroc, report.aupr)
        )
        check("perfect scorer -> all metrics 1", ok,
              f"f1={report.f1} auroc={report.auroc} aupr={report.aupr}")

    def _random_scoreset(self, seed, n=400):
        gen = np.random.Generator(np.random.PCG64(seed))
        labels = (gen.random(n) < 0.2).astype(int)
        labels[0], labels[1] = 1, 0
        scores = np.round(gen.normal(labels.astype(float), 1.2), 3)
        return ScoreSet(scores, labels)

    def test_monotone_transform_invariance_100_scoresets(self):
        transforms = (lambda s: 3.0 * s + 2.0, lambda s: s**3, lambda s: np.exp(s / 5.0))
        worst = 0.0
        for seed in range(100):
            ss = self._random_scoreset(seed)
            base = (metrics.auroc(ss), metrics.aupr(ss))
            base_set = metrics.flag(ss.scores, metrics.optimal_threshold(ss).value)
            g = transforms[seed % len(transforms)]
            tr = ScoreSet(g(ss.scores), ss.labels)
            worst = max(worst, abs(metrics.auroc(tr) - base[0]),
                        abs(metrics.aupr(tr) - base[1]))
            assert np.array_equal(
                metrics.flag(tr.scores, metrics.optimal_threshold(tr).value), base_set
            )
        check("monotone-transform invariance of AUROC/AUPR/argmax-F1 (100 sets)",
              worst <= 1e-12, f"worst drift={worst:.2e}")

    def test_optimal_dominates_percentile_100_scoresets(self):
        margin = 0.0
        for seed in range(100):
            ss = self._random_scoreset(seed + 1000)
            f1_opt = metrics.prf1(ss, metrics.optimal_threshold(ss)).f1
            f1_pct = metrics.prf1(ss, metrics.percentile_threshold(ss, ss.rho)).f1
            margin = min(margin, f1_opt - f1_pct)
        check("optimal-F1 >= percentile-F1 on 100 random ScoreSets",
              margin >= -1e-12, f"min margin={margin:.2e}")

    def test_class_swap_identity(self):
        # Swapping labels and the class of interest flips the whole problem,
        # including score orientation; the reports must coincide exactly.
        mismatches = 0
        for seed in range(50):
            ss = self._random_scoreset(seed + 2000)
            tau = float(np.median(ss.scores)) + 1e-9  # generic: not a score
            original = metrics.prf1(ss, Threshold(value=tau), metrics.MAJORITY)
            flipped = ScoreSet(-ss.scores, 1 - ss.labels)
            swapped = metrics.prf1(flipped, Threshold(value=-tau), metrics.MINORITY)
            if (swapped.precision, swapped.recall, swapped.f1, swapped.confusion) != (
                original.precision, original.recall, original.f1, original.confusion
            ):
                mismatches += 1
        check("class-swap identity (swap labels + positive class)", mismatches == 0,
              f"{mismatches} mismatches")


# ---------------------------------------------------------------------------
# Split invariant suite
# ---------------------------------------------------------------------------


class TestSplitInvariants:
    CATALOG_GEOMETRY = {
        # name -> (normals, anomalies); counts from the catalog statistics
        "thyroid": (3679, 93),
        "arrhythmia": (386, 66),
        "kddcup10": (396743, 97278),
        "nsl-kdd": (77065, 71452),
        "ids2018_scaled": (134844, 27485),  # ids2018 geometry at 1/100 scale
    }

    def test_proposed_places_every_anomaly_in_test(self):
        for name, (n_norm, n_anom) in self.CATALOG_GEOMETRY.items():
            y = np.concatenate([np.zeros(n_norm, dtype=np.uint8),
                                np.ones(n_anom, dtype=np.uint8)])
            seeds = 1000 if n_norm + n_anom < 10_000 else 50
            violations = 0
            for seed in range(seeds):
                res = splits.split(y, splits.SplitSpec(seed=seed))
                if res.counts.train_anomalies != 0 or res.counts.test_anomalies != n_anom:
                    violations += 1
            check(f"proposed split isolates anomalies in test ({name}, {seeds} seeds)",
                  violations == 0, f"{violations} violations")
        # full-size 1000-seed sweep on the two desk-scale catalog geometries
        for name in ("thyroid", "arrhythmia"):
            n_norm, n_anom = self.CATALOG_GEOMETRY[name]
            y = np.concatenate([np.zeros(n_norm, dtype=np.uint8),
                                np.ones(n_anom, dtype=np.uint8)])
            bad = sum(
                splits.split(y, splits.SplitSpec(seed=s)).counts.train_anomalies
                for s in range(1000)
            )
            check(f"{name}: zero train anomalies across 1000 seeds", bad == 0)

    def test_discarding_keeps_half_the_anomalies_of_recycling(self):
        y = np.concatenate([np.zeros(1800, dtype=np.uint8), np.ones(200, dtype=np.uint8)])
        recycling = splits.split(y, splits.SplitSpec(strategy="recycling", seed=0))
        discard_counts = [
            splits.split(y, splits.SplitSpec(strategy="discarding", seed=s)).counts.test_anomalies
            for s in range(1000)
        ]
        ratio = np.mean(discard_counts) / recycling.counts.test_anomalies
        check("discarding test-anomaly count = 1/2 recycling ± 5% (1000 seeds)",
              abs(ratio - 0.5) <= 0.05 * 0.5, f"ratio={ratio:.4f}")

    def test_corruption_moves_exactly_rounded_count(self):
        for n_anom in (20, 66, 93, 200):
            y = np.concatenate([np.zeros(1000, dtype=np.uint8),
                                np.ones(n_anom, dtype=np.uint8)])
            res = splits.split(y, splits.SplitSpec(seed=3))
            corrupted = splits.inject_corruption(res, y, 0.1, seed=5)
            expected = int(np.floor(0.1 * n_anom + 0.5))
            check(f"corruption 0.1 moves round(0.1*{n_anom}) = {expected}",
                  corrupted.counts.train_anomalies == expected,
                  f"moved={corrupted.counts.train_anomalies}")


# ---------------------------------------------------------------------------
# Native-detector oracle criteria
# ---------------------------------------------------------------------------


class TestDetectorOracles:
    def test_lof_bruteforce_equivalence_up_to_200_points(self):
        worst_exact = True
        for seed, n, d, k in ((0, 80, 3, 7), (1, 140, 2, 12), (2, 200, 4, 20)):
            gen = np.random.default_rng(seed)
            train = gen.random((n, d))
            test = gen.random((50, d))
            model = lof_fit(train, k)
            scores = lof_score(model, test)
            naive_self, naive_scores = oracles.lof_naive(train, test, k)
            worst_exact &= np.array_equal(model.train_lof, naive_self)
            worst_exact &= np.array_equal(scores, naive_scores)
        check("lof equals naive all-pairs oracle exactly (n <= 200)", worst_exact)

    def test_dae_gradient_check_10_seeds(self):
        worst = 0.0
        for seed in range(10):
            gen = np.random.default_rng(seed)
            batch = gen.random((5, 4))
            params = make_params([4, 3, 2, 3, 4], seed)
            loss = _forward_loss(params, batch)
            loss.backward()
            numeric = finite_difference_grads(params, batch)
            for p, num in zip(params, numeric):
                rel = np.abs(p.grad - num) / np.maximum(np.abs(num), 1e-8)
                worst = max(worst, float(rel.max()))
        check("dae finite-difference gradient check < 1e-4 (10 seeds)",
              worst < 1e-4, f"worst rel err={worst:.2e}")


# ---------------------------------------------------------------------------
# Audit reproduction criteria
# ---------------------------------------------------------------------------


class TestAuditReproductions:
    def test_class_swap_on_all_negative_predictor(self):
        ss = ScoreSet(np.zeros(100), [1] * 10 + [0] * 90)
        rows = class_swap_rows(ss, Threshold(value=1.0))
        minority = next(r for r in rows if r["positive_class"] == "minority")
        majority = next(r for r in rows if r["positive_class"] == "majority")
        check("all-negative predictor: minority F1 = 0", minority["f1"] == 0.0)
        check("all-negative predictor: majority F1 ≈ 0.947",
              abs(majority["f1"] - 0.947) < 0.001, f"f1={majority['f1']:.4f}")

    def test_ratio_manipulation_moves_f1_not_auroc(self):
        gen = np.random.default_rng(3)
        scores = np.concatenate([gen.normal(0, 1, 900), gen.normal(1.5, 1, 100)])
        labels = np.array([0] * 900 + [1] * 100)
        rows = audit_ratio_manipulation(ScoreSet(scores, labels), ratios=(1.0, 2.0))
        delta_f1 = rows[1]["f1"] - rows[0]["f1"]
        delta_auroc = abs(rows[1]["delta_auroc"])
        check("2x positive duplication: fixed-tau F1 change > 0.05",
              delta_f1 > 0.05, f"delta={delta_f1:.4f}")
        check("2x positive duplication: AUROC change < 0.005",
              delta_auroc < 0.005, f"delta={delta_auroc:.6f}")


# ---------------------------------------------------------------------------
# NSL-KDD scale criterion: ingest + LOF on a 10% subsample, report only
# ---------------------------------------------------------------------------


class TestScalePipeline:
    def test_nsl_kdd_ingests_and_lof_runs_on_subsample(self):
        require_file("KDDTrain+.txt")
        require_file("KDDTest+.txt")
        ds = catalog.load_catalog_dataset("nsl-kdd", DATA_DIR)
        n, d, rho = catalog.EXPECTED_STATS["nsl-kdd"]
        check("nsl-kdd ingests", ds.n_samples == n and abs(ds.anomaly_ratio - rho) <= 1e-4,
              f"N={ds.n_samples} rho={ds.anomaly_ratio:.4f}")
        keep = rng.subsample(7, np.arange(ds.n_samples), ds.n_samples // 10)
        from anobench.data import TabularDataset

        sub = TabularDataset(
            name="nsl-kdd-10pct",
            features=ds.features[np.sort(keep)],
            labels=ds.labels[np.sort(keep)],
            feature_names=ds.feature_names,
        )
        spec = ExperimentSpec(
            name="nsl-kdd-10pct-lof",
            detector="lof",
            detector_params={"k": catalog.LOF_NEIGHBORS["nsl-kdd"]},
            split=splits.SplitSpec(seed=0),
            n_runs=1,
        )
        agg = run_experiment(sub, spec)
        report = agg.reports[0]
        # Metrics are reported, not asserted: full-scale reproduction is out
        # of desk-scale scope.
        print(
            f"REPORT: nsl-kdd 10% subsample LOF: f1={report.f1:.3f} "
            f"auroc={report.auroc:.3f} aupr={report.aupr:.3f}"
        )
        check("nsl-kdd 10% subsample LOF completes", True)
