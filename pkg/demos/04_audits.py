"""Executable audits: how evaluation choices manufacture better numbers.

Three demonstrations on synthetic data: swapping the class of interest,
manipulating the positive count at a fixed threshold, and comparing split
strategies with one and the same trained detector.
"""

import numpy as np

from anobench.audits import audit_ratio_manipulation, audit_split_bias, class_swap_rows
from anobench.metrics import ScoreSet, Threshold

from_conftest = None  # demos stay dependency-free; build data inline
rng = np.random.default_rng(5)


print("--- audit 1: class of interest ---")
# A detector that flags nothing at its threshold, on 90/10 data.
ss = ScoreSet(np.zeros(100), [1] * 10 + [0] * 90)
for row in class_swap_rows(ss, Threshold(value=1.0)):
    extra = f"  (inflation +{row['inflation']:.3f})" if "inflation" in row else ""
    print(f"  positive={row['positive_class']:<9} f1={row['f1']:.3f}{extra}")
print("  A useless detector looks excellent against the majority class.\n")

print("--- audit 2: positive-count manipulation at fixed threshold ---")
scores = np.concatenate([rng.normal(0, 1, 900), rng.normal(1.5, 1, 100)])
labels = np.array([0] * 900 + [1] * 100)
rows = audit_ratio_manipulation(ScoreSet(scores, labels), ratios=(0.5, 1.0, 2.0, 4.0))
print(f"  {'ratio':<7}{'n_pos':<7}{'f1':<8}{'auroc':<8}")
for row in rows:
    print(f"  {row['ratio']:<7}{row['n_pos']:<7}{row['f1']:<8.3f}{row['auroc']:<8.3f}")
print("  F1 climbs with duplicated positives; the rank statistic stays put.\n")

print("--- audit 3: split-strategy bias, one trained detector ---")
n_norm, n_anom, dim = 800, 80, 6
X = np.vstack([
    rng.normal(0, 1, size=(n_norm, dim)),
    rng.normal(0, 1, size=(n_anom, dim)) + 2.5,
])
y = np.array([0] * n_norm + [1] * n_anom)
lo, hi = X.min(0), X.max(0)
from anobench.data import TabularDataset

ds = TabularDataset(name="audit-demo", features=(X - lo) / (hi - lo), labels=y)
rows = audit_split_bias(ds, "lof", {"k": 15}, seed=2)
print(f"  {'strategy':<12}{'test anomalies':<16}{'f1@shared tau':<15}{'aupr':<8}")
for row in rows:
    print(
        f"  {row['strategy']:<12}{row['test_anomalies']:<16}"
        f"{row['f1_at_shared_tau']:<15.3f}{row['aupr']:<8.3f}"
    )
print("  Discarding quietly halves the anomalies the detector is graded on.")
