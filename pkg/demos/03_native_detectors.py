"""The two native detectors on a synthetic problem, end to end.

LOF scores a point by how much sparser its neighborhood is than its
neighbors' neighborhoods; the autoencoder scores by squared reconstruction
error after training on normal data only.
"""

import numpy as np

from anobench.detectors import DaeConfig, dae_score, dae_train, lof_fit, lof_score
from anobench.metrics import ScoreSet, evaluate

rng = np.random.default_rng(1)

# Normals on a ring-ish manifold, anomalies inside and far outside.
n_train, n_test_normal, n_anom = 600, 300, 40
angles = rng.uniform(0, 2 * np.pi, n_train + n_test_normal)
radii = rng.normal(1.0, 0.08, n_train + n_test_normal)
ring = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
ring = np.hstack([ring, rng.normal(0, 0.05, size=(len(ring), 3))])
anomalies = np.vstack([
    rng.normal(0, 0.15, size=(n_anom // 2, 5)),          # inside the ring
    rng.normal(0, 1.0, size=(n_anom // 2, 5)) * 3.0,     # far outside
])

train = ring[:n_train]
test = np.vstack([ring[n_train:], anomalies])
test_labels = np.array([0] * n_test_normal + [1] * n_anom)
lo, hi = train.min(0), train.max(0)
scale = lambda X: np.clip((X - lo) / (hi - lo), 0, 1)
train_s, test_s = scale(train), scale(test)

print("--- local outlier factor ---")
model = lof_fit(train_s, k=20)
scores = lof_score(model, test_s)
report = evaluate(ScoreSet(scores, test_labels, detector_name="lof"))
print(f"train self-scores around 1: median {np.median(model.train_lof):.3f}")
print(f"anomaly median score {np.median(scores[test_labels == 1]):.2f} vs "
      f"normal median {np.median(scores[test_labels == 0]):.2f}")
print(f"f1={report.f1:.3f} auroc={report.auroc:.3f} aupr={report.aupr:.3f}\n")

print("--- deep autoencoder ---")
config = DaeConfig(latent_dim=2, epochs=400, batch_size=128, learning_rate=1e-3, seed=0)
dae = dae_train(train_s, config)
print(f"architecture {config.layer_dims(train_s.shape[1])}, "
      f"final training loss {dae.final_loss:.5f}")
scores = dae_score(dae, test_s)
report = evaluate(ScoreSet(scores, test_labels, detector_name="dae"))
print(f"reconstruction error, anomaly median {np.median(scores[test_labels == 1]):.4f} "
      f"vs normal median {np.median(scores[test_labels == 0]):.4f}")
print(f"f1={report.f1:.3f} auroc={report.auroc:.3f} aupr={report.aupr:.3f}")
