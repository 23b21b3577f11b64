"""Catalog loaders exercised on synthetic files at the real geometries."""

import numpy as np
import pytest

from anobench import catalog
from anobench.errors import DataError

KDD_ATTACKS = ["neptune.", "smurf.", "back.", "teardrop."]
NSL_ATTACKS = ["neptune", "smurf", "satan"]


def write_kdd_like(path, n_rows, attack_fraction, attacks, normal_label, seed=0,
                   extra_difficulty=False):
    """Headerless rows shaped like the intrusion captures (41 cols + label)."""
    gen = np.random.default_rng(seed)
    *_, label_spec = catalog._KDD_COLUMNS
    lines = []
    for i in range(n_rows):
        is_attack = gen.random() < attack_fraction
        values = []
        for name, kind in catalog._KDD_COLUMNS:
            if kind == catalog.KIND_CATEGORICAL:
                pool = {
                    "protocol_type": ["tcp", "udp", "icmp"],
                    "service": ["http", "smtp", "ftp"],
                    "flag": ["SF", "S0"],
                }.get(name, ["0", "1"])
                if name == "is_host_login":
                    # single value in the 10% capture, two values in NSL
                    pool = ["0"] if not extra_difficulty else ["0", "1"]
                values.append(str(gen.choice(pool)))
            else:
                values.append(f"{gen.random() * (10 if is_attack else 1):.4f}")
        values.append(str(gen.choice(attacks)) if is_attack else normal_label)
        if extra_difficulty:
            values.append(str(gen.integers(0, 21)))
        lines.append(",".join(values))
    path.write_text("\n".join(lines) + "\n")


class TestOddsCatalog:
    def test_thyroid_geometry_and_stats(self, tmp_path):
        from scipy.io import savemat

        gen = np.random.default_rng(1)
        X = gen.normal(size=(3772, 6))
        y = np.zeros((3772, 1))
        y[:93] = 1.0
        savemat(tmp_path / "thyroid.mat", {"X": X, "y": y})
        ds = catalog.load_catalog_dataset("thyroid", tmp_path)
        n, d, rho = catalog.EXPECTED_STATS["thyroid"]
        assert ds.n_samples == n and ds.n_features == d
        assert abs(ds.anomaly_ratio - rho) <= 1e-4

    def test_missing_file_message(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            catalog.load_catalog_dataset("arrhythmia", tmp_path)

    def test_unknown_name(self, tmp_path):
        with pytest.raises(DataError, match="unknown catalog dataset"):
            catalog.load_catalog_dataset("nope", tmp_path)


class TestKddCatalog:
    def test_kddcup10_minority_class_is_normal_traffic(self, tmp_path):
        path = tmp_path / "kddcup.data_10_percent"
        write_kdd_like(path, 600, attack_fraction=0.8, attacks=KDD_ATTACKS,
                       normal_label="normal.")
        ds = catalog.load_catalog_dataset("kddcup10", tmp_path)
        # positives are the normal-traffic rows (the minority here)
        assert 0.1 < ds.anomaly_ratio < 0.3
        # num_outbound_cmds and is_host_login dropped; 5 kept categoricals
        assert not any(n.startswith("is_host_login") for n in ds.feature_names)
        assert not any(n.startswith("num_outbound_cmds") for n in ds.feature_names)

    def test_nsl_kdd_concatenates_and_keeps_is_host_login(self, tmp_path):
        write_kdd_like(tmp_path / "KDDTrain+.txt", 400, 0.45, NSL_ATTACKS,
                       "normal", seed=2, extra_difficulty=True)
        write_kdd_like(tmp_path / "KDDTest+.txt", 200, 0.55, NSL_ATTACKS,
                       "normal", seed=3, extra_difficulty=True)
        ds = catalog.load_catalog_dataset("nsl-kdd", tmp_path)
        assert ds.n_samples == 600
        assert any(n.startswith("is_host_login") for n in ds.feature_names)
        assert not any(n.startswith("difficulty") for n in ds.feature_names)
        # anomalies are the attacks (the minority in this capture)
        assert 0.3 < ds.anomaly_ratio <= 0.5


class TestHyperparameterTables:
    def test_lof_neighbors(self):
        assert catalog.LOF_NEIGHBORS["arrhythmia"] == 50
        assert catalog.LOF_NEIGHBORS["thyroid"] == 20

    def test_dae_settings(self):
        assert catalog.DAE_SETTINGS["arrhythmia"] == {
            "latent_dim": 3, "epochs": 10000, "batch_size": 128,
        }
        assert catalog.DAE_SETTINGS["thyroid"]["latent_dim"] == 2

    def test_ocsvm_nu(self):
        assert catalog.OCSVM_NU["thyroid"] == 0.05
        assert catalog.OCSVM_NU["arrhythmia"] == 0.40
