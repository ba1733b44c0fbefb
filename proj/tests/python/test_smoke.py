import json
import math

import pytest

import dicausal

YELLOW = [[0.8], [0.6, 0.9], [0.4, 0.45, 0.6]]


def test_yellow_metrics():
    r = dicausal.metrics(YELLOW)
    assert r["num_domains"] == 3
    assert r["af"] == pytest.approx(0.425, abs=1e-12)
    assert r["rf"] == pytest.approx(0.5, abs=1e-12)
    assert r["prf"] == pytest.approx(0.2875, abs=1e-12)
    assert r["acc"] == pytest.approx(1.45 / 3, abs=1e-12)


def test_single_domain_has_no_forgetting():
    r = dicausal.metrics([[0.7]])
    assert r["af"] is None and r["rf"] is None and r["prf"] is None


def test_malformed_matrix_raises():
    with pytest.raises(dicausal.DataError):
        dicausal.metrics([[0.8], [0.6]])


def test_kl_of_unit_gaussians():
    assert dicausal.diagonal_gaussian_kl([0.0], [1.0], [0.0], [1.0]) == 0.0
    # KL(N(1, 1) || N(0, 1)) = 1/2
    assert dicausal.diagonal_gaussian_kl([1.0], [1.0], [0.0], [1.0]) == pytest.approx(0.5)


def test_plan_partners():
    labels = [0, 0, 1, 1, 2]
    intra, inter = dicausal.plan_perturbations(labels, seed=3)
    for i, label in enumerate(labels):
        assert labels[intra[i]] == label
        assert labels[inter[i]] != label
    assert intra[4] == 4
    _, single = dicausal.plan_perturbations([1, 1, 1], seed=3)
    assert single == [None, None, None]


def test_disentangle_complements():
    d = dicausal.disentangle([[0.3, -1.0], [2.0, 0.5]], [0.1, -0.2], [[1.0, -2.0], [0.5, 3.0]])
    z = [[1.0, -2.0], [0.5, 3.0]]
    for i in range(2):
        for j in range(2):
            assert d["causal_mask"][i][j] + d["spurious_mask"][i][j] == pytest.approx(1.0, abs=1e-12)
            assert d["causal"][i][j] + d["spurious"][i][j] == pytest.approx(z[i][j], abs=1e-12)


def test_gen_and_run(tmp_path):
    synth = {"T": 2, "C": 2, "L": 16, "M": 2, "samples_per_domain": 40, "seed": 5}
    config = {"encoder": "linear", "feature_dim": 8, "epochs": 2, "batch_size": 16, "seed": 1}
    (tmp_path / "synth.json").write_text(json.dumps(synth))
    (tmp_path / "run.json").write_text(json.dumps(config))

    code, out, err = dicausal.gen(str(tmp_path / "synth.json"), str(tmp_path / "data"))
    assert code == 0, err
    assert (tmp_path / "data" / "manifest.json").exists()

    code, out, err = dicausal.run(str(tmp_path / "run.json"), str(tmp_path / "run"), data=str(tmp_path / "data"))
    assert code == 0, err
    rows = (tmp_path / "run" / "matrix.csv").read_text().strip().splitlines()
    assert len(rows) == 2
    assert all(0.0 <= float(v) <= 1.0 for row in rows for v in row.split(","))
    result = json.loads((tmp_path / "run" / "result.json").read_text())
    assert math.isfinite(result["metrics"]["acc"])
    assert result["matrix"] == [[float(v) for v in row.split(",")] for row in rows]


def test_bad_config_exit_code(tmp_path):
    (tmp_path / "bad.json").write_text("{\"T\": 3,")
    code, _, err = dicausal.gen(str(tmp_path / "bad.json"), str(tmp_path / "out"))
    assert code == 2
    assert err
