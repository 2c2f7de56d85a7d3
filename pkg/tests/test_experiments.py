import numpy as np
import pytest

from ridgecov import experiments
from ridgecov.model import SparsityGraph


def write_sonar_like(path, rng, rows=40, p=60):
    with open(path, "w") as fh:
        for r in range(rows):
            label = "R" if r % 2 else "M"
            shift = 0.2 if label == "M" else 0.0
            values = np.clip(rng.random(p) * 0.5 + shift, 0, 1)
            fh.write(",".join(f"{v:.4f}" for v in values) + f",{label}\n")


def test_load_sonar_and_graphs(tmp_path):
    write_sonar_like(tmp_path / "s.csv", np.random.default_rng(0))
    X, labels = experiments.load_sonar(tmp_path / "s.csv")
    assert X.shape == (40, 60) and set(labels) == {"R", "M"}
    graphs = experiments.sonar_graphs(labels, 60, banded=True)
    assert graphs["M"] == SparsityGraph.banded(60, 31)
    assert graphs["R"] == SparsityGraph.banded(60, 17)
    assert experiments.sonar_graphs(labels, 60, banded=False)["R"] == SparsityGraph.complete(60)


def test_load_sonar_rejects_other_layouts(tmp_path):
    (tmp_path / "bad.csv").write_text("1,2,3,R\n4,5,6,M\n")
    with pytest.raises(ValueError):
        experiments.load_sonar(tmp_path / "bad.csv")


def test_sonar_error_runs_on_small_grid(tmp_path):
    write_sonar_like(tmp_path / "s.csv", np.random.default_rng(1), rows=60)
    X, labels = experiments.load_sonar(tmp_path / "s.csv")
    err = experiments.sonar_error(X[:, :8], labels, mode="both", outer_folds=3,
                                  inner_folds=3, r=3, s1=2)
    assert 0 <= err <= 100


def test_pinned_arm_uses_tiny_kappa_only_when_splits_are_singular():
    small = experiments.ridge_vs_lasso(7, 0, p=6, r=3, s1=2)
    large = experiments.ridge_vs_lasso(40, 0, p=6, r=3, s1=2)
    assert small.lasso_penalty.kappa == experiments.SINGULAR_KAPPA
    assert large.lasso_penalty.kappa == 0.0
    assert small.ridge_rmse > 0 and large.ridge_rmse > 0


def test_ridge_path_kappa_positive_for_tiny_samples():
    assert experiments.ridge_path_kappa(8, 0, p=10, kappa_count=6) > 0
