"""MLR and RBF-network baselines."""

import numpy as np
import pytest

from qcreg import baselines as bl
from qcreg.data import Dataset, normalize, synthesize_surrogate
from qcreg.errors import ValidationError
from qcreg.training import r_squared


def linear_dataset(n=40, seed=0, noise=0.0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2, 2, (n, 2))
    y = 2.0 * X[:, 0] - X[:, 1] + 3.0 + noise * rng.standard_normal(n)
    return Dataset(["x1", "x2"], X, y)


def smooth_dataset(n=50, seed=1):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, (n, 2))
    y = np.sin(2 * X[:, 0]) + 0.5 * X[:, 1] ** 2
    return Dataset(["x1", "x2"], X, y)


class TestMlr:
    def test_exact_linear_recovery(self):
        model = bl.fit_mlr(linear_dataset())
        np.testing.assert_allclose(model.weights, [2.0, -1.0], atol=1e-8)
        assert model.intercept == pytest.approx(3.0, abs=1e-8)

    def test_noise_target_never_negative_train_r2(self):
        rng = np.random.default_rng(5)
        ds = Dataset(["a", "b"], rng.uniform(-1, 1, (60, 2)), rng.standard_normal(60))
        model = bl.fit_mlr(ds)
        score = r_squared(ds.y, bl.predict_mlr(model, ds.X))
        assert 0.0 <= score < 0.3

    def test_residual_matches_pinv_oracle(self):
        rng = np.random.default_rng(7)
        ds = Dataset(["a", "b", "c"], rng.standard_normal((80, 3)),
                     rng.standard_normal(80))
        model = bl.fit_mlr(ds)
        augmented = np.column_stack([ds.X, np.ones(80)])
        oracle = np.linalg.pinv(augmented) @ ds.y
        residual = ds.y - bl.predict_mlr(model, ds.X)
        residual_oracle = ds.y - augmented @ oracle
        assert np.sum(residual**2) == pytest.approx(
            float(np.sum(residual_oracle**2)), abs=1e-8
        )

    def test_residual_orthogonality(self):
        ds = linear_dataset(seed=3, noise=0.5)
        model = bl.fit_mlr(ds)
        residual = ds.y - bl.predict_mlr(model, ds.X)
        assert abs(residual.sum()) < 1e-8
        for j in range(ds.n_descriptors):
            assert abs(residual @ ds.X[:, j]) < 1e-8

    def test_needs_more_rows_than_columns(self):
        ds = Dataset(["a", "b"], np.eye(2), np.array([1.0, 2.0]))
        with pytest.raises(ValidationError):
            bl.fit_mlr(ds)


class TestRbf:
    def test_near_interpolation_with_all_centers(self):
        ds = smooth_dataset()
        model = bl.fit_rbf(ds, k=ds.n_samples, ridge=1e-8, seed=0)
        score = r_squared(ds.y, bl.predict_rbf(model, ds.X))
        assert score >= 0.999

    def test_single_center_below_full(self):
        ds = smooth_dataset(seed=2)
        low = bl.fit_rbf(ds, k=1, ridge=1e-8, seed=0)
        high = bl.fit_rbf(ds, k=ds.n_samples, ridge=1e-8, seed=0)
        assert r_squared(ds.y, bl.predict_rbf(low, ds.X)) <= r_squared(
            ds.y, bl.predict_rbf(high, ds.X)
        )

    def test_quadratic_benchmark(self):
        x = np.linspace(-1, 1, 50)
        ds = Dataset(["x"], x[:, None], x**2)
        model = bl.fit_rbf(ds, k=10, seed=0)
        assert r_squared(ds.y, bl.predict_rbf(model, ds.X)) >= 0.99

    def test_capacity_monotone_along_nested_centers(self):
        # nested function classes need the width held fixed across k
        ds = smooth_dataset(seed=4)
        order = bl.farthest_point_order(ds.X, ds.n_samples, seed=0)
        previous = np.inf
        for k in (1, 2, 5, 10, 20, 40):
            model = bl.fit_rbf_with_centers(ds, ds.X[order[:k]], ridge=1e-12,
                                            width=0.4)
            train_mse = float(np.mean((ds.y - bl.predict_rbf(model, ds.X)) ** 2))
            assert train_mse <= previous + 1e-10
            previous = train_mse

    def test_k_bounds(self):
        ds = smooth_dataset()
        with pytest.raises(ValidationError):
            bl.fit_rbf(ds, k=0)
        with pytest.raises(ValidationError):
            bl.fit_rbf(ds, k=ds.n_samples + 1)

    def test_seeded_determinism(self):
        ds = smooth_dataset(seed=6)
        a = bl.fit_rbf(ds, k=7, seed=3)
        b = bl.fit_rbf(ds, k=7, seed=3)
        np.testing.assert_array_equal(a.centers, b.centers)
        np.testing.assert_array_equal(a.weights, b.weights)

    def test_select_rbf_picks_best_validation_k(self):
        train = smooth_dataset(seed=8)
        val = smooth_dataset(seed=9)
        model, k = bl.select_rbf(train, val, k_values=(2, 10, 30), seed=0)
        assert k in (2, 10, 30)
        chosen = r_squared(val.y, bl.predict_rbf(model, val.X))
        for other in (2, 10, 30):
            alt = bl.fit_rbf(train, other, seed=0)
            assert chosen >= r_squared(val.y, bl.predict_rbf(alt, val.X)) - 1e-12


class TestSurrogateNonlinearity:
    def test_mlr_strictly_below_rbf(self):
        ds, _ = normalize(synthesize_surrogate(221, 5, seed=7))
        mlr = bl.fit_mlr(ds)
        rbf = bl.fit_rbf(ds, k=40, seed=0)
        mlr_score = r_squared(ds.y, bl.predict_mlr(mlr, ds.X))
        rbf_score = r_squared(ds.y, bl.predict_rbf(rbf, ds.X))
        assert mlr_score < rbf_score
        assert rbf_score > 0.8


class TestPersistence:
    def test_mlr_round_trip(self, tmp_path):
        model = bl.fit_mlr(linear_dataset(seed=11, noise=0.2))
        path = tmp_path / "mlr.txt"
        bl.save_baseline(model, str(path))
        loaded = bl.load_baseline(str(path))
        assert isinstance(loaded, bl.MlrModel)
        np.testing.assert_array_equal(loaded.weights, model.weights)
        assert loaded.intercept == model.intercept

    def test_rbf_round_trip(self, tmp_path):
        ds = smooth_dataset(seed=12)
        model = bl.fit_rbf(ds, k=6, seed=1)
        path = tmp_path / "rbf.txt"
        bl.save_baseline(model, str(path))
        loaded = bl.load_baseline(str(path))
        assert isinstance(loaded, bl.RbfModel)
        np.testing.assert_array_equal(loaded.centers, model.centers)
        np.testing.assert_array_equal(
            bl.predict_rbf(loaded, ds.X), bl.predict_rbf(model, ds.X)
        )
