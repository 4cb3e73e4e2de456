import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from spbopt.partition import (
    HIGH,
    LOW,
    DegenerateSplit,
    PartitionPath,
    SplitModel,
    build_partition,
    fit_split_model,
    in_region,
    kmeans2_1d,
    predict_side,
    region_margin,
    smo,
    _kernel,
)


def blobs(seed=0, n=20):
    rng = np.random.default_rng(seed)
    a = 0.2 + 0.05 * rng.standard_normal((n, 2))
    b = 0.8 + 0.05 * rng.standard_normal((n, 2))
    return np.vstack([a, b]), np.array([LOW] * n + [HIGH] * n)


XOR = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
XOR_LABELS = np.array([LOW, LOW, HIGH, HIGH])


class TestKMeans:
    def test_well_separated(self):
        np.testing.assert_array_equal(kmeans2_1d([1, 1, 1, 9, 9]), [LOW, LOW, LOW, HIGH, HIGH])

    def test_two_points(self):
        np.testing.assert_array_equal(kmeans2_1d([0, 10]), [LOW, HIGH])

    def test_degenerate(self):
        with pytest.raises(DegenerateSplit):
            kmeans2_1d([5, 5, 5])

    def test_low_mean_below_high_mean_on_random_instances(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.integers(2, 60))
            y = rng.standard_normal(n) * rng.uniform(0.1, 100) + rng.uniform(-50, 50)
            labels = kmeans2_1d(y)
            assert y[labels == LOW].mean() < y[labels == HIGH].mean()

    @settings(max_examples=100)
    @given(
        y=st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=40).filter(lambda v: len(set(v)) > 1),
        scale=st.floats(0.5, 20),
        shift=st.floats(-100, 100),
    )
    def test_positive_affine_rescaling_keeps_labels(self, y, scale, shift):
        y = np.array(y)
        if np.ptp(y) < 1e-3:
            return
        base = kmeans2_1d(y)
        # stay clear of points that sit on a cluster midpoint, where rounding decides
        lo, hi = y[base == LOW].mean(), y[base == HIGH].mean()
        if np.min(np.abs(y - 0.5 * (lo + hi))) < 1e-6 * np.ptp(y):
            return
        np.testing.assert_array_equal(kmeans2_1d(scale * y + shift), base)


def reference_dual(K, y, C):
    """Independent oracle: SLSQP on the SVM dual."""
    Q = np.outer(y, y) * K
    res = minimize(
        lambda a: 0.5 * a @ Q @ a - a.sum(),
        np.zeros(len(y)),
        jac=lambda a: Q @ a - 1,
        bounds=[(0, C)] * len(y),
        constraints=[{"type": "eq", "fun": lambda a: a @ y, "jac": lambda a: y}],
        method="SLSQP",
        options={"ftol": 1e-12, "maxiter": 500},
    )
    return res.x


class TestSplitModel:
    def test_linear_separable(self):
        X, labels = blobs()
        model = fit_split_model(X, labels, kind="svm", kernel="linear", C=1.0)
        assert model.train_accuracy == 1.0
        np.testing.assert_array_equal(predict_side(model, X), labels)

    def test_xor_rbf(self):
        model = fit_split_model(XOR, XOR_LABELS, kind="svm", kernel="rbf", C=10.0, gamma=1.0)
        assert model.train_accuracy == 1.0

    def test_xor_matches_reference_dual(self):
        y = np.where(XOR_LABELS == LOW, 1.0, -1.0)
        K = _kernel("rbf", XOR, XOR, 1.0, 3, 1.0)
        alpha, bias, _ = smo(K, y, 10.0, tol=1e-8)
        ref = reference_dual(K, y, 10.0)
        np.testing.assert_allclose(alpha, ref, atol=1e-5)
        # by symmetry every point is a free support vector with margin exactly 1
        f = K @ (alpha * y) + bias
        np.testing.assert_allclose(y * f, 1.0, atol=1e-6)

    @pytest.mark.parametrize("kernel", ["linear", "poly", "rbf"])
    def test_dual_constraints(self, kernel):
        rng = np.random.default_rng(3)
        X = rng.random((60, 3))
        labels = kmeans2_1d(((X - 0.4) ** 2).sum(1))
        y = np.where(labels == LOW, 1.0, -1.0)
        C = 5.0
        K = _kernel(kernel, X, X, 1.0 / (3 * X.var()), 3, 1.0)
        alpha, _, _ = smo(K, y, C)
        assert np.all((alpha >= 0) & (alpha <= C))
        assert abs(alpha @ y) <= 1e-6

    @pytest.mark.parametrize("kernel", ["linear", "poly", "rbf"])
    def test_matches_reference_objective(self, kernel):
        rng = np.random.default_rng(7)
        X = rng.random((30, 2))
        labels = kmeans2_1d(np.sin(5 * X[:, 0]) + X[:, 1])
        y = np.where(labels == LOW, 1.0, -1.0)
        K = _kernel(kernel, X, X, 2.0, 3, 1.0)
        Q = np.outer(y, y) * K
        dual = lambda a: 0.5 * a @ Q @ a - a.sum()
        alpha, _, _ = smo(K, y, 3.0, tol=1e-6)
        ref = reference_dual(K, y, 3.0)
        assert dual(alpha) <= dual(ref) + 1e-4 * max(1.0, abs(dual(ref)))

    def test_knn_memorizes(self):
        rng = np.random.default_rng(1)
        X = rng.random((25, 3))
        labels = rng.integers(0, 2, 25)
        labels[:2] = [LOW, HIGH]
        model = fit_split_model(X, labels, kind="knn", k=1)
        assert model.train_accuracy == 1.0

    def test_knn_distance_tie_goes_to_lower_index(self):
        X = np.array([[0.0], [1.0]])
        model = fit_split_model(X, np.array([HIGH, LOW]), kind="knn", k=1)
        assert predict_side(model, np.array([[0.5]]))[0] == HIGH

    def test_zero_decision_is_low(self):
        model = SplitModel("svm", np.zeros((0, 2)), coef=np.zeros(0), bias=0.0)
        assert predict_side(model, np.array([[0.3, 0.3]]))[0] == LOW

    def test_training_points_keep_their_label(self):
        X, labels = blobs(seed=4)
        model = fit_split_model(X, labels, kernel="rbf", C=100.0)
        np.testing.assert_array_equal(predict_side(model, X), labels)

    @pytest.mark.parametrize("kernel", ["linear", "poly", "rbf"])
    def test_invariant_to_row_order(self, kernel):
        rng = np.random.default_rng(5)
        X = rng.random((40, 3))
        labels = kmeans2_1d(((X - 0.6) ** 2).sum(1))
        perm = rng.permutation(40)
        a = fit_split_model(X, labels, kernel=kernel, C=50.0)
        b = fit_split_model(X[perm], labels[perm], kernel=kernel, C=50.0)
        Xq = rng.random((100, 3))
        np.testing.assert_allclose(a.decision(Xq), b.decision(Xq), atol=1e-8, rtol=0)

    def test_rejects_single_class(self):
        with pytest.raises(ValueError):
            fit_split_model(np.random.default_rng(0).random((5, 2)), np.zeros(5, int))

    def test_rejects_nonpositive_C(self):
        X, labels = blobs()
        with pytest.raises(ValueError):
            fit_split_model(X, labels, C=0.0)

    def test_dimension_mismatch(self):
        X, labels = blobs()
        model = fit_split_model(X, labels, kernel="linear")
        with pytest.raises(ValueError):
            predict_side(model, np.zeros((1, 3)))


def grid64():
    g = (np.arange(8) + 0.5) / 8
    X = np.array([[a, b] for a in g for b in g])
    return X, np.linalg.norm(X, axis=1)


class TestBuildPartition:
    def test_constant_values_give_empty_path(self):
        X = np.random.default_rng(0).random((20, 2))
        path = build_partition(X, np.full(20, 3.0))
        assert path.depth == 0
        assert np.all(in_region(path, X))

    def test_leaf_has_lower_mean(self):
        X, y = grid64()
        for kind, kernel in [("svm", "rbf"), ("svm", "poly"), ("svm", "linear"), ("knn", "rbf")]:
            path = build_partition(X, y, kind=kind, kernel=kernel, C=10.0)
            assert path.depth >= 1
            assert y[path.leaf_points].mean() < y.mean()

    def test_depth_capped_on_large_input(self):
        rng = np.random.default_rng(0)
        X = rng.random((10_000, 2))
        y = np.linalg.norm(X - 0.3, axis=1)
        path = build_partition(X, y, kind="knn", min_leaf=2)
        assert path.depth <= 5

    @pytest.mark.parametrize("seed", range(5))
    def test_depth_capped_svm(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.random((300, 3))
        y = np.abs(X - 0.5).sum(1) + 0.01 * rng.standard_normal(300)
        path = build_partition(X, y, kernel="rbf", C=100.0, min_leaf=2)
        assert path.depth <= 5

    def test_survivors_nested_and_in_region(self):
        rng = np.random.default_rng(2)
        X = rng.random((128, 3))
        y = ((X - 0.7) ** 2).sum(1)
        path = build_partition(X, y, kernel="poly", C=745.322745)
        assert path.depth >= 1
        previous = set(range(len(X)))
        for kept in path.survivors:
            assert set(kept) <= previous
            previous = set(kept)
        np.testing.assert_array_equal(path.leaf_points, path.survivors[-1])
        assert np.all(in_region(path, X[path.leaf_points]))

    def test_min_leaf_respected(self):
        X, y = grid64()
        path = build_partition(X, y, min_leaf=20)
        assert len(path.leaf_points) >= 20

    def test_too_few_points_gives_empty_path(self):
        X, y = grid64()
        path = build_partition(X[:7], y[:7], min_leaf=8)
        assert path.depth == 0

    def test_min_leaf_equal_to_dataset_disables_splits(self):
        X, y = grid64()
        assert build_partition(X, y, min_leaf=len(X)).depth == 0


class TestInRegion:
    def test_empty_path(self):
        U = np.random.default_rng(0).random((10, 4))
        assert np.all(in_region(PartitionPath(), U))

    def test_point_rejected_at_root(self):
        X, y = grid64()
        path = build_partition(X, y, kernel="rbf", C=10.0)
        root = path.splits[0]
        high = X[predict_side(root, X) == HIGH]
        assert len(high) > 0
        assert not np.any(in_region(path, high))

    def test_margin_sign_matches_membership(self):
        X, y = grid64()
        path = build_partition(X, y, kernel="rbf", C=10.0)
        U = np.random.default_rng(1).random((500, 2))
        np.testing.assert_array_equal(in_region(path, U), region_margin(path, U) >= 0)

    def test_dimension_mismatch(self):
        X, y = grid64()
        path = build_partition(X, y)
        with pytest.raises(ValueError):
            in_region(path, np.zeros((1, 3)))
