import math

import numpy as np
import pytest

from scsc.adjacency import (
    build_trajectory_adjacency,
    build_transition_adjacency,
    js_divergence,
    js_metric,
    trajectory_dissimilarity,
    validate_adjacency,
)
from scsc.ensemble import TrajectoryEnsemble, TransitionMatrix

from conftest import random_distribution


def make_ensemble(positions, periods=None):
    positions = np.asarray(positions, dtype=float)
    return TrajectoryEnsemble(positions=positions, times=np.arange(float(positions.shape[1])), periods=periods)


def random_ensemble(rng, n, T, d=2):
    return make_ensemble(rng.normal(size=(n, T, d)))


class TestTrajectoryDissimilarity:
    def test_constant_separation_is_zero(self):
        pos = np.zeros((2, 5, 2))
        pos[1, :, 0] = 3.0
        pos[:, :, 1] = np.arange(5.0)  # both drift together
        ens = make_ensemble(pos)
        assert trajectory_dissimilarity(ens, 0, 1) == 0.0

    def test_hand_evaluated_pair(self):
        # separations {1, 3}: mean 2, sum of squared deviations 2 -> sqrt(2)/2
        pos = np.zeros((2, 2, 1))
        pos[1, 0, 0] = 1.0
        pos[1, 1, 0] = 3.0
        ens = make_ensemble(pos)
        assert trajectory_dissimilarity(ens, 0, 1) == pytest.approx(math.sqrt(2) / 2, abs=1e-12)

    def test_identical_trajectories_warn_and_return_zero(self):
        pos = np.random.default_rng(0).normal(size=(1, 4, 2))
        ens = make_ensemble(np.repeat(pos, 2, axis=0))
        with pytest.warns(UserWarning, match="identical"):
            assert trajectory_dissimilarity(ens, 0, 1) == 0.0

    def test_index_errors(self):
        ens = random_ensemble(np.random.default_rng(1), 3, 4)
        with pytest.raises(IndexError):
            trajectory_dissimilarity(ens, 0, 3)
        with pytest.raises(ValueError):
            trajectory_dissimilarity(ens, 1, 1)

    def test_swap_symmetry_and_translation_invariance(self):
        rng = np.random.default_rng(2)
        pos = rng.normal(size=(4, 10, 2))
        ens = make_ensemble(pos)
        shift = rng.normal(size=(1, 10, 2))  # same rigid shift for all states per time
        ens_shifted = make_ensemble(pos + shift)
        for i, j in [(0, 1), (1, 3), (2, 0)]:
            a = trajectory_dissimilarity(ens, i, j)
            assert trajectory_dissimilarity(ens, j, i) == a
            assert trajectory_dissimilarity(ens_shifted, i, j) == pytest.approx(a, rel=1e-12)

    def test_minimum_image_distance(self):
        # particles at x=0.1 and x=1.9 on a period-2 axis are 0.2 apart
        pos = np.zeros((2, 2, 1))
        pos[0, :, 0] = 0.1
        pos[1, 0, 0] = 1.9
        pos[1, 1, 0] = 1.7
        ens = make_ensemble(pos, periods=(2.0,))
        # wrapped separations {0.2, 0.4}: mean 0.3, deviations {0.1,0.1}
        expect = math.sqrt(0.02) / 0.3
        assert trajectory_dissimilarity(ens, 0, 1, minimum_image=True) == pytest.approx(expect, rel=1e-12)
        # without the option, plain euclidean: {1.8, 1.6}
        plain = math.sqrt(2 * 0.1**2) / 1.7
        assert trajectory_dissimilarity(ens, 0, 1) == pytest.approx(plain, rel=1e-12)


class TestBuildTrajectoryAdjacency:
    def test_rigid_ensemble_all_zero(self):
        # integer-valued coordinates keep the rigid translation exact in floats
        rng = np.random.default_rng(3)
        base = rng.integers(-20, 20, size=(6, 1, 2)).astype(float)
        drift = rng.integers(-50, 50, size=(1, 8, 2)).astype(float)
        ens = make_ensemble(base + drift)
        A = build_trajectory_adjacency(ens)
        assert np.all(A.values == 0.0)

    def test_two_state_example(self):
        pos = np.zeros((2, 2, 1))
        pos[1] = [[1.0], [3.0]]
        A = build_trajectory_adjacency(make_ensemble(pos))
        expect = math.sqrt(2) / 2
        assert A.values == pytest.approx(np.array([[0, expect], [expect, 0]]), abs=1e-12)

    def test_invariants_on_random_ensembles(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            n = int(rng.integers(2, 20))
            ens = random_ensemble(rng, n, int(rng.integers(2, 15)))
            A = build_trajectory_adjacency(ens).values
            assert np.array_equal(A, A.T)
            assert np.all(np.diag(A) == 0.0)
            assert np.all(A >= 0.0)
            assert np.all(np.isfinite(A))

    def test_matches_scalar_path_bitwise(self):
        rng = np.random.default_rng(5)
        ens = random_ensemble(rng, 13, 9)
        A = build_trajectory_adjacency(ens).values
        for i in range(13):
            for j in range(i + 1, 13):
                assert A[i, j] == trajectory_dissimilarity(ens, i, j)

    def test_worker_count_does_not_change_bits(self):
        rng = np.random.default_rng(6)
        ens = random_ensemble(rng, 37, 11)
        a1 = build_trajectory_adjacency(ens, workers=1).values
        a3 = build_trajectory_adjacency(ens, workers=3).values
        assert np.array_equal(a1, a3)


class TestJsDivergence:
    def test_identical_distributions(self):
        p = np.array([0.5, 0.5])
        assert js_divergence(p, p) == 0.0
        q = np.array([0.2, 0.3, 0.5])
        assert js_divergence(q, q) == 0.0

    def test_disjoint_support_reaches_ln2(self):
        assert js_divergence([1.0, 0.0], [0.0, 1.0]) == pytest.approx(math.log(2), abs=1e-15)

    def test_bounded_by_ln2(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            m = int(rng.integers(2, 12))
            p, q = random_distribution(rng, m), random_distribution(rng, m)
            d = js_divergence(p, q)
            assert 0.0 <= d <= math.log(2) + 1e-12

    def test_input_validation(self):
        with pytest.raises(ValueError, match="equal length"):
            js_divergence([1.0], [0.5, 0.5])
        with pytest.raises(ValueError, match="sums to"):
            js_divergence([0.6, 0.6], [0.5, 0.5])
        with pytest.raises(ValueError, match="negative"):
            js_divergence([1.5, -0.5], [0.5, 0.5])


class TestJsMetric:
    def test_examples(self):
        p, q = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        assert js_metric(p, p) == 0.0
        assert js_metric(p, q) == pytest.approx(math.sqrt(math.log(2)), abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            p, q = random_distribution(rng, 6), random_distribution(rng, 6)
            assert js_metric(p, q) == js_metric(q, p)

    def test_identity_of_indiscernibles(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            p = random_distribution(rng, 5)
            q = random_distribution(rng, 5)
            if np.max(np.abs(p - q)) > 1e-12:
                assert js_metric(p, q) > 0.0
            assert js_metric(p, p) == 0.0

    def test_triangle_inequality_on_random_triples(self):
        rng = np.random.default_rng(10)
        for _ in range(1000):
            m = int(rng.integers(2, 8))
            p, q, r = (random_distribution(rng, m) for _ in range(3))
            assert js_metric(p, r) <= js_metric(p, q) + js_metric(q, r) + 1e-12


class TestBuildTransitionAdjacency:
    def test_identity_transition(self):
        T = TransitionMatrix(np.eye(2))
        A = build_transition_adjacency(T)
        s = math.sqrt(math.log(2))
        assert A.values == pytest.approx(np.array([[0, s], [s, 0]]), abs=1e-12)

    def test_identical_rows_give_zeros(self):
        row = np.array([0.25, 0.25, 0.5])
        T = TransitionMatrix(np.tile(row, (3, 1)))
        assert np.all(build_transition_adjacency(T).values == 0.0)

    def test_matches_pairwise_js_metric(self):
        rng = np.random.default_rng(11)
        rows = np.stack([random_distribution(rng, 9) for _ in range(9)])
        A = build_transition_adjacency(TransitionMatrix(rows)).values
        for i in range(9):
            for j in range(9):
                expect = 0.0 if i == j else js_metric(rows[i], rows[j])
                assert A[i, j] == pytest.approx(expect, abs=1e-13)

    def test_invalid_transition_matrix(self):
        with pytest.raises(ValueError, match="sums to"):
            TransitionMatrix(np.array([[0.5, 0.4], [0.5, 0.5]]))


class TestValidateAdjacency:
    def test_accepts_clean_matrix_unchanged(self):
        a = np.array([[0.0, 2.0], [2.0, 0.0]])
        out = validate_adjacency(a)
        assert np.array_equal(out.values, a)

    def test_rejects_negative_entry_with_location(self):
        a = np.array([[0.0, -0.1], [-0.1, 0.0]])
        with pytest.raises(ValueError, match=r"\(0,1\)"):
            validate_adjacency(a)

    def test_symmetrizes_small_asymmetry(self):
        a = np.array([[0.0, 1.0], [1.0 + 1e-10, 0.0]])
        out = validate_adjacency(a)
        assert out.values[0, 1] == out.values[1, 0]

    def test_rejects_large_asymmetry(self):
        a = np.array([[0.0, 1.0], [1.5, 0.0]])
        with pytest.raises(ValueError, match="asymmetry"):
            validate_adjacency(a)

    def test_diagonal_tolerance(self):
        a = np.array([[1e-13, 1.0], [1.0, 0.0]])
        out = validate_adjacency(a)
        assert out.values[0, 0] == 0.0
        a = np.array([[1e-6, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError, match="diagonal"):
            validate_adjacency(a)

    def test_rejects_non_finite(self):
        a = np.array([[0.0, np.inf], [np.inf, 0.0]])
        with pytest.raises(ValueError, match="non-finite"):
            validate_adjacency(a)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            validate_adjacency(np.zeros((2, 3)))
