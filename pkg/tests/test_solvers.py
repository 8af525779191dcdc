import numpy as np
import pytest

import graphprox as gp
from graphprox.errors import ConvergenceError, IndefiniteSystemError

from conftest import er_graph, random_spd


class TestConjugateGradient:
    def test_identity_one_iteration(self):
        op = gp.MatrixOperator(np.eye(5))
        b = np.arange(1.0, 6.0)
        report = gp.conjugate_gradient(op, b, tol=1e-12)
        assert report.iterations == 1
        assert report.matvecs == 1
        np.testing.assert_allclose(report.solution, b, atol=1e-12)

    def test_single_edge_pairwise_value(self, single_edge):
        op = gp.adjusted_laplacian_operator(single_edge)
        b = np.array([1.0, -1.0])
        report = gp.conjugate_gradient(op, b, tol=1e-10)
        assert report.converged
        assert (b @ report.solution) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_dense_solve(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(20, 200))
        Z, _ = random_spd(n, rng)
        op = gp.MatrixOperator(Z)
        b = rng.standard_normal(n)
        report = gp.conjugate_gradient(op, b, tol=1e-10, max_iter=20 * n)
        exact = np.linalg.solve(Z, b)
        assert report.converged
        assert np.linalg.norm(report.solution - exact) <= 1e-8 * np.linalg.norm(exact)
        assert report.residual_history[-1] <= 1e-10 * np.linalg.norm(b)

    def test_indefinite_detected(self):
        op = gp.MatrixOperator(np.diag([1.0, -2.0]))
        with pytest.raises(IndefiniteSystemError):
            gp.conjugate_gradient(op, np.array([0.0, 1.0]))

    def test_probe_rule_stops_early(self):
        rng = np.random.default_rng(9)
        Z, _ = random_spd(120, rng)
        op = gp.MatrixOperator(Z)
        b = rng.standard_normal(120)
        full = gp.conjugate_gradient(op, b, tol=1e-3)
        probed = gp.conjugate_gradient(
            gp.MatrixOperator(Z), b, tol=1e-3, pairwise_probe=lambda x: x[0]
        )
        assert probed.converged
        assert probed.probe_history is not None
        assert probed.iterations <= full.iterations

    def test_probe_ignores_exact_zero(self, path3):
        # probing the far end of a path: the probe stays 0 at first, which
        # must not trigger the relative-change stop
        op = gp.adjusted_laplacian_operator(path3)
        b = np.array([0.0, 0.0, 1.0])
        report = gp.conjugate_gradient(op, b, tol=1e-8, pairwise_probe=lambda x: x[0])
        assert report.converged
        assert report.probe_history[-1] != 0.0

    def test_unconverged_flag(self):
        rng = np.random.default_rng(3)
        Z, _ = random_spd(100, rng, lo=0.01, hi=100.0)
        op = gp.MatrixOperator(Z)
        report = gp.conjugate_gradient(op, rng.standard_normal(100), tol=1e-14, max_iter=2)
        assert not report.converged
        assert report.iterations == 2


class TestReferenceSolve:
    def test_dense_path_exact(self, triangle):
        op = gp.adjusted_laplacian_operator(triangle)
        b = np.array([1.0, 0.0, -1.0])
        x = gp.reference_solve(op, b)
        np.testing.assert_allclose(op.to_dense() @ x, b, atol=1e-12)

    def test_katz_single_edge_column(self, single_edge):
        op = gp.katz_operator(single_edge, 0.5)
        x = gp.reference_solve(op, np.array([0.0, 1.0]))
        np.testing.assert_allclose(x, [2 / 3, 4 / 3], atol=1e-12)

    def test_iterative_path_agrees_with_dense(self):
        g = er_graph(500, 0.015, 11)
        op = gp.adjusted_laplacian_operator(g)
        rng = np.random.default_rng(1)
        b = rng.standard_normal(g.n)
        dense = gp.reference_solve(op, b)
        iterative = gp.reference_solve(gp.adjusted_laplacian_operator(g), b, dense_cutoff=10)
        assert np.linalg.norm(dense - iterative) <= 1e-8 * np.linalg.norm(dense)

    def test_iterative_failure_raises(self):
        # a Hilbert matrix is far too ill-conditioned for CG to reach the
        # ground-truth tolerance in floating point
        import scipy.linalg

        n = 40
        op = gp.MatrixOperator(scipy.linalg.hilbert(n))
        rng = np.random.default_rng(2)
        with pytest.raises((ConvergenceError, IndefiniteSystemError)):
            gp.reference_solve(op, rng.standard_normal(n), dense_cutoff=0)


class TestDenseReferences:
    def test_single_edge_matrices(self, single_edge):
        refs = gp.dense_reference_matrices(single_edge, alpha=0.5)
        np.testing.assert_allclose(refs.katz, [[1 / 3, 2 / 3], [2 / 3, 1 / 3]], atol=1e-12)
        np.testing.assert_allclose(refs.commute, [[0.0, 2.0], [2.0, 0.0]], atol=1e-12)

    def test_triangle_commute(self, triangle):
        refs = gp.dense_reference_matrices(triangle)
        expected = 4.0 * (np.ones((3, 3)) - np.eye(3))
        np.testing.assert_allclose(refs.commute, expected, atol=1e-10)

    @pytest.mark.parametrize("seed", [0, 5])
    def test_commute_matrix_properties(self, seed):
        g = er_graph(60, 0.1, seed)
        refs = gp.dense_reference_matrices(g)
        C = refs.commute
        np.testing.assert_allclose(C, C.T, atol=1e-9)
        assert np.all(np.diag(C) == 0)
        assert C.min() >= -1e-9
        # two-route consistency with the quadratic form
        rng = np.random.default_rng(seed)
        for _ in range(20):
            i, j = rng.choice(g.n, 2, replace=False)
            u = np.zeros(g.n)
            u[i], u[j] = 1.0, -1.0
            form = g.volume * (u @ refs.laplacian_pinv @ u)
            assert C[i, j] == pytest.approx(form, abs=1e-8 * max(1.0, abs(form)))

    def test_katz_matrix_properties(self):
        g = er_graph(50, 0.12, 7)
        sigma = gp.spectral_norm_estimate(g)
        alpha = 0.7 / sigma
        refs = gp.dense_reference_matrices(g, alpha=alpha)
        K = refs.katz
        np.testing.assert_allclose(K, K.T, atol=1e-9)
        assert K.min() >= -1e-12
        # the series partial sums approach K from below for nonnegative A
        A = g.adjacency().toarray()
        partial = np.zeros_like(A)
        term = np.eye(g.n)
        for _ in range(6):
            term = alpha * (term @ A)
            partial += term
            assert np.all(K - partial >= -1e-9)

    def test_cache_returns_same_object(self, triangle):
        a = gp.dense_reference_matrices(triangle, alpha=0.2)
        b = gp.dense_reference_matrices(triangle, alpha=0.2)
        assert a is b
        c = gp.dense_reference_matrices(triangle, alpha=0.3)
        assert c is not a

    def test_size_refused(self, monkeypatch):
        g = er_graph(30, 0.2, 0)
        monkeypatch.setattr("graphprox.solvers.DENSE_CUTOFF", 10)
        with pytest.raises(ValueError):
            gp.dense_reference_matrices(g)
