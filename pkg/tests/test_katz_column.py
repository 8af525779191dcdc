import numpy as np
import pytest

import graphprox as gp

from conftest import er_graph, pa_graph


class TestPushGoldenValues:
    def test_single_edge(self, single_edge):
        col = gp.katz_column_push(single_edge, 0.5, 0, tau=1e-10, sigma_max=1.0 + 1e-12)
        dense = col.to_dense(2)
        np.testing.assert_allclose(dense, [1 / 3, 2 / 3], atol=1e-9)
        assert col.converged

    def test_tau_above_initial_residual_means_no_work(self, triangle):
        col = gp.katz_column_push(triangle, 0.2, 0, tau=1.5, scaling="residual")
        assert col.stats.pushes == 0
        assert col.vertices.size == 0
        assert col.converged
        assert col.residual_one_norm == pytest.approx(1.0)

    def test_star_center_matches_dense(self, star4):
        refs = gp.dense_reference_matrices(star4, alpha=0.2)
        col = gp.katz_column_push(star4, 0.2, 0, tau=1e-12, sigma_max=np.sqrt(3))
        assert np.abs(col.to_dense(4) - refs.katz[:, 0]).max() <= 1e-8

    @pytest.mark.parametrize("scaling", ["residual", "degree"])
    def test_oracle_convergence_er(self, scaling):
        g = er_graph(80, 0.07, 2)
        sigma = gp.spectral_norm_estimate(g)
        alpha = 0.6 / sigma
        refs = gp.dense_reference_matrices(g, alpha=alpha)
        col = gp.katz_column_push(g, alpha, 5, tau=1e-12, scaling=scaling,
                                  sigma_max=sigma)
        assert np.abs(col.to_dense(g.n) - refs.katz[:, 5]).max() <= 1e-6


class TestPushInvariants:
    def _observed_run(self, g, alpha, src, tau, scaling="residual"):
        dense_A = g.adjacency().toarray()
        b = np.zeros(g.n)
        b[src] = 1.0
        records = []

        def observer(k, x, r):
            resid_exact = b - (x - alpha * (dense_A @ x))
            records.append((
                np.abs(resid_exact - r).sum(),
                float(r.sum()),
                float(min(r.min(), x.min())),
            ))

        col = gp.katz_column_push(g, alpha, src, tau=tau, scaling=scaling,
                                  observer=observer, sigma_max=gp.spectral_norm_estimate(g))
        return col, records

    def test_residual_identity_every_push(self):
        g = er_graph(40, 0.15, 1)
        alpha = 0.9 / g.degrees.max()
        col, records = self._observed_run(g, alpha, 0, tau=1e-8)
        assert col.stats.pushes > 0
        for drift, _, _ in records:
            assert drift <= 1e-10 * (1 + col.stats.pushes)

    def test_remark_regime_monotone_and_bounded(self):
        g = er_graph(60, 0.1, 7)
        d_max = int(g.degrees.max())
        alpha = 0.9 / d_max
        col, records = self._observed_run(g, alpha, 3, tau=1e-10)
        previous = 1.0
        for k, (_, one_norm, min_entry) in enumerate(records, start=1):
            assert min_entry >= -1e-14
            assert one_norm <= previous + 1e-12
            assert one_norm <= gp.push_residual_bound(alpha, d_max, g.n, k) + 1e-12
            previous = one_norm

    def test_effective_matvec_definition(self):
        g = er_graph(50, 0.1, 9)
        alpha = 0.5 / g.degrees.max()
        col = gp.katz_column_push(g, alpha, 0, tau=1e-6)
        assert col.stats.effective_matvecs == pytest.approx(
            col.stats.edge_touches / (2 * g.num_edges)
        )
        assert col.stats.touched_vertices <= g.n

    def test_max_pushes_truncation(self):
        g = pa_graph(100, 3, 0)
        sigma = gp.spectral_norm_estimate(g)
        col = gp.katz_column_push(g, 0.9 / sigma, 0, tau=1e-12, max_pushes=5,
                                  sigma_max=sigma)
        assert col.stats.pushes == 5
        assert not col.converged

    def test_deterministic_output(self):
        g = pa_graph(120, 2, 4)
        sigma = gp.spectral_norm_estimate(g)
        a = gp.katz_column_push(g, 0.7 / sigma, 9, tau=1e-9, sigma_max=sigma)
        b = gp.katz_column_push(g, 0.7 / sigma, 9, tau=1e-9, sigma_max=sigma)
        np.testing.assert_array_equal(a.vertices, b.vertices)
        np.testing.assert_array_equal(a.scores, b.scores)
        assert a.stats.pushes == b.stats.pushes


class TestAlphaValidation:
    def test_divergent_alpha_rejected_with_estimate(self, star4):
        with pytest.raises(ValueError, match="sigma_max"):
            gp.katz_column_push(star4, 0.6, 0, sigma_max=np.sqrt(3))

    def test_certain_divergence_rejected_without_estimate(self, star4):
        # sigma_max(star) = sqrt(3), and 0.6 >= 1/sqrt(3)
        with pytest.raises(ValueError, match="sqrt"):
            gp.katz_column_push(star4, 0.6, 0)

    def test_uncertain_regime_warns(self, star4):
        # between 1/d_max = 1/3 and 1/sqrt(3): convergent here, but not
        # checkable without a spectral estimate
        with pytest.warns(UserWarning, match="spectral"):
            gp.katz_column_push(star4, 0.4, 0, tau=1e-8)

    def test_bad_parameters(self, triangle):
        with pytest.raises(ValueError):
            gp.katz_column_push(triangle, -0.1, 0)
        with pytest.raises(ValueError):
            gp.katz_column_push(triangle, 0.2, 0, tau=0.0)
        with pytest.raises(ValueError):
            gp.katz_column_push(triangle, 0.2, 9)
        with pytest.raises(ValueError):
            gp.katz_column_push(triangle, 0.2, 0, scaling="uniform")


class TestResidualBound:
    def test_zero_steps(self):
        assert gp.push_residual_bound(0.1, 5, 100, 0) == 1.0

    def test_alpha_zero(self):
        assert gp.push_residual_bound(0.0, 3, 10, 4) == pytest.approx((1 - 0.1) ** 4)

    def test_hand_value(self):
        assert gp.push_residual_bound(0.5, 1, 2, 2) == pytest.approx(0.5625)

    def test_inapplicable_regime(self):
        with pytest.raises(ValueError):
            gp.push_residual_bound(0.5, 2, 10, 3)


class TestParticipationTrace:
    def test_near_uniform_column_on_complete_graph(self):
        n = 8
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        g = gp.preprocess(edges)
        sigma = float(n - 1)
        alpha = 0.5 / sigma
        report = gp.participation_trace(g, alpha, [0], tau=1e-12, sigma_max=sigma)
        refs = gp.dense_reference_matrices(g, alpha=alpha)
        expected = gp.participation_ratio(refs.katz[:, 0])
        assert report.ratios[0] == pytest.approx(expected, rel=1e-6)
        assert report.ratios[0] > 0.8 * n

    def test_empty_column_counts_as_singleton(self, triangle):
        report = gp.participation_trace(triangle, 0.2, [0], tau=2.0)
        assert report.ratios[0] == 1.0

    def test_summary_shape(self):
        g = pa_graph(150, 2, 5)
        sigma = gp.spectral_norm_estimate(g)
        report = gp.participation_trace(g, 1.0 / (sigma + 1), [0, 5, 10],
                                        tau=1e-8, sigma_max=sigma)
        summary = report.summary()
        assert set(summary) == {"min", "mean", "median", "max"}
        assert summary["min"] <= summary["median"] <= summary["max"]

    def test_csv_sorted_by_score(self, tmp_path, star4):
        col = gp.katz_column_push(star4, 0.2, 0, tau=1e-10, sigma_max=np.sqrt(3))
        path = tmp_path / "col.csv"
        col.to_csv(path)
        lines = path.read_text().strip().splitlines()[1:]
        scores = [float(line.split(",")[1]) for line in lines]
        assert scores == sorted(scores, reverse=True)
