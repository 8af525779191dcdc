import numpy as np
import pytest

import graphprox as gp
from graphprox.errors import DegenerateStepError
from graphprox.lanczos import LanczosState, lanczos_step
from graphprox.quadrature import (
    GaussRadauState,
    gauss_rule_dense,
    radau_bounds_dense,
    radau_rule_dense,
    radau_step,
)

from conftest import random_spd


def run_bounds(Z, u, lam_lo, lam_hi, steps=None):
    """Drive the coupled recurrence, yielding (k, lower, upper, state)."""
    op = gp.MatrixOperator(Z)
    lstate = LanczosState.start(u)
    mstate = GaussRadauState(lam_lo, lam_hi)
    n = Z.shape[0]
    for k in range(1, (steps or n) + 1):
        beta_prev = lstate.beta_prev
        alpha, beta = lanczos_step(op, lstate)
        bounds = radau_step(alpha, beta_prev, beta, mstate)
        yield k, bounds, lstate
        if lstate.breakdown:
            return


class TestScalarCases:
    def test_one_by_one_exact(self):
        state = GaussRadauState(0.5, 9.0)
        bounds = radau_step(4.0, 0.0, 0.0, state)
        assert bounds.lower == pytest.approx(1 / 4.0)
        assert bounds.upper == pytest.approx(1 / 4.0)

    def test_single_edge_eigenvector(self, single_edge):
        ltil = gp.adjusted_laplacian_operator(single_edge).to_dense()
        u = np.array([1.0, -1.0]) / np.sqrt(2)
        for k, bounds, _ in run_bounds(ltil, u, 1e-4, 2.0):
            assert k == 1
            assert bounds.lower == pytest.approx(0.5)
            assert bounds.upper == pytest.approx(0.5)
            # sigma^2 * bound recovers the quadratic form of the raw vector
            assert 2.0 * bounds.lower == pytest.approx(1.0)

    def test_invalid_interval(self):
        with pytest.raises(ValueError):
            GaussRadauState(2.0, 1.0)
        with pytest.raises(ValueError):
            GaussRadauState(0.0, 1.0)


class TestAgreementWithDenseRoute:
    @pytest.mark.parametrize("seed", range(10))
    def test_constant_time_matches_dense(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 50))
        Z, eigs = random_spd(n, rng)
        u = rng.standard_normal(n)
        lam_lo, lam_hi = 0.9 * eigs[0], 1.1 * eigs[-1]
        for _, bounds, lstate in run_bounds(Z, u, lam_lo, lam_hi):
            if lstate.breakdown:
                dense = gauss_rule_dense(lstate.alphas, lstate.betas, 1.0)
                assert bounds.lower == pytest.approx(dense, rel=1e-10)
                assert bounds.upper == pytest.approx(dense, rel=1e-10)
            else:
                dlo, dhi = radau_bounds_dense(
                    lstate.alphas, lstate.betas, 1.0, lam_lo, lam_hi
                )
                assert bounds.lower == pytest.approx(dlo, rel=1e-10)
                assert bounds.upper == pytest.approx(dhi, rel=1e-10)

    def test_prescription_sides(self):
        # prescribing the upper end of the interval produces the lower
        # bound and vice versa
        rng = np.random.default_rng(3)
        Z, eigs = random_spd(12, rng)
        u = rng.standard_normal(12)
        u /= np.linalg.norm(u)
        lam_lo, lam_hi = 0.9 * eigs[0], 1.1 * eigs[-1]
        exact = float(u @ np.linalg.solve(Z, u))
        op = gp.MatrixOperator(Z)
        state = LanczosState.start(u)
        for _ in range(4):
            lanczos_step(op, state)
        from_hi = radau_rule_dense(state.alphas, state.betas, 1.0, lam_hi)
        from_lo = radau_rule_dense(state.alphas, state.betas, 1.0, lam_lo)
        assert from_hi <= exact <= from_lo


class TestBracketingAndConvergence:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_bracketing_every_step(self, seed):
        rng = np.random.default_rng(seed + 100)
        n = int(rng.integers(20, 200))
        Z, eigs = random_spd(n, rng)
        u = rng.standard_normal(n)
        sigma2 = float(u @ u)
        exact = float(u @ np.linalg.solve(Z, u))
        lam_lo, lam_hi = 0.9 * eigs[0], 1.1 * eigs[-1]
        for _, bounds, _ in run_bounds(Z, u, lam_lo, lam_hi):
            assert sigma2 * bounds.lower <= exact + 1e-8 * abs(exact)
            assert sigma2 * bounds.upper >= exact - 1e-8 * abs(exact)
            assert bounds.lower <= bounds.upper + 1e-12

    def test_gap_closes_within_n(self):
        rng = np.random.default_rng(17)
        n = 150
        Z, eigs = random_spd(n, rng)
        u = rng.standard_normal(n)
        lam_lo, lam_hi = 0.9 * eigs[0], 1.1 * eigs[-1]
        tau = 1e-6
        for _, bounds, _ in run_bounds(Z, u, lam_lo, lam_hi):
            if bounds.upper - bounds.lower < tau:
                break
        assert bounds.upper - bounds.lower < tau

    def test_tighter_interval_never_loosens(self):
        rng = np.random.default_rng(23)
        Z, eigs = random_spd(30, rng)
        u = rng.standard_normal(30)
        loose = list(run_bounds(Z, u, 0.5 * eigs[0], 2.0 * eigs[-1], steps=10))
        tight = list(run_bounds(Z, u, 0.99 * eigs[0], 1.01 * eigs[-1], steps=10))
        for (_, lb, _), (_, tb, _) in zip(loose, tight):
            assert tb.lower >= lb.lower - 1e-12
            assert tb.upper <= lb.upper + 1e-12


class TestDenseRoute:
    def test_decoupled_extension(self):
        # a vanishing coupling off-diagonal appends the prescribed
        # eigenvalue without changing the leading inverse entry
        value = radau_rule_dense([4.0], [0.0], 1.0, 9.0)
        assert value == pytest.approx(1 / 4.0)

    def test_prescribed_point_is_eigenvalue(self):
        rng = np.random.default_rng(4)
        Z, eigs = random_spd(8, rng)
        u = rng.standard_normal(8)
        op = gp.MatrixOperator(Z)
        state = LanczosState.start(u)
        for _ in range(3):
            lanczos_step(op, state)
        phi = 1.2 * eigs[-1]
        alphas = np.asarray(state.alphas)
        betas = np.asarray(state.betas)
        T = np.diag(alphas) + np.diag(betas[:2], 1) + np.diag(betas[:2], -1)
        rhs = np.zeros(3)
        rhs[-1] = betas[-1] ** 2
        delta = np.linalg.solve(T - phi * np.eye(3), rhs)
        ext = np.zeros((4, 4))
        ext[:3, :3] = T
        ext[3, 3] = phi + delta[-1]
        ext[2, 3] = ext[3, 2] = betas[-1]
        assert np.min(np.abs(np.linalg.eigvalsh(ext) - phi)) < 1e-9

    def test_collision_with_ritz_value_raises(self):
        # diagonal leading block makes the shifted system exactly singular
        with pytest.raises(DegenerateStepError):
            radau_rule_dense([2.0, 5.0], [0.0, 0.7], 1.0, 5.0)

    def test_needs_coupling_offdiagonal(self):
        with pytest.raises(ValueError):
            radau_rule_dense([2.0, 3.0], [1.0], 1.0, 5.0)


class TestDegenerateSteps:
    def test_zero_pivot_detected(self):
        state = GaussRadauState(1.0, 4.0)
        # alpha equal to lambda_hi makes the lower-rule pivot vanish once a
        # nonzero beta asks for it
        with pytest.raises(DegenerateStepError):
            radau_step(4.0, 0.0, 1.0, state)

    def test_breakdown_skips_pivot_checks(self):
        # with beta == 0 the Gauss value is exact and no pivot is needed
        state = GaussRadauState(1.0, 4.0)
        bounds = radau_step(4.0, 0.0, 0.0, state)
        assert bounds.lower == bounds.upper == pytest.approx(0.25)
