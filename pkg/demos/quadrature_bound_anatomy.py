"""What the Gauss-Radau bounds look like from the inside.

For a small SPD matrix the whole machinery can be laid bare: run the
Lanczos recurrence, and at every step evaluate the quadratic form bounds
twice, once with the constant-time scalar updates and once by explicitly
building the extended tridiagonal matrix and inverting it.  The two routes
agree to machine precision, and the bounds close in on the true value of
u^T Z^{-1} u from both sides.

Run:  python3 demos/quadrature_bound_anatomy.py
"""
import numpy as np

import graphprox as gp
from graphprox.lanczos import LanczosState, lanczos_step
from graphprox.quadrature import GaussRadauState, radau_bounds_dense, radau_step


def main():
    rng = np.random.default_rng(0)
    n = 40
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = np.sort(rng.uniform(0.8, 12.0, n))
    Z = (basis * eigs) @ basis.T
    u = rng.standard_normal(n)
    sigma2 = float(u @ u)
    exact = float(u @ np.linalg.solve(Z, u))
    lam_lo, lam_hi = 0.9 * eigs[0], 1.1 * eigs[-1]

    op = gp.MatrixOperator(Z)
    lanczos = LanczosState.start(u)
    bounds_state = GaussRadauState(lam_lo, lam_hi)

    print(f"target: u^T Z^-1 u = {exact:.10f}")
    print(f"{'k':>3} {'lower':>14} {'upper':>14} {'gap':>10} {'route disagreement':>20}")
    for k in range(1, n + 1):
        beta_prev = lanczos.beta_prev
        alpha, beta = lanczos_step(op, lanczos)
        fast = radau_step(alpha, beta_prev, beta, bounds_state)
        dense = radau_bounds_dense(lanczos.alphas, lanczos.betas, 1.0, lam_lo, lam_hi) \
            if beta > 0 else fast
        disagreement = max(abs(fast.lower - dense.lower), abs(fast.upper - dense.upper))
        lo, hi = sigma2 * fast.lower, sigma2 * fast.upper
        print(f"{k:>3} {lo:>14.10f} {hi:>14.10f} {hi - lo:>10.2e} {disagreement:>20.2e}")
        assert lo <= exact + 1e-9 and hi >= exact - 1e-9
        if hi - lo < 1e-9 or lanczos.breakdown:
            break
    print("\nbounds trapped the target at every step")


if __name__ == "__main__":
    main()
