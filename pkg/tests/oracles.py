"""Independent oracles used to cross-check the production implementations.

Everything here is deliberately written from first principles (brute
force, finite differences, direct quadrature, textbook closed forms) and
must stay independent of the code paths it checks.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad


def pearson_brute(x, y) -> float:
    """Correlation straight from the covariance/variance definitions."""
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y)) / n
    vx = sum((a - mx) ** 2 for a in x) / n
    vy = sum((b - my) ** 2 for b in y) / n
    return cov / math.sqrt(vx * vy)


def lasso_objective_brute(X, y, beta, intercept, lam) -> float:
    X = np.asarray(X, dtype=float)
    total = 0.0
    for i in range(X.shape[0]):
        r = y[i] - float(X[i] @ beta) - intercept
        total += r * r
    return total + lam * float(np.abs(np.asarray(beta)).sum())


def lasso_grid_search_1d(X, y, lam, lo=-10.0, hi=10.0, steps=2_000_001):
    """Brute 1-D minimizer of the lasso objective over a dense beta grid."""
    X = np.asarray(X, dtype=float).ravel()
    y = np.asarray(y, dtype=float)
    grid = np.linspace(lo, hi, steps)
    resid = y[None, :] - grid[:, None] * X[None, :]
    obj = (resid ** 2).sum(axis=1) + lam * np.abs(grid)
    return float(grid[int(np.argmin(obj))])


def ols_fit(X, y):
    """Least squares with intercept via the normal equations."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    design = np.column_stack([X, np.ones(X.shape[0])])
    sol, *_ = np.linalg.lstsq(design, np.asarray(y, dtype=float), rcond=None)
    return sol[:-1], float(sol[-1])


def central_difference(f, x0: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    grad = np.zeros_like(x0)
    for i in range(x0.size):
        step = np.zeros_like(x0)
        step[i] = eps
        grad[i] = (f(x0 + step) - f(x0 - step)) / (2.0 * eps)
    return grad


# ---------------------------------------------------------------------------
# SVR dual oracle: projected subgradient ascent on the theta parametrization
# ---------------------------------------------------------------------------

def _project_box_hyperplane(v: np.ndarray, c: float) -> np.ndarray:
    """Euclidean projection onto {sum(theta) = 0, |theta_i| <= c}."""
    lo, hi = float(v.min() - c), float(v.max() + c)
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        s = np.clip(v - mu, -c, c).sum()
        if s > 0:
            lo = mu
        else:
            hi = mu
    return np.clip(v - 0.5 * (lo + hi), -c, c)


def svr_dual_value(theta: np.ndarray, K: np.ndarray, y: np.ndarray,
                   epsilon: float) -> float:
    return float(-0.5 * theta @ K @ theta - epsilon * np.abs(theta).sum()
                 + y @ theta)


def svr_projected_gradient(X, y, c_penalty: float, epsilon: float,
                           iters: int = 20_000):
    """Best dual value found by projected subgradient ascent.

    Slow and crude on purpose: it provides a lower bound on the attainable
    dual optimum that an exact solver has to match or beat.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    K = X @ X.T
    n = y.size
    theta = _project_box_hyperplane(np.zeros(n), c_penalty)
    best = svr_dual_value(theta, K, y, epsilon)
    lipschitz = max(float(np.linalg.eigvalsh(K).max()), 1e-12)
    for t in range(1, iters + 1):
        grad = -(K @ theta) + y - epsilon * np.sign(theta)
        theta = _project_box_hyperplane(theta + grad / lipschitz, c_penalty)
        val = svr_dual_value(theta, K, y, epsilon)
        if val > best:
            best = val
    return best


def yule_walker_ar(x, order: int) -> np.ndarray:
    """Textbook Yule-Walker AR coefficients from sample autocovariances."""
    x = np.asarray(x, dtype=float)
    x = x - x.mean()
    n = x.size
    acov = np.array([float(x[:n - k] @ x[k:]) / n for k in range(order + 1)])
    R = np.empty((order, order))
    for i in range(order):
        for j in range(order):
            R[i, j] = acov[abs(i - j)]
    return np.linalg.solve(R, acov[1:])


# ---------------------------------------------------------------------------
# Change-point integrals and a reference sampler with from-scratch sums
# ---------------------------------------------------------------------------

def quad_log_w_integral(d: float, w_within: float, b_between: float,
                        w0: float, n: int) -> float:
    """Direct adaptive quadrature of int_0^w0 w^d (W + B w)^(-(n-1)/2) dw,
    log-scaled at the integrand's peak so tiny magnitudes stay accurate."""
    m = (n - 1) / 2.0
    W, B = w_within, b_between

    def g(w: float) -> float:
        if w <= 0.0:
            return -math.inf if d > 0 else -m * math.log(W)
        return d * math.log(w) - m * math.log(W + B * w)

    interior = []
    if B > 0 and m > d:
        w_peak = d * W / (B * (m - d))
        if 0.0 < w_peak < w0:
            interior = [w_peak]
    scale = max(g(p) for p in [*interior, w0])
    val, _ = quad(lambda w: math.exp(g(w) - scale), 0.0, w0,
                  points=interior or None, epsabs=1e-13, epsrel=1e-11, limit=300)
    return scale + math.log(val)


def quad_log_p_integral(exp_p: int, exp_1mp: int, p0: float) -> float:
    """log of int_0^p0 p^exp_p (1-p)^exp_1mp dp by direct quadrature."""
    val, _ = quad(lambda p: p ** exp_p * (1.0 - p) ** exp_1mp, 0.0, p0,
                  epsabs=1e-16, epsrel=1e-13, limit=300)
    return math.log(val)


def scratch_block_sums(x: np.ndarray, u: np.ndarray):
    """(W, B, blocks) computed naively from the indicator vector."""
    x = np.asarray(x, dtype=float)
    edges = [0, *(int(i) + 1 for i in np.nonzero(u)[0]), x.size]
    grand = x.mean()
    w_sum = 0.0
    b_sum = 0.0
    for a, b in zip(edges, edges[1:]):
        block = x[a:b]
        w_sum += float(((block - block.mean()) ** 2).sum())
        b_sum += block.size * float((block.mean() - grand) ** 2)
    return w_sum, b_sum, len(edges) - 1


def reference_bcp_posterior(series, config):
    """Same Gibbs sampler, but with all block sums recomputed from scratch
    at every position (no incremental bookkeeping) and spans found by
    scanning the indicator vector. Shares the integral code and the RNG
    consumption pattern with the production sampler, so agreement checks
    the partition bookkeeping in isolation."""
    from flunowcast.changepoint import log_inc_beta, log_w_integral
    from flunowcast.rng import Xorshift64Star

    x = np.asarray(series, dtype=float)
    n = x.size
    sd = x.std()
    if sd == 0.0:
        return np.zeros(n - 1)
    x = (x - x.mean()) / sd
    u = np.zeros(n - 1, dtype=bool)
    rng = Xorshift64Star(config.seed)
    counts = np.zeros(n - 1)
    for sweep in range(config.iterations):
        for i in range(n - 1):
            u[i] = False
            w0s, b0s, blocks0 = scratch_block_sums(x, u)
            u[i] = True
            w1s, b1s, _ = scratch_block_sums(x, u)
            num = log_w_integral(blocks0 / 2.0, w1s, b1s, config.w0, n)
            den = log_w_integral((blocks0 - 1) / 2.0, w0s, b0s, config.w0, n)
            if num == math.inf and den == math.inf:
                prob = 0.0
            elif num == math.inf:
                prob = 1.0
            else:
                log_odds = (log_inc_beta(blocks0 + 1.0, float(n - blocks0), config.p0)
                            - log_inc_beta(float(blocks0), float(n - blocks0 + 1), config.p0)
                            + num - den)
                if log_odds > 700.0:
                    prob = 1.0
                elif log_odds < -700.0:
                    prob = 0.0
                else:
                    odds = math.exp(log_odds)
                    prob = odds / (1.0 + odds)
            u[i] = rng.random() < prob
        if sweep >= config.burn_in:
            counts += u
    return counts / (config.iterations - config.burn_in)
