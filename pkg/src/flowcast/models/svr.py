"""Epsilon-insensitive support vector regression with an RBF kernel.

Training solves the dual by sequential minimal optimization. The 2n dual
variables are ``beta = [alpha; alpha_star]`` with labels ``s = [+1; -1]``; the
problem is::

    min 0.5 beta^T Q beta + p^T beta,  Q_tu = s_t s_u K(x_t, x_u),
    p = [eps - y; eps + y],  s^T beta = 0,  0 <= beta <= C.

Pairs are picked with second-order working-set selection; the decision
function is ``sum_i (alpha_i - alpha_star_i) K(x_i, x) + bias``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, ConvergenceError, ShapeError
from .base import as_batch

TAU = 1e-12
DEFAULT_C = 0.095
DEFAULT_GAMMA = 0.165
DEFAULT_EPSILON = 0.01
MAX_ITER = 100_000
PRECOMPUTE_LIMIT = 6000


def rbf_kernel(a, b, gamma: float) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"kernel operands differ in length: {a.shape} vs {b.shape}")
    if gamma <= 0:
        raise ConfigError(f"gamma must be > 0, got {gamma}")
    d = a - b
    return float(np.exp(-gamma * np.dot(d, d)))


def rbf_matrix(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * (A @ B.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass
class SvrModel:
    support_vectors: np.ndarray
    dual_coeffs: np.ndarray
    bias: float
    C: float
    gamma: float
    epsilon_tube: float
    info: dict = field(default_factory=dict, compare=False)

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]


class _KernelRows:
    """Kernel rows on demand; the full matrix is cached when it fits."""

    def __init__(self, x: np.ndarray, gamma: float):
        self.x = x
        self.gamma = gamma
        self.sq = (x * x).sum(1)
        self.full = rbf_matrix(x, x, gamma) if len(x) <= PRECOMPUTE_LIMIT else None
        self.cache: dict[int, np.ndarray] = {}

    def row(self, k: int) -> np.ndarray:
        if self.full is not None:
            return self.full[k]
        r = self.cache.get(k)
        if r is None:
            if len(self.cache) > 2000:
                self.cache.clear()
            d = self.sq + self.sq[k] - 2.0 * (self.x @ self.x[k])
            r = self.cache[k] = np.exp(-self.gamma * np.maximum(d, 0.0))
        return r


def svr_fit(x, y, C: float = DEFAULT_C, gamma: float = DEFAULT_GAMMA, epsilon_tube: float = DEFAULT_EPSILON,
            tol: float = 1e-3, max_iter: int = MAX_ITER) -> SvrModel:
    """Fit the dual by SMO until the maximal KKT violation drops below ``tol``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise ShapeError(f"x shape {x.shape} and y shape {y.shape} do not match")
    n = x.shape[0]
    if n < 2:
        raise ConfigError("svr_fit needs at least two samples")
    if C <= 0 or gamma <= 0 or epsilon_tube < 0 or tol <= 0:
        raise ConfigError(f"need C > 0, gamma > 0, epsilon_tube >= 0, tol > 0; got {C}, {gamma}, {epsilon_tube}, {tol}")

    kr = _KernelRows(x, gamma)
    s = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([epsilon_tube - y, epsilon_tube + y])
    beta = np.zeros(2 * n)
    grad = p.copy()
    sample = np.concatenate([np.arange(n), np.arange(n)])

    it = 0
    while True:
        minus_sg = -s * grad
        up = ((s > 0) & (beta < C)) | ((s < 0) & (beta > 0))
        low = ((s < 0) & (beta < C)) | ((s > 0) & (beta > 0))
        i = int(np.argmax(np.where(up, minus_sg, -np.inf)))
        gmax = minus_sg[i]
        gmin = np.min(np.where(low, minus_sg, np.inf))
        gap = gmax - gmin
        if gap < tol:
            break
        if it >= max_iter:
            raise ConvergenceError(f"SMO did not converge in {max_iter} iterations; worst KKT violation {gap:.3g}", gap)
        it += 1

        k_i = kr.row(sample[i])
        k_ii = k_i[sample[i]]
        diag = 1.0  # RBF kernel: K(x, x) == 1
        b_it = gmax - minus_sg
        a_it = k_ii + diag - 2.0 * np.tile(k_i, 2)
        a_it = np.where(a_it > 0, a_it, TAU)
        cand = low & (b_it > 0)
        j = int(np.argmin(np.where(cand, -(b_it * b_it) / a_it, np.inf)))

        k_j = kr.row(sample[j])
        q_ij = s[i] * s[j] * k_i[sample[j]]
        old_i, old_j = beta[i], beta[j]
        if s[i] != s[j]:
            quad = max(k_ii + k_j[sample[j]] + 2.0 * q_ij, TAU)
            delta = (-grad[i] - grad[j]) / quad
            diff = beta[i] - beta[j]
            beta[i] += delta
            beta[j] += delta
            if diff > 0:
                if beta[j] < 0:
                    beta[j], beta[i] = 0.0, diff
            elif beta[i] < 0:
                beta[i], beta[j] = 0.0, -diff
            if diff > 0:
                if beta[i] > C:
                    beta[i], beta[j] = C, C - diff
            elif beta[j] > C:
                beta[j], beta[i] = C, C + diff
        else:
            quad = max(k_ii + k_j[sample[j]] - 2.0 * q_ij, TAU)
            delta = (grad[i] - grad[j]) / quad
            total = beta[i] + beta[j]
            beta[i] -= delta
            beta[j] += delta
            if total > C:
                if beta[i] > C:
                    beta[i], beta[j] = C, total - C
                if beta[j] > C:
                    beta[j], beta[i] = C, total - C
            else:
                if beta[j] < 0:
                    beta[j], beta[i] = 0.0, total
                if beta[i] < 0:
                    beta[i], beta[j] = 0.0, total
        d_i = beta[i] - old_i
        d_j = beta[j] - old_j
        grad += s * np.tile(s[i] * d_i * k_i + s[j] * d_j * k_j, 2)

    rho = _rho(s, grad, beta, C)
    coef = beta[:n] - beta[n:]
    keep = coef != 0
    objective = 0.5 * float(beta @ (grad + p))
    return SvrModel(x[keep].copy(), coef[keep], -rho, C, gamma, epsilon_tube,
                    info={"iterations": it, "kkt_gap": float(gap), "objective": objective,
                          "n_train": n, "n_support": int(keep.sum()), "train_coef": coef})


def _rho(s, grad, beta, C) -> float:
    sg = s * grad
    at_upper = beta >= C
    at_lower = beta <= 0
    free = ~(at_upper | at_lower)
    if free.any():
        return float(sg[free].mean())
    ub_mask = (at_upper & (s < 0)) | (at_lower & (s > 0))
    lb_mask = (at_upper & (s > 0)) | (at_lower & (s < 0))
    ub = sg[ub_mask].min() if ub_mask.any() else np.inf
    lb = sg[lb_mask].max() if lb_mask.any() else -np.inf
    return float((ub + lb) / 2.0)


def svr_predict(model: SvrModel, x) -> np.ndarray | float:
    """Decision function for one vector (returns float) or a batch of rows."""
    xb, single = as_batch(x, model.n_features, "svr features")
    if model.dual_coeffs.size == 0:
        out = np.full(xb.shape[0], model.bias)
    else:
        out = rbf_matrix(xb, model.support_vectors, model.gamma) @ model.dual_coeffs + model.bias
    return float(out[0]) if single else out


def svr_kkt_violation(model: SvrModel, x, y) -> float:
    """Largest breach of the epsilon-insensitive optimality conditions on the training set.

    Uses the per-row coefficients recorded by :func:`svr_fit`; for a loaded
    model, rows are matched to support vectors by exact coordinates.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    coef = model.info.get("train_coef")
    if coef is None or len(coef) != len(x):
        coef = np.zeros(len(x))
        index = {row.tobytes(): k for k, row in enumerate(model.support_vectors)}
        for r, row in enumerate(x):
            k = index.get(row.tobytes())
            if k is not None:
                coef[r] = model.dual_coeffs[k]
    resid = y - svr_predict(model, x)
    eps, C = model.epsilon_tube, model.C
    v = np.where(coef == 0, np.maximum(np.abs(resid) - eps, 0.0), 0.0)
    free_pos = (coef > 0) & (coef < C)
    free_neg = (coef < 0) & (coef > -C)
    v = np.where(free_pos, np.abs(resid - eps), v)
    v = np.where(free_neg, np.abs(resid + eps), v)
    v = np.where(coef >= C, np.maximum(eps - resid, 0.0), v)
    v = np.where(coef <= -C, np.maximum(eps + resid, 0.0), v)
    return float(v.max())


class SvrRegressor:
    kind = "svr"

    def __init__(self, C=DEFAULT_C, gamma=DEFAULT_GAMMA, epsilon_tube=DEFAULT_EPSILON, tol=1e-3,
                 max_iter=MAX_ITER, model: SvrModel | None = None):
        self.C, self.gamma, self.epsilon_tube = C, gamma, epsilon_tube
        self.tol, self.max_iter = tol, max_iter
        self.model = model

    def fit(self, features, targets) -> "SvrRegressor":
        self.model = svr_fit(features, targets, self.C, self.gamma, self.epsilon_tube, self.tol, self.max_iter)
        return self

    def predict(self, features) -> np.ndarray:
        if self.model is None:
            raise ConfigError("SVR model has not been fitted")
        x, _ = as_batch(features, self.model.n_features, "svr features")
        return svr_predict(self.model, x)

    def hyperparameters(self) -> dict:
        return {"C": self.C, "gamma": self.gamma, "epsilon_tube": self.epsilon_tube}
