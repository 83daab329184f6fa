"""
Binary kernel SVM trained by two-coordinate dual ascent (SMO with
maximal-violating-pair selection).

Dual problem solved:

    min_a  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C_i,  y'a = 0,
    Q_ij = y_i y_j k(x_i, x_j)

Training stops once the KKT gap  max_{I_up} -y_i G_i - min_{I_low} -y_i G_i
falls under `tol`.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from scipy.spatial.distance import cdist

from ..exceptions import InvalidArgument

logger = logging.getLogger(__name__)

_TAU = 1e-12  # curvature floor for pairs with identical kernel columns


@dataclass(frozen=True)
class KernelSpec:
    gamma: float = 1.0
    kind: str = "rbf"

    def __post_init__(self):
        if self.kind != "rbf":
            raise InvalidArgument(f"unsupported kernel kind {self.kind!r}")
        if not self.gamma > 0:
            raise InvalidArgument("gamma must be > 0")

    def matrix(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
        ys = np.atleast_2d(np.asarray(ys, dtype=np.float64))
        if xs.shape[1] != ys.shape[1]:
            raise InvalidArgument(f"dimension mismatch: {xs.shape[1]} != {ys.shape[1]}")
        return np.exp(-self.gamma * cdist(xs, ys, "sqeuclidean"))


def rbf_kernel(x, y, gamma: float) -> float:
    return float(KernelSpec(gamma=gamma).matrix(x, y)[0, 0])


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray  # (n_sv, dim)
    dual_coef: np.ndarray  # alpha_i * y_i for each support vector
    bias: float
    kernel: KernelSpec
    cost: float
    support_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    degenerate: bool = False

    def decision_function(self, xs) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
        if self.support_vectors.shape[0] == 0:
            return np.full(xs.shape[0], self.bias)
        return self.kernel.matrix(xs, self.support_vectors) @ self.dual_coef + self.bias

    def to_payload(self) -> dict:
        return {
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "gamma": self.kernel.gamma,
            "cost": self.cost,
            "support_indices": self.support_indices.tolist(),
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "SvmModel":
        sv = np.asarray(payload["support_vectors"], dtype=np.float64)
        return cls(
            support_vectors=sv.reshape(len(payload["support_vectors"]), -1) if sv.size else sv.reshape(0, 0),
            dual_coef=np.asarray(payload["dual_coef"], dtype=np.float64),
            bias=float(payload["bias"]),
            kernel=KernelSpec(gamma=float(payload["gamma"])),
            cost=float(payload["cost"]),
            support_indices=np.asarray(payload["support_indices"], dtype=np.int64),
            degenerate=bool(payload["degenerate"]),
        )


def svm_margin(model: SvmModel, x) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if model.support_vectors.shape[0] and x.shape[1] != model.support_vectors.shape[1]:
        raise InvalidArgument(
            f"dimension mismatch: {x.shape[1]} != {model.support_vectors.shape[1]}"
        )
    return float(model.decision_function(x)[0])


def constant_svm(score: float, kernel: KernelSpec, cost: float) -> SvmModel:
    return SvmModel(
        support_vectors=np.zeros((0, 0)),
        dual_coef=np.zeros(0),
        bias=float(score),
        kernel=kernel,
        cost=cost,
        degenerate=True,
    )


def train_binary_svm(
    xs,
    ys,
    kernel: KernelSpec,
    cost: float = 1.0,
    tol: float | None = None,
    seed: int = 0,
    sample_weight=None,
    max_passes: int | None = None,
) -> SvmModel:
    """
    Single-class input yields a constant-score model flagged degenerate.
    `sample_weight` scales the box constraint per point: C_i = cost * w_i.
    """
    tol = float(getattr(settings, "MIML_SVM_TOL", 1e-3) if tol is None else tol)
    max_passes = int(getattr(settings, "MIML_SVM_MAX_PASSES", 100) if max_passes is None else max_passes)

    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    y = np.asarray(ys, dtype=np.float64).ravel()
    n = xs.shape[0]
    if n != y.shape[0] or n < 2:
        raise InvalidArgument("need |xs| == |ys| >= 2")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise InvalidArgument("labels must be -1 or +1")
    if not cost > 0:
        raise InvalidArgument("cost must be > 0")

    if np.all(y == y[0]):
        return constant_svm(y[0], kernel, cost)

    upper = np.full(n, float(cost))
    if sample_weight is not None:
        w = np.asarray(sample_weight, dtype=np.float64).ravel()
        if w.shape[0] != n or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidArgument("sample_weight must be finite, non-negative, one per point")
        upper = upper * w

    K = kernel.matrix(xs, xs)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # G = Q alpha - e

    # the seeded permutation only decides ties between equally violating points
    order = np.random.default_rng(seed).permutation(n)
    inv = np.empty(n, dtype=np.int64)
    inv[order] = np.arange(n)
    y_p, up_p, K_p = y[order], upper[order], K[np.ix_(order, order)]

    max_iter = max_passes * max(n, 10)
    it = 0
    while it < max_iter:
        minus_yg = -y_p * grad
        in_up = ((y_p > 0) & (alpha < up_p)) | ((y_p < 0) & (alpha > 0))
        in_low = ((y_p < 0) & (alpha < up_p)) | ((y_p > 0) & (alpha > 0))
        if not in_up.any() or not in_low.any():
            break
        i = int(np.argmax(np.where(in_up, minus_yg, -np.inf)))
        j = int(np.argmin(np.where(in_low, minus_yg, np.inf)))
        gap = minus_yg[i] - minus_yg[j]
        if gap < tol:
            break

        curvature = max(K_p[i, i] + K_p[j, j] - 2.0 * K_p[i, j], _TAU)
        step = gap / curvature
        step = min(
            step,
            (up_p[i] - alpha[i]) if y_p[i] > 0 else alpha[i],
            alpha[j] if y_p[j] > 0 else (up_p[j] - alpha[j]),
        )
        alpha[i] = min(max(alpha[i] + step * y_p[i], 0.0), up_p[i])
        alpha[j] = min(max(alpha[j] - step * y_p[j], 0.0), up_p[j])
        grad += step * y_p * (K_p[:, i] - K_p[:, j])
        it += 1
    else:
        logger.warning("svm.max_iter n=%s iterations=%s", n, it)

    bias = -_rho(alpha, y_p, grad, up_p)
    alpha = alpha[inv]

    sv = np.flatnonzero(alpha > 0)
    return SvmModel(
        support_vectors=xs[sv],
        dual_coef=alpha[sv] * y[sv],
        bias=float(bias),
        kernel=kernel,
        cost=float(cost),
        support_indices=sv.astype(np.int64),
    )


def _rho(alpha, y, grad, upper) -> float:
    yg = y * grad
    at_upper = alpha >= upper
    at_lower = alpha <= 0
    free = ~(at_upper | at_lower)
    if free.any():
        return float(yg[free].mean())

    # no free vector: midpoint of the feasible interval
    ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
    lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
    ub = yg[ub_mask].min() if ub_mask.any() else np.inf
    lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
    if np.isinf(ub) or np.isinf(lb):
        return float(ub if np.isfinite(ub) else lb if np.isfinite(lb) else 0.0)
    return float((ub + lb) / 2.0)
