"""
KISAR: bags are mapped onto per-label prototype instances ("key instances")
and a linear logistic model per label is fit, with correlated labels pulled
towards similar weight vectors.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.spatial.distance import cdist

from ..baselearn import k_means
from ..core import MIMLDataset
from ..enums import Algorithm
from ..exceptions import InvalidArgument
from .base import TrainedModel, check_training_data, common_fields, sign_targets, stack_bags

logger = logging.getLogger(__name__)

TRACE_EVERY = 100


@dataclass(frozen=True)
class KisarParams:
    prototypes_per_label: int = 10
    similarity_gamma: float = 1.0
    correlation_weight: float = 0.1
    max_iters: int = 2000
    step: float = 0.1

    def __post_init__(self):
        if self.prototypes_per_label < 1:
            raise InvalidArgument("prototypes_per_label must be >= 1")
        if not self.similarity_gamma > 0:
            raise InvalidArgument("similarity_gamma must be > 0")
        if self.correlation_weight < 0:
            raise InvalidArgument("correlation_weight must be >= 0")
        if self.max_iters < 0:
            raise InvalidArgument("max_iters must be >= 0")
        if not self.step > 0:
            raise InvalidArgument("step must be > 0")


def prototype_features(bags, prototypes: np.ndarray, gamma: float) -> np.ndarray:
    """(n_bags, n_prototypes): best similarity of any instance to each prototype."""
    instances, offsets, _ = stack_bags(bags)
    sim = np.exp(-gamma * cdist(instances, prototypes, "sqeuclidean"))
    return np.maximum.reduceat(sim, offsets, axis=0)


def label_correlation(labels: np.ndarray) -> np.ndarray:
    """Cosine similarity of label co-occurrence columns, zero diagonal."""
    Y = labels.astype(np.float64)
    norms = np.sqrt((Y**2).sum(axis=0))
    safe = np.where(norms > 0, norms, 1.0)
    corr = (Y.T @ Y) / np.outer(safe, safe)
    np.fill_diagonal(corr, 0.0)
    return corr


def objective(F, y, W, b, corr, weight) -> float:
    """Mean logistic loss per label plus `weight` times the correlation penalty."""
    margins = y * (F @ W.T + b)
    loss = np.logaddexp(0.0, -margins).mean(axis=0).sum()
    diff = ((W[:, None, :] - W[None, :, :]) ** 2).sum(axis=2)
    return float(loss + weight * (corr * diff).sum())


@dataclass(frozen=True, eq=False)
class KisarModel(TrainedModel):
    algorithm = Algorithm.KISAR

    prototypes: np.ndarray  # (P, dim)
    weights: np.ndarray  # (L, P)
    bias: np.ndarray  # (L,)
    constant: np.ndarray  # nan where trained
    objective_trace: tuple[float, ...]

    def _score_bags(self, bags):
        F = prototype_features(bags, self.prototypes, self.params.similarity_gamma)
        scores = F @ self.weights.T + self.bias
        fixed = ~np.isnan(self.constant)
        scores[:, fixed] = self.constant[fixed]
        return scores

    def payload(self) -> dict:
        return {
            "dim": self.dim,
            "flags": list(self.flags),
            "prototypes": self.prototypes.tolist(),
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "constant": [None if np.isnan(c) else c for c in self.constant.tolist()],
            "objective_trace": list(self.objective_trace),
        }

    @classmethod
    def from_payload(cls, common, payload):
        bias = np.asarray(payload["bias"], dtype=np.float64)
        prototypes = np.asarray(payload["prototypes"], dtype=np.float64).reshape(-1, common["dim"])
        return cls(
            **common,
            prototypes=prototypes,
            weights=np.asarray(payload["weights"], dtype=np.float64).reshape(bias.shape[0], -1),
            bias=bias,
            constant=np.array(
                [np.nan if c is None else float(c) for c in payload["constant"]], dtype=np.float64
            ),
            objective_trace=tuple(float(v) for v in payload["objective_trace"]),
        )


def train_kisar(dataset: MIMLDataset, params: KisarParams | None = None, seed: int = 0) -> KisarModel:
    params = params or KisarParams()
    check_training_data(dataset)

    labels = dataset.label_matrix()
    y = sign_targets(dataset)
    n, L = y.shape
    bags = [b.instances for b in dataset.bags]

    prototypes = []
    for l in range(L):
        positives = np.flatnonzero(labels[:, l])
        if positives.size == 0:
            continue
        pool = np.vstack([bags[i] for i in positives])
        k = min(params.prototypes_per_label, pool.shape[0])
        prototypes.append(k_means(pool, k, seed=seed + l).centroids)
    if not prototypes:
        raise InvalidArgument("no label has a positive case; nothing to learn prototypes from")
    P = np.vstack(prototypes)

    constant = np.full(L, np.nan)
    flags = []
    for l, name in enumerate(dataset.manifest.label_names):
        if np.all(y[:, l] == y[0, l]):
            constant[l] = y[0, l]
            flags.append(f"single_class:{name}")
            logger.warning("kisar.single_class_label label=%s", name)
    active = np.isnan(constant)

    F = prototype_features(bags, P, params.similarity_gamma)
    corr = label_correlation(labels) * np.outer(active, active)
    laplacian = np.diag(corr.sum(axis=1)) - corr
    # the loss is a per-case mean, so the penalty is scaled to match
    penalty = params.correlation_weight / n

    W = np.zeros((L, P.shape[0]))
    b = np.zeros(L)
    best = objective(F, y[:, active], W[active], b[active], corr[np.ix_(active, active)], penalty)
    best_W, best_b = W.copy(), b.copy()
    trace = [best]

    it = 0
    for it in range(1, params.max_iters + 1):
        margins = y * (F @ W.T + b)
        G = -y * expit(-margins) / n  # d loss / d score
        G[:, ~active] = 0.0
        grad_W = G.T @ F + 4.0 * penalty * laplacian @ W
        grad_b = G.sum(axis=0)
        W = W - params.step * grad_W
        b = b - params.step * grad_b

        value = objective(
            F, y[:, active], W[active], b[active], corr[np.ix_(active, active)], penalty
        )
        if value < best:
            best, best_W, best_b = value, W.copy(), b.copy()
        if it % TRACE_EVERY == 0:
            trace.append(best)
    if it % TRACE_EVERY:
        trace.append(best)

    logger.info(
        "train.done algorithm=%s cases=%s prototypes=%s objective=%s",
        Algorithm.KISAR.value,
        n,
        P.shape[0],
        best,
    )
    return KisarModel(
        **common_fields(dataset, params, seed, flags),
        prototypes=P,
        weights=best_W,
        bias=best_b,
        constant=constant,
        objective_trace=tuple(trace),
    )
