"""
MIMLRBF: an RBF network whose hidden units are medoid bags, clustered per
label, with a ridge-fit output layer.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..baselearn import DEFAULT_RIDGE, LinearMap, k_medoids, ridge_solve
from ..core import MIMLDataset, bag_distance_matrix
from ..enums import Algorithm, BagDistance
from ..exceptions import InvalidArgument
from .base import (
    TrainedModel,
    check_distance,
    check_training_data,
    common_fields,
    round_half_up,
    sign_targets,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MimlRbfParams:
    alpha: float = 0.1  # medoids per label as a fraction of its positive bags
    mu: float = 0.6  # RBF width scale
    distance: str = BagDistance.AVERAGE.value
    ridge: float = DEFAULT_RIDGE

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise InvalidArgument("alpha must be in (0, 1]")
        if not self.mu > 0:
            raise InvalidArgument("mu must be > 0")
        check_distance(self.distance)


def medoids_for(n_positive: int, alpha: float) -> int:
    return max(1, round_half_up(alpha * n_positive))


def rbf_hidden(distances: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian activations plus a trailing constant unit for the bias."""
    phi = np.exp(-(distances**2) / (2.0 * sigma**2))
    return np.hstack([phi, np.ones((phi.shape[0], 1))])


@dataclass(frozen=True, eq=False)
class MimlRbfModel(TrainedModel):
    algorithm = Algorithm.MIMLRBF

    centers: tuple[np.ndarray, ...]  # medoid bags, one hidden unit each
    center_labels: tuple[int, ...]  # label whose positives produced each unit
    sigma: float
    mapping: LinearMap  # input is [phi_1 .. phi_K, 1]

    def _score_bags(self, bags):
        if not self.centers:
            return self.mapping.apply(np.ones((len(bags), 1)))
        d = bag_distance_matrix(bags, self.centers, self.params.distance)
        return self.mapping.apply(rbf_hidden(d, self.sigma))

    def payload(self) -> dict:
        return {
            "dim": self.dim,
            "flags": list(self.flags),
            "centers": [c.tolist() for c in self.centers],
            "center_labels": list(self.center_labels),
            "sigma": self.sigma,
            "mapping": self.mapping.to_payload(),
        }

    @classmethod
    def from_payload(cls, common, payload):
        return cls(
            **common,
            centers=tuple(np.asarray(c, dtype=np.float64) for c in payload["centers"]),
            center_labels=tuple(int(l) for l in payload["center_labels"]),
            sigma=float(payload["sigma"]),
            mapping=LinearMap.from_payload(payload["mapping"]),
        )


def _pair_mean(D: np.ndarray) -> float:
    if D.shape[0] < 2:
        return 0.0
    upper = np.triu_indices(D.shape[0], k=1)
    return float(D[upper].mean())


def train_miml_rbf(
    dataset: MIMLDataset, params: MimlRbfParams | None = None, seed: int = 0
) -> MimlRbfModel:
    params = params or MimlRbfParams()
    check_training_data(dataset)

    bags = [b.instances for b in dataset.bags]
    labels = dataset.label_matrix()
    D = bag_distance_matrix(bags, kind=params.distance)

    def sub(a, b):
        return D[np.ix_(a, b)]

    center_idx: list[int] = []
    center_labels: list[int] = []
    skipped: list[int] = []
    for l in range(dataset.n_labels):
        positives = np.flatnonzero(labels[:, l]).tolist()
        if not positives:
            logger.warning("mimlrbf.label_without_positives label=%s", dataset.manifest.label_names[l])
            skipped.append(l)
            continue
        k = medoids_for(len(positives), params.alpha)
        result = k_medoids(positives, k, sub, seed=seed)
        center_idx.extend(positives[m] for m in result.medoids)
        center_labels.extend([l] * k)

    spread = _pair_mean(D[np.ix_(center_idx, center_idx)])
    if spread == 0.0:
        spread = _pair_mean(D)
    if spread == 0.0:
        spread = 1.0
    sigma = params.mu * spread

    T = sign_targets(dataset)
    if center_idx:
        model_in = rbf_hidden(D[:, center_idx], sigma)
    else:
        model_in = np.ones((len(bags), 1))
    mapping = ridge_solve(model_in, T, params.ridge)

    weights = mapping.weights.copy()
    for l in skipped:
        weights[l] = 0.0
        weights[l, -1] = -1.0
    mapping = LinearMap(weights=weights, bias=mapping.bias)

    logger.info(
        "train.done algorithm=%s cases=%s hidden=%s sigma=%s",
        Algorithm.MIMLRBF.value,
        len(bags),
        len(center_idx),
        sigma,
    )
    flags = [f"no_positives:{dataset.manifest.label_names[l]}" for l in skipped]
    return MimlRbfModel(
        **common_fields(dataset, params, seed, flags),
        centers=tuple(bags[i] for i in center_idx),
        center_labels=tuple(center_labels),
        sigma=sigma,
        mapping=mapping,
    )
