"""
MIML-kNN: a bag is described by the labels of its r nearest training bags
and of the training bags that cite it (count it among their own c nearest);
a linear map from that citation vector to label scores is fit by ridge.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..baselearn import DEFAULT_RIDGE, LinearMap, ridge_solve
from ..core import MIMLDataset, bag_distance_matrix
from ..enums import Algorithm, BagDistance
from ..exceptions import InvalidArgument
from .base import TrainedModel, check_distance, check_training_data, common_fields, sign_targets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MimlKnnParams:
    r: int = 10  # neighbors
    c: int = 20  # citers
    distance: str = BagDistance.AVERAGE.value
    ridge: float = DEFAULT_RIDGE

    def __post_init__(self):
        if self.r < 1 or self.c < 1:
            raise InvalidArgument("r and c must be >= 1")
        check_distance(self.distance)


@dataclass(frozen=True, eq=False)
class MimlKnnModel(TrainedModel):
    algorithm = Algorithm.MIMLKNN

    train_bags: tuple[np.ndarray, ...]
    train_labels: np.ndarray  # (n, L) bool
    cite_radius: np.ndarray  # distance to each training bag's c-th nearest other bag
    mapping: LinearMap

    def citation_vectors(self, distances: np.ndarray) -> np.ndarray:
        """distances: (m, n) query-to-training bag distances -> (m, L) counts."""
        r = self.params.r
        ranks = np.argsort(distances, axis=1, kind="stable")[:, :r]
        member = np.zeros(distances.shape, dtype=bool)
        np.put_along_axis(member, ranks, True, axis=1)
        member |= distances <= self.cite_radius[None, :]
        return member.astype(np.float64) @ self.train_labels.astype(np.float64)

    def _score_bags(self, bags):
        d = bag_distance_matrix(bags, self.train_bags, self.params.distance)
        return self.mapping.apply(self.citation_vectors(d))

    def payload(self) -> dict:
        return {
            "dim": self.dim,
            "flags": list(self.flags),
            "train_bags": [b.tolist() for b in self.train_bags],
            "train_labels": self.train_labels.astype(int).tolist(),
            "cite_radius": self.cite_radius.tolist(),
            "mapping": self.mapping.to_payload(),
        }

    @classmethod
    def from_payload(cls, common, payload):
        return cls(
            **common,
            train_bags=tuple(np.asarray(b, dtype=np.float64) for b in payload["train_bags"]),
            train_labels=np.asarray(payload["train_labels"], dtype=bool),
            cite_radius=np.asarray(payload["cite_radius"], dtype=np.float64),
            mapping=LinearMap.from_payload(payload["mapping"]),
        )


def train_miml_knn(
    dataset: MIMLDataset, params: MimlKnnParams | None = None, seed: int = 0
) -> MimlKnnModel:
    params = params or MimlKnnParams()
    check_training_data(dataset)
    n = len(dataset)
    if params.r >= n:
        raise InvalidArgument(f"r={params.r} needs more than {params.r} training cases, got {n}")
    c = min(params.c, n - 1)

    bags = [b.instances for b in dataset.bags]
    labels = dataset.label_matrix()

    D = bag_distance_matrix(bags, kind=params.distance)
    np.fill_diagonal(D, np.inf)  # a bag is neither its own neighbor nor citer
    ranks = np.argsort(D, axis=1, kind="stable")

    neighbors = np.zeros((n, n), dtype=bool)
    np.put_along_axis(neighbors, ranks[:, : params.r], True, axis=1)
    cites = np.zeros((n, n), dtype=bool)  # cites[j, i]: i is among j's c nearest
    np.put_along_axis(cites, ranks[:, :c], True, axis=1)

    citation = (neighbors | cites.T).astype(np.float64) @ labels.astype(np.float64)
    mapping = ridge_solve(citation, sign_targets(dataset), params.ridge)

    cite_radius = D[np.arange(n), ranks[:, c - 1]]
    logger.info("train.done algorithm=%s cases=%s r=%s c=%s", Algorithm.MIMLKNN.value, n, params.r, c)
    return MimlKnnModel(
        **common_fields(dataset, params, seed),
        train_bags=tuple(bags),
        train_labels=labels,
        cite_radius=cite_radius,
        mapping=mapping,
    )
