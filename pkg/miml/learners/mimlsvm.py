"""
MIMLSVM: bags are embedded as their distances to k medoid bags, then one
RBF SVM per label is trained on the embedding.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..baselearn import KernelSpec, SvmModel, k_medoids, train_binary_svm
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
class MimlSvmParams:
    ratio: float = 0.2  # medoids as a fraction of training bags
    gamma: float = 1.0
    cost: float = 1.0
    distance: str = BagDistance.AVERAGE.value

    def __post_init__(self):
        if not 0 < self.ratio <= 1:
            raise InvalidArgument("ratio must be in (0, 1]")
        if not self.cost > 0:
            raise InvalidArgument("cost must be > 0")
        check_distance(self.distance)

    @property
    def kernel(self) -> KernelSpec:
        return KernelSpec(gamma=self.gamma)


@dataclass(frozen=True, eq=False)
class MimlSvmModel(TrainedModel):
    algorithm = Algorithm.MIMLSVM

    medoids: tuple[np.ndarray, ...]
    classifiers: tuple[SvmModel, ...]  # one per label

    def embed(self, bags) -> np.ndarray:
        return bag_distance_matrix(bags, self.medoids, self.params.distance)

    def _score_bags(self, bags):
        z = self.embed(bags)
        return np.column_stack([svm.decision_function(z) for svm in self.classifiers])

    def payload(self) -> dict:
        return {
            "dim": self.dim,
            "flags": list(self.flags),
            "medoids": [m.tolist() for m in self.medoids],
            "classifiers": [svm.to_payload() for svm in self.classifiers],
        }

    @classmethod
    def from_payload(cls, common, payload):
        return cls(
            **common,
            medoids=tuple(np.asarray(m, dtype=np.float64) for m in payload["medoids"]),
            classifiers=tuple(SvmModel.from_payload(p) for p in payload["classifiers"]),
        )


def train_miml_svm(
    dataset: MIMLDataset, params: MimlSvmParams | None = None, seed: int = 0
) -> MimlSvmModel:
    params = params or MimlSvmParams()
    check_training_data(dataset, min_cases=2)

    bags = [b.instances for b in dataset.bags]
    n = len(bags)
    k = max(1, round_half_up(params.ratio * n))
    D = bag_distance_matrix(bags, kind=params.distance)
    result = k_medoids(list(range(n)), k, lambda a, b: D[np.ix_(a, b)], seed=seed)
    medoids = list(result.medoids)

    z = D[:, medoids]
    T = sign_targets(dataset)
    classifiers = []
    flags = []
    for l, name in enumerate(dataset.manifest.label_names):
        svm = train_binary_svm(z, T[:, l], params.kernel, params.cost, seed=seed)
        if svm.degenerate:
            logger.warning("mimlsvm.single_class_label label=%s", name)
            flags.append(f"single_class:{name}")
        classifiers.append(svm)

    logger.info("train.done algorithm=%s cases=%s medoids=%s", Algorithm.MIMLSVM.value, n, k)
    return MimlSvmModel(
        **common_fields(dataset, params, seed, flags),
        medoids=tuple(bags[i] for i in medoids),
        classifiers=tuple(classifiers),
    )
