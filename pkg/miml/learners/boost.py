"""
MIMLBOOST: the MIML problem is degenerated to multi-instance learning by
expanding every case into one bag per label, each instance tagged with a
one-hot label code, and boosted with instance-level RBF SVMs.
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..baselearn import KernelSpec, SvmModel, train_binary_svm
from ..core import MIMLDataset
from ..enums import Algorithm
from ..exceptions import InvalidArgument
from .base import TrainedModel, check_training_data, common_fields, sign_targets

logger = logging.getLogger(__name__)

_MIN_ERROR = 1e-10


@dataclass(frozen=True)
class MimlBoostParams:
    rounds: int = 25
    base_cost: float = 1.0
    gamma: float = 1.0
    tag_scale: float = 3.0  # magnitude of the one-hot label tag
    max_instances: int = 1000  # base learner sees a weighted resample above this

    def __post_init__(self):
        if self.rounds < 1:
            raise InvalidArgument("rounds must be >= 1")
        if not self.base_cost > 0:
            raise InvalidArgument("base_cost must be > 0")
        if not self.tag_scale > 0:
            raise InvalidArgument("tag_scale must be > 0")
        if self.max_instances < 2:
            raise InvalidArgument("max_instances must be >= 2")

    @property
    def kernel(self) -> KernelSpec:
        return KernelSpec(gamma=self.gamma)


class ExpandedBags(NamedTuple):
    instances: np.ndarray  # (n_instances, dim + L)
    offsets: np.ndarray  # start of each expanded bag
    sizes: np.ndarray
    case_index: np.ndarray  # source case of each expanded bag
    label_index: np.ndarray  # label each expanded bag stands for


def expand_bags(bags, n_labels: int, tag_scale: float) -> ExpandedBags:
    """Case i, label l -> bag (i, l); ordered case-major."""
    parts = []
    case_index = []
    label_index = []
    for i, bag in enumerate(bags):
        inst = np.asarray(bag, dtype=np.float64)
        for l in range(n_labels):
            tag = np.zeros((inst.shape[0], n_labels))
            tag[:, l] = tag_scale
            parts.append(np.hstack([inst, tag]))
            case_index.append(i)
            label_index.append(l)
    sizes = np.array([p.shape[0] for p in parts], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.int64)
    return ExpandedBags(
        instances=np.vstack(parts),
        offsets=offsets,
        sizes=sizes,
        case_index=np.asarray(case_index, dtype=np.int64),
        label_index=np.asarray(label_index, dtype=np.int64),
    )


def bag_votes(svm: SvmModel, expanded: ExpandedBags) -> np.ndarray:
    """Mean instance sign per expanded bag, in [-1, 1]."""
    signs = np.sign(svm.decision_function(expanded.instances))
    return np.add.reduceat(signs, expanded.offsets) / expanded.sizes


@dataclass(frozen=True, eq=False)
class MimlBoostModel(TrainedModel):
    algorithm = Algorithm.MIMLBOOST

    learners: tuple[SvmModel, ...]
    coefficients: tuple[float, ...]
    constant: float | None  # set when boosting could not start

    def _score_bags(self, bags):
        n, L = len(bags), self.n_labels
        if self.constant is not None:
            return np.full((n, L), self.constant)
        expanded = expand_bags(bags, L, self.params.tag_scale)
        total = np.zeros(n * L)
        for svm, coef in zip(self.learners, self.coefficients):
            total += coef * bag_votes(svm, expanded)
        return (total / sum(self.coefficients)).reshape(n, L)

    def payload(self) -> dict:
        return {
            "dim": self.dim,
            "flags": list(self.flags),
            "learners": [svm.to_payload() for svm in self.learners],
            "coefficients": list(self.coefficients),
            "constant": self.constant,
        }

    @classmethod
    def from_payload(cls, common, payload):
        constant = payload["constant"]
        return cls(
            **common,
            learners=tuple(SvmModel.from_payload(p) for p in payload["learners"]),
            coefficients=tuple(float(c) for c in payload["coefficients"]),
            constant=None if constant is None else float(constant),
        )


def train_miml_boost(
    dataset: MIMLDataset, params: MimlBoostParams | None = None, seed: int = 0
) -> MimlBoostModel:
    params = params or MimlBoostParams()
    check_training_data(dataset)

    L = dataset.n_labels
    expanded = expand_bags([b.instances for b in dataset.bags], L, params.tag_scale)
    y_bag = sign_targets(dataset).ravel()  # case-major, matches expand_bags
    y_inst = np.repeat(y_bag, expanded.sizes)
    n_bags = y_bag.shape[0]
    n_inst = expanded.instances.shape[0]
    rng = np.random.default_rng(seed)

    w = np.full(n_bags, 1.0 / n_bags)
    learners: list[SvmModel] = []
    coefficients: list[float] = []
    constant = None
    flags: list[str] = []

    for t in range(params.rounds):
        inst_w = np.repeat(w / expanded.sizes, expanded.sizes)
        inst_w = inst_w / inst_w.mean()
        if n_inst > params.max_instances:
            pick = rng.choice(n_inst, size=params.max_instances, replace=False, p=inst_w / inst_w.sum())
            pick.sort()
            svm = train_binary_svm(
                expanded.instances[pick], y_inst[pick], params.kernel, params.base_cost, seed=seed + t
            )
        else:
            svm = train_binary_svm(
                expanded.instances,
                y_inst,
                params.kernel,
                params.base_cost,
                seed=seed + t,
                sample_weight=inst_w,
            )

        h = bag_votes(svm, expanded)
        error = float(w[np.sign(h) != y_bag].sum())
        logger.debug("mimlboost.round t=%s error=%s", t + 1, error)
        if error >= 0.5:
            if t == 0:
                constant = float(np.dot(w, y_bag))
                flags.append("degenerate")
                logger.warning("mimlboost.degenerate error=%s", error)
            break

        coef = 0.5 * math.log((1.0 - max(error, _MIN_ERROR)) / max(error, _MIN_ERROR))
        learners.append(svm)
        coefficients.append(coef)
        if error == 0.0:
            break
        w = w * np.exp(-coef * y_bag * h)
        w = w / w.sum()

    logger.info(
        "train.done algorithm=%s cases=%s rounds=%s",
        Algorithm.MIMLBOOST.value,
        len(dataset),
        len(learners),
    )
    return MimlBoostModel(
        **common_fields(dataset, params, seed, flags),
        learners=tuple(learners),
        coefficients=tuple(coefficients),
        constant=constant,
    )
