"""
M3MIML: one linear scorer per label, the bag score being the best instance
score, trained to maximise the ranking margin.

Minimises  sum_l ||w_l||^2 / 2 + cost * sum_{i,l} max(0, 1 - y_il (max_x w_l.x + b_l))
by normalised subgradient steps with a projection onto the ball that must
contain the optimum. Labels are independent, so the best iterate is kept per
label.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..core import MIMLDataset
from ..enums import Algorithm
from ..exceptions import InvalidArgument
from .base import TrainedModel, check_training_data, common_fields, sign_targets, stack_bags

logger = logging.getLogger(__name__)

TRACE_EVERY = 100


@dataclass(frozen=True)
class M3MimlParams:
    cost: float = 1.0
    max_iters: int = 2000
    step: float = 1e-2

    def __post_init__(self):
        if not self.cost > 0:
            raise InvalidArgument("cost must be > 0")
        if self.max_iters < 0:
            raise InvalidArgument("max_iters must be >= 0")
        if not self.step > 0:
            raise InvalidArgument("step must be > 0")


def _bag_max(instances, offsets, weights, bias):
    """Per (bag, label): best instance score and the position of that instance."""
    inst_scores = instances @ weights.T + bias
    best = np.maximum.reduceat(inst_scores, offsets, axis=0)
    owner = np.repeat(np.arange(offsets.shape[0]), np.diff(np.append(offsets, instances.shape[0])))
    positions = np.where(
        inst_scores == best[owner], np.arange(instances.shape[0])[:, None], instances.shape[0]
    )
    return best, np.minimum.reduceat(positions, offsets, axis=0)


def label_objectives(instances, offsets, y, weights, bias, cost) -> np.ndarray:
    scores, _ = _bag_max(instances, offsets, weights, bias)
    hinge = np.maximum(0.0, 1.0 - y * scores).sum(axis=0)
    return 0.5 * (weights**2).sum(axis=1) + cost * hinge


@dataclass(frozen=True, eq=False)
class M3MimlModel(TrainedModel):
    algorithm = Algorithm.M3MIML

    weights: np.ndarray  # (L, dim)
    bias: np.ndarray  # (L,)
    constant: np.ndarray  # per label: nan where trained, else the fixed score
    objective_trace: tuple[float, ...]

    def _score_bags(self, bags):
        instances, offsets, _ = stack_bags(bags)
        scores, _ = _bag_max(instances, offsets, self.weights, self.bias)
        fixed = ~np.isnan(self.constant)
        scores[:, fixed] = self.constant[fixed]
        return scores

    def payload(self) -> dict:
        return {
            "dim": self.dim,
            "flags": list(self.flags),
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "constant": [None if math.isnan(c) else c for c in self.constant.tolist()],
            "objective_trace": list(self.objective_trace),
        }

    @classmethod
    def from_payload(cls, common, payload):
        bias = np.asarray(payload["bias"], dtype=np.float64)
        return cls(
            **common,
            weights=np.asarray(payload["weights"], dtype=np.float64).reshape(bias.shape[0], -1),
            bias=bias,
            constant=np.array(
                [np.nan if c is None else float(c) for c in payload["constant"]], dtype=np.float64
            ),
            objective_trace=tuple(float(v) for v in payload["objective_trace"]),
        )


def train_m3miml(
    dataset: MIMLDataset, params: M3MimlParams | None = None, seed: int = 0
) -> M3MimlModel:
    params = params or M3MimlParams()
    check_training_data(dataset)

    instances, offsets, _ = stack_bags(dataset.bags)
    y = sign_targets(dataset)
    n, L = y.shape
    dim = instances.shape[1]

    constant = np.full(L, np.nan)
    flags = []
    for l, name in enumerate(dataset.manifest.label_names):
        if np.all(y[:, l] == y[0, l]):
            constant[l] = y[0, l]
            flags.append(f"single_class:{name}")
            logger.warning("m3miml.single_class_label label=%s", name)
    active = np.isnan(constant)

    W = np.zeros((L, dim))
    b = np.zeros(L)
    radius = math.sqrt(2.0 * params.cost * n)  # ||w_l||^2/2 <= label objective at 0

    current = label_objectives(instances, offsets, y, W, b, params.cost)
    best_obj = current.copy()
    best_W, best_b = W.copy(), b.copy()
    trace = [float(best_obj[active].sum())]

    it = 0
    for it in range(1, params.max_iters + 1):
        scores, argmax = _bag_max(instances, offsets, W, b)
        violated = (y * scores < 1.0) & active[None, :]
        coeff = np.where(violated, y, 0.0)  # (n, L)

        grad_W = W.copy()
        for l in np.flatnonzero(active):
            grad_W[l] -= params.cost * coeff[:, l] @ instances[argmax[:, l]]
        grad_b = -params.cost * coeff.sum(axis=0)

        norms = np.sqrt((grad_W**2).sum(axis=1) + grad_b**2)
        moving = active & (norms > 0)
        if not moving.any():
            break
        scale = np.where(moving, params.step / np.where(norms > 0, norms, 1.0), 0.0)
        W = W - scale[:, None] * grad_W
        b = b - scale * grad_b

        w_norm = np.sqrt((W**2).sum(axis=1))
        shrink = np.where(w_norm > radius, radius / np.where(w_norm > 0, w_norm, 1.0), 1.0)
        W = W * shrink[:, None]

        current = label_objectives(instances, offsets, y, W, b, params.cost)
        better = active & (current < best_obj)
        best_obj[better] = current[better]
        best_W[better] = W[better]
        best_b[better] = b[better]
        if it % TRACE_EVERY == 0:
            trace.append(float(best_obj[active].sum()))
    if it % TRACE_EVERY:
        trace.append(float(best_obj[active].sum()))

    logger.info(
        "train.done algorithm=%s cases=%s objective=%s",
        Algorithm.M3MIML.value,
        n,
        float(best_obj[active].sum()),
    )
    return M3MimlModel(
        **common_fields(dataset, params, seed, flags),
        weights=best_W,
        bias=best_b,
        constant=constant,
        objective_trace=tuple(trace),
    )
