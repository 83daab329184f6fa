import logging
from dataclasses import dataclass

import numpy as np

from ..core import Bag, Case, DatasetManifest, LabelSet, MIMLDataset
from ..exceptions import InvalidArgument

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthConfig:
    n_bags: int = 200
    n_labels: int = 5
    dim: int = 8
    instances_per_label: int = 2
    background_instances: int = 1
    sigma: float = 0.5
    separation: float = 5.0
    # P(|label set| = k) for k = 1..n_labels; None gives weights 1, 1/2, 1/4, ...
    cardinality: tuple[float, ...] | None = None

    def __post_init__(self):
        if min(self.n_bags, self.n_labels, self.dim, self.instances_per_label) < 1:
            raise InvalidArgument("n_bags, n_labels, dim and instances_per_label must be >= 1")
        if self.background_instances < 0:
            raise InvalidArgument("background_instances must be >= 0")
        if not (self.sigma > 0 and self.separation > 0):
            raise InvalidArgument("sigma and separation must be > 0")
        probs = self.cardinality_probs()
        if probs.shape != (self.n_labels,) or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise InvalidArgument("cardinality must be n_labels probabilities summing to 1")

    def cardinality_probs(self) -> np.ndarray:
        if self.cardinality is None:
            weights = 0.5 ** np.arange(self.n_labels)
            return weights / weights.sum()
        return np.asarray(self.cardinality, dtype=np.float64)

    def label_marginals(self) -> np.ndarray:
        """Expected frequency of each label; labels within a set are drawn uniformly."""
        probs = self.cardinality_probs()
        k = np.arange(1, self.n_labels + 1)
        return np.full(self.n_labels, float(probs @ k) / self.n_labels)


def class_centers(n_labels: int, dim: int, separation: float) -> np.ndarray:
    """
    +s e_0 .. +s e_{d-1}, then -s e_0 .. -s e_{d-1}, then the same at 2s, 3s, ...
    Any two centers, and any center and the origin, are at least s apart.
    """
    centers = np.zeros((n_labels, dim))
    for l in range(n_labels):
        ring, pos = divmod(l, 2 * dim)
        sign = 1.0 if pos < dim else -1.0
        centers[l, pos % dim] = sign * separation * (ring + 1)
    return centers


def generate_synthetic(cfg: SynthConfig, seed: int = 0) -> MIMLDataset:
    rng = np.random.default_rng(seed)
    centers = class_centers(cfg.n_labels, cfg.dim, cfg.separation)
    probs = cfg.cardinality_probs()

    cases = []
    for i in range(cfg.n_bags):
        k = int(rng.choice(cfg.n_labels, p=probs)) + 1
        labels = np.sort(rng.choice(cfg.n_labels, size=k, replace=False))
        parts = [
            centers[l] + cfg.sigma * rng.standard_normal((cfg.instances_per_label, cfg.dim))
            for l in labels
        ]
        if cfg.background_instances:
            parts.append(cfg.sigma * rng.standard_normal((cfg.background_instances, cfg.dim)))
        cases.append(
            Case(
                case_id=f"synth-{i:05d}",
                expert_id="synthetic",
                bag=Bag(np.vstack(parts)),
                labels=LabelSet.of(labels.tolist(), cfg.n_labels),
            )
        )

    manifest = DatasetManifest(
        dim=cfg.dim,
        label_names=tuple(f"label{l}" for l in range(cfg.n_labels)),
        provenance=f"synthetic seed={seed} bags={cfg.n_bags} sigma={cfg.sigma} sep={cfg.separation}",
    )
    logger.info("synthetic.generated bags=%s labels=%s dim=%s seed=%s", cfg.n_bags, cfg.n_labels, cfg.dim, seed)
    return MIMLDataset(manifest, tuple(cases))
