from __future__ import annotations

import dataclasses
import logging
import math
import typing
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Mapping, NamedTuple, Sequence

import numpy as np

from ..core import Bag, LabelSet, MIMLDataset, validate_dataset
from ..enums import Algorithm, BagDistance
from ..exceptions import DatasetValidationError, InvalidArgument

logger = logging.getLogger(__name__)


class Prediction(NamedTuple):
    scores: np.ndarray  # length L
    decided: LabelSet


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def decide(scores) -> LabelSet:
    """
    {l : score_l > 0}; when that is empty, the single top-scoring label
    (lowest index on ties).
    """
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.flatnonzero(scores > 0)
    if positive.size:
        return LabelSet.of(positive.tolist(), scores.shape[0])
    return LabelSet.of([int(np.argmax(scores))], scores.shape[0])


def check_distance(value: str) -> None:
    try:
        BagDistance(value)
    except ValueError:
        raise InvalidArgument(f"distance must be one of {list(BagDistance.values)}, got {value!r}")


def check_training_data(dataset: MIMLDataset, min_cases: int = 1) -> None:
    violations = validate_dataset(dataset)
    if violations:
        raise DatasetValidationError(
            f"training data has {len(violations)} violation(s): {violations[0]}", violations
        )
    if len(dataset) < min_cases:
        raise InvalidArgument(f"need at least {min_cases} training case(s), got {len(dataset)}")


def sign_targets(dataset: MIMLDataset) -> np.ndarray:
    """(n, L) matrix of +1 / -1 label memberships."""
    return np.where(dataset.label_matrix(), 1.0, -1.0)


def stack_bags(bags: Sequence) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Concatenated instances, start offset of each bag, bag sizes."""
    parts = [b.instances if isinstance(b, Bag) else np.asarray(b, dtype=np.float64) for b in bags]
    sizes = np.array([p.shape[0] for p in parts], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.int64)
    return np.vstack(parts), offsets, sizes


def params_from_overrides(params_cls, overrides: Mapping[str, Any] | None = None):
    """Build a params dataclass from `key=value` strings (CLI `--param`)."""
    hints = typing.get_type_hints(params_cls)
    kwargs = {}
    for key, raw in (overrides or {}).items():
        if key not in hints:
            raise InvalidArgument(
                f"unknown parameter {key!r}; expected one of {sorted(hints)}"
            )
        typ = hints[key]
        try:
            kwargs[key] = typ(raw) if typ in (int, float) else str(raw)
        except (TypeError, ValueError):
            raise InvalidArgument(f"parameter {key!r}: cannot parse {raw!r} as {typ.__name__}")
    return params_cls(**kwargs)


@dataclass(frozen=True, eq=False)
class TrainedModel(ABC):
    """
    Algorithm-tagged predictor. Immutable after training; concrete models add
    the arrays they need and implement `_score_bags` plus the payload codec.
    """

    algorithm: ClassVar[Algorithm]

    params: Any
    label_names: tuple[str, ...]
    dim: int
    seed: int
    flags: tuple[str, ...]

    @property
    def n_labels(self) -> int:
        return len(self.label_names)

    def score_bags(self, bags: Sequence) -> np.ndarray:
        """(n_bags, L) real-valued scores."""
        arrays = []
        for bag in bags:
            inst = bag.instances if isinstance(bag, Bag) else Bag(bag).instances
            if inst.shape[1] != self.dim:
                raise InvalidArgument(f"bag dim {inst.shape[1]} != model dim {self.dim}")
            arrays.append(inst)
        if not arrays:
            return np.zeros((0, self.n_labels))
        return self._score_bags(arrays)

    @abstractmethod
    def _score_bags(self, bags: list[np.ndarray]) -> np.ndarray: ...

    @abstractmethod
    def payload(self) -> dict: ...

    @classmethod
    @abstractmethod
    def from_payload(cls, common: dict, payload: dict) -> "TrainedModel": ...

    def header(self) -> dict:
        return {
            "algorithm": self.algorithm.value,
            "params": dataclasses.asdict(self.params),
            "seed": self.seed,
            "label_names": list(self.label_names),
        }


def predict(model: TrainedModel, bag) -> Prediction:
    scores = model.score_bags([bag])[0]
    return Prediction(scores=scores, decided=decide(scores))


def predict_many(model: TrainedModel, bags: Sequence) -> list[Prediction]:
    scores = model.score_bags(bags)
    return [Prediction(scores=row, decided=decide(row)) for row in scores]


def common_fields(dataset: MIMLDataset, params, seed: int, flags=()) -> dict:
    return {
        "params": params,
        "label_names": tuple(dataset.manifest.label_names),
        "dim": dataset.manifest.dim,
        "seed": int(seed),
        "flags": tuple(flags),
    }
