"""
Domain types for multi-instance multi-label data and the bag distances
shared by every distance-based learner.

A bag is an (n_instances, dim) float array wrapped so it cannot be mutated;
a label set is a frozenset of indices into the dataset's vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .enums import BagDistance, ViolationRule
from .exceptions import InvalidArgument

FORMAT_VERSION = 1


def _frozen_array(values, *, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise InvalidArgument(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{what} has non-finite entries")
    arr.flags.writeable = False
    return arr


def as_vector(values) -> np.ndarray:
    """A FeatureVector: 1-D, finite, float64."""
    if isinstance(values, np.ndarray) and values.ndim == 1 and not values.flags.writeable:
        return values
    vec = _frozen_array(values, ndim=1, what="feature vector")
    if vec.size == 0:
        raise InvalidArgument("feature vector must have dim >= 1")
    return vec


class Bag:
    """
    Non-empty set of same-dimension instances. Immutable.
    """

    __slots__ = ("_instances",)

    def __init__(self, instances):
        arr = _frozen_array(instances, ndim=2, what="bag")
        if arr.shape[0] == 0:
            raise InvalidArgument("bag must contain at least one instance")
        if arr.shape[1] == 0:
            raise InvalidArgument("instances must have dim >= 1")
        self._instances = arr

    @property
    def instances(self) -> np.ndarray:
        return self._instances

    @property
    def dim(self) -> int:
        return self._instances.shape[1]

    def __len__(self) -> int:
        return self._instances.shape[0]

    def __iter__(self):
        return iter(self._instances)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bag):
            return NotImplemented
        return np.array_equal(self._instances, other._instances)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Bag(n={len(self)}, dim={self.dim})"


def _instances_of(bag) -> np.ndarray:
    if isinstance(bag, Bag):
        return bag.instances
    arr = np.asarray(bag, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise InvalidArgument("bag must contain at least one instance")
    return arr


@dataclass(frozen=True)
class LabelSet:
    members: frozenset[int]
    n_labels: int

    @classmethod
    def of(cls, members: Iterable[int], n_labels: int) -> "LabelSet":
        return cls(frozenset(int(m) for m in members), int(n_labels))

    @classmethod
    def from_indicator(cls, row) -> "LabelSet":
        row = np.asarray(row)
        return cls(frozenset(int(i) for i in np.flatnonzero(row > 0)), row.shape[0])

    def indicator(self) -> np.ndarray:
        out = np.zeros(self.n_labels, dtype=bool)
        for m in self.members:
            if 0 <= m < self.n_labels:
                out[m] = True
        return out

    def __contains__(self, label: int) -> bool:
        return label in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class DatasetManifest:
    dim: int
    label_names: tuple[str, ...]
    format_version: int = FORMAT_VERSION
    provenance: str = ""

    @property
    def n_labels(self) -> int:
        return len(self.label_names)


@dataclass(frozen=True)
class Case:
    case_id: str
    expert_id: str
    bag: Bag
    labels: LabelSet


@dataclass(frozen=True)
class MIMLDataset:
    manifest: DatasetManifest
    cases: tuple[Case, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(self.cases))

    @property
    def n_labels(self) -> int:
        return self.manifest.n_labels

    @property
    def bags(self) -> list[Bag]:
        return [c.bag for c in self.cases]

    @property
    def label_sets(self) -> list[LabelSet]:
        return [c.labels for c in self.cases]

    def label_matrix(self) -> np.ndarray:
        """(n_cases, L) boolean indicator matrix."""
        out = np.zeros((len(self.cases), self.n_labels), dtype=bool)
        for i, case in enumerate(self.cases):
            out[i] = case.labels.indicator()
        return out

    def subset(self, indices: Iterable[int]) -> "MIMLDataset":
        return MIMLDataset(self.manifest, tuple(self.cases[i] for i in indices))

    def __len__(self) -> int:
        return len(self.cases)


# --- distances ---------------------------------------------------------------


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise InvalidArgument(f"dimension mismatch: {a.shape[-1]} != {b.shape[-1]}")


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).reshape(1, -1)
    b = np.asarray(b, dtype=np.float64).reshape(1, -1)
    _check_dims(a, b)
    # same cdist kernel as the bag distances, so singleton bags agree bit for bit
    return float(cdist(a, b)[0, 0])


def min_point_set_distance(x, bag) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    inst = _instances_of(bag)
    _check_dims(x, inst)
    return float(cdist(x, inst).min())


def _stack(bags: Sequence) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if len(bags) == 0:
        raise InvalidArgument("need at least one bag")
    parts = [_instances_of(b) for b in bags]
    sizes = np.array([p.shape[0] for p in parts], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    return np.vstack(parts), offsets, sizes


def bag_distance_matrix(
    bags_a: Sequence, bags_b: Sequence | None = None, kind: str = BagDistance.AVERAGE
) -> np.ndarray:
    """
    All pairwise Hausdorff distances between two bag lists, from one cdist call
    over the stacked instances. Result has shape (len(bags_a), len(bags_b)).
    """
    inst_a, off_a, size_a = _stack(bags_a)
    if bags_b is None:
        inst_b, off_b, size_b = inst_a, off_a, size_a
    else:
        inst_b, off_b, size_b = _stack(bags_b)
    _check_dims(inst_a, inst_b)

    d = cdist(inst_a, inst_b)
    # nearest instance of every b-bag, for each a-instance; and vice versa
    a_to_bag_b = np.minimum.reduceat(d, off_b, axis=1)
    b_to_bag_a = np.minimum.reduceat(d, off_a, axis=0)

    if BagDistance(kind) == BagDistance.MAXIMUM:
        return np.maximum(
            np.maximum.reduceat(a_to_bag_b, off_a, axis=0),
            np.maximum.reduceat(b_to_bag_a, off_b, axis=1),
        )

    sum_ab = np.add.reduceat(a_to_bag_b, off_a, axis=0)
    sum_ba = np.add.reduceat(b_to_bag_a, off_b, axis=1)
    return (sum_ab + sum_ba) / (size_a[:, None] + size_b[None, :])


def avg_hausdorff(a, b) -> float:
    return float(bag_distance_matrix([a], [b], BagDistance.AVERAGE)[0, 0])


def max_hausdorff(a, b) -> float:
    return float(bag_distance_matrix([a], [b], BagDistance.MAXIMUM)[0, 0])


def bag_distance(a, b, kind: str = BagDistance.AVERAGE) -> float:
    return float(bag_distance_matrix([a], [b], kind)[0, 0])


# --- validation --------------------------------------------------------------


class Violation(NamedTuple):
    case_id: str
    rule: str
    detail: str

    def __str__(self) -> str:
        where = self.case_id or "<manifest>"
        return f"{where}: {self.rule}: {self.detail}"


def validate_dataset(dataset: MIMLDataset) -> list[Violation]:
    """Every broken invariant as data; an empty list means the dataset is well-formed."""
    report: list[Violation] = []
    manifest = dataset.manifest

    if manifest.dim < 1:
        report.append(Violation("", ViolationRule.MANIFEST, f"dim must be >= 1, got {manifest.dim}"))
    if not manifest.label_names:
        report.append(Violation("", ViolationRule.MANIFEST, "label_names is empty"))
    elif len(set(manifest.label_names)) != len(manifest.label_names):
        report.append(Violation("", ViolationRule.MANIFEST, "label_names are not unique"))

    n_labels = manifest.n_labels
    seen: set[str] = set()
    for case in dataset.cases:
        if case.case_id in seen:
            report.append(Violation(case.case_id, ViolationRule.DUPLICATE_ID, "case_id repeated"))
        seen.add(case.case_id)

        if case.bag.dim != manifest.dim:
            report.append(
                Violation(
                    case.case_id,
                    ViolationRule.DIMENSION,
                    f"bag dim {case.bag.dim} != manifest dim {manifest.dim}",
                )
            )

        bad = sorted(m for m in case.labels.members if not 0 <= m < n_labels)
        if bad or case.labels.n_labels != n_labels:
            report.append(
                Violation(
                    case.case_id,
                    ViolationRule.VOCABULARY,
                    f"labels {bad or sorted(case.labels.members)} outside 0..{n_labels - 1}",
                )
            )
    return report
