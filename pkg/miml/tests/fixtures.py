"""
Shared test data.

D_easy: 12 two-dimensional bags over 2 labels. Label 0 is signalled by an
instance near (0, 10), label 1 by one near (10, 0); every bag also holds a
background instance near the origin. Four bags carry only label 0, four only
label 1 and four both.
"""

import numpy as np

from ..core import Bag, Case, DatasetManifest, LabelSet, MIMLDataset

EASY_LABELS = ("upper", "right")
_JITTER_SINGLE = (-0.015, -0.005, 0.005, 0.015)
_JITTER_BOTH = (-0.09, -0.03, 0.03, 0.09)


def easy_dataset() -> MIMLDataset:
    cases = []
    for k, d in enumerate(_JITTER_SINGLE):
        cases.append(_case(f"upper-{k}", [(d, 10 + d), (d, d)], [0]))
    for k, d in enumerate(_JITTER_SINGLE):
        cases.append(_case(f"right-{k}", [(10 + d, d), (d, d)], [1]))
    for k, e in enumerate(_JITTER_BOTH):
        cases.append(_case(f"both-{k}", [(e, 10 + e), (10 + e, e), (e, e)], [0, 1]))
    return MIMLDataset(DatasetManifest(dim=2, label_names=EASY_LABELS, provenance="D_easy"), tuple(cases))


def _case(case_id, instances, labels, n_labels=2) -> Case:
    return Case(
        case_id=case_id,
        expert_id="fixture",
        bag=Bag(instances),
        labels=LabelSet.of(labels, n_labels),
    )


def make_dataset(bags, label_sets, label_names=None, dim=None) -> MIMLDataset:
    """Dataset from raw instance arrays and label index lists."""
    bags = [np.asarray(b, dtype=np.float64) for b in bags]
    n_labels = len(label_names) if label_names else 1 + max((max(s) for s in label_sets if s), default=0)
    names = tuple(label_names or (f"l{i}" for i in range(n_labels)))
    cases = tuple(
        Case(
            case_id=f"case-{i:04d}",
            expert_id="fixture",
            bag=Bag(b),
            labels=LabelSet.of(s, len(names)),
        )
        for i, (b, s) in enumerate(zip(bags, label_sets))
    )
    return MIMLDataset(DatasetManifest(dim=dim or bags[0].shape[1], label_names=names), cases)


def random_bag(rng, dim=3, max_size=5) -> np.ndarray:
    return rng.normal(size=(int(rng.integers(1, max_size + 1)), dim))
