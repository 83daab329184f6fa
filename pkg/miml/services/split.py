import logging
from typing import NamedTuple

import numpy as np

from ..core import MIMLDataset
from ..exceptions import InvalidArgument

logger = logging.getLogger(__name__)


class SplitResult(NamedTuple):
    train: MIMLDataset
    test: MIMLDataset
    dropped: int  # cases with an empty label set


def stratified_split(dataset: MIMLDataset, train_fraction: float, seed: int = 0) -> SplitResult:
    """
    Greedy iterative stratification: labels are served rarest first, and each
    case of the current label goes to the side still owing more of that label
    (ties: the side owing more cases overall, then train). Cases are visited
    in a seeded shuffle.
    """
    if not 0.0 < train_fraction < 1.0:
        raise InvalidArgument(f"train fraction must be in (0, 1), got {train_fraction}")
    if len(dataset) < 2:
        raise InvalidArgument("need at least 2 cases to split")

    Y = dataset.label_matrix()
    kept = np.flatnonzero(Y.any(axis=1))
    dropped = len(dataset) - kept.size
    if dropped:
        logger.warning("split.dropped_unlabelled count=%s", dropped)

    order = kept[np.random.default_rng(seed).permutation(kept.size)]
    fractions = np.array([train_fraction, 1.0 - train_fraction])
    owed_labels = np.outer(fractions, Y[kept].sum(axis=0)).astype(np.float64)  # (side, label)
    owed_cases = fractions * kept.size
    side_of = {}

    remaining = Y[order].sum(axis=0).astype(np.int64)
    while len(side_of) < order.size:
        candidates = np.flatnonzero(remaining > 0)
        label = int(candidates[np.argmin(remaining[candidates])])
        for i in order:
            if i in side_of or not Y[i, label]:
                continue
            column = owed_labels[:, label]
            if column[0] != column[1]:
                side = int(np.argmax(column))
            elif owed_cases[0] != owed_cases[1]:
                side = int(np.argmax(owed_cases))
            else:
                side = 0
            side_of[i] = side
            owed_labels[side] -= Y[i]
            owed_cases[side] -= 1
            remaining -= Y[i]

    train_idx = sorted(i for i, s in side_of.items() if s == 0)
    test_idx = sorted(i for i, s in side_of.items() if s == 1)
    logger.info(
        "split.done train=%s test=%s dropped=%s seed=%s", len(train_idx), len(test_idx), dropped, seed
    )
    return SplitResult(dataset.subset(train_idx), dataset.subset(test_idx), dropped)
