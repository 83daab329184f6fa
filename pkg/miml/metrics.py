"""
Multi-label evaluation over ranked label scores.

Conventions: ties in scores are ranked by label index (lower index first);
ranking loss counts a tie between a proper and an improper label as a
misordering. Cases for which a metric is undefined (empty truth, or full
truth for ranking loss) are left out of that metric's average and counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import LabelSet
from .exceptions import InvalidArgument, UndefinedMetric

# attribute name -> report column heading, in report order
METRIC_COLUMNS = (
    ("hamming_loss", "h.l."),
    ("one_error", "o.e."),
    ("ranking_loss", "r.l."),
    ("coverage", "co."),
    ("average_precision", "a.p."),
)
METRIC_NAMES = tuple(name for name, _ in METRIC_COLUMNS)


@dataclass(frozen=True)
class EvalReport:
    hamming_loss: float
    one_error: float
    ranking_loss: float
    coverage: float
    average_precision: float
    cases_used: dict = field(default_factory=dict)  # metric name -> number of cases averaged

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in METRIC_NAMES)


def rank_labels(scores) -> np.ndarray:
    """Rank 1 is the best-scoring label."""
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1:
        raise InvalidArgument("scores must be a vector")
    if not np.all(np.isfinite(s)):
        raise InvalidArgument("scores must be finite")
    return _rank_matrix(s[None, :])[0]


def _rank_matrix(S: np.ndarray) -> np.ndarray:
    n, L = S.shape
    order = np.argsort(-S, axis=1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.broadcast_to(np.arange(1, L + 1), (n, L)), axis=1)
    return ranks


def _score_matrix(scores) -> np.ndarray:
    S = np.asarray(scores, dtype=np.float64)
    if S.ndim == 1:
        S = S[None, :]
    if S.ndim != 2:
        raise InvalidArgument("scores must be a list of score vectors")
    if not np.all(np.isfinite(S)):
        raise InvalidArgument("scores must be finite")
    return S


def label_matrix(sets: Sequence, n_labels: int) -> np.ndarray:
    """(n, L) boolean matrix from LabelSets, index collections or indicator rows."""
    out = np.zeros((len(sets), n_labels), dtype=bool)
    for i, s in enumerate(sets):
        if isinstance(s, LabelSet):
            members = s.members
        elif isinstance(s, np.ndarray) and s.dtype == bool:
            members = np.flatnonzero(s)
        else:
            members = s
        for m in members:
            if not 0 <= int(m) < n_labels:
                raise InvalidArgument(f"label {m} outside 0..{n_labels - 1}")
            out[i, int(m)] = True
    return out


def _prepare(scores, truth):
    S = _score_matrix(scores)
    if S.shape[0] != len(truth):
        raise InvalidArgument(f"{S.shape[0]} score vectors but {len(truth)} truth sets")
    return S, label_matrix(truth, S.shape[1])


def _mean_over(values: np.ndarray, eligible: np.ndarray, metric: str) -> tuple[float, int]:
    used = int(eligible.sum())
    if used == 0:
        raise UndefinedMetric(f"{metric}: no case is eligible")
    return float(values[eligible].mean()), used


def hamming_loss(decided: Sequence, truth: Sequence, n_labels: int) -> float:
    return _hamming_loss(decided, truth, n_labels)[0]


def _hamming_loss(decided, truth, n_labels):
    if len(decided) != len(truth):
        raise InvalidArgument(f"{len(decided)} decided sets but {len(truth)} truth sets")
    if len(truth) == 0:
        raise InvalidArgument("need at least one case")
    D = label_matrix(decided, n_labels)
    Y = label_matrix(truth, n_labels)
    return float((D != Y).sum(axis=1).mean() / n_labels), len(truth)


def one_error(scores, truth) -> float:
    return _one_error(*_prepare(scores, truth))[0]


def _one_error(S, Y):
    top = np.argsort(-S, axis=1, kind="stable")[:, 0]
    missed = ~Y[np.arange(S.shape[0]), top]
    return _mean_over(missed.astype(np.float64), Y.any(axis=1), "one_error")


def coverage(scores, truth) -> float:
    return _coverage(*_prepare(scores, truth))[0]


def _coverage(S, Y):
    ranks = _rank_matrix(S)
    depth = np.where(Y, ranks, 0).max(axis=1) - 1
    return _mean_over(depth.astype(np.float64), Y.any(axis=1), "coverage")


def ranking_loss(scores, truth) -> float:
    return _ranking_loss(*_prepare(scores, truth))[0]


def _ranking_loss(S, Y):
    L = S.shape[1]
    n_proper = Y.sum(axis=1)
    pairs = Y[:, :, None] & ~Y[:, None, :]  # (case, proper, improper)
    misordered = (pairs & (S[:, :, None] <= S[:, None, :])).sum(axis=(1, 2))
    eligible = (n_proper > 0) & (n_proper < L)
    denom = np.where(eligible, n_proper * (L - n_proper), 1)
    return _mean_over(misordered / denom, eligible, "ranking_loss")


def average_precision(scores, truth) -> float:
    return _average_precision(*_prepare(scores, truth))[0]


def _average_precision(S, Y):
    ranks = _rank_matrix(S)
    # at_or_above[i, y, y']: y' ranked at or above y
    at_or_above = ranks[:, None, :] <= ranks[:, :, None]
    proper_above = (at_or_above & Y[:, None, :]).sum(axis=2)
    precision = np.where(Y, proper_above / ranks, 0.0).sum(axis=1)
    n_proper = Y.sum(axis=1)
    eligible = n_proper > 0
    return _mean_over(precision / np.where(eligible, n_proper, 1), eligible, "average_precision")


def evaluate_all(scores, decided, truth, n_labels: int) -> EvalReport:
    S, Y = _prepare(scores, truth)
    if S.shape[1] != n_labels:
        raise InvalidArgument(f"score vectors have {S.shape[1]} entries, expected {n_labels}")
    results = {
        "hamming_loss": _hamming_loss(decided, truth, n_labels),
        "one_error": _one_error(S, Y),
        "ranking_loss": _ranking_loss(S, Y),
        "coverage": _coverage(S, Y),
        "average_precision": _average_precision(S, Y),
    }
    return EvalReport(
        **{name: value for name, (value, _) in results.items()},
        cases_used={name: used for name, (_, used) in results.items()},
    )
