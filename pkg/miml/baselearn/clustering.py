import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from ..exceptions import InvalidArgument

logger = logging.getLogger(__name__)

# improvement below this is treated as a tie, so swaps cannot cycle on rounding noise
_EPS = 1e-12


@dataclass(frozen=True)
class MedoidResult:
    medoids: tuple[int, ...]  # indices into the clustered items
    assignment: np.ndarray  # position in `medoids` of each item's nearest medoid
    cost: float
    cost_trace: tuple[float, ...]


@dataclass(frozen=True)
class CentroidResult:
    centroids: np.ndarray  # (k, dim)
    assignment: np.ndarray
    inertia: float
    inertia_trace: tuple[float, ...]


def k_medoids(
    items: Sequence,
    k: int,
    dist: Callable[[Sequence, Sequence], np.ndarray],
    seed: int = 0,
    max_swaps: int = 10_000,
) -> MedoidResult:
    """
    PAM-style k-medoids. `dist(a, b)` returns the |a| x |b| distance matrix.

    BUILD adds, one at a time, the candidate that lowers total cost most
    (candidates scanned in a seeded shuffle, first best wins); SWAP then applies
    first-improvement medoid/non-medoid exchanges until none lowers the cost.
    """
    n = len(items)
    if not 1 <= k <= n:
        raise InvalidArgument(f"k must be in 1..{n}, got {k}")

    D = np.asarray(dist(items, items), dtype=np.float64)
    if D.shape != (n, n):
        raise InvalidArgument(f"dist returned shape {D.shape}, expected {(n, n)}")

    order = np.random.default_rng(seed).permutation(n)

    # BUILD
    medoids: list[int] = []
    nearest = np.full(n, np.inf)
    for _ in range(k):
        candidates = np.array([c for c in order if c not in medoids])
        costs = np.minimum(D[:, candidates], nearest[:, None]).sum(axis=0)
        best = int(candidates[int(np.argmin(costs))])
        medoids.append(best)
        nearest = np.minimum(nearest, D[:, best])

    cost = float(nearest.sum())
    trace = [cost]

    # SWAP
    swaps = 0
    improved = True
    while improved and swaps < max_swaps:
        improved = False
        dm = D[:, medoids]
        for pos in range(k):
            without = np.delete(dm, pos, axis=1).min(axis=1) if k > 1 else np.full(n, np.inf)
            candidates = np.array([c for c in order if c not in medoids])
            if candidates.size == 0:
                break
            costs = np.minimum(D[:, candidates], without[:, None]).sum(axis=0)
            better = np.flatnonzero(costs < cost - _EPS)
            if better.size:
                first = int(better[0])  # first improvement in shuffled order
                medoids[pos] = int(candidates[first])
                cost = float(costs[first])
                trace.append(cost)
                swaps += 1
                improved = True
                break
    if swaps >= max_swaps:
        logger.warning("kmedoids.max_swaps n=%s k=%s", n, k)

    dm = D[:, medoids]
    return MedoidResult(
        medoids=tuple(medoids),
        assignment=np.argmin(dm, axis=1),
        cost=float(dm.min(axis=1).sum()),
        cost_trace=tuple(trace),
    )


def k_means(vectors, k: int, seed: int = 0, max_iter: int = 300) -> CentroidResult:
    """
    Lloyd iterations from a seeded k-means++ start. An emptied cluster is
    re-seeded with the point farthest from its centroid among clusters that
    keep another member.
    """
    X = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    n = X.shape[0]
    if not 1 <= k <= n:
        raise InvalidArgument(f"k must be in 1..{n}, got {k}")

    rng = np.random.default_rng(seed)
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[rng.integers(n)]
    closest = cdist(X, centroids[:1], "sqeuclidean").ravel()
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            pick = rng.choice(n, p=closest / total)
        else:
            pick = rng.integers(n)
        centroids[c] = X[pick]
        closest = np.minimum(closest, cdist(X, centroids[c : c + 1], "sqeuclidean").ravel())

    assignment = np.full(n, -1)
    trace: list[float] = []
    for _ in range(max_iter):
        sq = cdist(X, centroids, "sqeuclidean")
        new_assignment = np.argmin(sq, axis=1)
        point_cost = sq[np.arange(n), new_assignment]
        trace.append(float(point_cost.sum()))

        counts = np.bincount(new_assignment, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            # only donors with another member left; one always exists while a cluster is empty
            movable = counts[new_assignment] > 1
            far = int(np.argmax(np.where(movable, point_cost, -1.0)))
            counts[new_assignment[far]] -= 1
            new_assignment[far] = empty
            counts[empty] = 1
            point_cost[far] = 0.0

        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
        for c in range(k):
            members = assignment == c
            if members.any():
                centroids[c] = X[members].mean(axis=0)

    inertia = float(((X - centroids[assignment]) ** 2).sum())
    return CentroidResult(
        centroids=centroids,
        assignment=assignment,
        inertia=inertia,
        inertia_trace=tuple(trace),
    )
