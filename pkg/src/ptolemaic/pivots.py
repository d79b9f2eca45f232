"""Pivot selection: sparse spatial selection and uniform random choice.

Sparse spatial selection (SSS) scans the dataset in a seeded random order
and keeps an object as a pivot when it is at least ``alpha * M`` away from
every pivot kept so far, where M estimates the maximum distance in the
dataset.  The pivot count adapts to the data; it is not chosen up front.

M matters: underestimating it lowers the acceptance threshold and floods
the pivot set.  Two estimators are provided, a seeded random-pair maximum
and a furthest-point sweep that repeatedly hops to the point furthest from
the current one.  The sweep is a few scans and is the steadier of the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PivotSet:
    """Distinct dataset indices chosen as pivots, with selection metadata."""

    ids: tuple
    strategy: str
    params: dict

    def __post_init__(self):
        if len(self.ids) == 0:
            raise ValueError("pivot set must be nonempty")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("pivot ids must be distinct")

    def __len__(self):
        return len(self.ids)


def sss_select(data, d, alpha, max_distance_estimate, seed) -> PivotSet:
    """Greedy sparse spatial selection.

    The first object in the shuffled order is always a pivot; later objects
    join when their distance to every current pivot reaches
    ``alpha * max_distance_estimate``.  All selected pivots are therefore
    pairwise at least that far apart.
    """
    n = len(data)
    if n == 0:
        raise ValueError("cannot select pivots from an empty dataset")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not max_distance_estimate > 0.0:
        raise ValueError("max distance estimate must be positive")

    order = np.random.default_rng(seed).permutation(n)
    threshold = alpha * max_distance_estimate
    scan = data.objects(order)
    chosen = [int(order[0])]
    # min distance from each object (in scan order) to the pivots so far
    min_dist = np.asarray(d.one_to_many(data.get(chosen[0]), scan), dtype=np.float64)
    for pos in range(1, n):
        if min_dist[pos] >= threshold:
            pid = int(order[pos])
            chosen.append(pid)
            np.minimum(min_dist, d.one_to_many(data.get(pid), scan), out=min_dist)
    return PivotSet(
        ids=tuple(chosen),
        strategy="sss",
        params={"alpha": alpha, "max_distance": max_distance_estimate, "seed": seed},
    )


def estimate_max_distance(data, d, sample_size, seed):
    """Maximum distance over ``sample_size`` seeded random index pairs."""
    n = len(data)
    if n < 2:
        raise ValueError("need at least two objects to estimate a max distance")
    if sample_size < 1:
        raise ValueError("sample size must be positive")
    rng = np.random.default_rng(seed)
    ii = rng.integers(0, n, sample_size)
    jj = rng.integers(0, n, sample_size)
    best = float(np.max(d.pairwise(data.objects(ii), data.objects(jj))))
    if best <= 0.0:
        raise ValueError("all sampled distances are zero; dataset is degenerate")
    return best


def estimate_max_distance_sweep(data, d, sweeps=4, seed=0):
    """Diameter estimate by iterated furthest-point hops.

    Starts at a seeded random object, scans for the furthest object, hops
    there and repeats up to ``sweeps`` times, stopping early when the
    furthest distance no longer improves.  Tends to land much closer to the
    true diameter than random pairs do, at the cost of a few full scans.
    """
    n = len(data)
    if n < 2:
        raise ValueError("need at least two objects to estimate a max distance")
    if sweeps < 1:
        raise ValueError("sweeps must be positive")
    rng = np.random.default_rng(seed)
    x = int(rng.integers(n))
    everything = data.objects(range(n))
    best = 0.0
    for _ in range(sweeps):
        dist = np.asarray(d.one_to_many(data.get(x), everything), dtype=np.float64)
        j = int(dist.argmax())
        if dist[j] <= best:
            break
        best = float(dist[j])
        x = j
    if best <= 0.0:
        raise ValueError("all distances are zero; dataset is degenerate")
    return best


def random_select(data, m, seed) -> PivotSet:
    """m distinct indices, uniform without replacement, order as drawn."""
    n = len(data)
    if not 1 <= m <= n:
        raise ValueError(f"pivot count must be in [1, {n}], got {m}")
    ids = np.random.default_rng(seed).choice(n, m, replace=False)
    return PivotSet(
        ids=tuple(int(i) for i in ids),
        strategy="random",
        params={"m": m, "seed": seed},
    )
