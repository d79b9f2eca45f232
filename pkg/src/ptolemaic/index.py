"""Pivot-table index with triangular and Ptolemaic candidate filtering.

The index is a plain precomputed distance table: one row per object, one
column per pivot, plus the pivot-pivot matrix (read back out of the object
rows, so building costs exactly n*m evaluations).  A range query computes
the m query-pivot distances, discards every object whose lower bound
exceeds the radius, and evaluates the true distance only for the survivors.

Query cost is measured in distance evaluations: m for the pivots plus one
per candidate.  Pivot objects are never candidates; their exact distances
are already in hand.

Four filtering modes:

* ``TRIANGULAR``: best |qp - op| over the m pivots.
* ``PTOLEMAIC_FULL``: best |qp*os - qs*op|/ps over all m(m-1)/2 pivot pairs.
* ``PTOLEMAIC_PARTIAL``: same bound over just the m-1 consecutive pairs.
* ``COMBINED``: max of the triangular and full Ptolemaic bounds.

The Ptolemaic modes are sound only for distances satisfying Ptolemy's
inequality; the triangular mode is sound for any metric.

The inner scans are numba-compiled and stop examining an object as soon as
one pair pushes its bound past the radius.  Early exit cannot change the
candidate set: the scan only decides the predicate max-bound > r.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import bounds


class FilterMode(enum.Enum):
    TRIANGULAR = "triangular"
    PTOLEMAIC_FULL = "ptolemaic-full"
    PTOLEMAIC_PARTIAL = "ptolemaic-partial"
    COMBINED = "combined"

    @classmethod
    def parse(cls, text):
        aliases = {
            "tri": cls.TRIANGULAR,
            "full": cls.PTOLEMAIC_FULL,
            "pto": cls.PTOLEMAIC_FULL,
            "partial": cls.PTOLEMAIC_PARTIAL,
            "comb": cls.COMBINED,
        }
        t = text.strip().lower()
        if t in aliases:
            return aliases[t]
        for mode in cls:
            if t == mode.value:
                return mode
        raise ValueError(f"unknown filter mode: {text!r}")


@dataclass
class QueryStats:
    """Cost accounting for one range query."""

    pivot_distances: int
    candidates: int
    false_negatives: int | None = None

    @property
    def total(self):
        """Distance evaluations spent: pivots plus candidates."""
        return self.pivot_distances + self.candidates


# ---------------------------------------------------------------------------
# compiled scan kernels


@njit(cache=True)
def _scan_tri(obj_pivot, qpiv, r, keep):
    n, m = obj_pivot.shape
    for i in range(n):
        ok = True
        for j in range(m):
            b = abs(qpiv[j] - obj_pivot[i, j])
            if b > r:
                ok = False
                break
        keep[i] = ok


@njit(cache=True)
def _scan_pto(obj_pivot, piv_piv, qpiv, pairs_j, pairs_l, r, keep):
    n = obj_pivot.shape[0]
    for i in range(n):
        ok = True
        for t in range(pairs_j.shape[0]):
            j = pairs_j[t]
            l = pairs_l[t]
            ps = piv_piv[j, l]
            if ps <= 0.0:
                continue
            b = abs(qpiv[j] * obj_pivot[i, l] - qpiv[l] * obj_pivot[i, j]) / ps
            if b > r:
                ok = False
                break
        keep[i] = ok


@njit(cache=True)
def _scan_combined(obj_pivot, piv_piv, qpiv, pairs_j, pairs_l, r, keep):
    n, m = obj_pivot.shape
    for i in range(n):
        ok = True
        for j in range(m):
            b = abs(qpiv[j] - obj_pivot[i, j])
            if b > r:
                ok = False
                break
        if ok:
            for t in range(pairs_j.shape[0]):
                j = pairs_j[t]
                l = pairs_l[t]
                ps = piv_piv[j, l]
                if ps <= 0.0:
                    continue
                b = abs(qpiv[j] * obj_pivot[i, l] - qpiv[l] * obj_pivot[i, j]) / ps
                if b > r:
                    ok = False
                    break
        keep[i] = ok


@njit(cache=True)
def _tri_bounds(obj_pivot, qpiv, out):
    n, m = obj_pivot.shape
    for i in range(n):
        best = 0.0
        for j in range(m):
            b = abs(qpiv[j] - obj_pivot[i, j])
            if b > best:
                best = b
        out[i] = best


@njit(cache=True)
def _pto_bounds(obj_pivot, piv_piv, qpiv, pairs_j, pairs_l, out):
    n = obj_pivot.shape[0]
    for i in range(n):
        best = 0.0
        for t in range(pairs_j.shape[0]):
            j = pairs_j[t]
            l = pairs_l[t]
            ps = piv_piv[j, l]
            if ps <= 0.0:
                continue
            b = abs(qpiv[j] * obj_pivot[i, l] - qpiv[l] * obj_pivot[i, j]) / ps
            if b > best:
                best = b
        out[i] = best


def _pair_arrays(pairs):
    if len(pairs) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    arr = np.asarray(pairs, dtype=np.int64)
    return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])


# ---------------------------------------------------------------------------


@dataclass
class PivotTable:
    """Precomputed object-pivot and pivot-pivot distances.

    Immutable after :func:`build`; queries are read-only and independent.
    """

    data: object
    d: object
    pivots: object
    obj_pivot: np.ndarray
    piv_piv: np.ndarray
    build_cost: int
    _pair_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self):
        return self.obj_pivot.shape[0]

    @property
    def m(self):
        return self.obj_pivot.shape[1]

    def pairs_for(self, mode: FilterMode, pairs=None):
        """Pivot-pair schedule for a mode, as two int64 index arrays."""
        if pairs is not None:
            return _pair_arrays(pairs)
        key = "consecutive" if mode is FilterMode.PTOLEMAIC_PARTIAL else "all"
        if key not in self._pair_cache:
            make = bounds.consecutive_pairs if key == "consecutive" else bounds.all_pairs
            self._pair_cache[key] = _pair_arrays(make(self.m))
        return self._pair_cache[key]


def build(data, d, pivots) -> PivotTable:
    """Fill the distance table for ``data`` under ``d`` with the given pivots.

    Costs n evaluations per pivot; the pivot-pivot matrix is read back from
    the object rows for free.  The actual evaluation count is recorded.
    """
    ids = list(pivots.ids)
    n = len(data)
    before = d.calls
    obj_pivot = np.empty((n, len(ids)), dtype=np.float64)
    everything = data.objects(range(n))
    for j, pid in enumerate(ids):
        obj_pivot[:, j] = d.one_to_many(data.get(pid), everything)
    piv_piv = obj_pivot[ids, :].copy()
    return PivotTable(
        data=data,
        d=d,
        pivots=pivots,
        obj_pivot=obj_pivot,
        piv_piv=piv_piv,
        build_cost=d.calls - before,
    )


def lower_bound(table: PivotTable, qpiv, obj_idx, mode: FilterMode, pairs=None):
    """Lower bound on d(q, object) from precomputed distances, no early exit.

    The compiled query scans compute exactly this value pair by pair, so the
    two agree bit for bit.
    """
    row = table.obj_pivot[obj_idx]
    if mode is FilterMode.TRIANGULAR:
        return bounds.tri_lower_best(qpiv, row)
    if pairs is None:
        pairs = (
            bounds.consecutive_pairs(table.m)
            if mode is FilterMode.PTOLEMAIC_PARTIAL
            else bounds.all_pairs(table.m)
        )
    pto = bounds.pto_lower_best(qpiv, row, table.piv_piv, pairs)
    if mode is FilterMode.COMBINED:
        return max(bounds.tri_lower_best(qpiv, row), pto)
    return pto


def query_pivot_distances(table: PivotTable, q):
    """The m query-pivot distances (counted against the table's distance)."""
    return table.d.one_to_many(q, table.data.objects(table.pivots.ids))


def candidate_mask(table: PivotTable, qpiv, r, mode: FilterMode, pairs=None):
    """Boolean mask over all n objects: lower bound ≤ r (pivots not masked out)."""
    keep = np.empty(table.n, dtype=np.bool_)
    qpiv = np.ascontiguousarray(qpiv, dtype=np.float64)
    if mode is FilterMode.TRIANGULAR:
        _scan_tri(table.obj_pivot, qpiv, r, keep)
        return keep
    pj, pl = table.pairs_for(mode, pairs)
    if mode is FilterMode.COMBINED:
        _scan_combined(table.obj_pivot, table.piv_piv, qpiv, pj, pl, r, keep)
    else:
        _scan_pto(table.obj_pivot, table.piv_piv, qpiv, pj, pl, r, keep)
    return keep


def bound_vector(table: PivotTable, qpiv, mode: FilterMode, pairs=None):
    """Lower bounds for all n objects at once (no early exit)."""
    qpiv = np.ascontiguousarray(qpiv, dtype=np.float64)
    out = np.empty(table.n, dtype=np.float64)
    if mode is FilterMode.TRIANGULAR:
        _tri_bounds(table.obj_pivot, qpiv, out)
        return out
    pj, pl = table.pairs_for(mode, pairs)
    _pto_bounds(table.obj_pivot, table.piv_piv, qpiv, pj, pl, out)
    if mode is FilterMode.COMBINED:
        tri = np.empty(table.n, dtype=np.float64)
        _tri_bounds(table.obj_pivot, qpiv, tri)
        np.maximum(out, tri, out=out)
    return out


def range_query(table: PivotTable, q, r, mode: FilterMode, oracle=None, pairs=None):
    """All objects within distance r of q, with cost accounting.

    Returns (sorted id list, QueryStats).  If ``oracle`` (a set of ids from
    an exact scan) is supplied, the count of results it has that we miss is
    recorded; it stays at 0 whenever the bounds are sound for the distance.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    qpiv = query_pivot_distances(table, q)
    keep = candidate_mask(table, qpiv, r, mode, pairs)

    pivot_ids = np.asarray(table.pivots.ids, dtype=np.int64)
    is_pivot = np.zeros(table.n, dtype=bool)
    is_pivot[pivot_ids] = True

    result = [int(pid) for pid, qp in zip(pivot_ids, qpiv) if qp <= r]
    cand_ids = np.flatnonzero(keep & ~is_pivot)
    if len(cand_ids):
        dists = table.d.one_to_many(q, table.data.objects(cand_ids))
        result.extend(int(i) for i, dist in zip(cand_ids, dists) if dist <= r)
    result.sort()

    stats = QueryStats(pivot_distances=len(pivot_ids), candidates=len(cand_ids))
    if oracle is not None:
        stats.false_negatives = len(set(oracle) - set(result))
    return result, stats


def linear_scan(data, d, q, r):
    """Ground truth: evaluate every object, keep those within r."""
    if len(data) == 0:
        return []
    dists = d.one_to_many(q, data.objects(range(len(data))))
    return [int(i) for i in np.flatnonzero(dists <= r)]
