"""Benchmark harness: filtering power, relative bound contribution, and
bound-accuracy maps, all reported as CSV.

Protocol shared by the query benchmarks: each run generates a fresh dataset
(when given a generator spec) and fresh pivots, then answers a batch of
queries drawn from the dataset with pivot objects excluded.  Queries emulate
k-NN search with a fixed-radius query whose radius is the exact distance to
the k-th neighbor, obtained from a side oracle whose evaluations are
scaffolding and are not charged to the reported cost.  Reported cost per
query is the pivot count plus the number of candidates whose true distance
had to be evaluated.

Everything is deterministic given the config seed; per-run streams are
derived with :func:`~ptolemaic.datagen.derive_seed`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pivots as pivots_mod
from .bounds import pto_lower, tri_lower
from .datagen import GenSpec, derive_seed, generate
from .index import FilterMode, bound_vector, build, candidate_mask

_TAG_DATA = 0
_TAG_MEST = 1
_TAG_PIVOTS = 2
_TAG_QUERIES = 3

DEFAULT_KS = (10, 20, 30, 40, 50)
DEFAULT_MODES = (
    FilterMode.TRIANGULAR,
    FilterMode.PTOLEMAIC_FULL,
    FilterMode.PTOLEMAIC_PARTIAL,
    FilterMode.COMBINED,
)


def radius_for_k(data, d, q, k, exclude_self=False):
    """Distance from q to its k-th nearest object, by full scan.

    The query, when drawn from the dataset, counts among the k objects
    (its self entry sits at distance 0); pass ``exclude_self=True`` to skip
    one zero-distance entry and count k neighbors besides the query.
    Callers running benchmarks pass an uncounted oracle distance here, as
    the scan is experiment scaffolding.
    """
    n = len(data)
    need = k + 1 if exclude_self else k
    if not 1 <= k <= n - (1 if exclude_self else 0):
        raise ValueError(f"k must be in [1, {n - (1 if exclude_self else 0)}]")
    dist = np.sort(d.one_to_many(q, data.objects(range(n))))
    return float(dist[need - 1])


@dataclass(frozen=True)
class RegionBreakdown:
    """How the non-results of one query split by which bound rejects them.

    The four counts partition the objects outside the result set: rejected
    by the Ptolemaic bound only, by both bounds, by the triangular bound
    only, or by neither (false positives that cost a distance evaluation).
    """

    pto_only: float
    both: float
    tri_only: float
    neither: float

    @property
    def negatives(self):
        return self.pto_only + self.both + self.tri_only + self.neither

    @property
    def pto_fraction(self):
        """Share of negatives the Ptolemaic bound filters (alone or not).

        NaN when there are no negatives at all (radius covers everything).
        """
        if self.negatives == 0:
            return float("nan")
        return (self.pto_only + self.both) / self.negatives


def region_breakdown(table, qpiv, dq, r) -> RegionBreakdown:
    """Classify every object with true distance > r by which bounds exceed r.

    ``dq`` holds the true distances from the query to all objects (oracle
    scan).  Exact integer counts; the partition identity
    ``negatives = n - |result|`` holds by construction.
    """
    tri = bound_vector(table, qpiv, FilterMode.TRIANGULAR)
    pto = bound_vector(table, qpiv, FilterMode.PTOLEMAIC_FULL)
    neg = dq > r
    tcut = tri > r
    pcut = pto > r
    return RegionBreakdown(
        pto_only=int((neg & pcut & ~tcut).sum()),
        both=int((neg & pcut & tcut).sum()),
        tri_only=int((neg & ~pcut & tcut).sum()),
        neither=int((neg & ~pcut & ~tcut).sum()),
    )


@dataclass
class BenchConfig:
    """Everything one benchmark needs; exactly one of gen/data is set."""

    distance: object
    gen: GenSpec | None = None
    data: object = None
    dataset_label: str = ""
    pivot_strategy: str = "sss"  # "sss" or "random"
    alpha: float = 0.4
    m_estimator: str = "sweep"  # "sweep" or "pairs"
    m_sample_factor: int = 10  # pairs estimator draws factor*n pairs
    m_value: float | None = None  # explicit max-distance override
    sweeps: int = 4
    random_m: int = 16  # pivot count for the random strategy
    modes: tuple = DEFAULT_MODES
    ks: tuple = DEFAULT_KS
    queries: int = 100
    runs: int = 10
    seed: int = 0
    exclude_self: bool = False

    def __post_init__(self):
        if (self.gen is None) == (self.data is None):
            raise ValueError("set exactly one of gen and data")
        if self.pivot_strategy not in ("sss", "random"):
            raise ValueError(f"unknown pivot strategy: {self.pivot_strategy!r}")
        if self.m_estimator not in ("sweep", "pairs"):
            raise ValueError(f"unknown max-distance estimator: {self.m_estimator!r}")
        if not self.dataset_label:
            self.dataset_label = (
                self.gen.label() if self.gen is not None
                else (self.data.meta or {}).get("gen", "dataset")
            )
        self.modes = tuple(
            m if isinstance(m, FilterMode) else FilterMode.parse(m) for m in self.modes
        )


def _run_dataset(cfg, run):
    if cfg.gen is not None:
        return generate(cfg.gen.with_seed(derive_seed(cfg.seed, run, _TAG_DATA)))
    return cfg.data


def _run_pivots(cfg, data, d, run):
    if cfg.pivot_strategy == "random":
        return pivots_mod.random_select(
            data, cfg.random_m, derive_seed(cfg.seed, run, _TAG_PIVOTS)
        )
    if cfg.m_value is not None:
        m_est = cfg.m_value
    elif cfg.m_estimator == "sweep":
        m_est = pivots_mod.estimate_max_distance_sweep(
            data, d, cfg.sweeps, derive_seed(cfg.seed, run, _TAG_MEST)
        )
    else:
        m_est = pivots_mod.estimate_max_distance(
            data, d, cfg.m_sample_factor * len(data), derive_seed(cfg.seed, run, _TAG_MEST)
        )
    return pivots_mod.sss_select(
        data, d, cfg.alpha, m_est, derive_seed(cfg.seed, run, _TAG_PIVOTS)
    )


def _run_queries(cfg, data, pivot_ids, run):
    n = len(data)
    eligible = np.setdiff1d(np.arange(n), np.asarray(pivot_ids))
    if cfg.queries > len(eligible):
        raise ValueError(
            f"cannot draw {cfg.queries} queries from {len(eligible)} non-pivot objects"
        )
    rng = np.random.default_rng(derive_seed(cfg.seed, run, _TAG_QUERIES))
    return eligible[rng.choice(len(eligible), cfg.queries, replace=False)]


def _kth_radius(dq_sorted, k, exclude_self):
    return float(dq_sorted[k if exclude_self else k - 1])


@dataclass
class BenchRow:
    experiment: str
    distance: str
    dataset: str
    n: int
    m: float
    mode: str
    k: int
    mean_cost: float
    mean_candidates: float
    mean_false_neg: float

    def csv(self):
        return ",".join(
            (
                self.experiment,
                self.distance,
                self.dataset,
                str(self.n),
                repr(self.m),
                self.mode,
                str(self.k),
                repr(self.mean_cost),
                repr(self.mean_candidates),
                repr(self.mean_false_neg),
            )
        )


BENCH_HEADER = "experiment,distance,dataset,n,m,mode,k,meanCost,meanCandidates,meanFalseNeg"


def rows_to_csv(header, rows):
    return "\n".join([header, *(row.csv() for row in rows)]) + "\n"


def bench_filtering(cfg: BenchConfig):
    """Average query cost per filtering mode and neighbor count k.

    Returns a list of :class:`BenchRow`, one per (mode, k) cell, averaged
    over runs x queries.  False negatives against the exact scan are
    averaged per query; they stay 0 whenever the bounds are sound for the
    distance.
    """
    agg = {
        (mode, k): [0.0, 0.0, 0.0] for mode in cfg.modes for k in cfg.ks
    }  # cost sum, candidate sum, false-negative sum
    ms = []
    n = None
    for run in range(cfg.runs):
        data = _run_dataset(cfg, run)
        n = len(data)
        max_k = max(cfg.ks) + (1 if cfg.exclude_self else 0)
        if max_k > n:
            raise ValueError(f"k={max(cfg.ks)} out of range for n={n}")
        d = cfg.distance.clone()
        pivot_set = _run_pivots(cfg, data, d, run)
        table = build(data, d, pivot_set)
        m = table.m
        ms.append(m)
        pivot_ids = np.asarray(pivot_set.ids)
        is_pivot = np.zeros(n, dtype=bool)
        is_pivot[pivot_ids] = True
        oracle = cfg.distance.clone()  # scaffolding scans, not charged
        everything = data.objects(range(n))
        for qid in _run_queries(cfg, data, pivot_ids, run):
            q = data.get(int(qid))
            dq = np.asarray(oracle.one_to_many(q, everything), dtype=np.float64)
            qpiv = dq[pivot_ids]
            dq_sorted = np.sort(dq)
            for k in cfg.ks:
                r = _kth_radius(dq_sorted, k, cfg.exclude_self)
                truth = dq <= r
                for mode in cfg.modes:
                    keep = candidate_mask(table, qpiv, r, mode)
                    cand = int((keep & ~is_pivot).sum())
                    missed = int((truth & ~is_pivot & ~keep).sum())
                    cell = agg[(mode, k)]
                    cell[0] += m + cand
                    cell[1] += cand
                    cell[2] += missed
    total = cfg.runs * cfg.queries
    rows = []
    for mode in cfg.modes:
        for k in cfg.ks:
            cost, cand, miss = agg[(mode, k)]
            rows.append(
                BenchRow(
                    experiment="bench",
                    distance=cfg.distance.name,
                    dataset=cfg.dataset_label,
                    n=n,
                    m=float(np.mean(ms)),
                    mode=mode.value,
                    k=k,
                    mean_cost=cost / total,
                    mean_candidates=cand / total,
                    mean_false_neg=miss / total,
                )
            )
    return rows


@dataclass
class RegionRow:
    experiment: str
    distance: str
    dataset: str
    n: int
    m: int
    k: int
    pto_only: float
    both: float
    tri_only: float
    neither: float
    pto_fraction: float

    def csv(self):
        return ",".join(
            (
                self.experiment,
                self.distance,
                self.dataset,
                str(self.n),
                str(self.m),
                str(self.k),
                repr(self.pto_only),
                repr(self.both),
                repr(self.tri_only),
                repr(self.neither),
                repr(self.pto_fraction),
            )
        )


REGIONS_HEADER = (
    "experiment,distance,dataset,n,m,k,ptoOnly,both,triOnly,neither,ptoFraction"
)


def relative_power(cfg: BenchConfig, pivot_counts, k=10):
    """Average region breakdown per pivot count, at fixed-radius k-NN.

    Pivots are drawn uniformly at random (the strategy field of ``cfg`` is
    ignored here); every object outside the result set is classified by
    whether the triangular and full Ptolemaic bounds reject it.
    """
    rows = []
    for m_count in pivot_counts:
        sums = np.zeros(4)
        n = None
        for run in range(cfg.runs):
            data = _run_dataset(cfg, run)
            n = len(data)
            d = cfg.distance.clone()
            pivot_set = pivots_mod.random_select(
                data, m_count, derive_seed(cfg.seed, run, _TAG_PIVOTS, m_count)
            )
            table = build(data, d, pivot_set)
            pivot_ids = np.asarray(pivot_set.ids)
            oracle = cfg.distance.clone()
            everything = data.objects(range(n))
            for qid in _run_queries(cfg, data, pivot_ids, run):
                q = data.get(int(qid))
                dq = np.asarray(oracle.one_to_many(q, everything), dtype=np.float64)
                qpiv = dq[pivot_ids]
                r = _kth_radius(np.sort(dq), k, cfg.exclude_self)
                reg = region_breakdown(table, qpiv, dq, r)
                sums += (reg.pto_only, reg.both, reg.tri_only, reg.neither)
        total = cfg.runs * cfg.queries
        breakdown = RegionBreakdown(*(float(v) for v in sums / total))
        rows.append(
            RegionRow(
                experiment="regions",
                distance=cfg.distance.name,
                dataset=cfg.dataset_label,
                n=n,
                m=m_count,
                k=k,
                pto_only=breakdown.pto_only,
                both=breakdown.both,
                tri_only=breakdown.tri_only,
                neither=breakdown.neither,
                pto_fraction=float(breakdown.pto_fraction),
            )
        )
    return rows


@dataclass
class GridRow:
    x: float
    y: float
    tri_ratio: float
    pto_ratio: float

    def csv(self):
        return ",".join(
            (repr(self.x), repr(self.y), repr(self.tri_ratio), repr(self.pto_ratio))
        )


GRID_HEADER = "x,y,triRatio,ptoRatio"


def point_ratios(d, q, p, s, o):
    """Bound-to-distance ratios at one point, clamped to [0, 1].

    Triangular uses the better of the two pivots; Ptolemaic uses the pair.
    A point at distance 0 from the query reports ratio 1 for both (the
    bounds are trivially tight there).
    """
    qp, qs, ps = d(q, p), d(q, s), d(p, s)
    op, os_, qo = d(o, p), d(o, s), d(q, o)
    tri = max(tri_lower(qp, op), tri_lower(qs, os_))
    pto = pto_lower(qp, qs, op, os_, ps)
    if qo == 0.0:
        return 1.0, 1.0
    return min(max(tri / qo, 0.0), 1.0), min(max(pto / qo, 0.0), 1.0)


def bound_accuracy_grid(
    d, q=(-1.0, 0.0), p=(0.0, 0.0), s=(1.0, 0.0), grid=(-3.0, 3.0, 121, -3.0, 3.0, 121)
):
    """Ratio of each bound to the true distance over a planar grid of objects.

    ``grid`` is (xmin, xmax, nx, ymin, ymax, ny); rows scan y within x.
    """
    xmin, xmax, nx, ymin, ymax, ny = grid
    q = np.asarray(q, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    rows = []
    for x in np.linspace(xmin, xmax, int(nx)):
        for y in np.linspace(ymin, ymax, int(ny)):
            o = np.array([x, y])
            tri, pto = point_ratios(d, q, p, s, o)
            rows.append(GridRow(float(x), float(y), tri, pto))
    return rows
