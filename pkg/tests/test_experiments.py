import math

import numpy as np
import pytest

from ptolemaic.data import DataSet
from ptolemaic.datagen import GenSpec, derive_seed, generate, uniform_vectors
from ptolemaic.distances import LpDistance, euclidean
from ptolemaic.experiments import (
    BENCH_HEADER,
    GRID_HEADER,
    REGIONS_HEADER,
    BenchConfig,
    RegionBreakdown,
    bench_filtering,
    bound_accuracy_grid,
    point_ratios,
    radius_for_k,
    region_breakdown,
    relative_power,
    rows_to_csv,
)
from ptolemaic.index import FilterMode, build, candidate_mask, query_pivot_distances
from ptolemaic.pivots import random_select


def line_dataset(values):
    return DataSet.from_vectors(np.asarray(values, dtype=np.float64).reshape(-1, 1))


def test_radius_for_k_line():
    data = line_dataset(np.arange(10.0))
    d = LpDistance(1)
    q = data.get(0)
    assert radius_for_k(data, d, q, 1) == 0.0  # the query itself
    assert radius_for_k(data, d, q, 3) == 2.0
    assert radius_for_k(data, d, q, 10) == 9.0
    assert radius_for_k(data, d, q, 3, exclude_self=True) == 3.0
    with pytest.raises(ValueError):
        radius_for_k(data, d, q, 11)
    with pytest.raises(ValueError):
        radius_for_k(data, d, q, 10, exclude_self=True)
    with pytest.raises(ValueError):
        radius_for_k(data, d, q, 0)


def test_region_breakdown_partition_identity():
    rng = np.random.default_rng(0)
    data = DataSet.from_vectors(rng.random((200, 4)))
    d = euclidean()
    table = build(data, d, random_select(data, 5, seed=1))
    everything = data.objects(range(200))
    for qi in range(0, 200, 23):
        q = data.get(qi)
        dq = np.asarray(d.one_to_many(q, everything))
        qpiv = dq[np.asarray(table.pivots.ids)]
        r = radius_for_k(data, d, q, 10)
        reg = region_breakdown(table, qpiv, dq, r)
        n_result = int((dq <= r).sum())
        assert reg.negatives == 200 - n_result
        for part in (reg.pto_only, reg.both, reg.tri_only, reg.neither):
            assert part == int(part) >= 0
        assert 0.0 <= reg.pto_fraction <= 1.0


def test_region_breakdown_single_pivot_has_no_pair_bound():
    rng = np.random.default_rng(2)
    data = DataSet.from_vectors(rng.random((100, 3)))
    d = euclidean()
    table = build(data, d, random_select(data, 1, seed=3))
    q = data.get(50)
    dq = np.asarray(d.one_to_many(q, data.objects(range(100))))
    qpiv = dq[np.asarray(table.pivots.ids)]
    reg = region_breakdown(table, qpiv, dq, radius_for_k(data, d, q, 5))
    assert reg.pto_only == 0 and reg.both == 0
    assert reg.pto_fraction == 0.0


def test_region_breakdown_nan_fraction_when_radius_covers_all():
    assert math.isnan(RegionBreakdown(0, 0, 0, 0).pto_fraction)


def test_bench_config_validation():
    gen = GenSpec("uniform", 50, 3)
    with pytest.raises(ValueError):
        BenchConfig(distance=euclidean())
    with pytest.raises(ValueError):
        BenchConfig(distance=euclidean(), gen=gen, data=uniform_vectors(10, 2, 0))
    with pytest.raises(ValueError):
        BenchConfig(distance=euclidean(), gen=gen, pivot_strategy="walk")
    with pytest.raises(ValueError):
        BenchConfig(distance=euclidean(), gen=gen, m_estimator="guess")
    cfg = BenchConfig(distance=euclidean(), gen=gen, modes=("tri", "full"))
    assert cfg.dataset_label == "uniform-r3"
    assert cfg.modes == (FilterMode.TRIANGULAR, FilterMode.PTOLEMAIC_FULL)
    named = BenchConfig(
        distance=euclidean(), data=uniform_vectors(30, 2, 0), queries=5, runs=1
    )
    assert named.dataset_label == "uniform"


def test_bench_filtering_basic_properties():
    cfg = BenchConfig(
        distance=euclidean(),
        gen=GenSpec("uniform", 400, 4),
        pivot_strategy="random",
        random_m=8,
        ks=(5, 10),
        queries=15,
        runs=2,
        seed=1,
    )
    rows = bench_filtering(cfg)
    assert len(rows) == len(cfg.modes) * len(cfg.ks)
    for row in rows:
        assert row.experiment == "bench"
        assert row.distance == "l2" and row.dataset == "uniform-r4"
        assert row.n == 400 and row.m == 8.0
        assert row.mean_cost == pytest.approx(row.m + row.mean_candidates, rel=1e-12)
        assert row.mean_cost >= row.m
        assert row.mean_false_neg == 0.0
    csv = rows_to_csv(BENCH_HEADER, rows)
    assert csv.splitlines()[0] == BENCH_HEADER
    assert len(csv.splitlines()) == 1 + len(rows)


def test_bench_filtering_deterministic():
    def make_cfg():
        return BenchConfig(
            distance=euclidean(),
            gen=GenSpec("uniform", 300, 3),
            pivot_strategy="sss",
            alpha=0.5,
            ks=(5,),
            queries=10,
            runs=2,
            seed=7,
        )

    a = rows_to_csv(BENCH_HEADER, bench_filtering(make_cfg()))
    b = rows_to_csv(BENCH_HEADER, bench_filtering(make_cfg()))
    assert a == b


def test_bench_filtering_matches_reference_recomputation():
    """The benchmark loop agrees exactly with a replay through the public API."""
    gen = GenSpec("uniform", 80, 3)
    seed, runs, queries, m_pivots = 3, 2, 10, 4
    ks = (5, 10)
    modes = (FilterMode.TRIANGULAR, FilterMode.PTOLEMAIC_FULL, FilterMode.COMBINED)
    cfg = BenchConfig(
        distance=euclidean(),
        gen=gen,
        pivot_strategy="random",
        random_m=m_pivots,
        modes=modes,
        ks=ks,
        queries=queries,
        runs=runs,
        seed=seed,
    )
    rows = bench_filtering(cfg)

    d = euclidean()
    sums = {(mode, k): [0, 0] for mode in modes for k in ks}
    for run in range(runs):
        data = generate(gen.with_seed(derive_seed(seed, run, 0)))
        n = len(data)
        pivots = random_select(data, m_pivots, derive_seed(seed, run, 2))
        table = build(data, d, pivots)
        pivot_ids = np.asarray(pivots.ids)
        is_pivot = np.zeros(n, dtype=bool)
        is_pivot[pivot_ids] = True
        eligible = np.setdiff1d(np.arange(n), pivot_ids)
        rng = np.random.default_rng(derive_seed(seed, run, 3))
        qids = eligible[rng.choice(len(eligible), queries, replace=False)]
        everything = data.objects(range(n))
        for qid in qids:
            q = data.get(int(qid))
            dq = np.asarray(d.one_to_many(q, everything))
            qpiv = dq[pivot_ids]
            for k in ks:
                r = float(np.sort(dq)[k - 1])
                for mode in modes:
                    keep = candidate_mask(table, qpiv, r, mode)
                    cand = int((keep & ~is_pivot).sum())
                    sums[(mode, k)][0] += m_pivots + cand
                    sums[(mode, k)][1] += cand
    total = runs * queries
    by_cell = {(row.mode, row.k): row for row in rows}
    for mode in modes:
        for k in ks:
            row = by_cell[(mode.value, k)]
            assert row.mean_cost == sums[(mode, k)][0] / total
            assert row.mean_candidates == sums[(mode, k)][1] / total


def test_bench_filtering_rejects_impossible_draws():
    cfg = BenchConfig(
        distance=euclidean(),
        gen=GenSpec("uniform", 20, 2),
        pivot_strategy="random",
        random_m=10,
        ks=(5,),
        queries=15,
        runs=1,
    )
    with pytest.raises(ValueError):
        bench_filtering(cfg)
    cfg2 = BenchConfig(
        distance=euclidean(),
        gen=GenSpec("uniform", 20, 2),
        pivot_strategy="random",
        random_m=4,
        ks=(30,),
        queries=5,
        runs=1,
    )
    with pytest.raises(ValueError):
        bench_filtering(cfg2)


def test_relative_power_rows():
    cfg = BenchConfig(
        distance=euclidean(),
        gen=GenSpec("uniform", 300, 3),
        queries=20,
        runs=2,
        seed=5,
    )
    rows = relative_power(cfg, pivot_counts=(1, 4), k=5)
    assert [row.m for row in rows] == [1, 4]
    for row in rows:
        assert row.experiment == "regions"
        assert row.n == 300 and row.k == 5
        negatives = row.pto_only + row.both + row.tri_only + row.neither
        assert negatives == pytest.approx(300 - 5)  # identity holds on average too
        if row.m == 1:
            assert row.pto_only == 0.0 and row.both == 0.0
            assert row.pto_fraction == 0.0
        else:
            assert 0.0 < row.pto_fraction <= 1.0
            assert row.pto_fraction == pytest.approx(
                (row.pto_only + row.both) / negatives
            )
    csv = rows_to_csv(REGIONS_HEADER, rows)
    assert csv.startswith(REGIONS_HEADER + "\n")
    assert "np.float64" not in csv


def test_point_ratios_known_geometry():
    d = euclidean()
    q, p, s = np.array([-1.0, 0.0]), np.array([0.0, 0.0]), np.array([1.0, 0.0])
    tri, pto = point_ratios(d, q, p, s, np.array([3.0, 0.0]))
    assert pto == 1.0
    assert tri == pytest.approx(0.5)
    tri, pto = point_ratios(d, q, p, s, np.array([0.0, 1.0]))
    assert pto == pytest.approx((2 - math.sqrt(2)) / math.sqrt(2), abs=1e-12)
    # o at the query: both ratios are defined as 1
    assert point_ratios(d, q, p, s, q) == (1.0, 1.0)
    # o at a pivot: the triangular bound is exact
    tri, pto = point_ratios(d, q, p, s, p)
    assert tri == 1.0


def test_bound_accuracy_grid_coarse():
    rows = bound_accuracy_grid(euclidean(), grid=(-3.0, 3.0, 7, -3.0, 3.0, 7))
    assert len(rows) == 49
    # y scans within x
    assert (rows[0].x, rows[0].y) == (-3.0, -3.0)
    assert (rows[1].x, rows[1].y) == (-3.0, -2.0)
    by_point = {(row.x, row.y): row for row in rows}
    assert by_point[(3.0, 0.0)].pto_ratio == 1.0
    assert abs(by_point[(0.0, 1.0)].pto_ratio - (2 - math.sqrt(2)) / math.sqrt(2)) < 1e-9
    assert by_point[(-1.0, 0.0)].tri_ratio == 1.0  # the query cell
    assert by_point[(0.0, 0.0)].tri_ratio == 1.0  # a pivot cell
    for row in rows:
        assert 0.0 <= row.tri_ratio <= 1.0
        assert 0.0 <= row.pto_ratio <= 1.0
    csv = rows_to_csv(GRID_HEADER, rows)
    assert csv.splitlines()[0] == "x,y,triRatio,ptoRatio"
    assert len(csv.splitlines()) == 50
