import math

import numpy as np
import pytest

from ptolemaic.data import DataSet
from ptolemaic.distances import LpDistance, euclidean
from ptolemaic.pivots import (
    PivotSet,
    estimate_max_distance,
    estimate_max_distance_sweep,
    random_select,
    sss_select,
)


def line_dataset(values):
    return DataSet.from_vectors(np.asarray(values, dtype=np.float64).reshape(-1, 1))


def test_sss_identical_objects_yield_single_pivot():
    data = line_dataset([2.0] * 8)
    got = sss_select(data, LpDistance(1), alpha=0.5, max_distance_estimate=1.0, seed=0)
    assert len(got) == 1
    assert got.strategy == "sss"


def test_sss_two_separated_points():
    data = line_dataset([0.0, 10.0])
    got = sss_select(data, LpDistance(1), alpha=0.5, max_distance_estimate=10.0, seed=3)
    assert sorted(got.ids) == [0, 1]


def test_sss_threshold_above_diameter_keeps_one_pivot():
    data = line_dataset(np.arange(10.0))
    got = sss_select(data, LpDistance(1), alpha=1.0, max_distance_estimate=50.0, seed=1)
    assert len(got) == 1


def test_sss_pivots_pairwise_separated():
    rng = np.random.default_rng(11)
    data = DataSet.from_vectors(rng.random((400, 3)))
    d = euclidean()
    m_est = estimate_max_distance_sweep(data, d, seed=0)
    got = sss_select(data, d, alpha=0.4, max_distance_estimate=m_est, seed=5)
    piv = data.objects(list(got.ids))
    for a in range(len(got)):
        for b in range(a + 1, len(got)):
            assert d(piv[a], piv[b]) >= 0.4 * m_est - 1e-12


def test_sss_deterministic():
    rng = np.random.default_rng(12)
    data = DataSet.from_vectors(rng.random((200, 4)))
    d = euclidean()
    a = sss_select(data, d, 0.4, 1.5, seed=9)
    b = sss_select(data, d, 0.4, 1.5, seed=9)
    assert a.ids == b.ids
    c = sss_select(data, d, 0.4, 1.5, seed=10)
    # a different order usually picks a different first pivot
    assert c.ids != a.ids or c.params != a.params


def test_sss_validation():
    data = line_dataset([0.0, 1.0])
    d = LpDistance(1)
    with pytest.raises(ValueError):
        sss_select(data, d, 0.0, 1.0, seed=0)
    with pytest.raises(ValueError):
        sss_select(data, d, 1.5, 1.0, seed=0)
    with pytest.raises(ValueError):
        sss_select(data, d, 0.5, 0.0, seed=0)


def test_estimate_max_distance_two_objects():
    data = line_dataset([1.0, 4.0])
    assert estimate_max_distance(data, LpDistance(1), 50, seed=0) == 3.0


def test_estimate_max_distance_saturates_on_small_set():
    data = line_dataset(np.arange(10.0))
    # enough samples to all but surely hit the extreme pair
    assert estimate_max_distance(data, LpDistance(1), 5000, seed=1) == 9.0


def test_estimate_max_distance_never_exceeds_diameter():
    rng = np.random.default_rng(13)
    data = DataSet.from_vectors(rng.random((100, 10)))
    got = estimate_max_distance(data, euclidean(), 2000, seed=2)
    assert 0 < got <= math.sqrt(10)


def test_estimate_max_distance_degenerate():
    data = line_dataset([5.0, 5.0, 5.0])
    with pytest.raises(ValueError):
        estimate_max_distance(data, LpDistance(1), 100, seed=0)
    with pytest.raises(ValueError):
        estimate_max_distance(line_dataset([1.0]), LpDistance(1), 100, seed=0)


def test_sweep_finds_line_diameter():
    data = line_dataset(np.arange(10.0))
    # any start point reaches an endpoint after one hop
    for seed in range(5):
        assert estimate_max_distance_sweep(data, LpDistance(1), seed=seed) == 9.0


def test_sweep_bounded_by_true_diameter():
    rng = np.random.default_rng(14)
    vecs = rng.random((150, 5))
    data = DataSet.from_vectors(vecs)
    d = euclidean()
    true_diam = max(
        d(vecs[i], vecs[j]) for i in range(len(vecs)) for j in range(i + 1, len(vecs))
    )
    got = estimate_max_distance_sweep(data, d, seed=3)
    assert 0 < got <= true_diam + 1e-12


def test_sweep_degenerate():
    with pytest.raises(ValueError):
        estimate_max_distance_sweep(line_dataset([2.0, 2.0]), LpDistance(1), seed=0)


def test_random_select_basics():
    data = line_dataset(np.arange(6.0))
    allp = random_select(data, 6, seed=0)
    assert sorted(allp.ids) == list(range(6))
    one = random_select(data, 1, seed=0)
    assert len(one) == 1
    assert random_select(data, 3, seed=7).ids == random_select(data, 3, seed=7).ids
    with pytest.raises(ValueError):
        random_select(data, 7, seed=0)
    with pytest.raises(ValueError):
        random_select(data, 0, seed=0)


def test_random_select_is_roughly_uniform():
    data = line_dataset(np.arange(10.0))
    counts = np.zeros(10)
    trials = 10000
    for seed in range(trials):
        counts[random_select(data, 1, seed=seed).ids[0]] += 1
    freq = counts / trials
    sigma = math.sqrt(0.1 * 0.9 / trials)
    assert np.all(np.abs(freq - 0.1) < 5 * sigma)


def test_pivot_set_validation():
    with pytest.raises(ValueError):
        PivotSet(ids=(), strategy="sss", params={})
    with pytest.raises(ValueError):
        PivotSet(ids=(1, 1), strategy="sss", params={})
