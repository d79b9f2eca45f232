"""Estimating how well a distance satisfies Ptolemy's inequality.

For four objects x, y, u, v the inequality reads

    d(x,v) * d(y,u)  <=  d(x,y) * d(u,v) + d(x,u) * d(y,v).

The estimator samples quadruples of distinct objects and reports the
proportion that satisfy the inequality, averaged over several runs.  Two
test variants are offered:

* ``sampled`` (default): test the inequality once, in the labeling order
  the quadruple was drawn.  One test per sampled quadruple is what a
  drawn-order benchmark measures, so this is the default rate.
* ``strict``: require every labeling to hold, i.e. the largest of the
  three pairing products must not exceed the sum of the other two.  This
  is the actual definition of a Ptolemaic quadruple (and what
  :func:`ptolemaic_check` decides); its rate is lower on non-Ptolemaic
  distances since a violating quadruple is caught regardless of drawing
  order.  For a random drawing order, one of three orientations exposes
  the single possible violating pairing, so the sampled rate is
  1 - (1 - strict rate) / 3 in expectation.

For distances that are actually Ptolemaic (Euclidean, quadratic-form,
square roots of metrics) both variants report rate 1 exactly, up to the
relative tolerance that absorbs floating-point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .datagen import GenSpec, derive_seed, generate

_TAG_DATA = 0
_TAG_QUAD = 1

LABELINGS = ("sampled", "strict")


@dataclass
class PtoReport:
    """Mean and spread of per-run satisfaction rates."""

    distance: str
    dataset: str
    runs: int
    quadruples_per_run: int
    labeling: str
    rates: tuple
    mean_rate: float
    std_dev: float
    violations: list  # (run, (x, y, u, v), relative slack), worst first

    CSV_HEADER = "distance,dataset,runs,quadruples,mean,std"

    def csv_row(self):
        return ",".join(
            (
                self.distance,
                self.dataset,
                str(self.runs),
                str(self.quadruples_per_run),
                repr(self.mean_rate),
                repr(self.std_dev),
            )
        )


def ptolemaic_check(d, x, y, u, v, eps_rel=1e-9):
    """True iff the quadruple satisfies Ptolemy's inequality in every labeling.

    Computes the six pairwise distances, forms the three pairing products,
    and accepts iff the largest product is at most the sum of the other two,
    within a relative tolerance for rounding.
    """
    p1 = d(x, y) * d(u, v)
    p2 = d(x, u) * d(y, v)
    p3 = d(x, v) * d(y, u)
    largest = max(p1, p2, p3)
    rest = p1 + p2 + p3 - largest
    return largest <= rest * (1.0 + eps_rel)


def sample_quadruples(data, count, seed):
    """``count`` quadruples of distinct indices, as a (count, 4) int array."""
    n = len(data)
    if n < 4:
        raise ValueError("need at least 4 objects to sample quadruples")
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    ids = rng.integers(0, n, (count, 4))
    while True:
        srt = np.sort(ids, axis=1)
        bad = (srt[:, 1:] == srt[:, :-1]).any(axis=1)
        if not bad.any():
            return ids
        ids[bad] = rng.integers(0, n, (int(bad.sum()), 4))


def _run_rates(data, d, ids, eps_rel, labeling):
    """Satisfaction mask and relative slack for a batch of quadruples."""
    col = [data.objects(ids[:, c]) for c in range(4)]
    xy = np.asarray(d.pairwise(col[0], col[1]), dtype=np.float64)
    uv = np.asarray(d.pairwise(col[2], col[3]), dtype=np.float64)
    xu = np.asarray(d.pairwise(col[0], col[2]), dtype=np.float64)
    yv = np.asarray(d.pairwise(col[1], col[3]), dtype=np.float64)
    xv = np.asarray(d.pairwise(col[0], col[3]), dtype=np.float64)
    yu = np.asarray(d.pairwise(col[1], col[2]), dtype=np.float64)
    if labeling == "sampled":
        lhs = xv * yu
        rhs = xy * uv + xu * yv
    else:
        prods = np.stack((xy * uv, xu * yv, xv * yu))
        lhs = prods.max(axis=0)
        rhs = prods.sum(axis=0) - lhs
    ok = lhs <= rhs * (1.0 + eps_rel)
    with np.errstate(divide="ignore", invalid="ignore"):
        slack = np.where(rhs > 0, lhs / rhs - 1.0, np.where(lhs > 0, np.inf, 0.0))
    return ok, slack


def ptolemaicity_rate(
    gen_or_data,
    d,
    quadruples=10000,
    runs=10,
    eps_rel=1e-9,
    seed=0,
    labeling="sampled",
    keep_violations=10,
) -> PtoReport:
    """Satisfaction rate over ``runs`` batches of sampled quadruples.

    ``gen_or_data`` is either a :class:`~ptolemaic.datagen.GenSpec`, in which
    case a fresh dataset is generated for every run, or a static
    :class:`~ptolemaic.data.DataSet`, in which case the data stays fixed and
    only the quadruple sample is redrawn per run.  The worst violating
    quadruples are kept for diagnostics.
    """
    if labeling not in LABELINGS:
        raise ValueError(f"labeling must be one of {LABELINGS}, got {labeling!r}")
    fresh = isinstance(gen_or_data, GenSpec)
    if fresh:
        dataset_label = gen_or_data.label()
    else:
        dataset_label = (gen_or_data.meta or {}).get("gen", "dataset")
    rates = []
    worst = []
    for run in range(runs):
        if fresh:
            data = generate(gen_or_data.with_seed(derive_seed(seed, run, _TAG_DATA)))
        else:
            data = gen_or_data
        ids = sample_quadruples(data, quadruples, derive_seed(seed, run, _TAG_QUAD))
        ok, slack = _run_rates(data, d, ids, eps_rel, labeling)
        rates.append(float(ok.mean()))
        bad = np.flatnonzero(~ok)
        if len(bad):
            top = bad[np.argsort(slack[bad])[::-1][:keep_violations]]
            worst.extend(
                (run, tuple(int(i) for i in ids[b]), float(slack[b])) for b in top
            )
    worst.sort(key=lambda rec: rec[2], reverse=True)
    arr = np.array(rates)
    return PtoReport(
        distance=d.name,
        dataset=dataset_label,
        runs=runs,
        quadruples_per_run=quadruples,
        labeling=labeling,
        rates=tuple(rates),
        mean_rate=float(arr.mean()),
        std_dev=float(arr.std()),
        violations=worst[:keep_violations],
    )


def exhaustive_rate(data, d, eps_rel=1e-9):
    """Strict satisfaction rate over every 4-subset; only for tiny datasets."""
    n = len(data)
    if n < 4:
        raise ValueError("need at least 4 objects")
    if n > 40:
        raise ValueError("exhaustive enumeration is limited to n <= 40")
    good = total = 0
    for q in combinations(range(n), 4):
        total += 1
        good += ptolemaic_check(d, *(data.get(i) for i in q), eps_rel=eps_rel)
    return good / total
