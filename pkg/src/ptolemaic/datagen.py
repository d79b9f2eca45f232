"""Seeded dataset generators and text-corpus loading.

Every generator is a pure function of its parameters including the seed, so
experiment runs are reproducible bit for bit.  Vector data lives in the unit
hypercube (Gaussian clusters may spill outside it; samples are not clipped,
which would distort the variance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataSet
from .distances import QFMatrix, qf_matrix_from_bin_distances

KINDS = ("uniform", "clustered", "sets", "histograms", "words")


def derive_seed(seed, *path):
    """Deterministic child seed from a master seed and integer path parts.

    Experiments split their master seed into independent per-run,
    per-purpose streams this way, so reordering or parallelizing runs can
    never change any result.
    """
    entropy = [int(seed), *(int(p) for p in path)]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one synthetic dataset."""

    kind: str
    n: int
    dim: int  # vector dimension, set universe size, or histogram bin count
    clusters: int = 10
    variance: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dataset kind: {self.kind!r}")
        if self.n < 1 or self.dim < 1:
            raise ValueError("n and dim must be at least 1")
        if self.kind == "clustered" and not (1 <= self.clusters <= self.n):
            raise ValueError("need 1 <= clusters <= n")
        if self.kind == "clustered" and not self.variance > 0:
            raise ValueError("variance must be positive")

    def with_seed(self, seed):
        return GenSpec(self.kind, self.n, self.dim, self.clusters, self.variance, seed)

    def label(self):
        if self.kind == "uniform":
            return f"uniform-r{self.dim}"
        if self.kind == "clustered":
            return f"clustered-r{self.dim}"
        if self.kind == "sets":
            return f"sets-u{self.dim}"
        if self.kind == "histograms":
            return f"histograms-{self.dim}"
        return f"words-{self.n}"


def uniform_vectors(n, k, seed) -> DataSet:
    """n points i.i.d. uniform in [0,1]^k."""
    pts = np.random.default_rng(seed).random((n, k))
    return DataSet.from_vectors(pts, meta={"gen": "uniform", "seed": seed})


def clustered_vectors(n, k, c=10, variance=0.1, seed=0) -> DataSet:
    """n points from c Gaussian clusters centered uniformly in [0,1]^k.

    Object i belongs to cluster i mod c, so cluster sizes differ by at most
    one.  Each coordinate is Gaussian around the center with the given
    variance, unclipped.
    """
    if not 1 <= c <= n:
        raise ValueError("need 1 <= c <= n")
    rng = np.random.default_rng(seed)
    centers = rng.random((c, k))
    noise = rng.normal(0.0, np.sqrt(variance), (n, k))
    pts = centers[np.arange(n) % c] + noise
    return DataSet.from_vectors(pts, meta={"gen": "clustered", "seed": seed})


def random_sets(n, k, seed) -> DataSet:
    """n subsets of {0,...,k-1}, each element present with probability 1/2."""
    mask = np.random.default_rng(seed).random((n, k)) < 0.5
    sets = [frozenset(np.flatnonzero(row).tolist()) for row in mask]
    return DataSet.from_sets(sets, universe=k, meta={"gen": "sets", "seed": seed})


def load_strings(path, min_len=1) -> DataSet:
    """One string object per line of a UTF-8 text file, in file order.

    Lines shorter than ``min_len`` are dropped (use 6 to strip short lines
    from running-text corpora, 1 to keep every word of a word list).
    """
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n").rstrip("\r") for line in fh]
    kept = [line for line in lines if len(line) >= min_len]
    if not kept:
        raise ValueError(f"no lines of length >= {min_len} in {path}")
    return DataSet.from_strings(kept, meta={"gen": "strings"})


def histogram_matrix(bins) -> QFMatrix:
    """Quadratic-form weight matrix for a bins = g^3 color grid.

    Bin centers sit on a g x g x g lattice in the unit RGB cube; inter-bin
    ground distances are Euclidean, and the weights are 1 - d_ij / d_max.
    """
    g = round(bins ** (1.0 / 3.0))
    if g**3 != bins:
        raise ValueError(f"bins must be a perfect cube over 3 color axes, got {bins}")
    axis = (np.arange(g) + 0.5) / g
    centers = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), -1).reshape(-1, 3)
    diff = centers[:, None, :] - centers[None, :, :]
    ground = np.sqrt((diff**2).sum(-1))
    return qf_matrix_from_bin_distances(ground)


def synthetic_histograms(n, bins, seed) -> tuple[DataSet, QFMatrix]:
    """n sparse normalized histograms plus the matching grid weight matrix.

    Each histogram mixes 1 to 5 random peak bins with random positive
    weights, normalized to sum 1.
    """
    matrix = histogram_matrix(bins)
    rng = np.random.default_rng(seed)
    out = np.zeros((n, bins))
    for i in range(n):
        npeaks = int(rng.integers(1, 6))
        peaks = rng.choice(bins, npeaks, replace=False)
        weights = rng.random(npeaks)
        total = weights.sum()
        if total == 0.0:
            weights[:] = 1.0
            total = float(npeaks)
        out[i, peaks] = weights / total
    ds = DataSet.from_vectors(out, meta={"gen": "histograms", "seed": seed})
    return ds, matrix


def random_words(n, min_len=3, max_len=12, seed=0) -> DataSet:
    """n distinct random lowercase words with lengths in [min_len, max_len]."""
    if not 1 <= min_len <= max_len:
        raise ValueError("need 1 <= min_len <= max_len")
    rng = np.random.default_rng(seed)
    letters = "abcdefghijklmnopqrstuvwxyz"
    words = {}
    while len(words) < n:
        for _ in range(n):
            length = int(rng.integers(min_len, max_len + 1))
            word = "".join(letters[i] for i in rng.integers(0, 26, length))
            words.setdefault(word, None)
    return DataSet.from_strings(
        list(words)[:n], meta={"gen": "words", "seed": seed}
    )


def generate(spec: GenSpec) -> DataSet:
    """Build the dataset a GenSpec describes (histogram matrix via
    :func:`histogram_matrix`, which depends only on the bin count)."""
    if spec.kind == "uniform":
        return uniform_vectors(spec.n, spec.dim, spec.seed)
    if spec.kind == "clustered":
        return clustered_vectors(spec.n, spec.dim, spec.clusters, spec.variance, spec.seed)
    if spec.kind == "sets":
        return random_sets(spec.n, spec.dim, spec.seed)
    if spec.kind == "histograms":
        return synthetic_histograms(spec.n, spec.dim, spec.seed)[0]
    if spec.kind == "words":
        return random_words(spec.n, seed=spec.seed)
    raise ValueError(f"unknown dataset kind: {spec.kind!r}")
