"""Counted dissimilarity functions over vectors, sets and strings.

Every distance tracks how many times it has been evaluated; the evaluation
count is the budget all filtering experiments are measured in.  Batch entry
points (``one_to_many``, ``pairwise``) count one evaluation per pair, exactly
as if each pair had been evaluated through ``__call__``.

Instances are immutable in their parameters; the counter is the only mutable
state.  For parallel work, give each worker its own ``clone()`` and sum the
counts afterwards -- the merge is deterministic.
"""

from __future__ import annotations

import copy
import math

import numpy as np


class NotPositiveDefiniteError(ValueError):
    """Raised when a quadratic-form matrix fails the positive-definite check.

    Carries the offending matrix plus the factorization pivot that failed.
    """

    def __init__(self, matrix, pivot, index):
        super().__init__(
            f"matrix is not positive-definite: pivot {pivot:.3e} at index {index}"
        )
        self.matrix = matrix
        self.pivot = pivot
        self.index = index


def spd_cholesky(a, pivot_threshold=1e-12):
    """Lower-triangular Cholesky factor of a symmetric matrix.

    Raises :class:`NotPositiveDefiniteError` if any pivot drops to
    ``pivot_threshold`` or below; succeeding is the positive-definiteness
    certificate used throughout this package.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - low[j, :j] @ low[j, :j]
        if not pivot > pivot_threshold:
            raise NotPositiveDefiniteError(a, pivot, j)
        low[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j]) / low[j, j]
    return low


class QFMatrix:
    """Symmetric positive-definite weight matrix for the quadratic-form distance.

    Validation happens once, at construction: exact symmetry, finite entries,
    and a successful Cholesky factorization.
    """

    def __init__(self, entries, pivot_threshold=1e-12):
        arr = np.array(entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("quadratic-form matrix must be square")
        if not np.isfinite(arr).all():
            raise ValueError("quadratic-form matrix entries must be finite")
        if not (arr == arr.T).all():
            raise ValueError("quadratic-form matrix must be exactly symmetric")
        spd_cholesky(arr, pivot_threshold)
        arr.setflags(write=False)
        self.array = arr

    @property
    def dim(self):
        return self.array.shape[0]


def qf_matrix_from_bin_distances(bin_dist) -> QFMatrix:
    """Weight matrix ``a_ij = 1 - d_ij / d_max`` from inter-bin ground distances.

    ``bin_dist`` must be symmetric with a zero diagonal and a positive maximum.
    The result is checked for positive-definiteness and returned validated.
    """
    d = np.asarray(bin_dist, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("bin distance matrix must be square")
    if not np.isfinite(d).all() or (d < 0).any():
        raise ValueError("bin distances must be finite and nonnegative")
    if not (d == d.T).all():
        raise ValueError("bin distance matrix must be symmetric")
    if np.diag(d).any():
        raise ValueError("bin distance matrix must have a zero diagonal")
    d_max = d.max()
    if d_max <= 0:
        raise ValueError("bin distance matrix is degenerate (all zero)")
    return QFMatrix(1.0 - d / d_max)


class Distance:
    """Base class: a counted, symmetric, nonnegative dissimilarity evaluator."""

    name = "?"
    kind = "vector"  # object kind the distance applies to

    def __init__(self):
        self._calls = 0

    @property
    def calls(self):
        """Number of evaluations so far."""
        return self._calls

    def reset_calls(self):
        self._calls = 0

    def clone(self):
        """Copy with a fresh counter (per-worker pattern for parallel use)."""
        c = copy.copy(self)
        c._calls = 0
        return c

    def __call__(self, x, y) -> float:
        self._calls += 1
        return self._eval(x, y)

    def one_to_many(self, x, batch):
        """Distances from ``x`` to every object in ``batch`` (counts ``len(batch)``)."""
        self._calls += len(batch)
        return self._eval_many(x, batch)

    def pairwise(self, xs, ys):
        """Elementwise distances ``d(xs[i], ys[i])`` (counts ``len(xs)``)."""
        if len(xs) != len(ys):
            raise ValueError("pairwise requires equal-length batches")
        self._calls += len(xs)
        return self._eval_pairwise(xs, ys)

    # subclasses override _eval and, when it pays, the batch versions
    def _eval(self, x, y) -> float:
        raise NotImplementedError

    def _eval_many(self, x, batch):
        return np.array([self._eval(x, y) for y in batch], dtype=np.float64)

    def _eval_pairwise(self, xs, ys):
        return np.array([self._eval(x, y) for x, y in zip(xs, ys)], dtype=np.float64)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} calls={self._calls}>"


def _check_dims(x, y):
    if len(x) != len(y):
        raise ValueError(f"dimension mismatch: {len(x)} vs {len(y)}")


class LpDistance(Distance):
    """Minkowski distance with parameter ``p >= 1`` (``math.inf`` for Chebyshev)."""

    def __init__(self, p):
        super().__init__()
        p = float(p)
        if not p >= 1.0:
            raise ValueError(f"p must be >= 1 or inf, got {p}")
        self.p = p
        self.name = "linf" if math.isinf(p) else f"l{p:g}"

    def _eval(self, x, y):
        _check_dims(x, y)
        z = np.abs(np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64))
        if math.isinf(self.p):
            return float(z.max()) if z.size else 0.0
        if self.p == 1.0:
            return float(z.sum())
        if self.p == 2.0:
            return float(np.sqrt((z * z).sum()))
        return float((z**self.p).sum() ** (1.0 / self.p))

    def _eval_many(self, x, batch):
        z = np.abs(np.asarray(batch, dtype=np.float64) - np.asarray(x, dtype=np.float64))
        if z.ndim != 2 or (len(batch) and z.shape[1] != len(x)):
            raise ValueError("dimension mismatch in batch")
        if math.isinf(self.p):
            return z.max(axis=1) if z.size else np.zeros(len(batch))
        if self.p == 1.0:
            return z.sum(axis=1)
        if self.p == 2.0:
            return np.sqrt((z * z).sum(axis=1))
        return (z**self.p).sum(axis=1) ** (1.0 / self.p)

    def _eval_pairwise(self, xs, ys):
        z = np.abs(np.asarray(xs, dtype=np.float64) - np.asarray(ys, dtype=np.float64))
        if math.isinf(self.p):
            return z.max(axis=1)
        if self.p == 1.0:
            return z.sum(axis=1)
        if self.p == 2.0:
            return np.sqrt((z * z).sum(axis=1))
        return (z**self.p).sum(axis=1) ** (1.0 / self.p)


def euclidean() -> LpDistance:
    return LpDistance(2)


class QuadraticFormDistance(Distance):
    """``sqrt(z' A z)`` with ``z = x - y`` and A symmetric positive-definite.

    With A = I this is the Euclidean distance; a diagonal A gives a weighted
    Euclidean distance.
    """

    name = "qf"

    def __init__(self, matrix):
        super().__init__()
        self.matrix = matrix if isinstance(matrix, QFMatrix) else QFMatrix(matrix)

    def _eval(self, x, y):
        a = self.matrix.array
        _check_dims(x, y)
        if len(x) != a.shape[0]:
            raise ValueError(f"dimension mismatch: vectors {len(x)}, matrix {a.shape[0]}")
        z = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
        # rounding can push z'Az a hair below 0 when z is tiny
        return float(np.sqrt(max(z @ (a @ z), 0.0)))

    def _eval_many(self, x, batch):
        a = self.matrix.array
        z = np.asarray(batch, dtype=np.float64) - np.asarray(x, dtype=np.float64)
        if len(batch) and z.shape[1] != a.shape[0]:
            raise ValueError("dimension mismatch in batch")
        vals = np.einsum("ij,ij->i", z @ a, z)
        return np.sqrt(np.clip(vals, 0.0, None))

    def _eval_pairwise(self, xs, ys):
        a = self.matrix.array
        z = np.asarray(xs, dtype=np.float64) - np.asarray(ys, dtype=np.float64)
        vals = np.einsum("ij,ij->i", z @ a, z)
        return np.sqrt(np.clip(vals, 0.0, None))


class AngularDistance(Distance):
    """Angle between two vectors as seen from the origin, in [0, pi].

    A pseudometric: rays through the origin are at distance 0.  Identical
    inputs return exactly 0; the cosine is clamped to [-1, 1] so near-parallel
    vectors cannot fall outside the arccos domain.
    """

    name = "angular"

    def _eval(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        _check_dims(x, y)
        nx = np.sqrt(x @ x)
        ny = np.sqrt(y @ y)
        if nx == 0.0 or ny == 0.0:
            raise ValueError("angular distance is undefined for the zero vector")
        if (x == y).all():
            return 0.0
        c = (x @ y) / (nx * ny)
        return float(np.arccos(np.clip(c, -1.0, 1.0)))

    def _eval_many(self, x, batch):
        x = np.asarray(x, dtype=np.float64)
        b = np.asarray(batch, dtype=np.float64)
        if len(batch) == 0:
            return np.zeros(0)
        nx = np.sqrt(x @ x)
        nb = np.sqrt((b * b).sum(axis=1))
        if nx == 0.0 or (nb == 0.0).any():
            raise ValueError("angular distance is undefined for the zero vector")
        c = (b @ x) / (nb * nx)
        out = np.arccos(np.clip(c, -1.0, 1.0))
        out[(b == x).all(axis=1)] = 0.0
        return out


class HammingSetDistance(Distance):
    """Cardinality of the symmetric difference of two sets."""

    name = "hamming"
    kind = "set"

    def _eval(self, x, y):
        return len(x ^ y)


class JaccardSetDistance(Distance):
    """Symmetric difference over union; 0 for two empty sets (d(x,x)=0)."""

    name = "jaccard"
    kind = "set"

    def _eval(self, x, y):
        union = x | y
        if not union:
            return 0.0
        return len(x ^ y) / len(union)


class LevenshteinDistance(Distance):
    """Unit-cost edit distance over Unicode scalar values."""

    name = "levenshtein"
    kind = "string"

    def _eval(self, s, t):
        if s == t:
            return 0
        if len(s) < len(t):
            s, t = t, s
        if not t:
            return len(s)
        prev = list(range(len(t) + 1))
        for i, cs in enumerate(s, 1):
            cur = [i]
            append = cur.append
            for j, ct in enumerate(t, 1):
                append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (cs != ct)))
            prev = cur
        return prev[-1]


class SqrtDistance(Distance):
    """Square root of a base distance.

    The square root of any metric satisfies Ptolemy's inequality, and the
    transform preserves distance orderings, so query results are unchanged.
    The evaluation counter is shared with the base distance: one call here is
    exactly one base evaluation.
    """

    def __init__(self, base: Distance):
        self.base = base
        self.name = f"sqrt({base.name})"

    @property
    def kind(self):
        return self.base.kind

    @property
    def calls(self):
        return self.base.calls

    def reset_calls(self):
        self.base.reset_calls()

    def clone(self):
        return SqrtDistance(self.base.clone())

    def __call__(self, x, y):
        return math.sqrt(self.base(x, y))

    def one_to_many(self, x, batch):
        return np.sqrt(self.base.one_to_many(x, batch))

    def pairwise(self, xs, ys):
        return np.sqrt(self.base.pairwise(xs, ys))


def sqrt_metric(base: Distance) -> SqrtDistance:
    return SqrtDistance(base)


def make_distance(name, qf_matrix=None) -> Distance:
    """Distance from a CLI-style name.

    Accepts ``l1``, ``l2``/``euclidean``, ``linf``, ``l<p>``, ``angular``,
    ``hamming``, ``jaccard``, ``levenshtein``, ``qf`` (requires ``qf_matrix``)
    and ``sqrt:<inner>``.
    """
    name = name.strip().lower()
    if name.startswith("sqrt:"):
        return sqrt_metric(make_distance(name[5:], qf_matrix))
    if name in ("euclidean", "l2"):
        return LpDistance(2)
    if name in ("linf", "chebyshev"):
        return LpDistance(math.inf)
    if name == "angular":
        return AngularDistance()
    if name == "hamming":
        return HammingSetDistance()
    if name == "jaccard":
        return JaccardSetDistance()
    if name == "levenshtein":
        return LevenshteinDistance()
    if name == "qf":
        if qf_matrix is None:
            raise ValueError("quadratic-form distance requires a matrix")
        return QuadraticFormDistance(qf_matrix)
    if name.startswith("l"):
        try:
            p = float(name[1:])
        except ValueError:
            raise ValueError(f"unknown distance: {name!r}") from None
        return LpDistance(p)
    raise ValueError(f"unknown distance: {name!r}")
