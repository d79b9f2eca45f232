"""Lower and upper bounds on distances via pivots.

Pure arithmetic, no index state.  Two families:

* triangular bounds, valid for any metric: ``qo >= |qp - op|``;
* Ptolemaic bounds, valid whenever the distance satisfies Ptolemy's
  inequality ``xv*yu <= xy*uv + xu*yv`` (Euclidean and quadratic-form
  distances do, as does the square root of any metric):
  ``qo >= |qp*os - qs*op| / ps`` for any pivot pair (p, s).

Interval variants take the object-pivot distances as ranges [lo, hi]
(e.g. an object somewhere inside a covering ball) and return a range
guaranteed to contain the true distance.

All lower bounds clamp at 0 except ``shell_lower``, whose sign is
meaningful to callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class DistanceInterval:
    """A closed range [lo, hi] known to contain a distance."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")
        if math.isinf(self.hi):
            raise ValueError("interval hi must be finite (use a declared maximum)")

    @classmethod
    def exact(cls, value):
        return cls(value, value)


def tri_lower(qp, op):
    """Triangular lower bound on d(q,o) from one pivot: |qp - op|."""
    return abs(qp - op)


def tri_interval(qp: DistanceInterval, op: DistanceInterval) -> DistanceInterval:
    """Triangular range for d(q,o) when qp and op are only known as intervals."""
    lo = max(op.lo - qp.hi, qp.lo - op.hi, 0.0)
    return DistanceInterval(lo, qp.hi + op.hi)


def pto_lower(qp, qs, op, os, ps):
    """Ptolemaic lower bound on d(q,o) from the pivot pair (p, s).

    Both labelings of the pair are covered by the absolute value, so
    callers need each unordered pair only once.
    """
    if ps <= 0.0:
        raise ValueError("coincident pivots (ps = 0); caller must skip this pair")
    return max(abs(qp * os - qs * op) / ps, 0.0)


def pto_interval(qp, qs, ps, op: DistanceInterval, os: DistanceInterval) -> DistanceInterval:
    """Ptolemaic range for d(q,o) with op and os known as intervals.

    ``qp`` and ``qs`` are exact (the query is in hand).  ``ps`` may be exact
    or itself a DistanceInterval; with an interval, the lower bound divides
    by ps.hi and the upper bound by ps.lo, which must be positive.
    """
    if isinstance(ps, DistanceInterval):
        ps_lo, ps_hi = ps.lo, ps.hi
    else:
        ps_lo = ps_hi = float(ps)
    if ps_hi <= 0.0:
        raise ValueError("coincident pivots (ps = 0); caller must skip this pair")
    lo = max(qs * op.lo - qp * os.hi, qp * os.lo - qs * op.hi, 0.0) / ps_hi
    if ps_lo <= 0.0:
        raise ValueError("upper bound undefined: ps interval reaches 0")
    hi = (qp * os.hi + qs * op.hi) / ps_lo
    # a positive lo always comes with a larger hi, so the pair is ordered
    return DistanceInterval(lo, hi)


def shell_lower(qp, qs, ps, r):
    """Lower bound on d(q,o) for o inside the ball around p with radius r,
    using a second pivot s: qp - r*(qp + qs)/ps.

    May be negative (then it carries no information); callers clamp.  When q
    lies between the pivots (ps = qp + qs) this equals qp - r, the plain
    ball-overlap test.
    """
    if ps <= 0.0:
        raise ValueError("coincident pivots (ps = 0); caller must skip this pair")
    return qp - r * (qp + qs) / ps


def tri_lower_best(qpiv, opiv):
    """Best triangular bound over all pivots: max_j |qpiv[j] - opiv[j]|."""
    best = 0.0
    for qp, op in zip(qpiv, opiv):
        b = abs(qp - op)
        if b > best:
            best = b
    return best


def pto_lower_best(qpiv, opiv, pivpiv, pairs):
    """Best Ptolemaic bound over the given pivot pairs.

    ``pairs`` is a sequence of index pairs (j, l); coincident pairs
    (pivpiv[j][l] = 0) are skipped rather than raising, since a pair list
    over a real pivot set may contain them only through caller error.
    """
    best = 0.0
    for j, l in pairs:
        ps = pivpiv[j][l]
        if ps <= 0.0:
            continue
        b = abs(qpiv[j] * opiv[l] - qpiv[l] * opiv[j]) / ps
        if b > best:
            best = b
    return best


def all_pairs(m):
    """All unordered pivot index pairs (j, l), j < l."""
    return [(j, l) for j in range(m) for l in range(j + 1, m)]


def consecutive_pairs(m):
    """The m - 1 pairs of consecutive pivots: (0,1), (1,2), ...

    The cheap alternative to the full quadratic sweep; with one pivot there
    are no pairs and the bound is always 0.
    """
    return [(j, j + 1) for j in range(m - 1)]
