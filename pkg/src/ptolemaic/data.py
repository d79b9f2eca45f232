"""Dataset containers and their plain-text file formats.

A :class:`DataSet` is a homogeneous collection of objects -- vectors, sets or
strings -- addressed by stable integer ids ``0..n-1``.  Vectors are stored as
one ``(n, dim)`` float64 array; sets as frozensets over a universe
``{0..universe-1}``; strings as plain ``str``.
"""

from __future__ import annotations

import numpy as np

VECTOR = "vector"
SET = "set"
STRING = "string"


class DataSet:
    """Homogeneous object collection with stable integer ids."""

    def __init__(self, kind, payload, universe=None, meta=None):
        if kind not in (VECTOR, SET, STRING):
            raise ValueError(f"unknown dataset kind: {kind!r}")
        self.kind = kind
        self.meta = dict(meta) if meta else {}
        if kind == VECTOR:
            arr = np.asarray(payload, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[1] < 1:
                raise ValueError("vector data must be a 2-d array with dim >= 1")
            if not np.isfinite(arr).all():
                raise ValueError("vector coordinates must be finite")
            self._objects = arr
        elif kind == SET:
            if universe is None or universe < 1:
                raise ValueError("set data requires a universe size >= 1")
            self.universe = int(universe)
            sets = []
            for s in payload:
                fs = frozenset(int(e) for e in s)
                if fs and (min(fs) < 0 or max(fs) >= self.universe):
                    raise ValueError(f"set element outside universe of size {self.universe}")
                sets.append(fs)
            self._objects = sets
        else:
            self._objects = [str(s) for s in payload]

    @classmethod
    def from_vectors(cls, arr, meta=None):
        return cls(VECTOR, arr, meta=meta)

    @classmethod
    def from_sets(cls, sets, universe, meta=None):
        return cls(SET, sets, universe=universe, meta=meta)

    @classmethod
    def from_strings(cls, strings, meta=None):
        return cls(STRING, strings, meta=meta)

    def __len__(self):
        return len(self._objects)

    @property
    def dim(self):
        """Vector dimension (vector datasets only)."""
        if self.kind != VECTOR:
            raise AttributeError("dim is only defined for vector datasets")
        return self._objects.shape[1]

    @property
    def vectors(self):
        if self.kind != VECTOR:
            raise AttributeError("vectors is only defined for vector datasets")
        return self._objects

    def get(self, i):
        """Object with id ``i``."""
        return self._objects[i]

    def objects(self, ids=None):
        """Batch view of the objects with the given ids (all by default).

        For vectors this is a row-indexed array; for sets and strings a list.
        The result is suitable for ``Distance.one_to_many``.
        """
        if ids is None:
            return self._objects
        if self.kind == VECTOR:
            return self._objects[np.asarray(ids, dtype=np.intp)]
        return [self._objects[i] for i in ids]

    def __eq__(self, other):
        if not isinstance(other, DataSet) or self.kind != other.kind:
            return NotImplemented if not isinstance(other, DataSet) else False
        if self.kind == VECTOR:
            return self._objects.shape == other._objects.shape and bool(
                (self._objects == other._objects).all()
            )
        if self.kind == SET:
            return self.universe == other.universe and self._objects == other._objects
        return self._objects == other._objects

    def save(self, path):
        """Write the dataset in its one-object-per-line text format."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_dataset(self))

    @classmethod
    def load(cls, path):
        """Read a dataset written by :meth:`save` (kind taken from the header)."""
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        return parse_dataset(text)


def _header_line(kind, meta):
    # "kind" is the format's own key; a meta entry must not shadow it
    parts = [f"kind={kind}"] + [f"{k}={v}" for k, v in meta.items() if k != "kind"]
    return "# " + " ".join(parts)


def _parse_header(line):
    meta = {}
    for tok in line.lstrip("#").split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            meta[k] = v
    return meta


def format_dataset(data: DataSet) -> str:
    """Dataset text format: '#' header line, then one object per line.

    Vectors use ``repr`` floats (shortest round-trip), so writing the same
    dataset twice is byte-identical and loading recovers the exact doubles.
    """
    meta = dict(data.meta)
    if data.kind == SET:
        meta.setdefault("universe", data.universe)
    lines = [_header_line(data.kind, meta)]
    if data.kind == VECTOR:
        for row in data.vectors:
            lines.append(" ".join(repr(float(v)) for v in row))
    elif data.kind == SET:
        for s in data._objects:
            lines.append(" ".join(str(e) for e in sorted(s)))
    else:
        lines.extend(data._objects)
    return "\n".join(lines) + "\n"


def parse_dataset(text: str) -> DataSet:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty dataset file")
    meta = {}
    if lines[0].startswith("#"):
        meta = _parse_header(lines[0])
        lines = lines[1:]
    kind = meta.pop("kind", VECTOR)
    if kind == VECTOR:
        rows = [[float(t) for t in ln.split()] for ln in lines if ln.strip()]
        if not rows:
            raise ValueError("no objects in dataset file")
        return DataSet(VECTOR, np.array(rows, dtype=np.float64), meta=meta)
    if kind == SET:
        universe = int(meta.pop("universe"))
        sets = [[int(t) for t in ln.split()] for ln in lines]
        return DataSet(SET, sets, universe=universe, meta=meta)
    if kind == STRING:
        return DataSet(STRING, lines, meta=meta)
    raise ValueError(f"unknown dataset kind in header: {kind!r}")


def save_matrix(arr, path):
    """Write a k x k real matrix, one row per line, repr floats."""
    arr = np.asarray(arr, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in arr:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_matrix(path):
    with open(path, "r", encoding="utf-8") as fh:
        rows = [[float(t) for t in ln.split()] for ln in fh if ln.strip()]
    arr = np.array(rows, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"matrix file {path} is not square")
    return arr
