"""Simplex multi-index sets ``{i : |i - 1|_1 <= b}`` and their sparse grids.

Indices are 1-based tuples.  Storage order is graded colexicographic: level
sum ascending, ties broken by comparing the last coordinate first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Sequence

import numpy as np

from .basis1d import PointSequence


def size(D: int, b: int) -> int:
    """Number of multi-indices with ``sum(i_k - 1) <= b``: ``C(D + b, D)``."""
    if D < 1 or b < 0:
        raise ValueError(f"need D >= 1 and b >= 0, got D={D}, b={b}")
    return comb(D + b, D)


def _compositions(total: int, parts: int):
    # colex order: last part varies slowest
    if parts == 1:
        yield (total,)
        return
    for last in range(total + 1):
        for head in _compositions(total - last, parts - 1):
            yield head + (last,)


def enumerate_indices(D: int, b: int) -> list[tuple[int, ...]]:
    size(D, b)
    out = []
    for s in range(b + 1):
        out.extend(tuple(e + 1 for e in comp) for comp in _compositions(s, D))
    return out


class SimplexIndexSet:
    """The set ``{i in N^D : |i - 1|_1 <= b}`` with rank/unrank to flat storage."""

    def __init__(self, D: int, b: int):
        self.D = int(D)
        self.b = int(b)
        self.size = size(self.D, self.b)

    def __repr__(self) -> str:
        return f"SimplexIndexSet(D={self.D}, b={self.b}, size={self.size})"

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplexIndexSet) and (self.D, self.b) == (other.D, other.b)

    def __hash__(self) -> int:
        return hash((self.D, self.b))

    def __contains__(self, idx) -> bool:
        idx = tuple(idx)
        return (
            len(idx) == self.D
            and all(int(v) >= 1 for v in idx)
            and sum(int(v) - 1 for v in idx) <= self.b
        )

    @cached_property
    def indices(self) -> np.ndarray:
        """``(size, D)`` int array of members in rank order."""
        arr = np.array(enumerate_indices(self.D, self.b), dtype=np.int64).reshape(-1, self.D)
        arr.setflags(write=False)
        return arr

    def __iter__(self):
        return iter(enumerate_indices(self.D, self.b))

    def _level_offset(self, s: int) -> int:
        # members with level sum < s
        return comb(self.D + s - 1, self.D) if s > 0 else 0

    def rank(self, idx: Sequence[int]) -> int:
        if idx not in self:
            raise KeyError(f"{tuple(idx)} is not in {self!r}")
        e = [int(v) - 1 for v in idx]
        s = sum(e)
        r = self._level_offset(s)
        rem = s
        for k in range(self.D - 1, 0, -1):
            # compositions of rem into k + 1 parts whose last part is < e[k]
            r += comb(rem + k, k) - comb(rem - e[k] + k, k)
            rem -= e[k]
        return r

    def unrank(self, offset: int) -> tuple[int, ...]:
        if not 0 <= offset < self.size:
            raise IndexError(f"offset {offset} out of range 0..{self.size - 1}")
        s = 0
        while self._level_offset(s + 1) <= offset:
            s += 1
        r = offset - self._level_offset(s)
        e = [0] * self.D
        rem = s
        for k in range(self.D - 1, 0, -1):
            base = comb(rem + k, k)
            t = 0
            # largest t whose block of smaller-last-part compositions fits in r
            while base - comb(rem - (t + 1) + k, k) <= r:
                t += 1
            r -= base - comb(rem - t + k, k)
            e[k] = t
            rem -= t
        e[0] = rem
        return tuple(v + 1 for v in e)

    def ranks(self, idx: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`rank` over rows of an int array (no membership check)."""
        e = np.asarray(idx, dtype=np.int64) - 1
        s = e.sum(axis=1)
        table = _binom_table(self.D + self.b + 1)
        r = np.where(s > 0, table[np.maximum(self.D + s - 1, 0), self.D], 0)
        rem = s.copy()
        for k in range(self.D - 1, 0, -1):
            r = r + table[rem + k, k] - table[rem - e[:, k] + k, k]
            rem = rem - e[:, k]
        return r


def _binom_table(n: int) -> np.ndarray:
    t = np.zeros((n + 1, n + 1), dtype=np.int64)
    for i in range(n + 1):
        for j in range(i + 1):
            t[i, j] = comb(i, j)
    return t


@dataclass(frozen=True, eq=False)
class SparseGrid:
    index_set: SimplexIndexSet
    axes: tuple[PointSequence, ...]

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(axes) != self.index_set.D:
            raise ValueError(f"{len(axes)} axes for a {self.index_set.D}-D index set")
        for k, ax in enumerate(axes):
            if len(ax) < self.index_set.b + 1:
                raise ValueError(
                    f"axis {k + 1} too short: {len(ax)} points, need {self.index_set.b + 1}"
                )
        object.__setattr__(self, "axes", axes)

    def points(self) -> np.ndarray:
        return grid_points(self)

    def to_csv(self, path) -> None:
        idx = self.index_set.indices
        pts = self.points()
        with open(path, "w") as fh:
            for off in range(self.index_set.size):
                cols = [str(off)] + [str(v) for v in idx[off]] + [repr(float(x)) for x in pts[off]]
                fh.write(",".join(cols) + "\n")


def grid_points(grid: SparseGrid) -> np.ndarray:
    """``(size, D)`` array; row ``r`` is the point of the index with rank ``r``."""
    idx = grid.index_set.indices
    cols = [ax.points[idx[:, k] - 1] for k, ax in enumerate(grid.axes)]
    return np.stack(cols, axis=1) if cols else np.empty((idx.shape[0], 0))


def read_grid_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :meth:`SparseGrid.to_csv`: (indices, points)."""
    rows = [line.split(",") for line in open(path).read().splitlines() if line.strip()]
    D = (len(rows[0]) - 1) // 2
    idx = np.array([[int(v) for v in r[1 : 1 + D]] for r in rows], dtype=np.int64)
    pts = np.array([[float(v) for v in r[1 + D :]] for r in rows])
    return idx, pts
