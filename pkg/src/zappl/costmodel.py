"""Exact multiplication counts for the sequential transform and the separate-grids method.

All counts are Python integers, so the large-D tables (b = 14, D = 20) are
exact; only the ratio column is a float.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, fields
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .index_set import SimplexIndexSet, size


def n_mult_sequential(D: int, b: int) -> int:
    """Closed form ``D (b/(D+1) + 1) C(D+b, D)`` as an exact integer."""
    num = D * size(D, b) * (b + D + 1)
    q, r = divmod(num, D + 1)
    if r:
        raise ArithmeticError(f"non-integral sequential count for D={D}, b={b}")
    return q


def nested_sum_count(D: int, b: int) -> int:
    """Count of the sequential transform by literally running the nested sums.

    For pass ``k`` the outer sums run over the other D-1 coordinates (already
    transformed ``i`` before ``k``, untransformed ``a`` after it), each bounded
    by what is left of the budget; the inner sums are
    ``sum_{i_k=1}^{i_k max} sum_{a_k=1}^{i_k} 1``.
    """
    if D < 1 or b < 0:
        raise ValueError(f"need D >= 1 and b >= 0, got D={D}, b={b}")

    def outer(depth: int, used: int) -> int:
        if depth == D - 1:
            i_max = b - used + 1
            count = 0
            for i_k in range(1, i_max + 1):
                for _a_k in range(1, i_k + 1):
                    count += 1
            return count
        total = 0
        for v in range(1, b - used + 2):
            total += outer(depth + 1, used + v - 1)
        return total

    # every pass sees the same limits; summed pass by pass for a literal count
    return sum(outer(0, 0) for _k in range(D))


def _levels_power_sum(D: int, b: int, n: int) -> int:
    # sum over |l-1|_1 <= b of prod l_k^n via a truncated polynomial power
    one_dim = [(s + 1) ** n for s in range(b + 1)]
    poly = [1] + [0] * b
    for _ in range(D):
        nxt = [0] * (b + 1)
        for i, c in enumerate(poly):
            if c:
                for j in range(b + 1 - i):
                    nxt[i + j] += c * one_dim[j]
        poly = nxt
    return sum(poly)


def n_mult_separate(D: int, b: int, n: int) -> int:
    """``sum_{|l-1|_1 <= b} prod_k l_k^n`` for ``n`` in {2, 3}."""
    if n not in (2, 3):
        raise ValueError(f"exponent must be 2 or 3, got {n}")
    size(D, b)
    return _levels_power_sum(D, b, n)


def n_mult_separate_enumerated(D: int, b: int, n: int) -> int:
    """Same sum by enumerating the level set; only feasible for small sets."""
    levels = SimplexIndexSet(D, b).indices.astype(object)
    return int(sum(int(np.prod(row**n)) for row in levels))


@dataclass
class CountCheck:
    D: int
    b: int
    measured: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.measured == self.expected

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return f"{verdict} D={self.D} b={self.b} measured={self.measured} formula={self.expected}"


def count_verify(D: int, b: int, axes=None, rng=None) -> CountCheck:
    """Run an instrumented hierarchization and compare with the closed form."""
    from .basis1d import BasisFamily, make_axis
    from .transform import MultCounter, hierarchize

    if axes is None:
        axes = [make_axis(BasisFamily(), b + 1)] * D
    index_set = SimplexIndexSet(D, b)
    rng = np.random.default_rng(0) if rng is None else rng
    counter = MultCounter()
    hierarchize(rng.standard_normal(index_set.size), axes, index_set, counter)
    return CountCheck(D, b, counter.count, n_mult_sequential(D, b))


@dataclass
class CostRow:
    D: int
    b: int
    N_sparse: int
    N_full: int
    N_mult_seq: int
    N_sep_mvp: int
    N_sep_inv: int
    N_sep_total: int
    ratio: float


class CostReport(list):
    """Rows of :class:`CostRow`, one per ``(D, b)``."""

    columns = [f.name for f in fields(CostRow)]

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO() if fh is None else fh
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self:
            rec = asdict(row)
            writer.writerow([repr(rec[c]) if c == "ratio" else rec[c] for c in self.columns])
        return buf.getvalue() if fh is None else ""

    @classmethod
    def from_csv(cls, text: str) -> "CostReport":
        reader = csv.DictReader(io.StringIO(text))
        out = cls()
        for rec in reader:
            out.append(CostRow(**{
                c: (float(rec[c]) if c == "ratio" else int(rec[c])) for c in cls.columns
            }))
        return out

    def select(self, b: int) -> list[CostRow]:
        return [r for r in self if r.b == b]


def cost_row(D: int, b: int) -> CostRow:
    seq = n_mult_sequential(D, b)
    mvp = n_mult_separate(D, b, 2)
    inv = n_mult_separate(D, b, 3)
    return CostRow(D, b, size(D, b), (b + 1) ** D, seq, mvp, inv, mvp + inv, (mvp + inv) / seq)


def sweep(D_range: Iterable[int], b_list: Sequence[int]) -> CostReport:
    D_range = list(D_range)
    if not D_range or not b_list:
        raise ValueError("empty D range or b list")
    return CostReport(cost_row(D, b) for b in b_list for D in D_range)
