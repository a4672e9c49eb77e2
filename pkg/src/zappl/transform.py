"""Grid values <-> ZAPPL coefficients on simplex sparse grids.

The production path (:func:`hierarchize`, :func:`dehierarchize`,
:func:`to_raw_basis`) performs D one-dimensional passes.  Pass ``k`` treats
every pencil (the members of the set that differ only in coordinate ``k``) as
a short vector and multiplies it by the leading block of a lower-triangular
1-D matrix.  Because the 1-D matrices are triangular, every entry a pencil
needs is itself a member of the simplex, so no full tensor grid is formed.

:func:`dense_oracle`, :func:`hierarchize_full` and
:func:`verify_chop_identity` are reference routes used by tests and by
``zappl verify``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .basis1d import Zappl1D
from .index_set import SimplexIndexSet

DENSE_GUARD = 20000
CHOP_GUARD = 4096


@dataclass
class MultCounter:
    """Scalar multiplications performed inside the pencil products."""

    count: int = 0

    def add(self, n: int) -> None:
        self.count += int(n)


@lru_cache(maxsize=256)
def pencils(index_set: SimplexIndexSet, k: int) -> tuple[tuple[int, np.ndarray], ...]:
    """Pencils along dimension ``k`` (0-based), grouped by length.

    Returns ``(n, ranks)`` pairs; ``ranks`` has shape ``(P, n)`` and row ``p``
    lists the flat offsets of pencil ``p`` in order ``i_k = 1..n``.
    """
    D, b = index_set.D, index_set.b
    idx = index_set.indices
    heads = idx[idx[:, k] == 1]
    lengths = b - (heads.sum(axis=1) - D) + 1
    groups = []
    for n in range(1, b + 2):
        sel = heads[lengths == n]
        if not len(sel):
            continue
        full = np.repeat(sel[:, None, :], n, axis=1)
        full[:, :, k] = np.arange(1, n + 1)
        ranks = index_set.ranks(full.reshape(-1, D)).reshape(-1, n)
        ranks.setflags(write=False)
        groups.append((n, ranks))
    return tuple(groups)


def _apply_lower(V: np.ndarray, M: np.ndarray, counter: MultCounter | None) -> np.ndarray:
    # out[:, i] = sum_{a <= i} M[i, a] V[:, a]
    P, n = V.shape
    out = np.empty_like(V)
    for i in range(n):
        out[:, i] = V[:, : i + 1] @ M[i, : i + 1]
    if counter is not None:
        counter.add(P * n * (n + 1) // 2)
    return out


def _apply_upper(V: np.ndarray, M: np.ndarray, counter: MultCounter | None) -> np.ndarray:
    # out[:, j] = sum_{i >= j} M[j, i] V[:, i]
    P, n = V.shape
    out = np.empty_like(V)
    for j in range(n):
        out[:, j] = V[:, j:] @ M[j, j:]
    if counter is not None:
        counter.add(P * n * (n + 1) // 2)
    return out


def _check(data, axes: Sequence[Zappl1D], index_set: SimplexIndexSet) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    if data.shape != (index_set.size,):
        raise ValueError(
            f"vector of length {data.size} does not match index set size {index_set.size}"
        )
    if len(axes) != index_set.D:
        raise ValueError(f"{len(axes)} axes for a {index_set.D}-D index set")
    for k, z in enumerate(axes):
        if z.n < index_set.b + 1:
            raise ValueError(f"axis {k + 1} has {z.n} levels, need at least {index_set.b + 1}")
    return data


def _sweep(data, mats, index_set, counter, upper=False) -> np.ndarray:
    out = data.copy()
    apply = _apply_upper if upper else _apply_lower
    for k in range(index_set.D):
        for n, R in pencils(index_set, k):
            out[R] = apply(out[R], mats[k][:n, :n], counter)
    return out


def hierarchize(values, axes: Sequence[Zappl1D], index_set: SimplexIndexSet,
                counter: MultCounter | None = None) -> np.ndarray:
    """Coefficients ``C`` with ``sum_i C_i prod_k phi~_{i_k}(r_{a_k}) = f(r_a)``."""
    values = _check(values, axes, index_set)
    return _sweep(values, [z.Binv for z in axes], index_set, counter)


def dehierarchize(coeffs, axes: Sequence[Zappl1D], index_set: SimplexIndexSet,
                  counter: MultCounter | None = None) -> np.ndarray:
    """Grid values of the interpolant with ZAPPL coefficients ``coeffs``."""
    coeffs = _check(coeffs, axes, index_set)
    return _sweep(coeffs, [z.B for z in axes], index_set, counter)


def to_raw_basis(coeffs, axes: Sequence[Zappl1D], index_set: SimplexIndexSet,
                 counter: MultCounter | None = None) -> np.ndarray:
    """Coefficients of the same interpolant in the raw (non-ZAPPL) product basis.

    ``d_j = sum_{i >= j} C_i prod_k A_k[i_k, j_k]``; the simplex is closed under
    this map because every ``A_k`` is lower triangular.
    """
    coeffs = _check(coeffs, axes, index_set)
    return _sweep(coeffs, [z.A.T for z in axes], index_set, counter, upper=True)


def from_raw_basis(raw, axes: Sequence[Zappl1D], index_set: SimplexIndexSet) -> np.ndarray:
    raw = _check(raw, axes, index_set)
    n = index_set.b + 1
    inv_t = [
        solve_triangular(z.A[:n, :n], np.eye(n), lower=True, unit_diagonal=True).T
        for z in axes
    ]
    return _sweep(raw, inv_t, index_set, None, upper=True)


def hierarchize_full(values, axes: Sequence[Zappl1D], b: int) -> np.ndarray:
    """Tensor-grid transform over ``(b + 1)**D`` row-major values."""
    D = len(axes)
    n = b + 1
    values = np.asarray(values, dtype=float)
    if values.size != n**D:
        raise ValueError(f"expected {n**D} full-grid values, got {values.size}")
    T = values.reshape((n,) * D)
    for k, z in enumerate(axes):
        T = np.moveaxis(np.tensordot(z.Binv[:n, :n], T, axes=([1], [k])), 0, k)
    return T.reshape(-1)


def chopping_matrix(index_set: SimplexIndexSet) -> np.ndarray:
    """Identity of size ``(b+1)**D`` with the columns of discarded functions deleted."""
    n_full = (index_set.b + 1) ** index_set.D
    return np.eye(n_full)[:, full_grid_offsets(index_set)]


def full_grid_offsets(index_set: SimplexIndexSet) -> np.ndarray:
    """Row-major position of each simplex member inside the ``(b+1)**D`` tensor grid."""
    n = index_set.b + 1
    return np.ravel_multi_index(tuple((index_set.indices - 1).T), (n,) * index_set.D)


def collocation_matrix(axes: Sequence[Zappl1D], index_set: SimplexIndexSet) -> np.ndarray:
    """``B[a, i] = prod_k phi~_{i_k}(r_{a_k})`` over the sparse grid."""
    n = index_set.b + 1
    idx = index_set.indices - 1
    B = np.ones((index_set.size, index_set.size))
    for k, z in enumerate(axes):
        phi = z.values(z.points.points[:n])  # phi[a, i]
        B *= phi[np.ix_(idx[:, k], idx[:, k])]
    return B


def dense_oracle(values, axes: Sequence[Zappl1D], index_set: SimplexIndexSet) -> np.ndarray:
    """Solve the full sparse collocation system with a dense LU."""
    values = _check(values, axes, index_set)
    if index_set.size > DENSE_GUARD:
        raise ValueError(f"dense oracle guard: {index_set.size} > {DENSE_GUARD} unknowns")
    B = collocation_matrix(axes, index_set)
    return np.linalg.solve(B, values)


def verify_chop_identity(axes: Sequence[Zappl1D], D: int, b: int) -> tuple[bool, float]:
    """Compare inv(C^T K C) with C^T inv(K) C for ``K = kron_k B_k``.

    Returns ``(ok, deviation)`` with the deviation scaled by the largest entry
    of the chop-then-invert result; ``ok`` means deviation <= 1e-12.
    """
    n = b + 1
    if n**D > CHOP_GUARD:
        raise ValueError(f"chop identity guard: (b+1)^D = {n**D} > {CHOP_GUARD}")
    if len(axes) != D:
        raise ValueError(f"{len(axes)} axes for D={D}")
    K = np.ones((1, 1))
    for z in axes:
        K = np.kron(K, z.B[:n, :n])
    keep = full_grid_offsets(SimplexIndexSet(D, b))
    # C^T M C == M[keep][:, keep] for the chopping matrix C = I[:, keep]
    chop_then_invert = np.linalg.inv(K[np.ix_(keep, keep)])
    invert_then_chop = np.linalg.inv(K)[np.ix_(keep, keep)]
    scale = float(np.max(np.abs(chop_then_invert)))
    deviation = float(np.max(np.abs(chop_then_invert - invert_then_chop))) / scale
    return deviation <= 1e-12, deviation


def write_vector_csv(path, index_set: SimplexIndexSet, data, meta: dict | None = None) -> None:
    """``offset, i_1..i_D, value`` rows; optional JSON metadata on a ``#`` line."""
    data = np.asarray(data, dtype=float)
    with open(path, "w") as fh:
        if meta is not None:
            fh.write("# " + json.dumps(meta) + "\n")
        for off, idx in enumerate(index_set.indices):
            fh.write(",".join([str(off), *map(str, idx), repr(float(data[off]))]) + "\n")


def read_vector_csv(path) -> tuple[np.ndarray, np.ndarray, dict | None]:
    """Returns ``(indices, data, meta)`` with rows sorted by offset."""
    meta = None
    rows = []
    for line in open(path).read().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            meta = json.loads(line[1:])
            continue
        rows.append(line.split(","))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    offsets = np.array([int(r[0]) for r in rows])
    if sorted(offsets.tolist()) != list(range(len(rows))):
        raise ValueError(f"{path}: offsets are not a permutation of 0..{len(rows) - 1}")
    order = np.argsort(offsets)
    idx = np.array([[int(v) for v in r[1:-1]] for r in rows], dtype=np.int64)[order]
    data = np.array([float(r[-1]) for r in rows])[order]
    return idx, data, meta
