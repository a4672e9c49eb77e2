"""Evaluation of the sparse interpolant and the separate-grids baseline."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .basis1d import BasisFamily, PointSequence, Zappl1D
from .index_set import SimplexIndexSet


@dataclass(frozen=True, eq=False)
class Interpolant:
    coeffs: np.ndarray
    axes: tuple[Zappl1D, ...]
    index_set: SimplexIndexSet

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        axes = tuple(self.axes)
        if coeffs.shape != (self.index_set.size,):
            raise ValueError(f"{coeffs.size} coefficients for index set of size {self.index_set.size}")
        if len(axes) != self.index_set.D:
            raise ValueError(f"{len(axes)} axes for a {self.index_set.D}-D index set")
        if any(z.n < self.index_set.b + 1 for z in axes):
            raise ValueError(f"every axis needs at least {self.index_set.b + 1} levels")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "axes", axes)

    @property
    def D(self) -> int:
        return self.index_set.D

    def __call__(self, x):
        X = np.asarray(x, dtype=float)
        if X.ndim == 2:
            return eval_many(self, X)
        return eval_interpolant(self, X)


def _check_domain(itp: Interpolant, X: np.ndarray) -> None:
    if X.shape[-1] != itp.D:
        raise ValueError(f"points have {X.shape[-1]} coordinates, interpolant has D={itp.D}")
    for k, z in enumerate(itp.axes):
        if not z.family.contains(X[..., k]):
            raise ValueError(
                f"coordinate {k + 1} outside domain [{z.family.lo}, {z.family.hi}]"
            )


def eval_many(itp: Interpolant, X: np.ndarray) -> np.ndarray:
    """Interpolant at each row of ``X`` (shape ``(P, D)``)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    _check_domain(itp, X)
    n = itp.index_set.b + 1
    idx = itp.index_set.indices - 1
    prod_vals = np.ones((X.shape[0], itp.index_set.size))
    for k, z in enumerate(itp.axes):
        # each 1-D value phi~_i(x_k) is computed once and gathered over the set
        phi = z.values(X[:, k])[:, :n]
        prod_vals *= phi[:, idx[:, k]]
    return prod_vals @ itp.coeffs


def eval_interpolant(itp: Interpolant, x) -> float:
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(eval_many(itp, x)[0])


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def cardinal_values(nodes: np.ndarray, x: float) -> np.ndarray:
    """Values at ``x`` of the Lagrange polynomials on ``nodes`` (barycentric form)."""
    hit = np.flatnonzero(nodes == x)
    if hit.size:
        out = np.zeros(nodes.size)
        out[hit[0]] = 1.0
        return out
    t = barycentric_weights(nodes) / (x - nodes)
    return t / t.sum()


@dataclass(frozen=True, eq=False)
class DeltaBaseline:
    """Smolyak sum of tensor products of 1-D differences ``U^l - U^(l-1)``.

    Each ``U^m`` interpolates on the first ``m`` nested points with the
    cardinal functions of the span of the first ``m`` basis functions.  Both
    supported families span the polynomials of degree < m, so those cardinal
    functions are the Lagrange polynomials and are evaluated barycentrically,
    without touching the ZAPPL matrices.
    """

    axes: tuple[PointSequence, ...]
    family: BasisFamily
    b: int
    values: np.ndarray

    def __post_init__(self):
        axes = tuple(self.axes)
        index_set = SimplexIndexSet(len(axes), self.b)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (index_set.size,) or not np.all(np.isfinite(values)):
            raise ValueError("missing sample: need one finite value per sparse grid point")
        if any(len(ax) < self.b + 1 for ax in axes):
            raise ValueError(f"every axis needs at least {self.b + 1} points")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)

    @property
    def index_set(self) -> SimplexIndexSet:
        return SimplexIndexSet(len(self.axes), self.b)


def _tensor_interp(base: DeltaBaseline, m: tuple[int, ...], x: np.ndarray) -> float:
    index_set = base.index_set
    grid = np.stack(np.meshgrid(*[np.arange(1, mk + 1) for mk in m], indexing="ij"), axis=-1)
    T = base.values[index_set.ranks(grid.reshape(-1, len(m)))].reshape(m)
    for k in reversed(range(len(m))):
        T = T @ cardinal_values(base.axes[k].points[: m[k]], float(x[k]))
    return float(T)


def eval_delta_baseline(base: DeltaBaseline, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    D = len(base.axes)
    if x.size != D:
        raise ValueError(f"point has {x.size} coordinates, baseline has D={D}")
    if not all(base.family.contains(xk) for xk in x):
        raise ValueError("point outside the tensor domain")
    cache: dict[tuple[int, ...], float] = {}
    total = 0.0
    for level in base.index_set:
        for z in product((0, 1), repeat=D):
            m = tuple(l - s for l, s in zip(level, z))
            if min(m) == 0:
                continue  # U^0 = 0
            if m not in cache:
                cache[m] = _tensor_interp(base, m, x)
            total += (-1) ** sum(z) * cache[m]
    return total


def baseline_from_axes(axes: Sequence[Zappl1D], b: int, values) -> DeltaBaseline:
    return DeltaBaseline(tuple(z.points for z in axes), axes[0].family, b, values)
