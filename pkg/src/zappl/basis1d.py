"""Nested 1-D point sequences and ZAPPL basis functions.

A ZAPPL ("zero at points in previous levels") function of level ``i`` is a
combination of the first ``i`` raw basis functions that vanishes at the first
``i - 1`` points of a nested sequence and carries a unit coefficient on the
``i``-th raw function.  With one new point per level the collocation matrix
``B[a, i] = phi~_i(r_a)`` is lower triangular.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.polynomial import chebyshev as npcheb

N_LEJA_CANDIDATES = 10001
PIVOT_RTOL = 1e-10

_KIND_ALIASES = {
    "monomial": "monomial",
    "monomials": "monomial",
    "chebyshev": "chebyshev",
    "chebyshev-first-kind": "chebyshev",
    "cheb": "chebyshev",
}


class InsufficientCandidatesError(ValueError):
    pass


class DegenerateBasisError(ValueError):
    def __init__(self, level: int, pivot: float):
        self.level = level
        self.pivot = pivot
        super().__init__(
            f"degenerate point/basis pairing at level {level} (pivot {pivot:.3e})"
        )


@dataclass(frozen=True)
class BasisFamily:
    """Importance-ordered 1-D basis on ``[lo, hi]``; function 1 is the constant."""

    kind: str = "chebyshev"
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", _KIND_ALIASES[self.kind.lower()])
        except KeyError:
            raise ValueError(f"unknown basis family {self.kind!r}") from None
        if not self.hi > self.lo:
            raise ValueError(f"empty domain [{self.lo}, {self.hi}]")

    @classmethod
    def from_name(cls, name: str, lo: float = -1.0, hi: float = 1.0) -> "BasisFamily":
        return cls(name, lo, hi)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        slack = tol * (self.hi - self.lo)
        return bool(np.all((x >= self.lo - slack) & (x <= self.hi + slack)))

    def _reference(self, x: np.ndarray) -> np.ndarray:
        # affine map of [lo, hi] onto [-1, 1]
        return (2.0 * x - (self.lo + self.hi)) / (self.hi - self.lo)

    def vander(self, x, n: int) -> np.ndarray:
        """Matrix with ``V[p, j-1] = phi_j(x_p)`` for ``j = 1..n``."""
        t = self._reference(np.atleast_1d(np.asarray(x, dtype=float)))
        if n == 0:
            return np.empty((t.size, 0))
        if self.kind == "monomial":
            return np.vander(t, n, increasing=True)
        return npcheb.chebvander(t, n - 1)

    def eval(self, j: int, x) -> np.ndarray | float:
        if j < 1:
            raise IndexError(f"basis index {j} must be >= 1")
        out = self.vander(x, j)[:, j - 1]
        return float(out[0]) if np.ndim(x) == 0 else out


@dataclass(frozen=True, eq=False)
class PointSequence:
    """Nested points: the first ``m`` entries are the level-``m`` point set."""

    points: np.ndarray
    generator: str = "user-supplied"

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1)
        if pts.size and len(np.unique(pts)) != pts.size:
            raise ValueError("point sequence contains repeated points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    def __getitem__(self, item):
        return self.points[item]

    def head(self, n: int) -> "PointSequence":
        if n > len(self):
            raise ValueError(f"sequence has {len(self)} points, {n} requested")
        return PointSequence(self.points[:n], self.generator)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            for x in self.points:
                fh.write(repr(float(x)) + "\n")

    @classmethod
    def from_csv(cls, path) -> "PointSequence":
        text = Path(path).read_text().split()
        return cls(np.array([float(tok) for tok in text]), "user-supplied")


def leja_candidates(family: BasisFamily, count: int = N_LEJA_CANDIDATES) -> np.ndarray:
    """Chebyshev-Lobatto candidates on the family domain, ascending."""
    theta = np.pi * np.arange(count - 1, -1, -1) / (count - 1)
    half = 0.5 * (family.hi - family.lo)
    cand = family.midpoint + half * np.cos(theta)
    cand[0], cand[-1] = family.lo, family.hi
    return cand


def default_seed(family: BasisFamily) -> float:
    return family.midpoint


def make_leja_points(
    family: BasisFamily,
    n: int,
    seed_point: float | None = None,
    candidates: np.ndarray | None = None,
) -> PointSequence:
    """Greedy Leja sequence over a fixed candidate grid.

    ``r_1`` is the seed; each further point maximizes the product of distances
    to the points already chosen.  Ties go to the smallest candidate.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    seed = default_seed(family) if seed_point is None else float(seed_point)
    if not family.contains(seed):
        raise ValueError(f"seed point {seed} outside [{family.lo}, {family.hi}]")
    cand = leja_candidates(family) if candidates is None else np.sort(candidates)
    if n > cand.size:
        raise InsufficientCandidatesError(
            f"insufficient candidates: {n} points requested, {cand.size} candidates"
        )

    chosen = [seed]
    # log of the distance product; -inf marks candidates already taken
    logprod = np.zeros_like(cand)
    with np.errstate(divide="ignore"):
        logprod += np.log(np.abs(cand - seed))
        for _ in range(1, n):
            k = int(np.argmax(logprod))
            if not np.isfinite(logprod[k]):
                raise InsufficientCandidatesError(
                    "insufficient candidates: every candidate already chosen"
                )
            x = float(cand[k])
            chosen.append(x)
            logprod += np.log(np.abs(cand - x))
    return PointSequence(np.array(chosen), "leja")


@dataclass(frozen=True, eq=False)
class Zappl1D:
    family: BasisFamily
    points: PointSequence
    A: np.ndarray
    B: np.ndarray
    Binv: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def values(self, x) -> np.ndarray:
        """All ZAPPL functions at ``x``: shape ``(len(x), n)``."""
        return self.family.vander(x, self.n) @ self.A.T

    def _check_index(self, i: int, what: str = "basis index") -> None:
        if not 1 <= i <= self.n:
            raise IndexError(f"{what} {i} out of range 1..{self.n}")


def build_zappl(family: BasisFamily, points: PointSequence, n: int | None = None) -> Zappl1D:
    """Change-of-basis and collocation matrices for the first ``n`` levels."""
    n = len(points) if n is None else n
    if n < 1 or n > len(points):
        raise ValueError(f"need 1 <= n <= {len(points)}, got {n}")
    r = points.points[:n]
    V = family.vander(r, n)
    vmax = float(np.max(np.abs(V)))
    A = np.zeros((n, n))
    B = np.zeros((n, n))
    Binv = np.zeros((n, n))
    for i in range(n):
        if i:
            # phi_i at earlier points, expressed in the ZAPPL functions built so far;
            # the leading block of Binv is the inverse of the leading block of B
            c = Binv[:i, :i] @ V[:i, i]
            A[i, :i] = -(c @ A[:i, :i])
        A[i, i] = 1.0
        B[i:, i] = V[i:, : i + 1] @ A[i, : i + 1]
        if abs(B[i, i]) < PIVOT_RTOL * vmax:
            raise DegenerateBasisError(i + 1, float(B[i, i]))
        Binv[i, :i] = -(B[i, :i] @ Binv[:i, :i]) / B[i, i]
        Binv[i, i] = 1.0 / B[i, i]
    for m in (A, B, Binv):
        m.setflags(write=False)
    return Zappl1D(family, points.head(n), A, B, Binv)


def eval_zappl(z: Zappl1D, i: int, x):
    """``phi~_i(x) = sum_{j<=i} A[i, j] phi_j(x)``."""
    z._check_index(i)
    out = z.family.vander(x, i) @ z.A[i - 1, :i]
    return float(out[0]) if np.ndim(x) == 0 else out


def lagrange_type(z: Zappl1D, a: int, x):
    """Cardinal function centred on point ``a``: ``sum_j Binv[j, a] phi~_j(x)``."""
    z._check_index(a, "point index")
    out = z.values(x) @ z.Binv[:, a - 1]
    return float(out[0]) if np.ndim(x) == 0 else out


def make_axis(
    family: BasisFamily,
    n: int,
    points: PointSequence | None = None,
    seed_point: float | None = None,
) -> Zappl1D:
    """Leja points (unless supplied) plus the ZAPPL bundle on them."""
    if points is None:
        points = make_leja_points(family, n, seed_point)
    return build_zappl(family, points, n)
