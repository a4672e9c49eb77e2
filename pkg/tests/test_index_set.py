import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zappl.basis1d import PointSequence
from zappl.index_set import (
    SimplexIndexSet,
    SparseGrid,
    enumerate_indices,
    grid_points,
    read_grid_csv,
    size,
)


@pytest.mark.parametrize("D, b, expected", [(3, 4, 35), (2, 4, 15), (5, 0, 1), (4, 3, 35)])
def test_size(D, b, expected):
    assert size(D, b) == expected


def test_size_rejects_bad_args():
    with pytest.raises(ValueError):
        size(0, 3)
    with pytest.raises(ValueError):
        size(2, -1)


@pytest.mark.parametrize(
    "D, b, expected",
    [
        (2, 1, [(1, 1), (2, 1), (1, 2)]),
        (1, 3, [(1,), (2,), (3,), (4,)]),
        (3, 1, [(1, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2)]),
    ],
)
def test_enumerate_examples(D, b, expected):
    assert enumerate_indices(D, b) == expected


def graded_colex_key(idx):
    return (sum(idx), tuple(reversed(idx)))


@pytest.mark.parametrize("D", range(1, 7))
@pytest.mark.parametrize("b", range(0, 10))
def test_enumerate_exhaustive(D, b):
    got = enumerate_indices(D, b)
    brute = sorted(
        (i for i in itertools.product(range(1, b + 2), repeat=D) if sum(i) - D <= b),
        key=graded_colex_key,
    )
    assert got == brute
    assert len(got) == comb(D + b, D)
    s = SimplexIndexSet(D, b)
    assert all(s.rank(i) == r for r, i in enumerate(got))
    assert all(s.unrank(r) == i for r, i in enumerate(got))
    assert np.array_equal(s.ranks(s.indices), np.arange(s.size))
    levels = s.indices.sum(axis=1)
    assert np.all(np.diff(levels) >= 0)


def test_rank_unrank_examples():
    s = SimplexIndexSet(2, 1)
    assert s.rank((1, 2)) == 2
    assert s.unrank(0) == (1, 1)
    s34 = SimplexIndexSet(3, 4)
    assert [s34.rank(s34.unrank(o)) for o in range(35)] == list(range(35))


def test_rank_errors():
    s = SimplexIndexSet(2, 1)
    with pytest.raises(KeyError):
        s.rank((2, 2))
    with pytest.raises(KeyError):
        s.rank((0, 1))
    with pytest.raises(IndexError):
        s.unrank(3)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8), st.integers(0, 12), st.data())
def test_rank_roundtrip_property(D, b, data):
    s = SimplexIndexSet(D, b)
    off = data.draw(st.integers(0, s.size - 1))
    idx = s.unrank(off)
    assert idx in s
    assert s.rank(idx) == off


def test_grid_points_examples():
    ax = PointSequence([0.0, -1.0])
    g = SparseGrid(SimplexIndexSet(2, 1), (ax, ax))
    assert grid_points(g).tolist() == [[0.0, 0.0], [-1.0, 0.0], [0.0, -1.0]]
    g1 = SparseGrid(SimplexIndexSet(1, 2), (PointSequence([0.0, -1.0, 1.0]),))
    assert grid_points(g1).tolist() == [[0.0], [-1.0], [1.0]]
    ax4 = PointSequence([0.0, 1.0, -1.0, 0.5])
    assert len(grid_points(SparseGrid(SimplexIndexSet(4, 3), (ax4,) * 4))) == 35


def test_grid_axis_too_short():
    with pytest.raises(ValueError, match="too short"):
        SparseGrid(SimplexIndexSet(2, 2), (PointSequence([0.0, 1.0]),) * 2)


def test_grid_csv(tmp_path):
    ax = PointSequence([0.0, -1.0, 1.0 / 3.0])
    g = SparseGrid(SimplexIndexSet(2, 2), (ax, ax))
    path = tmp_path / "grid.csv"
    g.to_csv(path)
    lines = path.read_text().splitlines()
    assert len(lines) == 6
    assert lines[1] == "1,2,1,-1.0,0.0"
    idx, pts = read_grid_csv(path)
    assert np.array_equal(idx, g.index_set.indices)
    assert pts.tobytes() == g.points().tobytes()
