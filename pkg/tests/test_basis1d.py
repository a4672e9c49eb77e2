import math

import numpy as np
import pytest

from zappl.basis1d import (
    BasisFamily,
    DegenerateBasisError,
    InsufficientCandidatesError,
    PointSequence,
    build_zappl,
    eval_zappl,
    lagrange_type,
    leja_candidates,
    make_axis,
    make_leja_points,
)

MONO = BasisFamily("monomial")
CHEB = BasisFamily("chebyshev")


@pytest.fixture
def mono3():
    return build_zappl(MONO, PointSequence([0.0, 1.0, -1.0]))


def brute_force_leja(candidates, seed, n):
    """Plain-Python greedy maximisation, smallest candidate wins ties."""
    pts = [seed]
    for _ in range(1, n):
        best, best_val = None, -1.0
        for x in sorted(candidates):
            val = math.prod(abs(x - r) for r in pts)
            if val > best_val:
                best, best_val = x, val
        pts.append(best)
    return pts


def test_leja_seed_only():
    assert make_leja_points(MONO, 1, 0.0).points.tolist() == [0.0]


@pytest.mark.parametrize("n, expected", [(2, [0.0, -1.0]), (3, [0.0, -1.0, 1.0])])
def test_leja_small_cases(n, expected):
    cand = leja_candidates(MONO).tolist()
    assert brute_force_leja(cand, 0.0, n) == expected
    assert make_leja_points(MONO, n, 0.0).points.tolist() == expected


def test_leja_matches_brute_force_on_small_candidate_set():
    cand = np.linspace(-1, 1, 41)
    fast = make_leja_points(MONO, 12, 0.3, candidates=cand).points.tolist()
    assert fast == brute_force_leja(cand.tolist(), 0.3, 12)


def test_leja_deterministic():
    a = make_leja_points(CHEB, 30, 0.0).points
    b = make_leja_points(CHEB, 30, 0.0).points
    assert a.tobytes() == b.tobytes()


def test_leja_default_seed_is_midpoint():
    fam = BasisFamily("chebyshev", 2.0, 5.0)
    pts = make_leja_points(fam, 5).points
    assert pts[0] == 3.5
    assert np.all((pts >= 2.0) & (pts <= 5.0))
    assert len(set(pts.tolist())) == 5


def test_leja_errors():
    with pytest.raises(InsufficientCandidatesError, match="insufficient candidates"):
        make_leja_points(MONO, 5, 0.0, candidates=np.linspace(-1, 1, 4))
    with pytest.raises(ValueError):
        make_leja_points(MONO, 3, 2.0)


def test_build_zappl_hand_example(mono3):
    assert np.array_equal(mono3.A, [[1, 0, 0], [0, 1, 0], [0, -1, 1]])
    assert np.array_equal(mono3.B, [[1, 0, 0], [1, 1, 0], [1, -1, 2]])
    assert np.array_equal(mono3.Binv, [[1, 0, 0], [-1, 1, 0], [-1, 0.5, 0.5]])


def test_eval_zappl_examples(mono3):
    assert eval_zappl(mono3, 3, 2.0) == 2.0
    assert eval_zappl(mono3, 1, 0.37) == 1.0
    assert eval_zappl(mono3, 3, 1.0) == 0.0
    with pytest.raises(IndexError):
        eval_zappl(mono3, 4, 0.0)
    with pytest.raises(IndexError):
        eval_zappl(mono3, 0, 0.0)


def test_lagrange_type_examples(mono3):
    assert lagrange_type(mono3, 1, 0.0) == 1.0
    assert lagrange_type(mono3, 1, 1.0) == 0.0
    assert lagrange_type(mono3, 3, 0.5) == pytest.approx(-0.125, abs=1e-15)
    with pytest.raises(IndexError):
        lagrange_type(mono3, 4, 0.0)


@pytest.mark.parametrize("family", [MONO, CHEB, BasisFamily("chebyshev", 0.0, 3.0)])
@pytest.mark.parametrize("n", [1, 2, 5, 10, 16])
def test_zappl_invariants(family, n):
    z = make_axis(family, n)
    assert np.array_equal(np.diag(z.A), np.ones(n))
    assert np.all(np.triu(z.A, 1) == 0)
    assert np.all(np.triu(z.B, 1) == 0)
    assert np.all(np.triu(z.Binv, 1) == 0)
    assert np.all(np.diag(z.B) != 0)
    # ZAPPL property, recomputed from A rather than read off B
    vals = z.values(z.points.points)
    scale = np.max(np.abs(z.A).sum(axis=1))
    assert np.all(np.abs(np.triu(vals, 1)) <= 1e-10 * scale)
    assert np.allclose(vals, z.B, rtol=0, atol=1e-12 * np.abs(z.B).max())
    eye = np.eye(n)
    tol = 1e-12 * np.linalg.norm(z.B, np.inf)
    assert np.all(np.abs(z.B @ z.Binv - eye) <= tol)
    assert np.all(np.abs(z.Binv @ z.B - eye) <= tol)


@pytest.mark.parametrize("family", [MONO, CHEB])
def test_lagrange_type_cardinality(family):
    z = make_axis(family, 9)
    G = np.column_stack([lagrange_type(z, a, z.points.points) for a in range(1, 10)])
    assert np.allclose(G, np.eye(9), atol=1e-12)


@pytest.mark.parametrize("family", [MONO, CHEB])
def test_span_reproduction(family):
    rng = np.random.default_rng(3)
    n = 12
    z = make_axis(family, n)
    x = rng.uniform(-1, 1, 20)
    for m in range(1, n + 1):
        zm = build_zappl(family, z.points, m)
        c = rng.standard_normal(m)
        f = lambda t: family.vander(t, m) @ c
        approx = sum(f(zm.points.points[a - 1]) * lagrange_type(zm, a, x) for a in range(1, m + 1))
        assert np.max(np.abs(approx - f(x))) <= 1e-9 * np.max(np.abs(f(x)))


def test_leading_blocks_are_nested():
    big = make_axis(CHEB, 12)
    small = build_zappl(CHEB, big.points, 7)
    assert np.array_equal(small.A, big.A[:7, :7])
    assert np.allclose(small.Binv, big.Binv[:7, :7], rtol=0, atol=1e-14)


def test_degenerate_pairing_names_level():
    # third point nearly coincides with the second
    with pytest.raises(DegenerateBasisError, match="level 3"):
        build_zappl(MONO, PointSequence([0.0, 1.0, 1.0 + 1e-13]))


def test_repeated_points_rejected():
    with pytest.raises(ValueError):
        PointSequence([0.0, 1.0, 0.0])


def test_point_csv_round_trip(tmp_path):
    seq = make_leja_points(CHEB, 25, 0.1)
    path = tmp_path / "pts.csv"
    seq.to_csv(path)
    back = PointSequence.from_csv(path)
    assert back.points.tobytes() == seq.points.tobytes()
    assert len(path.read_text().splitlines()) == 25


def test_family_names():
    assert BasisFamily.from_name("chebyshev-first-kind").kind == "chebyshev"
    assert BasisFamily("Monomial").kind == "monomial"
    with pytest.raises(ValueError):
        BasisFamily("legendre")
    with pytest.raises(ValueError):
        BasisFamily("monomial", 1.0, 1.0)
    assert CHEB.eval(1, 0.3) == 1.0
    assert CHEB.eval(3, 0.5) == pytest.approx(2 * 0.25 - 1)
