"""Sparse-grid interpolation with ZAPPL bases and sequential-summation transforms."""

from .basis1d import (
    BasisFamily,
    DegenerateBasisError,
    InsufficientCandidatesError,
    PointSequence,
    Zappl1D,
    build_zappl,
    eval_zappl,
    lagrange_type,
    make_axis,
    make_leja_points,
)
from .costmodel import count_verify, n_mult_separate, n_mult_sequential, sweep
from .index_set import SimplexIndexSet, SparseGrid, enumerate_indices, grid_points, size
from .smolyak import DeltaBaseline, Interpolant, eval_delta_baseline, eval_interpolant, eval_many
from .transform import (
    MultCounter,
    dehierarchize,
    dense_oracle,
    from_raw_basis,
    hierarchize,
    hierarchize_full,
    to_raw_basis,
    verify_chop_identity,
)

__version__ = "0.1.0"
