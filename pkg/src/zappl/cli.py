"""Command-line front end: ``zappl {grid,fit,eval,verify,cost}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import nullcontext
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .basis1d import BasisFamily, PointSequence, Zappl1D, build_zappl, make_leja_points
from .costmodel import count_verify, n_mult_sequential, sweep
from .functions import parse_function
from .index_set import SimplexIndexSet, SparseGrid, grid_points
from .smolyak import Interpolant, baseline_from_axes, eval_delta_baseline, eval_many
from .transform import (
    CHOP_GUARD,
    DENSE_GUARD,
    MultCounter,
    dense_oracle,
    hierarchize,
    read_vector_csv,
    verify_chop_identity,
    write_vector_csv,
)

log = logging.getLogger("zappl")

DENSE_RTOL = 1e-8
CHOP_TOL = 1e-12
BASELINE_RTOL = 1e-9


@dataclass
class JobConfig:
    dim: int | None = None
    budget: int | None = None
    basis: str = "chebyshev"
    domain: tuple[float, float] = (-1.0, 1.0)
    points: str = "leja"
    seed_point: float | None = None
    function: str | None = None
    values: str | None = None
    coeffs: str | None = None
    at: str | None = None
    out: str | None = None
    report: str | None = None
    dmax: int | None = None
    bmax: int | None = None
    blist: list[int] | None = None
    rng_seed: int = 0
    n_eval: int = 100
    inject_perturbation: float = 0.0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "JobConfig":
        cfg: dict = {}
        if getattr(args, "config", None):
            cfg.update(json.loads(Path(args.config).read_text()))
        names = {f.name for f in fields(cls)}
        unknown = set(cfg) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for name in names:
            val = getattr(args, name, None)
            if val is not None:
                cfg[name] = val
        job = cls(**cfg)
        job.domain = tuple(float(v) for v in job.domain)
        if job.dim is not None and job.dim < 1:
            raise ValueError("--dim must be >= 1")
        if job.budget is not None and job.budget < 0:
            raise ValueError("--budget must be >= 0")
        return job

    def family(self) -> BasisFamily:
        return BasisFamily(self.basis, *self.domain)

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ValueError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def build_axes(job: JobConfig, D: int, b: int) -> list[Zappl1D]:
    family = job.family()
    if job.points == "leja":
        seq = make_leja_points(family, b + 1, job.seed_point)
    else:
        seq = PointSequence.from_csv(job.points)
        if len(seq) < b + 1:
            raise ValueError(f"{job.points}: {len(seq)} points, need {b + 1}")
        if not family.contains(seq.points):
            raise ValueError(f"{job.points}: points outside the basis domain")
    z = build_zappl(family, seq, b + 1)
    return [z] * D


def _open_out(path: str | None):
    return nullcontext(sys.stdout) if path in (None, "-") else open(path, "w")


def _metadata(job: JobConfig, axes: list[Zappl1D], b: int) -> dict:
    return {
        "D": len(axes),
        "b": b,
        "basis": axes[0].family.kind,
        "domain": [axes[0].family.lo, axes[0].family.hi],
        "axes": [[float(x) for x in z.points.points] for z in axes],
    }


def load_interpolant(path: str) -> Interpolant:
    idx, coeffs, meta = read_vector_csv(path)
    if meta is None:
        raise ValueError(f"{path}: no metadata line; was it written by 'zappl fit'?")
    D, b = int(meta["D"]), int(meta["b"])
    index_set = SimplexIndexSet(D, b)
    if idx.shape != index_set.indices.shape or not np.array_equal(idx, index_set.indices):
        raise ValueError(f"{path}: indices do not match D={D}, b={b}")
    family = BasisFamily(meta["basis"], *meta["domain"])
    axes = [build_zappl(family, PointSequence(pts), b + 1) for pts in meta["axes"]]
    return Interpolant(coeffs, axes, index_set)


def _values_for(job: JobConfig, axes, index_set: SimplexIndexSet) -> np.ndarray:
    if job.values is not None:
        idx, data, _ = read_vector_csv(job.values)
        if data.size != index_set.size:
            raise ValueError(
                f"{job.values}: {data.size} rows, grid has {index_set.size} points"
            )
        if idx.shape[1] == index_set.D and not np.array_equal(idx, index_set.indices):
            raise ValueError(f"{job.values}: multi-indices do not match the grid offsets")
        if not np.all(np.isfinite(data)):
            raise ValueError(f"{job.values}: non-finite values")
        return data
    if job.function is None:
        raise ValueError("need --function or --values")
    grid = SparseGrid(index_set, tuple(z.points for z in axes))
    data = parse_function(job.function)(grid_points(grid))
    if not np.all(np.isfinite(data)):
        raise ValueError(f"function {job.function!r} produced non-finite values")
    return data


def cmd_grid(job: JobConfig) -> int:
    job.require("dim", "budget")
    axes = build_axes(job, job.dim, job.budget)
    grid = SparseGrid(SimplexIndexSet(job.dim, job.budget), tuple(z.points for z in axes))
    if job.out in (None, "-"):
        idx, pts = grid.index_set.indices, grid.points()
        for off in range(len(idx)):
            print(",".join([str(off), *map(str, idx[off]), *(repr(float(x)) for x in pts[off])]))
    else:
        grid.to_csv(job.out)
    return 0


def fit(job: JobConfig) -> tuple[Interpolant, dict, np.ndarray]:
    job.require("dim", "budget")
    D, b = job.dim, job.budget
    index_set = SimplexIndexSet(D, b)
    axes = build_axes(job, D, b)
    values = _values_for(job, axes, index_set)
    counter = MultCounter()
    coeffs = hierarchize(values, axes, index_set, counter)
    itp = Interpolant(coeffs, axes, index_set)
    nodes = grid_points(SparseGrid(index_set, tuple(z.points for z in axes)))
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    residual = float(np.max(np.abs(eval_many(itp, nodes) - values))) / scale
    report = {
        "D": D,
        "b": b,
        "basis": axes[0].family.kind,
        "N_sparse": index_set.size,
        "measured_mults": counter.count,
        "closed_form_mults": n_mult_sequential(D, b),
        "max_node_residual": residual,
    }
    return itp, report, values


def cmd_fit(job: JobConfig) -> int:
    itp, report, _ = fit(job)
    meta = _metadata(job, list(itp.axes), itp.index_set.b)
    if job.out not in (None, "-"):
        write_vector_csv(job.out, itp.index_set, itp.coeffs, meta)
    text = json.dumps(report, indent=2)
    if job.report:
        Path(job.report).write_text(text + "\n")
    print(text)
    return 0


def read_points_csv(path: str) -> np.ndarray:
    rows = [
        [float(v) for v in line.split(",")]
        for line in Path(path).read_text().splitlines()
        if line.strip() and not line.startswith("#")
    ]
    return np.atleast_2d(np.array(rows, dtype=float))


def cmd_eval(job: JobConfig) -> int:
    job.require("coeffs", "at")
    itp = load_interpolant(job.coeffs)
    X = read_points_csv(job.at)
    if X.shape[1] != itp.D:
        raise ValueError(f"points have {X.shape[1]} columns, interpolant has D={itp.D}")
    vals = eval_many(itp, X)
    with _open_out(job.out) as fh:
        for x, v in zip(X, vals):
            fh.write(",".join([*(repr(float(c)) for c in x), repr(float(v))]) + "\n")
    return 0


def verify_case(job: JobConfig, D: int, b: int) -> list[dict]:
    """Run every oracle check for one ``(D, b)``; returns one record per check."""
    rng = np.random.default_rng(job.rng_seed)
    index_set = SimplexIndexSet(D, b)
    axes = build_axes(job, D, b)
    if job.function or job.values:
        values = _values_for(job, axes, index_set)
    else:
        values = rng.uniform(-1.0, 1.0, index_set.size)
    coeffs = hierarchize(values, axes, index_set)
    if job.inject_perturbation:
        coeffs = coeffs.copy()
        coeffs[0] += job.inject_perturbation
    out = []

    def record(check, deviation, tol, passed=None, **extra):
        passed = deviation <= tol if passed is None else passed
        out.append({"check": check, "D": D, "b": b, "deviation": deviation,
                    "tol": tol, "pass": bool(passed), **extra})

    if index_set.size <= DENSE_GUARD:
        ref = dense_oracle(values, axes, index_set)
        scale = max(float(np.max(np.abs(ref))), np.finfo(float).tiny)
        record("dense_oracle", float(np.max(np.abs(coeffs - ref))) / scale, DENSE_RTOL)
    if (b + 1) ** D <= CHOP_GUARD:
        _, dev = verify_chop_identity(axes, D, b)
        record("chop_identity", dev, CHOP_TOL)

    itp = Interpolant(coeffs, axes, index_set)
    base = baseline_from_axes(axes, b, values)
    family = axes[0].family
    X = rng.uniform(family.lo, family.hi, (job.n_eval, D))
    zv = eval_many(itp, X)
    bv = np.array([eval_delta_baseline(base, x) for x in X])
    scale = max(float(np.max(np.abs(values))), float(np.max(np.abs(bv))), np.finfo(float).tiny)
    record("delta_baseline", float(np.max(np.abs(zv - bv))) / scale, BASELINE_RTOL)

    cc = count_verify(D, b, axes)
    record("mult_count", float(abs(cc.measured - cc.expected)), 0.0,
           measured=cc.measured, expected=cc.expected)
    return out


def cmd_verify(job: JobConfig) -> int:
    if job.dim is not None and job.budget is not None:
        cases = [(job.dim, job.budget)]
    else:
        dims = [job.dim] if job.dim is not None else range(1, (job.dmax or 4) + 1)
        budgets = [job.budget] if job.budget is not None else range(0, (5 if job.bmax is None else job.bmax) + 1)
        cases = [(D, b) for D in dims for b in budgets]
    ok = True
    with _open_out(job.out) as fh:
        for D, b in cases:
            for rec in verify_case(job, D, b):
                ok &= rec["pass"]
                fh.write(json.dumps(rec) + "\n")
    log.info("verify: %s", "all checks passed" if ok else "FAILED")
    return 0 if ok else 1


def cmd_cost(job: JobConfig) -> int:
    dmax = job.dmax or 20
    if job.blist:
        blist = list(job.blist)
    elif job.bmax is not None:
        blist = list(range(job.bmax + 1))
    else:
        blist = [4, 9, 14]
    report = sweep(range(1, dmax + 1), blist)
    with _open_out(job.out) as fh:
        report.to_csv(fh)
    return 0


COMMANDS = {"grid": cmd_grid, "fit": cmd_fit, "eval": cmd_eval, "verify": cmd_verify, "cost": cmd_cost}


def _blist(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values; flags override it")
    common.add_argument("--dim", type=int)
    common.add_argument("--budget", type=int)
    common.add_argument("--basis", help="chebyshev (default) or monomial")
    common.add_argument("--domain", type=float, nargs=2, metavar=("LO", "HI"))
    common.add_argument("--points", help="'leja' (default) or a CSV file of 1-D points")
    common.add_argument("--seed-point", type=float, dest="seed_point")
    common.add_argument("--function", help="builtin, e.g. 'oscillatory:c=2'")
    common.add_argument("--values", help="value CSV joined to the grid by offset")
    common.add_argument("--out")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="zappl", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("grid", parents=[common], help="write the sparse grid CSV")
    fp = sub.add_parser("fit", parents=[common], help="values -> ZAPPL coefficients")
    fp.add_argument("--report")
    ep = sub.add_parser("eval", parents=[common], help="evaluate a fitted interpolant")
    ep.add_argument("--coeffs")
    ep.add_argument("--at", help="CSV of points, one per line")
    vp = sub.add_parser("verify", parents=[common], help="run oracle checks")
    vp.add_argument("--dmax", type=int)
    vp.add_argument("--bmax", type=int)
    vp.add_argument("--rng-seed", type=int, dest="rng_seed")
    vp.add_argument("--n-eval", type=int, dest="n_eval")
    vp.add_argument("--inject-perturbation", type=float, dest="inject_perturbation",
                    help="add this to the first coefficient before checking")
    cp = sub.add_parser("cost", parents=[common], help="operation-count table")
    cp.add_argument("--dmax", type=int)
    cp.add_argument("--bmax", type=int)
    cp.add_argument("--blist", type=_blist)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        job = JobConfig.from_args(args)
        return COMMANDS[args.command](job)
    except (ValueError, KeyError, IndexError, OSError) as exc:
        print(f"zappl {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
