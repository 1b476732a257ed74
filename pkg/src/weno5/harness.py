"""Studies and benchmark runs behind the command-line interface.

Everything here returns plain data (rows, records, reports); file output is
limited to :func:`write_csv` and :func:`run_benchmark`, both of which write
through a temporary file and rename so partial files never appear.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from weno5 import euler1d, euler2d
from weno5.errors import AdmissibilityError, ConfigError, NonFiniteError
from weno5.problems import (
    DMR_ANGLE_DEG,
    DMR_MACH,
    DMR_POST,
    DMR_PRE,
    DMR_X0,
    ProblemSpec,
    catalog_lookup,
    jump_function,
    jump_function_derivative,
)
from weno5.scalar import BoundaryKind, GridSpec, extend, linear_flux, scalar_rhs
from weno5.stencil import (
    LINEAR_WEIGHTS,
    EpsilonPolicy,
    Fixed,
    SchemeConfig,
    Variant,
    _reconstruct_plus,
    nonlinear_weights,
)
from weno5.timestep import STEPPERS, AccuracyScaled, Cfl, StepPolicy, integrate

# {{{ norms and tables


def error_norms(numeric, exact) -> Tuple[float, float]:
    """``(mean |e|, max |e|)``."""
    numeric = np.asarray(numeric, dtype=np.float64)
    exact = np.asarray(exact, dtype=np.float64)
    if numeric.shape != exact.shape:
        raise ValueError(f"length mismatch: {numeric.shape} vs {exact.shape}")
    e = np.abs(numeric - exact)
    return float(np.mean(e)), float(np.max(e))


def deduced_order(e_coarse: float, e_fine: float) -> float:
    return math.log2(e_coarse / e_fine)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    l1_error: float
    linf_error: float
    l1_order: Optional[float] = None
    linf_order: Optional[float] = None

    FIELDS = ("n", "l1_error", "linf_error", "l1_order", "linf_order")

    def as_tuple(self):
        return tuple(getattr(self, k) for k in self.FIELDS)


def build_rows(ns: Sequence[int], l1: Sequence[float], linf: Sequence[float]) -> List[ConvergenceRow]:
    rows = []
    for k, n in enumerate(ns):
        if k == 0:
            rows.append(ConvergenceRow(int(n), l1[k], linf[k]))
        else:
            rows.append(
                ConvergenceRow(
                    int(n), l1[k], linf[k],
                    deduced_order(l1[k - 1], l1[k]), deduced_order(linf[k - 1], linf[k]),
                )
            )
    return rows


def format_table(rows: Iterable, fields: Sequence[str]) -> str:
    """Plain fixed-width table for terminal output."""
    lines = ["  ".join(f"{f:>12}" for f in fields)]
    for row in rows:
        cells = []
        for v in (row.as_tuple() if hasattr(row, "as_tuple") else row):
            if v is None:
                cells.append(f"{'-':>12}")
            elif isinstance(v, (int, np.integer)):
                cells.append(f"{v:>12d}")
            else:
                cells.append(f"{v:>12.4e}" if abs(v) < 1e-2 or abs(v) >= 1e4 else f"{v:>12.4f}")
        lines.append("  ".join(cells))
    return "\n".join(lines)


# }}}


# {{{ csv


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write a one-line-header CSV with 17 significant digits, atomically."""
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    _atomic_write(Path(path), buf.getvalue())
    return Path(path)


def _parse(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path) -> Tuple[List[str], List[tuple]]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [tuple(_parse(c) for c in row) for row in r]


def write_rows(path, rows: Sequence[ConvergenceRow]) -> Path:
    return write_csv(path, ConvergenceRow.FIELDS, (r.as_tuple() for r in rows))


# }}}


# {{{ scalar advection


class StudyAborted(RuntimeError):
    """A run inside a study failed; ``rows`` holds what finished before it."""

    def __init__(self, message: str, rows, cause: BaseException):
        super().__init__(message)
        self.rows = rows
        self.cause = cause


def _scalar_grid(spec: ProblemSpec, n: int) -> GridSpec:
    return GridSpec(spec.domain[0], spec.domain[1], n)


def advect(
    spec: ProblemSpec,
    cfg: SchemeConfig,
    n: int,
    policy: StepPolicy,
    stepper: str = "rk4",
    t_end: Optional[float] = None,
):
    """Evolve a scalar advection problem; returns ``(grid, Integration)``."""
    if spec.system != "advection":
        raise ConfigError(f"{spec.name!r} is not a scalar advection problem")
    grid = _scalar_grid(spec, n)
    flux, dflux = linear_flux(1.0)
    bc = BoundaryKind(spec.boundary)
    rhs = lambda t, u: scalar_rhs(u, grid, cfg, bc, flux, dflux)  # noqa: E731
    result = integrate(
        spec.initial(grid.x), rhs, spec.t_end if t_end is None else t_end, grid.dx, policy,
        wave_speed=lambda u: 1.0, stepper=STEPPERS[stepper],
    )
    return grid, result


def default_dt_const(ladder: Sequence[int], spec: ProblemSpec) -> float:
    """Constant giving ``dt = 0.5 dx`` on the coarsest grid of the ladder."""
    dx0 = (spec.domain[1] - spec.domain[0]) / min(ladder)
    return AccuracyScaled.matching_cfl(dx0).c


def convergence_study(
    problem: str,
    cfg: SchemeConfig,
    ladder: Optional[Sequence[int]] = None,
    stepper: str = "rk4",
    dt_const: Optional[float] = None,
    cfl: Optional[float] = None,
) -> List[ConvergenceRow]:
    """L1/Linf errors against the exact solution for each grid of ``ladder``.

    The step is ``dt = c dx**(5/4)`` unless ``cfl`` is given.
    """
    spec = catalog_lookup(problem)
    if not spec.has_exact:
        raise ConfigError(f"problem {problem!r} has no exact solution")
    ladder = tuple(ladder or spec.default_n)
    if cfl is not None:
        policy: StepPolicy = Cfl(cfl)
    else:
        policy = AccuracyScaled(dt_const if dt_const is not None else default_dt_const(ladder, spec))
    l1, linf = [], []
    for n in ladder:
        try:
            grid, result = advect(spec, cfg, n, policy, stepper)
        except (AdmissibilityError, NonFiniteError) as err:
            raise StudyAborted(f"N={n}: {err}", build_rows(ladder[: len(l1)], l1, linf), err) from err
        a, b = error_norms(result.state, spec.exact(grid.x, result.t))
        l1.append(a)
        linf.append(b)
    return build_rows(ladder, l1, linf)


EPSILON_SWEEP_POLICIES = ("fixed:1e-6", "fixed:1e-16", "scaled:1", "scaled:2", "scaled:3", "scaled:5")


def epsilon_sweep(
    variant: Variant,
    policies: Sequence[EpsilonPolicy],
    p: float = 2.0,
    problem: str = "advect-sine-cubed",
    ladder: Optional[Sequence[int]] = None,
    dt_const: Optional[float] = None,
) -> Dict[str, List[ConvergenceRow]]:
    """One convergence table per epsilon policy."""
    return {
        str(pol): convergence_study(problem, SchemeConfig(variant, pol, p), ladder, dt_const=dt_const)
        for pol in policies
    }


# }}}


# {{{ reconstruction studies


@dataclass(frozen=True)
class ReconstructRow:
    n: int
    e_left: float
    e_right: float
    o_left: Optional[float] = None
    o_right: Optional[float] = None

    FIELDS = ("n", "e_left", "o_left", "e_right", "o_right")

    def as_tuple(self):
        return tuple(getattr(self, k) for k in self.FIELDS)


# the four schemes compared in the discontinuous reconstruction study
RECONSTRUCT_SCHEMES = {
    "loc": SchemeConfig(Variant.LOC, Fixed(1e-6), 2.0),
    "js5": SchemeConfig(Variant.JS5, Fixed(1e-6), 2.0),
    "ud5-p1": SchemeConfig(Variant.UD5, Fixed(1e-16), 1.0),
    "ud5-p2": SchemeConfig(Variant.UD5, Fixed(1e-16), 2.0),
}

RECONSTRUCT_LADDER = (25, 50, 100, 200, 400, 800, 1600)


def _plus_interfaces(f: np.ndarray, cfg: SchemeConfig, dx: float) -> np.ndarray:
    out = np.empty(f.shape[0] - 4)
    _reconstruct_plus(np.ascontiguousarray(f, dtype=np.float64), *cfg.kernel_args(dx), out)
    return out


def derivative_errors(cfg: SchemeConfig, n: int, jump_at: float = 0.5) -> Tuple[float, float]:
    """Flux-difference derivative errors either side of the jump.

    Nodes are ``x_j = -1 + j dx`` with ``dx = 2/n``; ``l`` is the last node at
    or left of the jump. The error at node ``j`` is
    ``f'(x_j) - (F[j+1/2] - F[j-1/2]) / dx`` with upwind interface values
    ``F``. The left error is taken at ``l`` and the right one at ``l + 2``;
    these are the nearest nodes whose difference quotient mixes in exactly
    one stencil that crosses the jump.
    """
    dx = 2.0 / n
    x = -1.0 + dx * np.arange(n + 1)
    l = int(np.searchsorted(x, jump_at, side="right")) - 1
    f = jump_function(x)
    out = []
    for j in (l, l + 2):
        # interfaces j-1/2 and j+1/2 from windows starting at j-3 and j-2
        F = _plus_interfaces(f[j - 3 : j + 3], cfg, dx)
        out.append(float(jump_function_derivative(x[j]) - (F[1] - F[0]) / dx))
    return out[0], out[1]


def reconstruct_study(
    ladder: Sequence[int] = RECONSTRUCT_LADDER,
    schemes: Optional[Dict[str, SchemeConfig]] = None,
) -> Dict[str, List[ReconstructRow]]:
    schemes = schemes or RECONSTRUCT_SCHEMES
    tables = {}
    for label, cfg in schemes.items():
        errs = [derivative_errors(cfg, n) for n in ladder]
        rows = []
        for k, n in enumerate(ladder):
            el, er = errs[k]
            if k == 0:
                rows.append(ReconstructRow(int(n), el, er))
            else:
                pl, pr = errs[k - 1]
                rows.append(
                    ReconstructRow(
                        int(n), el, er,
                        deduced_order(abs(pl), abs(el)), deduced_order(abs(pr), abs(er)),
                    )
                )
        tables[label] = rows
    return tables


def jump_window(dx: float, jump_at: float = 0.5) -> np.ndarray:
    """Five samples of the jump profile with only the right substencil crossing it."""
    x = jump_at - 1.5 * dx + dx * np.arange(-2, 3)
    return jump_function(x)


def discontinuous_weight_decay(cfg: SchemeConfig, dxs: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Weight of the discontinuous substencil and successive log2 slopes."""
    w = np.array([nonlinear_weights(jump_window(dx), cfg, dx)[2] for dx in dxs])
    dxs = np.asarray(dxs, dtype=np.float64)
    slopes = np.log(w[:-1] / w[1:]) / np.log(dxs[:-1] / dxs[1:])
    return w, slopes


def smooth_weight_deviation(
    cfg: SchemeConfig, dxs: Sequence[float], x0: float = 0.3
) -> Tuple[np.ndarray, np.ndarray]:
    """``max_k |w_k - d_k|`` on ``sin(pi x)`` windows centred at ``x0``."""
    d = np.array(LINEAR_WEIGHTS)
    dev = []
    for dx in dxs:
        window = np.sin(np.pi * (x0 + dx * np.arange(-2, 3)))
        dev.append(float(np.max(np.abs(np.array(nonlinear_weights(window, cfg, dx)) - d))))
    dev = np.array(dev)
    dxs = np.asarray(dxs, dtype=np.float64)
    return dev, np.log(dev[:-1] / dev[1:]) / np.log(dxs[:-1] / dxs[1:])


WEIGHTS_TRACE_FIELDS = ("x", "omega0", "omega1", "omega2", "d0", "d1", "d2")


def weights_trace(problem: str, cfg: SchemeConfig, n: Optional[int] = None) -> np.ndarray:
    """Nonlinear weights of every upwind interface reconstruction of ``u0``.

    Row ``i`` belongs to the interface right of cell ``i`` and the returned
    array has the columns of :data:`WEIGHTS_TRACE_FIELDS`.
    """
    spec = catalog_lookup(problem)
    n = n or spec.default_n[0]
    grid = _scalar_grid(spec, n)
    bc = BoundaryKind(spec.boundary) if spec.boundary != "none" else BoundaryKind.ZERO_GRADIENT
    ue = extend(spec.initial(grid.x), bc)
    out = np.empty((n, 7))
    for i in range(n):
        out[i, 0] = grid.x[i] + 0.5 * grid.dx
        out[i, 1:4] = nonlinear_weights(ue[i + 1 : i + 6], cfg, grid.dx)
        out[i, 4:] = LINEAR_WEIGHTS
    return out


# }}}


# {{{ benchmark runs


@dataclass
class RunReport:
    problem: str
    scheme: dict
    grid: dict
    t_final: float
    steps: int
    wall_time: float
    files: List[str] = field(default_factory=list)
    conservation_drift: List[float] = field(default_factory=list)
    min_density: Optional[float] = None
    min_pressure: Optional[float] = None
    completed: bool = True
    message: str = ""
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


class RunAborted(RuntimeError):
    def __init__(self, report: RunReport, cause: BaseException):
        super().__init__(report.message)
        self.report = report
        self.cause = cause


def _drift(initial: np.ndarray, final: np.ndarray, volume: float) -> List[float]:
    """Relative change of each conserved integral; absolute where it starts at zero."""
    axes = tuple(range(1, initial.ndim)) if initial.ndim > 1 else None
    a = np.atleast_1d(np.sum(initial, axis=axes)) * volume
    b = np.atleast_1d(np.sum(final, axis=axes)) * volume
    scale = np.where(a != 0.0, np.abs(a), 1.0)
    return [float(v) for v in np.abs(b - a) / scale]


def _cell_volume(grid) -> float:
    return grid.dx if isinstance(grid, GridSpec) else grid.dx * grid.dy


def _setup(spec: ProblemSpec, n: Optional[int], ny: Optional[int] = None):
    if spec.dim == 1:
        return GridSpec(spec.domain[0], spec.domain[1], n or spec.default_n[0])
    nx = n or spec.default_n[0]
    return euler2d.Grid2D(*spec.domain, nx, ny or (n if n else spec.default_n[1]))


def boundary_2d(spec: ProblemSpec, q0: np.ndarray) -> euler2d.Boundary2D:
    if spec.boundary == "dirichlet":
        return euler2d.Boundary2D.uniform(euler2d.Dirichlet()).freeze(q0)
    if spec.boundary == "dmr":
        shock = dmr_shock()
        return euler2d.Boundary2D(
            left=euler2d.Inflow(DMR_POST),
            right=euler2d.Outflow(),
            bottom=euler2d.SplitWall(DMR_X0, DMR_POST),
            top=shock,
        )
    if spec.boundary == "zero-gradient":
        return euler2d.Boundary2D.uniform(euler2d.Outflow())
    raise ConfigError(f"no 2D boundary for {spec.boundary!r}")


def dmr_shock() -> euler2d.MovingShockTop:
    return euler2d.MovingShockTop(DMR_X0, DMR_ANGLE_DEG, DMR_MACH, DMR_POST, DMR_PRE)


def _solution_rows_1d(spec, grid, state):
    if spec.system == "advection":
        return ("x", "u"), zip(grid.x, state)
    w = euler1d.cons_to_prim(state)
    return ("x", "rho", "u", "p"), zip(grid.x, w.rho, w.u, w.p)


def _solution_rows_2d(grid, state):
    rho, u, v, p = euler2d.primitives(state)
    X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
    cols = [a.ravel() for a in (X, Y, rho, u, v, p)]
    return ("x", "y", "rho", "u", "v", "p"), zip(*cols)


def _minima(spec, state):
    if spec.system != "euler":
        return None, None
    if spec.dim == 1:
        q = np.asarray(state)
        p = (euler1d.GAMMA - 1.0) * (q[2] - 0.5 * q[1] ** 2 / q[0])
    else:
        q = np.asarray(state)
        p = (euler1d.GAMMA - 1.0) * (q[3] - 0.5 * (q[1] ** 2 + q[2] ** 2) / q[0])
    return float(np.min(q[0])), float(np.min(p))


def make_rhs(spec: ProblemSpec, grid, cfg: SchemeConfig, q0: np.ndarray, single_alpha: bool = False):
    """Semi-discrete operator ``rhs(t, q)`` and CFL speed for a problem."""
    if spec.system == "advection":
        flux, dflux = linear_flux(1.0)
        bc = BoundaryKind(spec.boundary)
        return (lambda t, u: scalar_rhs(u, grid, cfg, bc, flux, dflux)), (lambda u: 1.0)
    if spec.dim == 1:
        bc = BoundaryKind(spec.boundary)
        return (
            lambda t, q: euler1d.euler1d_rhs(q, grid, cfg, bc, single_alpha=single_alpha),
            euler1d.max_wave_speed,
        )
    bc2 = boundary_2d(spec, q0)
    # integrate() divides dx by the speed, so hand it dx * (ax/dx + ay/dy)
    return (
        lambda t, q: euler2d.euler2d_rhs(q, grid, cfg, bc2, t, single_alpha=single_alpha),
        lambda q: grid.dx * euler2d.cfl_rate(q, grid),
    )


def evolve(
    problem: str,
    cfg: SchemeConfig,
    n: Optional[int] = None,
    cfl: float = 0.5,
    stepper: Optional[str] = None,
    t_end: Optional[float] = None,
    single_alpha: bool = False,
    on_step=None,
    ny: Optional[int] = None,
):
    """Evolve a catalog problem; returns ``(spec, grid, q0, Integration)``."""
    spec = catalog_lookup(problem)
    if spec.system == "reconstruction":
        raise ConfigError(f"{problem!r} is a reconstruction study, not a time-dependent run")
    grid = _setup(spec, n, ny)
    q0 = spec.initial(grid.x) if spec.dim == 1 else spec.initial(grid.x, grid.y)
    rhs, speed = make_rhs(spec, grid, cfg, q0, single_alpha)
    result = integrate(
        q0, rhs, spec.t_end if t_end is None else t_end, grid.dx, Cfl(cfl),
        wave_speed=speed, stepper=STEPPERS[stepper or spec.stepper], on_step=on_step,
    )
    return spec, grid, q0, result


def _grid_dict(grid) -> dict:
    d = asdict(grid)
    if isinstance(grid, GridSpec):
        d["dx"] = grid.dx
    else:
        d["dx"], d["dy"] = grid.dx, grid.dy
    return d


def run_benchmark(
    problem: str,
    cfg: SchemeConfig,
    n: Optional[int] = None,
    cfl: float = 0.5,
    out_dir=None,
    stepper: Optional[str] = None,
    t_end: Optional[float] = None,
    single_alpha: bool = False,
    reference=None,
) -> Tuple[RunReport, np.ndarray]:
    """Evolve a catalog problem and optionally dump the solution as CSV.

    On an admissibility failure the last accepted state is written with its
    time stamp and :class:`RunAborted` carries the report. For ``shu-osher``
    a reference solution (path or ``(x, rho)`` pair) adds the L1 density
    distance to ``extras``.
    """
    spec = catalog_lookup(problem)
    last = {"t": 0.0, "q": None, "steps": 0}

    def keep(t, q):
        last["t"], last["q"] = t, q
        last["steps"] += 1

    start = time.perf_counter()
    failure = None
    try:
        spec, grid, q0, result = evolve(
            problem, cfg, n, cfl, stepper, t_end, single_alpha, on_step=keep
        )
        state, t_final, steps = result.state, result.t, result.steps
    except (AdmissibilityError, NonFiniteError) as err:
        failure = err
        grid = _setup(spec, n)
        q0 = spec.initial(grid.x) if spec.dim == 1 else spec.initial(grid.x, grid.y)
        state = q0 if last["q"] is None else last["q"]
        t_final, steps = last["t"], last["steps"]
    wall = time.perf_counter() - start

    dmin, pmin = _minima(spec, state)
    report = RunReport(
        problem=spec.name,
        scheme=cfg.to_dict() | {"single_alpha": single_alpha},
        grid=_grid_dict(grid),
        t_final=t_final,
        steps=steps,
        wall_time=wall,
        conservation_drift=_drift(q0, state, _cell_volume(grid)),
        min_density=dmin,
        min_pressure=pmin,
        completed=failure is None,
        message="" if failure is None else f"aborted at t={t_final!r}: {failure}",
    )
    if reference is not None and failure is None and spec.name == "shu-osher":
        report.extras["l1_to_reference"] = distance_to_reference(grid, state, reference)
    if out_dir is not None:
        out = Path(out_dir)
        stem = f"{spec.name}_{cfg.variant.value}_p{cfg.p:g}_n{grid.n if spec.dim == 1 else f'{grid.nx}x{grid.ny}'}"
        if failure is not None:
            stem += f"_partial_t{t_final:.6g}"
        if spec.dim == 1:
            header, rows = _solution_rows_1d(spec, grid, state)
        else:
            header, rows = _solution_rows_2d(grid, state)
        report.files.append(str(write_csv(out / f"{stem}.csv", header, rows)))
        report_path = out / f"{stem}.json"
        report.files.append(str(report_path))
        _atomic_write(report_path, json.dumps(report.to_dict(), indent=2, sort_keys=True))
    if failure is not None:
        raise RunAborted(report, failure) from failure
    return report, state


def build_reference(n: int = 2000, out_dir=None) -> Tuple[np.ndarray, np.ndarray, RunReport]:
    """JS5 shu-osher solution on a fine grid, used as the reference density."""
    report, state = run_benchmark("shu-osher", SchemeConfig(Variant.JS5), n=n, out_dir=out_dir)
    grid = _setup(catalog_lookup("shu-osher"), n)
    return grid.x, euler1d.cons_to_prim(state).rho, report


def load_reference(path) -> Tuple[np.ndarray, np.ndarray]:
    header, rows = read_csv(path)
    data = np.array(rows, dtype=np.float64)
    return data[:, header.index("x")], data[:, header.index("rho")]


def distance_to_reference(grid: GridSpec, state: np.ndarray, reference) -> float:
    """Mean absolute density difference after linear interpolation of the reference."""
    if isinstance(reference, (str, os.PathLike)):
        reference = load_reference(reference)
    x_ref, rho_ref = reference
    rho = euler1d.cons_to_prim(state).rho
    return error_norms(rho, np.interp(grid.x, x_ref, rho_ref))[0]


# }}}
