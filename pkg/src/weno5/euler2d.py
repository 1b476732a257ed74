"""2D compressible Euler equations, swept dimension by dimension.

The state has shape ``(4, nx, ny)`` holding ``(rho, rho*u, rho*v, E)`` with
``x`` along axis 1. Both directions run through one x-direction routine:
the y sweep transposes the lines and swaps the two momentum components, so
data that is symmetric under the diagonal swap stays bit-for-bit symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from weno5.errors import ConfigError, NonPositiveDensity, NonPositivePressure
from weno5.euler1d import GAMMA, field_speeds, line_fluxes
from weno5.scalar import GHOST, check_finite
from weno5.stencil import SchemeConfig

G = GHOST
_SWAP = [0, 2, 1, 3]


@dataclass(frozen=True)
class Grid2D:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    nx: int
    ny: int
    ghost: int = GHOST

    def __post_init__(self):
        if self.nx < 10 or self.ny < 10:
            raise ConfigError(f"need at least 10 cells per direction, got {self.nx}x{self.ny}")
        if not (self.x_hi > self.x_lo and self.y_hi > self.y_lo):
            raise ConfigError("domain bounds must be increasing")
        if self.ghost != GHOST:
            raise ConfigError(f"ghost width is fixed at {GHOST} for fifth order")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_hi - self.y_lo) / self.ny

    @property
    def x(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y(self) -> np.ndarray:
        return self.y_lo + (np.arange(self.ny) + 0.5) * self.dy

    def x_padded(self) -> np.ndarray:
        return self.x_lo + (np.arange(-G, self.nx + G) + 0.5) * self.dx

    def y_padded(self) -> np.ndarray:
        return self.y_lo + (np.arange(-G, self.ny + G) + 0.5) * self.dy


# {{{ state conversions


def _first_bad(mask):
    return tuple(int(i) for i in np.argwhere(mask)[0])


def primitives(q: np.ndarray, gamma: float = GAMMA):
    """``(rho, u, v, p)`` with admissibility checks reporting cell indices."""
    rho = q[0]
    if np.any(~(rho > 0.0)):
        i = _first_bad(~(rho > 0.0))
        raise NonPositiveDensity(f"density {rho[i]!r} is not positive", index=i)
    u = q[1] / rho
    v = q[2] / rho
    p = (gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v))
    if np.any(~(p > 0.0)):
        i = _first_bad(~(p > 0.0))
        raise NonPositivePressure(f"pressure {p[i]!r} is not positive", index=i)
    return rho, u, v, p


def prim_to_cons2d(rho, u, v, p, gamma: float = GAMMA) -> np.ndarray:
    rho, u, v, p = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (rho, u, v, p)))
    return np.stack([rho, rho * u, rho * v, p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)])


def swap_axes(q: np.ndarray) -> np.ndarray:
    """Mirror a state across the diagonal: ``x <-> y`` and ``u <-> v``."""
    return np.ascontiguousarray(q[_SWAP].transpose(0, 2, 1))


# }}}


# {{{ boundaries


@dataclass(frozen=True)
class Dirichlet:
    """Ghost cells frozen at values captured from the initial state."""

    values: Optional[np.ndarray] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Reflecting:
    pass


@dataclass(frozen=True)
class Inflow:
    state: tuple  # primitive (rho, u, v, p)


@dataclass(frozen=True)
class Outflow:
    pass


@dataclass(frozen=True)
class MovingShockTop:
    """Straight oblique shock through ``(x0, 0)`` moving along ``+x``.

    At time ``t`` the shock meets height ``y`` at
    ``x0 + y / tan(angle) + speed * t / sin(angle)``.
    """

    x0: float
    angle_deg: float
    speed: float
    post: tuple
    pre: tuple

    def shock_x(self, y, t: float):
        a = math.radians(self.angle_deg)
        return self.x0 + (np.asarray(y) + self.speed * t / math.cos(a)) / math.tan(a)


@dataclass(frozen=True)
class SplitWall:
    """Fixed state for ``x < x_split`` and a reflecting wall beyond it."""

    x_split: float
    state: tuple


Edge = Union[Dirichlet, Reflecting, Inflow, Outflow, MovingShockTop, SplitWall]


@dataclass(frozen=True)
class Boundary2D:
    left: Edge
    right: Edge
    bottom: Edge
    top: Edge
    gamma: float = GAMMA

    def __post_init__(self):
        for name in ("left", "right", "bottom"):
            if isinstance(getattr(self, name), MovingShockTop):
                raise ConfigError("a moving-shock condition is only valid on the top edge")
        for name in ("left", "right"):
            if isinstance(getattr(self, name), SplitWall):
                raise ConfigError("a split wall is only valid on the bottom or top edge")

    @classmethod
    def uniform(cls, edge: Edge, gamma: float = GAMMA) -> "Boundary2D":
        return cls(edge, edge, edge, edge, gamma)

    def freeze(self, q0: np.ndarray) -> "Boundary2D":
        """Capture the ghost values of every Dirichlet edge from ``q0``.

        Frozen ghosts are the initial trace extended with zero gradient.
        """
        padded = np.pad(q0, ((0, 0), (G, G), (G, G)), mode="edge")
        blocks = {
            "left": padded[:, :G, :],
            "right": padded[:, -G:, :],
            "bottom": padded[:, :, :G],
            "top": padded[:, :, -G:],
        }
        edges = {}
        for name, block in blocks.items():
            edge = getattr(self, name)
            if isinstance(edge, Dirichlet):
                edge = Dirichlet(np.array(block))
            edges[name] = edge
        return Boundary2D(gamma=self.gamma, **edges)


def _cons(state, gamma):
    return prim_to_cons2d(*state, gamma=gamma)


def _fill_x(qe, edge, side, gamma):
    nx = qe.shape[1] - 2 * G
    ghost = slice(0, G) if side == "left" else slice(nx + G, nx + 2 * G)
    rows = slice(G, qe.shape[2] - G)
    if isinstance(edge, Dirichlet):
        if edge.values is None:
            raise ConfigError("Dirichlet edge used before Boundary2D.freeze")
        qe[:, ghost, rows] = edge.values[:, :, rows]
    elif isinstance(edge, Outflow):
        src = G if side == "left" else nx + G - 1
        qe[:, ghost, rows] = qe[:, src : src + 1, rows]
    elif isinstance(edge, Inflow):
        qe[:, ghost, rows] = _cons(edge.state, gamma)[:, None, None]
    elif isinstance(edge, Reflecting):
        if side == "left":
            qe[:, G - 1 :: -1, rows] = qe[:, G : 2 * G, rows]
        else:
            qe[:, nx + G :, rows] = qe[:, nx + G - 1 : nx - 1 : -1, rows]
        qe[1, ghost, rows] *= -1.0
    else:
        raise ConfigError(f"{type(edge).__name__} cannot be used on the {side} edge")


def _fill_y(qe, edge, side, grid, t, gamma):
    ny = qe.shape[2] - 2 * G
    ghost = slice(0, G) if side == "bottom" else slice(ny + G, ny + 2 * G)
    if isinstance(edge, Dirichlet):
        if edge.values is None:
            raise ConfigError("Dirichlet edge used before Boundary2D.freeze")
        qe[:, :, ghost] = edge.values
    elif isinstance(edge, Outflow):
        src = G if side == "bottom" else ny + G - 1
        qe[:, :, ghost] = qe[:, :, src : src + 1]
    elif isinstance(edge, Inflow):
        qe[:, :, ghost] = _cons(edge.state, gamma)[:, None, None]
    elif isinstance(edge, Reflecting):
        _reflect_y(qe, side, ny, slice(None))
    elif isinstance(edge, SplitWall):
        cols = grid.x_padded() >= edge.x_split
        _reflect_y(qe, side, ny, cols)
        fixed = _cons(edge.state, gamma)
        qe[:, ~cols, ghost] = fixed[:, None, None]
    elif isinstance(edge, MovingShockTop):
        if side != "top":
            raise ConfigError("a moving-shock condition is only valid on the top edge")
        y = grid.y_padded()[ghost]
        behind = grid.x_padded()[:, None] < edge.shock_x(y, t)[None, :]
        post = _cons(edge.post, gamma)[:, None, None]
        pre = _cons(edge.pre, gamma)[:, None, None]
        qe[:, :, ghost] = np.where(behind[None], post, pre)
    else:
        raise ConfigError(f"unsupported edge {edge!r}")


def _reflect_y(qe, side, ny, cols):
    block = qe[:, cols]
    if side == "bottom":
        block[:, :, G - 1 :: -1] = block[:, :, G : 2 * G]
        block[2, :, :G] *= -1.0
    else:
        block[:, :, ny + G :] = block[:, :, ny + G - 1 : ny - 1 : -1]
        block[2, :, ny + G :] *= -1.0
    qe[:, cols] = block


def fill_ghosts_2d(qe: np.ndarray, grid: Grid2D, bc: Boundary2D, t: float = 0.0) -> np.ndarray:
    """Fill the ghost frame of a padded state in place: x edges, then y edges."""
    _fill_x(qe, bc.left, "left", bc.gamma)
    _fill_x(qe, bc.right, "right", bc.gamma)
    _fill_y(qe, bc.bottom, "bottom", grid, t, bc.gamma)
    _fill_y(qe, bc.top, "top", grid, t, bc.gamma)
    return qe


def extend_2d(q: np.ndarray, grid: Grid2D, bc: Boundary2D, t: float = 0.0) -> np.ndarray:
    qe = np.empty((4, q.shape[1] + 2 * G, q.shape[2] + 2 * G))
    qe[:, G:-G, G:-G] = q
    return fill_ghosts_2d(qe, grid, bc, t)


def dmr_boundary_fill(qe: np.ndarray, grid: Grid2D, t: float, shock: MovingShockTop) -> np.ndarray:
    """Ghost fill for the double Mach reflection at time ``t``."""
    bc = Boundary2D(
        left=Inflow(shock.post),
        right=Outflow(),
        bottom=SplitWall(shock.x0, shock.post),
        top=shock,
    )
    return fill_ghosts_2d(qe, grid, bc, t)


# }}}


# {{{ right-hand side


def roe_basis_x(qL: np.ndarray, qR: np.ndarray, gamma: float = GAMMA):
    """Left and right eigenvectors of the x-flux Jacobian at the Roe average.

    Inputs are stacks ``(4, ...)``; returns ``(left, right, eigenvalues)``
    with matrices of shape ``(..., 4, 4)``.
    """
    rL, uL, vL, pL = primitives(qL, gamma)
    rR, uR, vR, pR = primitives(qR, gamma)
    sL, sR = np.sqrt(rL), np.sqrt(rR)
    inv = 1.0 / (sL + sR)
    u = (sL * uL + sR * uR) * inv
    v = (sL * vL + sR * vR) * inv
    h = (sL * (qL[3] + pL) / rL + sR * (qR[3] + pR) / rR) * inv
    q2 = 0.5 * (u * u + v * v)
    c2 = (gamma - 1.0) * (h - q2)
    if np.any(~(c2 > 0.0)):
        i = _first_bad(~(np.atleast_1d(c2) > 0.0))
        raise NonPositivePressure("Roe-averaged state has no real sound speed", index=i)
    c = np.sqrt(c2)
    b1 = (gamma - 1.0) / c2
    b2 = b1 * q2
    right = np.zeros(u.shape + (4, 4))
    right[..., 0, :] = 1.0
    right[..., 0, 2] = 0.0
    right[..., 1, 0] = u - c
    right[..., 1, 1] = u
    right[..., 1, 3] = u + c
    right[..., 2, :] = v[..., None]
    right[..., 2, 2] = 1.0
    right[..., 3, 0] = h - u * c
    right[..., 3, 1] = q2
    right[..., 3, 2] = v
    right[..., 3, 3] = h + u * c
    left = np.zeros(u.shape + (4, 4))
    left[..., 0, 0] = 0.5 * (b2 + u / c)
    left[..., 0, 1] = -0.5 * (b1 * u + 1.0 / c)
    left[..., 0, 2] = -0.5 * b1 * v
    left[..., 0, 3] = 0.5 * b1
    left[..., 1, 0] = 1.0 - b2
    left[..., 1, 1] = b1 * u
    left[..., 1, 2] = b1 * v
    left[..., 1, 3] = -b1
    left[..., 2, 0] = -v
    left[..., 2, 2] = 1.0
    left[..., 3, 0] = 0.5 * (b2 - u / c)
    left[..., 3, 1] = -0.5 * (b1 * u - 1.0 / c)
    left[..., 3, 2] = -0.5 * b1 * v
    left[..., 3, 3] = 0.5 * b1
    return left, right, np.stack([u - c, u, u, u + c], -1)


def _x_fluxes(lines: np.ndarray, cfg: SchemeConfig, h: float, gamma: float, single_alpha: bool):
    """Interface fluxes along padded lines ``(nlines, 4, npts)``."""
    q = np.ascontiguousarray(lines.transpose(1, 0, 2))
    rho, u, v, p = primitives(q, gamma)
    c = np.sqrt(gamma * p / rho)
    f = np.stack([q[1], q[1] * u + p, q[2] * u, u * (q[3] + p)])
    alpha = field_speeds(np.stack([u - c, u, u, u + c], -1), single_alpha)
    return line_fluxes(lines, f.transpose(1, 0, 2), alpha, cfg, h, gamma)


def _eps_spacing(grid: Grid2D) -> float:
    # scaled epsilon uses one spacing per mesh; the coarser one on anisotropic grids
    return max(grid.dx, grid.dy)


def euler2d_rhs(
    q: np.ndarray,
    grid: Grid2D,
    cfg: SchemeConfig,
    bc: Boundary2D,
    t: float = 0.0,
    single_alpha: bool = False,
) -> np.ndarray:
    """``-(dF/dx + dG/dy)`` from two independent characteristic-wise sweeps."""
    if q.shape != (4, grid.nx, grid.ny):
        raise ConfigError(f"state has shape {q.shape}, grid expects (4, {grid.nx}, {grid.ny})")
    q = np.asarray(q, dtype=np.float64)
    check_finite(q.ravel(), "state")
    primitives(q, bc.gamma)  # reports interior (i, j) on failure
    qe = extend_2d(q, grid, bc, t)
    h = _eps_spacing(grid)
    # x sweep: one line per interior row j
    xl = qe[:, :, G:-G].transpose(2, 0, 1)
    F = _x_fluxes(xl, cfg, h, bc.gamma, single_alpha)
    dF = (F[:, :, 1:] - F[:, :, :-1]).transpose(1, 2, 0) / grid.dx
    # y sweep: one line per interior column i, momenta swapped
    yl = qe[_SWAP][:, G:-G, :].transpose(1, 0, 2)
    Gf = _x_fluxes(yl, cfg, h, bc.gamma, single_alpha)[:, _SWAP]
    dG = (Gf[:, :, 1:] - Gf[:, :, :-1]).transpose(1, 0, 2) / grid.dy
    return -(dF + dG)


def directional_speeds(q: np.ndarray, gamma: float = GAMMA):
    rho, u, v, p = primitives(q, gamma)
    c = np.sqrt(gamma * p / rho)
    return float(np.max(np.abs(u) + c)), float(np.max(np.abs(v) + c))


def cfl_rate(q: np.ndarray, grid: Grid2D, gamma: float = GAMMA) -> float:
    """``ax/dx + ay/dy``; a CFL step is ``number / cfl_rate``."""
    ax, ay = directional_speeds(q, gamma)
    return ax / grid.dx + ay / grid.dy


# }}}
