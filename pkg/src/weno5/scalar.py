"""Method-of-lines operator for 1D scalar conservation laws.

Interface fluxes come from global Lax--Friedrichs splitting: the positive
part is reconstructed on the upwind-biased window and the negative part on
the mirrored window, both through the same compiled WENO kernel.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from weno5.errors import ConfigError, NonFiniteError
from weno5.stencil import SchemeConfig, _reconstruct_plus

GHOST = 3

Flux = Callable[[np.ndarray], np.ndarray]


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    ZERO_GRADIENT = "zero-gradient"


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``n`` cells on ``[x_lo, x_hi]``; nodes sit at cell centres."""

    x_lo: float
    x_hi: float
    n: int
    ghost: int = GHOST

    def __post_init__(self):
        if self.n < 10:
            raise ConfigError(f"need at least 10 cells, got {self.n}")
        if not self.x_hi > self.x_lo:
            raise ConfigError("x_hi must exceed x_lo")
        if self.ghost != GHOST:
            raise ConfigError(f"ghost width is fixed at {GHOST} for fifth order")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n) + 0.5) * self.dx

    @property
    def length(self) -> float:
        return self.x_hi - self.x_lo


def fill_ghosts(u: np.ndarray, bc: BoundaryKind, ghost: int = GHOST) -> np.ndarray:
    """Fill the ``ghost`` outermost entries along the last axis, in place.

    ``u`` already includes the ghost entries. Returns ``u`` for chaining.
    """
    g = ghost
    n = u.shape[-1] - 2 * g
    if n < g:
        raise ConfigError(f"{n} interior points cannot feed {g} ghosts")
    bc = BoundaryKind(bc)
    if bc is BoundaryKind.PERIODIC:
        u[..., :g] = u[..., n : n + g]
        u[..., n + g :] = u[..., g : 2 * g]
    else:
        u[..., :g] = u[..., g : g + 1]
        u[..., n + g :] = u[..., n + g - 1 : n + g]
    return u


def extend(u: np.ndarray, bc: BoundaryKind, ghost: int = GHOST) -> np.ndarray:
    """Copy interior values into a fresh ghost-padded array and fill it."""
    shape = u.shape[:-1] + (u.shape[-1] + 2 * ghost,)
    out = np.empty(shape, dtype=np.float64)
    out[..., ghost:-ghost] = u
    return fill_ghosts(out, bc, ghost)


def compute_alpha(u: np.ndarray, dflux: Flux) -> float:
    """Global Lax--Friedrichs bound ``max |f'(u)|`` over every node given."""
    return float(np.max(np.abs(dflux(u))))


def check_finite(values: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        index = int(np.flatnonzero(bad)[0])
        raise NonFiniteError(f"non-finite {what} at grid index {index}", index=index)


def split_flux(u: np.ndarray, flux: Flux, alpha: float):
    """Return ``(f_plus, f_minus)`` with ``f_pm = (f(u) +- alpha*u) / 2``."""
    f = np.asarray(flux(u), dtype=np.float64)
    check_finite(f, "flux")
    au = alpha * u
    return 0.5 * (f + au), 0.5 * (f - au)


def interface_fluxes(
    fp: np.ndarray, fm: np.ndarray, cfg: SchemeConfig, dx: float | None = None
) -> np.ndarray:
    """WENO interface fluxes at every interface between ghost-padded nodes.

    ``fp`` and ``fm`` are ghost-padded (width 3) split fluxes of ``n`` interior
    nodes; the result holds the ``n + 1`` values at ``x[j-1/2]`` for the
    first interior node through ``x[n-1+1/2]``.
    """
    check_finite(fp, "split flux")
    check_finite(fm, "split flux")
    variant, eps, p = cfg.kernel_args(dx)
    n = fp.shape[0] - 2 * GHOST
    plus = np.empty(n + 1)
    minus = np.empty(n + 1)
    _reconstruct_plus(np.ascontiguousarray(fp[:-1]), variant, eps, p, plus)
    _reconstruct_plus(np.ascontiguousarray(fm[:0:-1]), variant, eps, p, minus)
    return plus + minus[::-1]


def scalar_rhs(
    u: np.ndarray,
    grid: GridSpec,
    cfg: SchemeConfig,
    bc: BoundaryKind,
    flux: Flux,
    dflux: Flux,
) -> np.ndarray:
    """Conservative semi-discrete operator ``-(F[j+1/2] - F[j-1/2]) / dx``."""
    if u.shape != (grid.n,):
        raise ConfigError(f"field has shape {u.shape}, grid expects ({grid.n},)")
    ue = extend(np.asarray(u, dtype=np.float64), bc)
    check_finite(ue, "state")
    alpha = compute_alpha(ue, dflux)
    fp, fm = split_flux(ue, flux, alpha)
    F = interface_fluxes(fp, fm, cfg, grid.dx)
    return -(F[1:] - F[:-1]) / grid.dx


def linear_flux(speed: float = 1.0):
    """``f(u) = speed * u`` and its derivative."""
    return (lambda u: speed * u), (lambda u: np.full_like(u, speed))


def burgers_flux():
    return (lambda u: 0.5 * u * u), (lambda u: u)
