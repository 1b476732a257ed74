"""Fifth-order WENO kernels on a single five-point flux window.

The window is ``(f[i-2], f[i-1], f[i], f[i+1], f[i+2])`` and every kernel
returns quantities for the interface ``x[i+1/2]``. Three weight families
are supported:

* ``LOC``  -- undivided-difference smoothness indicators with classic
  ``d / (eps + beta)**p`` weights,
* ``JS5``  -- Jiang--Shu indicators with the same weight formula,
* ``UD5``  -- the undivided-difference indicators combined with the global
  indicator ``zeta`` in ``d * (1 + (zeta / (beta + eps))**p)`` weights.

The scalar kernels are compiled with numba so the grid sweeps in the solver
modules call exactly the same arithmetic as the per-window API below.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np
from numba import njit

from weno5.errors import ConfigError, NonFiniteError

D0, D1, D2 = 0.1, 0.6, 0.3
LINEAR_WEIGHTS = (D0, D1, D2)

# integer codes understood by the compiled kernels
LOC, JS5, UD5, IDEAL = 0, 1, 2, 3


class Variant(enum.Enum):
    LOC = "loc"
    JS5 = "js5"
    UD5 = "ud5"
    # weights pinned to the linear weights; used as an oracle, not a scheme
    IDEAL = "ideal"

    @property
    def code(self) -> int:
        return _VARIANT_CODES[self]


_VARIANT_CODES = {Variant.LOC: LOC, Variant.JS5: JS5, Variant.UD5: UD5, Variant.IDEAL: IDEAL}


@dataclass(frozen=True)
class Fixed:
    value: float

    def __post_init__(self):
        if not (self.value > 0.0 and math.isfinite(self.value)):
            raise ConfigError(f"fixed epsilon must be positive, got {self.value!r}")

    def resolve(self, dx: float | None = None) -> float:
        return self.value

    def __str__(self) -> str:
        return f"fixed:{self.value:g}"


@dataclass(frozen=True)
class Scaled:
    """``eps = dx**m``, evaluated once per grid."""

    m: float

    def __post_init__(self):
        if not (self.m > 0.0 and math.isfinite(self.m)):
            raise ConfigError(f"epsilon exponent must be positive, got {self.m!r}")

    def resolve(self, dx: float | None = None) -> float:
        if dx is None or not dx > 0.0:
            raise ConfigError("scaled epsilon needs a positive grid spacing")
        return dx**self.m

    def __str__(self) -> str:
        return f"scaled:{self.m:g}"


EpsilonPolicy = Union[Fixed, Scaled]

_DEFAULT_EPS = {
    Variant.LOC: 1e-5,
    Variant.JS5: 1e-6,
    Variant.UD5: 1e-16,
    Variant.IDEAL: 1e-16,
}


def parse_epsilon(text: str) -> EpsilonPolicy:
    """Parse ``fixed:<value>`` or ``scaled:<m>``."""
    kind, _, value = text.partition(":")
    try:
        number = float(value)
    except ValueError:
        raise ConfigError(f"cannot parse epsilon policy {text!r}") from None
    if kind == "fixed":
        return Fixed(number)
    if kind == "scaled":
        return Scaled(number)
    raise ConfigError(f"unknown epsilon policy {kind!r}; use fixed:<v> or scaled:<m>")


@dataclass(frozen=True)
class SchemeConfig:
    variant: Variant = Variant.UD5
    epsilon: EpsilonPolicy = field(default=None)  # type: ignore[assignment]
    p: float = 2.0

    def __post_init__(self):
        if isinstance(self.variant, str):
            object.__setattr__(self, "variant", Variant(self.variant))
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", Fixed(_DEFAULT_EPS[self.variant]))
        if not (self.p >= 1.0 and math.isfinite(self.p)):
            raise ConfigError(f"p must be >= 1, got {self.p!r}")

    def eps(self, dx: float | None = None) -> float:
        return self.epsilon.resolve(dx)

    def kernel_args(self, dx: float | None = None) -> Tuple[int, float, float]:
        """The ``(variant, eps, p)`` triple passed to compiled sweeps."""
        return self.variant.code, float(self.eps(dx)), float(self.p)

    def to_dict(self) -> dict:
        return {"variant": self.variant.value, "epsilon": str(self.epsilon), "p": self.p}

    def label(self) -> str:
        return f"{self.variant.value}(p={self.p:g},eps={self.epsilon})"


# {{{ compiled kernels


@njit(cache=True)
def _substencil_fluxes(a, b, c, d, e):
    q0 = (2.0 * a - 7.0 * b + 11.0 * c) / 6.0
    q1 = (-b + 5.0 * c + 2.0 * d) / 6.0
    q2 = (2.0 * c + 5.0 * d - e) / 6.0
    return q0, q1, q2


@njit(cache=True)
def _beta_loc(a, b, c, d, e):
    b0 = 0.5 * ((b - a) ** 2 + (c - b) ** 2) + (a - 2.0 * b + c) ** 2
    b1 = 0.5 * ((c - b) ** 2 + (d - c) ** 2) + (b - 2.0 * c + d) ** 2
    b2 = 0.5 * ((d - c) ** 2 + (e - d) ** 2) + (c - 2.0 * d + e) ** 2
    return b0, b1, b2


@njit(cache=True)
def _beta_js(a, b, c, d, e):
    b0 = 13.0 / 12.0 * (a - 2.0 * b + c) ** 2 + 0.25 * (a - 4.0 * b + 3.0 * c) ** 2
    b1 = 13.0 / 12.0 * (b - 2.0 * c + d) ** 2 + 0.25 * (d - b) ** 2
    b2 = 13.0 / 12.0 * (c - 2.0 * d + e) ** 2 + 0.25 * (3.0 * c - 4.0 * d + e) ** 2
    return b0, b1, b2


@njit(cache=True)
def _zeta(a, b, c, d, e):
    s0 = a - 2.0 * b + c
    s1 = b - 2.0 * c + d
    s2 = c - 2.0 * d + e
    return abs(s0 * s0 - 2.0 * (s1 * s1) + s2 * s2)


@njit(cache=True)
def _power(x, p):
    if p == 1.0:
        return x
    if p == 2.0:
        return x * x
    return x**p


@njit(cache=True)
def _normalize(a0, a1, a2):
    s = a0 + a1 + a2
    return a0 / s, a1 / s, a2 / s


@njit(cache=True)
def _weights_loc(b0, b1, b2, eps, p):
    return _normalize(
        D0 / _power(eps + b0, p), D1 / _power(eps + b1, p), D2 / _power(eps + b2, p)
    )


@njit(cache=True)
def _weights_ud5(b0, b1, b2, z, eps, p):
    return _normalize(
        D0 * (1.0 + _power(z / (b0 + eps), p)),
        D1 * (1.0 + _power(z / (b1 + eps), p)),
        D2 * (1.0 + _power(z / (b2 + eps), p)),
    )


@njit(cache=True)
def _weights(a, b, c, d, e, variant, eps, p):
    if variant == LOC:
        b0, b1, b2 = _beta_loc(a, b, c, d, e)
        return _weights_loc(b0, b1, b2, eps, p)
    if variant == JS5:
        b0, b1, b2 = _beta_js(a, b, c, d, e)
        return _weights_loc(b0, b1, b2, eps, p)
    if variant == UD5:
        b0, b1, b2 = _beta_loc(a, b, c, d, e)
        return _weights_ud5(b0, b1, b2, _zeta(a, b, c, d, e), eps, p)
    return D0, D1, D2


@njit(cache=True)
def _weno5(a, b, c, d, e, variant, eps, p):
    q0, q1, q2 = _substencil_fluxes(a, b, c, d, e)
    w0, w1, w2 = _weights(a, b, c, d, e, variant, eps, p)
    return w0 * q0 + w1 * q1 + w2 * q2


@njit(cache=True)
def _reconstruct_plus(f, variant, eps, p, out):
    """Positive-part interface values ``out[j]`` at ``x[j+2+1/2]`` of ``f``."""
    for j in range(out.shape[0]):
        out[j] = _weno5(f[j], f[j + 1], f[j + 2], f[j + 3], f[j + 4], variant, eps, p)


# }}}


# {{{ per-window API


def _as_window(w: Sequence[float]) -> Tuple[float, float, float, float, float]:
    arr = np.asarray(w, dtype=np.float64)
    if arr.shape != (5,):
        raise ValueError(f"a flux window has exactly 5 entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"non-finite entry in flux window {arr.tolist()}")
    return tuple(float(v) for v in arr)  # type: ignore[return-value]


def substencil_fluxes(w: Sequence[float]) -> Tuple[float, float, float]:
    """Third-order candidate interface values from the three substencils."""
    return _substencil_fluxes(*_as_window(w))


def ideal_reconstruction(w: Sequence[float]) -> float:
    """Fifth-order upwind interface value from the full window."""
    a, b, c, d, e = _as_window(w)
    return (2.0 * a - 13.0 * b + 47.0 * c + 27.0 * d - 3.0 * e) / 60.0


def beta_loc(w: Sequence[float]) -> Tuple[float, float, float]:
    return _beta_loc(*_as_window(w))


def beta_js(w: Sequence[float]) -> Tuple[float, float, float]:
    return _beta_js(*_as_window(w))


def zeta(w: Sequence[float]) -> float:
    """Global smoothness indicator over the whole five-point window.

    It combines the three squared second undivided differences and is
    ``O(dx**6)`` on smooth data.
    """
    return _zeta(*_as_window(w))


def weights_loc(beta: Sequence[float], eps: float, p: float) -> Tuple[float, float, float]:
    if not eps > 0.0:
        raise ConfigError("eps must be positive")
    b0, b1, b2 = (float(b) for b in beta)
    return _weights_loc(b0, b1, b2, float(eps), float(p))


def weights_ud5(
    beta: Sequence[float], z: float, eps: float, p: float
) -> Tuple[float, float, float]:
    if not eps > 0.0:
        raise ConfigError("eps must be positive")
    b0, b1, b2 = (float(b) for b in beta)
    return _weights_ud5(b0, b1, b2, float(z), float(eps), float(p))


def nonlinear_weights(
    w: Sequence[float], cfg: SchemeConfig, dx: float | None = None
) -> Tuple[float, float, float]:
    return _weights(*_as_window(w), *cfg.kernel_args(dx))


def reconstruct_interface(
    w: Sequence[float], cfg: SchemeConfig, dx: float | None = None
) -> float:
    return _weno5(*_as_window(w), *cfg.kernel_args(dx))


def mirror_window(w: Sequence[float]) -> Tuple[float, float, float, float, float]:
    """Reverse a window; the negative flux part reuses the positive kernel."""
    return _as_window(w)[::-1]


# }}}
