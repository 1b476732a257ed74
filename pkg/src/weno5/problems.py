"""Closed catalog of test problems: initial data, exact solutions, setups.

Each entry is an immutable :class:`ProblemSpec`. Functions of space are not
stored on the spec itself; they are looked up by name, so a spec serialises
to plain JSON-compatible data and rebuilds to an equal object.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from weno5.euler1d import GAMMA, prim_to_cons
from weno5.euler2d import prim_to_cons2d

# Woodward--Colella double Mach reflection. Pre-shock gas at rest with unit
# sound speed; post-shock values are the Mach 10 normal-shock jump
#   rho2 = rho1 (g+1) M^2 / ((g-1) M^2 + 2)        = 8
#   p2   = p1 (1 + 2g/(g+1) (M^2 - 1))             = 116.5
#   w2   = M c1 (1 - rho1/rho2)                    = 8.25
# with the induced velocity w2 along the shock normal (sin 60, -cos 60).
DMR_MACH = 10.0
DMR_ANGLE_DEG = 60.0
DMR_X0 = 1.0 / 6.0
DMR_PRE = (1.4, 0.0, 0.0, 1.0)
DMR_POST = (8.0, 8.25 * math.sin(math.radians(60.0)), -8.25 * math.cos(math.radians(60.0)), 116.5)

RIEMANN2D_SPLIT = 0.8
# (rho, u, v, p) for the quadrants NE, NW, SW, SE
RIEMANN2D_STATES = {
    "ne": (1.5, 0.0, 0.0, 1.5),
    "nw": (0.5323, 1.206, 0.0, 0.3),
    "sw": (0.138, 1.206, 1.206, 0.029),
    "se": (0.5323, 0.0, 1.206, 0.3),
}

SOD_LEFT = (1.0, 0.0, 1.0)
SOD_RIGHT = (0.125, 0.0, 0.1)
LAX_LEFT = (0.445, 0.698, 3.528)
LAX_RIGHT = (0.5, 0.0, 0.571)
SHU_OSHER_LEFT = (3.857143, 2.629369, 31.0 / 3.0)

ADVECTION_SPEED = 1.0


class UnknownProblem(KeyError):
    def __str__(self) -> str:
        return str(self.args[0])


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    dim: int
    system: str  # "advection", "euler", "reconstruction"
    domain: Tuple[float, ...]
    boundary: str
    t_end: Optional[float]
    default_n: Tuple[int, ...]
    has_exact: bool
    stepper: str = "ssprk3"
    cfl: float = 0.5
    scheme: str = "ud5"
    params: Tuple[Tuple[str, float], ...] = ()
    notes: str = ""

    def param(self, key: str) -> float:
        return dict(self.params)[key]

    def initial(self, *coords: np.ndarray) -> np.ndarray:
        return _INITIAL[self.name](self, *coords)

    def exact(self, x: np.ndarray, t: float) -> np.ndarray:
        if not self.has_exact:
            raise ValueError(f"problem {self.name!r} has no exact solution")
        return _EXACT[self.name](self, x, t)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["domain"] = list(self.domain)
        d["default_n"] = list(self.default_n)
        d["params"] = [list(kv) for kv in self.params]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemSpec":
        d = dict(d)
        d["domain"] = tuple(float(v) for v in d["domain"])
        d["default_n"] = tuple(int(v) for v in d["default_n"])
        d["params"] = tuple((str(k), float(v)) for k, v in d.get("params", ()))
        return cls(**d)


# {{{ initial data


def _periodic_shift(x, t, lo=-1.0, hi=1.0):
    return lo + np.mod(np.asarray(x) - ADVECTION_SPEED * t - lo, hi - lo)


def _sine(spec, x):
    return np.sin(np.pi * np.asarray(x))


def _critical(spec, x):
    x = np.asarray(x)
    return np.sin(np.pi * x - np.sin(np.pi * x) / np.pi)


def _sine_cubed(spec, x):
    return np.sin(np.pi * np.asarray(x)) ** 3


def jump_function(x):
    """Smooth cubic-plus-cosine profile with a unit jump after ``x = 0.5``."""
    x = np.asarray(x, dtype=np.float64)
    return x**3 + np.cos(x) + np.where(x > 0.5, 1.0, 0.0)


def jump_function_derivative(x):
    x = np.asarray(x, dtype=np.float64)
    return 3.0 * x**2 - np.sin(x)


def _reconstruct_jump(spec, x):
    return jump_function(x)


def _weights_trace(spec, x):
    x = np.asarray(x, dtype=np.float64)
    return -np.sin(np.pi * x) - 0.5 * x**3 + np.where(x >= 0.0, 1.0, 0.0)


def _shapes(spec, x):
    x = np.asarray(x, dtype=np.float64)
    delta = spec.param("delta")
    z = spec.param("z")
    beta = math.log(2.0) / (36.0 * delta * delta)

    def gauss(c):
        return np.exp(-beta * (x - c) ** 2)

    bump = (gauss(z - delta) + gauss(z) + 4.0 * gauss(z + delta)) / 6.0
    out = np.zeros_like(x)
    out = np.where((x > -0.8) & (x < 0.2), bump, out)
    return np.where((x >= 0.2) & (x <= 0.8), 1.0, out)


def _riemann_1d(left, right, split=0.0):
    def build(spec, x):
        x = np.asarray(x, dtype=np.float64)
        prims = [np.where(x < split, a, b) for a, b in zip(left, right)]
        return prim_to_cons(*prims, gamma=GAMMA)

    return build


def _shu_osher(spec, x):
    x = np.asarray(x, dtype=np.float64)
    k = spec.param("k")
    left = x < -4.0
    rho = np.where(left, SHU_OSHER_LEFT[0], 1.0 + 0.2 * np.sin(k * x))
    u = np.where(left, SHU_OSHER_LEFT[1], 0.0)
    p = np.where(left, SHU_OSHER_LEFT[2], 1.0)
    return prim_to_cons(rho, u, p, gamma=GAMMA)


def _riemann2d(spec, x, y):
    X, Y = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
    east = X >= RIEMANN2D_SPLIT
    north = Y >= RIEMANN2D_SPLIT
    prims = []
    for k in range(4):
        s = RIEMANN2D_STATES
        prims.append(
            np.where(north, np.where(east, s["ne"][k], s["nw"][k]), np.where(east, s["se"][k], s["sw"][k]))
        )
    return prim_to_cons2d(*prims, gamma=GAMMA)


def dmr_shock_x(y, t: float = 0.0):
    """Abscissa of the incident shock at height ``y`` and time ``t``."""
    a = math.radians(DMR_ANGLE_DEG)
    return DMR_X0 + (np.asarray(y) + DMR_MACH * t / math.cos(a)) / math.tan(a)


def _dmr(spec, x, y):
    X, Y = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
    behind = X < dmr_shock_x(Y, 0.0)
    prims = [np.where(behind, a, b) for a, b in zip(DMR_POST, DMR_PRE)]
    return prim_to_cons2d(*prims, gamma=GAMMA)


_INITIAL: Dict[str, Callable] = {
    "advect-sine": _sine,
    "advect-critical": _critical,
    "advect-sine-cubed": _sine_cubed,
    "reconstruct-jump": _reconstruct_jump,
    "weights-trace": _weights_trace,
    "advect-shapes": _shapes,
    "sod": _riemann_1d(SOD_LEFT, SOD_RIGHT),
    "lax": _riemann_1d(LAX_LEFT, LAX_RIGHT),
    "shu-osher": _shu_osher,
    "riemann2d": _riemann2d,
    "dmr": _dmr,
}

_EXACT: Dict[str, Callable] = {
    "advect-sine": lambda spec, x, t: _sine(spec, _periodic_shift(x, t)),
    "advect-critical": lambda spec, x, t: _critical(spec, _periodic_shift(x, t)),
    "advect-sine-cubed": lambda spec, x, t: _sine_cubed(spec, _periodic_shift(x, t)),
}

# }}}


_LADDER = (40, 80, 160, 320, 640)

CATALOG: Dict[str, ProblemSpec] = {
    spec.name: spec
    for spec in (
        ProblemSpec("advect-sine", 1, "advection", (-1.0, 1.0), "periodic", 2.0, _LADDER, True, stepper="rk4"),
        ProblemSpec("advect-critical", 1, "advection", (-1.0, 1.0), "periodic", 2.0, _LADDER, True, stepper="rk4"),
        ProblemSpec(
            "advect-sine-cubed", 1, "advection", (-1.0, 1.0), "periodic", 2.0,
            _LADDER + (1280, 2560), True, stepper="rk4",
            notes="final time not stated for this case; t=2 as for the other smooth advection tests",
        ),
        ProblemSpec(
            "reconstruct-jump", 1, "reconstruction", (-1.0, 1.0), "none", None,
            (25, 50, 100, 200, 400, 800, 1600), False, params=(("jump_at", 0.5),),
        ),
        ProblemSpec(
            "weights-trace", 1, "reconstruction", (-1.0, 1.0), "periodic", None, (200,), False,
            notes="grid size not stated; N=200 is a local default",
        ),
        ProblemSpec(
            "advect-shapes", 1, "advection", (-1.0, 1.0), "periodic", 8.0, (200,), False,
            params=(("delta", 0.005), ("z", -0.7)),
            notes="grid size and delta not stated; N=200 and delta=0.005 are local defaults",
        ),
        ProblemSpec("sod", 1, "euler", (-5.0, 5.0), "zero-gradient", 1.3, (200,), False),
        ProblemSpec("lax", 1, "euler", (-5.0, 5.0), "zero-gradient", 1.3, (200,), False),
        ProblemSpec(
            "shu-osher", 1, "euler", (-5.0, 5.0), "zero-gradient", 1.8, (200,), False,
            params=(("k", 5.0), ("reference_n", 2000.0)),
        ),
        ProblemSpec("riemann2d", 2, "euler", (0.0, 1.0, 0.0, 1.0), "dirichlet", 0.8, (400, 400), False),
        ProblemSpec("dmr", 2, "euler", (0.0, 4.0, 0.0, 1.0), "dmr", 0.2, (500, 500), False),
    )
}


def catalog_lookup(name: str) -> ProblemSpec:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownProblem(
            f"unknown problem {name!r}; available: {', '.join(sorted(CATALOG))}"
        ) from None
