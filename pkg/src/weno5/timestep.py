"""Explicit Runge--Kutta steppers and step-size control.

``rhs`` callables take ``(t, state)`` and return the time derivative with the
same shape as ``state``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from weno5.errors import AdmissibilityError, ConfigError, NonFiniteError

Rhs = Callable[[float, np.ndarray], np.ndarray]

ACCURACY_EXPONENT = 1.25


@dataclass(frozen=True)
class Cfl:
    number: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.number <= 1.0:
            raise ConfigError(f"CFL number must lie in (0, 1], got {self.number}")


@dataclass(frozen=True)
class AccuracyScaled:
    """``dt = c * dx**(5/4)``: RK4 time error then matches fifth-order space."""

    c: float

    def __post_init__(self):
        if not self.c > 0.0:
            raise ConfigError(f"dt constant must be positive, got {self.c}")

    @classmethod
    def matching_cfl(cls, dx_coarse: float, number: float = 0.5) -> "AccuracyScaled":
        """Constant giving ``dt = number * dx`` on the coarsest grid."""
        return cls(number * dx_coarse ** (1.0 - ACCURACY_EXPONENT))


StepPolicy = Union[Cfl, AccuracyScaled]


def compute_dt(
    policy: StepPolicy, dx: float, alpha: float, t: float, t_end: float
) -> float:
    if not dx > 0.0:
        raise ConfigError("dx must be positive")
    if isinstance(policy, Cfl):
        if not alpha > 0.0:
            raise ConfigError("a CFL step needs a positive wave speed")
        dt = policy.number * dx / alpha
    else:
        dt = policy.c * dx**ACCURACY_EXPONENT
    remaining = t_end - t
    if dt >= remaining:
        dt = remaining
    return dt


def _annotate(err: Exception, stage: int, t: float) -> Exception:
    if isinstance(err, AdmissibilityError):
        err.stage = stage if err.stage is None else err.stage
        err.time = t if err.time is None else err.time
    return err


def _stage(rhs: Rhs, t: float, u: np.ndarray, stage: int, t0: float) -> np.ndarray:
    try:
        return rhs(t, u)
    except (AdmissibilityError, NonFiniteError) as err:
        raise _annotate(err, stage, t0)


def ssp_rk3_step(u: np.ndarray, t: float, dt: float, rhs: Rhs) -> np.ndarray:
    """Three-stage strong-stability-preserving RK (Shu--Osher form)."""
    if not dt > 0.0:
        raise ConfigError("dt must be positive")
    u1 = u + dt * _stage(rhs, t, u, 1, t)
    u2 = 0.75 * u + 0.25 * (u1 + dt * _stage(rhs, t + dt, u1, 2, t))
    return (u + 2.0 * (u2 + dt * _stage(rhs, t + 0.5 * dt, u2, 3, t))) / 3.0


def rk4_step(u: np.ndarray, t: float, dt: float, rhs: Rhs) -> np.ndarray:
    """Classic four-stage RK."""
    if not dt > 0.0:
        raise ConfigError("dt must be positive")
    h = 0.5 * dt
    k1 = _stage(rhs, t, u, 1, t)
    k2 = _stage(rhs, t + h, u + h * k1, 2, t)
    k3 = _stage(rhs, t + h, u + h * k2, 3, t)
    k4 = _stage(rhs, t + dt, u + dt * k3, 4, t)
    return u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


STEPPERS = {"ssprk3": ssp_rk3_step, "rk4": rk4_step}


@dataclass
class Integration:
    state: np.ndarray
    t: float
    steps: int


def integrate(
    u0: np.ndarray,
    rhs: Rhs,
    t_end: float,
    dx: float,
    policy: StepPolicy,
    *,
    wave_speed: Optional[Callable[[np.ndarray], float]] = None,
    stepper: Callable = ssp_rk3_step,
    t0: float = 0.0,
    on_step: Optional[Callable[[float, np.ndarray], None]] = None,
) -> Integration:
    """March ``u0`` from ``t0`` to exactly ``t_end``.

    ``wave_speed`` supplies the CFL bound from the current state and is only
    needed for :class:`Cfl` policies. ``on_step`` sees every accepted state;
    if a step fails, the last accepted state is what it saw last.
    """
    u = np.array(u0, dtype=np.float64)
    t = float(t0)
    steps = 0
    while t < t_end:
        alpha = wave_speed(u) if wave_speed is not None else math.nan
        dt = compute_dt(policy, dx, alpha, t, t_end)
        u = stepper(u, t, dt, rhs)
        t = t_end if t + dt >= t_end else t + dt
        steps += 1
        if on_step is not None:
            on_step(t, u)
    return Integration(u, t, steps)
