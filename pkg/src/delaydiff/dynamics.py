"""Right-hand sides of the baseline high-gain differentiator and of both
stages of the two-step differentiator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergenceError, InvalidInputError
from .gains import (
    ConstantGain,
    GainSchedule,
    GainsLike,
    GainVector,
    Schedule,
    as_gains,
    injection_gains,
    second_step_gains,
    verify_hurwitz,
)


@dataclass(frozen=True)
class DifferentiatorSpec:
    """Order, gains, measurement delay, integral-chain lag correction and
    high-gain schedule of a two-step differentiator."""

    k: GainVector
    delta: float
    schedule: Schedule
    delta_g: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "k", as_gains(self.k))
        check = verify_hurwitz(self.k)
        if not check.stable:
            raise InvalidInputError(
                f"gains {self.k.k} are not Hurwitz; roots {np.round(check.roots, 6).tolist()}"
            )
        for name in ("delta", "delta_g"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidInputError(f"{name} must be non-negative and finite, got {value}")
        if not isinstance(self.schedule, (GainSchedule, ConstantGain)):
            raise InvalidInputError(f"unsupported schedule {self.schedule!r}")

    @property
    def n(self) -> int:
        return self.k.n

    @property
    def delta_eff(self) -> float:
        return self.delta + self.delta_g


@dataclass
class ObserverState:
    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        self.x1 = np.asarray(self.x1, dtype=float)
        self.x2 = np.asarray(self.x2, dtype=float)
        if self.x1.shape != self.x2.shape or self.x1.ndim != 1:
            raise InvalidInputError("stage states must be 1-d vectors of equal length")

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.x1)) and np.all(np.isfinite(self.x2)))

    def pack(self) -> np.ndarray:
        return np.concatenate([self.x1, self.x2])

    @classmethod
    def unpack(cls, z: np.ndarray) -> "ObserverState":
        n = len(z) // 2
        return cls(z[:n].copy(), z[n:].copy())


def _chain_rhs(x: np.ndarray, e: float, gains: np.ndarray) -> np.ndarray:
    # integrator chain dx_i = x_{i+1} + gains_i * e, dx_n = gains_n * e
    dx = gains * e
    dx[:-1] += x[1:]
    return dx


def baseline_rhs(x, m: float, k: GainsLike, eps: float) -> np.ndarray:
    """Classic high-gain differentiator driven by the measurement ``m``."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DivergenceError("non-finite baseline state", time=None)
    return _chain_rhs(x, m - x[0], injection_gains(k, eps))


def two_step_rhs(
    state: ObserverState,
    m: float,
    spec: DifferentiatorSpec,
    eps: float,
    t: Optional[float] = None,
) -> ObserverState:
    """Derivative of both stages.

    Both stages are driven by the first-stage innovation ``m - x1[0]``; the
    second stage uses gains Taylor-corrected by ``delta + delta_g``.
    """
    if not state.is_finite():
        raise DivergenceError(f"non-finite observer state at t={t}", time=t)
    e = m - state.x1[0]
    dx1 = _chain_rhs(state.x1, e, injection_gains(spec.k, eps))
    dx2 = _chain_rhs(state.x2, e, second_step_gains(spec.k, eps, spec.delta_eff))
    return ObserverState(dx1, dx2)


def initial_state(spec: DifferentiatorSpec, m0: float = 0.0, policy: str = "zero") -> ObserverState:
    """``zero``: all states zero. ``seeded``: both position states start at ``m0``."""
    x1 = np.zeros(spec.n)
    x2 = np.zeros(spec.n)
    if policy == "seeded":
        x1[0] = x2[0] = m0
    elif policy != "zero":
        raise InvalidInputError(f"unknown initial-state policy {policy!r}")
    return ObserverState(x1, x2)
