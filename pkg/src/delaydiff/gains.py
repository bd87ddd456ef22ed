"""Gain synthesis: Hurwitz gate, Taylor-corrected second-step gains, and the
time-varying high-gain schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import GainRangeError, InvalidInputError

HURWITZ_TOL = 1e-9
DEFAULT_R_MIN = 1e-3


@dataclass(frozen=True)
class GainVector:
    """Coefficients k_1..k_n of ``s^n + k_1 s^(n-1) + ... + k_n``."""

    k: tuple[float, ...]

    def __post_init__(self):
        k = tuple(float(v) for v in self.k)
        if len(k) < 2:
            raise InvalidInputError(f"gain vector needs n >= 2 entries, got {len(k)}")
        if not all(math.isfinite(v) for v in k):
            raise InvalidInputError(f"gain vector has non-finite entries: {k}")
        object.__setattr__(self, "k", k)

    @property
    def n(self) -> int:
        return len(self.k)

    def polynomial(self) -> np.ndarray:
        """Monic characteristic polynomial, highest power first."""
        return np.array((1.0,) + self.k)

    def __iter__(self):
        return iter(self.k)

    def __len__(self):
        return len(self.k)


GainsLike = Union[GainVector, Sequence[float]]


def as_gains(k: GainsLike) -> GainVector:
    return k if isinstance(k, GainVector) else GainVector(tuple(k))


class HurwitzCheck(NamedTuple):
    stable: bool
    roots: np.ndarray


def companion_matrix(k: GainsLike) -> np.ndarray:
    k = as_gains(k)
    n = k.n
    C = np.zeros((n, n))
    C[0, :] = -np.asarray(k.k)
    C[1:, :-1] = np.eye(n - 1)
    return C


def verify_hurwitz(k: GainsLike, tol: float = HURWITZ_TOL) -> HurwitzCheck:
    """Check that every root of the characteristic polynomial has Re < -tol.

    Roots are the eigenvalues of the companion matrix.
    """
    gv = as_gains(k)
    roots = np.linalg.eigvals(companion_matrix(gv))
    return HurwitzCheck(bool(np.all(roots.real < -tol)), np.sort_complex(roots))


def spectral_radius(k: GainsLike) -> float:
    """Largest root magnitude; closed-loop poles sit at ``R`` times these roots."""
    return float(np.max(np.abs(verify_hurwitz(k).roots)))


def injection_gains(k: GainsLike, eps: float) -> np.ndarray:
    """First-stage (and baseline) injection gains ``k_i / eps**i``."""
    return second_step_gains(k, eps, 0.0)


def second_step_gains(k: GainsLike, eps: float, delta_eff: float) -> np.ndarray:
    """Taylor-corrected injection gains of the second stage.

    ``g_i = sum_{j=i}^{n} delta_eff**(j-i) * k_j / ((j-i)! * eps**j)``

    With ``delta_eff == 0`` every correction term is an exact ``+0.0`` so the
    result equals ``k_i / eps**i`` bit for bit.
    """
    gv = as_gains(k)
    eps = float(eps)
    delta_eff = float(delta_eff)
    if not eps > 0 or not math.isfinite(eps):
        raise InvalidInputError(f"eps must be positive and finite, got {eps}")
    if not delta_eff >= 0 or not math.isfinite(delta_eff):
        raise InvalidInputError(f"delta_eff must be non-negative and finite, got {delta_eff}")
    return np.array(_second_step_gains(gv.k, eps, delta_eff))


@lru_cache(maxsize=256)
def _second_step_gains(k: tuple[float, ...], eps: float, delta_eff: float) -> tuple[float, ...]:
    n = len(k)
    g = []
    for i in range(1, n + 1):
        total = 0.0
        try:
            for j in range(i, n + 1):
                total += k[j - 1] / eps**j * delta_eff ** (j - i) / math.factorial(j - i)
        except (OverflowError, ZeroDivisionError):
            raise GainRangeError(f"second-step gain g_{i} overflowed", index=i) from None
        if not math.isfinite(total):
            raise GainRangeError(f"second-step gain g_{i} is not finite", index=i)
        g.append(total)
    return tuple(g)


@dataclass(frozen=True)
class GainSchedule:
    """Ramped high gain ``R(t) = 1/eps``: ``R0 * t**p`` up to ``t_max`` then held.

    ``R_min`` floors the rate so that ``eps`` stays finite at ``t = 0``.
    """

    R0: float
    p: float
    t_max: float
    R_min: float = DEFAULT_R_MIN

    def __post_init__(self):
        if not self.R0 > 0:
            raise InvalidInputError(f"R0 must be positive, got {self.R0}")
        if not self.p >= 1:
            raise InvalidInputError(f"p must be >= 1, got {self.p}")
        if not self.t_max > 0:
            raise InvalidInputError(f"t_max must be positive, got {self.t_max}")
        if not self.R_min > 0:
            raise InvalidInputError(f"R_min must be positive, got {self.R_min}")

    def rate(self, t):
        """Vectorized R(t); ``t`` must be non-negative."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise InvalidInputError("schedule queried at negative time")
        ramp = self.R0 * np.minimum(t_arr, self.t_max) ** self.p
        r = np.maximum(self.R_min, ramp)
        return float(r) if r.ndim == 0 else r

    @property
    def peak_rate(self) -> float:
        return max(self.R_min, self.R0 * self.t_max**self.p)

    @property
    def settle_time(self) -> float:
        return self.t_max


@dataclass(frozen=True)
class ConstantGain:
    """Fixed ``eps``, i.e. the linear time-invariant regime."""

    eps: float

    def __post_init__(self):
        if not self.eps > 0 or not math.isfinite(self.eps):
            raise InvalidInputError(f"eps must be positive and finite, got {self.eps}")

    def rate(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise InvalidInputError("schedule queried at negative time")
        r = np.full(t_arr.shape, 1.0 / self.eps)
        return float(r) if r.ndim == 0 else r

    @property
    def peak_rate(self) -> float:
        return 1.0 / self.eps

    @property
    def settle_time(self) -> float:
        return 0.0


Schedule = Union[GainSchedule, ConstantGain]


def eval_schedule(sched: Schedule, t: float) -> float:
    """Scalar R(t) for either schedule kind."""
    if t < 0:
        raise InvalidInputError(f"schedule queried at negative time {t}")
    return float(sched.rate(t))
