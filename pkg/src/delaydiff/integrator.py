"""Fixed-step explicit integration of the observer ODEs."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np

from .dynamics import DifferentiatorSpec, initial_state
from .errors import DivergenceError, InvalidInputError, StabilityError, StabilityWarning
from .gains import injection_gains, second_step_gains, spectral_radius
from .signals import NoiseStream, SignalSpec, delayed, truth

STABILITY_WARN = 1.0
STABILITY_FAIL = 2.5
METHODS = ("rk4", "euler")


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-4
    t_end: float = 20.0
    method: str = "rk4"

    def __post_init__(self):
        if not self.dt > 0 or not math.isfinite(self.dt):
            raise InvalidInputError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= self.dt:
            raise InvalidInputError(f"t_end must be >= dt, got {self.t_end}")
        if self.method not in METHODS:
            raise InvalidInputError(f"unknown method {self.method!r}; expected one of {METHODS}")

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def grid(self) -> np.ndarray:
        # t_k = k * dt from the integer k, no accumulated drift
        return np.arange(self.steps + 1) * self.dt


def rk4_amplification(z: complex) -> complex:
    """RK4 stability polynomial ``1 + z + z^2/2 + z^3/6 + z^4/24``."""
    return 1 + z + z**2 / 2 + z**3 / 6 + z**4 / 24


def stability_guard(dt: float, rate: float, allow_unstable: bool = False) -> float:
    """Check ``dt * rate`` against the heuristic limits and return it.

    Above 2.5 always raises; at or above 1 it warns unless ``allow_unstable``.
    """
    factor = dt * rate
    if factor > STABILITY_FAIL:
        raise StabilityError(f"dt * R_max = {factor:.4g} exceeds {STABILITY_FAIL}")
    if factor >= STABILITY_WARN and not allow_unstable:
        warnings.warn(f"dt * R_max = {factor:.4g} >= {STABILITY_WARN}", StabilityWarning, stacklevel=3)
    return factor


def step_once(x, t: float, dt: float, rhs: Callable, method: str = "rk4"):
    """Advance ``x`` by one step of ``dx/dt = rhs(t, x)``.

    ``rhs`` is evaluated at ``t``, ``t + dt/2`` and ``t + dt``; anything it
    closes over (measurement noise) is the caller's to hold fixed per step.
    """
    if not dt > 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    if method == "euler":
        return x + dt * rhs(t, x)
    k1 = rhs(t, x)
    k2 = rhs(t + dt / 2, x + dt / 2 * k1)
    k3 = rhs(t + dt / 2, x + dt / 2 * k2)
    k4 = rhs(t + dt, x + dt * k3)
    return x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass(frozen=True)
class Trace:
    """One row per grid point: signal, measurement, both stage states, truth."""

    t: np.ndarray
    v: np.ndarray
    v_delayed: np.ndarray
    m: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    truth: np.ndarray

    @property
    def n(self) -> int:
        return self.x1.shape[1]

    def columns(self) -> list[str]:
        n = self.n
        return (
            ["t", "v", "v_delayed", "m"]
            + [f"x{i}_s1" for i in range(1, n + 1)]
            + [f"x{i}_s2" for i in range(1, n + 1)]
            + [f"truth_d{i}" for i in range(n)]
        )

    def table(self) -> np.ndarray:
        return np.column_stack([self.t, self.v, self.v_delayed, self.m, self.x1, self.x2, self.truth])

    def to_csv(self, path) -> None:
        write_csv(path, self.columns(), self.table())

    @classmethod
    def from_csv(cls, path) -> "Trace":
        header, data = read_csv(path)
        n = (len(header) - 4) // 3
        return cls(
            t=data[:, 0],
            v=data[:, 1],
            v_delayed=data[:, 2],
            m=data[:, 3],
            x1=data[:, 4 : 4 + n],
            x2=data[:, 4 + n : 4 + 2 * n],
            truth=data[:, 4 + 2 * n :],
        )


def write_csv(path, header, data) -> None:
    np.savetxt(path, np.atleast_2d(data), delimiter=",", header=",".join(header), comments="", fmt="%.17g")


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


@numba.njit(cache=True)
def _observer_rhs(z, m, h, g, out):
    n = h.shape[0]
    e = m - z[0]
    for i in range(n - 1):
        out[i] = z[i + 1] + h[i] * e
        out[n + i] = z[n + i + 1] + g[i] * e
    out[n - 1] = h[n - 1] * e
    out[2 * n - 1] = g[n - 1] * e


@numba.njit(cache=True)
def _integrate_kernel(z0, dt, vd_full, vd_half, noise, idx_full, idx_half, h_tab, g_tab, use_rk4):
    steps = vd_half.shape[0]
    size = z0.shape[0]
    out = np.empty((steps + 1, size))
    out[0] = z0
    k1 = np.empty(size)
    k2 = np.empty(size)
    k3 = np.empty(size)
    k4 = np.empty(size)
    half = dt / 2
    sixth = dt / 6
    for s in range(steps):
        z = out[s]
        # noise held across the sub-stages of one step
        nz = noise[s]
        a = idx_full[s]
        _observer_rhs(z, vd_full[s] + nz, h_tab[a], g_tab[a], k1)
        if use_rk4:
            b = idx_half[s]
            c = idx_full[s + 1]
            _observer_rhs(z + half * k1, vd_half[s] + nz, h_tab[b], g_tab[b], k2)
            _observer_rhs(z + half * k2, vd_half[s] + nz, h_tab[b], g_tab[b], k3)
            _observer_rhs(z + dt * k3, vd_full[s + 1] + nz, h_tab[c], g_tab[c], k4)
            out[s + 1] = z + sixth * (k1 + 2 * k2 + 2 * k3 + k4)
        else:
            out[s + 1] = z + dt * k1
        for j in range(size):
            if not np.isfinite(out[s + 1, j]):
                return out, s + 1
    return out, -1


def _gain_tables(spec: DifferentiatorSpec, rates: np.ndarray):
    # gains are recomputed only per distinct rate, so the constant regime costs one evaluation
    unique, inverse = np.unique(rates, return_inverse=True)
    h_tab = np.empty((len(unique), spec.n))
    g_tab = np.empty((len(unique), spec.n))
    for row, r in enumerate(unique):
        eps = 1.0 / r
        h_tab[row] = injection_gains(spec.k, eps)
        g_tab[row] = second_step_gains(spec.k, eps, spec.delta_eff)
    return h_tab, g_tab, inverse


def integrate(
    spec: DifferentiatorSpec,
    signal: SignalSpec,
    cfg: IntegratorConfig,
    init: str = "zero",
    allow_unstable: bool = False,
) -> Trace:
    """Simulate the two-step differentiator on ``signal``.

    The first-stage states are exactly the baseline high-gain differentiator
    (same equations, same innovation), so one run yields both.
    ``signal.delta`` must equal ``spec.delta``; the measurement delay is a
    property of the sensor and the differentiator must be told the same value.
    """
    if not math.isclose(signal.delta, spec.delta, rel_tol=0, abs_tol=1e-15):
        raise InvalidInputError(
            f"signal delay {signal.delta} differs from differentiator delay {spec.delta}"
        )
    stability_guard(cfg.dt, spec.schedule.peak_rate * spectral_radius(spec.k), allow_unstable)

    t = cfg.grid()
    t_half = t[:-1] + cfg.dt / 2
    steps = cfg.steps
    vd_full = np.asarray(delayed(signal, t), dtype=float)
    vd_half = np.asarray(delayed(signal, t_half), dtype=float)
    noise = NoiseStream(signal.noise).draw(steps + 1)
    m = vd_full + noise

    r_full = np.asarray(spec.schedule.rate(t), dtype=float)
    r_half = np.asarray(spec.schedule.rate(t_half), dtype=float)
    h_tab, g_tab, inverse = _gain_tables(spec, np.concatenate([r_full, r_half]))
    idx_full = inverse[: steps + 1].astype(np.int64)
    idx_half = inverse[steps + 1 :].astype(np.int64)

    z0 = initial_state(spec, m0=float(m[0]), policy=init).pack()
    z, fail = _integrate_kernel(
        z0, cfg.dt, vd_full, vd_half, noise, idx_full, idx_half, h_tab, g_tab, cfg.method == "rk4"
    )
    if fail >= 0:
        raise DivergenceError(f"observer diverged at t={t[fail]:.6g}", time=float(t[fail]))

    n = spec.n
    if signal.analytic:
        v = np.asarray(truth(signal, t, 0), dtype=float)
        derivs = np.column_stack([truth(signal, t, order) for order in range(n)])
    else:
        v = np.full_like(t, np.nan)
        derivs = np.full((len(t), n), np.nan)
    return Trace(t=t, v=v, v_delayed=vd_full, m=m, x1=z[:, :n], x2=z[:, n:], truth=derivs)


def integrate_rhs(rhs: Callable, x0, dt: float, steps: int, method: str = "rk4") -> np.ndarray:
    """Generic fixed-step loop over ``step_once``; returns all states."""
    x = np.asarray(x0, dtype=float)
    out = np.empty((steps + 1,) + x.shape)
    out[0] = x
    for s in range(steps):
        x = step_once(x, s * dt, dt, rhs, method)
        out[s + 1] = x
    return out

