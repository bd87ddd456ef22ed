"""Input signals, measurement delay, measurement noise, and ground truth."""

from __future__ import annotations

import bisect
import csv
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import BufferUnderflowError, InvalidInputError

DEFAULT_NOISE_AMPLITUDE = 0.01
DEFAULT_NOISE_SEED = 42


@dataclass(frozen=True)
class Sine:
    """``amplitude * sin(frequency * t + phase)``, frequency in rad/s."""

    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0

    def derivative(self, t, order: int):
        arg = self.frequency * np.asarray(t, dtype=float) + self.phase
        scale = self.amplitude * self.frequency**order
        # exact quarter-turn cycle instead of sin(arg + order*pi/2)
        q = order % 4
        if q == 0:
            return scale * np.sin(arg)
        if q == 1:
            return scale * np.cos(arg)
        if q == 2:
            return -scale * np.sin(arg)
        return -scale * np.cos(arg)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with coefficients in ascending powers of t."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if not self.coefficients:
            raise InvalidInputError("polynomial needs at least one coefficient")

    def derivative(self, t, order: int):
        c = np.asarray(self.coefficients)
        if order:
            c = P.polyder(c, order) if order < len(c) else np.zeros(1)
        return P.polyval(np.asarray(t, dtype=float), c)


@dataclass(frozen=True)
class SumOfSines:
    terms: tuple[Sine, ...]

    def derivative(self, t, order: int):
        out = np.zeros(np.shape(t))
        for term in self.terms:
            out = out + term.derivative(t, order)
        return out


@dataclass(frozen=True)
class Recorded:
    """Sampled signal with no closed form; only measurable, never differentiable."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values) or not self.times:
            raise InvalidInputError("recorded signal needs equal-length, non-empty columns")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise InvalidInputError("recorded times must be strictly increasing")

    def derivative(self, t, order: int):
        raise InvalidInputError("recorded signals have no analytic derivatives")

    def buffer(self) -> "DelayBuffer":
        buf = DelayBuffer()
        for t, v in zip(self.times, self.values):
            buf.append(t, v)
        return buf


SignalForm = Union[Sine, Polynomial, SumOfSines, Recorded]


@dataclass(frozen=True)
class NoiseSpec:
    """Additive measurement noise: ``uniform`` on [-amplitude, amplitude] or
    ``gaussian`` with standard deviation ``amplitude``."""

    kind: str = "uniform"
    amplitude: float = DEFAULT_NOISE_AMPLITUDE
    seed: int = DEFAULT_NOISE_SEED

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian"):
            raise InvalidInputError(f"unknown noise kind {self.kind!r}")
        if not self.amplitude >= 0:
            raise InvalidInputError(f"noise amplitude must be >= 0, got {self.amplitude}")


@dataclass(frozen=True)
class SignalSpec:
    form: SignalForm
    delta: float = 0.0
    noise: Optional[NoiseSpec] = None

    def __post_init__(self):
        if not isinstance(self.form, (Sine, Polynomial, SumOfSines, Recorded)):
            raise InvalidInputError(f"unsupported signal form {type(self.form).__name__}")
        if not self.delta >= 0 or not math.isfinite(self.delta):
            raise InvalidInputError(f"delay must be non-negative and finite, got {self.delta}")

    @property
    def analytic(self) -> bool:
        return not isinstance(self.form, Recorded)


def truth(spec: SignalSpec, t, order: int = 0):
    """Exact ``v^(order)(t)``; vectorized over ``t``."""
    if order < 0:
        raise InvalidInputError(f"derivative order must be >= 0, got {order}")
    out = spec.form.derivative(t, order)
    return float(out) if np.ndim(out) == 0 else out


def delayed(spec: SignalSpec, t):
    """Noise-free delayed signal ``v(t - delta)``; vectorized over ``t``."""
    if isinstance(spec.form, Recorded):
        query = np.asarray(t, dtype=float) - spec.delta
        times = spec.form.times
        if np.any(query < times[0]):
            raise BufferUnderflowError(
                f"query time {float(np.min(query))} precedes earliest sample {times[0]}"
            )
        if np.any(query > times[-1]):
            raise InvalidInputError(
                f"query time {float(np.max(query))} is after latest sample {times[-1]}"
            )
        out = np.interp(query, times, spec.form.values)
    else:
        # closed forms extend to negative arguments, so no zero-hold pre-history
        out = spec.form.derivative(np.asarray(t, dtype=float) - spec.delta, 0)
    return float(out) if np.ndim(out) == 0 else out


class NoiseStream:
    """Deterministic per-run noise source.

    Values come from ``numpy.random.default_rng(seed)`` in draw order.
    ``at(t)`` memoizes by time so repeated queries agree; ``draw(count)``
    pulls a block for an integration grid.
    """

    def __init__(self, noise: Optional[NoiseSpec]):
        self.noise = noise
        self._rng = np.random.default_rng(noise.seed) if noise is not None else None
        self._memo: dict[float, float] = {}

    def draw(self, count: int) -> np.ndarray:
        if self.noise is None:
            return np.zeros(count)
        if self.noise.kind == "uniform":
            return self._rng.uniform(-self.noise.amplitude, self.noise.amplitude, size=count)
        return self._rng.normal(0.0, self.noise.amplitude, size=count)

    def at(self, t: float) -> float:
        if t not in self._memo:
            self._memo[t] = float(self.draw(1)[0])
        return self._memo[t]


def measure(spec: SignalSpec, t: float, noise: Optional[NoiseStream] = None) -> float:
    """Delayed, noisy measurement ``v(t - delta) + noise(t)``."""
    if t < 0:
        raise InvalidInputError(f"measurement queried at negative time {t}")
    value = delayed(spec, t)
    if spec.noise is not None:
        if noise is None:
            raise InvalidInputError("noisy signal measured without a NoiseStream")
        value += noise.at(t)
    return value


class DelayBuffer:
    """Time-ordered sample buffer answering delayed queries by linear
    interpolation. ``maxlen`` bounds memory for streamed input."""

    def __init__(self, maxlen: Optional[int] = None):
        self._t: deque[float] = deque(maxlen=maxlen)
        self._v: deque[float] = deque(maxlen=maxlen)

    def __len__(self):
        return len(self._t)

    def append(self, t: float, value: float) -> None:
        if self._t and t <= self._t[-1]:
            raise InvalidInputError(f"sample time {t} not after last sample {self._t[-1]}")
        self._t.append(float(t))
        self._v.append(float(value))

    def sample(self, t: float, delta: float) -> float:
        return delay_buffer_sample(self, t, delta)


def delay_buffer_sample(buffer: DelayBuffer, t: float, delta: float) -> float:
    """Linear interpolation of ``buffer`` at ``t - delta``; exact on grid points."""
    query = t - delta
    times = buffer._t
    if not times or query < times[0]:
        start = times[0] if times else None
        raise BufferUnderflowError(f"query time {query} precedes earliest sample {start}")
    if query > times[-1]:
        raise InvalidInputError(f"query time {query} is after latest sample {times[-1]}")
    idx = bisect.bisect_left(times, query)
    if times[idx] == query:
        return buffer._v[idx]
    t0, t1 = times[idx - 1], times[idx]
    v0, v1 = buffer._v[idx - 1], buffer._v[idx]
    w = (query - t0) / (t1 - t0)
    return v0 + w * (v1 - v0)


def load_recorded_csv(path) -> Recorded:
    """Read a two-column ``time,value`` CSV with a header row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    if not rows:
        raise InvalidInputError(f"{path}: no samples")
    times, values = zip(*rows)
    return Recorded(tuple(times), tuple(values))
