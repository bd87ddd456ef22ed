"""Running scenarios and turning traces into error metrics, order estimates
and method comparisons."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import AnalysisError, ConfigError, InvalidInputError
from ..integrator import Trace, integrate
from ..signals import Sine, truth
from .scenario import Scenario

WORKERS_ENV = "DELAYDIFF_WORKERS"

# output labels: stage-1 against the delayed truth, stage-1 and stage-2 against the present truth
X1_DELAYED = "x1_vs_delayed"
X1 = "x1"
X2 = "x2"


@dataclass(frozen=True)
class ErrorStat:
    sup: float
    rms: float


@dataclass(frozen=True)
class ErrorReport:
    window: tuple[float, float]
    errors: dict

    def get(self, i: int, output: str) -> ErrorStat:
        return self.errors[(i, output)]

    def to_dict(self) -> dict:
        return {
            "window": list(self.window),
            "errors": [
                {"i": i, "output": out, "sup": stat.sup, "rms": stat.rms}
                for (i, out), stat in sorted(self.errors.items())
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ErrorReport":
        return cls(
            window=tuple(doc["window"]),
            errors={(e["i"], e["output"]): ErrorStat(e["sup"], e["rms"]) for e in doc["errors"]},
        )


@dataclass(frozen=True)
class RunResult:
    scenario: Scenario
    trace: Trace
    report: ErrorReport


def window_mask(t: np.ndarray, window) -> np.ndarray:
    start, end = window
    return (t >= start) & (t <= end)


def _stat(err: np.ndarray) -> ErrorStat:
    return ErrorStat(float(np.max(np.abs(err))), float(np.sqrt(np.mean(err**2))))


def error_report(scn: Scenario, trace: Trace) -> ErrorReport:
    if not scn.signal.analytic:
        raise InvalidInputError("error metrics need an analytic signal")
    mask = window_mask(trace.t, scn.metrics_window)
    if not mask.any():
        raise ConfigError("metrics window contains no samples", field="metrics_window")
    t = trace.t[mask]
    delta = scn.differentiator.delta
    errors = {}
    for i in range(1, scn.n + 1):
        now = trace.truth[mask, i - 1]
        before = truth(scn.signal, t - delta, i - 1)
        errors[(i, X1_DELAYED)] = _stat(trace.x1[mask, i - 1] - before)
        errors[(i, X1)] = _stat(trace.x1[mask, i - 1] - now)
        errors[(i, X2)] = _stat(trace.x2[mask, i - 1] - now)
    return ErrorReport(tuple(scn.metrics_window), errors)


def run(scn: Scenario) -> RunResult:
    trace = integrate(scn.differentiator, scn.signal, scn.integrator, init=scn.init)
    report = error_report(scn, trace) if scn.signal.analytic else ErrorReport(scn.metrics_window, {})
    return RunResult(scn, trace, report)


def _workers(workers):
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, workers)


def _sweep_point(scn: Scenario) -> ErrorReport:
    return run(scn).report


@dataclass(frozen=True)
class OrderEstimate:
    i: int
    slope: float
    intercept: float
    r_squared: float
    expected: int


def loglog_fit(x, y) -> tuple[float, float, float]:
    """Least-squares slope, intercept and R^2 of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if len(lx) < 2 or np.ptp(lx) == 0:
        raise AnalysisError("regression needs at least two distinct abscissae")
    if not np.all(np.isfinite(ly)):
        raise AnalysisError("errors must be positive for a log-log fit")
    fit = stats.linregress(lx, ly)
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2)


def sweep_delta(base: Scenario, deltas, workers=None):
    """Empirical accuracy order of each second-stage output in the delay.

    Returns ``(estimates, table)``; ``table`` maps each delay to the sup
    errors of ``x_{i,2}`` for i = 1..n-1, in ascending delay order.
    """
    deltas = sorted(float(d) for d in deltas)
    if len(deltas) < 3:
        raise AnalysisError(f"need at least 3 delays, got {len(deltas)}")
    if not all(0 < d < 1 for d in deltas):
        raise AnalysisError(f"delays must lie in (0, 1), got {deltas}")
    if np.ptp(np.log(deltas)) == 0:
        raise AnalysisError("delays have zero variance")

    scenarios = [base.with_delta(d) for d in deltas]
    nw = _workers(workers)
    if nw == 1:
        reports = [_sweep_point(s) for s in scenarios]
    else:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            reports = list(pool.map(_sweep_point, scenarios))

    n = base.n
    table = {d: [r.get(i, X2).sup for i in range(1, n)] for d, r in zip(deltas, reports)}
    estimates = []
    for i in range(1, n):
        slope, intercept, r2 = loglog_fit(deltas, [table[d][i - 1] for d in deltas])
        estimates.append(OrderEstimate(i, slope, intercept, r2, n - i + 1))
    return estimates, table


@dataclass(frozen=True)
class ComparisonRow:
    i: int
    baseline_sup: float
    baseline_rms: float
    two_step_sup: float
    two_step_rms: float

    @property
    def ratio(self) -> float:
        return self.two_step_sup / self.baseline_sup if self.baseline_sup else math.nan


@dataclass(frozen=True)
class Comparison:
    rows: list
    anchor: float

    def to_dict(self) -> dict:
        return {
            "delayed_tracking_anchor": self.anchor,
            "rows": [
                {
                    "i": r.i,
                    "baseline_sup": r.baseline_sup,
                    "baseline_rms": r.baseline_rms,
                    "two_step_sup": r.two_step_sup,
                    "two_step_rms": r.two_step_rms,
                    "ratio": r.ratio,
                }
                for r in self.rows
            ],
        }


def delayed_tracking_anchor(scn: Scenario) -> float:
    """Peak of ``|sin(w t) - sin(w (t - delta))|`` scaled by amplitude: 2 A sin(w delta / 2).

    NaN for non-sinusoidal inputs, where no closed form applies.
    """
    form = scn.signal.form
    if not isinstance(form, Sine):
        return math.nan
    return 2 * abs(form.amplitude) * abs(math.sin(form.frequency * scn.differentiator.delta / 2))


def compare(baseline: Scenario, two_step: Scenario) -> Comparison:
    """Errors against the present truth: baseline ``x_i`` versus ``x_{i,2}``."""
    if baseline.signal != two_step.signal:
        raise ConfigError("scenarios use different signals", field="signal")
    if baseline.integrator.t_end != two_step.integrator.t_end:
        raise ConfigError("scenarios use different horizons", field="integrator.t_end")
    if tuple(baseline.metrics_window) != tuple(two_step.metrics_window):
        raise ConfigError("scenarios use different metrics windows", field="metrics_window")
    if baseline.n != two_step.n:
        raise ConfigError("scenarios use different orders", field="differentiator.k")
    rb = run(baseline).report
    rt = run(two_step).report
    rows = []
    for i in range(1, baseline.n):
        b = rb.get(i, X1)
        t = rt.get(i, X2)
        rows.append(ComparisonRow(i, b.sup, b.rms, t.sup, t.rms))
    return Comparison(rows, delayed_tracking_anchor(baseline))


def sinusoid_response(t, y, omega: float) -> complex:
    """Complex amplitude ``c`` such that ``y ~ Im(c exp(j omega t))`` in least squares.

    For an input ``sin(omega t)`` this is the empirical transfer-function value.
    """
    t = np.asarray(t, dtype=float)
    A = np.column_stack([np.sin(omega * t), np.cos(omega * t), np.ones_like(t)])
    (a, b, _), *_ = np.linalg.lstsq(A, np.asarray(y, dtype=float), rcond=None)
    # a sin + b cos = Im((a + j b) e^{j w t})
    return complex(a, b)
