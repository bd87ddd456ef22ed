"""Scenario bundles and their versioned JSON representation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from ..dynamics import DifferentiatorSpec
from ..errors import ConfigError, DelayDiffError
from ..gains import ConstantGain, GainSchedule, GainVector, verify_hurwitz
from ..integrator import IntegratorConfig
from ..signals import NoiseSpec, Polynomial, Recorded, SignalSpec, Sine, SumOfSines, load_recorded_csv

SCHEMA_VERSION = 1
KINDS = ("two_step", "baseline")
GOLDEN = ("fig1-3", "fig4-6", "fig7-10", "sweep-base")


@dataclass(frozen=True)
class Scenario:
    name: str
    differentiator: DifferentiatorSpec
    signal: SignalSpec
    integrator: IntegratorConfig
    metrics_window: tuple[float, float]
    kind: str = "two_step"
    init: str = "zero"
    acceptance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}", field="kind")
        start, end = self.metrics_window
        if not 0 <= start < end <= self.integrator.t_end:
            raise ConfigError(
                f"metrics window {self.metrics_window} not inside [0, {self.integrator.t_end}]",
                field="metrics_window",
            )
        if start < self.differentiator.schedule.settle_time:
            raise ConfigError(
                f"metrics window starts at {start}, before the gain ramp ends "
                f"at {self.differentiator.schedule.settle_time}",
                field="metrics_window",
            )
        if self.signal.delta != self.differentiator.delta:
            raise ConfigError("signal and differentiator delays differ", field="differentiator.delta")

    @property
    def n(self) -> int:
        return self.differentiator.n

    def with_delta(self, delta: float) -> "Scenario":
        return replace(
            self,
            name=f"{self.name}@delta={delta:g}",
            differentiator=replace(self.differentiator, delta=delta),
            signal=replace(self.signal, delta=delta),
        )


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"missing field {where}{key}", field=f"{where}{key}")
    return doc[key]


def _schedule_from(doc: dict):
    kind = _require(doc, "type", "differentiator.schedule.")
    if kind == "ramp":
        return GainSchedule(
            R0=float(_require(doc, "R0", "differentiator.schedule.")),
            p=float(_require(doc, "p", "differentiator.schedule.")),
            t_max=float(_require(doc, "t_max", "differentiator.schedule.")),
            R_min=float(doc.get("R_min", 1e-3)),
        )
    if kind == "constant":
        if "eps" in doc:
            return ConstantGain(float(doc["eps"]))
        return ConstantGain(1.0 / float(_require(doc, "rate", "differentiator.schedule.")))
    raise ConfigError(f"unknown schedule type {kind!r}", field="differentiator.schedule.type")


def _schedule_to(sched) -> dict:
    if isinstance(sched, GainSchedule):
        return {"type": "ramp", "R0": sched.R0, "p": sched.p, "t_max": sched.t_max, "R_min": sched.R_min}
    return {"type": "constant", "eps": sched.eps}


def _form_from(doc: dict, base: Optional[Path]):
    kind = _require(doc, "type", "signal.form.")
    if kind == "sine":
        return Sine(float(doc.get("amplitude", 1.0)), float(doc.get("frequency", 1.0)), float(doc.get("phase", 0.0)))
    if kind == "polynomial":
        return Polynomial(tuple(_require(doc, "coefficients", "signal.form.")))
    if kind == "sum_of_sines":
        return SumOfSines(tuple(_form_from({**t, "type": "sine"}, base) for t in _require(doc, "terms", "signal.form.")))
    if kind == "recorded":
        path = Path(_require(doc, "path", "signal.form."))
        if base is not None and not path.is_absolute():
            path = base / path
        return load_recorded_csv(path)
    raise ConfigError(f"unknown signal form {kind!r}", field="signal.form.type")


def _form_to(form) -> dict:
    if isinstance(form, Sine):
        return {"type": "sine", "amplitude": form.amplitude, "frequency": form.frequency, "phase": form.phase}
    if isinstance(form, Polynomial):
        return {"type": "polynomial", "coefficients": list(form.coefficients)}
    if isinstance(form, SumOfSines):
        return {"type": "sum_of_sines", "terms": [_form_to(t) for t in form.terms]}
    raise ConfigError("recorded signals are referenced by path and cannot be re-serialized", field="signal.form")


def scenario_from_dict(doc: dict, base: Optional[Path] = None) -> Scenario:
    """Build a validated Scenario; the gate on gains runs before anything else."""
    version = doc.get("schema")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {version!r}", field="schema")
    diff = _require(doc, "differentiator", "")
    k = _require(diff, "k", "differentiator.")
    try:
        gv = GainVector(tuple(k))
    except DelayDiffError as exc:
        raise ConfigError(str(exc), field="differentiator.k") from exc
    check = verify_hurwitz(gv)
    if not check.stable:
        raise ConfigError(f"gains {list(gv.k)} are not Hurwitz", field="differentiator.k")

    try:
        delta = float(_require(diff, "delta", "differentiator."))
        spec = DifferentiatorSpec(
            k=gv,
            delta=delta,
            delta_g=float(diff.get("delta_g", 0.0)),
            schedule=_schedule_from(_require(diff, "schedule", "differentiator.")),
        )
        sig = _require(doc, "signal", "")
        noise = sig.get("noise")
        signal = SignalSpec(
            form=_form_from(_require(sig, "form", "signal."), base),
            delta=delta,
            noise=NoiseSpec(**noise) if noise else None,
        )
        integ = doc.get("integrator", {})
        cfg = IntegratorConfig(
            dt=float(integ.get("dt", 1e-4)),
            t_end=float(integ.get("t_end", 20.0)),
            method=integ.get("method", "rk4"),
        )
        window = tuple(float(w) for w in doc.get("metrics_window", (10.0, 20.0)))
        if len(window) != 2:
            raise ConfigError("metrics_window needs two entries", field="metrics_window")
        return Scenario(
            name=doc.get("name", "unnamed"),
            differentiator=spec,
            signal=signal,
            integrator=cfg,
            metrics_window=window,
            kind=doc.get("kind", "two_step"),
            init=doc.get("init", "zero"),
            acceptance=doc.get("acceptance", {}),
        )
    except ConfigError:
        raise
    except (DelayDiffError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def scenario_to_dict(scn: Scenario) -> dict[str, Any]:
    d = scn.differentiator
    doc = {
        "schema": SCHEMA_VERSION,
        "name": scn.name,
        "kind": scn.kind,
        "differentiator": {
            "k": list(d.k.k),
            "delta": d.delta,
            "delta_g": d.delta_g,
            "schedule": _schedule_to(d.schedule),
        },
        "signal": {"form": _form_to(scn.signal.form)},
        "integrator": {"dt": scn.integrator.dt, "t_end": scn.integrator.t_end, "method": scn.integrator.method},
        "metrics_window": list(scn.metrics_window),
        "init": scn.init,
    }
    if scn.signal.noise is not None:
        n = scn.signal.noise
        doc["signal"]["noise"] = {"kind": n.kind, "amplitude": n.amplitude, "seed": n.seed}
    if scn.acceptance:
        doc["acceptance"] = scn.acceptance
    return doc


def load_scenario(path) -> Scenario:
    """Load a scenario file, or a shipped golden scenario by name."""
    if str(path) in GOLDEN:
        text = resources.files("delaydiff.scenarios").joinpath(f"{path}.json").read_text()
        return scenario_from_dict(json.loads(text))
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_dict(doc, base=path.parent)


def save_scenario(scn: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scn), indent=2) + "\n")
