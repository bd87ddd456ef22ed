"""Writing traces, reports and per-figure plot data to disk."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import InvalidInputError
from ..integrator import Trace, read_csv, write_csv
from ..signals import truth
from .analysis import Comparison, ErrorReport
from .scenario import Scenario

# (stage, derivative order) plotted in each figure; stage 0 is the noisy input
FIGURES = {
    "fig1": (1, 0),
    "fig2": (1, 1),
    "fig3": (1, 2),
    "fig4": (2, 0),
    "fig5": (2, 1),
    "fig6": (2, 2),
    "fig7": (0, 0),
    "fig8": (2, 0),
    "fig9": (2, 1),
    "fig10": (2, 2),
}
FIGURE_GROUPS = {
    "baseline": ("fig1", "fig2", "fig3"),
    "two_step": ("fig4", "fig5", "fig6"),
    "noisy": ("fig7", "fig8", "fig9", "fig10"),
}


def figure_data(trace: Trace, scn: Scenario, fig: str):
    """Header and columns for one figure: time, references, then the estimate."""
    if fig not in FIGURES:
        raise InvalidInputError(f"unknown figure {fig!r}")
    stage, order = FIGURES[fig]
    if stage == 0:
        return ["t", "v_delayed", "m"], np.column_stack([trace.t, trace.v_delayed, trace.m])
    now = trace.truth[:, order]
    before = truth(scn.signal, trace.t - scn.differentiator.delta, order)
    est = (trace.x1 if stage == 1 else trace.x2)[:, order]
    header = ["t", f"truth_d{order}", f"delayed_truth_d{order}", f"x{order + 1}_s{stage}"]
    return header, np.column_stack([trace.t, now, before, est])


def emit(obj, path, fmt: str = "csv", scenario: Scenario = None) -> Path:
    """Write ``obj`` to ``path``.

    ``csv``: a Trace, full precision. ``json``: an ErrorReport or Comparison.
    ``fig1``..``fig10``: the columns of one figure, needs ``scenario``.
    """
    path = Path(path)
    if fmt == "csv":
        if not isinstance(obj, Trace):
            raise InvalidInputError("csv output needs a Trace")
        obj.to_csv(path)
    elif fmt == "json":
        if not isinstance(obj, (ErrorReport, Comparison)):
            raise InvalidInputError("json output needs an ErrorReport or Comparison")
        path.write_text(json.dumps(obj.to_dict(), indent=2) + "\n")
    elif fmt in FIGURES:
        if scenario is None:
            raise InvalidInputError("figure extraction needs the scenario")
        header, data = figure_data(obj, scenario, fmt)
        write_csv(path, header, data)
    else:
        raise InvalidInputError(f"unknown output format {fmt!r}")
    return path


def load_report(path) -> ErrorReport:
    return ErrorReport.from_dict(json.loads(Path(path).read_text()))


def load_figure(path):
    return read_csv(path)
