"""Deterministic text output: CSV and JSON writers shared by the CLI.

All floats render with 17 significant digits and '.' decimal separator;
lines end with '\n'; identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from .dynamics import DivergenceReport, TrajectoryRecord
from .energetics import EnergyProfile
from .states import StateField

FLOAT_FMT = "%.17g"


def fmt(value) -> str:
    return FLOAT_FMT % (float(value) + 0.0)  # +0.0 folds -0 into 0


def profile_csv(profile: EnergyProfile) -> str:
    lines = [
        f"# representation: {profile.representation}",
        f"# state: {profile.state_label}",
        f"# units: {profile.units}",
        f"# E: {fmt(profile.energy)}",
        "axis,rho,Q,disp,loc,Q_density,disp_density,loc_density,mask",
    ]
    for i in range(len(profile.axis)):
        lines.append(",".join((
            fmt(profile.axis[i]), fmt(profile.rho[i]), fmt(profile.Q[i]),
            fmt(profile.disp[i]), fmt(profile.loc[i]),
            fmt(profile.Q_density[i]), fmt(profile.disp_density[i]),
            fmt(profile.loc_density[i]), "1" if profile.mask[i] else "0")))
    return "\n".join(lines) + "\n"


def trajectory_csv(record: TrajectoryRecord) -> str:
    lines = [
        f"# representation: {record.representation}",
        f"# state: {record.state_label}",
        f"# units: {record.units}",
        f"# E: {fmt(record.energy)}",
        f"# dt: {fmt(record.dt)}",
        f"# method: {record.method}",
        "t,x,p,H",
    ]
    for i in range(len(record.t)):
        lines.append(",".join((fmt(record.t[i]), fmt(record.x[i]),
                               fmt(record.p[i]), fmt(record.H[i]))))
    if record.halted is not None:
        lines.append(f"# halted: {record.halted}")
    return "\n".join(lines) + "\n"


def state_csv(state: StateField, grid=None) -> str:
    if grid is None:
        grid = state.default_grid()
    grid = np.asarray(grid, dtype=float)
    r = np.asarray(state.r_derivative(grid, 0), dtype=float)
    s = np.asarray(state.s_derivative(grid, 0), dtype=float)
    lines = [
        f"# state: {state.label}",
        f"# E: {fmt(state.energy)}",
        f"# units: {state.units.describe()}",
        "axis_value,R,S,rho",
    ]
    for i in range(len(grid)):
        lines.append(",".join((fmt(grid[i]), fmt(r[i]), fmt(s[i]),
                               fmt(r[i] * r[i]))))
    return "\n".join(lines) + "\n"


def divergence_json(report: DivergenceReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def write_text(path, text: str) -> None:
    """Write with unix newlines regardless of platform."""
    with open(path, "w", newline="\n") as handle:
        handle.write(text)
