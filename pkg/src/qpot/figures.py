"""Figure-reproduction pipeline: energy/density CSVs plus rendered PNGs.

Emits fig1..fig6 (energy splits and energy densities for the linear-well
state and oscillator levels 0 and 2), and fig_a (the (k, m) contribution
lattice of the degree-4 monomial).  Each CSV gets a PNG rendered next to
it.  Figure grids are the state default grid with Newton-refined density
maxima spliced in, so tangency holds at the CSV's own maximum rows; the
0.5 scaling of Q is applied only here, never in library values.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .energetics import EnergyProfile, density_maxima, profile_for_state
from .expansion import MOMENTUM, PolynomialOperator, km_lattice
from .output import fmt, write_text
from .states import NATURAL, StateField, UnitSystem, airy_state, qho_state

ENERGY_FIGURES = {"fig1": "airy", "fig3": "qho:0", "fig5": "qho:2"}
DENSITY_FIGURES = {"fig2": "airy", "fig4": "qho:0", "fig6": "qho:2"}
LATTICE_DEGREE = 4


def thread_cap(n_jobs: int) -> int:
    """Worker count for figure profiling; QPOT_THREADS caps it."""
    cap = os.environ.get("QPOT_THREADS", "")
    try:
        limit = int(cap)
    except ValueError:
        limit = n_jobs
    return max(1, min(n_jobs, limit))


def _figure_state(label: str, units: UnitSystem) -> StateField:
    if label == "airy":
        return airy_state(0.0, units=units)
    return qho_state(int(label.split(":")[1]), units=units)


def _figure_grid(state: StateField) -> np.ndarray:
    base = state.default_grid()
    return np.unique(np.concatenate([base, density_maxima(state, base)]))


def _headers(name: str, profile: EnergyProfile) -> list[str]:
    return [
        f"# figure: {name}",
        f"# state: {profile.state_label}",
        f"# representation: {profile.representation}",
        f"# units: {profile.units}",
        f"# E: {fmt(profile.energy)}",
    ]


def energy_csv(name: str, profile: EnergyProfile) -> str:
    lines = _headers(name, profile)
    lines.append("x,rho,q_half,disp,loc,mask")
    for i in range(len(profile.axis)):
        lines.append(",".join((
            fmt(profile.axis[i]), fmt(profile.rho[i]),
            fmt(0.5 * profile.Q[i]), fmt(profile.disp[i]), fmt(profile.loc[i]),
            "1" if profile.mask[i] else "0")))
    return "\n".join(lines) + "\n"


def density_csv(name: str, profile: EnergyProfile) -> str:
    lines = _headers(name, profile)
    lines.append("x,rho,q_density_half,disp_density,loc_density")
    for i in range(len(profile.axis)):
        lines.append(",".join((
            fmt(profile.axis[i]), fmt(profile.rho[i]),
            fmt(0.5 * profile.Q_density[i]), fmt(profile.disp_density[i]),
            fmt(profile.loc_density[i]))))
    return "\n".join(lines) + "\n"


def lattice_csv(degree: int = LATTICE_DEGREE) -> str:
    op = PolynomialOperator.monomial(degree, "x")
    lines = [f"# figure: fig_a", f"# operator: {op}", "k,m,kind"]
    for point in km_lattice(op):
        lines.append(f"{point.k},{point.m},{point.kind}")
    return "\n".join(lines) + "\n"


def _plt():
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt
    return plt


def _energy_png(path, profile: EnergyProfile, name: str) -> None:
    plt = _plt()
    finite = np.concatenate([arr[np.isfinite(arr)] for arr in
                             (0.5 * profile.Q, profile.disp, profile.loc)])
    lo, hi = np.percentile(finite, [2.0, 98.0])
    pad = 0.15 * (hi - lo) + 1e-3
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    ax.plot(profile.axis, profile.rho, color="0.55", lw=1.0,
            label="density (unit max)")
    ax.plot(profile.axis, 0.5 * profile.Q, lw=1.4, label="0.5 Q")
    ax.plot(profile.axis, profile.disp, lw=1.2, label="dispersion")
    ax.plot(profile.axis, profile.loc, lw=1.2, label="localisation")
    ax.set_ylim(lo - pad, hi + pad)
    ax.set_xlabel(profile.representation == "configuration" and "x" or "p")
    ax.set_ylabel("energy")
    ax.set_title(f"{name}: {profile.state_label} energy split")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _density_png(path, profile: EnergyProfile, name: str) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    ax.plot(profile.axis, profile.rho, color="0.55", lw=1.0,
            label="density (unit max)")
    ax.plot(profile.axis, 0.5 * profile.Q_density, lw=1.4,
            label="0.5 Q density")
    ax.plot(profile.axis, profile.disp_density, lw=1.2,
            label="dispersion density")
    ax.plot(profile.axis, profile.loc_density, lw=1.2,
            label="localisation density")
    ax.set_xlabel(profile.representation == "configuration" and "x" or "p")
    ax.set_ylabel("energy density")
    ax.set_title(f"{name}: {profile.state_label} energy densities")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _lattice_png(path, degree: int) -> None:
    plt = _plt()
    points = km_lattice(PolynomialOperator.monomial(degree, "x"))
    fig, ax = plt.subplots(figsize=(4.8, 4.2), dpi=120)
    for kind, marker in (("quantum", "o"), ("classical", "s")):
        ks = [p.k for p in points if p.kind == kind]
        ms = [p.m for p in points if p.kind == kind]
        ax.scatter(ks, ms, marker=marker, s=70, label=kind)
    ax.set_xlabel("k (phase power)")
    ax.set_ylabel("m (derivative order)")
    ax.set_xticks(range(degree + 1))
    ax.set_yticks(range(degree + 1))
    ax.set_title(f"fig_a: contribution lattice, degree {degree}")
    ax.legend(loc="upper left", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_figures(out_dir, units: UnitSystem | None = None) -> list[str]:
    """Write all figure CSVs and PNGs into out_dir; returns written paths.

    Profile computations fan out across threads (serialized writes)."""
    units = units if units is not None else NATURAL
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    labels = ("airy", "qho:0", "qho:2")

    def build(label: str):
        state = _figure_state(label, units)
        return label, profile_for_state(state, _figure_grid(state))

    workers = thread_cap(len(labels))
    if workers == 1:
        profiles = dict(build(label) for label in labels)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            profiles = dict(pool.map(build, labels))

    written: list[str] = []
    for name in ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6"):
        label = ENERGY_FIGURES.get(name) or DENSITY_FIGURES[name]
        profile = profiles[label]
        csv_path = out / f"{name}.csv"
        png_path = out / f"{name}.png"
        if name in ENERGY_FIGURES:
            write_text(csv_path, energy_csv(name, profile))
            _energy_png(png_path, profile, name)
        else:
            write_text(csv_path, density_csv(name, profile))
            _density_png(png_path, profile, name)
        written.extend([str(csv_path), str(png_path)])
    csv_path = out / "fig_a.csv"
    write_text(csv_path, lattice_csv())
    png_path = out / "fig_a.png"
    _lattice_png(png_path, LATTICE_DEGREE)
    written.extend([str(csv_path), str(png_path)])
    return written
