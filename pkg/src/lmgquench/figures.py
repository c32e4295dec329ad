"""Canned parameter sets for the published figures.

Each panel writes its data series under the output directory together with a
gnuplot script (``<panel>.gp``) that plots them. Nothing is rendered here.
"""
from __future__ import annotations

import math
import os

import numpy as np

from .model import ModelParams, build_hamiltonian
from .output import write_json, write_table
from .quench import InitialStateSpec, prepare_initial, quench_state
from .spectral import diagonalize
from .sweep import SweepPlan, fit_entropy_scaling, parse_grid, run_sweep

SIZE_LADDER = (100, 200, 400, 800, 1000)
SUPERPOSITION = InitialStateSpec.superposition(2 / math.sqrt(5), 1 / math.sqrt(5))


def _script(out, panel, xlabel, ylabel, curves, style="lines"):
    lines = [
        'set datafile separator ","',
        f'set xlabel "{xlabel}"',
        f'set ylabel "{ylabel}"',
        "set key autotitle columnhead",
    ]
    plots = [f"'{os.path.basename(path)}' using 1:2 with {style} title '{title}'" for path, title in curves]
    lines.append("plot " + ", \\\n     ".join(plots))
    path = os.path.join(out, f"{panel}.gp")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _fig1(out, fmt, n_jobs):
    files, curves = [], []
    for n, grid, stem in ((100, parse_grid("0:1.5:0.01"), "fig1_spectrum"), (500, parse_grid("0:1.5:0.01"), "fig1_inset")):
        rows = []
        for h in grid:
            eig = diagonalize(build_hamiltonian(ModelParams(n, float(h))))
            keep = slice(None) if n == 100 else np.abs(eig.values) < 10
            idx = np.arange(eig.dim)[keep]
            rows.extend((float(h), int(k), float(eig.values[k]), int(eig.parities[k])) for k in idx)
        files.append(write_table(out, stem, ("h", "index", "energy", "parity"), rows, fmt))
        curves.append((files[-1], stem))
    if fmt == "csv":
        files.append(_script(out, "fig1", "h", "E", [(f, t) for f, t in curves], style="points pt 7 ps 0.2"))
    return files


def _dynamics(out, fmt, panel, n, h_i, h_fs, spec, what):
    """Survival ('a') or work distribution ('b') curves for several h_f."""
    state = prepare_initial(ModelParams(n, h_i), spec)
    files, curves = [], []
    for h_f in h_fs:
        res = quench_state(state, ModelParams(n, h_f), survival=(what == "survival"))
        tag = f"{panel}_hf{h_f:g}"
        if what == "survival":
            f = write_table(out, tag, ("t", "L"), zip(res.survival.times, res.survival.values), fmt)
        else:
            d = res.distribution
            f = write_table(out, tag, ("W", "p"), zip(d.work, d.probabilities), fmt)
        files.append(f)
        curves.append((f, f"h_f={h_f:g}"))
    if fmt == "csv":
        if what == "survival":
            files.append(_script(out, panel, "t", "L(t)", curves))
        else:
            files.append(_script(out, panel, "W", "P_W", curves, style="impulses"))
    return files


def _states_work(out, fmt, panel, n, h_i, h_f, specs):
    files, curves = [], []
    for spec in specs:
        res = quench_state(prepare_initial(ModelParams(n, h_i), spec), ModelParams(n, h_f), survival=False)
        d = res.distribution
        tag = f"{panel}_{spec.kind.value.replace('+', 'p').replace('-', 'm')}"
        f = write_table(out, tag, ("W", "p"), zip(d.work, d.probabilities), fmt)
        files.append(f)
        curves.append((f, spec.label))
    if fmt == "csv":
        files.append(_script(out, panel, "W", "P_W", curves, style="impulses"))
    return files


def _entropy(out, fmt, panel, h_i, grid, sizes, specs, n_jobs, scaling=False):
    rows = run_sweep(SweepPlan(h_i, grid, sizes, specs, observables=("entropy",)), n_jobs=n_jobs)
    files, curves = [], []
    for spec in specs:
        for n in sizes:
            sel = [(r.hf, r.entropy) for r in rows if r.N == n and r.kind == spec.label]
            tag = f"{panel}_N{n}" if len(specs) == 1 else f"{panel}_{spec.kind.value.replace('+', 'p').replace('-', 'm')}_N{n}"
            f = write_table(out, tag, ("hf", "S_W"), sel, fmt)
            files.append(f)
            curves.append((f, f"{spec.label} N={n}"))
    if scaling:
        fit = fit_entropy_scaling(rows, kind=specs[0].label)
        files.append(write_json(os.path.join(out, f"{panel}_scaling.json"), fit.to_json()))
    if fmt == "csv":
        files.append(_script(out, panel, "h_f", "S_W", curves))
    return files


SYM = InitialStateSpec.symmetric_ground()
FSB = InitialStateSpec.fsb(+1)
EXC = InitialStateSpec.excited(1)
THREE = (0.6, 0.75, 0.9)

PANELS = {
    "fig1": _fig1,
    "fig2a": lambda o, f, j: _dynamics(o, f, "fig2a", 2000, 0.5, THREE, SYM, "survival"),
    "fig2b": lambda o, f, j: _dynamics(o, f, "fig2b", 2000, 0.5, THREE, SYM, "work"),
    "fig2c": lambda o, f, j: _entropy(o, f, "fig2c", 0.5, parse_grid("0.5:1.5:0.01"), SIZE_LADDER, (SYM,), j, scaling=True),
    "fig3a": lambda o, f, j: _dynamics(o, f, "fig3a", 2000, 0.5, THREE, FSB, "survival"),
    "fig3b": lambda o, f, j: _dynamics(o, f, "fig3b", 2000, 0.5, THREE, FSB, "work"),
    "fig3c": lambda o, f, j: _entropy(o, f, "fig3c", 0.5, parse_grid("0.5:1.5:0.01"), SIZE_LADDER, (FSB,), j),
    "fig4a": lambda o, f, j: _states_work(o, f, "fig4a", 1000, 0.25, 0.625, (SYM, FSB, SUPERPOSITION)),
    "fig4b": lambda o, f, j: _entropy(o, f, "fig4b", 0.25, parse_grid("0.25:1.25:0.01"), (1000,), (SYM, FSB, SUPERPOSITION), j),
    "fig5a": lambda o, f, j: _dynamics(o, f, "fig5a", 2000, 0.5, THREE, EXC, "survival"),
    "fig5b": lambda o, f, j: _dynamics(o, f, "fig5b", 2000, 0.5, (0.75,), EXC, "work"),
    "fig6a": lambda o, f, j: _dynamics(o, f, "fig6a", 2000, 1.5, (1.2, 1.0, 0.5), SYM, "survival"),
    "fig6b": lambda o, f, j: _dynamics(o, f, "fig6b", 2000, 1.5, (1.2, 1.0, 0.5), SYM, "work"),
    "fig6c": lambda o, f, j: _entropy(o, f, "fig6c", 1.5, parse_grid("0.5:1.5:0.01"), SIZE_LADDER, (SYM,), j),
}

FIGURES = {
    "fig1": ("fig1",),
    "fig2": ("fig2a", "fig2b", "fig2c"),
    "fig3": ("fig3a", "fig3b", "fig3c"),
    "fig4": ("fig4a", "fig4b"),
    "fig5": ("fig5a", "fig5b"),
    "fig6": ("fig6a", "fig6b", "fig6c"),
}


def panels_for(figure_id: str) -> tuple[str, ...]:
    if figure_id in PANELS:
        return (figure_id,)
    if figure_id in FIGURES:
        return FIGURES[figure_id]
    known = ", ".join(sorted(set(PANELS) | set(FIGURES)))
    raise ValueError(f"unknown figure id {figure_id!r}; known ids: {known}")


def reproduce(figure_id: str, out_dir: str, fmt: str = "csv", n_jobs: int = 1) -> list[str]:
    """Write the data series behind ``figure_id``; returns the written paths."""
    panels = panels_for(figure_id)
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for panel in panels:
        files.extend(PANELS[panel](out_dir, fmt, n_jobs))
    return files
