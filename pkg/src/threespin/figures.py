"""Data behind figures 2-6, one CSV per panel."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .csvio import columns_to_csv, write_atomic
from .dynamics import DEFAULT_SAMPLE_STEP, sample_times
from .liouvillian import omega_eigenvalues
from .model import ModelParams
from .observables import observable_columns
from .runner import evolve

LONG_T = 90 * math.pi
SHORT_T = 10 * math.pi

# panel -> (t_max, channels); "sweep" marks the Re(omega) vs theta panel
PANELS_OPEN = {
    "a": (LONG_T, ("m2", "m3")),
    "b": (SHORT_T, ("m2", "m3")),
    "c": (SHORT_T, ("s_tot", "s_cur", "s_reg")),
    "d": (SHORT_T, ("n3L", "n3L1")),
}


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    params: ModelParams
    panels: dict


FIGURES = {
    2: FigureSpec(2, ModelParams(math.pi / 2, 0.0, 0.0), {
        "a": (2 * math.pi, ("m2", "m3")),
        "b": (2 * math.pi, ("m2", "m3")),
        "c": (2 * math.pi, ("s_reg",)),
        "d": (2 * math.pi, ("n3L", "n3L1")),
    }),
    3: FigureSpec(3, ModelParams(math.pi / 2, 0.1, 0.0), PANELS_OPEN),
    4: FigureSpec(4, ModelParams(math.pi / 2, 0.1, -1.0), PANELS_OPEN),
    5: FigureSpec(5, ModelParams(math.pi / 10, 1.0, -1.0), {**PANELS_OPEN, "b": "sweep"}),
    6: FigureSpec(6, ModelParams(math.pi / 2, 0.1, -1.0), {"": (SHORT_T, ("chirality",))}),
}


def omega_sweep(p: ModelParams, n: int = 181) -> dict:
    """Re(omega_1) < ... < Re(omega_4) on a theta grid over [0, pi]."""
    thetas = np.linspace(0.0, math.pi, n)
    re = np.array([
        omega_eigenvalues(ModelParams(th, p.epsilon, p.mu)).omegas.real for th in thetas
    ])
    re.sort(axis=1)
    out = {"theta": thetas}
    for i in range(4):
        out[f"re_omega{i + 1}"] = re[:, i]
    return out


def figure_panels(figure_id: int, sample_step: float = DEFAULT_SAMPLE_STEP) -> dict:
    """panel name -> ordered columns for one figure."""
    try:
        spec = FIGURES[figure_id]
    except KeyError:
        raise ValueError(f"unknown figure {figure_id}; choose from {sorted(FIGURES)}") from None
    cache = {}
    panels = {}
    for name, panel in spec.panels.items():
        if panel == "sweep":
            panels[name] = omega_sweep(spec.params)
            continue
        t_max, channels = panel
        if t_max not in cache:
            times = sample_times(t_max, sample_step)
            cache[t_max] = observable_columns(times, evolve(spec.params, times, "auto"))
        cols = cache[t_max]
        panels[name] = {"t": cols["t"], **{ch: cols[ch] for ch in channels}}
    return panels


def write_figure(figure_id: int, out_dir, sample_step: float = DEFAULT_SAMPLE_STEP) -> list[str]:
    paths = []
    for name, cols in figure_panels(figure_id, sample_step).items():
        path = os.path.join(os.fspath(out_dir), f"fig{figure_id}{name}.csv")
        write_atomic(path, columns_to_csv(cols))
        paths.append(path)
    return paths
