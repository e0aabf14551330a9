"""Run configuration and trajectory-to-columns plumbing shared by the CLI."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .dynamics import DEFAULT_DT, MAX_DT, propagate_expm, propagate_rk4, propagate_unitary, sample_times
from .liouvillian import lindbladian, omega_eigenvalues
from .model import ModelParams, build_hamiltonian, initial_state
from .observables import COMPLEX_CHANNELS, REAL_CHANNELS, observable_columns

METHOD_CHOICES = ("analytic", "rk4", "expm", "unitary", "auto")
_RHO_CHANNEL = re.compile(r"^rho_([1-8])_([1-8])$")


class ConfigError(ValueError):
    pass


def is_complex_channel(name: str) -> bool:
    return name in COMPLEX_CHANNELS or bool(_RHO_CHANNEL.match(name))


def check_channel(name: str) -> str:
    if name in REAL_CHANNELS or is_complex_channel(name):
        return name
    raise ConfigError(
        f"unknown observable {name!r}; choose from {', '.join(REAL_CHANNELS + COMPLEX_CHANNELS)} or rho_J_K"
    )


@dataclass
class RunConfig:
    params: ModelParams
    t_max: float = 10.0
    dt: float = DEFAULT_DT
    sample_every: int = 10
    method: str = "auto"
    observables: list = field(default_factory=lambda: list(REAL_CHANNELS))
    output_path: str | None = None

    def __post_init__(self):
        if not 0 < self.dt <= MAX_DT:
            raise ConfigError(f"dt must lie in (0, {MAX_DT}], got {self.dt}")
        if self.t_max < 0:
            raise ConfigError("t_max must be >= 0")
        if self.sample_every < 1:
            raise ConfigError("sample_every must be >= 1")
        if self.method not in METHOD_CHOICES:
            raise ConfigError(f"method must be one of {METHOD_CHOICES}")
        self.observables = [check_channel(c) for c in self.observables]

    @property
    def sample_step(self) -> float:
        return self.dt * self.sample_every


def resolve_method(p: ModelParams, method: str = "auto") -> str:
    if method != "auto":
        return method
    if p.epsilon == 0:
        return "unitary"
    if not omega_eigenvalues(p).degenerate:
        return "analytic"
    return "expm"


def evolve(p: ModelParams, times, method: str, dt: float = DEFAULT_DT):
    """States at ``times`` (uniform grid starting at 0) by the given method."""
    times = np.asarray(times, dtype=float)
    method = resolve_method(p, method)
    if method == "unitary":
        if p.epsilon != 0:
            raise ConfigError("unitary propagation needs epsilon = 0")
        return propagate_unitary(build_hamiltonian(p), initial_state(), times).states
    if method == "analytic":
        if p.epsilon == 0:
            raise ConfigError("analytic method needs epsilon > 0")
        return analytic.assemble_analytic_state(p, times).dense()
    s = lindbladian(p)
    if method == "expm":
        return propagate_expm(s, initial_state(), times).states
    if method == "rk4":
        step = times[1] - times[0] if len(times) > 1 else dt
        every = max(1, int(round(step / dt)))
        traj = propagate_rk4(s, initial_state(), times[-1] if len(times) else 0.0, step / every, every)
        return traj.states
    raise ConfigError(f"unknown method {method!r}")


def simulate_columns(cfg: RunConfig) -> dict:
    """Ordered mapping of channel name to column (t first)."""
    times = sample_times(cfg.t_max, cfg.sample_step)
    states = evolve(cfg.params, times, cfg.method, cfg.dt)
    cols = observable_columns(times, states)
    out = {"t": times}
    for name in cfg.observables:
        m = _RHO_CHANNEL.match(name)
        out[name] = states[:, int(m[1]) - 1, int(m[2]) - 1] if m else cols[name]
    return out
