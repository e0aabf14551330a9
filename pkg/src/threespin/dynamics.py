"""Numerical propagation of the density matrix."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonDiagonalizable, NotAState, NotHermitian, StepSizeError, TraceDrift
from .linalg import eig_general, expm, expm_many, is_hermitian
from .liouvillian import Superoperator, unvec, vec
from .model import DIM

log = logging.getLogger(__name__)

DEFAULT_DT = 1e-3
DEFAULT_SAMPLE_STEP = 0.01
MAX_DT = 0.1
TRACE_DRIFT_TOL = 1e-6

METHODS = ("rk4", "expm", "unitary", "analytic")
_TRACE_TOL = {"rk4": 1e-8, "expm": 1e-10, "unitary": 1e-10, "analytic": 1e-10}


def check_density_matrix(rho, trace_tol: float = 1e-12, herm_tol: float = 1e-12, psd_tol: float = 1e-10):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM, DIM):
        raise NotAState(f"density matrix must be {DIM}x{DIM}, got {rho.shape}")
    if not is_hermitian(rho, herm_tol):
        raise NotAState("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > trace_tol:
        raise NotAState(f"trace {tr!r} differs from 1")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -psd_tol:
        raise NotAState(f"negative eigenvalue {lo:.3e}")
    return rho


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n, 8, 8)
    method: str

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.states.shape != (len(self.times), DIM, DIM):
            raise ValueError(f"states shape {self.states.shape} does not match {len(self.times)} times")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def __len__(self):
        return len(self.times)

    def max_trace_error(self) -> float:
        tr = np.trace(self.states, axis1=1, axis2=2)
        return float(np.max(np.abs(tr - 1), initial=0.0))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.states + np.conj(np.swapaxes(self.states, 1, 2)))
        return float(np.linalg.eigvalsh(herm)[:, 0].min(initial=np.inf))

    def validate(self) -> None:
        tol = _TRACE_TOL[self.method]
        err = self.max_trace_error()
        if err > tol:
            raise NotAState(f"{self.method} trajectory trace error {err:.3e} > {tol:.0e}")


def lindblad_rhs(hamiltonian, baths, rho) -> np.ndarray:
    """d rho/dt evaluated directly in matrix form."""
    out = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for op in baths:
        od = op.conj().T
        ldl = od @ op
        out += op @ rho @ od - 0.5 * (ldl @ rho + rho @ ldl)
    return out


def rk4_step_matrix(s: Superoperator, dt: float) -> np.ndarray:
    """One classic RK4 step for the linear system dv/dt = S v, as a matrix.

    For a linear autonomous system the four stages collapse exactly to the
    degree-4 Taylor polynomial of exp(dt S).
    """
    a = dt * s.matrix
    eye = np.eye(a.shape[0], dtype=complex)
    a2 = a @ a
    return eye + a + a2 / 2 + a2 @ a / 6 + a2 @ a2 / 24


def propagate_rk4(
    s: Superoperator,
    rho0,
    t_max: float,
    dt: float = DEFAULT_DT,
    sample_every: int = 10,
) -> Trajectory:
    if not 0 < dt <= MAX_DT:
        raise StepSizeError(f"dt must lie in (0, {MAX_DT}], got {dt}")
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    if sample_every < 1:
        raise ValueError("sample_every must be a positive integer")
    n_steps = int(round(t_max / dt))
    step = rk4_step_matrix(s, dt)
    v = vec(rho0)
    times, states = [0.0], [v]
    for i in range(1, n_steps + 1):
        v = step @ v
        if i % sample_every == 0 or i == n_steps:
            tr = v[:: DIM + 1].sum()
            if abs(tr - 1) > TRACE_DRIFT_TOL:
                raise TraceDrift(f"trace drifted to {tr} at t={i * dt}")
            times.append(i * dt)
            states.append(v)
    return Trajectory(np.array(times), unvec(np.array(states)), "rk4")


def propagate_expm(s: Superoperator, rho0, times, fallback: str | None = "pade") -> Trajectory:
    """rho(t) = unvec(exp(t S) vec(rho0)) for each requested time.

    Uses the eigendecomposition of S. When S is too close to defective for
    that (NonDiagonalizable), ``fallback="pade"`` switches to
    scaling-and-squaring exponentials; ``fallback=None`` re-raises.
    """
    times = np.asarray(times, dtype=float)
    v0 = vec(rho0)
    try:
        decomp = eig_general(s.matrix)
    except NonDiagonalizable:
        if fallback is None:
            raise
        log.info("Liouvillian not safely diagonalizable; using Pade exponentials")
        return Trajectory(times, unvec(_pade_propagate(s.matrix, v0, times)), "expm")
    out = expm_many(decomp, times, v0)
    if len(times) and times[0] == 0.0:
        out[0] = v0
    return Trajectory(times, unvec(out), "expm")


def _pade_propagate(a, v0, times):
    out = np.empty((len(times), len(v0)), dtype=complex)
    cache: dict[float, np.ndarray] = {}
    v, t_prev = v0, 0.0
    for i, t in enumerate(times):
        step = round(t - t_prev, 12)
        if step != 0.0:
            if step not in cache:
                cache[step] = expm(step * a)
            v = cache[step] @ v
        out[i] = v
        t_prev = t
    return out


def propagate_unitary(hamiltonian, rho0, times) -> Trajectory:
    """Closed-system evolution rho_t = Z(t) rho0 Z(t)^dagger, Z(t) = exp(-i t H)."""
    h = np.asarray(hamiltonian, dtype=complex)
    if not is_hermitian(h):
        raise NotHermitian("Hamiltonian is not Hermitian")
    energies, u = np.linalg.eigh(h)
    times = np.asarray(times, dtype=float)
    r = u.conj().T @ np.asarray(rho0, dtype=complex) @ u
    phase = np.exp(-1j * np.outer(times, energies))  # (n, 8)
    rt = phase[:, :, None] * r[None] * phase.conj()[:, None, :]
    states = u[None] @ rt @ u.conj().T[None]
    return Trajectory(times, states, "unitary")


def sample_times(t_max: float, step: float = DEFAULT_SAMPLE_STEP) -> np.ndarray:
    """0, step, 2 step, ... up to t_max (inclusive within rounding)."""
    n = int(math.floor(t_max / step + 1e-9))
    return np.arange(n + 1) * step
