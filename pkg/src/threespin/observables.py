"""Physical quantities extracted from density matrices.

Functions take a single 8x8 state or a stack of shape (n, 8, 8) and return
scalars or length-n arrays accordingly. Entropies are in nats.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatch, IdentityViolation, NotAState
from .model import (
    DIM,
    build_chirality_operator,
    build_current_operator,
    occupation_operator,
    register_operator,
)

CLIP_TOL = 1e-10
CHIRALITY_TOL = 1e-8

_CURRENT = build_current_operator()
_CHIRALITY = build_chirality_operator()
_N_L = occupation_operator("L")
_N_L1 = occupation_operator("L+1")
_SIGMAS = [register_operator(f"sigma{a}") for a in (1, 2, 3)]


def _stack(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (DIM, DIM):
        raise DimensionMismatch(f"expected (..., {DIM}, {DIM}), got {rho.shape}")
    return rho


def expectation(rho, op):
    """Tr[rho op]."""
    rho = _stack(rho)
    op = np.asarray(op, dtype=complex)
    if op.shape != (DIM, DIM):
        raise DimensionMismatch(f"operator must be {DIM}x{DIM}, got {op.shape}")
    return np.einsum("...jk,kj->...", rho, op)


def joint_distribution(rho) -> dict:
    rho = _stack(rho)
    diag = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    return {
        "pp": diag[..., 0] + diag[..., 4],
        "pm": diag[..., 1] + diag[..., 5],
        "mp": diag[..., 2] + diag[..., 6],
        "mm": diag[..., 3] + diag[..., 7],
    }


def register_coherence(rho):
    """m(t) = 2 sum_j rho(j, j+4); m_2 = Im m and m_3 = Re m."""
    rho = _stack(rho)
    return 2 * sum(rho[..., j, j + 4] for j in range(4))


def bloch_vector(rho):
    rho = _stack(rho)
    return tuple(np.real(expectation(rho, s)) for s in _SIGMAS)


def partial_trace_register(rho) -> np.ndarray:
    """Reduced 2x2 register state (sigma_1 eigenbasis)."""
    rho = _stack(rho)
    r = rho.reshape(rho.shape[:-2] + (2, 4, 2, 4))
    return np.einsum("...akbk->...ab", r)


def partial_trace_cursor(rho) -> np.ndarray:
    """Reduced 4x4 cursor state: rho(j,k) + rho(j+4,k+4)."""
    rho = _stack(rho)
    return rho[..., :4, :4] + rho[..., 4:, 4:]


def von_neumann_entropy(rho, tol: float = 1e-8):
    """-sum lambda log lambda; eigenvalues in [-1e-10, 0) are clipped to 0."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise NotAState(f"square matrix required, got shape {rho.shape}")
    herm_err = np.max(np.abs(rho - np.conj(np.swapaxes(rho, -1, -2))), initial=0.0)
    if herm_err > tol:
        raise NotAState(f"not Hermitian (deviation {herm_err:.2e})")
    tr = np.real(np.trace(rho, axis1=-2, axis2=-1))
    if np.max(np.abs(tr - 1), initial=0.0) > tol:
        raise NotAState("trace differs from 1")
    lam = np.linalg.eigvalsh(0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2))))
    if lam.min(initial=0.0) < -CLIP_TOL:
        raise NotAState(f"negative eigenvalue {lam.min():.3e}")
    lam = np.clip(lam, 0.0, None)
    logs = np.log(np.where(lam > 0, lam, 1.0))
    return -np.sum(lam * logs, axis=-1)


def current(rho):
    return np.real(expectation(rho, _CURRENT))


def chirality_mean(rho, check: bool = True):
    """Tr[chi rho], cross-checked against 8 Im rho(2,7).

    The shortcut only holds on the sparsity pattern reached from the
    canonical initial state; pass ``check=False`` for other states.
    """
    rho = _stack(rho)
    full = np.real(expectation(rho, _CHIRALITY))
    if check:
        short = 8 * np.imag(rho[..., 1, 6])
        dev = np.max(np.abs(full - short), initial=0.0)
        if dev > CHIRALITY_TOL:
            raise IdentityViolation(f"Tr[chi rho] and 8 Im rho(2,7) differ by {dev:.3e}")
    return full


@dataclass
class ObservableRecord:
    t: float
    n3L: float
    n3L1: float
    joint_pp: float
    joint_pm: float
    joint_mp: float
    joint_mm: float
    m1: float
    m2: float
    m3: float
    current: float
    chirality: float
    s_reg: float
    s_cur: float
    s_tot: float

    def as_dict(self) -> dict:
        return asdict(self)


REAL_CHANNELS = tuple(f for f in ObservableRecord.__dataclass_fields__ if f != "t")
COMPLEX_CHANNELS = ("m",)


def observable_columns(times, states, check_chirality: bool = True) -> dict:
    """Every ObservableRecord channel (plus complex ``m``) for a stack of states."""
    states = _stack(states)
    joint = joint_distribution(states)
    m1, m2, m3 = bloch_vector(states)
    return {
        "t": np.asarray(times, dtype=float),
        "n3L": np.real(expectation(states, _N_L)),
        "n3L1": np.real(expectation(states, _N_L1)),
        "joint_pp": joint["pp"],
        "joint_pm": joint["pm"],
        "joint_mp": joint["mp"],
        "joint_mm": joint["mm"],
        "m1": m1,
        "m2": m2,
        "m3": m3,
        "current": current(states),
        "chirality": chirality_mean(states, check=check_chirality),
        "s_reg": von_neumann_entropy(partial_trace_register(states)),
        "s_cur": von_neumann_entropy(partial_trace_cursor(states)),
        "s_tot": von_neumann_entropy(states),
        "m": register_coherence(states),
    }


def observable_record(rho, t: float = 0.0) -> ObservableRecord:
    cols = observable_columns(np.array([t]), np.asarray(rho)[None])
    return ObservableRecord(**{k: float(v[0]) for k, v in cols.items() if k != "m"})
