"""Closed-form solutions for the canonical initial state.

Sparse maps are keyed by 1-based e-basis labels ``(j, k)`` so that
``entries[(2, 7)]`` reads like rho_t(2, 7). Every function accepts a scalar
time or a 1-d array of times; entry values follow the shape of ``t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .liouvillian import omega_eigenvalues
from .model import DIM, ModelParams

POPULATED = frozenset(
    [(j, j) for j in range(1, 9)]
    + [(2, 3), (3, 2), (6, 7), (7, 6)]
    + [(1, 5), (2, 6), (3, 7), (4, 8), (2, 7), (3, 6)]
    + [(5, 1), (6, 2), (7, 3), (8, 4), (7, 2), (6, 3)]
)


def _require_open(p: ModelParams, what: str):
    if p.epsilon <= 0:
        raise DomainError(f"{what} requires epsilon > 0 (use the ballistic formulas)")


def _binary_entropy(r):
    """Entropy (nats) of a qubit whose Bloch vector has length r."""
    r = np.clip(np.asarray(r, dtype=float), 0.0, 1.0)
    out = np.zeros_like(r)
    for q in ((1 + r) / 2, (1 - r) / 2):
        pos = q > 0
        out[pos] -= q[pos] * np.log(q[pos])
    return out


def ballistic_observables(theta: float, t) -> dict:
    """Closed-system (epsilon = 0) observables for the canonical initial state."""
    t = np.asarray(t, dtype=float)
    s2 = np.sin(t / 2) ** 2
    m2 = s2 * math.sin(theta)
    m3 = s2 * (1 - math.cos(theta)) - 1
    return {
        "n3L": np.cos(t / 2) ** 2,
        "n3L1": s2,
        "m1": np.zeros_like(t),
        "m2": m2,
        "m3": m3,
        "s_reg": _binary_entropy(np.sqrt(m2**2 + m3**2)),
        "chirality": 2 * math.cos(theta / 2) * np.sin(t),
    }


def system_pp(p: ModelParams, t) -> dict:
    _require_open(p, "system_pp")
    e, mu, th = p.epsilon, p.mu, p.theta
    t = np.asarray(t, dtype=float)
    d = 1 + 4 * e * e
    up = np.exp(t * (1j - 2 * e))
    dn = np.exp(t * (-1j - 2 * e))
    slow = np.exp(-4 * e * t)
    a = e * mu
    b = 1 + 4 * e * e * (1 + mu) ** 2

    r11 = (
        (1 + 4 * e * e * (1 - mu * mu)) / (8 * d)
        + up * a * (2 * e * (1 + mu) - 1j) / (4 * d)
        + dn * a * (2 * e * (1 + mu) + 1j) / (4 * d)
        - slow * b / (8 * d)
    )
    r22 = (
        (1 + 4 * e * e * (1 - mu) ** 2) / (8 * d)
        + up * (1 + 4j * a + 4 * e * e * (1 - mu * mu)) / (8 * d)
        + dn * (1 - 4j * a + 4 * e * e * (1 - mu * mu)) / (8 * d)
        + slow * b / (8 * d)
    )
    r33 = b / (8 * d) * (1 - up - dn + slow)
    r44 = 0.5 - (r11 + r22 + r33)
    r23 = np.exp(0.5j * th) * (
        1j * a / (2 * d)
        + up * (1j - 2 * e * (1 + mu)) / (8 * (2 * e - 1j))
        + dn * (1j + 2 * e * (1 + mu)) / (8 * (2 * e + 1j))
    )
    # populations are real; drop the rounding residue of the conjugate pairs
    return {
        (1, 1): r11.real + 0j, (2, 2): r22.real + 0j, (3, 3): r33.real + 0j,
        (4, 4): r44.real + 0j, (2, 3): r23, (3, 2): np.conj(r23),
    }


def system_mm(p: ModelParams, t) -> dict:
    pp = system_pp(p, t)
    ph = np.exp(1j * p.theta)
    return {
        (5, 5): pp[(1, 1)], (6, 6): pp[(2, 2)], (7, 7): pp[(3, 3)], (8, 8): pp[(4, 4)],
        (6, 7): pp[(2, 3)] / ph, (7, 6): pp[(3, 2)] * ph,
    }


def system_pm(p: ModelParams, t, omegas=None) -> dict:
    """Register coherences from the four omega eigenvalues.

    Raises DegenerateOmegas when two omegas coincide (within 1e-6). The sums
    are symmetric in the omegas, so any ordering of ``omegas`` may be passed.
    """
    _require_open(p, "system_pm")
    e, mu, th = p.epsilon, p.mu, p.theta
    w = omega_eigenvalues(p).require_distinct() if omegas is None else np.asarray(omegas)
    t = np.asarray(t, dtype=float)
    den = np.array([np.prod([w[j] - w[k] for k in range(4) if k != j]) for j in range(4)])
    # (..., 4) array of exp(omega_j t) / prod_{k != j}(omega_j - omega_k)
    basis = np.exp(np.multiply.outer(t, w)) / den

    def spectral_sum(numer):
        return basis @ numer

    eith = np.exp(1j * th)
    r15 = e / 4 * spectral_sum(
        (mu - 1) / eith + (mu + 1) * (-1 + 8 * e * e * (mu - 1) + 4 * e * (mu - 2) * w - 2 * w * w)
    )
    r26 = -0.25 * spectral_sum(
        (2 * e + w) * (1 + 4 * e * e * (mu - 1) ** 2 - 4 * e * (mu - 2) * w + 2 * w * w)
    )
    r37 = -(1 + 4 * eith * e * e * (1 + mu) ** 2) / (4 * eith) * spectral_sum(2 * e + w)
    r27 = 1j * np.exp(-0.5j * th) / 4 * spectral_sum(
        -2 * e * e * (eith * (mu + 1) ** 2 - (mu - 1) ** 2) - 2 * e * (mu - 2) * w + w * w
    )
    return {(1, 5): r15, (4, 8): r15, (2, 6): r26, (3, 7): r37, (2, 7): r27, (3, 6): -r27}


@dataclass(frozen=True)
class AnalyticState:
    entries: dict
    t: object
    params: ModelParams

    def dense(self) -> np.ndarray:
        """8x8 matrix, or an (n, 8, 8) stack when ``t`` is an array."""
        shape = np.shape(self.t)
        out = np.zeros(shape + (DIM, DIM), dtype=complex)
        for (j, k), v in self.entries.items():
            out[..., j - 1, k - 1] = v
        return out

    def __getitem__(self, jk):
        return self.entries.get(jk, np.zeros(np.shape(self.t), dtype=complex))


def assemble_analytic_state(p: ModelParams, t) -> AnalyticState:
    entries = {}
    entries.update(system_pp(p, t))
    entries.update(system_mm(p, t))
    pm = system_pm(p, t)
    entries.update(pm)
    entries.update({(k, j): np.conj(v) for (j, k), v in pm.items()})
    return AnalyticState(entries, t, p)


@dataclass(frozen=True)
class NessState:
    entries: dict
    entropy: float
    params: ModelParams

    def dense(self) -> np.ndarray:
        out = np.zeros((DIM, DIM), dtype=complex)
        for (j, k), v in self.entries.items():
            out[j - 1, k - 1] = v
        return out


def s_ness_closed_form(p: ModelParams) -> float:
    e, mu = p.epsilon, p.mu
    d = 1 + 4 * e * e
    return (
        math.log(8)
        - math.log(1 - 4 * e * e * mu * mu / d)
        - 2 * e * mu * math.atanh(4 * e * mu * math.sqrt(d) / (1 + 4 * e * e * (1 + mu * mu))) / math.sqrt(d)
    )


def ness(p: ModelParams) -> NessState:
    _require_open(p, "ness")
    e, mu, th = p.epsilon, p.mu, p.theta
    d = 1 + 4 * e * e
    outer = (1 + 4 * e * e * (1 - mu * mu)) / (8 * d)
    left = (1 + 4 * e * e * (1 - mu) ** 2) / (8 * d)
    right = (1 + 4 * e * e * (1 + mu) ** 2) / (8 * d)
    c = 1j * e * mu * np.exp(0.5j * th) / (2 * d)
    entries = {
        (1, 1): outer, (4, 4): outer, (5, 5): outer, (8, 8): outer,
        (2, 2): left, (6, 6): left, (3, 3): right, (7, 7): right,
        (2, 3): c, (3, 2): np.conj(c), (7, 6): -c, (6, 7): -np.conj(c),
    }
    entries = {k: complex(v) for k, v in entries.items()}
    return NessState(entries, s_ness_closed_form(p), p)


def asymptotic_entropies(p: ModelParams) -> dict:
    """Large-time entropies: the register limit and the small-epsilon series."""
    e, mu = p.epsilon, p.mu
    return {
        "s_reg_inf": math.log(2),
        "s_total_series": math.log(8) - 4 * e * e * mu * mu,
        "s_cursor_series": math.log(4) - 2 * e * e * mu * mu * (math.cos(p.theta) + 1),
    }


# The functions below evaluate the explicit observable formulas quoted for
# the cursor. They are independent of the sparse state above and are used
# as checks against numerical propagation.

def printed_joint_probabilities(p: ModelParams, t) -> dict:
    """(pp, pm, mp, mm) probabilities of (tau_3(L), tau_3(L+1))."""
    e, mu = p.epsilon, p.mu
    t = np.asarray(t, dtype=float)
    d = 1 + 4 * e * e
    b = 1 + 4 * e * e * (1 + mu) ** 2
    fast, slow = np.exp(-2 * e * t), np.exp(-4 * e * t)
    both = (
        (1 + 4 * e * e * (1 - mu * mu)) / (4 * d) - slow * b / (4 * d)
        + fast * e * mu * (2 * e * (1 + mu) * np.cos(t) + np.sin(t)) / d
    )
    mp = b / (4 * d) + slow * b / (4 * d) - fast * b * np.cos(t) / (2 * d)
    pm = (
        (1 + 4 * e * e * (1 - mu) ** 2) / (4 * d) + slow * b / (4 * d)
        + fast * ((1 + 4 * e * e * (1 - mu * mu)) * np.cos(t) - 4 * e * mu * np.sin(t)) / (2 * d)
    )
    return {"pp": both, "pm": pm, "mp": mp, "mm": 1 - both - pm - mp}


def printed_current(p: ModelParams, t) -> np.ndarray:
    e, mu, th = p.epsilon, p.mu, p.theta
    t = np.asarray(t, dtype=float)
    d = 1 + 4 * e * e
    c = math.cos(th / 2)
    return -c * 4 * e * mu / (4 * d) + c * 2 * np.exp(-2 * t * e) * (
        2 * e * mu * np.cos(t) + (1 + 4 * e * e * (1 + mu)) * np.sin(t)
    ) / (4 * d)


def printed_marginals(p: ModelParams, t) -> dict:
    """Occupation probabilities of sites L and L+1."""
    e, mu = p.epsilon, p.mu
    t = np.asarray(t, dtype=float)
    d = 1 + 4 * e * e
    osc = np.exp(-2 * t * e) * ((1 + 4 * e * e * (1 + mu)) * np.cos(t) - 2 * e * mu * np.sin(t)) / (2 * d)
    return {
        "n3L": (1 + 4 * e * e * (1 - mu)) / (2 * d) + osc,
        "n3L1": (1 + 4 * e * e * (1 + mu)) / (2 * d) - osc,
    }
