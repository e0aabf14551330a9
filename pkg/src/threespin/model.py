"""Operators of the three-spin Feynman-machine model in the e-basis.

The Hilbert space is register (x) cursor site L (x) cursor site L+1, each a
qubit, with kron order (register, L, L+1). The register factor is written
in the eigenbasis of sigma_1 (|+>, |->); each cursor factor in the
eigenbasis of tau_3 (up, down). Lexicographic order with +1 first gives

    e1=(+,+,+) e2=(+,+,-) e3=(+,-,+) e4=(+,-,-)
    e5=(-,+,+) e6=(-,+,-) e7=(-,-,+) e8=(-,-,-)

so index ``4*r + 2*a + b`` (0-based) has register label r and cursor
labels a, b.

Ladder normalisation: tau_+ is the matrix |up><down| (that is,
(tau_1 + i tau_2)/2). The formula tau_+ = tau_1 + i tau_2 printed next to
the Hamiltonian would double every hopping amplitude; the matrix element
<e2|H|e3> = -exp(i theta/2)/2 and all downstream closed forms only hold
with the unit ladder, so that is what is used.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import kron_all

DIM = 8

BASIS_LABELS = tuple(itertools.product((1, -1), repeat=3))

_I2 = np.eye(2, dtype=complex)

# register Paulis in the sigma_1 eigenbasis; sigma_3 swaps the labels and
# sigma_2 is fixed by sigma_1 sigma_2 = i sigma_3
SIGMA = {
    "sigma1": np.array([[1, 0], [0, -1]], dtype=complex),
    "sigma2": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "sigma3": np.array([[0, 1], [1, 0]], dtype=complex),
}

# cursor Paulis in the tau_3 eigenbasis
TAU = {
    "tau1": np.array([[0, 1], [1, 0]], dtype=complex),
    "tau2": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "tau3": np.array([[1, 0], [0, -1]], dtype=complex),
    "tau_plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "tau_minus": np.array([[0, 0], [1, 0]], dtype=complex),
}

SITES = ("L", "L+1")


@dataclass(frozen=True)
class ModelParams:
    """Rotation angle ``theta`` (radians), bath coupling ``epsilon`` and asymmetry ``mu``.

    ``epsilon == 0`` is the closed (ballistic) system.
    """

    theta: float = math.pi / 2
    epsilon: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        for name in ("theta", "epsilon", "mu"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
        if self.epsilon < 0:
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon}")
        if not -1.0 <= self.mu <= 1.0:
            raise DomainError(f"mu must lie in [-1, 1], got {self.mu}")

    @property
    def closed(self) -> bool:
        return self.epsilon == 0.0


def basis_index(sigma1: int, tau3_l: int, tau3_l1: int) -> int:
    """0-based e-basis index for the given +-1 labels."""
    return BASIS_LABELS.index((sigma1, tau3_l, tau3_l1))


def register_operator(which: str, theta: float | None = None) -> np.ndarray:
    """sigma1/sigma2/sigma3 or the primitive "U" = exp(-i theta sigma_1 / 2), on the register."""
    if which == "U":
        if theta is None:
            raise ValueError("U needs theta")
        u = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
        return kron_all(u, _I2, _I2)
    try:
        return kron_all(SIGMA[which], _I2, _I2)
    except KeyError:
        raise ValueError(f"unknown register operator {which!r}") from None


def cursor_operator(site: str, which: str) -> np.ndarray:
    try:
        op = TAU[which]
    except KeyError:
        raise ValueError(f"unknown cursor operator {which!r}") from None
    if site == "L":
        return kron_all(_I2, op, _I2)
    if site == "L+1":
        return kron_all(_I2, _I2, op)
    raise ValueError(f"site must be 'L' or 'L+1', got {site!r}")


def build_hamiltonian(p: ModelParams) -> np.ndarray:
    u = register_operator("U", p.theta)
    hop = u @ cursor_operator("L+1", "tau_plus") @ cursor_operator("L", "tau_minus")
    return -0.5 * hop - 0.5 * hop.conj().T


def build_bath_operators(p: ModelParams) -> list[np.ndarray]:
    eps, mu = p.epsilon, p.mu
    if not -1.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [-1, 1], got {mu}")
    return [
        math.sqrt(eps * (1 - mu)) * cursor_operator("L", "tau_plus"),
        math.sqrt(eps * (1 + mu)) * cursor_operator("L", "tau_minus"),
        math.sqrt(eps * (1 + mu)) * cursor_operator("L+1", "tau_plus"),
        math.sqrt(eps * (1 - mu)) * cursor_operator("L+1", "tau_minus"),
    ]


def initial_state() -> np.ndarray:
    """Register in sigma_3 = -1, cursor excitation on site L."""
    eye = np.eye(DIM, dtype=complex)
    return (
        (eye - register_operator("sigma3"))
        @ (eye + cursor_operator("L", "tau3"))
        @ (eye - cursor_operator("L+1", "tau3"))
    ) / 8


def occupation_operator(site: str) -> np.ndarray:
    """(I + tau_3(site)) / 2."""
    return 0.5 * (np.eye(DIM, dtype=complex) + cursor_operator(site, "tau3"))


def build_current_operator() -> np.ndarray:
    a = cursor_operator("L", "tau_minus") @ cursor_operator("L+1", "tau_plus")
    b = cursor_operator("L+1", "tau_minus") @ cursor_operator("L", "tau_plus")
    return 0.5j * (a - b)


def build_chirality_operator() -> np.ndarray:
    """sigma . (tau(L) x tau(L+1)) with full Pauli matrices on every spin."""
    sig = [SIGMA["sigma1"], SIGMA["sigma2"], SIGMA["sigma3"]]
    tau = [TAU["tau1"], TAU["tau2"], TAU["tau3"]]
    chi = np.zeros((DIM, DIM), dtype=complex)
    for a, b, c in itertools.permutations(range(3)):
        sign = np.linalg.det(np.eye(3)[[a, b, c]])
        chi += sign * kron_all(sig[a], tau[b], tau[c])
    return chi
