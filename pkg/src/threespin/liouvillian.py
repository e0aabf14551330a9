"""Lindblad generator, its sigma_1 block structure and closed-form spectra.

Vectorisation is row-major throughout: ``vec(rho)[8*j + k] = rho[j, k]``
(0-based), which is what ``ndarray.reshape(-1)`` does. Under this
convention ``vec(A rho B) = kron(A, B.T) vec(rho)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import BlockLeakage, DegenerateOmegas, DimensionMismatch, DomainError
from .linalg import dagger
from .model import DIM, ModelParams, build_bath_operators, build_hamiltonian

LEAKAGE_TOL = 1e-12
DEGENERACY_TOL = 1e-6

BLOCK_NAMES = ("++", "--", "+-", "-+")
_SECTOR = {"+": range(0, 4), "-": range(4, 8)}


def vec(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1)


def unvec(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v.reshape(v.shape[:-1] + (DIM, DIM))


def block_pairs(name: str) -> list[tuple[int, int]]:
    """0-based (j, k) index pairs governed by block ``name`` (e.g. "+-")."""
    rows, cols = _SECTOR[name[0]], _SECTOR[name[1]]
    return [(j, k) for j in rows for k in cols]


def block_indices(name: str) -> np.ndarray:
    return np.array([DIM * j + k for j, k in block_pairs(name)])


@dataclass(frozen=True)
class Superoperator:
    matrix: np.ndarray

    def apply(self, rho) -> np.ndarray:
        return unvec(self.matrix @ vec(rho))

    def trace_row(self) -> np.ndarray:
        """vec(I)^T S; zero for a trace-preserving generator."""
        return vec(np.eye(DIM)) @ self.matrix


def assemble(hamiltonian, baths) -> Superoperator:
    h = np.asarray(hamiltonian, dtype=complex)
    if h.shape != (DIM, DIM):
        raise DimensionMismatch(f"Hamiltonian must be {DIM}x{DIM}, got {h.shape}")
    eye = np.eye(DIM, dtype=complex)
    s = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op in baths:
        op = np.asarray(op, dtype=complex)
        if op.shape != (DIM, DIM):
            raise DimensionMismatch(f"bath operator must be {DIM}x{DIM}, got {op.shape}")
        ldl = dagger(op) @ op
        s += np.kron(op, op.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T)
    return Superoperator(s)


def lindbladian(p: ModelParams) -> Superoperator:
    return assemble(build_hamiltonian(p), build_bath_operators(p))


@dataclass(frozen=True)
class BlockSystem:
    mpp: np.ndarray
    mmm: np.ndarray
    mpm: np.ndarray
    mmp: np.ndarray
    leakage: float
    index_maps: dict = field(default_factory=lambda: {n: block_pairs(n) for n in BLOCK_NAMES})

    def __getitem__(self, name: str) -> np.ndarray:
        return {"++": self.mpp, "--": self.mmm, "+-": self.mpm, "-+": self.mmp}[name]


def cross_block_leakage(s: Superoperator) -> float:
    """Largest |entry| of S coupling two different sigma_1 sectors."""
    label = np.empty(DIM * DIM, dtype=int)
    for i, name in enumerate(BLOCK_NAMES):
        label[block_indices(name)] = i
    mask = label[:, None] != label[None, :]
    return float(np.max(np.abs(s.matrix[mask]), initial=0.0))


def split_blocks(s: Superoperator, tol: float = LEAKAGE_TOL) -> BlockSystem:
    leak = cross_block_leakage(s)
    if leak > tol:
        raise BlockLeakage(f"cross-block entry {leak:.3e} exceeds {tol:.1e}")
    blocks = {}
    for name in BLOCK_NAMES:
        ix = block_indices(name)
        blocks[name] = s.matrix[np.ix_(ix, ix)]
    return BlockSystem(blocks["++"], blocks["--"], blocks["+-"], blocks["-+"], leak)


def conjugate_transform(mpm: np.ndarray) -> np.ndarray:
    """The (-,+) block implied by rho -> rho^dagger acting on the (+,-) block."""
    # (j,k) in -+ <-> (k,j) in +-, with 4x4 sub-index layout
    perm = np.array([4 * (i % 4) + i // 4 for i in range(16)])
    return mpm[np.ix_(perm, perm)].conj()


def mpp_charpoly_roots(p: ModelParams) -> np.ndarray:
    """The 16 roots of the factorised characteristic polynomial of M++."""
    e, mu = p.epsilon, p.mu
    roots = [0.0, -2 * e + 1j, -2 * e - 1j, -4 * e] + [-2 * e] * 4
    for sign in (-1.0, 1.0):
        c = 3 * e * e + sign * e * mu + 0.25
        disc = cmath.sqrt(4 * e * e - c)
        roots += [-2 * e + disc, -2 * e - disc] * 2
    return np.array(roots, dtype=complex)


def mpp_charpoly(p: ModelParams, x) -> complex:
    e, mu = p.epsilon, p.mu
    return (
        x * (1 + (x + 2 * e) ** 2) * (x + 4 * e) * (x + 2 * e) ** 4
        * (x * x + 4 * e * x + 3 * e * e - e * mu + 0.25) ** 2
        * (x * x + 4 * e * x + 3 * e * e + e * mu + 0.25) ** 2
    )


@dataclass(frozen=True)
class OmegaSet:
    """omega_{+-,+-} sorted by ascending real part, and the doubly degenerate zetas."""

    omegas: np.ndarray
    zetas: np.ndarray
    min_gap: float

    @property
    def degenerate(self) -> bool:
        return self.min_gap < DEGENERACY_TOL

    def require_distinct(self) -> np.ndarray:
        if self.degenerate:
            raise DegenerateOmegas(self.min_gap)
        return self.omegas


def _sort_key(z):
    return (round(z.real, 12), z.imag)


def omega_eigenvalues(p: ModelParams) -> OmegaSet:
    e, mu, th = p.epsilon, p.mu, p.theta
    inner = cmath.sqrt(
        1 + 16 * e**4 - 8 * e * e * mu * mu
        + 8 * e * e * (math.cos(th) + mu * mu * math.cos(th) + 2j * mu * math.sin(th))
    )
    omegas = [
        -2 * e + s1 * cmath.sqrt(4 * e * e - 1 + s2 * inner) / math.sqrt(2)
        for s1 in (1, -1) for s2 in (1, -1)
    ]
    q = cmath.exp(1j * th)
    root = cmath.sqrt(q * e * e * (mu - 1 + q * (mu + 1)) ** 2)
    zetas = [
        -2 * e + s1 * cmath.exp(-1j * th) / 2 * cmath.sqrt(q * q * (4 * e * e - 1) + s2 * 2 * q * root)
        for s1 in (1, -1) for s2 in (1, -1)
    ]
    omegas = np.array(sorted(omegas, key=_sort_key))
    zetas = np.array(sorted(zetas, key=_sort_key))
    gap = min(abs(omegas[i] - omegas[j]) for i in range(4) for j in range(i))
    return OmegaSet(omegas, zetas, float(gap))


def mpm_charpoly(p: ModelParams, x, omegas=None) -> complex:
    """The factorised det(M+- - x I) as printed, with omegas from the closed form."""
    e, mu, th = p.epsilon, p.mu, p.theta
    if omegas is None:
        omegas = omega_eigenvalues(p).omegas
    quartic = (
        2 * x**4 + 16 * e * x**3 + (1 + 44 * e * e) * x * x
        + 4 * (e + 12 * e**3) * x + e * e * (4 + 18 * e * e - mu * mu)
    )
    bracket = 1 + 8 * quartic - 8 * e * e * ((1 + mu * mu) * math.cos(th) + 2j * mu * math.sin(th))
    return (x + 2 * e) ** 4 * np.prod([x - w for w in omegas]) * bracket**2 / 2**8


def verify_mpm_charpoly(p: ModelParams, sample_points, mpm=None) -> float:
    """Max relative residual between the printed and the numerical det(M+- - x I).

    Residuals are scaled by prod_i (|x| + |lambda_i|), an upper bound on
    |det(M+- - x I)| that stays meaningful when x sits on a root.
    """
    if mpm is None:
        mpm = split_blocks(lindbladian(p)).mpm
    lam = np.linalg.eigvals(mpm)
    omegas = omega_eigenvalues(p).omegas
    worst = 0.0
    for x in sample_points:
        x = complex(x)
        numeric = np.linalg.det(mpm - x * np.eye(16))
        printed = mpm_charpoly(p, x, omegas)
        scale = float(np.prod(abs(x) + np.abs(lam)))
        if scale == 0.0:
            scale = 1.0
        worst = max(worst, abs(numeric - printed) / scale)
    return worst


def relaxation_times(p: ModelParams) -> tuple[float, float]:
    """(register, cursor) relaxation times. The register one is infinite when max Re omega = 0."""
    if p.epsilon <= 0:
        raise DomainError("relaxation times are infinite for epsilon = 0")
    rate = abs(max(w.real for w in omega_eigenvalues(p).omegas))
    t_register = math.inf if rate == 0.0 else 1.0 / rate
    return t_register, 1.0 / (2 * p.epsilon)


def cluster(values, tol: float = 1e-4) -> list[tuple[complex, int]]:
    """Group values closer than ``tol`` (single linkage); return (mean, size) per group.

    The mean of a cluster is the well-conditioned quantity when a defective
    eigenvalue has been split by rounding into a small ring of roots.
    """
    values = np.asarray(values, dtype=complex)
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i):
            if abs(values[i] - values[j]) < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [(complex(values[g].mean()), len(g)) for g in groups.values()]


def multiset_distance(expected, numeric, cluster_tol: float = 1e-4) -> float:
    """Max distance under the best one-to-one matching of two multisets.

    Both sides are first reduced to cluster means (see :func:`cluster`),
    each repeated by its cluster size; lengths must agree.
    """
    def expand(vals):
        out = []
        for mean, size in cluster(vals, cluster_tol):
            out += [mean] * size
        return np.array(out)

    a, b = expand(expected), expand(numeric)
    if len(a) != len(b):
        raise DimensionMismatch(f"multisets of different size: {len(a)} vs {len(b)}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max(initial=0.0))


def contained_distance(expected, numeric, cluster_tol: float = 1e-4) -> float:
    """Like :func:`multiset_distance` but ``expected`` may be a sub-multiset of ``numeric``."""
    num = cluster(numeric, cluster_tol)
    pool = np.array([m for m, size in num for _ in range(size)])
    exp_ = np.array([m for m, size in cluster(expected, cluster_tol) for _ in range(size)])
    cost = np.abs(exp_[:, None] - pool[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max(initial=0.0))


def mpm_expected_spectrum(p: ModelParams) -> np.ndarray:
    """Full closed-form spectrum of M+-: (x+2e)^4, the omegas, and each zeta twice."""
    om = omega_eigenvalues(p)
    return np.concatenate([[-2 * p.epsilon] * 4, om.omegas, om.zetas, om.zetas])


def block_eigenvalues(blocks: BlockSystem) -> dict[str, np.ndarray]:
    return {name: np.linalg.eigvals(blocks[name]) for name in BLOCK_NAMES}

