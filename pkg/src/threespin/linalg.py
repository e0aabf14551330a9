"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` complex arrays. The largest object is the
64x64 Liouvillian, so nothing here bothers with sparse storage.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonDiagonalizable, NotHermitian

RECONSTRUCTION_TOL = 1e-8
HERMITIAN_TOL = 1e-12


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def zeros(n: int, m: int | None = None) -> np.ndarray:
    return np.zeros((n, n if m is None else m), dtype=complex)


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = kron(out, f)
    return out


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and np.max(np.abs(a - a.conj().T), initial=0.0) <= tol


@dataclass(frozen=True)
class EigenDecomposition:
    """Right eigenvectors in the columns of ``vectors``; ``inverse`` is their inverse."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    inverse: np.ndarray
    residual: float

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.inverse


def eig_general(a, threshold: float = RECONSTRUCTION_TOL) -> EigenDecomposition:
    """Eigendecomposition of a general square matrix.

    ``residual`` is the relative Frobenius error of ``V diag(lam) V^-1``
    against ``a``. Raises NonDiagonalizable when it exceeds ``threshold``,
    which happens at (near-)defective points where V is ill-conditioned.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {a.shape}")
    lam, v = np.linalg.eig(a)
    try:
        vinv = np.linalg.inv(v)
    except np.linalg.LinAlgError:
        raise NonDiagonalizable(np.inf, threshold) from None
    scale = np.linalg.norm(a)
    recon = (v * lam) @ vinv
    residual = float(np.linalg.norm(a - recon) / scale) if scale > 0 else float(np.linalg.norm(recon))
    ident_err = float(np.linalg.norm(v @ vinv - np.eye(len(lam))))
    residual = max(residual, ident_err)
    if residual > threshold:
        raise NonDiagonalizable(residual, threshold)
    return EigenDecomposition(lam, v, vinv, residual)


def expm_times(decomp: EigenDecomposition, t: float, v) -> np.ndarray:
    """Return exp(t A) v using the eigendecomposition of A."""
    v = np.asarray(v, dtype=complex)
    return decomp.vectors @ (np.exp(decomp.eigenvalues * t) * (decomp.inverse @ v))


def expm_many(decomp: EigenDecomposition, times, v) -> np.ndarray:
    """exp(t A) v for every t in ``times``; one row per time."""
    times = np.asarray(times, dtype=float)
    coeffs = decomp.inverse @ np.asarray(v, dtype=complex)
    return (np.exp(np.outer(times, decomp.eigenvalues)) * coeffs) @ decomp.vectors.T


def expm(a) -> np.ndarray:
    """Scaling-and-squaring matrix exponential (no diagonalizability needed)."""
    return scipy.linalg.expm(as_matrix(a))


def hermitian_eigenvalues(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {a.shape}")
    dev = np.max(np.abs(a - a.conj().T), initial=0.0)
    if dev > tol:
        raise NotHermitian(f"Hermiticity violated by {dev:.3e}")
    return np.linalg.eigvalsh(0.5 * (a + a.conj().T))


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep``.

    ``dims`` lists the factor dimensions in kron order; ``keep`` holds the
    indices of the retained factors (order preserved).
    """
    rho = as_matrix(rho)
    dims = list(dims)
    n = len(dims)
    if int(np.prod(dims)) != rho.shape[0]:
        raise DimensionMismatch(f"dims {dims} do not match matrix of size {rho.shape[0]}")
    keep = sorted(keep)
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(d, d)
