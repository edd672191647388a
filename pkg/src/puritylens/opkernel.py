"""Dense complex-matrix kernel: products, spectra, propagators and norms.

Operators are plain ``complex128`` numpy arrays of shape ``(d, d)``.
"""

from typing import NamedTuple

import numpy as np

from . import _config, _kernels
from .errors import DimensionError, NoConvergenceError, NotHermitianError


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite square complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def herm_tolerance(h: np.ndarray) -> float:
    return _config.TAU_HERM * (1.0 + float(np.max(np.abs(h))))


def hermiticity_residual(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T)))


def is_hermitian(h) -> bool:
    h = as_matrix(h)
    return hermiticity_residual(h) <= herm_tolerance(h)


def tensor_product(a, b, max_dim: int | None = None) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    limit = _config.max_dim() if max_dim is None else max_dim
    dim = a.shape[0] * b.shape[0]
    if dim > limit:
        raise DimensionError(f"tensor product dimension {dim} exceeds guard {limit}")
    return np.kron(a, b)


def commutator(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"commutator of shapes {a.shape} and {b.shape}")
    return a @ b - b @ a


def hermitian_eigen(h, max_sweeps: int = _config.MAX_SWEEPS) -> HermitianEigen:
    """Eigen-decompose a Hermitian matrix by cyclic Jacobi rotations.

    The input is symmetrized as ``(h + h^dagger) / 2`` after the Hermiticity
    check. Eigenvalues come back ascending, with ties kept in diagonal order.

    Raises:
        NotHermitianError: if ``max |h - h^dagger|`` exceeds
            ``1e-10 * (1 + max |h_ij|)``.
        NoConvergenceError: if a rotation-free sweep is not reached within
            ``max_sweeps``.
    """
    h = as_matrix(h, "h")
    resid = hermiticity_residual(h)
    tol = herm_tolerance(h)
    if resid > tol:
        raise NotHermitianError(f"max |h - h^dagger| = {resid:.3e} exceeds {tol:.3e}")
    a = np.ascontiguousarray(0.5 * (h + h.conj().T))
    v = np.eye(a.shape[0], dtype=np.complex128)
    sweeps = _kernels.jacobi_hermitian(a, v, max_sweeps)
    if sweeps < 0:
        raise NoConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (dim {a.shape[0]})")
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return HermitianEigen(w[order], v[:, order])


def eigvalsh(h) -> np.ndarray:
    return hermitian_eigen(h).eigenvalues


def unitary_from_eigen(eig: HermitianEigen, t: float) -> np.ndarray:
    vals, vecs = eig
    return (vecs * np.exp(-1j * vals * t)) @ vecs.conj().T


def unitary_from_hamiltonian(h, t: float) -> np.ndarray:
    """Return ``exp(-i h t)`` (hbar = 1) through the spectral decomposition of ``h``."""
    return unitary_from_eigen(hermitian_eigen(h), float(t))


def singular_values(a) -> np.ndarray:
    a = as_matrix(a, "a")
    lam = eigvalsh(a.conj().T @ a)
    return np.sqrt(np.clip(lam, 0.0, None))[::-1]


def trace_norm(a, hermitian: bool = False) -> float:
    """Schatten-1 norm.

    With ``hermitian=True`` the input is taken as Hermitian and the norm is
    ``sum |lambda_k|``; otherwise ``sum sqrt(lambda_k(a^dagger a))``.
    """
    a = as_matrix(a, "a")
    if hermitian:
        return float(np.sum(np.abs(eigvalsh(a))))
    return float(np.sum(singular_values(a)))


def operator_norm(a) -> float:
    return float(singular_values(a)[0])
