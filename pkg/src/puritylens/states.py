"""Density operators on bipartite spaces and the correlation functionals built on them."""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from . import _config
from .errors import DimensionError, InvariantError
from .opkernel import as_matrix, eigvalsh, herm_tolerance, hermiticity_residual, tensor_product


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix.

    All invariants are checked here, once; the spectrum found during the
    check is kept for the entropy.
    """

    matrix: np.ndarray
    spectrum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = as_matrix(self.matrix, "density matrix")
        resid = hermiticity_residual(m)
        if resid > herm_tolerance(m):
            raise InvariantError(f"density matrix not Hermitian (residual {resid:.3e})")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > _config.TAU_TRACE:
            raise InvariantError(f"density matrix trace {tr!r} differs from 1")
        lam = eigvalsh(m)
        if lam[0] < -_config.TAU_POS:
            raise InvariantError(f"density matrix has eigenvalue {lam[0]:.3e} < -{_config.TAU_POS}")
        m.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "spectrum", lam)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class BipartiteState:
    rho_tot: DensityOperator
    d_s: int
    d_e: int

    def __post_init__(self):
        if not isinstance(self.rho_tot, DensityOperator):
            object.__setattr__(self, "rho_tot", DensityOperator(self.rho_tot))
        if self.d_s < 1 or self.d_e < 1 or self.d_s * self.d_e != self.rho_tot.dim:
            raise DimensionError(f"d_S*d_E = {self.d_s}*{self.d_e} does not match dim {self.rho_tot.dim}")

    @property
    def matrix(self) -> np.ndarray:
        return self.rho_tot.matrix

    @cached_property
    def rho_s(self) -> DensityOperator:
        return partial_trace(self, Side.OVER_E)

    @cached_property
    def rho_e(self) -> DensityOperator:
        return partial_trace(self, Side.OVER_S)


@dataclass(frozen=True)
class CorrelationOperator:
    matrix: np.ndarray
    d_s: int
    d_e: int

    def __post_init__(self):
        m = self.matrix
        tol = _config.TAU_TRACE
        if abs(np.trace(m)) > tol:
            raise InvariantError(f"correlation operator trace {np.trace(m):.3e} is not zero")
        for side in (Side.OVER_E, Side.OVER_S):
            marg = partial_trace_matrix(m, self.d_s, self.d_e, side)
            if np.max(np.abs(marg)) > tol:
                raise InvariantError(f"correlation operator has non-zero marginal ({side.value})")


class Side(str, Enum):
    OVER_E = "over_E"
    OVER_S = "over_S"


def partial_trace_matrix(m: np.ndarray, d_s: int, d_e: int, side) -> np.ndarray:
    t = m.reshape(d_s, d_e, d_s, d_e)
    if Side(side) is Side.OVER_E:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def partial_trace(state: BipartiteState, side=Side.OVER_E) -> DensityOperator:
    """Reduced state on S (``over_E``) or on E (``over_S``)."""
    return DensityOperator(partial_trace_matrix(state.matrix, state.d_s, state.d_e, side))


def bipartite(matrix, d_s: int, d_e: int) -> BipartiteState:
    return BipartiteState(DensityOperator(matrix), d_s, d_e)


def purity(rho) -> float:
    m = rho.matrix if isinstance(rho, DensityOperator) else as_matrix(rho)
    return float(np.sum(m.real**2 + m.imag**2))


def _entropy_from_spectrum(lam: np.ndarray) -> float:
    lam = lam[lam > _config.TAU_CLIP]
    return float(-np.sum(lam * np.log(lam))) + 0.0


def von_neumann_entropy(rho: DensityOperator) -> float:
    """Entropy in nats; eigenvalues at or below 1e-12 contribute nothing."""
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    return max(_entropy_from_spectrum(rho.spectrum), 0.0)


def mutual_information(state: BipartiteState) -> float:
    """``S(rho_S) + S(rho_E) - S(rho_tot)`` in nats."""
    value = (
        von_neumann_entropy(state.rho_s)
        + von_neumann_entropy(state.rho_e)
        - von_neumann_entropy(state.rho_tot)
    )
    if value < -_config.TAU_TRACE:
        raise InvariantError(f"mutual information {value:.3e} is negative beyond tolerance")
    return max(value, 0.0)


def correlation_operator(state: BipartiteState) -> CorrelationOperator:
    prod = np.kron(state.rho_s.matrix, state.rho_e.matrix)
    return CorrelationOperator(state.matrix - prod, state.d_s, state.d_e)


def product_state(rho_s: DensityOperator, rho_e: DensityOperator) -> BipartiteState:
    if not isinstance(rho_s, DensityOperator):
        rho_s = DensityOperator(rho_s)
    if not isinstance(rho_e, DensityOperator):
        rho_e = DensityOperator(rho_e)
    return BipartiteState(DensityOperator(tensor_product(rho_s.matrix, rho_e.matrix)), rho_s.dim, rho_e.dim)


def pure(vector) -> DensityOperator:
    psi = np.asarray(vector, dtype=np.complex128).ravel()
    psi = psi / np.linalg.norm(psi)
    return DensityOperator(np.outer(psi, psi.conj()))


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=np.complex128) / dim)
