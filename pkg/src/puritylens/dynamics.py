"""Unitary evolution of bipartite states and the reduced-purity derivative.

Units: hbar = 1 and energies in E0 = 1, so times are in hbar/E0.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _config
from .errors import DimensionError, ImaginaryResidueTooLarge, InvariantError, NotHermitianError
from .opkernel import (
    HermitianEigen,
    as_matrix,
    herm_tolerance,
    hermitian_eigen,
    hermiticity_residual,
    tensor_product,
    unitary_from_eigen,
)
from .states import (
    BipartiteState,
    DensityOperator,
    Side,
    partial_trace_matrix,
    correlation_operator,
    purity,
)


def _check_hermitian(m: np.ndarray, name: str) -> np.ndarray:
    m = as_matrix(m, name)
    resid = hermiticity_residual(m)
    if resid > herm_tolerance(m):
        raise NotHermitianError(f"{name} is not Hermitian (residual {resid:.3e})")
    return m


@dataclass(frozen=True)
class HamiltonianDecomposition:
    """``H = H_S (x) I_E + H_int + I_S (x) H_E``."""

    h_s: np.ndarray
    h_e: np.ndarray
    h_int: np.ndarray

    def __post_init__(self):
        h_s = _check_hermitian(self.h_s, "h_s")
        h_e = _check_hermitian(self.h_e, "h_e")
        h_int = _check_hermitian(self.h_int, "h_int")
        if h_int.shape[0] != h_s.shape[0] * h_e.shape[0]:
            raise DimensionError(
                f"h_int has dim {h_int.shape[0]}, expected {h_s.shape[0]}*{h_e.shape[0]}"
            )
        object.__setattr__(self, "h_s", h_s)
        object.__setattr__(self, "h_e", h_e)
        object.__setattr__(self, "h_int", h_int)

    @property
    def d_s(self) -> int:
        return self.h_s.shape[0]

    @property
    def d_e(self) -> int:
        return self.h_e.shape[0]

    @classmethod
    def interaction_only(cls, h_int, d_s: int, d_e: int) -> "HamiltonianDecomposition":
        return cls(np.zeros((d_s, d_s)), np.zeros((d_e, d_e)), h_int)

    def without_free_parts(self) -> "HamiltonianDecomposition":
        return self.interaction_only(self.h_int, self.d_s, self.d_e)


@dataclass(frozen=True)
class PuritySeries:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise DimensionError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(values <= 0) or np.any(values > 1 + 1e-12):
            raise InvariantError("purity values must lie in (0, 1]")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.times)


def assemble_total(h: HamiltonianDecomposition) -> np.ndarray:
    eye_s = np.eye(h.d_s)
    eye_e = np.eye(h.d_e)
    return tensor_product(h.h_s, eye_e) + h.h_int + tensor_product(eye_s, h.h_e)


class Propagator:
    """``exp(-i H t)`` for one time-independent Hamiltonian.

    The spectrum is computed once; every ``unitary(t)`` re-exponentiates from
    t = 0 rather than composing steps.
    """

    def __init__(self, h_total):
        self.h_total = _check_hermitian(h_total, "h_total")
        self.eigen: HermitianEigen = hermitian_eigen(self.h_total)

    @property
    def dim(self) -> int:
        return self.h_total.shape[0]

    def unitary(self, t: float) -> np.ndarray:
        return unitary_from_eigen(self.eigen, float(t))

    def evolve_matrix(self, rho: np.ndarray, t: float) -> np.ndarray:
        u = self.unitary(t)
        out = u @ rho @ u.conj().T
        return 0.5 * (out + out.conj().T)

    def evolve(self, state: BipartiteState, t: float) -> BipartiteState:
        if state.rho_tot.dim != self.dim:
            raise DimensionError(f"state dim {state.rho_tot.dim} != Hamiltonian dim {self.dim}")
        if t == 0:
            return state
        return BipartiteState(DensityOperator(self.evolve_matrix(state.matrix, t)), state.d_s, state.d_e)


def _as_propagator(h) -> Propagator:
    if isinstance(h, Propagator):
        return h
    if isinstance(h, HamiltonianDecomposition):
        return Propagator(assemble_total(h))
    return Propagator(h)


def evolve(state: BipartiteState, h_total, t: float) -> BipartiteState:
    """``U_t rho U_t^dagger`` with ``U_t = exp(-i H t)``."""
    return _as_propagator(h_total).evolve(state, t)


def reduced_purity_at(prop: Propagator, state: BipartiteState, t: float) -> float:
    # unitary evolution preserves the density-operator invariants, so the
    # intermediate states are not re-validated here
    rho = prop.evolve_matrix(state.matrix, t)
    return purity(partial_trace_matrix(rho, state.d_s, state.d_e, Side.OVER_E))


def purity_series(
    state: BipartiteState,
    h: HamiltonianDecomposition,
    times,
    threads: int = 1,
) -> PuritySeries:
    """Reduced purity ``P_S(t_k)`` evolved afresh from ``state`` for every ``t_k``.

    ``threads > 1`` evaluates time points concurrently; the output is identical
    to the serial evaluation.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise DimensionError("times must be 1-d")
    prop = _as_propagator(h)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda t: reduced_purity_at(prop, state, t), times))
    else:
        values = [reduced_purity_at(prop, state, t) for t in times]
    return PuritySeries(times, np.array(values))


def purity_derivative_analytic(state: BipartiteState, h: HamiltonianDecomposition) -> float:
    """``-2i Tr{(rho_S (x) I_E) [H_int, rho_cor]}``.

    The trace is real in exact arithmetic. An imaginary part above 1e-10 is
    treated as a numerical or invariant failure.
    """
    if h.d_s != state.d_s or h.d_e != state.d_e:
        raise DimensionError("Hamiltonian and state factor dimensions differ")
    rho_cor = correlation_operator(state).matrix
    comm = h.h_int @ rho_cor - rho_cor @ h.h_int
    lifted = np.kron(state.rho_s.matrix, np.eye(state.d_e))
    value = -2j * np.sum(lifted.T * comm)
    if abs(value.imag) > 1e-10:
        raise ImaginaryResidueTooLarge(f"imaginary residue {value.imag:.3e}")
    return float(value.real)


def purity_derivative_fd(
    state: BipartiteState,
    h,
    step: float = 1e-4,
    richardson: bool = True,
) -> float:
    """Finite-difference ``dP_S/dt`` at t = 0.

    Central difference, or with ``richardson`` the fourth-order stencil
    ``(-P(2h) + 8P(h) - 8P(-h) + P(-2h)) / 12h``.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if step < 1e-12:
        raise ValueError(f"step {step!r} underflows (< 1e-12)")
    prop = _as_propagator(h)

    def p(t):
        return reduced_purity_at(prop, state, t)

    if richardson:
        return (-p(2 * step) + 8 * p(step) - 8 * p(-step) + p(-2 * step)) / (12 * step)
    return (p(step) - p(-step)) / (2 * step)


def energy_moments(state: BipartiteState, h_total) -> tuple[float, float]:
    """Mean ``Tr(rho H)`` and variance ``Tr(rho H^2) - mean^2`` of the energy."""
    if isinstance(h_total, HamiltonianDecomposition):
        h_total = assemble_total(h_total)
    h = _check_hermitian(h_total, "h_total")
    rho = state.matrix
    if h.shape != rho.shape:
        raise DimensionError(f"Hamiltonian shape {h.shape} != state shape {rho.shape}")
    rho_h = rho @ h
    mean = np.trace(rho_h).real
    second = np.sum(rho_h.T * h).real
    var = second - mean * mean
    if var < 0:
        if var < -1e-9 * max(1.0, second):
            raise InvariantError(f"negative energy variance {var:.3e}")
        var = 0.0
    return float(mean), float(var)
