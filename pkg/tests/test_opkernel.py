import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puritylens import opkernel as ok
from puritylens.errors import DimensionError, NoConvergenceError, NotHermitianError
from puritylens.sampling import SeededGenerator

from .conftest import I2, PHI_PLUS, SX, SY, SZ


def _rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _rand_herm(rng, n, scale=1.0):
    a = _rand_complex(rng, n, n)
    return scale * 0.5 * (a + a.conj().T)


# -- tensor_product ---------------------------------------------------------


def test_tensor_identity():
    assert np.array_equal(ok.tensor_product(I2, I2), np.eye(4))


def test_tensor_diagonal_factors():
    assert np.array_equal(ok.tensor_product(SZ, SZ), np.diag([1, -1, -1, 1]))


def test_tensor_trace_factorizes():
    rng = np.random.default_rng(3)
    a, b = _rand_complex(rng, 3, 3), _rand_complex(rng, 4, 4)
    k = ok.tensor_product(a, b)
    # block (i, j) oracle built by direct multiplication
    blocks = np.block([[a[i, j] * b for j in range(3)] for i in range(3)])
    assert np.array_equal(k, blocks)
    assert np.isclose(np.trace(k), np.trace(a) * np.trace(b), rtol=1e-13)


def test_tensor_associative_exactly():
    # Gaussian-integer entries keep every product exact
    rng = np.random.default_rng(4)
    a, b, c = (rng.integers(-9, 10, (n, n)) + 1j * rng.integers(-9, 10, (n, n)) for n in (2, 3, 2))
    left = ok.tensor_product(ok.tensor_product(a, b), c)
    right = ok.tensor_product(a, ok.tensor_product(b, c))
    assert np.array_equal(left, right)


def test_tensor_associative_floats():
    rng = np.random.default_rng(4)
    a, b, c = (_rand_complex(rng, n, n) for n in (2, 3, 2))
    left = ok.tensor_product(ok.tensor_product(a, b), c)
    right = ok.tensor_product(a, ok.tensor_product(b, c))
    assert np.max(np.abs(left - right) / np.maximum(np.abs(left), 1e-300)) < 1e-15


def test_tensor_dimension_guard(monkeypatch):
    with pytest.raises(DimensionError):
        ok.tensor_product(np.eye(3), np.eye(3), max_dim=8)
    monkeypatch.setenv("PURITYLENS_MAX_DIM", "15")
    with pytest.raises(DimensionError):
        ok.tensor_product(np.eye(4), np.eye(4))
    assert ok.tensor_product(np.eye(3), np.eye(5)).shape == (15, 15)


# -- commutator -------------------------------------------------------------


def test_pauli_commutator():
    assert np.allclose(ok.commutator(SX, SY), 2j * SZ, atol=0)


def test_self_commutator_vanishes():
    a = _rand_complex(np.random.default_rng(5), 5, 5)
    assert np.array_equal(ok.commutator(a, a), np.zeros((5, 5)))


def test_zz_commutes_with_bell_projector():
    proj = np.outer(PHI_PLUS, PHI_PLUS.conj())
    assert np.max(np.abs(ok.commutator(np.kron(SZ, SZ), proj))) == 0


def test_commutator_dimension_mismatch():
    with pytest.raises(DimensionError):
        ok.commutator(np.eye(2), np.eye(3))


# -- hermitian_eigen --------------------------------------------------------


def test_eigen_diagonal(kernel_backend):
    vals, vecs = ok.hermitian_eigen(np.diag([2.0, 1.0]))
    assert np.array_equal(vals, [1.0, 2.0])
    assert np.allclose(np.abs(vecs), [[0, 1], [1, 0]])


def test_eigen_pauli_x(kernel_backend):
    vals, vecs = ok.hermitian_eigen(SX)
    assert np.allclose(vals, [-1, 1], atol=1e-15)
    for k, ref in enumerate([np.array([1, -1]) / np.sqrt(2), np.array([1, 1]) / np.sqrt(2)]):
        assert abs(abs(np.vdot(ref, vecs[:, k])) - 1) < 1e-14


@pytest.mark.parametrize("n", [1, 2, 3, 8, 16, 33])
def test_eigen_reconstruction(kernel_backend, n):
    h = _rand_herm(np.random.default_rng(n), n)
    vals, vecs = ok.hermitian_eigen(h)
    scale = 1 + np.max(np.abs(vals))
    assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(n))) <= 1e-12 * max(1, n / 8)
    assert np.max(np.abs(vecs @ np.diag(vals) @ vecs.conj().T - h)) <= 1e-12 * scale
    assert np.all(np.diff(vals) >= 0)
    # LAPACK as an independent oracle for the spectrum
    assert np.allclose(vals, np.linalg.eigvalsh(h), atol=1e-12 * scale)


def test_eigen_degenerate_ties_are_stable():
    vals, vecs = ok.hermitian_eigen(np.diag([3.0, 1.0, 1.0, 0.0]))
    assert np.array_equal(vals, [0, 1, 1, 3])
    # tie between diagonal positions 1 and 2 keeps their original order
    assert abs(vecs[1, 1]) == 1 and abs(vecs[2, 2]) == 1


def test_eigen_graded_spectrum():
    # blocks at very different scales; small eigenvalues keep relative accuracy
    h = np.zeros((4, 4), dtype=complex)
    h[:2, :2] = [[1.0, 0.5], [0.5, 2.0]]
    h[2:, 2:] = 1e20 * np.array([[1.0, 0.5], [0.5, 2.0]])
    small = np.linalg.eigvalsh(h[:2, :2])
    vals = ok.eigvalsh(h)
    assert np.allclose(vals[:2], small, rtol=1e-14)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        ok.hermitian_eigen(np.array([[0, 1], [0, 0]]))


def test_eigen_symmetrizes_small_asymmetry():
    h = SX.copy()
    h[0, 1] += 1e-12
    assert np.allclose(ok.eigvalsh(h), [-1, 1], atol=1e-11)


def test_eigen_sweep_limit():
    h = _rand_herm(np.random.default_rng(1), 12)
    with pytest.raises(NoConvergenceError):
        ok.hermitian_eigen(h, max_sweeps=1)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 10), scale=st.floats(1e-3, 1e3))
def test_eigen_properties(seed, n, scale):
    h = _rand_herm(np.random.default_rng(seed), n, scale)
    vals, vecs = ok.hermitian_eigen(h)
    assert vals.dtype == np.float64
    assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(n))) <= 1e-12
    assert np.max(np.abs((vecs * vals) @ vecs.conj().T - h)) <= 1e-12 * (1 + np.max(np.abs(vals)))


# -- unitary_from_hamiltonian -----------------------------------------------


def test_unitary_diagonal_generator():
    t = 0.7
    assert np.allclose(ok.unitary_from_hamiltonian(SZ, t), np.diag([np.exp(-1j * t), np.exp(1j * t)]), atol=1e-15)


def test_unitary_zero_time():
    h = _rand_herm(np.random.default_rng(2), 5)
    assert np.allclose(ok.unitary_from_hamiltonian(h, 0.0), np.eye(5), atol=1e-14)


def test_unitary_pauli_x_quarter_turn():
    assert np.allclose(ok.unitary_from_hamiltonian(SX, np.pi / 2), -1j * SX, atol=1e-15)


def test_unitary_against_taylor_series():
    h = _rand_herm(np.random.default_rng(6), 4)
    t = 0.3
    ref = np.eye(4, dtype=complex)
    term = np.eye(4, dtype=complex)
    for k in range(1, 40):
        term = term @ (-1j * t * h) / k
        ref = ref + term
    assert np.allclose(ok.unitary_from_hamiltonian(h, t), ref, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 64), norm=st.floats(1e-3, 1e3), t=st.floats(-100, 100))
def test_unitarity(seed, n, norm, t):
    h = _rand_herm(np.random.default_rng(seed), n)
    h *= norm / np.linalg.norm(h, 2)
    u = ok.unitary_from_hamiltonian(h, t)
    assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-12


# -- norms ------------------------------------------------------------------


def test_trace_norm_pauli_z():
    assert ok.trace_norm(SZ) == pytest.approx(2, abs=1e-14)
    assert ok.trace_norm(SZ, hermitian=True) == 2


def test_trace_norm_zero():
    assert ok.trace_norm(np.zeros((3, 3))) == 0


def test_trace_norm_bell_minus_mixed():
    w = np.outer(PHI_PLUS, PHI_PLUS.conj()) - np.eye(4) / 4
    # oracle: eigenvalues {3/4, -1/4, -1/4, -1/4} from numpy
    oracle = np.sum(np.abs(np.linalg.eigvalsh(w)))
    assert oracle == pytest.approx(1.5, abs=1e-15)
    assert ok.trace_norm(w) == pytest.approx(1.5, abs=1e-12)
    assert ok.trace_norm(w, hermitian=True) == pytest.approx(1.5, abs=1e-14)


def test_operator_norm_examples():
    assert ok.operator_norm(np.kron(SX, SX)) == pytest.approx(1, abs=1e-14)
    assert ok.operator_norm(3 * np.eye(4)) == pytest.approx(3, abs=1e-14)
    rng = np.random.default_rng(9)
    u, v = _rand_complex(rng, 5), _rand_complex(rng, 5)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    assert ok.operator_norm(np.outer(u, v.conj())) == pytest.approx(1, abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 9))
def test_norm_inequalities(seed, n):
    a = _rand_complex(np.random.default_rng(seed), n, n)
    tn = ok.trace_norm(a)
    op = ok.operator_norm(a)
    assert tn >= abs(np.trace(a)) - 1e-12
    assert op <= tn + 1e-12
    assert tn <= n * op + 1e-12
    assert tn == pytest.approx(np.linalg.svd(a, compute_uv=False).sum(), rel=1e-10)


def test_generator_hermitian_inputs_roundtrip():
    gen = SeededGenerator(1)
    h = 0.5 * (gen.complex_normal((6, 6)) + gen.complex_normal((6, 6)).conj().T)
    assert not ok.is_hermitian(h)
    assert ok.is_hermitian(h + h.conj().T)
