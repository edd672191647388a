import numpy as np
import pytest

from puritylens.dynamics import HamiltonianDecomposition
from puritylens.states import bipartite, pure

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)

THETA = np.pi / 6


def theta_closed_form(t, theta=THETA):
    """Reduced purity ``a**2 + (1 - a)**2`` and its derivative for the
    two-qubit state ``cos(theta)|00> + sin(theta)|11>`` under ``sx (x) sx``."""
    a = np.cos(theta) ** 2 * np.cos(t) ** 2 + np.sin(theta) ** 2 * np.sin(t) ** 2
    da = -np.cos(2 * theta) * np.sin(2 * t)
    return a**2 + (1 - a) ** 2, (4 * a - 2) * da


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def bell():
    return bipartite(pure(PHI_PLUS).matrix, 2, 2)


@pytest.fixture
def classical_bell():
    return bipartite(np.diag([0.5, 0, 0, 0.5]).astype(complex), 2, 2)


@pytest.fixture
def theta_state():
    psi = np.array([np.cos(THETA), 0, 0, np.sin(THETA)], dtype=complex)
    return bipartite(pure(psi).matrix, 2, 2)


@pytest.fixture
def theta_hamiltonian():
    return HamiltonianDecomposition.interaction_only(np.kron(SX, SX), 2, 2)


@pytest.fixture(params=["numba", "numpy"])
def kernel_backend(request, monkeypatch):
    if request.param == "numpy":
        monkeypatch.setenv("PURITYLENS_DISABLE_NUMBA", "1")
    else:
        monkeypatch.delenv("PURITYLENS_DISABLE_NUMBA", raising=False)
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
