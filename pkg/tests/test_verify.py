import math

import numpy as np
import pytest

from puritylens.dynamics import HamiltonianDecomposition, evolve
from puritylens.sampling import SeededGenerator, random_density, random_hermitian
from puritylens.states import maximally_mixed, product_state
from puritylens.verify import (
    CHECKS,
    SuiteConfig,
    TrialFailure,
    bound_chain,
    check_theorem2,
    check_trace_pairing,
    run_suite,
    run_trial,
)

from .conftest import PHI_PLUS, SX, SZ


def _svd_trace_norm(m):
    return float(np.linalg.svd(m, compute_uv=False).sum())


def test_bound_chain_bell(bell):
    h = HamiltonianDecomposition.interaction_only(np.kron(SX, SZ), 2, 2)
    rep = bound_chain(bell, h)
    cor = np.outer(PHI_PLUS, PHI_PLUS.conj()) - np.eye(4) / 4
    comm = np.kron(SX, SZ) @ cor - cor @ np.kron(SX, SZ)
    assert rep.p_prime == pytest.approx(0, abs=1e-12)
    assert rep.bound_a == pytest.approx(2 * 0.5 * _svd_trace_norm(comm), abs=1e-12)
    assert rep.bound_b == pytest.approx(6, abs=1e-12)
    assert rep.bound_c == pytest.approx(16 * math.log(2), abs=1e-12)
    assert rep.bound_c == pytest.approx(11.0904, abs=1e-4)
    assert rep.ordered()


def test_bound_chain_product_state():
    gen = SeededGenerator(1)
    state = product_state(random_density(gen, 2), random_density(gen, 3))
    h = HamiltonianDecomposition(random_hermitian(gen, 2), random_hermitian(gen, 3), random_hermitian(gen, 6))
    rep = bound_chain(state, h)
    assert abs(rep.p_prime) <= 1e-9 and rep.bound_b <= 1e-9 and rep.bound_c <= 1e-9


def test_bound_chain_theta(theta_state, theta_hamiltonian):
    st_t = evolve(theta_state, theta_hamiltonian, 0.3)
    rep = bound_chain(st_t, theta_hamiltonian)
    assert rep.p_prime == pytest.approx(-np.sin(1.2) / 4, abs=1e-9)
    assert abs(rep.p_prime) <= rep.bound_a
    assert rep.ordered()


def test_bound_chain_does_not_mutate(bell):
    h = HamiltonianDecomposition.interaction_only(np.kron(SX, SX), 2, 2)
    before = bell.matrix.copy(), h.h_int.copy()
    bound_chain(bell, h)
    assert np.array_equal(bell.matrix, before[0]) and np.array_equal(h.h_int, before[1])


def test_check_theorem2_zero_for_product_and_no_interaction():
    gen = SeededGenerator(2)
    h = HamiltonianDecomposition(random_hermitian(gen, 3), random_hermitian(gen, 3), random_hermitian(gen, 9))
    assert check_theorem2(random_density(gen, 3), random_density(gen, 3), h) <= 1e-10
    # with no coupling the derivative also vanishes for correlated states,
    # so a zero derivative does not certify the absence of correlations
    from puritylens.dynamics import purity_derivative_analytic
    from puritylens.sampling import random_correlated

    bare = HamiltonianDecomposition(h.h_s, h.h_e, np.zeros((9, 9)))
    assert abs(purity_derivative_analytic(random_correlated(gen, 3, 3), bare)) <= 1e-12


def test_trace_pairing_examples():
    rho = random_density(SeededGenerator(3), 4).matrix
    lhs, mid, rhs = check_trace_pairing(np.eye(4), rho)
    assert lhs == pytest.approx(1, abs=1e-12) and mid == pytest.approx(1, abs=1e-12)
    assert rhs == pytest.approx(1, abs=1e-12)
    assert check_trace_pairing(SZ, maximally_mixed(2).matrix) == pytest.approx((0, 1, 1), abs=1e-14)
    with pytest.raises(ValueError):
        check_trace_pairing(np.eye(2), np.eye(3))


def test_trace_pairing_random():
    gen = SeededGenerator(4)
    for _ in range(500):
        a = gen.complex_normal((3, 3))
        rho = random_density(gen, 3).matrix
        lhs, mid, rhs = check_trace_pairing(a, rho)
        assert lhs <= mid + 1e-9 <= rhs + 2e-9


def test_suite_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig(trials=0)
    with pytest.raises(ValueError):
        SuiteConfig(dims_s=())
    with pytest.raises(ValueError):
        SuiteConfig(tolerance=0)


def test_suite_deterministic():
    cfg = SuiteConfig(trials=10, seed=42)
    assert run_suite(cfg).to_dict() == run_suite(cfg).to_dict()


def test_suite_threads_match_serial():
    serial = run_suite(SuiteConfig(trials=24, seed=7))
    threaded = run_suite(SuiteConfig(trials=24, seed=7, threads=4))
    assert serial.to_dict() == threaded.to_dict()


def test_trial_replay():
    cfg = SuiteConfig(trials=20, seed=42)
    a = run_trial(cfg, 13)
    b = run_trial(cfg, 13)
    assert a.slacks() == b.slacks() and a.subseed == b.subseed


def test_summary_structure():
    summary = run_suite(SuiteConfig(trials=20, seed=5))
    d = summary.to_dict()
    assert set(d["checks"]) == set(CHECKS)
    assert d["violations"] == sum(c["violations"] for c in d["checks"].values())
    assert d["worst_slack"] == min(c["min"] for c in d["checks"].values())
    for name in ("chain_a", "chain_b", "ineq_quadratic", "theorem2", "theorem2_fd", "pairing_lower", "pairing_upper"):
        assert d["checks"][name]["violations"] == 0


def test_trial_failure_names_seed(monkeypatch):
    import puritylens.verify as verify

    def boom(*args, **kwargs):
        raise FloatingPointError("synthetic")

    monkeypatch.setattr(verify, "bound_chain", boom)
    with pytest.raises(TrialFailure, match="trial 3 \\(seed 9"):
        run_trial(SuiteConfig(trials=5, seed=9), 3)


def test_linear_inequality_failures_are_recorded_not_raised():
    # small-dimension Ginibre states often sit near the maximally mixed state,
    # where the linear trace-norm bound (and hence the last chain level) fails
    summary = run_suite(SuiteConfig(dims_s=(2,), dims_e=(2,), trials=40, seed=1))
    checks = summary.checks
    assert checks["ineq_linear"]["violations"] > 0
    assert checks["ineq_quadratic"]["violations"] == 0
    assert all(v["check"] in ("chain_c", "ineq_linear") for v in summary.violating)
