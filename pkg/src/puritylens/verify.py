"""Randomized checks of the purity-derivative bounds over seeded ensembles.

Checks and their slack (a negative slack below ``-tolerance`` is a violation):

    chain_a          bound_a - |P'|
    chain_b          bound_b - bound_a
    chain_c          bound_c - bound_b
    ineq_linear      2 I - ||rho_cor||_1
    ineq_quadratic   2 I - ||rho_cor||_1 ** 2        (Pinsker form, recorded alongside)
    theorem2         1e-10 - |P'| on a product state (analytic estimator)
    theorem2_fd      1e-8 - |P'| on the same product state (Richardson estimator)
    pairing_lower    ||A rho||_1 - |Tr(A rho)|
    pairing_upper    ||A|| ||rho||_1 - ||A rho||_1
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _config
from .dynamics import HamiltonianDecomposition, purity_derivative_analytic, purity_derivative_fd
from .errors import PurityLensError
from .opkernel import as_matrix, operator_norm, trace_norm
from .sampling import (
    SeededGenerator,
    random_correlated,
    random_density,
    random_hermitian,
    random_product,
)
from .states import BipartiteState, DensityOperator, correlation_operator, mutual_information, product_state

THEOREM2_TOL = 1e-10
THEOREM2_FD_TOL = 1e-8

CHECKS = (
    "chain_a",
    "chain_b",
    "chain_c",
    "ineq_linear",
    "ineq_quadratic",
    "theorem2",
    "theorem2_fd",
    "pairing_lower",
    "pairing_upper",
)


@dataclass
class BoundChainReport:
    p_prime: float
    bound_a: float
    bound_b: float
    bound_c: float
    corr_trace_norm: float
    mutual_information: float
    h_int_norm: float
    seed: int | None = None
    descriptor: str = ""

    @property
    def slack_a(self) -> float:
        return self.bound_a - abs(self.p_prime)

    @property
    def slack_b(self) -> float:
        return self.bound_b - self.bound_a

    @property
    def slack_c(self) -> float:
        return self.bound_c - self.bound_b

    @property
    def slack_linear(self) -> float:
        return 2.0 * self.mutual_information - self.corr_trace_norm

    @property
    def slack_quadratic(self) -> float:
        return 2.0 * self.mutual_information - self.corr_trace_norm**2

    def ordered(self, eps: float = _config.EPS_VERIFY) -> bool:
        return min(self.slack_a, self.slack_b, self.slack_c) >= -eps


def bound_chain(
    state: BipartiteState,
    h: HamiltonianDecomposition,
    seed: int | None = None,
    descriptor: str = "",
) -> BoundChainReport:
    """Evaluate ``|P'|`` and the three upper bounds on it for one instance.

    ``bound_a = 2 ||rho_S|| ||[H_int, rho_cor]||_1``,
    ``bound_b = 4 ||H_int|| ||rho_cor||_1``,
    ``bound_c = 8 ||H_int|| I(rho_tot)``.
    """
    rho_cor = correlation_operator(state).matrix
    comm = h.h_int @ rho_cor - rho_cor @ h.h_int
    # the commutator of two Hermitian operators is anti-Hermitian
    comm_norm = trace_norm(1j * comm, hermitian=True)
    rho_s_norm = float(state.rho_s.spectrum[-1])
    h_norm = operator_norm(h.h_int)
    cor_norm = trace_norm(rho_cor, hermitian=True)
    info = mutual_information(state)
    return BoundChainReport(
        p_prime=purity_derivative_analytic(state, h),
        bound_a=2.0 * rho_s_norm * comm_norm,
        bound_b=4.0 * h_norm * cor_norm,
        bound_c=8.0 * h_norm * info,
        corr_trace_norm=cor_norm,
        mutual_information=info,
        h_int_norm=h_norm,
        seed=seed,
        descriptor=descriptor,
    )


def check_theorem2(rho_s: DensityOperator, rho_e: DensityOperator, h: HamiltonianDecomposition) -> float:
    """``|P'|`` for the uncorrelated state ``rho_s (x) rho_e``; expected to vanish."""
    return abs(purity_derivative_analytic(product_state(rho_s, rho_e), h))


def check_trace_pairing(a, rho) -> tuple[float, float, float]:
    """``(|Tr(A rho)|, ||A rho||_1, ||A|| ||rho||_1)``, which should be non-decreasing."""
    a = as_matrix(a, "a")
    rho = as_matrix(rho, "rho")
    if a.shape != rho.shape:
        raise ValueError(f"shapes {a.shape} and {rho.shape} differ")
    prod = a @ rho
    return (
        float(abs(np.trace(prod))),
        trace_norm(prod),
        operator_norm(a) * trace_norm(rho),
    )


@dataclass(frozen=True)
class SuiteConfig:
    dims_s: tuple[int, ...] = (2, 3, 4)
    dims_e: tuple[int, ...] = (2, 3, 4)
    trials: int = 500
    seed: int = 42
    tolerance: float = _config.EPS_VERIFY
    norm_cap: float = 1.0
    fd_step: float = 1e-4
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for dims in (self.dims_s, self.dims_e):
            if not dims or min(dims) < 1:
                raise ValueError("dimension sets must be non-empty and positive")
        if not self.tolerance > 0 or not self.norm_cap > 0 or not self.fd_step > 0:
            raise ValueError("tolerance, norm_cap and fd_step must be positive")


@dataclass
class TrialResult:
    index: int
    subseed: int
    d_s: int
    d_e: int
    report: BoundChainReport
    theorem2: float
    theorem2_fd: float
    pairing: tuple[float, float, float]

    def slacks(self) -> dict[str, float]:
        r = self.report
        lhs, mid, rhs = self.pairing
        return {
            "chain_a": r.slack_a,
            "chain_b": r.slack_b,
            "chain_c": r.slack_c,
            "ineq_linear": r.slack_linear,
            "ineq_quadratic": r.slack_quadratic,
            "theorem2": THEOREM2_TOL - self.theorem2,
            "theorem2_fd": THEOREM2_FD_TOL - self.theorem2_fd,
            "pairing_lower": mid - lhs,
            "pairing_upper": rhs - mid,
        }


class TrialFailure(PurityLensError, RuntimeError):
    def __init__(self, seed: int, index: int, cause: Exception):
        self.seed = seed
        self.index = index
        super().__init__(f"trial {index} (seed {seed}, replay with run_trial) failed: {cause!r}")


def run_trial(cfg: SuiteConfig, index: int) -> TrialResult:
    """One instance of the suite; depends only on ``(cfg.seed, index)``."""
    gen = SeededGenerator(cfg.seed).child(index)
    try:
        rng = gen.rng
        d_s = int(cfg.dims_s[rng.integers(len(cfg.dims_s))])
        d_e = int(cfg.dims_e[rng.integers(len(cfg.dims_e))])
        h = HamiltonianDecomposition(
            random_hermitian(gen, d_s, cfg.norm_cap),
            random_hermitian(gen, d_e, cfg.norm_cap),
            random_hermitian(gen, d_s * d_e, cfg.norm_cap),
        )
        correlated = random_correlated(gen, d_s, d_e)
        report = bound_chain(correlated, h, seed=gen.subseed, descriptor=f"trial={index} d_S={d_s} d_E={d_e}")
        prod = random_product(gen, d_s, d_e)
        t2 = check_theorem2(prod.rho_s, prod.rho_e, h)
        t2_fd = abs(purity_derivative_fd(prod, h, cfg.fd_step, richardson=True))
        d = d_s * d_e
        a = gen.complex_normal((d, d))
        rho = random_density(gen, d)
        pairing = check_trace_pairing(a, rho.matrix)
    except Exception as exc:
        raise TrialFailure(cfg.seed, index, exc) from exc
    return TrialResult(index, gen.subseed, d_s, d_e, report, t2, t2_fd, pairing)


def _stats(values) -> dict[str, float]:
    arr = np.asarray(values, dtype=float)
    return {"min": float(arr.min()), "median": float(np.median(arr)), "max": float(arr.max())}


@dataclass
class VerificationSummary:
    trials: int
    violations: int
    worst_slack: float
    seed: int
    tolerance: float
    dims_s: tuple[int, ...]
    dims_e: tuple[int, ...]
    checks: dict[str, dict] = field(default_factory=dict)
    levels: dict[str, dict] = field(default_factory=dict)
    violating: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["dims_s"] = list(self.dims_s)
        out["dims_e"] = list(self.dims_e)
        return out


def summarize(cfg: SuiteConfig, results: list[TrialResult]) -> VerificationSummary:
    results = sorted(results, key=lambda r: r.index)
    slacks = {name: [] for name in CHECKS}
    violating = []
    for res in results:
        for name, s in res.slacks().items():
            slacks[name].append(s)
            if s < -cfg.tolerance:
                violating.append(
                    {"trial": res.index, "subseed": res.subseed, "check": name, "slack": s,
                     "d_S": res.d_s, "d_E": res.d_e}
                )
    checks = {}
    for name in CHECKS:
        st = _stats(slacks[name])
        st["violations"] = sum(1 for v in violating if v["check"] == name)
        checks[name] = st
    levels = {
        "abs_p_prime": _stats([abs(r.report.p_prime) for r in results]),
        "bound_a": _stats([r.report.bound_a for r in results]),
        "bound_b": _stats([r.report.bound_b for r in results]),
        "bound_c": _stats([r.report.bound_c for r in results]),
        "corr_trace_norm": _stats([r.report.corr_trace_norm for r in results]),
        "mutual_information": _stats([r.report.mutual_information for r in results]),
    }
    return VerificationSummary(
        trials=len(results),
        violations=len(violating),
        worst_slack=min(st["min"] for st in checks.values()),
        seed=cfg.seed,
        tolerance=cfg.tolerance,
        dims_s=tuple(cfg.dims_s),
        dims_e=tuple(cfg.dims_e),
        checks=checks,
        levels=levels,
        violating=violating,
    )


def run_suite(cfg: SuiteConfig) -> VerificationSummary:
    """Run ``cfg.trials`` independent instances and aggregate their slacks.

    Deterministic for a fixed seed, with or without threads. Bound violations
    are recorded in the summary; a hard numerical failure raises
    :class:`TrialFailure` naming the trial to replay.
    """
    indices = range(cfg.trials)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda i: run_trial(cfg, i), indices))
    else:
        results = [run_trial(cfg, i) for i in indices]
    return summarize(cfg, results)
