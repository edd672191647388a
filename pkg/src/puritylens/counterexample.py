"""Finite truncations of an unbounded-Hamiltonian construction whose reduced
purity is not differentiable at t = 0 even though the initial state is a
product.

Layout of the truncated space: S = S1 (x) S2 with dim S1 = N and dim S2 = 2,
E has dim 2, so d_S = 2N, d_E = 2 and the total index is ``4n + 2s + e``.
On each four-dimensional block ``|phi_n> (x) S2 (x) E`` the Hamiltonian is
diagonal in the chi basis with energies ``(0, h_n, h_n, 2 h_n)``.

Case ``a``: ``p_n = 2**-n``, ``h_n = n / 4`` (smooth, flat at t = 0).
Case ``b``: ``p_n = 2**-n``, ``h_n = 25**n * pi / 4`` (Weierstrass-type).

Phases ``4 h_n t = 25**n * pi * t`` in case ``b`` are reduced modulo 2*pi in
exact integer arithmetic from ``t.as_integer_ratio()``, so rational probe
times such as ``Fraction(1, 25**k)`` are handled exactly.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _config, _kernels
from .dynamics import HamiltonianDecomposition, PuritySeries, energy_moments, purity_series
from .errors import DimensionError
from .states import BipartiteState, DensityOperator

CASES = ("a", "b", "custom")
CASE_B_MAX_TERMS = 150


@dataclass(frozen=True)
class CounterexampleConfig:
    case: str = "a"
    truncation: int = 8
    renormalize: bool = True
    weights: tuple[float, ...] | None = None
    energies: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}; expected one of {CASES}")
        if int(self.truncation) != self.truncation or self.truncation < 1:
            raise ValueError("truncation must be an integer >= 1")
        if self.case == "b" and self.truncation > CASE_B_MAX_TERMS:
            raise ValueError(f"case b energies overflow beyond N = {CASE_B_MAX_TERMS}")
        if self.case == "custom" and self.energies is None:
            raise ValueError("custom case needs an energies list")
        for name in ("weights", "energies"):
            seq = getattr(self, name)
            if seq is not None and len(seq) < self.truncation:
                raise ValueError(f"{name} has {len(seq)} entries, truncation is {self.truncation}")
        p = self.raw_weights()
        if np.any(p < 0):
            raise ValueError("weights must be non-negative")
        if p.sum() > 1 + 1e-12:
            raise ValueError(f"truncated weights sum to {p.sum()!r} > 1")
        if self.renormalize and p.sum() <= 0:
            raise ValueError("truncated weights sum to zero")
        if np.any(self.energies_array() < 0):
            raise ValueError("energies must be non-negative")

    def with_truncation(self, n: int) -> "CounterexampleConfig":
        return CounterexampleConfig(self.case, n, self.renormalize, self.weights, self.energies)

    @property
    def geometric(self) -> bool:
        return self.weights is None

    def raw_weights(self) -> np.ndarray:
        n = self.truncation
        if self.weights is not None:
            return np.asarray(self.weights[:n], dtype=float)
        return 0.5 ** np.arange(1, n + 1)

    def weights_array(self) -> np.ndarray:
        """``p~_n``: renormalized to unit sum when ``renormalize`` is set."""
        p = self.raw_weights()
        return p / p.sum() if self.renormalize else p

    def energies_array(self) -> np.ndarray:
        n = np.arange(1, self.truncation + 1)
        if self.case == "a":
            return n / 4.0
        if self.case == "b":
            return np.array([25.0**k * math.pi / 4.0 for k in n])
        return np.asarray(self.energies[: self.truncation], dtype=float)


def _reduced_turns(base: int, power: int, t, period: int = 2) -> float:
    """``(base**power * t) mod period``, exact for rational ``t``."""
    num, den = t.as_integer_ratio()
    mod = period * den
    return ((pow(int(base), int(power), mod) * num) % mod) / den


def _as_exact(t):
    if isinstance(t, (Fraction, int)):
        return t
    return float(t)


def _case_b_trig(cfg, t, fn, period: int, scale: float) -> np.ndarray:
    # fn(scale * pi * (25**n t mod period)) for n = 1..N
    t = _as_exact(t)
    return np.array(
        [fn(scale * math.pi * _reduced_turns(25, k, t, period)) for k in range(1, cfg.truncation + 1)]
    )


def _cos4ht(cfg: CounterexampleConfig, t) -> np.ndarray:
    """``cos(4 h_n t)`` for n = 1..N at a scalar time."""
    if cfg.case == "b":
        return _case_b_trig(cfg, t, math.cos, 2, 1.0)
    return np.cos(4.0 * cfg.energies_array() * float(t))


def _sin2ht(cfg: CounterexampleConfig, t) -> np.ndarray:
    if cfg.case == "b":
        return _case_b_trig(cfg, t, math.sin, 4, 0.5)
    return np.sin(2.0 * cfg.energies_array() * float(t))


def _sin_ht(cfg: CounterexampleConfig, t) -> np.ndarray:
    if cfg.case == "b":
        return _case_b_trig(cfg, t, math.sin, 8, 0.25)
    return np.sin(cfg.energies_array() * float(t))


def chi_basis() -> np.ndarray:
    """Columns are chi_1..chi_4 in the ``(s, e)`` order s1e1, s1e2, s2e1, s2e2."""
    r = 1.0 / math.sqrt(2.0)
    chi = np.zeros((4, 4), dtype=np.complex128)
    chi[0, 0], chi[3, 0] = r, 1j * r
    chi[2, 1] = 1.0
    chi[1, 2] = 1.0
    chi[0, 3], chi[3, 3] = r, -1j * r
    return chi


def _check_size(cfg: CounterexampleConfig) -> None:
    dim = 4 * cfg.truncation
    if dim > _config.max_dim():
        raise DimensionError(f"truncated space has dim {dim} > guard {_config.max_dim()}")


def build_initial_state(cfg: CounterexampleConfig) -> BipartiteState:
    """``(sum_n p~_n |phi_n><phi_n| (x) |s1><s1|) (x) |e1><e1|``."""
    _check_size(cfg)
    p = cfg.weights_array()
    if abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(
            f"truncated weights sum to {p.sum()!r}; enable renormalize to build a density operator"
        )
    n = cfg.truncation
    diag = np.zeros(4 * n)
    diag[0::4] = p
    return BipartiteState(DensityOperator(np.diag(diag).astype(np.complex128)), 2 * n, 2)


def build_hamiltonian(cfg: CounterexampleConfig) -> np.ndarray:
    _check_size(cfg)
    chi = chi_basis()
    n = cfg.truncation
    h = np.zeros((4 * n, 4 * n), dtype=np.complex128)
    for i, hn in enumerate(cfg.energies_array()):
        block = (chi * np.array([0.0, hn, hn, 2.0 * hn])) @ chi.conj().T
        h[4 * i : 4 * i + 4, 4 * i : 4 * i + 4] = 0.5 * (block + block.conj().T)
    return h


def decomposition(cfg: CounterexampleConfig) -> HamiltonianDecomposition:
    """The construction's Hamiltonian as a pure S-E coupling."""
    return HamiltonianDecomposition.interaction_only(build_hamiltonian(cfg), 2 * cfg.truncation, 2)


def simulate_truncated(cfg: CounterexampleConfig, times, threads: int = 1) -> PuritySeries:
    """Reduced purity from full ``4N``-dimensional unitary evolution."""
    return purity_series(build_initial_state(cfg), decomposition(cfg), times, threads=threads)


def reduced_state_analytic(cfg: CounterexampleConfig, t) -> np.ndarray:
    p = cfg.weights_array()
    c2 = 0.5 * (1.0 + _cos2ht(cfg, t))
    diag = np.empty(2 * cfg.truncation)
    diag[0::2] = p * c2
    diag[1::2] = p * (1.0 - c2)
    return np.diag(diag)


def _cos2ht(cfg, t):
    # cos(2 h_n t) = 1 - 2 sin^2(h_n t); recovered from cos(4 h_n t) would lose the sign
    s = _sin_ht(cfg, t)
    return 1.0 - 2.0 * s * s


def initial_purity(cfg: CounterexampleConfig) -> float:
    p = cfg.weights_array()
    return float(np.sum(p * p))


def geometric_initial_purity(n: int, renormalize: bool = True) -> float:
    """Closed form of ``sum p~_n^2`` for ``p_n = 2**-n`` truncated at ``n``."""
    raw = (1.0 - 4.0**-n) / 3.0
    return raw / (1.0 - 2.0**-n) ** 2 if renormalize else raw


def analytic_tail_bound(cfg: CounterexampleConfig) -> float:
    """Bound ``sum_{n>N} 4**-n`` on the un-renormalized truncation error
    (geometric weights only; NaN for custom weights)."""
    if not cfg.geometric:
        return math.nan
    return 4.0 ** -cfg.truncation / 3.0


def analytic_purity(cfg: CounterexampleConfig, t):
    """``3/4 P(0) + 1/4 sum_n p~_n^2 cos(4 h_n t)``; scalar or 1-d array ``t``."""
    p2 = cfg.weights_array() ** 2
    p0 = float(p2.sum())
    if np.ndim(t) == 0:
        return 0.75 * p0 + 0.25 * float(np.dot(p2, _cos4ht(cfg, t)))
    times = np.asarray(t, dtype=float)
    if cfg.case == "b":
        osc = np.array([np.dot(p2, _cos4ht(cfg, float(x))) for x in times])
    else:
        osc = _kernels.cos_series(times, p2, 4.0 * cfg.energies_array())
    return 0.75 * p0 + 0.25 * osc


def purity_forms(cfg: CounterexampleConfig, t) -> tuple[float, float, float]:
    """The three equivalent closed forms of the reduced purity at scalar ``t``."""
    p = cfg.weights_array()
    s = _sin_ht(cfg, t)
    c2 = 1.0 - s * s
    first = float(np.sum(p * p * (c2 * c2 + s**4)))
    p0 = float(np.sum(p * p))
    second = p0 - 0.5 * float(np.sum((p * _sin2ht(cfg, t)) ** 2))
    third = analytic_purity(cfg, t)
    return first, second, third


def purity_increment(cfg: CounterexampleConfig, t) -> float:
    """``P(t) - P(0)`` without cancellation: ``-1/2 sum (p~_n sin 2 h_n t)^2``."""
    p = cfg.weights_array()
    return -0.5 * float(np.sum((p * _sin2ht(cfg, t)) ** 2))


def weierstrass_condition(a: float, b: float) -> bool:
    """Whether ``(a, b)`` lies in the classical nowhere-differentiable regime."""
    return 0 < a < 1 and float(b).is_integer() and int(b) % 2 == 1 and a * b > 1 + 1.5 * math.pi


def weierstrass_tail(a: float, terms: int) -> float:
    return a ** (terms + 1) / (1.0 - a)


def _check_weierstrass(a, b):
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    if not (float(b).is_integer() and b > 0 and int(b) % 2 == 1):
        raise ValueError("b must be a positive odd integer")


def weierstrass_f(t, a: float = 0.25, b: int = 25, terms: int = 24) -> float:
    """``sum_{n=0}^{terms} a**n cos(b**n pi t)``; the omitted tail is below
    :func:`weierstrass_tail`."""
    _check_weierstrass(a, b)
    t = _as_exact(t)
    b = int(b)
    return float(sum(a**n * math.cos(math.pi * _reduced_turns(b, n, t)) for n in range(terms + 1)))


def weierstrass_increment(t, a: float = 0.25, b: int = 25, terms: int = 24) -> float:
    """``f(t) - f(0)`` summed as ``-2 sum a**n sin^2(b**n pi t / 2)``."""
    _check_weierstrass(a, b)
    t = _as_exact(t)
    b = int(b)
    acc = 0.0
    for n in range(terms + 1):
        acc += a**n * math.sin(0.5 * math.pi * _reduced_turns(b, n, t)) ** 2
    return -2.0 * acc


def purity_weierstrass_form(t, terms: int = 24) -> float:
    """``(1 - cos(pi t) + f(t; 1/4, 25)) / 4`` with ``terms`` + 1 Weierstrass terms."""
    t = _as_exact(t)
    return 0.25 * (1.0 - math.cos(math.pi * _reduced_turns(1, 0, t)) + weierstrass_f(t, 0.25, 25, terms))


def variance_closed_form(cfg: CounterexampleConfig) -> tuple[float, float]:
    """Energy mean ``sum p~ h`` and variance ``2 sum p~ h^2 - mean^2`` of the initial state."""
    p = cfg.weights_array()
    h = cfg.energies_array()
    mean = float(np.sum(p * h))
    return mean, float(2.0 * np.sum(p * h * h) - mean * mean)


def variance_series(cfg: CounterexampleConfig, up_to_n: int) -> np.ndarray:
    """Rows ``(N, mean, variance)`` of the energy of the truncated initial
    state for N = 1..up_to_n, from the assembled matrices."""
    if up_to_n < 1:
        raise ValueError("up_to_n must be >= 1")
    rows = []
    for n in range(1, up_to_n + 1):
        sub = cfg.with_truncation(n)
        mean, var = energy_moments(build_initial_state(sub), build_hamiltonian(sub))
        rows.append((n, mean, var))
    return np.array(rows)


def nondiff_probe(terms: int | None = None, scales: int = 4, case: str = "b") -> np.ndarray:
    """Difference quotients ``(P(h_k) - P(0)) / h_k`` at ``h_k = 25**-k``, k = 1..scales.

    Case ``b`` uses the Weierstrass form; ``terms=None`` picks, per scale, the
    smallest count whose tail bound stays below 1e-3 of the quotient. Case
    ``a`` uses the smooth series truncated at ``terms`` (default 40).
    """
    if scales < 1:
        raise ValueError("scales must be >= 1")
    rows = []
    for k in range(1, scales + 1):
        h = Fraction(1, 25**k)
        if case == "a":
            cfg = CounterexampleConfig("a", terms or 40)
            q = purity_increment(cfg, h) / float(h)
        elif case == "b":
            q = _weierstrass_quotient(h, terms)
        else:
            raise ValueError(f"unknown case {case!r}")
        rows.append((float(h), q))
    return np.array(rows)


def _weierstrass_quotient(h: Fraction, terms: int | None) -> float:
    # P(h) - P(0) = 1/4 (1 - cos(pi h) + f(h) - f(0)); the truncated tail moves it by at most tail / 2
    def quotient(n):
        inc = 0.25 * (2.0 * math.sin(0.5 * math.pi * float(h)) ** 2 + weierstrass_increment(h, 0.25, 25, n))
        return inc / float(h)

    def enough(n, q):
        return 0.5 * weierstrass_tail(0.25, n) / float(h) <= 1e-3 * abs(q)

    if terms is not None:
        q = quotient(terms)
        if not enough(terms, q):
            raise ValueError(f"terms={terms} leaves a truncation error above 1e-3 of the quotient at h={h}")
        return q
    n = 1
    while True:
        q = quotient(n)
        if enough(n, q):
            return q
        n += 1
