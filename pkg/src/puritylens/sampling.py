"""Seeded random ensembles of states and Hamiltonians.

Streams come from numpy's ``SeedSequence`` feeding a PCG64 bit generator.
A child stream for ``(seed, index)`` is ``SeedSequence(seed, spawn_key=(index,))``,
so trial ``i`` draws the same numbers whatever else has been drawn and in
whatever order trials run.
"""

import numpy as np

from .opkernel import operator_norm
from .states import BipartiteState, DensityOperator, product_state

_MAX_REDRAWS = 16


class SeededGenerator:
    """Single-owner random stream addressed by a 64-bit seed and a spawn path."""

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self.path = tuple(int(p) for p in path)
        self._seq = np.random.SeedSequence(seed, spawn_key=self.path)
        self.rng = np.random.Generator(np.random.PCG64(self._seq))

    def child(self, index: int) -> "SeededGenerator":
        return SeededGenerator(self.seed, self.path + (int(index),))

    @property
    def subseed(self) -> int:
        """64-bit digest of (seed, path); echoed in reports for replay."""
        return int(self._seq.generate_state(1, np.uint64)[0])

    def complex_normal(self, shape) -> np.ndarray:
        return self.rng.standard_normal(shape) + 1j * self.rng.standard_normal(shape)

    def __repr__(self):
        return f"SeededGenerator(seed={self.seed}, path={self.path})"


def random_hermitian(gen: SeededGenerator, dim: int, norm_cap: float = 1.0) -> np.ndarray:
    """GUE-style ``(A + A^dagger)/2`` rescaled to operator norm ``norm_cap``."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not norm_cap > 0:
        raise ValueError("norm_cap must be positive")
    a = gen.complex_normal((dim, dim))
    h = 0.5 * (a + a.conj().T)
    norm = operator_norm(h)
    if norm > 0:
        # shave a few ulps so the recomputed norm never lands above the cap
        h = h * (norm_cap / norm * (1.0 - 1e-13))
    return h


def random_density(gen: SeededGenerator, dim: int) -> DensityOperator:
    """Ginibre state ``G G^dagger / Tr(G G^dagger)``."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    for _ in range(_MAX_REDRAWS):
        g = gen.complex_normal((dim, dim))
        w = g @ g.conj().T
        tr = np.trace(w).real
        if tr > 0:
            return DensityOperator(w / tr)
    raise RuntimeError("degenerate Ginibre draws exhausted the redraw budget")


def random_pure(gen: SeededGenerator, dim: int) -> DensityOperator:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    for _ in range(_MAX_REDRAWS):
        psi = gen.complex_normal(dim)
        norm = np.linalg.norm(psi)
        if norm > 0:
            psi = psi / norm
            return DensityOperator(np.outer(psi, psi.conj()))
    raise RuntimeError("zero-vector draws exhausted the redraw budget")


def random_product(gen: SeededGenerator, d_s: int, d_e: int) -> BipartiteState:
    return product_state(random_density(gen, d_s), random_density(gen, d_e))


def random_correlated(gen: SeededGenerator, d_s: int, d_e: int) -> BipartiteState:
    return BipartiteState(random_density(gen, d_s * d_e), d_s, d_e)
