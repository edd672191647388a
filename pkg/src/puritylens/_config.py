"""Shared tolerances and environment switches."""

import os

TAU_EIG = 1e-12
TAU_HERM = 1e-10
TAU_TRACE = 1e-10
TAU_POS = 1e-10
TAU_CLIP = 1e-12
EPS_VERIFY = 1e-9
MAX_SWEEPS = 60

DEFAULT_MAX_DIM = 4096


def max_dim() -> int:
    """Dimension guard; ``PURITYLENS_MAX_DIM`` overrides the default."""
    raw = os.environ.get("PURITYLENS_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"PURITYLENS_MAX_DIM must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("PURITYLENS_MAX_DIM must be positive")
    return value


def numba_disabled() -> bool:
    return os.environ.get("PURITYLENS_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
