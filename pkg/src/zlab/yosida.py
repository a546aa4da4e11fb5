"""Yosida regularisation J_n = (1 - n^-1 d^2/dx^2)^-1.

Both bases diagonalise d^2/dx^2, so J_n is the coefficient multiplier
1 / (1 + k^2 / n). ``n = inf`` is the identity (the unregularised system).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .spectral import SpectralField

__all__ = ["INF", "check_level", "level_str", "multiplier", "yosida_apply", "yosida_diff_apply"]

INF = math.inf

# Test hook: when set, multipliers are inflated so the contraction check fails.
_FAULT = {"contraction": False}


def check_level(n) -> float:
    """Validate a regularisation level; returns it as int-valued float or inf."""
    if isinstance(n, str):
        if n.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        n = int(n)
    if n == INF:
        return INF
    if int(n) != n or n < 1:
        raise ValueError(f"regularisation level must be a positive integer or inf, got {n!r}")
    return int(n)


def level_str(n) -> str:
    return "inf" if n == INF else str(int(n))


def multiplier(k: np.ndarray, n) -> np.ndarray:
    if n == INF:
        mu = np.ones_like(k, dtype=float)
    else:
        mu = 1.0 / (1.0 + k * k / n)
    if _FAULT["contraction"]:
        mu = mu * 1.05
    return mu


@lru_cache(maxsize=256)
def _field_multiplier(grid, parity, n, fault: bool) -> np.ndarray:
    mu = multiplier(grid.wavenumbers(parity), n)
    mu.flags.writeable = False
    return mu


def yosida_apply(f: SpectralField, n) -> SpectralField:
    if n == INF and not _FAULT["contraction"]:
        return f
    return f._new(f.coeffs * _field_multiplier(f.grid, f.parity, n, _FAULT["contraction"]))


def yosida_diff_apply(f: SpectralField, m, n) -> SpectralField:
    """(J_m - J_n) f for m > n."""
    if not m > n:
        raise ValueError(f"need m > n, got m={m}, n={n}")
    return f._new(f.coeffs * (multiplier(f.k, m) - multiplier(f.k, n)))
