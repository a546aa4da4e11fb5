"""Scalar functionals along trajectories.

Coupling terms are inner products against dealiased products, which equal
trapezoid quadrature of the pointwise integrand on the padded grid. That
makes mass and the approximate energy exact invariants of the semi-discrete
flow, so any drift measured along a trajectory is time-stepping error.

The approximate energy uses squared norms, matching the limit energy E.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import spectral as sp
from .spectral import norm
from .yosida import INF, yosida_apply, yosida_diff_apply
from .zakharov import ZState, dt_u, rhs

__all__ = [
    "InsufficientDataError",
    "BoundsConfig",
    "LedgerRow",
    "EnergyLedger",
    "PairRow",
    "PairDiagnostics",
    "mass",
    "energy",
    "approx_energy",
    "coupling",
    "higher_energy",
    "equivalence_constant",
    "sandwich_constant",
    "modified_energy",
    "modified_energy_terms",
    "shifted_pair_energy",
    "diff_norms",
    "x_norm",
    "growth_fit",
    "mass_rate",
    "energy_rate",
    "ledger_row",
    "pair_row",
    "LEDGER_COLUMNS",
    "PAIR_COLUMNS",
]

LEDGER_COLUMNS = ("t", "M", "E", "E_n", "F_n", "u_H2", "v_H1", "w_H1", "u_H1", "v_L2", "w_L2", "w_trace")
PAIR_COLUMNS = ("t", "du_H1", "dv_L2", "dw_L2", "E_mn", "F_mn")


class InsufficientDataError(ValueError):
    pass


def _sq(f) -> float:
    return sp.inner(f, f)


def mass(state: ZState) -> float:
    return _sq(state.u)


def coupling(state: ZState, n) -> float:
    """(J v, |J u|^2)."""
    Ju = yosida_apply(state.u, n)
    return sp.inner(yosida_apply(state.v, n), sp.abs2(Ju))


def approx_energy(state: ZState, n) -> float:
    return (
        _sq(sp.differentiate(state.u))
        + 0.5 * (_sq(state.v) + _sq(state.w))
        + coupling(state, n)
    )


def energy(state: ZState) -> float:
    return approx_energy(state, INF)


def higher_energy(state: ZState, n) -> float:
    """||u_t||^2 + (||v_x||^2 + ||w_x||^2) / 2 with u_t taken from the equation."""
    return _sq(dt_u(state, n)) + 0.5 * (_sq(sp.differentiate(state.v)) + _sq(sp.differentiate(state.w)))


def equivalence_constant(state: ZState, n) -> float:
    """Smallest C >= 0 placing F_n inside its two-sided H^2 x H^1 x H^1 window.

    lower = |u_xx|^2/2 + |v_x|^2/6 + |w_x|^2/2 <= F_n + C and
    F_n <= 3/2 |u_xx|^2 + 4/3 |v_x|^2 + |w_x|^2/2 + C.
    """
    a = _sq(sp.laplacian(state.u))
    b = _sq(sp.differentiate(state.v))
    c = _sq(sp.differentiate(state.w))
    F = higher_energy(state, n)
    lower = 0.5 * a + b / 6.0 + 0.5 * c
    upper = 1.5 * a + 4.0 / 3.0 * b + 0.5 * c
    return max(0.0, lower - F, F - upper)


def mass_rate(state: ZState, n) -> float:
    """dM/dt of the semi-discrete flow, evaluated from the right-hand side."""
    return 2.0 * sp.inner(rhs(state, n).u, state.u)


def energy_rate(state: ZState, n) -> float:
    """dE_n/dt of the semi-discrete flow (chain rule, no time differencing)."""
    d = rhs(state, n)
    Ju = yosida_apply(state.u, n)
    Jv = yosida_apply(state.v, n)
    dc = sp.inner(yosida_apply(d.v, n), sp.abs2(Ju)) + 2.0 * sp.inner(
        yosida_apply(d.u, n), sp.pointwise_product(Jv, Ju)
    )
    return (
        2.0 * sp.inner(sp.differentiate(d.u), sp.differentiate(state.u))
        + sp.inner(d.v, state.v)
        + sp.inner(d.w, state.w)
        + dc
    )


# -- pair functionals ---------------------------------------------------------------


def _check_pair(sm: ZState, sn: ZState, m, n) -> None:
    if sm.grid != sn.grid:
        raise sp.ShapeError("pair states live on different grids")
    if not m > n:
        raise ValueError(f"need m > n, got m={m}, n={n}")


def diff_norms(sm: ZState, sn: ZState) -> tuple[float, float, float]:
    if sm.grid != sn.grid:
        raise sp.ShapeError("pair states live on different grids")
    return norm(sm.u - sn.u, "H1"), norm(sm.v - sn.v), norm(sm.w - sn.w)


def x_norm(state: ZState) -> float:
    """Norm of H^1 x L^2 x L^2."""
    return math.sqrt(norm(state.u, "H1") ** 2 + _sq(state.v) + _sq(state.w))


def modified_energy_terms(sm: ZState, sn: ZState, m, n) -> dict:
    _check_pair(sm, sn, m, n)
    du, dv, dw = sm.u - sn.u, sm.v - sn.v, sm.w - sn.w
    Jm_du = yosida_apply(du, m)
    Jm_um = yosida_apply(sm.u, m)
    Jn_vn = yosida_apply(sn.v, n)
    Jn_un = yosida_apply(sn.u, n)
    prod = sp.pointwise_product
    return {
        "grad": _sq(sp.differentiate(du)),
        "wave": 0.5 * (_sq(dv) + _sq(dw)),
        "c1": 2.0 * sp.inner(Jm_du, prod(yosida_apply(dv, m), Jm_um)),
        "c2": 2.0 * sp.inner(Jm_du, prod(yosida_diff_apply(sn.v, m, n), Jm_um)),
        "c3": sp.inner(Jn_vn, sp.abs2(Jm_du)),
        "c4": 2.0 * sp.inner(Jm_du, prod(Jn_vn, yosida_diff_apply(sn.u, m, n))),
        "c5": 2.0 * sp.inner(du, yosida_diff_apply(prod(Jn_vn, Jn_un), m, n)),
    }


def modified_energy(sm: ZState, sn: ZState, m, n) -> float:
    return math.fsum(modified_energy_terms(sm, sn, m, n).values())


def sandwich_constant(sm: ZState, sn: ZState, m, n) -> float:
    """Smallest common C = C(M1) = C(M2) for the two-sided bound on E_mn.

    lower = |du_x|^2/4 + |dv|^2/4 + |dw|^2/2 - C (|du|^2 + n^-1/2) <= E_mn and
    E_mn <= 7/4 |du_x|^2 + 5/4 |dv|^2 + |dw|^2/2 + C (|du|^2 + n^-1/2).
    """
    du, dv, dw = sm.u - sn.u, sm.v - sn.v, sm.w - sn.w
    g, a, b, c = _sq(sp.differentiate(du)), _sq(du), _sq(dv), _sq(dw)
    E = modified_energy(sm, sn, m, n)
    lower = 0.25 * g + 0.25 * b + 0.5 * c
    upper = 1.75 * g + 1.25 * b + 0.5 * c
    return max(0.0, lower - E, E - upper) / (a + 1.0 / math.sqrt(n))


@dataclass(frozen=True)
class BoundsConfig:
    """The constants C(M1), C(M2) of the shifted pair functional."""

    C_M1: float = 1.0
    C_M2: float = 1.0

    def __post_init__(self):
        if not (self.C_M1 > 0 and self.C_M2 > 0):
            raise sp.ConfigError(f"bounds must be positive, got C_M1={self.C_M1}, C_M2={self.C_M2}")

    @classmethod
    def from_data(cls, state0: ZState, gn_constant: float = 1.0) -> BoundsConfig:
        """Constants from Young/Gagliardo-Nirenberg bookkeeping on the datum.

        C(M1) absorbs the cubic coupling terms: (C_gn M1)^(4/3) from
        |(v, |f|^2)| <= 1/4 ||f_x||^2 + C ||f||^2. C(M2) scales like the square
        of the H^2 x H^1 x H^1 size of the datum.
        """
        M1 = energy_bound(state0, gn_constant)
        M2 = math.sqrt(norm(state0.u, "H2") ** 2 + norm(state0.v, "H1") ** 2 + norm(state0.w, "H1") ** 2)
        return cls(1.0 + 2.0 * (gn_constant * M1) ** (4.0 / 3.0), 1.0 + 2.0 * (gn_constant * M2) ** 2)


def shifted_pair_energy(sm: ZState, sn: ZState, m, n, bounds: BoundsConfig) -> float:
    E = modified_energy(sm, sn, m, n)
    return E + bounds.C_M1 * _sq(sm.u - sn.u) + bounds.C_M2 / math.sqrt(n)


def energy_bound(state0: ZState, gn_constant: float) -> float:
    """Explicit bound on sup_t (||u||_H1 + ||v|| + ||w||) along any J_n flow.

    With m = ||u0||, a = ||u_x||, b = ||v||, K = C_gn m^(3/2):
    |coupling| <= K b a^(1/2) <= a^2/2 + b^2/4 + K^4/2, so energy conservation
    gives a^2 + b^2 + c^2 <= 4 (E0 + K^4/2) where E0 bounds E_n(U_n(0)) for
    every n. Then ||u||_H1 + b + c <= sqrt(3 (m^2 + a^2 + b^2 + c^2)).
    """
    m = norm(state0.u)
    a0 = norm(sp.differentiate(state0.u))
    b0, c0 = norm(state0.v), norm(state0.w)
    K = gn_constant * m**1.5
    E0 = a0**2 + 0.5 * (b0**2 + c0**2) + K * b0 * math.sqrt(a0)
    return math.sqrt(3.0 * (m**2 + 4.0 * (E0 + 0.5 * K**4)))


# -- ledger -------------------------------------------------------------------------


class LedgerRow(NamedTuple):
    t: float
    M: float
    E: float
    E_n: float
    F_n: float
    u_H2: float
    v_H1: float
    w_H1: float
    u_H1: float
    v_L2: float
    w_L2: float
    w_trace: float


def ledger_row(t: float, state: ZState, n) -> LedgerRow:
    return LedgerRow(
        t,
        mass(state),
        energy(state),
        approx_energy(state, n),
        higher_energy(state, n),
        norm(state.u, "H2"),
        norm(state.v, "H1"),
        norm(state.w, "H1"),
        norm(state.u, "H1"),
        norm(state.v),
        norm(state.w),
        sp.boundary_trace(state.w),
    )


@dataclass
class EnergyLedger:
    n: float
    rows: list[LedgerRow] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def validate(self) -> None:
        t = self.column("t")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("ledger times must be strictly increasing")
        if not all(np.all(np.isfinite(self.column(c))) for c in LEDGER_COLUMNS):
            raise ValueError("ledger contains non-finite entries")

    def drift(self, name: str) -> float:
        """max_t |X(t) - X(0)| / |X(0)|."""
        x = self.column(name)
        ref = abs(x[0]) if x[0] != 0 else 1.0
        return float(np.max(np.abs(x - x[0])) / ref)

    def growth_series(self) -> np.ndarray:
        return self.column("u_H2") + self.column("v_H1") + self.column("w_H1")


class PairRow(NamedTuple):
    t: float
    du_H1: float
    dv_L2: float
    dw_L2: float
    E_mn: float
    F_mn: float


def pair_row(t: float, sm: ZState, sn: ZState, m, n, bounds: BoundsConfig) -> PairRow:
    du, dv, dw = diff_norms(sm, sn)
    E = modified_energy(sm, sn, m, n)
    F = E + bounds.C_M1 * _sq(sm.u - sn.u) + bounds.C_M2 / math.sqrt(n)
    return PairRow(t, du, dv, dw, E, F)


@dataclass
class PairDiagnostics:
    m: float
    n: float
    rows: list[PairRow] = field(default_factory=list)

    def __post_init__(self):
        if not self.m > self.n:
            raise ValueError(f"need m > n, got m={self.m}, n={self.n}")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def sup_difference(self) -> float:
        return float(np.max(self.column("du_H1") + self.column("dv_L2") + self.column("dw_L2")))

    def gronwall_rate(self) -> float:
        """Smallest C with F(t) <= F(0) exp(C t) at every sample (t > 0)."""
        t, F = self.column("t"), self.column("F_mn")
        if F[0] <= 0 or np.any(F <= 0):
            return math.inf
        mask = t > 0
        if not mask.any():
            return 0.0
        return float(max(0.0, np.max(np.log(F[mask] / F[0]) / t[mask])))


# -- growth envelope ------------------------------------------------------------------


class GrowthFit(NamedTuple):
    C: float
    p: float
    C_quadratic: float


def growth_fit(t, y=None) -> GrowthFit:
    """Fit y ~ C (1 + t^2)^(p/2) by least squares in log space.

    Also returns the smallest C_quadratic with C_quadratic (1 + t^2) >= y.
    Accepts an EnergyLedger in place of (t, y).
    """
    if isinstance(t, EnergyLedger):
        t, y = t.column("t"), t.growth_series()
    t = np.abs(np.asarray(t, dtype=float))
    y = np.asarray(y, dtype=float)
    if t.shape[0] < 4:
        raise InsufficientDataError(f"growth fit needs at least 4 samples, got {t.shape[0]}")
    if np.any(y <= 0):
        # zero trajectory: flat envelope
        return GrowthFit(float(np.max(y, initial=0.0)), 0.0, float(np.max(y / (1 + t**2), initial=0.0)))
    s = 0.5 * np.log1p(t**2)
    A = np.column_stack([np.ones_like(s), s])
    (logC, p), *_ = np.linalg.lstsq(A, np.log(y), rcond=None)
    return GrowthFit(float(math.exp(logC)), float(p), float(np.max(y / (1 + t**2))))
