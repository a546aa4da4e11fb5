"""State, right-hand sides and initial data for the Zakharov system.

First-order form on (0, L):

    u_t = i u_xx - i J(Jv * Ju)
    v_t = -w_x
    w_t = -v_x - (J |Ju|^2)_x

with J = J_n (identity for n = inf). u and v are sine fields, w is a cosine
field so that d/dx maps the (v, w) pair onto itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import spectral as sp
from .spectral import Parity, SpectralField
from .yosida import INF, yosida_apply

__all__ = [
    "InputError",
    "ZState",
    "InitialData",
    "Derivative",
    "rhs",
    "split_rhs",
    "dt_u",
    "linear_part",
    "nonlinear_part",
    "project_initial",
    "build_initial",
    "load_coefficient_file",
    "DEFAULT_DATUM",
]


class InputError(ValueError):
    """Malformed initial-data input; the message names the offending location."""


@dataclass(frozen=True, eq=False)
class ZState:
    u: SpectralField
    v: SpectralField
    w: SpectralField
    t: float = 0.0

    def __post_init__(self):
        g = self.u.grid
        if self.v.grid != g or self.w.grid != g:
            raise sp.ShapeError("u, v, w must share one grid")
        if self.u.parity is not Parity.SINE or self.v.parity is not Parity.SINE:
            raise sp.ShapeError("u and v are sine fields")
        if self.w.parity is not Parity.COSINE:
            raise sp.ShapeError("w is a cosine field")
        if not (self.v.is_real and self.w.is_real):
            raise sp.ShapeError("v and w must have real coefficients")

    @property
    def grid(self) -> sp.Grid:
        return self.u.grid

    @classmethod
    def zero(cls, grid: sp.Grid, t: float = 0.0) -> ZState:
        return cls(
            sp.zeros(Parity.SINE, grid, complex_=True),
            sp.zeros(Parity.SINE, grid),
            sp.zeros(Parity.COSINE, grid),
            t,
        )

    @classmethod
    def from_arrays(cls, grid: sp.Grid, u, v, w, t: float = 0.0) -> ZState:
        return cls(
            sp.from_coeffs(np.asarray(u, dtype=complex), Parity.SINE, grid),
            sp.from_coeffs(np.asarray(v, dtype=float), Parity.SINE, grid),
            sp.from_coeffs(np.asarray(w, dtype=float), Parity.COSINE, grid),
            t,
        )

    def with_fields(self, u=None, v=None, w=None, t=None) -> ZState:
        return ZState(
            self.u if u is None else u,
            self.v if v is None else v,
            self.w if w is None else w,
            self.t if t is None else t,
        )

    def __sub__(self, other: ZState) -> ZState:
        return ZState(self.u - other.u, self.v - other.v, self.w - other.w, self.t)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(f.coeffs)) for f in (self.u, self.v, self.w))

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(f.coeffs), initial=0.0)) for f in (self.u, self.v, self.w))


class Derivative(NamedTuple):
    """Time derivative (u_t, v_t, w_t); parities match ZState."""

    u: SpectralField
    v: SpectralField
    w: SpectralField


# -- right-hand sides -------------------------------------------------------------


def _coupling_u(state: ZState, n) -> SpectralField:
    """J(Jv * Ju), sine."""
    Ju = yosida_apply(state.u, n)
    Jv = yosida_apply(state.v, n)
    return yosida_apply(sp.pointwise_product(Jv, Ju), n)


def _density(state: ZState, n) -> SpectralField:
    """J |Ju|^2, real sine."""
    return yosida_apply(sp.abs2(yosida_apply(state.u, n)), n)


def linear_part(state: ZState) -> Derivative:
    """A U = (i u_xx, -w_x, -v_x)."""
    return Derivative(
        1j * sp.laplacian(state.u),
        -sp.differentiate(state.w),
        -sp.differentiate(state.v),
    )


def nonlinear_part(state: ZState, n) -> Derivative:
    """G_n(U) = (-i J(Jv Ju), 0, -(J|Ju|^2)_x)."""
    return Derivative(
        -1j * _coupling_u(state, n),
        sp.zeros(Parity.SINE, state.grid),
        -sp.differentiate(_density(state, n)),
    )


def split_rhs(state: ZState, n) -> tuple[Derivative, Derivative]:
    return linear_part(state), nonlinear_part(state, n)


def rhs(state: ZState, n) -> Derivative:
    lin, nl = split_rhs(state, n)
    return Derivative(lin.u + nl.u, lin.v, lin.w + nl.w)


def dt_u(state: ZState, n) -> SpectralField:
    return 1j * sp.laplacian(state.u) - 1j * _coupling_u(state, n)


# -- initial data -----------------------------------------------------------------

DEFAULT_DATUM = {
    "family": "modes",
    "u": [[1, 1.0, 0.0], [2, 0.5, 0.0]],
    "v": [[1, 0.5, 0.0]],
    "w": [],
}


@dataclass(frozen=True)
class InitialData:
    """Initial datum (u0, v0, w0) before regularisation.

    family ``modes``: ``params`` maps component -> list of ``[k, re, im]``.
    family ``bump``: component -> ``{center, width, amplitude}``; the profile
    is a*exp(-((x-c)/s)^2) * sin(pi x / L) so the Dirichlet trace vanishes.
    family ``file``: ``params["path"]`` names a coefficient file.
    """

    family: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, d: dict) -> InitialData:
        d = dict(d)
        family = d.pop("family", "modes")
        if family not in ("modes", "bump", "file"):
            raise InputError(f"datum.family: unknown family {family!r}")
        return cls(family, d)

    @classmethod
    def default(cls) -> InitialData:
        return cls.from_mapping(DEFAULT_DATUM)


def _check_mode(comp: str, k: int, N: int, where: str) -> None:
    lo = 0 if comp == "w" else 1
    if not lo <= k <= N:
        raise InputError(f"{where}: mode {k} of component {comp} outside {lo}..{N}")


def _from_modes(params: dict, grid: sp.Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    N = grid.N
    u = np.zeros(N, complex)
    v = np.zeros(N)
    w = np.zeros(N + 1)
    for comp in ("u", "v", "w"):
        for i, entry in enumerate(params.get(comp, []) or []):
            where = f"datum.{comp}[{i}]"
            try:
                k, re = int(entry[0]), float(entry[1])
                im = float(entry[2]) if len(entry) > 2 else 0.0
            except (TypeError, ValueError, IndexError) as exc:
                raise InputError(f"{where}: expected [k, re, im], got {entry!r}") from exc
            _check_mode(comp, k, N, where)
            if comp == "u":
                u[k - 1] += complex(re, im)
            elif im != 0.0:
                raise InputError(f"{where}: component {comp} is real, got im={im}")
            elif comp == "v":
                v[k - 1] += re
            else:
                w[k] += re
    return u, v, w


def _from_bumps(params: dict, grid: sp.Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    out = {}
    for comp in ("u", "v", "w"):
        b = params.get(comp)
        parity = Parity.COSINE if comp == "w" else Parity.SINE
        x = grid.closed_nodes if parity is Parity.COSINE else grid.nodes
        if not b:
            out[comp] = np.zeros(grid.size(parity))
            continue
        try:
            c, s, a = float(b["center"]), float(b["width"]), complex(b.get("amplitude", 1.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"datum.{comp}: bump needs center, width, amplitude ({exc})") from exc
        if s <= 0:
            raise InputError(f"datum.{comp}.width: must be positive, got {s}")
        if comp != "u" and a.imag != 0:
            raise InputError(f"datum.{comp}.amplitude: component {comp} is real")
        vals = np.exp(-(((x - c) / s) ** 2)) * np.sin(np.pi * x / grid.L)
        vals = a * vals if comp == "u" else a.real * vals
        out[comp] = sp.analyze(vals, parity, grid).coeffs
    return out["u"].astype(complex), out["v"].real, out["w"].real


def load_coefficient_file(path, grid: sp.Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Parse ``component k re im`` lines; ``#`` starts a comment."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    modes: dict[str, list] = {"u": [], "v": [], "w": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        where = f"{path}:{lineno}"
        if len(parts) != 4 or parts[0] not in modes:
            raise InputError(f"{where}: expected 'component k re im', got {raw.strip()!r}")
        try:
            k, re, im = int(parts[1]), float(parts[2]), float(parts[3])
        except ValueError as exc:
            raise InputError(f"{where}: {exc}") from exc
        if not (math.isfinite(re) and math.isfinite(im)):
            raise InputError(f"{where}: non-finite coefficient")
        _check_mode(parts[0], k, grid.N, where)
        if parts[0] != "u" and im != 0.0:
            raise InputError(f"{where}: component {parts[0]} is real, got im={im}")
        modes[parts[0]].append((k, re, im))
    return _from_modes(modes, grid)


def build_initial(data: InitialData, grid: sp.Grid) -> ZState:
    if data.family == "modes":
        u, v, w = _from_modes(data.params, grid)
    elif data.family == "bump":
        u, v, w = _from_bumps(data.params, grid)
    else:
        if "path" not in data.params:
            raise InputError("datum.path: file family needs a path")
        u, v, w = load_coefficient_file(data.params["path"], grid)
    return ZState.from_arrays(grid, u, v, w, 0.0)


def project_initial(data: InitialData, n, grid: sp.Grid) -> ZState:
    """(J_n u0, J_n v0, J_n w0)."""
    s = build_initial(data, grid)
    if n == INF:
        return s
    return ZState(yosida_apply(s.u, n), yosida_apply(s.v, n), yosida_apply(s.w, n), s.t)
