"""Sine/cosine spectral representation of functions on (0, L).

Fields are stored as coefficients with respect to the unnormalised bases

    sine:    phi_k(x) = sin(k pi x / L),  k = 1..N
    cosine:  psi_k(x) = cos(k pi x / L),  k = 0..N

Sine fields live on the interior nodes x_j = j L / (N + 1), j = 1..N.
Cosine fields are sampled on the closed node set j = 0..N + 1 (endpoints
included), analysed with a type-I DCT whose Nyquist mode k = N + 1 is dropped.

Quadratic products are formed on a padded grid (3/2 rule) and projected back
with the discrete transform of that grid. The projection is the adjoint of
synthesis under trapezoid quadrature, which is what makes the discrete
coupling terms conserve mass and energy exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "ConfigError",
    "ShapeError",
    "Parity",
    "Grid",
    "SpectralField",
    "make_grid",
    "analyze",
    "synthesize",
    "analyze_direct",
    "synthesize_direct",
    "evaluate",
    "boundary_trace",
    "zeros",
    "from_coeffs",
    "differentiate",
    "laplacian",
    "pointwise_product",
    "abs2",
    "inner",
    "norm",
]


class ConfigError(ValueError):
    """Invalid configuration value (grid size, time step, ...)."""


class ShapeError(ValueError):
    """Operands do not share a grid, a parity, or a length."""


class Parity(enum.Enum):
    SINE = "sine"
    COSINE = "cosine"


@dataclass(frozen=True)
class Grid:
    """Uniform grid on (0, L) with N interior nodes.

    ``dealias`` selects the 3/2-rule padded grid for products; with it off,
    products are formed on the base grid itself (aliasing studies).
    """

    L: float
    N: int
    dealias: bool = True

    @cached_property
    def h(self) -> float:
        return self.L / (self.N + 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(1, self.N + 1)

    @cached_property
    def closed_nodes(self) -> np.ndarray:
        return self.h * np.arange(0, self.N + 2)

    @cached_property
    def k_sine(self) -> np.ndarray:
        return np.pi / self.L * np.arange(1, self.N + 1)

    @cached_property
    def k_cosine(self) -> np.ndarray:
        return np.pi / self.L * np.arange(0, self.N + 1)

    @cached_property
    def padded(self) -> int:
        """Interior node count of the product grid."""
        if not self.dealias:
            return self.N
        return math.ceil(1.5 * (self.N + 1)) - 1

    @cached_property
    def quartic(self) -> int:
        """Interior node count of a grid integrating |f|^4 exactly."""
        return 2 * self.N + 1

    def wavenumbers(self, parity: Parity) -> np.ndarray:
        return self.k_sine if parity is Parity.SINE else self.k_cosine

    def size(self, parity: Parity) -> int:
        return self.N if parity is Parity.SINE else self.N + 1


def make_grid(L: float, N: int, dealias: bool = True) -> Grid:
    if not (isinstance(L, (int, float)) and math.isfinite(L) and L > 0):
        raise ConfigError(f"interval length must be positive, got L={L!r}")
    if int(N) != N or N < 4:
        raise ConfigError(f"need at least 4 interior nodes, got N={N!r}")
    return Grid(float(L), int(N), bool(dealias))


@dataclass(frozen=True, eq=False)
class SpectralField:
    coeffs: np.ndarray
    parity: Parity
    grid: Grid = field(repr=False)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs)

    @property
    def k(self) -> np.ndarray:
        return self.grid.wavenumbers(self.parity)

    def _new(self, coeffs: np.ndarray, parity: Parity | None = None) -> SpectralField:
        return SpectralField(coeffs, self.parity if parity is None else parity, self.grid)

    def __add__(self, other: SpectralField) -> SpectralField:
        _check_same(self, other)
        return self._new(self.coeffs + other.coeffs)

    def __sub__(self, other: SpectralField) -> SpectralField:
        _check_same(self, other)
        return self._new(self.coeffs - other.coeffs)

    def __neg__(self) -> SpectralField:
        return self._new(-self.coeffs)

    def __mul__(self, scalar) -> SpectralField:
        return self._new(self.coeffs * scalar)

    __rmul__ = __mul__

    def conj(self) -> SpectralField:
        return self if self.is_real else self._new(self.coeffs.conj())

    @property
    def real(self) -> SpectralField:
        return self._new(self.coeffs.real.copy())


def _check_same(f: SpectralField, g: SpectralField) -> None:
    if f.grid != g.grid:
        raise ShapeError(f"grid mismatch: {f.grid} vs {g.grid}")
    if f.parity is not g.parity:
        raise ShapeError(f"parity mismatch: {f.parity.value} vs {g.parity.value}")


def _as_coeffs(c) -> np.ndarray:
    c = np.asarray(c)
    if np.iscomplexobj(c):
        return c.astype(np.complex128, copy=False)
    return c.astype(np.float64, copy=False)


def from_coeffs(coeffs, parity: Parity, grid: Grid) -> SpectralField:
    c = _as_coeffs(coeffs)
    if c.shape != (grid.size(parity),):
        raise ShapeError(
            f"{parity.value} field on N={grid.N} needs {grid.size(parity)} coefficients, got {c.shape}"
        )
    return SpectralField(c, parity, grid)


def zeros(parity: Parity, grid: Grid, complex_: bool = False) -> SpectralField:
    dtype = np.complex128 if complex_ else np.float64
    return SpectralField(np.zeros(grid.size(parity), dtype), parity, grid)


# -- fast transforms on an M-interior-node grid --------------------------------


def _pad(c: np.ndarray, n: int) -> np.ndarray:
    if c.shape[0] == n:
        return c
    out = np.zeros(n, dtype=c.dtype)
    m = min(n, c.shape[0])
    out[:m] = c[:m]
    return out


def _sine_synth(c: np.ndarray, M: int) -> np.ndarray:
    """Values at the M interior nodes of an (M + 1)-interval grid."""
    return sfft.dst(_pad(c, M), type=1) * 0.5


def _sine_analyze(vals: np.ndarray) -> np.ndarray:
    return sfft.dst(vals, type=1) / (vals.shape[0] + 1)


def _cos_synth(c: np.ndarray, M: int) -> np.ndarray:
    """Values at the M + 2 closed nodes of an (M + 1)-interval grid."""
    cp = _pad(c, M + 2).copy()
    cp[0] *= 2.0
    cp[-1] *= 2.0
    return sfft.dct(cp, type=1) * 0.5


def _cos_analyze(vals: np.ndarray) -> np.ndarray:
    c = sfft.dct(vals, type=1) / (vals.shape[0] - 1)
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def _synth_on(f: SpectralField, M: int, closed: bool) -> np.ndarray:
    if f.parity is Parity.SINE:
        vals = _sine_synth(f.coeffs, M)
        if closed:
            vals = np.concatenate(([0.0], vals, [0.0])).astype(vals.dtype, copy=False)
        return vals
    vals = _cos_synth(f.coeffs, M)
    return vals if closed else vals[1:-1]


def synthesize(f: SpectralField) -> np.ndarray:
    """Nodal values: interior nodes for sine fields, closed nodes for cosine."""
    return _synth_on(f, f.grid.N, closed=f.parity is Parity.COSINE)


def analyze(values, parity: Parity, grid: Grid) -> SpectralField:
    vals = _as_coeffs(values)
    expected = grid.N if parity is Parity.SINE else grid.N + 2
    if vals.shape != (expected,):
        raise ShapeError(f"{parity.value} analysis on N={grid.N} needs {expected} values, got {vals.shape}")
    if parity is Parity.SINE:
        return SpectralField(_sine_analyze(vals), parity, grid)
    return SpectralField(_cos_analyze(vals)[: grid.N + 1], parity, grid)


# -- O(N^2) reference transforms -----------------------------------------------


def _direct_matrix(grid: Grid, parity: Parity) -> np.ndarray:
    N = grid.N
    if parity is Parity.SINE:
        j = np.arange(1, N + 1)[:, None]
        k = np.arange(1, N + 1)[None, :]
        return np.sin(np.pi * j * k / (N + 1))
    j = np.arange(0, N + 2)[:, None]
    k = np.arange(0, N + 1)[None, :]
    return np.cos(np.pi * j * k / (N + 1))


def synthesize_direct(f: SpectralField) -> np.ndarray:
    """Plain summation of the basis expansion at the nodes."""
    return _direct_matrix(f.grid, f.parity) @ f.coeffs


def analyze_direct(values, parity: Parity, grid: Grid) -> SpectralField:
    """Discrete orthogonality sums (trapezoid weights), no FFT."""
    vals = _as_coeffs(values)
    N = grid.N
    S = _direct_matrix(grid, parity)
    if parity is Parity.SINE:
        c = 2.0 / (N + 1) * (S.T @ vals)
        return SpectralField(c, parity, grid)
    w = np.ones(N + 2)
    w[0] = w[-1] = 0.5
    c = 2.0 / (N + 1) * (S.T @ (w * vals))
    c[0] *= 0.5
    return SpectralField(c, parity, grid)


def evaluate(f: SpectralField, x) -> np.ndarray:
    """Evaluate the expansion at arbitrary points by direct summation."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    arg = np.outer(x, f.k)
    basis = np.sin(arg) if f.parity is Parity.SINE else np.cos(arg)
    return basis @ f.coeffs


def boundary_trace(f: SpectralField) -> float:
    """max(|f(0)|, |f(L)|)."""
    if f.parity is Parity.SINE:
        # sin(k pi) is exactly zero; evaluating it in floating point only adds noise
        return 0.0
    c = f.coeffs
    sign = (-1.0) ** np.arange(c.shape[0])
    return float(max(abs(c.sum()), abs((sign * c).sum())))


# -- calculus ------------------------------------------------------------------


def differentiate(f: SpectralField) -> SpectralField:
    if f.parity is Parity.SINE:
        c = np.zeros(f.grid.N + 1, dtype=f.coeffs.dtype)
        c[1:] = f.coeffs * f.grid.k_sine
        return SpectralField(c, Parity.COSINE, f.grid)
    return SpectralField(-f.coeffs[1:] * f.grid.k_sine, Parity.SINE, f.grid)


def laplacian(f: SpectralField) -> SpectralField:
    # same rounding as two calls to differentiate
    return f._new(-(f.coeffs * f.k * f.k))


# -- products --------------------------------------------------------------------


def pointwise_product(f: SpectralField, g: SpectralField, parity: Parity | None = None) -> SpectralField:
    """Dealiased product f * g (no conjugation), projected onto ``parity``.

    Sine x sine defaults to a sine result. Any cosine factor requires the
    caller to name the output parity.
    """
    if f.grid != g.grid:
        raise ShapeError(f"grid mismatch: {f.grid} vs {g.grid}")
    if parity is None:
        if f.parity is Parity.COSINE or g.parity is Parity.COSINE:
            raise ShapeError("product with a cosine factor needs an explicit output parity")
        parity = Parity.SINE
    grid = f.grid
    M = grid.padded
    closed = parity is Parity.COSINE
    vals = _synth_on(f, M, closed) * _synth_on(g, M, closed)
    return project_values(vals, parity, grid)


def project_values(vals: np.ndarray, parity: Parity, grid: Grid) -> SpectralField:
    """Project values on the padded product grid onto the first N modes."""
    if parity is Parity.SINE:
        return SpectralField(_sine_analyze(vals)[: grid.N], parity, grid)
    return SpectralField(_cos_analyze(vals)[: grid.N + 1], parity, grid)


def padded_values(f: SpectralField) -> np.ndarray:
    """Values on the padded product grid (closed nodes for cosine fields)."""
    return _synth_on(f, f.grid.padded, closed=f.parity is Parity.COSINE)


def abs2(f: SpectralField, parity: Parity = Parity.SINE) -> SpectralField:
    """|f|^2 as a real field; sine-projected unless told otherwise."""
    M = f.grid.padded
    closed = parity is Parity.COSINE
    v = _synth_on(f, M, closed)
    vals = v.real**2 + v.imag**2 if np.iscomplexobj(v) else v * v
    return project_values(vals, parity, f.grid)


# -- inner products and norms --------------------------------------------------


def inner(f: SpectralField, g: SpectralField) -> float:
    """Re of the L^2 pairing int f conj(g), from coefficients."""
    _check_same(f, g)
    L = f.grid.L
    a, b = f.coeffs, g.coeffs
    if f.parity is Parity.SINE:
        return 0.5 * L * float(np.real(np.vdot(b, a)))
    return 0.5 * L * float(np.real(np.vdot(b[1:], a[1:]))) + L * float(np.real(a[0] * np.conj(b[0])))


def _sq(f: SpectralField) -> float:
    return inner(f, f)


def _quartic_values(f: SpectralField) -> np.ndarray:
    return _synth_on(f, f.grid.quartic, closed=True)


def norm(f: SpectralField, kind: str = "L2") -> float:
    kind = kind.upper()
    if kind == "L2":
        return math.sqrt(_sq(f))
    if kind == "H1":
        return math.sqrt(_sq(f) + _sq(differentiate(f)))
    if kind == "H2":
        return math.sqrt(_sq(f) + _sq(differentiate(f)) + _sq(laplacian(f)))
    if kind == "L4":
        v = np.abs(_quartic_values(f)) ** 4
        h = f.grid.L / (f.grid.quartic + 1)
        return float(h * (v.sum() - 0.5 * (v[0] + v[-1]))) ** 0.25
    if kind == "LINF":
        return float(np.max(np.abs(_quartic_values(f))))
    raise ValueError(f"unknown norm {kind!r}")
