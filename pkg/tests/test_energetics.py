import math

import numpy as np
import pytest

from zlab import checks, spectral as sp
from zlab.energetics import (
    BoundsConfig,
    EnergyLedger,
    InsufficientDataError,
    LedgerRow,
    PairDiagnostics,
    PairRow,
    approx_energy,
    diff_norms,
    energy,
    energy_bound,
    energy_rate,
    equivalence_constant,
    growth_fit,
    higher_energy,
    ledger_row,
    mass,
    mass_rate,
    modified_energy,
    modified_energy_terms,
    sandwich_constant,
    shifted_pair_energy,
)
from zlab.integrate import StepperConfig, evolve
from zlab.spectral import ConfigError
from zlab.yosida import INF, yosida_apply, yosida_diff_apply
from zlab.zakharov import InitialData, ZState, project_initial, rhs

from conftest import sine


def _state(grid, u=None, v=None, w=None):
    return ZState.zero(grid).with_fields(u=u, v=v, w=w)


class TestScalars:
    def test_mass(self, grid_pi):
        assert mass(ZState.zero(grid_pi)) == 0.0
        assert mass(_state(grid_pi, u=sine(grid_pi, {1: 1.0}, complex))) == pytest.approx(math.pi / 2)
        assert mass(_state(grid_pi, u=sine(grid_pi, {1: 1 + 1j}, complex))) == pytest.approx(math.pi)

    def test_energy(self, grid_pi, grid128):
        assert energy(ZState.zero(grid_pi)) == 0.0
        assert energy(_state(grid_pi, v=sine(grid_pi, {1: 1.0}))) == pytest.approx(math.pi / 4)
        s = sine(grid128, {1: 1.0})
        assert energy(_state(grid128, u=s * (1 + 0j), v=s)) == pytest.approx(3 * math.pi / 4 + 4 / 3, rel=1e-8)

    def test_coupling_quadrature_order(self):
        # the odd extension of sin^2 has a kink, so the coupling converges like N^-4
        errs = []
        for N in (16, 32, 64):
            g = sp.make_grid(math.pi, N)
            s = sine(g, {1: 1.0})
            errs.append(abs(energy(_state(g, u=s * (1 + 0j), v=s)) - (3 * math.pi / 4 + 4 / 3)))
        assert all(12 < a / b < 20 for a, b in zip(errs, errs[1:]))

    def test_approx_energy(self, grid_pi, rng, grid128):
        s = checks.random_state(rng, grid128)
        assert approx_energy(s, INF) == energy(s)
        wave = _state(grid_pi, v=sine(grid_pi, {2: 1.0}), w=sp.from_coeffs(np.r_[0.5, np.zeros(16)], sp.Parity.COSINE, grid_pi))
        assert approx_energy(wave, 1) == approx_energy(wave, 64) == pytest.approx(0.5 * (math.pi / 2 + 0.25 * math.pi))
        # coupling (J1 v, |J1 u|^2) = (1/2)(1/4) int sin^3 = 1/6
        f = sine(grid128, {1: 1.0})
        s = _state(grid128, u=f * (1 + 0j), v=f)
        assert approx_energy(s, 1) - approx_energy(s, INF) == pytest.approx(1 / 6 - 4 / 3, rel=1e-8)

    def test_higher_energy(self, grid_pi):
        assert higher_energy(ZState.zero(grid_pi), 4) == 0.0
        assert higher_energy(_state(grid_pi, v=sine(grid_pi, {1: 1.0})), 4) == pytest.approx(math.pi / 4)

    def test_higher_energy_uses_equation(self, rng, grid128):
        s = checks.random_state(rng, grid128)
        d = rhs(s, 8)
        expected = sp.norm(d.u) ** 2 + 0.5 * (sp.norm(sp.differentiate(s.v)) ** 2 + sp.norm(sp.differentiate(s.w)) ** 2)
        assert higher_energy(s, 8) == pytest.approx(expected, rel=1e-13)

    def test_equivalence_window(self, rng, grid128):
        cs = [equivalence_constant(checks.random_state(rng, grid128, radius=float(r)), 8) for r in np.linspace(0.1, 5, 30)]
        assert all(math.isfinite(c) and c >= 0 for c in cs)


class TestRates:
    def test_semidiscrete_conservation(self, rng, grid128):
        for n in (1, 16, INF):
            s = checks.random_state(rng, grid128)
            assert abs(mass_rate(s, n)) <= 1e-12 * max(1.0, mass(s))
            assert abs(energy_rate(s, n)) <= 1e-12 * max(1.0, x_norm_sq(s) * grid128.N)

    def test_energy_rate_matches_difference_quotient(self, rng, grid128):
        s = checks.random_state(rng, grid128, radius=1.0)
        d = rhs(s, 4)
        eps = 1e-5
        plus = ZState(s.u + d.u * eps, s.v + d.v * eps, s.w + d.w * eps)
        minus = ZState(s.u - d.u * eps, s.v - d.v * eps, s.w - d.w * eps)
        fd = (approx_energy(plus, 4) - approx_energy(minus, 4)) / (2 * eps)
        assert fd == pytest.approx(energy_rate(s, 4), abs=1e-6 * sp.norm(d.u, "H1") ** 2)


def x_norm_sq(s):
    return sp.norm(s.u, "H1") ** 2 + sp.norm(s.v) ** 2 + sp.norm(s.w) ** 2


def _quad_inner(a, b, c, grid):
    """Re sum_j h a(x_j) conj(b(x_j) c(x_j)) on the padded grid, by direct summation."""
    M = grid.padded
    x = np.arange(1, M + 1) * grid.L / (M + 1)
    h = grid.L / (M + 1)
    return h * float(np.sum(np.real(sp.evaluate(a, x) * np.conj(sp.evaluate(b, x) * sp.evaluate(c, x)))))


class TestModifiedEnergy:
    def test_terms_against_quadrature(self, rng):
        g = sp.make_grid(2.0, 24)
        sm, sn = checks.random_state(rng, g), checks.random_state(rng, g)
        m, n = 8, 4
        T = modified_energy_terms(sm, sn, m, n)
        du, dv = sm.u - sn.u, sm.v - sn.v
        Jm_du, Jm_um = yosida_apply(du, m), yosida_apply(sm.u, m)
        Jn_vn, Jn_un = yosida_apply(sn.v, n), yosida_apply(sn.u, n)
        assert T["c1"] == pytest.approx(2 * _quad_inner(Jm_du, yosida_apply(dv, m), Jm_um, g), rel=1e-10)
        assert T["c2"] == pytest.approx(2 * _quad_inner(Jm_du, yosida_diff_apply(sn.v, m, n), Jm_um, g), rel=1e-10)
        assert T["c3"] == pytest.approx(_quad_inner(Jn_vn, Jm_du, Jm_du.conj(), g), rel=1e-10)
        assert T["c4"] == pytest.approx(2 * _quad_inner(Jm_du, Jn_vn, yosida_diff_apply(sn.u, m, n), g), rel=1e-10)
        assert T["c5"] == pytest.approx(2 * _quad_inner(yosida_diff_apply(du, m, n), Jn_vn, Jn_un, g), rel=1e-10)
        assert T["grad"] == pytest.approx(sp.norm(sp.differentiate(du)) ** 2)
        assert modified_energy(sm, sn, m, n) == pytest.approx(sum(T.values()))

    def test_identical_states_vanish(self, rng, grid128):
        s = checks.random_state(rng, grid128)
        assert modified_energy(s, s, 32, 16) == 0.0

    def test_no_u(self, rng, grid128):
        a, b = checks.random_state(rng, grid128), checks.random_state(rng, grid128)
        zero = sp.zeros(sp.Parity.SINE, grid128, complex_=True)
        a, b = a.with_fields(u=zero), b.with_fields(u=zero)
        expected = 0.5 * (sp.norm(a.v - b.v) ** 2 + sp.norm(a.w - b.w) ** 2)
        assert modified_energy(a, b, 8, 2) == pytest.approx(expected, rel=1e-14)

    def test_rejects(self, rng, grid128, grid_pi):
        s = checks.random_state(rng, grid128)
        with pytest.raises(ValueError):
            modified_energy(s, s, 4, 4)
        with pytest.raises(sp.ShapeError):
            modified_energy(s, ZState.zero(grid_pi), 8, 4)

    def test_sandwich(self, rng, grid128):
        for _ in range(30):
            a = checks.random_state(rng, grid128, radius=1.0)
            b = checks.random_state(rng, grid128, radius=1.0)
            C = sandwich_constant(a, b, 16, 8)
            assert math.isfinite(C) and C >= 0


class TestShifted:
    def test_arithmetic(self, grid128):
        z = ZState.zero(grid128)
        assert shifted_pair_energy(z, z, 8, 4, BoundsConfig(1, 1)) == pytest.approx(0.5)

    def test_large_n(self, rng, grid128):
        s = checks.random_state(rng, grid128)
        assert shifted_pair_energy(s, s, 2**21, 2**20, BoundsConfig(3, 2)) == pytest.approx(2 / 1024)

    def test_bounds_validated(self):
        with pytest.raises(ConfigError):
            BoundsConfig(0, 1)
        with pytest.raises(ConfigError):
            BoundsConfig(1, -2)

    def test_from_data(self, grid128):
        b = BoundsConfig.from_data(project_initial(InitialData.default(), INF, grid128))
        assert b.C_M1 > 1 and b.C_M2 > 1


class TestDiffNorms:
    def test_identical(self, rng, grid128):
        s = checks.random_state(rng, grid128)
        assert diff_norms(s, s) == (0.0, 0.0, 0.0)

    def test_single_mode(self, grid_pi):
        a = _state(grid_pi, u=sine(grid_pi, {2: 1.0}, complex), v=sine(grid_pi, {1: 2.0}))
        du, dv, dw = diff_norms(a, ZState.zero(grid_pi))
        assert du == pytest.approx(math.sqrt(5 * math.pi / 2))
        assert dv == pytest.approx(2 * math.sqrt(math.pi / 2)) and dw == 0.0

    def test_quadrature(self, rng):
        g = sp.make_grid(1.3, 32)
        a, b = checks.random_state(rng, g), checks.random_state(rng, g)
        vals = sp.synthesize(a.v - b.v)
        assert diff_norms(a, b)[1] == pytest.approx(math.sqrt(g.h * np.sum(vals**2)), rel=1e-12)


class TestLedger:
    def test_row_and_validate(self, grid128):
        s = project_initial(InitialData.default(), 8, grid128)
        led = EnergyLedger(8, [ledger_row(0.0, s, 8), ledger_row(0.1, s, 8)])
        led.validate()
        assert led.drift("M") == 0.0
        bad = EnergyLedger(8, [ledger_row(0.1, s, 8), ledger_row(0.1, s, 8)])
        with pytest.raises(ValueError):
            bad.validate()

    def test_nonfinite(self):
        row = LedgerRow(0.0, *([1.0] * 10), math.nan)
        with pytest.raises(ValueError):
            EnergyLedger(1, [row]).validate()

    def test_pair_rejects(self):
        with pytest.raises(ValueError):
            PairDiagnostics(4, 4)

    def test_gronwall_rate(self):
        rows = [PairRow(t, 0, 0, 0, 0, math.exp(0.3 * t)) for t in np.linspace(0, 2, 9)]
        assert PairDiagnostics(8, 4, rows).gronwall_rate() == pytest.approx(0.3)


class TestGrowthFit:
    def test_constant(self):
        t = np.linspace(0, 10, 20)
        fit = growth_fit(t, np.full_like(t, 2.5))
        assert fit.C == pytest.approx(2.5) and fit.p == pytest.approx(0.0, abs=1e-12)

    def test_quadratic(self):
        t = np.linspace(0, 50, 101)
        fit = growth_fit(t, 3 * (1 + t**2))
        assert fit.C == pytest.approx(3, abs=1e-6) and fit.p == pytest.approx(2, abs=1e-6)
        assert fit.C_quadratic == pytest.approx(3)

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            growth_fit([0, 1, 2], [1, 1, 1])

    def test_zero_series(self):
        fit = growth_fit(np.arange(5.0), np.zeros(5))
        assert fit.p == 0.0 and fit.C == 0.0


def test_energy_bound_dominates(grid128):
    data = InitialData.default()
    s0 = project_initial(data, INF, grid128)
    M1 = energy_bound(s0, 1.0)
    for n in (1, 64):
        _, sup = evolve(project_initial(data, n, grid128), n, StepperConfig(dt=1e-3, T=0.3, observe_every=10),
                        observer=lambda t, s: sp.norm(s.u, "H1") + sp.norm(s.v) + sp.norm(s.w))
        assert max(sup) <= M1
