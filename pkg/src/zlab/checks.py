"""Seeded property suites for the spectral, Yosida and Zakharov operators.

Each check returns a :class:`CheckResult` carrying the measured slack so a
report can show how close each inequality came to failing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from .energetics import energy_rate, mass_rate, x_norm
from .spectral import Parity, norm
from .yosida import INF, multiplier, yosida_apply, yosida_diff_apply
from .zakharov import ZState, linear_part, nonlinear_part, rhs

__all__ = ["CheckResult", "random_sine", "random_cosine", "random_state", "SUITES", "run_suite", "run_all"]

LEVELS = (1, 2, 4, 8, 16, 64, 256, 1024)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def line(self) -> str:
        info = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {info}"


def _fmt(v) -> str:
    return f"{v:.3e}" if isinstance(v, float) else str(v)


def random_sine(rng: np.random.Generator, grid: sp.Grid, complex_: bool = True, kmax: int | None = None,
                decay: float = 1.5) -> sp.SpectralField:
    """Random sine field with algebraically decaying coefficients."""
    N = grid.N
    kmax = N if kmax is None else kmax
    k = np.arange(1, N + 1)
    env = np.where(k <= kmax, k ** (-decay), 0.0)
    c = rng.normal(size=N) * env
    if complex_:
        c = c + 1j * rng.normal(size=N) * env
    return sp.from_coeffs(c * rng.uniform(0.2, 3.0), Parity.SINE, grid)


def random_cosine(rng: np.random.Generator, grid: sp.Grid, kmax: int | None = None, decay: float = 1.5):
    N = grid.N
    kmax = N if kmax is None else kmax
    k = np.arange(0, N + 1)
    env = np.where(k <= kmax, np.maximum(k, 1) ** (-decay), 0.0)
    return sp.from_coeffs(rng.normal(size=N + 1) * env * rng.uniform(0.2, 3.0), Parity.COSINE, grid)


def random_state(rng: np.random.Generator, grid: sp.Grid, radius: float | None = None, kmax=None) -> ZState:
    s = ZState(
        random_sine(rng, grid, True, kmax, decay=2.0),
        random_sine(rng, grid, False, kmax, decay=2.0),
        random_cosine(rng, grid, kmax, decay=2.0),
    )
    if radius is not None:
        scale = radius / x_norm(s)
        s = ZState(s.u * scale, s.v * scale, s.w * scale)
    return s


def _levels(rng) -> float:
    return int(rng.choice(LEVELS))


# -- spectral -----------------------------------------------------------------------


def check_round_trip(rng, count=50) -> CheckResult:
    worst = 0.0
    worst_direct = 0.0
    for N in (8, 16, 64, 256):
        g = sp.make_grid(float(rng.uniform(0.5, 5.0)), N)
        for _ in range(count):
            for f in (random_sine(rng, g, decay=0.0), random_cosine(rng, g, decay=0.0)):
                back = sp.analyze(sp.synthesize(f), f.parity, g)
                scale = np.max(np.abs(f.coeffs))
                worst = max(worst, np.max(np.abs(back.coeffs - f.coeffs)) / scale)
                if N <= 16:
                    ref = sp.synthesize_direct(f)
                    worst_direct = max(worst_direct, np.max(np.abs(sp.synthesize(f) - ref)) / scale)
    return CheckResult("spectral.round_trip", worst <= 1e-12 and worst_direct <= 1e-12,
                       {"max_rel_err": float(worst), "fast_vs_direct": float(worst_direct)})


def check_parseval(rng, count=200) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        g = sp.make_grid(float(rng.uniform(0.5, 5.0)), int(rng.choice([8, 16, 64, 256])))
        for f in (random_sine(rng, g), random_cosine(rng, g)):
            vals = sp.synthesize(f)
            w = np.ones(vals.shape[0])
            if f.parity is Parity.COSINE:
                w[0] = w[-1] = 0.5
            quad = g.h * float(np.sum(w * np.abs(vals) ** 2))
            coef = norm(f) ** 2
            worst = max(worst, abs(quad - coef) / coef)
    return CheckResult("spectral.parseval", worst <= 1e-10, {"max_rel_err": float(worst)})


def check_differentiate(rng, grid, count=200) -> CheckResult:
    worst = 0.0
    real_ok = True
    for _ in range(count):
        f, g = random_sine(rng, grid), random_sine(rng, grid)
        a, b = rng.normal(size=2)
        lhs = sp.differentiate(a * f + b * g).coeffs
        rhs_ = a * sp.differentiate(f).coeffs + b * sp.differentiate(g).coeffs
        worst = max(worst, np.max(np.abs(lhs - rhs_)) / np.max(np.abs(lhs)))
        r = random_cosine(rng, grid)
        real_ok &= sp.differentiate(r).is_real and sp.differentiate(f.real).is_real
    return CheckResult("spectral.differentiate_linear_real", worst <= 1e-13 and real_ok,
                       {"max_rel_err": float(worst), "real_preserved": bool(real_ok)})


def check_gagliardo_nirenberg(rng, grid, count=1000, C=2.0) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        f = random_sine(rng, grid, decay=float(rng.uniform(0.5, 3.0)))
        ratio = norm(f, "L4") ** 2 / (norm(f) ** 1.5 * norm(f, "H1") ** 0.5)
        worst = max(worst, ratio)
    return CheckResult("spectral.gagliardo_nirenberg", worst <= C, {"C": C, "fitted_C": float(worst)})


def check_dirichlet_trace(rng, grid, count=200) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        f = random_sine(rng, grid, decay=0.5)
        worst = max(worst, float(np.max(np.abs(sp.evaluate(f, [0.0, grid.L])))) / np.max(np.abs(f.coeffs)))
    return CheckResult("spectral.dirichlet_trace", worst <= 1e-12, {"max_trace": worst})


# -- yosida -------------------------------------------------------------------------


def check_self_adjoint(rng, grid, count=1000) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        n = _levels(rng)
        f, g = random_sine(rng, grid), random_sine(rng, grid)
        a, b = sp.inner(yosida_apply(f, n), g), sp.inner(f, yosida_apply(g, n))
        worst = max(worst, abs(a - b) / (norm(f) * norm(g)))
    return CheckResult("yosida.self_adjoint", worst <= 1e-12, {"max_rel_err": float(worst)})


def check_contraction(rng, grid, count=1000) -> CheckResult:
    mu_ok = True
    worst = 0.0
    for n in LEVELS:
        mu = multiplier(grid.k_cosine, n)
        mu_ok &= bool(np.all(mu > 0) and np.all(mu <= 1))
    for _ in range(count):
        n = _levels(rng)
        f = random_sine(rng, grid) if rng.random() < 0.5 else random_cosine(rng, grid)
        Jf = yosida_apply(f, n)
        for kind in ("L2", "H1", "H2"):
            worst = max(worst, norm(Jf, kind) / norm(f, kind))
    return CheckResult("yosida.contraction", mu_ok and worst <= 1.0 + 1e-14,
                       {"multipliers_in_(0,1]": bool(mu_ok), "max_norm_ratio": float(worst)})


def check_strong_convergence(rng, grid, count=1000) -> CheckResult:
    ok = True
    worst_tail = 0.0
    ladder = [2**j for j in range(11)]
    for _ in range(count):
        f = random_sine(rng, grid, kmax=8)
        errs = [norm(yosida_apply(f, n) - f) for n in ladder]
        ok &= all(b < a for a, b in zip(errs, errs[1:]))
        # |1 - mu| <= k^2 / n on each mode
        worst_tail = max(worst_tail, errs[-1] / (64.0 / 1024 * norm(f)))
    return CheckResult("yosida.strong_convergence", ok and worst_tail <= 1.0,
                       {"monotone": bool(ok), "tail_ratio": float(worst_tail)})


def check_gradient_bound(rng, grid, count=1000) -> CheckResult:
    worst1 = worst2 = 0.0
    sharp_ok = True
    sharp_ratio = 0.0
    for n in LEVELS:
        s = float(np.max(grid.k_sine * multiplier(grid.k_sine, n)))
        sharp_ok &= s <= math.sqrt(n) / 2 * (1 + 1e-14)
        sharp_ratio = max(sharp_ratio, s / (math.sqrt(n) / 2))
    for _ in range(count):
        n = _levels(rng)
        f = random_sine(rng, grid)
        Jf = yosida_apply(f, n)
        worst1 = max(worst1, norm(sp.differentiate(Jf)) / (n * norm(f)))
        worst2 = max(worst2, norm(sp.laplacian(Jf)) / (n * norm(f)))
    return CheckResult(
        "yosida.gradient_bound",
        worst1 <= 1 and worst2 <= 1 and sharp_ok,
        {"ratio_dJ_vs_n": float(worst1), "ratio_d2J_vs_n": float(worst2), "sharp_max_k_mu_over_sqrt(n)/2": sharp_ratio},
    )


def check_difference_bound(rng, grid, count=1000) -> CheckResult:
    worst = 0.0
    fitted_l4 = 0.0
    for _ in range(count):
        n = _levels(rng)
        m = n * int(rng.choice([2, 4, 16])) if rng.random() < 0.8 else INF
        f = random_sine(rng, grid)
        d = yosida_diff_apply(f, m, n)
        grad = norm(sp.differentiate(f))
        worst = max(worst, norm(d) / (grad / math.sqrt(n)))
        fitted_l4 = max(fitted_l4, norm(d, "L4") ** 2 / (grad**2 / math.sqrt(n)))
    return CheckResult("yosida.difference_bound", worst <= 1.0,
                       {"max_ratio_L2": float(worst), "fitted_C_L4": float(fitted_l4)})


def check_commutation(rng, grid, count=200) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        n = _levels(rng)
        f = random_sine(rng, grid) if rng.random() < 0.5 else random_cosine(rng, grid)
        a = sp.differentiate(yosida_apply(f, n)).coeffs
        b = yosida_apply(sp.differentiate(f), n).coeffs
        c = sp.laplacian(yosida_apply(f, n)).coeffs
        d = yosida_apply(sp.laplacian(f), n).coeffs
        scale = max(np.max(np.abs(a)), 1e-300)
        worst = max(worst, np.max(np.abs(a - b)) / scale, np.max(np.abs(c - d)) / max(np.max(np.abs(c)), 1e-300))
    return CheckResult("yosida.commutes_with_derivatives", worst <= 1e-14, {"max_rel_err": float(worst)})


# -- zakharov -----------------------------------------------------------------------


def identity_residual(f: sp.SpectralField) -> float:
    """Relative residual of d^2|f|^2 - 2 Re(conj f f_xx) - 2 |f_x|^2 on the padded grid."""
    grid = f.grid
    dens = sp.abs2(f, Parity.COSINE)
    lhs = sp.padded_values(sp.laplacian(dens))
    fv = sp._synth_on(f, grid.padded, closed=True)
    fxx = sp._synth_on(sp.laplacian(f), grid.padded, closed=True)
    fx = sp._synth_on(sp.differentiate(f), grid.padded, closed=True)
    left = lhs - 2.0 * np.real(np.conj(fv) * fxx)
    right = 2.0 * np.abs(fx) ** 2
    return float(np.max(np.abs(left - right)) / np.max(np.abs(right)))


def verbatim_identity_residual(u: sp.SpectralField, v: sp.SpectralField, n) -> float:
    """Residual of the J-dressed combination with J^2(Jv Ju) in place of (Ju)_xx."""
    grid = u.grid
    Ju, Jv = yosida_apply(u, n), yosida_apply(v, n)
    lhs = sp.padded_values(sp.laplacian(sp.abs2(Ju, Parity.COSINE)))
    pot = yosida_apply(yosida_apply(sp.pointwise_product(Jv, Ju), n), n)
    fv = sp._synth_on(Ju, grid.padded, closed=True)
    pv = sp._synth_on(pot, grid.padded, closed=True)
    fx = sp._synth_on(sp.differentiate(Ju), grid.padded, closed=True)
    left = lhs - 2.0 * np.real(np.conj(fv) * pv)
    right = 2.0 * np.abs(fx) ** 2
    return float(np.max(np.abs(left - right)) / np.max(np.abs(right)))


def check_calculus_identity(rng, grid, count=1000) -> CheckResult:
    worst = 0.0
    verbatim = 0.0
    for i in range(count):
        f = random_sine(rng, grid, kmax=grid.N // 2, decay=float(rng.uniform(1.0, 3.0)))
        worst = max(worst, identity_residual(f))
        if i < 20:
            v = random_sine(rng, grid, complex_=False, kmax=grid.N // 2)
            verbatim = max(verbatim, verbatim_identity_residual(f, v, _levels(rng)))
    return CheckResult("zakharov.calculus_identity", worst <= 1e-8,
                       {"max_rel_residual": float(worst), "verbatim_J_dressed_residual": float(verbatim)})


def check_reality(rng, grid, count=100) -> CheckResult:
    ok = True
    for _ in range(count):
        d = rhs(random_state(rng, grid), _levels(rng))
        ok &= d.v.is_real and d.w.is_real
    return CheckResult("zakharov.reality_preserved", bool(ok), {})


def check_skew(rng, grid, count=200) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        s = random_state(rng, grid)
        a = linear_part(s)
        pair = sp.inner(a.u, s.u) + sp.inner(sp.differentiate(a.u), sp.differentiate(s.u))
        wave = sp.inner(a.v, s.v) + sp.inner(a.w, s.w)
        scale = x_norm(s) ** 2 * grid.N**2
        worst = max(worst, abs(pair) / scale, abs(wave) / scale)
    return CheckResult("zakharov.A_skew", worst <= 1e-12, {"max_rel_pairing": float(worst)})


def check_semidiscrete_conservation(rng, grid, count=50) -> CheckResult:
    worst_m = worst_e = 0.0
    for _ in range(count):
        s = random_state(rng, grid)
        n = INF if rng.random() < 0.3 else _levels(rng)
        d = rhs(s, n)
        scale = x_norm(s) * (norm(d.u, "H1") + norm(d.v) + norm(d.w))
        worst_m = max(worst_m, abs(mass_rate(s, n)) / scale)
        worst_e = max(worst_e, abs(energy_rate(s, n)) / scale)
    return CheckResult("zakharov.semidiscrete_conservation", worst_m <= 1e-12 and worst_e <= 1e-12,
                       {"dM/dt_rel": float(worst_m), "dE_n/dt_rel": float(worst_e)})


def check_lipschitz(rng, grid, count=100, radius=2.0) -> CheckResult:
    C = 0.0
    for _ in range(count):
        n = _levels(rng)
        s1 = random_state(rng, grid, radius=float(rng.uniform(0.1, radius)))
        s2 = random_state(rng, grid, radius=float(rng.uniform(0.1, radius)))
        g1, g2 = nonlinear_part(s1, n), nonlinear_part(s2, n)
        dG = math.sqrt(norm(g1.u - g2.u, "H1") ** 2 + norm(g1.w - g2.w) ** 2)
        C = max(C, dG / x_norm(s1 - s2))
    return CheckResult("zakharov.G_locally_lipschitz", math.isfinite(C), {"radius": radius, "C(R)": float(C)})


def _spectral(rng, grid):
    return [
        check_round_trip(rng),
        check_parseval(rng),
        check_differentiate(rng, grid),
        check_gagliardo_nirenberg(rng, grid),
        check_dirichlet_trace(rng, grid),
    ]


def _yosida(rng, grid):
    return [
        check_self_adjoint(rng, grid),
        check_contraction(rng, grid),
        check_strong_convergence(rng, grid),
        check_gradient_bound(rng, grid),
        check_difference_bound(rng, grid),
        check_commutation(rng, grid),
    ]


def _zakharov(rng, grid):
    return [
        check_calculus_identity(rng, grid),
        check_reality(rng, grid),
        check_skew(rng, grid),
        check_semidiscrete_conservation(rng, grid),
        check_lipschitz(rng, grid),
    ]


SUITES = {"spectral": _spectral, "yosida": _yosida, "zakharov": _zakharov}


def run_suite(name: str, seed: int, grid: sp.Grid) -> list[CheckResult]:
    rng = np.random.default_rng([seed, list(SUITES).index(name)])
    return SUITES[name](rng, grid)


def run_all(seed: int, grid: sp.Grid) -> list[CheckResult]:
    out = []
    for name in SUITES:
        out.extend(run_suite(name, seed, grid))
    return out
