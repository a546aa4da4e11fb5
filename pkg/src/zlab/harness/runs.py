"""The six experiments. Each writes its data files plus a manifest."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import checks, yosida
from ..energetics import (
    LEDGER_COLUMNS,
    PAIR_COLUMNS,
    BoundsConfig,
    EnergyLedger,
    PairDiagnostics,
    energy_rate,
    growth_fit,
    ledger_row,
    mass_rate,
    pair_row,
    sandwich_constant,
    x_norm,
)
from ..integrate import StepperConfig, evolve, linear_flow, step
from ..spectral import ConfigError, make_grid, norm
from ..yosida import INF, level_str, yosida_apply
from ..zakharov import ZState, build_initial, project_initial, rhs
from .config import ExperimentConfig
from .output import RunManifest, svg_plot, write_csv, write_json

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BLOWUP = 0, 1, 2, 3


@dataclass
class RunResult:
    manifest: RunManifest
    summary: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.manifest.passed else EXIT_FAIL

    def failures(self) -> list[str]:
        return [c["name"] for c in self.manifest.checks if not c["passed"]]


def parallel_map(fn, keys, threads: int = 1) -> dict:
    """{key: fn(key)}; results are keyed, so order of completion is irrelevant."""
    keys = list(keys)
    if threads <= 1 or len(keys) <= 1:
        return {k: fn(k) for k in keys}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {k: pool.submit(fn, k) for k in keys}
        return {k: futures[k].result() for k in keys}


def _sort_levels(levels):
    return sorted(levels, key=float)


def _trajectory(state0: ZState, n, stepper: StepperConfig) -> list[ZState]:
    _, states = evolve(state0, n, stepper, observer=lambda t, s: s)
    return states


# -- simulate -------------------------------------------------------------------------


def run_simulate(cfg: ExperimentConfig, out: Path, threads: int = 1) -> RunResult:
    man = RunManifest("simulate", cfg.echo())

    def one(n):
        s0 = project_initial(cfg.datum, n, cfg.grid)
        _, rows = evolve(s0, n, cfg.stepper, observer=lambda t, s: ledger_row(t, s, n))
        return s0, EnergyLedger(n, rows)

    results = parallel_map(one, cfg.n_list, threads)
    summary = {"levels": {}}
    for n in _sort_levels(results):
        s0, led = results[n]
        led.validate()
        path = out / f"ledger_n{level_str(n)}.csv"
        write_csv(path, LEDGER_COLUMNS, led.rows)
        man.add_file(path)
        d = rhs(s0, n)
        rate_scale = max(x_norm(s0) * (norm(d.u, "H1") + norm(d.v) + norm(d.w)), 1e-300)
        info = {
            "M_drift": led.drift("M"),
            "E_n_drift": led.drift("E_n"),
            "dM_dt_rel": abs(mass_rate(s0, n)) / rate_scale,
            "dEn_dt_rel": abs(energy_rate(s0, n)) / rate_scale,
            "w_trace_max": float(np.max(led.column("w_trace"))),
        }
        summary["levels"][level_str(n)] = info
        tag = f"n={level_str(n)}"
        man.add_check(f"mass_drift[{tag}]", info["M_drift"] <= 1e-8, value=info["M_drift"], tol=1e-8)
        man.add_check(f"energy_drift[{tag}]", info["E_n_drift"] <= 1e-8, value=info["E_n_drift"], tol=1e-8)
        man.add_check(f"semidiscrete_rates[{tag}]", max(info["dM_dt_rel"], info["dEn_dt_rel"]) <= 1e-12,
                      dM=info["dM_dt_rel"], dE=info["dEn_dt_rel"], tol=1e-12)
    if cfg.resolution_check:
        summary["resolution"] = _resolution(cfg, man)
    path = out / "summary.json"
    write_json(path, summary)
    man.add_file(path)
    return RunResult(man, summary)


def _resolution(cfg: ExperimentConfig, man: RunManifest) -> dict:
    """Relative change of the final-time norms when N doubles."""
    fine = make_grid(cfg.grid.L, 2 * cfg.grid.N, cfg.grid.dealias)
    out = {}
    for n in _sort_levels(cfg.n_list):
        ends = []
        for g in (cfg.grid, fine):
            s, _ = evolve(project_initial(cfg.datum, n, g), n, cfg.stepper)
            ends.append(np.array(ledger_row(s.t, s, n)[1:11]))
        change = float(np.max(np.abs(ends[1] - ends[0]) / np.maximum(np.abs(ends[1]), 1e-300)))
        out[level_str(n)] = change
        man.add_check(f"resolution[n={level_str(n)}]", change < 1e-8, value=change, tol=1e-8)
    return out


# -- cauchy -------------------------------------------------------------------------


def run_cauchy(cfg: ExperimentConfig, out: Path, threads: int = 1) -> RunResult:
    man = RunManifest("cauchy", cfg.echo())
    raw0 = build_initial(cfg.datum, cfg.grid)
    bounds = cfg.bounds or BoundsConfig.from_data(raw0, cfg.gn_constant)
    levels = _sort_levels(set(cfg.n_list) | {2 * n for n in cfg.n_list})
    trajs = parallel_map(lambda n: _trajectory(project_initial(cfg.datum, n, cfg.grid), n, cfg.stepper),
                         levels, threads)
    summary = {"bounds": {"C_M1": bounds.C_M1, "C_M2": bounds.C_M2}, "pairs": {}}
    ns, sups = [], []
    for n in cfg.n_list:
        m = 2 * n
        diag = PairDiagnostics(m, n, [pair_row(sn.t, sm, sn, m, n, bounds) for sm, sn in zip(trajs[m], trajs[n])])
        path = out / f"pair_m{m}_n{n}.csv"
        write_csv(path, PAIR_COLUMNS, diag.rows)
        man.add_file(path)
        sup = diag.sup_difference()
        rate = diag.gronwall_rate()
        sandwich = max(sandwich_constant(sm, sn, m, n) for sm, sn in zip(trajs[m], trajs[n]))
        summary["pairs"][str(n)] = {"m": m, "sup_difference": sup, "gronwall_rate": rate, "sandwich_C": sandwich}
        man.add_check(f"gronwall_finite[n={n}]", math.isfinite(rate), rate=rate)
        ns.append(n)
        sups.append(sup)
    ns, sups = np.array(ns, float), np.array(sups)
    decreasing = bool(np.all(np.diff(sups) < 0))
    man.add_check("sup_difference_decreasing", decreasing, values=sups.tolist())
    if len(ns) >= 2:
        slope = float(np.polyfit(np.log(ns), np.log(sups), 1)[0])
        K = float(sups[0] * ns[0] ** 0.25)
        dominated = bool(np.all(sups <= K * ns ** -0.25 * (1 + 1e-12)))
        summary.update(decay_exponent=slope, K=K, dominated=dominated)
        man.add_check("decay_exponent", slope <= -0.2, value=slope, tol=-0.2)
        man.add_check("dominated_by_K_n^-1/4", dominated, K=K)
    path = out / "summary.json"
    write_json(path, summary)
    man.add_file(path)
    return RunResult(man, summary)


# -- invariants ---------------------------------------------------------------------


def run_invariants(cfg: ExperimentConfig, out: Path | None, threads: int = 1, fault: str | None = None) -> RunResult:
    man = RunManifest("invariants", cfg.echo())
    if fault not in (None, "contraction"):
        raise ConfigError(f"unknown fault {fault!r}")
    yosida._FAULT["contraction"] = fault == "contraction"
    try:
        per_suite = parallel_map(lambda name: checks.run_suite(name, cfg.seed, cfg.grid), list(checks.SUITES), threads)
    finally:
        yosida._FAULT["contraction"] = False
    results = [r for name in checks.SUITES for r in per_suite[name]]
    for r in results:
        man.add_check(r.name, r.passed, **r.measured)
    summary = {"checks": {r.name: {"passed": r.passed, **r.measured} for r in results}, "fault": fault}
    if out is not None:
        path = out / "invariants.json"
        write_json(path, summary)
        man.add_file(path)
    return RunResult(man, summary)


# -- growth -------------------------------------------------------------------------


def envelope_constant(t, F) -> float:
    """Smallest C with |dF/dt| <= C (F + 1)^(3/4) at every sample interval."""
    t, F = np.asarray(t, float), np.asarray(F, float)
    if len(t) < 2:
        return 0.0
    rate = np.abs(np.diff(F) / np.diff(t))
    Fmax = np.maximum(F[1:], F[:-1])
    return float(np.max(rate / (Fmax + 1.0) ** 0.75))


def run_growth(cfg: ExperimentConfig, out: Path, threads: int = 1) -> RunResult:
    man = RunManifest("growth", cfg.echo())

    def one(n):
        s0 = project_initial(cfg.datum, n, cfg.grid)
        _, rows = evolve(s0, n, cfg.stepper, observer=lambda t, s: ledger_row(t, s, n))
        return EnergyLedger(n, rows)

    results = parallel_map(one, cfg.n_list, threads)
    summary = {"levels": {}}
    for n in _sort_levels(results):
        led = results[n]
        tag = level_str(n)
        path = out / f"ledger_n{tag}.csv"
        write_csv(path, LEDGER_COLUMNS, led.rows)
        man.add_file(path)
        t, y = led.column("t"), led.growth_series()
        fit = growth_fit(led)
        C_env = envelope_constant(t, led.column("F_n"))
        M2sq = led.column("u_H2") ** 2 + led.column("v_H1") ** 2 + led.column("w_H1") ** 2
        C0 = float(np.max(M2sq / (1 + t**4)))
        summary["levels"][tag] = {"C": fit.C, "p": fit.p, "C_quadratic": fit.C_quadratic,
                                  "envelope_C": C_env, "quartic_C0": C0}
        man.add_check(f"growth_exponent[n={tag}]", fit.p <= 2.1, p=fit.p, tol=2.1)
        man.add_check(f"F_envelope[n={tag}]", math.isfinite(C_env), C=C_env)
        path = out / f"growth_n{tag}.svg"
        svg_plot(path, t, {"|u|_H2 + |v|_H1 + |w|_H1": y, "C (1 + t^2)": fit.C_quadratic * (1 + t**2)},
                 f"growth, n = {tag}", "norm")
        man.add_file(path)
    path = out / "summary.json"
    write_json(path, summary)
    man.add_file(path)
    return RunResult(man, summary)


# -- depend -------------------------------------------------------------------------


def perturbed_datum(cfg: ExperimentConfig, n, eps: float, mode: int = 2) -> ZState:
    """J_n applied to (u0 + eps sin(mode pi x / L), v0, w0)."""
    s = build_initial(cfg.datum, cfg.grid)
    c = s.u.coeffs.copy()
    c[mode - 1] += eps
    s = s.with_fields(u=s.u._new(c))
    return ZState(yosida_apply(s.u, n), yosida_apply(s.v, n), yosida_apply(s.w, n))


def run_depend(cfg: ExperimentConfig, out: Path, threads: int = 1) -> RunResult:
    man = RunManifest("depend", cfg.echo())
    n = cfg.n_list[0]
    eps_list = sorted(set(cfg.epsilons) | {0.0}, reverse=True)
    trajs = parallel_map(lambda e: _trajectory(perturbed_datum(cfg, n, e), n, cfg.stepper), eps_list, threads)
    base = trajs[0.0]
    dev = {e: max(x_norm(a - b) for a, b in zip(trajs[e], base)) for e in eps_list}
    rows = [(e, dev[e]) for e in eps_list]
    path = out / f"depend_n{level_str(n)}.csv"
    write_csv(path, ("epsilon", "deviation"), rows)
    man.add_file(path)
    man.add_check("zero_perturbation", dev[0.0] == 0.0, value=dev[0.0])
    pos = [e for e in eps_list if e > 0]
    man.add_check("monotone_in_eps", all(dev[a] > dev[b] for a, b in zip(pos, pos[1:])),
                  values=[dev[e] for e in pos])
    ratios = {}
    for a in pos:
        b = a / 2
        match = [e for e in pos if math.isclose(e, b, rel_tol=1e-12)]
        if match:
            r = dev[match[0]] / dev[a]
            ratios[repr(a)] = r
            man.add_check(f"halving_ratio[eps={a!r}]", 0.4 <= r <= 0.6, ratio=r, range=[0.4, 0.6])
    summary = {"n": level_str(n), "deviation": {repr(e): dev[e] for e in eps_list}, "halving_ratios": ratios}
    path = out / "summary.json"
    write_json(path, summary)
    man.add_file(path)
    return RunResult(man, summary)


# -- selfcheck ----------------------------------------------------------------------


def order_estimate(state0: ZState, n, T: float, dts, method: str = "etdrk4") -> list[float]:
    """Observed orders between consecutive dt against a dt/16 reference."""
    ref, _ = evolve(state0, n, StepperConfig(method, dts[-1] / 16, T))
    errs = [x_norm(evolve(state0, n, StepperConfig(method, dt, T))[0] - ref) for dt in dts]
    return [math.log2(a / b) for a, b in zip(errs, errs[1:])]


def run_selfcheck(cfg: ExperimentConfig | None, out: Path | None, threads: int = 1) -> RunResult:
    cfg = cfg or ExperimentConfig("selfcheck")
    man = RunManifest("selfcheck", cfg.echo())
    rng = np.random.default_rng(cfg.seed)
    r = checks.check_round_trip(rng, count=5)
    man.add_check(r.name, r.passed, **r.measured)

    g = make_grid(math.pi, 32)
    s = checks.random_state(rng, g)
    s = s.with_fields(u=s.u * 0.0)
    a = linear_flow(linear_flow(s, 0.3), 0.45)
    b = linear_flow(s, 0.75)
    c = step(s, 4, 0.75)
    err = max(x_norm(a - b), x_norm(c - b)) / x_norm(s)
    man.add_check("linear_flow_exact", err <= 1e-14, value=err, tol=1e-14)

    g = make_grid(math.pi, 16)
    s0 = project_initial(cfg.datum, 4, g)
    orders = order_estimate(s0, 4, 0.5, [0.1, 0.05, 0.025])
    man.add_check("etdrk4_order", all(3.8 <= p <= 4.2 for p in orders), orders=orders, range=[3.8, 4.2])
    summary = {c["name"]: c for c in man.checks}
    if out is not None:
        path = out / "selfcheck.json"
        write_json(path, summary)
        man.add_file(path)
    return RunResult(man, summary)


RUNNERS = {
    "simulate": run_simulate,
    "cauchy": run_cauchy,
    "growth": run_growth,
    "depend": run_depend,
}


def run_experiment(cfg: ExperimentConfig, out: Path | None, threads: int = 1, fault: str | None = None) -> RunResult:
    """Dispatch, time the run and write the manifest next to the data."""
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
    if cfg.experiment not in ("invariants", "selfcheck") and out is None:
        raise ConfigError("no output directory: pass --out, set output_dir or ZLAB_OUT")
    t0 = time.perf_counter()
    if cfg.experiment == "invariants":
        res = run_invariants(cfg, out, threads, fault)
    elif cfg.experiment == "selfcheck":
        res = run_selfcheck(cfg, out, threads)
    else:
        res = RUNNERS[cfg.experiment](cfg, out, threads)
    res.manifest.wall_clock_s = time.perf_counter() - t0
    if out is not None:
        res.manifest.write(out)
    return res
