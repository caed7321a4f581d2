"""The four scenario pipelines: reduced, full, coherence and gm3 sweep.

Each ``run_*`` returns a :class:`ScenarioResult` holding column tables,
spectra and a JSON-ready summary including the invariant audit;
:func:`hemtq.output.emit_outputs` turns it into files.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .circuit import (
    build_full_hamiltonian,
    build_reduced_hamiltonian,
    compute_coefficients,
    derive_circuit,
    reduced_coupling_rate,
    thermal_occupation,
)
from .config import ScenarioConfig
from .errors import HemtqError
from .fock import DensityMatrix, ModeSpace, coherent_state, fock_state, mode_operators, tensor
from .lindblad import evolve, thermal_collapse_ops, two_time_correlation

EVOLUTION_BOUND = 1e-8
MIN_EIG_BOUND = -1e-6
NU_MINUS_FLOOR = 1.0 - 1e-6
DISCORD_FLOOR = -1e-9
TIMESERIES_COLUMNS = ("time_ns", "nph1", "nph2", "xcorr_re", "xcorr_im", "discord", "nu_minus", "nu_plus")
SPECTRUM_SIGNALS = ("nph1", "nph2", "xcorr", "discord")


@dataclass
class Model:
    """Everything needed to evolve one scenario model."""

    kind: str
    space: ModeSpace
    H: object
    collapse: object
    rate: float
    nbar: tuple[float, float]
    coefficients: dict


@dataclass
class ScenarioResult:
    name: str
    config: ScenarioConfig
    tables: dict = field(default_factory=dict)
    spectra: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    audit: list = field(default_factory=list)
    children: list = field(default_factory=list)

    @property
    def audit_passed(self) -> bool:
        return all(c["passed"] for c in self.audit) and all(ch.audit_passed for ch in self.children)


def build_model(config: ScenarioConfig, kind: str) -> Model:
    """Hamiltonian, collapse set and step rate for ``kind`` (reduced | full)."""
    space = ModeSpace(config.fock_dims)
    params = config.circuit
    mapping = config.mapping()
    if kind == "reduced":
        d = derive_circuit(params, mapping)
        gamma_c = reduced_coupling_rate(params.cc, d.z1, d.z2)
        H = build_reduced_hamiltonian(config.delta1, config.delta2, gamma_c, space)
        coeffs = {"delta1": config.delta1, "delta2": config.delta2, "gamma_c": gamma_c}
    elif kind == "full":
        c = compute_coefficients(params, None, mapping, delta1=config.delta1, delta2=config.delta2)
        H = build_full_hamiltonian(c, space, mapping)
        coeffs = c.to_dict()
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    nbar = (
        thermal_occupation(config.f1, config.temperature),
        thermal_occupation(config.f2, config.temperature),
    )
    C = thermal_collapse_ops(space, config.kappa1, config.kappa2, *nbar)
    rate = max(abs(v) for v in coeffs.values())
    return Model(kind, space, H, C, rate, nbar, coeffs)


def initial_state(config: ScenarioConfig) -> DensityMatrix:
    """``|0> (x) |alpha>`` on the configured truncation."""
    d1, d2 = config.fock_dims
    psi = tensor(fock_state((d1,), [0]), coherent_state(d2, config.alpha))
    return DensityMatrix.from_state(psi)


def _observables(space):
    a1, a1d = mode_operators(space, 0)
    a2, a2d = mode_operators(space, 1)
    obs = {"nph1": a1d @ a1, "nph2": a2d @ a2, "xcorr": a1d @ a2}
    obs.update(analysis.moment_observables(space))
    return obs


def discord_series(times, sigma, d012_mode="det"):
    """Per-sample covariance records; undefined discord becomes NaN."""
    disc = np.full(times.size, np.nan)
    nu_m = np.empty(times.size)
    nu_p = np.empty(times.size)
    for k in range(times.size):
        rec = analysis.covariance_record(times[k], sigma[k], d012_mode)
        nu_m[k], nu_p[k] = rec.nu_minus, rec.nu_plus
        if rec.discord is not None:
            disc[k] = rec.discord
    return disc, nu_m, nu_p


def _check(name, measured, bound, passed):
    return {"check": name, "measured": float(measured), "bound": float(bound), "passed": bool(passed)}


def audit_checks(traj_audit: dict, nu_minus=None, discord=None) -> list[dict]:
    checks = [
        _check("trace_drift", traj_audit["max_trace_drift"], EVOLUTION_BOUND,
               traj_audit["max_trace_drift"] < EVOLUTION_BOUND),
        _check("hermiticity_drift", traj_audit["max_hermitian_drift"], EVOLUTION_BOUND,
               traj_audit["max_hermitian_drift"] < EVOLUTION_BOUND),
        _check("min_eigenvalue", traj_audit["min_eigenvalue"], MIN_EIG_BOUND,
               traj_audit["min_eigenvalue"] >= MIN_EIG_BOUND),
    ]
    if nu_minus is not None:
        lo = float(np.min(nu_minus))
        checks.append(_check("nu_minus_floor", lo, NU_MINUS_FLOOR, lo >= NU_MINUS_FLOOR))
    if discord is not None:
        finite = discord[np.isfinite(discord)]
        lo = float(finite.min()) if finite.size else 0.0
        checks.append(_check("discord_nonnegative", lo, DISCORD_FLOOR, lo >= DISCORD_FLOOR))
    return checks


def _peak_table(spec, config):
    peaks = analysis.find_peaks(spec, config.peak_threshold)
    labeled = analysis.label_mixing_products(
        peaks, config.f1, config.f2, config.max_order, spec.bin_width, config.peak_tolerance_bins
    )
    spec.peaks = labeled
    return [
        {
            "freq_ghz": p.freq / 1e9,
            "magnitude": p.magnitude,
            "label": p.label,
            "m": p.m,
            "n": p.n,
            "order": p.order,
            "order_name": analysis.order_name(p.order),
            "zero_if": p.zero_if,
        }
        for p in labeled
    ]


def product_magnitudes(spec, config, min_order=2):
    """Largest magnitude within the matching tolerance of every product.

    Only products below the Nyquist frequency are reported.
    """
    nyquist = spec.freqs[-1]
    out = {}
    for m, n, fp in analysis.mixing_products(config.f1, config.f2, config.max_order):
        if abs(m) + abs(n) < min_order or fp > nyquist or fp == 0:
            continue
        out[analysis.product_label(m, n)] = spec.magnitude_at(fp, config.peak_tolerance_bins)
    return out


def _time_series(config: ScenarioConfig, kind: str, name: str) -> ScenarioResult:
    model = build_model(config, kind)
    times = config.times()
    traj = evolve(
        initial_state(config),
        model.H,
        model.collapse,
        times,
        _observables(model.space),
        rate=model.rate,
        snapshot_stride=config.snapshot_stride,
    )
    sigma = analysis.covariance_from_moments(traj.observables)
    disc, nu_m, nu_p = discord_series(times, sigma, config.d012_mode)
    table = {
        "time_ns": times * 1e9,
        "nph1": traj["nph1"].real,
        "nph2": traj["nph2"].real,
        "xcorr_re": traj["xcorr"].real,
        "xcorr_im": traj["xcorr"].imag,
        "discord": disc,
        "nu_minus": nu_m,
        "nu_plus": nu_p,
    }
    signals = {
        "nph1": table["nph1"],
        "nph2": table["nph2"],
        "xcorr": table["xcorr_re"],
        "discord": np.nan_to_num(disc, nan=0.0),
    }
    spectra, peaks, products = {}, {}, {}
    for sig_name, series in signals.items():
        spec = analysis.fft_spectrum(series, config.dt)
        spectra[sig_name] = spec
        peaks[sig_name] = _peak_table(spec, config)
        products[sig_name] = product_magnitudes(spec, config)
    result = ScenarioResult(name, config, {"timeseries": table}, spectra)
    result.audit = audit_checks(traj.audit, nu_m, disc)
    finite = disc[np.isfinite(disc)]
    result.summary = {
        "model": kind,
        "coefficients": model.coefficients,
        "nbar": list(model.nbar),
        "integrator_step_s": traj.step,
        "samples": int(times.size),
        "mean_nph1": float(np.mean(table["nph1"])),
        "mean_nph2": float(np.mean(table["nph2"])),
        "mean_discord": float(finite.mean()) if finite.size else None,
        "discord_undefined_samples": int(np.sum(~np.isfinite(disc))),
        "peaks": peaks,
        "product_magnitudes": products,
        "zero_if_ghz": abs(config.f1 - config.f2) / 1e9,
    }
    return result


def run_reduced(config: ScenarioConfig) -> ScenarioResult:
    """Capacitively coupled oscillators with every HEMT term dropped."""
    return _time_series(config, "reduced", "reduced")


def run_full(config: ScenarioConfig) -> ScenarioResult:
    """All coefficients of the HEMT-coupled Hamiltonian."""
    return _time_series(config, "full", "full")


def _coherence_panels(config: ScenarioConfig, kind: str):
    model = build_model(config, kind)
    rho0 = initial_state(config)
    t0 = config.coherence_t0_ns * 1e-9
    steps = int(round(config.coherence_t0_ns / config.step_ns))
    audits = []
    if steps > 0:
        lead = evolve(rho0, model.H, model.collapse, np.arange(steps + 1) * config.dt,
                      rate=model.rate, snapshot_stride=steps)
        audits.append(lead.audit)
        rho_t = DensityMatrix(model.space, lead.snapshots[-1], validate=False)
    else:
        rho_t = rho0
    taus = config.lag_times()
    a1, a1d = mode_operators(model.space, 0)
    a2, a2d = mode_operators(model.space, 1)
    pops = evolve(rho_t, model.H, model.collapse, taus,
                  {"n1": a1d @ a1, "n2": a2d @ a2, **analysis.moment_observables(model.space)},
                  rate=model.rate, snapshot_stride=config.snapshot_stride)
    audits.append(pops.audit)
    sigma = analysis.covariance_from_moments(pops.observables)
    nu_m = np.array([analysis.symplectic_eigenvalues(s)[0] for s in sigma])
    panels = {}
    for mode, (a, ad, n) in enumerate(((a1, a1d, "n1"), (a2, a2d, "n2")), start=1):
        corr = two_time_correlation(rho_t, model.H, model.collapse, ad, a, taus, rate=model.rate)
        n_tau = pops[n].real
        g1 = analysis.first_order_coherence(corr, n_tau[0], n_tau)
        panels[f"coherence_{kind}_mode{mode}"] = {
            "tau_ns": taus * 1e9,
            "g1_abs": g1,
            "corr_re": corr.real,
            "corr_im": corr.imag,
            "population": n_tau,
        }
    merged = {
        "max_trace_drift": max(a["max_trace_drift"] for a in audits),
        "max_hermitian_drift": max(a["max_hermitian_drift"] for a in audits),
        "min_eigenvalue": min(a["min_eigenvalue"] for a in audits),
    }
    return panels, merged, nu_m, t0


def run_coherence(config: ScenarioConfig) -> ScenarioResult:
    """``|g1(t0, t0 + tau)|`` for both modes in the reduced and full models."""
    result = ScenarioResult("coherence", config)
    summary = {"t0_ns": config.coherence_t0_ns, "panels": {}}
    audit = []
    for kind in ("reduced", "full"):
        panels, merged, nu_m, _ = _coherence_panels(config, kind)
        result.tables.update(panels)
        for check in audit_checks(merged, nu_m):
            audit.append({**check, "check": f"{kind}.{check['check']}"})
        for name, panel in panels.items():
            g = panel["g1_abs"]
            finite = g[np.isfinite(g)]
            summary["panels"][name] = {
                "g1_at_zero": None if not np.isfinite(g[0]) else float(g[0]),
                "g1_at_max_lag": None if not np.isfinite(g[-1]) else float(g[-1]),
                "g1_min": float(finite.min()) if finite.size else None,
                "undefined_lags": int(np.sum(~np.isfinite(g))),
            }
    result.audit = audit
    result.summary = summary
    return result


def _sweep_entry(config: ScenarioConfig, gm3: float):
    try:
        return gm3, run_full(config.with_gm3(gm3)), None
    except (HemtqError, ValueError, ArithmeticError) as exc:
        return gm3, None, f"{type(exc).__name__}: {exc}"


def sweep_key(gm3: float) -> str:
    return f"gm3_{gm3 * 1e3:g}mAV3"


def run_sweep(config: ScenarioConfig, jobs: int | None = None) -> ScenarioResult:
    """``run_full`` per gm3 value; entries fail independently.

    With ``jobs > 1`` entries run on a thread pool; results are collected in
    list order, so outputs do not depend on scheduling.
    """
    values = list(config.sweep_gm3)
    if not values:
        raise ValueError("sweep list is empty")
    jobs = config.sweep_jobs if jobs is None else jobs
    if jobs > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(lambda g: _sweep_entry(config, g), values))
    else:
        entries = [_sweep_entry(config, g) for g in values]
    result = ScenarioResult("sweep", config)
    comparison = []
    for gm3, child, error in entries:
        key = sweep_key(gm3)
        if child is None:
            comparison.append({"gm3": gm3, "key": key, "error": error, "mean_discord": None})
            continue
        child.name = key
        result.children.append(child)
        t = child.tables["timeseries"]
        result.tables[f"discord_{key}"] = {k: t[k] for k in ("time_ns", "discord", "nu_minus", "nu_plus")}
        for check in child.audit:
            result.audit.append({**check, "check": f"{key}.{check['check']}"})
        comparison.append({"gm3": gm3, "key": key, "error": None,
                           "mean_discord": child.summary["mean_discord"]})
    means = [c["mean_discord"] for c in sorted(comparison, key=lambda c: c["gm3"])]
    increasing = None
    if len(means) > 1 and all(m is not None for m in means):
        increasing = all(lo < hi for lo, hi in zip(means, means[1:]))
    result.summary = {
        "comparison": comparison,
        "discord_increases_with_gm3": increasing,
        "failed_entries": sum(1 for c in comparison if c["error"]),
    }
    return result


RUNNERS = {
    "reduced": run_reduced,
    "full": run_full,
    "coherence": run_coherence,
    "sweep": run_sweep,
}


def run_scenario(name: str, config: ScenarioConfig) -> ScenarioResult:
    try:
        runner = RUNNERS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}") from None
    return runner(config)
