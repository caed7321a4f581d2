"""Scenario configuration: INI files, profiles and dotted overrides.

The on-disk format is plain INI (``configparser``) with one section per
module boundary::

    [scenario]     what to run and on which grid
    [circuit]      CircuitParams fields, SI units
    [environment]  bath temperature and damping rates
    [coefficients] how printed Hamiltonian terms map to formulas
    [analysis]     discord conventions and peak detection
    [output]       output directory and plot toggle

File values use GHz and ns; :class:`ScenarioConfig` exposes the converted
rad/s and s values as properties. Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .circuit import NONLINEAR_EXPRESSIONS, CircuitParams, CoefficientMapping
from .errors import ConfigError

SCENARIOS = ("reduced", "full", "coherence", "sweep")
PROFILES = ("desk", "paper")
DEFAULT_FOCK_BUDGET = 4096
MIN_SAMPLES = 64


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "full"
    f1_ghz: float = 5.57
    f2_ghz: float = 5.77
    alpha: complex = 0.5
    fock_dims: tuple[int, int] = (8, 8)
    horizon_ns: float = 50.0
    step_ns: float = 0.02
    snapshot_stride: int = 10
    coherence_t0_ns: float = 2.0
    coherence_lag_ns: float = 10.0
    sweep_gm3: tuple[float, ...] = (0.01, 0.12)
    sweep_jobs: int = 1
    fock_budget: int = DEFAULT_FOCK_BUDGET
    temperature: float = 0.1
    kappa1: float = 1e8
    kappa2: float = 1e8
    d012_mode: str = "det"
    peak_threshold: float = 0.02
    peak_tolerance_bins: int = 2
    max_order: int = 5
    term5_literal: bool = False
    ordering: str = "symmetric"
    noise_model: str = "printed"
    drive_noise: bool = False
    nonlinear_order: tuple[str, ...] = NONLINEAR_EXPRESSIONS
    output_dir: str = "hemtq-out"
    plot: bool = False
    circuit: CircuitParams = field(default_factory=CircuitParams)
    profile: str = "desk"

    # derived, converted units
    @property
    def delta1(self) -> float:
        return 2 * math.pi * self.f1_ghz * 1e9

    @property
    def delta2(self) -> float:
        return 2 * math.pi * self.f2_ghz * 1e9

    @property
    def f1(self) -> float:
        return self.f1_ghz * 1e9

    @property
    def f2(self) -> float:
        return self.f2_ghz * 1e9

    @property
    def horizon(self) -> float:
        return self.horizon_ns * 1e-9

    @property
    def dt(self) -> float:
        return self.step_ns * 1e-9

    @property
    def n_samples(self) -> int:
        return int(round(self.horizon_ns / self.step_ns)) + 1

    def times(self):
        import numpy as np

        return np.arange(self.n_samples) * self.dt

    def lag_times(self):
        import numpy as np

        return np.arange(int(round(self.coherence_lag_ns / self.step_ns)) + 1) * self.dt

    def mapping(self) -> CoefficientMapping:
        return CoefficientMapping(
            term5_literal=self.term5_literal,
            nonlinear_order=self.nonlinear_order,
            ordering=self.ordering,
            noise_model=self.noise_model,
            drive_noise=self.drive_noise,
        )

    def with_gm3(self, gm3: float) -> "ScenarioConfig":
        return replace(self, circuit=replace(self.circuit, gm3=gm3))

    def to_dict(self) -> dict:
        """JSON-friendly echo: file-level keys grouped by section."""
        out: dict = {}
        for spec in _SCHEMA:
            value = _get(self, spec)
            out.setdefault(spec.section, {})[spec.key] = spec.fmt_json(value)
        out["scenario"]["profile"] = self.profile
        return out


# -- schema --------------------------------------------------------------------


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int_list(text: str) -> tuple[int, ...]:
    parts = [p for p in re.split(r"[,\s]+", text.strip().strip("[]")) if p]
    return tuple(int(p) for p in parts)


def _parse_float_list(text: str) -> tuple[float, ...]:
    parts = [p for p in re.split(r"[,\s]+", text.strip().strip("[]")) if p]
    return tuple(float(p) for p in parts)


def _parse_name_list(text: str) -> tuple[str, ...]:
    return tuple(p for p in re.split(r"[,\s]+", text.strip().strip("[]")) if p)


def _parse_complex(text: str) -> complex:
    return complex(text.strip().replace(" ", "").replace("i", "j"))


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{z.imag:+}j"


def _fmt_list(values) -> str:
    return ", ".join(repr(v) if isinstance(v, float) else str(v) for v in values)


@dataclass(frozen=True)
class _Key:
    section: str
    key: str
    attr: str
    parse: object
    doc: str
    fmt: object = repr
    circuit: bool = False

    def fmt_json(self, value):
        if isinstance(value, complex):
            return [value.real, value.imag]
        if isinstance(value, tuple):
            return list(value)
        return value


def _s(key, attr, parse, doc, fmt=repr, section="scenario"):
    return _Key(section, key, attr, parse, doc, fmt)


_CIRCUIT_DOCS = {
    "rg": "gate resistance (ohm)",
    "lg": "gate inductance (H)",
    "ld": "drain inductance (H)",
    "cgs": "gate-source capacitance (F)",
    "cds": "drain-source capacitance (F)",
    "cgd": "gate-drain capacitance (F)",
    "ri": "input resistance (ohm)",
    "rj": "gate-drain resistance (ohm)",
    "gd": "output conductance (S)",
    "gm": "transconductance (S)",
    "temp": "device noise temperature (K)",
    "td": "drain noise temperature (K)",
    "gm2": "second-order transconductance (A/V^2)",
    "gm3": "third-order transconductance (A/V^3)",
    "c1": "oscillator 1 shunt capacitance (F)",
    "c2": "oscillator 2 shunt capacitance (F)",
    "cin": "input capacitance (F)",
    "l1": "oscillator 1 inductance (H)",
    "l2": "oscillator 2 inductance (H)",
    "cq1": "oscillator 1 charge capacitance (F)",
    "cq2": "oscillator 2 charge capacitance (F)",
    "cc": "reduced-model coupling capacitance (F)",
    "vrf": "RF drive amplitude (V)",
    "phi2_dc": "DC flux of node 2 (Wb)",
    "dphi1dt_dc": "DC flux derivative of node 1 (V)",
    "gamma_noise": "channel noise factor",
    "rd": "drain resistance (ohm)",
}

_SCHEMA: list[_Key] = [
    _s("name", "scenario", str, "scenario run by default: reduced | full | coherence | sweep", str),
    _s("f1", "f1_ghz", float, "oscillator 1 frequency (GHz)"),
    _s("f2", "f2_ghz", float, "oscillator 2 frequency (GHz)"),
    _s("alpha", "alpha", _parse_complex, "initial coherent amplitude of mode 2 (complex)", _fmt_complex),
    _s("fock_dims", "fock_dims", _parse_int_list, "Fock truncation per mode", _fmt_list),
    _s("fock_budget", "fock_budget", int, "largest allowed product of fock_dims"),
    _s("horizon", "horizon_ns", float, "trajectory length (ns)"),
    _s("step", "step_ns", float, "sample spacing of the recorded grid (ns)"),
    _s("snapshot_stride", "snapshot_stride", int, "keep a density-matrix snapshot every N samples"),
    _s("coherence_t0", "coherence_t0_ns", float, "reference time t of g1(t, t + tau) (ns)"),
    _s("coherence_lag", "coherence_lag_ns", float, "largest lag tau of the coherence scan (ns)"),
    _s("sweep_gm3", "sweep_gm3", _parse_float_list, "gm3 values of the sweep (A/V^3)", _fmt_list),
    _s("sweep_jobs", "sweep_jobs", int, "sweep entries run concurrently"),
    _Key("environment", "temperature", "temperature", float, "bath temperature setting nbar (K)"),
    _Key("environment", "kappa1", "kappa1", float, "damping rate of mode 1 (1/s)"),
    _Key("environment", "kappa2", "kappa2", float, "damping rate of mode 2 (1/s)"),
    _Key("coefficients", "term5_literal", "term5_literal", _parse_bool,
         "use the printed P2 X2 pair for the fifth linear term", str),
    _Key("coefficients", "ordering", "ordering", str, "operator ordering: symmetric | printed", str),
    _Key("coefficients", "noise_model", "noise_model", str,
         "channel noise: printed | drain_temperature", str),
    _Key("coefficients", "drive_noise", "drive_noise", _parse_bool,
         "include noise currents in the drive coefficients", str),
    _Key("coefficients", "nonlinear_order", "nonlinear_order", _parse_name_list,
         "appendix expressions bound to n1..n6", _fmt_list),
    _Key("analysis", "d012_mode", "d012_mode", str, "discord cross term: det | x1x2", str),
    _Key("analysis", "peak_threshold", "peak_threshold", float, "peak height relative to the maximum"),
    _Key("analysis", "peak_tolerance_bins", "peak_tolerance_bins", int, "product matching tolerance (bins)"),
    _Key("analysis", "max_order", "max_order", int, "largest |m| + |n| considered when labelling"),
    _Key("output", "dir", "output_dir", str, "output directory", str),
    _Key("output", "plot", "plot", _parse_bool, "write SVG plots", str),
] + [
    _Key("circuit", f.name, f.name, float, _CIRCUIT_DOCS.get(f.name, f.name), repr, True)
    for f in fields(CircuitParams)
    if f.name not in ("kappa1", "kappa2")
]

_BY_SECTION: dict[str, dict[str, _Key]] = {}
for _k in _SCHEMA:
    _BY_SECTION.setdefault(_k.section, {})[_k.key] = _k


def _get(cfg: ScenarioConfig, spec: _Key):
    return getattr(cfg.circuit, spec.attr) if spec.circuit else getattr(cfg, spec.attr)


# -- profiles ------------------------------------------------------------------


def profile_defaults(profile: str = "desk") -> ScenarioConfig:
    """Built-in defaults for a named profile.

    ``desk`` keeps a 64-dimensional two-mode space: 8 levels per mode,
    a cold bath (nbar about 0.07) and a small coherent amplitude so the
    truncated states stay physical. ``paper`` restores the 4.2 K bath and
    the unit coherent amplitude at 80 levels per mode; it is an expensive
    opt-in.
    """
    if profile == "desk":
        return ScenarioConfig()
    if profile == "paper":
        return ScenarioConfig(
            profile="paper",
            alpha=1.0,
            fock_dims=(80, 80),
            fock_budget=6400,
            temperature=4.2,
            horizon_ns=100.0,
        )
    raise ConfigError(f"unknown profile {profile!r}; choose from {PROFILES}")


# -- loading and validation ----------------------------------------------------


def _line_of(text: str, section: str, key: str | None) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"\[([^\]]+)\]", stripped)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return lineno
            continue
        if key is not None and current == section:
            name = re.split(r"[=:]", stripped, 1)[0].strip().lower()
            if name == key:
                return lineno
    return None


def _where(path, line):
    return f"{path}:{line}" if line else str(path)


def _apply(cfg: ScenarioConfig, spec: _Key, raw: str, where: str) -> ScenarioConfig:
    try:
        value = spec.parse(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: bad value for {spec.section}.{spec.key}: {raw!r} ({exc})") from None
    if spec.circuit:
        try:
            return replace(cfg, circuit=replace(cfg.circuit, **{spec.attr: value}))
        except ValueError as exc:
            raise ConfigError(f"{where}: {spec.section}.{spec.key}: {exc}") from None
    return replace(cfg, **{spec.attr: value})


def _parse_text(text: str, source: str, base: ScenarioConfig) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True, empty_lines_in_values=False)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        msg = str(exc).splitlines()[0]
        raise ConfigError(f"{_where(source, line)}: parse error: {msg}") from None
    if parser.defaults():
        raise ConfigError(f"{source}: keys outside a section are not allowed")
    cfg = base
    for section in parser.sections():
        known = _BY_SECTION.get(section)
        if known is None:
            line = _line_of(text, section, None)
            raise ConfigError(
                f"{_where(source, line)}: unknown section [{section}]; "
                f"expected one of {sorted(_BY_SECTION)}"
            )
        for key, raw in parser.items(section):
            spec = known.get(key)
            where = _where(source, _line_of(text, section, key))
            if spec is None:
                raise ConfigError(f"{where}: unknown key {section}.{key}")
            cfg = _apply(cfg, spec, raw, where)
    return cfg


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check cross-field invariants; raise :class:`ConfigError` naming the field."""

    def bad(name, why):
        raise ConfigError(f"invalid {name}: {why}")

    if cfg.scenario not in SCENARIOS:
        bad("scenario.name", f"{cfg.scenario!r} is not one of {SCENARIOS}")
    for name in ("f1_ghz", "f2_ghz"):
        v = getattr(cfg, name)
        if not (math.isfinite(v) and v > 0):
            bad(f"scenario.{name[:2]}", f"must be positive, got {v}")
    if not (math.isfinite(cfg.alpha.real) and math.isfinite(cfg.alpha.imag)):
        bad("scenario.alpha", "must be finite")
    if len(cfg.fock_dims) != 2:
        bad("scenario.fock_dims", f"needs two entries, got {cfg.fock_dims}")
    if any(d < 2 for d in cfg.fock_dims):
        bad("scenario.fock_dims", f"every dimension must be >= 2, got {list(cfg.fock_dims)}")
    if cfg.fock_budget < 4:
        bad("scenario.fock_budget", "must be at least 4")
    if cfg.fock_dims[0] * cfg.fock_dims[1] > cfg.fock_budget:
        bad(
            "scenario.fock_dims",
            f"product {cfg.fock_dims[0] * cfg.fock_dims[1]} exceeds fock_budget {cfg.fock_budget}",
        )
    if not (cfg.step_ns > 0 and math.isfinite(cfg.step_ns)):
        bad("scenario.step", f"must be positive, got {cfg.step_ns}")
    if not (cfg.horizon_ns > 0 and math.isfinite(cfg.horizon_ns)):
        bad("scenario.horizon", f"must be positive, got {cfg.horizon_ns}")
    if cfg.n_samples < MIN_SAMPLES:
        bad("scenario.horizon", f"horizon/step gives {cfg.n_samples} samples, need >= {MIN_SAMPLES}")
    if cfg.snapshot_stride < 1:
        bad("scenario.snapshot_stride", "must be >= 1")
    if cfg.coherence_t0_ns < 0:
        bad("scenario.coherence_t0", "must be >= 0")
    if cfg.coherence_lag_ns <= 0:
        bad("scenario.coherence_lag", "must be positive")
    if not cfg.sweep_gm3:
        bad("scenario.sweep_gm3", "needs at least one value")
    if any(not (math.isfinite(g) and g >= 0) for g in cfg.sweep_gm3):
        bad("scenario.sweep_gm3", "values must be finite and >= 0")
    if cfg.sweep_jobs < 1:
        bad("scenario.sweep_jobs", "must be >= 1")
    if not (cfg.temperature >= 0 and math.isfinite(cfg.temperature)):
        bad("environment.temperature", f"must be >= 0, got {cfg.temperature}")
    for name in ("kappa1", "kappa2"):
        v = getattr(cfg, name)
        if not (v >= 0 and math.isfinite(v)):
            bad(f"environment.{name}", f"must be >= 0, got {v}")
    if cfg.d012_mode not in ("det", "x1x2"):
        bad("analysis.d012_mode", f"{cfg.d012_mode!r} is not det or x1x2")
    if not 0 < cfg.peak_threshold < 1:
        bad("analysis.peak_threshold", "must lie in (0, 1)")
    if cfg.peak_tolerance_bins < 0:
        bad("analysis.peak_tolerance_bins", "must be >= 0")
    if cfg.max_order < 1:
        bad("analysis.max_order", "must be >= 1")
    try:
        cfg.mapping()
    except ValueError as exc:
        bad("coefficients", str(exc))
    return cfg


def load_config(path=None, *, profile: str = "desk", overrides=()) -> ScenarioConfig:
    """Read ``path`` (or nothing) on top of ``profile`` and apply overrides.

    An empty file yields the profile defaults. ``overrides`` are
    ``"section.key=value"`` strings applied after the file.
    """
    cfg = profile_defaults(profile)
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        cfg = _parse_text(p.read_text(), str(p), cfg)
    cfg = apply_overrides(cfg, overrides)
    return validate(cfg)


def loads_config(text: str, *, profile: str = "desk", overrides=()) -> ScenarioConfig:
    cfg = _parse_text(text, "<string>", profile_defaults(profile))
    return validate(apply_overrides(cfg, overrides))


def apply_overrides(cfg: ScenarioConfig, overrides) -> ScenarioConfig:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        lhs, raw = item.split("=", 1)
        parts = lhs.strip().lower().split(".")
        if len(parts) != 2:
            raise ConfigError(f"override {item!r}: key must be section.key")
        spec = _BY_SECTION.get(parts[0], {}).get(parts[1])
        if spec is None:
            raise ConfigError(f"override {item!r}: unknown key {lhs.strip()}")
        cfg = _apply(cfg, spec, raw.strip(), "override")
    return cfg


def format_config(cfg: ScenarioConfig, annotate: bool = True) -> str:
    """Render ``cfg`` as an INI file that :func:`load_config` reads back."""
    lines = []
    if annotate:
        lines += [
            f"# hemtq reference configuration ({cfg.profile} profile)",
            "# Every key is optional; omitted keys keep these values.",
            "",
        ]
    section = None
    for spec in _SCHEMA:
        if spec.section != section:
            if section is not None:
                lines.append("")
            section = spec.section
            lines.append(f"[{section}]")
        if annotate:
            lines.append(f"# {spec.doc}")
        lines.append(f"{spec.key} = {spec.fmt(_get(cfg, spec))}")
    return "\n".join(lines) + "\n"


def print_defaults(profile: str = "desk") -> str:
    return format_config(profile_defaults(profile), annotate=True)


__all__ = [
    "ScenarioConfig",
    "SCENARIOS",
    "PROFILES",
    "load_config",
    "loads_config",
    "apply_overrides",
    "validate",
    "profile_defaults",
    "format_config",
    "print_defaults",
]
