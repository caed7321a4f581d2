"""CSV, JSON and SVG artefacts for a scenario result.

Numbers are written with a fixed ``%.12e`` format and NaN as ``nan`` so that
identical runs produce identical bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import svg
from .scenarios import SPECTRUM_SIGNALS, TIMESERIES_COLUMNS, ScenarioResult

SPECTRUM_COLUMNS = ("freq_ghz", "magnitude", "label")
COHERENCE_COLUMNS = ("tau_ns", "g1_abs", "corr_re", "corr_im", "population")
DISCORD_COLUMNS = ("time_ns", "discord", "nu_minus", "nu_plus")


def fmt(x) -> str:
    x = float(x)
    return "nan" if math.isnan(x) else f"{x:.12e}"


def write_table(path: Path, columns, table) -> Path:
    """Write ``table`` (column name -> sequence) with a fixed header."""
    cols = [np.asarray(table[c]) for c in columns]
    n = len(cols[0])
    lines = [",".join(columns)]
    for i in range(n):
        lines.append(",".join(c[i] if c.dtype.kind in "US" else fmt(c[i]) for c in cols))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def spectrum_table(spec) -> dict:
    labels = np.array([""] * spec.freqs.size, dtype=object)
    bw = spec.bin_width
    for p in spec.peaks:
        i = int(round(p.freq / bw))
        if 0 <= i < labels.size:
            labels[i] = p.label if p.assigned else "unassigned"
    return {
        "freq_ghz": spec.freqs / 1e9,
        "magnitude": spec.magnitudes,
        "label": labels.astype(str),
    }


def _clean(obj):
    """Convert numpy scalars and non-finite floats for strict JSON."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def summary_document(result: ScenarioResult) -> dict:
    doc = {
        "scenario": result.name,
        "config": result.config.to_dict(),
        "audit": {"passed": result.audit_passed, "checks": result.audit},
        "results": result.summary,
    }
    if result.children:
        doc["entries"] = {
            child.name: {
                "audit": {"passed": child.audit_passed, "checks": child.audit},
                "results": child.summary,
            }
            for child in result.children
        }
    return _clean(doc)


def _write_json(path: Path, doc) -> Path:
    try:
        path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _write_svg(path: Path, text: str) -> Path:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _timeseries_files(out: Path, prefix: str, result: ScenarioResult, plot: bool) -> list[Path]:
    files = [write_table(out / f"{prefix}timeseries.csv", TIMESERIES_COLUMNS, result.tables["timeseries"])]
    for sig in SPECTRUM_SIGNALS:
        files.append(write_table(out / f"{prefix}spectrum_{sig}.csv", SPECTRUM_COLUMNS,
                                 spectrum_table(result.spectra[sig])))
    if plot:
        t = result.tables["timeseries"]
        files.append(_write_svg(out / f"{prefix}photons.svg", svg.line_plot(
            [("N_ph1", t["time_ns"], t["nph1"]), ("N_ph2", t["time_ns"], t["nph2"])],
            title=f"{result.name}: photon numbers", xlabel="time (ns)", ylabel="<a^+ a>")))
        files.append(_write_svg(out / f"{prefix}discord.svg", svg.line_plot(
            [("discord", t["time_ns"], t["discord"])],
            title=f"{result.name}: Gaussian discord", xlabel="time (ns)", ylabel="D")))
        for sig in SPECTRUM_SIGNALS:
            s = result.spectra[sig]
            files.append(_write_svg(out / f"{prefix}spectrum_{sig}.svg", svg.line_plot(
                [(sig, s.freqs / 1e9, s.magnitudes)],
                title=f"{result.name}: spectrum of {sig}", xlabel="frequency (GHz)",
                ylabel="normalised magnitude")))
    return files


def emit_outputs(result: ScenarioResult, config=None, out_dir=None) -> list[Path]:
    """Write every artefact of ``result`` and return the paths written."""
    config = config or result.config
    out = Path(out_dir if out_dir is not None else config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    plot = config.plot
    files: list[Path] = []
    if result.name in ("reduced", "full"):
        files += _timeseries_files(out, "", result, plot)
    elif result.name == "coherence":
        for name, panel in result.tables.items():
            files.append(write_table(out / f"{name}.csv", COHERENCE_COLUMNS, panel))
            if plot:
                files.append(_write_svg(out / f"{name}.svg", svg.line_plot(
                    [("|g1|", panel["tau_ns"], panel["g1_abs"])],
                    title=name.replace("_", " "), xlabel="lag (ns)", ylabel="|g1|")))
    elif result.name == "sweep":
        for name, table in result.tables.items():
            files.append(write_table(out / f"{name}.csv", DISCORD_COLUMNS, table))
        for child in result.children:
            files += _timeseries_files(out, f"{child.name}_", child, False)
        if plot and result.tables:
            files.append(_write_svg(out / "sweep_discord.svg", svg.line_plot(
                [(name.replace("discord_", ""), t["time_ns"], t["discord"]) for name, t in result.tables.items()],
                title="discord versus gm3", xlabel="time (ns)", ylabel="D")))
    files.append(_write_json(out / "summary.json", summary_document(result)))
    return files


__all__ = ["emit_outputs", "write_table", "spectrum_table", "summary_document"]
