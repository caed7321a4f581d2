"""Covariance matrices, Gaussian discord, coherence and mixing spectra.

Two covariance conventions meet here. Covariance matrices are built in the
half-unit convention of ``X = (a + a^+)/sqrt(2)`` (vacuum variance 1/2).
The discord formula is evaluated on vacuum-unit invariants (vacuum variance
1, ``b = 2 n + 1`` for a thermal mode), with the entropy function taken as
``g(x) = h(x / 2)``, so the ``b^2 - 1`` denominator and the ``x +- 0.5``
entropy both keep their printed form. :func:`to_vacuum_units` is the single
place the factor of two enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal import find_peaks as _find_peaks
from scipy.special import xlogy

from .errors import DimensionError, NonPhysicalCovarianceError
from .fock import DensityMatrix, Operator, _space_of, mode_operators

QUADRATURE_NAMES = ("X1", "Y1", "X2", "Y2")
ORDER_NAMES = {1: "fundamental", 2: "2nd", 3: "3rd", 4: "4th", 5: "5th"}
_LN2 = math.log(2.0)


def quadrature_operators(space, mode: int) -> tuple[Operator, Operator]:
    """``X = (a + a^+)/sqrt 2`` and ``Y = (a - a^+)/(j sqrt 2)`` for ``mode``."""
    a, ad = mode_operators(space, mode)
    s = 1.0 / math.sqrt(2.0)
    return (a + ad) * s, (a - ad) * (-1j * s)


def _quadratures(space):
    space = _space_of(space)
    if space.n_modes != 2:
        raise DimensionError(f"covariance analysis needs two modes, got dims {space.dims}")
    x1, y1 = quadrature_operators(space, 0)
    x2, y2 = quadrature_operators(space, 1)
    return (x1, y1, x2, y2)


def moment_observables(space) -> dict[str, Operator]:
    """First and symmetric second quadrature moments, for trajectory recording.

    Names are ``"X1"`` ... ``"Y2"`` for the means and ``"X1*Y1"``-style keys for
    the products ``R_k R_l`` with ``k <= l``.
    """
    r = _quadratures(space)
    obs = {name: op for name, op in zip(QUADRATURE_NAMES, r)}
    for k in range(4):
        for l in range(k, 4):
            obs[f"{QUADRATURE_NAMES[k]}*{QUADRATURE_NAMES[l]}"] = r[k] @ r[l]
    return obs


def covariance_from_moments(moments) -> np.ndarray:
    """Half-unit covariance matrices from recorded moment series.

    ``moments`` maps the names of :func:`moment_observables` to scalars or
    equal-length series; the result has shape ``(4, 4)`` or ``(n, 4, 4)``.
    For Hermitian quadratures ``<{R_k, R_l}>/2 = Re <R_k R_l>``, which also
    makes the result exactly symmetric.
    """
    means = np.array([np.real(moments[n]) for n in QUADRATURE_NAMES])
    shape = means.shape[1:]
    sigma = np.empty(shape + (4, 4))
    for k in range(4):
        for l in range(k, 4):
            val = np.real(moments[f"{QUADRATURE_NAMES[k]}*{QUADRATURE_NAMES[l]}"]) - means[k] * means[l]
            sigma[..., k, l] = val
            sigma[..., l, k] = val
    return sigma


def covariance_matrix(rho, space=None) -> np.ndarray:
    """``sigma_kl = <{R_k - <R_k>, R_l - <R_l>}>/2`` over ``(X1, Y1, X2, Y2)``."""
    space = rho.space if space is None else _space_of(space)
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    ops = moment_observables(space)
    moments = {name: np.einsum("ij,ji->", data, op.data) for name, op in ops.items()}
    return covariance_from_moments(moments)


def to_vacuum_units(sigma_half: np.ndarray) -> np.ndarray:
    return 2.0 * np.asarray(sigma_half, dtype=float)


def _blocks(sigma_v):
    A = sigma_v[..., :2, :2]
    B = sigma_v[..., 2:, 2:]
    C = sigma_v[..., :2, 2:]
    return np.linalg.det(A), np.linalg.det(B), np.linalg.det(C)


_OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(sigma_half) -> tuple[float, float]:
    """Sorted symplectic eigenvalues ``(nu-, nu+)`` in vacuum units.

    Physicality is judged by the invariant discriminant
    ``(detA + detB + 2 detC)^2 - 4 det(sigma)``. For positive-definite input
    the values come from the spectrum of ``s (i Omega) s`` with
    ``s = sqrt(sigma)``, which avoids the cancellation the closed form
    suffers near pure states.
    """
    sigma = np.asarray(sigma_half, dtype=float)
    if sigma.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 covariance matrix, got {sigma.shape}")
    if np.max(np.abs(sigma - sigma.T)) > 1e-10:
        raise ValueError("covariance matrix is not symmetric")
    sv = to_vacuum_units(sigma)
    det_a, det_b, det_c = _blocks(sv)
    delta = det_a + det_b + 2.0 * det_c
    det_s = np.linalg.det(sv)
    disc = delta ** 2 - 4.0 * det_s
    if disc < -1e-9:
        raise NonPhysicalCovarianceError(f"symplectic discriminant {disc:.3e} is negative")
    w, v = np.linalg.eigh(0.5 * (sv + sv.T))
    if w[0] > 0:
        root_s = (v * np.sqrt(w)) @ v.T
        ev = np.linalg.eigvalsh(1j * root_s @ _OMEGA @ root_s)
        return float(ev[2]), float(ev[3])
    root = math.sqrt(max(disc, 0.0))
    lo2 = max((delta - root) / 2.0, 0.0)
    hi2 = max((delta + root) / 2.0, 0.0)
    return math.sqrt(lo2), math.sqrt(hi2)


def entropy_h(x):
    """``h(x) = (x + 1/2) log2(x + 1/2) - (x - 1/2) log2(x - 1/2)``.

    Defined for ``x >= 1/2``; inputs within ``1e-9`` below are clamped, so
    ``h(1/2) = 0``. Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.5 - 1e-9) or np.any(np.isnan(arr)):
        raise ValueError(f"entropy_h domain is x >= 0.5, got min {np.nanmin(arr) if arr.size else arr}")
    arr = np.maximum(arr, 0.5)
    out = (xlogy(arr + 0.5, arr + 0.5) - xlogy(arr - 0.5, arr - 0.5)) / _LN2
    return float(out) if np.ndim(out) == 0 else out


def entropy_vacuum_units(x):
    """Entropy of a vacuum-unit symplectic eigenvalue, ``h(x / 2)``."""
    return entropy_h(np.asarray(x, dtype=float) / 2.0)


@dataclass(frozen=True)
class CovarianceRecord:
    """Covariance matrix at one time plus its discord ingredients.

    ``sigma`` is half-unit; every other field is vacuum-unit.
    ``discord`` is ``None`` when the formula is undefined at this sample.
    """

    t: float
    sigma: np.ndarray
    a_inv: float
    b_inv: float
    d012_sq: float
    nu_minus: float
    nu_plus: float
    discord: float | None = None

    @property
    def discord_defined(self) -> bool:
        return self.discord is not None


def covariance_record(t: float, sigma_half, d012_mode: str = "det") -> CovarianceRecord:
    """Bundle invariants and the discord for one covariance matrix.

    ``d012_mode="det"`` uses ``|det C|`` of the off-diagonal block;
    ``"x1x2"`` uses the single element ``<X1 X2>`` squared.
    """
    sigma = np.asarray(sigma_half, dtype=float)
    sv = to_vacuum_units(sigma)
    det_a, det_b, det_c = _blocks(sv)
    if d012_mode == "det":
        d2 = abs(det_c)
    elif d012_mode == "x1x2":
        d2 = sv[0, 2] ** 2
    else:
        raise ValueError(f"unknown d012 mode {d012_mode!r}")
    nu_m, nu_p = symplectic_eigenvalues(sigma)
    rec = CovarianceRecord(
        t=float(t),
        sigma=sigma,
        a_inv=math.sqrt(max(det_a, 0.0)),
        b_inv=math.sqrt(max(det_b, 0.0)),
        d012_sq=float(d2),
        nu_minus=nu_m,
        nu_plus=nu_p,
    )
    return CovarianceRecord(**{**rec.__dict__, "discord": gaussian_discord(rec)})


def gaussian_discord(record: CovarianceRecord) -> float | None:
    """``h(b) - h(nu-) - h(nu+) + h(tau + eta)`` on vacuum-unit invariants.

    ``tau = d^2 / (b^2 - 1)`` and ``eta = a - b d^2 / (b^2 - 1)``. With
    ``b`` within ``1e-9`` of one the formula degenerates: the discord is zero
    when the cross block also vanishes and undefined (``None``) otherwise.
    """
    a, b, d2 = record.a_inv, record.b_inv, record.d012_sq
    if abs(b - 1.0) <= 1e-9:
        return 0.0 if d2 < 1e-12 else None
    denom = b * b - 1.0
    if denom <= 0:
        return None
    tau = d2 / denom
    eta = a - b * d2 / denom
    try:
        value = (
            entropy_vacuum_units(b)
            - entropy_vacuum_units(record.nu_minus)
            - entropy_vacuum_units(record.nu_plus)
            + entropy_vacuum_units(tau + eta)
        )
    except ValueError:
        return None
    if -1e-9 < value < 0.0:
        value = 0.0
    return float(value)


def first_order_coherence(corr, n_t, n_t_tau) -> np.ndarray:
    """``|g1(tau)| = |<a^+(t) a(t+tau)>| / sqrt(n(t) n(t+tau))``.

    Lags where either population is at or below ``1e-12`` come back as NaN.
    """
    corr = np.asarray(corr)
    n_t = np.broadcast_to(np.real(np.asarray(n_t, dtype=complex)), corr.shape)
    n_tt = np.broadcast_to(np.real(np.asarray(n_t_tau, dtype=complex)), corr.shape)
    ok = (n_t > 1e-12) & (n_tt > 1e-12)
    out = np.full(corr.shape, np.nan)
    out[ok] = np.abs(corr[ok]) / np.sqrt(n_t[ok] * n_tt[ok])
    return out


# -- spectra -------------------------------------------------------------------


@dataclass(frozen=True)
class MixingPeak:
    freq: float
    magnitude: float
    m: int | None = None
    n: int | None = None
    order: int | None = None
    label: str = "unassigned"
    zero_if: bool = False

    @property
    def assigned(self) -> bool:
        return self.m is not None


@dataclass
class Spectrum:
    """One-sided FFT magnitudes normalised to a maximum of one.

    ``scale`` is the raw (unnormalised) maximum, so ``magnitudes * scale``
    recovers ``|DFT|``; ``n_samples`` and ``windowed_energy`` support the
    Parseval check in :meth:`spectral_energy`.
    """

    freqs: np.ndarray
    magnitudes: np.ndarray
    window: str
    dt: float
    n_samples: int
    scale: float
    windowed_energy: float
    peaks: list = field(default_factory=list)

    @property
    def bin_width(self) -> float:
        return 1.0 / (self.n_samples * self.dt)

    def spectral_energy(self) -> float:
        raw = self.magnitudes * self.scale
        w = np.full(raw.size, 2.0)
        w[0] = 1.0
        if self.n_samples % 2 == 0:
            w[-1] = 1.0
        return float(np.sum(w * raw ** 2) / self.n_samples)

    def magnitude_at(self, freq: float, tol_bins: int = 2) -> float:
        """Largest normalised magnitude within ``tol_bins`` of ``freq``."""
        i = int(round(freq / self.bin_width))
        lo, hi = max(0, i - tol_bins), min(self.magnitudes.size, i + tol_bins + 1)
        return float(self.magnitudes[lo:hi].max()) if lo < hi else 0.0


def _uniform_dt(dt_or_times, n):
    arr = np.asarray(dt_or_times, dtype=float)
    if arr.ndim == 0:
        dt = float(arr)
        if not dt > 0:
            raise ValueError("sample spacing must be positive")
        return dt
    if arr.size != n:
        raise ValueError("time grid and series lengths differ")
    steps = np.diff(arr)
    dt = float(steps.mean())
    if np.max(np.abs(steps - dt)) > 1e-6 * dt:
        raise ValueError("FFT needs a uniform time grid")
    return dt


def fft_spectrum(series, dt) -> Spectrum:
    """Mean-subtracted, Hann-windowed one-sided magnitude spectrum.

    ``dt`` is the sample spacing, or the time grid itself (checked uniform).
    """
    x = np.real(np.asarray(series, dtype=complex))
    n = x.size
    if n < 16:
        raise ValueError(f"need at least 16 samples for a spectrum, got {n}")
    dt = _uniform_dt(dt, n)
    xw = (x - x.mean()) * np.hanning(n)
    raw = np.abs(np.fft.rfft(xw))
    scale = float(raw.max())
    mags = raw / scale if scale > 0 else np.zeros_like(raw)
    return Spectrum(
        freqs=np.fft.rfftfreq(n, dt),
        magnitudes=mags,
        window="hann",
        dt=dt,
        n_samples=n,
        scale=scale,
        windowed_energy=float(np.sum(xw ** 2)),
    )


def find_peaks(spectrum: Spectrum, threshold: float = 0.02) -> list[tuple[float, float]]:
    """Local maxima above ``threshold`` (relative to the maximum)."""
    mags = spectrum.magnitudes
    padded = np.concatenate(([0.0], mags, [0.0]))
    idx, _ = _find_peaks(padded, height=threshold)
    idx = idx - 1
    return [(float(spectrum.freqs[i]), float(mags[i])) for i in idx]


def product_label(m: int, n: int) -> str:
    def part(c, name):
        if c == 0:
            return ""
        mag = abs(c)
        return f"{'' if mag == 1 else mag}{name}"

    if m > 0 and n < 0 or m < 0 and n > 0:
        pos, neg = ((m, "f1"), (n, "f2")) if m > 0 else ((n, "f2"), (m, "f1"))
        return f"{part(pos[0], pos[1])}-{part(neg[0], neg[1])}"
    terms = [part(m, "f1"), part(n, "f2")]
    return "+".join(t for t in terms if t)


def mixing_products(f1: float, f2: float, max_order: int = 5):
    """All distinct ``(m, n, m f1 + n f2)`` with ``1 <= |m| + |n| <= max_order``.

    Each product is listed once, with the signs chosen so that
    ``m f1 + n f2`` is positive (so 5.97 GHz at 5.57/5.77 GHz is ``(-1, 2)``).
    Combinations that land exactly on zero are dropped.
    """
    out = []
    for m in range(0, max_order + 1):
        for n in range(-max_order, max_order + 1):
            if m == 0 and n <= 0:
                continue
            order = abs(m) + abs(n)
            if order == 0 or order > max_order:
                continue
            f = m * f1 + n * f2
            if f == 0:
                continue
            sign = 1 if f > 0 else -1
            out.append((sign * m, sign * n, sign * f))
    return out


def label_mixing_products(
    peaks: Sequence[tuple[float, float]],
    f1: float,
    f2: float,
    max_order: int = 5,
    bin_width: float | None = None,
    tol_bins: int = 2,
) -> list[MixingPeak]:
    """Attach the nearest intermodulation product to each peak.

    A peak matches ``|m f1 + n f2|`` when it lies within ``tol_bins`` bins.
    The nearest product wins, then the lower order. The difference
    frequency ``|f1 - f2|`` is flagged as the zero-IF product.
    """
    if not (f1 > 0 and f2 > 0):
        raise ValueError("f1 and f2 must be positive")
    if bin_width is None:
        bin_width = abs(f1 - f2) / 10.0
    tol = tol_bins * bin_width
    products = mixing_products(f1, f2, max_order)
    labeled = []
    for freq, mag in peaks:
        best = None
        for m, n, fp in products:
            dist = abs(freq - fp)
            if dist > tol + 1e-9 * bin_width:
                continue
            key = (dist, abs(m) + abs(n))
            if best is None or key < best[0]:
                best = (key, m, n)
        if best is None:
            labeled.append(MixingPeak(freq, mag))
            continue
        _, m, n = best
        order = abs(m) + abs(n)
        labeled.append(
            MixingPeak(
                freq,
                mag,
                m=m,
                n=n,
                order=order,
                label=product_label(m, n),
                zero_if=(abs(m), abs(n)) == (1, 1) and m * n < 0,
            )
        )
    return labeled


def order_name(order: int | None) -> str:
    if order is None:
        return "unassigned"
    return ORDER_NAMES.get(order, f"{order}th")
