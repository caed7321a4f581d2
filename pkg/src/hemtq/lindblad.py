"""Lindblad generator, fixed-step RK4 evolution and two-time correlations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import DimensionError, IntegrationError
from .fock import DensityMatrix, ModeSpace, Operator, _space_of, mode_operators

#: |Tr rho - 1| beyond which evolution aborts.
TRACE_ABORT = 1e-6
#: max |rho - rho^H| beyond which evolution aborts.
HERMITIAN_ABORT = 1e-6
#: The integrator takes at least this many steps per unit of the fastest rate.
STEPS_PER_RATE = 50


@dataclass(frozen=True)
class CollapseSet:
    """Collapse operators sharing one :class:`ModeSpace`."""

    space: ModeSpace
    channels: tuple[tuple[Operator, str], ...] = ()

    def __post_init__(self):
        space = _space_of(self.space)
        channels = tuple((op, str(label)) for op, label in self.channels)
        for op, label in channels:
            if op.space != space:
                raise DimensionError(f"collapse operator {label!r} lives on {op.space.dims}, expected {space.dims}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "channels", channels)

    def __len__(self):
        return len(self.channels)

    def __iter__(self):
        return iter(self.channels)

    @property
    def operators(self) -> list[Operator]:
        return [op for op, _ in self.channels]

    @property
    def labels(self) -> list[str]:
        return [label for _, label in self.channels]

    def rate_scale(self) -> float:
        """Largest ``||c^H c||`` (spectral norm), the fastest dissipative rate."""
        if not self.channels:
            return 0.0
        return max(float(np.linalg.norm(op.data.conj().T @ op.data, 2)) for op in self.operators)


@dataclass
class Trajectory:
    """Time grid, recorded observables and optional density-matrix snapshots.

    ``audit`` summarises the invariant checks made along the way:
    worst trace and Hermiticity drift, and the smallest eigenvalue seen at a
    snapshot.
    """

    times: np.ndarray
    observables: dict[str, np.ndarray]
    hermitian: frozenset = frozenset()
    snapshot_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    snapshots: list = field(default_factory=list)
    step: float = float("nan")
    audit: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.observables[name]

    def real(self, name: str) -> np.ndarray:
        return self.observables[name].real


def thermal_collapse_ops(space, kappa1: float, kappa2: float, nbar1: float, nbar2: float) -> CollapseSet:
    """Thermal damping pair ``sqrt(k(n+1)) a``, ``sqrt(k n) a^+`` for each mode."""
    space = _space_of(space)
    rates = [(kappa1, nbar1), (kappa2, nbar2)][: space.n_modes]
    if space.n_modes > 2:
        raise DimensionError("thermal_collapse_ops handles at most two modes")
    for kappa, nbar in rates:
        if kappa < 0 or nbar < 0:
            raise ValueError(f"kappa and nbar must be non-negative (got kappa={kappa}, nbar={nbar})")
    channels = []
    for mode, (kappa, nbar) in enumerate(rates):
        a, ad = mode_operators(space, mode)
        down = kappa * (nbar + 1.0)
        up = kappa * nbar
        if down > 0:
            channels.append((math.sqrt(down) * a, f"decay{mode + 1}"))
        if up > 0:
            channels.append((math.sqrt(up) * ad, f"excite{mode + 1}"))
    return CollapseSet(space, tuple(channels))


def single_mode_collapse(space, kappa: float, nbar: float) -> CollapseSet:
    """Thermal pair on a one-mode space."""
    space = _space_of(space)
    if space.n_modes != 1:
        raise DimensionError("single_mode_collapse expects one mode")
    if kappa < 0 or nbar < 0:
        raise ValueError("kappa and nbar must be non-negative")
    a, ad = mode_operators(space, 0)
    channels = []
    if kappa * (nbar + 1) > 0:
        channels.append((math.sqrt(kappa * (nbar + 1)) * a, "decay1"))
    if kappa * nbar > 0:
        channels.append((math.sqrt(kappa * nbar) * ad, "excite1"))
    return CollapseSet(space, tuple(channels))


def _matrix(rho):
    return rho.data if isinstance(rho, (DensityMatrix, Operator)) else np.asarray(rho, dtype=complex)


def lindblad_rhs(H: Operator, C: CollapseSet, rho) -> np.ndarray:
    """``-i [H, rho] + 1/2 sum (2 c rho c^H - rho c^H c - c^H c rho)``.

    Plain matrix products; the compiled propagator is checked against this.
    ``rho`` may be a :class:`DensityMatrix` or any square array.
    """
    if C.space != H.space:
        raise DimensionError(f"space mismatch: H on {H.space.dims}, collapse set on {C.space.dims}")
    if isinstance(rho, (DensityMatrix, Operator)) and rho.space != H.space:
        raise DimensionError(f"space mismatch: H on {H.space.dims}, rho on {rho.space.dims}")
    r = _matrix(rho)
    h = H.data
    out = -1j * (h @ r - r @ h)
    for op in C.operators:
        c = op.data
        cd = c.conj().T
        cdc = cd @ c
        out += 0.5 * (2.0 * c @ r @ cd - r @ cdc - cdc @ r)
    return out


class _Generator:
    """Pre-encoded generator handed to the compiled kernel."""

    def __init__(self, H: Operator, C: CollapseSet):
        if C.space != H.space:
            raise DimensionError(f"space mismatch: H on {H.space.dims}, collapse set on {C.space.dims}")
        n = H.space.total_dim
        k = H.data.astype(complex)
        for op in C.operators:
            k = k - 0.5j * (op.data.conj().T @ op.data)
        self.K = np.ascontiguousarray(k)
        self.cidx, self.cw, self.cden = _kernels.encode_collapse([op.data for op in C.operators], n)
        eig = np.linalg.eigvalsh(H.data)
        # spectral radius bound of the generator, used as an RK4 stability guard
        self.radius = float(eig[-1] - eig[0]) + 2.0 * C.rate_scale()

    def apply(self, X: np.ndarray, hermitian: bool) -> np.ndarray:
        return _kernels.rhs(self.K, self.cidx, self.cw, self.cden, np.ascontiguousarray(X, dtype=complex), hermitian)

    def propagate(self, X: np.ndarray, h: float, nsteps: int, hermitian: bool) -> np.ndarray:
        if nsteps > 0:
            _kernels.rk4_propagate(self.K, self.cidx, self.cw, self.cden, X, h, nsteps, hermitian)
        return X


def max_step(H: Operator, C: CollapseSet, rate: float | None = None) -> float:
    """Largest RK4 step allowed for this generator.

    ``rate`` is the largest model coefficient (rad/s); the step is at most
    ``1 / (50 rate)``. Independently the step never exceeds the inverse
    spectral-radius bound of the generator, which keeps RK4 inside its
    stability region for truncated spaces with many levels.
    """
    gen = _Generator(H, C)
    return _step_limit(gen, rate)


def _step_limit(gen: _Generator, rate: float | None) -> float:
    limits = []
    if rate is not None and rate > 0:
        limits.append(1.0 / (STEPS_PER_RATE * rate))
    if gen.radius > 0:
        limits.append(1.0 / gen.radius)
    return min(limits) if limits else math.inf


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("times must be a non-empty 1-D grid")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    return times


def _substeps(dt: float, h_max: float) -> tuple[int, float]:
    if not math.isfinite(h_max):
        return 1, dt
    n = max(1, math.ceil(dt / h_max * (1 - 1e-12)))
    return n, dt / n


def _propagate_grid(gen, X, times, h_max, hermitian, on_sample):
    """Drive ``X`` across ``times`` calling ``on_sample(k, t, X)`` at each point."""
    on_sample(0, times[0], X)
    step = math.nan
    for k in range(1, times.size):
        dt = times[k] - times[k - 1]
        n, h = _substeps(dt, h_max)
        step = h if math.isnan(step) else max(step, h)
        gen.propagate(X, h, n, hermitian)
        on_sample(k, times[k], X)
    return step


def evolve(
    rho0: DensityMatrix,
    H: Operator,
    C: CollapseSet,
    times: Sequence[float],
    observables: Mapping[str, Operator] | None = None,
    *,
    rate: float | None = None,
    snapshot_stride: int = 10,
    check_positivity: bool = True,
) -> Trajectory:
    """Integrate the master equation with fixed-step RK4.

    Every interval of ``times`` is split into equal micro-steps no longer than
    :func:`max_step`. Observables are recorded at each grid point; snapshots of
    the density matrix every ``snapshot_stride`` grid points (and at the final
    point). Trace or Hermiticity drift above ``1e-6`` raises
    :class:`IntegrationError` with the first offending time; nothing is
    renormalised.
    """
    if rho0.space != H.space or C.space != H.space:
        raise DimensionError("rho0, H and collapse set must share one space")
    times = _check_times(times)
    observables = dict(observables or {})
    for name, op in observables.items():
        if op.space != H.space:
            raise DimensionError(f"observable {name!r} lives on {op.space.dims}")
    names = list(observables)
    stack = np.array([observables[n].data.T for n in names], dtype=complex).reshape(len(names), *H.data.shape)
    hermitian_names = frozenset(n for n in names if observables[n].is_hermitian())

    gen = _Generator(H, C)
    h_max = _step_limit(gen, rate)
    X = np.array(rho0.data, dtype=complex, order="C")
    values = np.empty((len(names), times.size), dtype=complex)
    stride = max(1, int(snapshot_stride))
    snap_t, snaps = [], []
    audit = {"max_trace_drift": 0.0, "max_hermitian_drift": 0.0, "min_eigenvalue": math.inf}

    def on_sample(k, t, X):
        drift = abs(np.trace(X) - 1.0)
        herm = float(np.max(np.abs(X - X.conj().T)))
        audit["max_trace_drift"] = max(audit["max_trace_drift"], drift)
        audit["max_hermitian_drift"] = max(audit["max_hermitian_drift"], herm)
        if drift > TRACE_ABORT or herm > HERMITIAN_ABORT or not np.isfinite(drift):
            raise IntegrationError(
                f"integration unstable at t={t:.6e} s (trace drift {drift:.3e}, "
                f"Hermiticity drift {herm:.3e}); reduce the step",
                time=float(t),
            )
        if names:
            values[:, k] = np.tensordot(stack, X, axes=([1, 2], [0, 1]))
        if k % stride == 0 or k == times.size - 1:
            snap_t.append(float(t))
            snaps.append(X.copy())
            if check_positivity:
                lo = float(np.linalg.eigvalsh(0.5 * (X + X.conj().T))[0])
                audit["min_eigenvalue"] = min(audit["min_eigenvalue"], lo)

    step = _propagate_grid(gen, X, times, h_max, True, on_sample)
    return Trajectory(
        times=times,
        observables={n: values[i] for i, n in enumerate(names)},
        hermitian=hermitian_names,
        snapshot_times=np.array(snap_t),
        snapshots=snaps,
        step=step,
        audit=audit,
    )


@dataclass(frozen=True)
class SteadyState:
    rho: DensityMatrix
    converged: bool
    time: float
    residual: float


def steady_state_by_relaxation(
    rho0: DensityMatrix,
    H: Operator,
    C: CollapseSet,
    horizon: float,
    tol: float,
    *,
    rate: float | None = None,
    checks: int = 400,
) -> SteadyState:
    """Relax ``rho0`` until ``max |L(rho)| < tol`` or ``horizon`` elapses.

    The residual is tested before integrating and then ``checks`` times over
    the horizon; hitting the horizon returns ``converged=False``.
    """
    if len(C) == 0:
        raise ValueError("steady-state relaxation needs at least one collapse channel")
    if rho0.space != H.space or C.space != H.space:
        raise DimensionError("rho0, H and collapse set must share one space")
    gen = _Generator(H, C)
    h_max = _step_limit(gen, rate)
    X = np.array(rho0.data, dtype=complex, order="C")
    chunk = horizon / checks
    n, h = _substeps(chunk, h_max)
    t = 0.0
    residual = float(np.max(np.abs(gen.apply(X, True))))
    while residual >= tol and t < horizon * (1 - 1e-12):
        gen.propagate(X, h, n, True)
        t += chunk
        drift = abs(np.trace(X) - 1.0)
        if drift > TRACE_ABORT:
            raise IntegrationError(f"trace drift {drift:.3e} at t={t:.6e} s", time=t)
        residual = float(np.max(np.abs(gen.apply(X, True))))
    X = 0.5 * (X + X.conj().T)
    return SteadyState(DensityMatrix(H.space, X), residual < tol, t, residual)


def two_time_correlation(
    rho_t: DensityMatrix,
    H: Operator,
    C: CollapseSet,
    A: Operator,
    B: Operator,
    taus: Sequence[float],
    *,
    rate: float | None = None,
) -> np.ndarray:
    """``<A(t) B(t + tau)>`` by the quantum regression theorem.

    The operator ``X(0) = rho_t A`` is propagated under the same generator and
    ``Tr(B X(tau))`` recorded, so ``tau = 0`` gives ``Tr(A B rho_t)``.
    """
    for op in (A, B):
        if op.space != H.space:
            raise DimensionError("correlation operators must live on the system space")
    if rho_t.space != H.space or C.space != H.space:
        raise DimensionError("rho_t, H and collapse set must share one space")
    taus = _check_times(taus)
    if taus[0] < 0:
        raise ValueError("lags must start at or after zero")
    gen = _Generator(H, C)
    h_max = _step_limit(gen, rate)
    X = np.ascontiguousarray(rho_t.data @ A.data)
    if taus[0] > 0:
        n, h = _substeps(taus[0], h_max)
        gen.propagate(X, h, n, False)
    out = np.empty(taus.size, dtype=complex)
    b_t = np.ascontiguousarray(B.data.T)

    def on_sample(k, t, X):
        out[k] = np.sum(b_t * X)

    _propagate_grid(gen, X, taus, h_max, False, on_sample)
    return out
