"""Truncated Fock-space operator algebra.

Every operator is a dense complex matrix tagged with the :class:`ModeSpace`
it acts on. Composite indices are row-major over the modes, so for two modes
with dims ``(d0, d1)`` the basis state ``|n0, n1>`` sits at ``n0 * d1 + n1``
and single-mode operators are lifted as ``A (x) I`` for mode 0 and
``I (x) B`` for mode 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import reduce
from numbers import Number
from typing import Sequence

import numpy as np
from scipy.special import gammainc

from .errors import DimensionError

#: Identity tolerance used for algebraic checks.
ALGEBRA_TOL = 1e-10
#: Tolerance for quantities accumulated over many integrator steps.
EVOLUTION_TOL = 1e-8
#: Discarded coherent-state weight above which a warning is issued.
TAIL_WARN = 1e-8


class TruncationWarning(UserWarning):
    """Raised when a state loses noticeable weight to the Fock cutoff."""


def _frozen(array):
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class ModeSpace:
    """Tensor-product space of truncated bosonic modes."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise DimensionError("a mode space needs at least one mode")
        for d in dims:
            if d < 2:
                raise DimensionError(f"every truncation dimension must be >= 2, got {d}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    def index(self, occupations: Sequence[int]) -> int:
        """Composite basis index of ``|n_0, n_1, ...>``."""
        if len(occupations) != self.n_modes:
            raise DimensionError(
                f"expected {self.n_modes} occupations, got {len(occupations)}"
            )
        idx = 0
        for n, d in zip(occupations, self.dims):
            if not 0 <= n < d:
                raise DimensionError(f"occupation {n} outside truncation [0, {d})")
            idx = idx * d + int(n)
        return idx

    def check_mode(self, mode: int) -> int:
        if not 0 <= mode < self.n_modes:
            raise DimensionError(f"mode index {mode} out of range for {self.n_modes} modes")
        return mode


def _space_of(space_or_dims) -> ModeSpace:
    if isinstance(space_or_dims, ModeSpace):
        return space_or_dims
    return ModeSpace(tuple(space_or_dims))


class Operator:
    """Dense operator on a :class:`ModeSpace`; immutable."""

    __slots__ = ("space", "data")
    __array_priority__ = 1000

    def __init__(self, space, data):
        space = _space_of(space)
        data = _frozen(data)
        n = space.total_dim
        if data.shape != (n, n):
            raise DimensionError(
                f"operator matrix has shape {data.shape}, space needs ({n}, {n})"
            )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    def _check(self, other: "Operator"):
        if not isinstance(other, Operator):
            return NotImplemented
        if other.space != self.space:
            raise DimensionError(f"space mismatch: {self.space.dims} vs {other.space.dims}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.data + other.data)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.data - other.data)

    def __neg__(self):
        return Operator(self.space, -self.data)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return Operator(self.space, complex(scalar) * self.data)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return Operator(self.space, self.data / complex(scalar))

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            if other.space != self.space:
                raise DimensionError("space mismatch in operator-state product")
            return self.data @ other.amplitudes
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.data @ other.data)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        return Operator(self.space, np.linalg.matrix_power(self.data, k))

    def dag(self) -> "Operator":
        """Hermitian adjoint."""
        return Operator(self.space, self.data.conj().T)

    def commutator(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.data @ other.data - other.data @ self.data)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def is_hermitian(self, tol: float = ALGEBRA_TOL) -> bool:
        return self.hermiticity_error() <= tol

    def __repr__(self):
        return f"Operator(dims={self.space.dims})"


@dataclass(frozen=True)
class StateVector:
    """Normalised ket on a :class:`ModeSpace`.

    ``truncation_tail`` carries the probability weight discarded by the Fock
    cutoff before renormalisation (zero for exact basis states).
    """

    space: ModeSpace
    amplitudes: np.ndarray
    truncation_tail: float = field(default=0.0, compare=False)

    def __post_init__(self):
        space = _space_of(self.space)
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size != space.total_dim:
            raise DimensionError(
                f"state has {amps.size} amplitudes, space needs {space.total_dim}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state vector norm {norm!r} differs from 1 by more than 1e-12")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "amplitudes", amps)


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator.

    Validation runs on construction; ``min_eig`` is stored so callers can
    audit positivity without another diagonalisation.
    """

    __slots__ = ("space", "data", "min_eig")

    HERMITIAN_TOL = 1e-10
    TRACE_TOL = 1e-10
    EIG_FLOOR = -1e-8

    def __init__(self, space, data, *, validate: bool = True):
        space = _space_of(space)
        data = _frozen(data)
        n = space.total_dim
        if data.shape != (n, n):
            raise DimensionError(f"density matrix shape {data.shape} does not match ({n}, {n})")
        min_eig = float("nan")
        if validate:
            herm = float(np.max(np.abs(data - data.conj().T)))
            if herm > self.HERMITIAN_TOL:
                raise ValueError(f"density matrix not Hermitian (max |rho - rho^H| = {herm:.3e})")
            tr = np.trace(data)
            if abs(tr - 1.0) > self.TRACE_TOL:
                raise ValueError(f"density matrix trace {tr.real:.12g} differs from 1")
            min_eig = float(np.linalg.eigvalsh(0.5 * (data + data.conj().T))[0])
            if min_eig < self.EIG_FLOOR:
                raise ValueError(f"density matrix has negative eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "min_eig", min_eig)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityMatrix":
        v = psi.amplitudes
        return cls(psi.space, np.outer(v, v.conj()))

    def __repr__(self):
        return f"DensityMatrix(dims={self.space.dims})"


# -- single-mode constructors ------------------------------------------------

def annihilation(dim: int) -> Operator:
    """Lowering operator with ``a[n-1, n] = sqrt(n)``."""
    if int(dim) < 2:
        raise DimensionError(f"dim must be >= 2, got {dim}")
    dim = int(dim)
    return Operator((dim,), np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1))


def creation(dim: int) -> Operator:
    return annihilation(dim).dag()


def number(dim: int) -> Operator:
    if int(dim) < 2:
        raise DimensionError(f"dim must be >= 2, got {dim}")
    return Operator((int(dim),), np.diag(np.arange(int(dim), dtype=float)))


def identity(space) -> Operator:
    space = _space_of(space)
    return Operator(space, np.eye(space.total_dim))


def embed(op: Operator, space, mode: int) -> Operator:
    """Lift a single-mode operator to ``space``, acting on ``mode``."""
    space = _space_of(space)
    space.check_mode(mode)
    if op.space.n_modes != 1 or op.space.dims[0] != space.dims[mode]:
        raise DimensionError(
            f"operator dim {op.space.dims} does not match mode {mode} dim {space.dims[mode]}"
        )
    factors = [np.eye(d) for d in space.dims]
    factors[mode] = op.data
    return Operator(space, reduce(np.kron, factors))


def tensor(*states: StateVector) -> StateVector:
    """Tensor product of kets, mode order as given."""
    dims = tuple(d for s in states for d in s.space.dims)
    amps = reduce(np.kron, [s.amplitudes for s in states])
    return StateVector(ModeSpace(dims), amps / np.linalg.norm(amps),
                       truncation_tail=1.0 - math.prod(1.0 - s.truncation_tail for s in states))


def mode_operators(space, mode: int):
    """Embedded ``(a, a_dag)`` for one mode."""
    space = _space_of(space)
    a = embed(annihilation(space.dims[space.check_mode(mode)]), space, mode)
    return a, a.dag()


# -- states ------------------------------------------------------------------

def fock_state(space, occupations: Sequence[int]) -> StateVector:
    space = _space_of(space)
    amps = np.zeros(space.total_dim, dtype=complex)
    amps[space.index(occupations)] = 1.0
    return StateVector(space, amps)


def coherent_tail(dim: int, alpha: complex) -> float:
    """Poisson weight ``P(n >= dim)`` lost when truncating ``|alpha>``."""
    x = abs(alpha) ** 2
    if x == 0.0:
        return 0.0
    return float(gammainc(dim, x))


def coherent_state(dim: int, alpha: complex) -> StateVector:
    """Truncated coherent state, renormalised to unit norm.

    Amplitudes follow ``c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)`` through
    the recurrence ``c_{n+1} = c_n alpha / sqrt(n+1)``. The discarded weight is
    stored on the returned state and triggers a :class:`TruncationWarning`
    above ``1e-8`` or when ``|alpha|^2 > dim / 4``.
    """
    if int(dim) < 2:
        raise DimensionError(f"dim must be >= 2, got {dim}")
    dim = int(dim)
    alpha = complex(alpha)
    amps = np.empty(dim, dtype=complex)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(dim - 1):
        amps[n + 1] = amps[n] * alpha / math.sqrt(n + 1)
    tail = coherent_tail(dim, alpha)
    if tail > TAIL_WARN or abs(alpha) ** 2 > dim / 4:
        warnings.warn(
            f"coherent state |alpha|^2={abs(alpha) ** 2:.3g} in dim {dim} drops weight {tail:.2e}",
            TruncationWarning,
            stacklevel=2,
        )
    return StateVector(ModeSpace((dim,)), amps / np.linalg.norm(amps), truncation_tail=tail)


def thermal_state(dim: int, nbar: float) -> DensityMatrix:
    """Bose-Einstein diagonal state, renormalised inside the cutoff."""
    if nbar < 0:
        raise ValueError("nbar must be non-negative")
    n = np.arange(int(dim))
    if nbar == 0:
        p = (n == 0).astype(float)
    else:
        p = (nbar / (1.0 + nbar)) ** n
    return DensityMatrix((int(dim),), np.diag(p / p.sum()))


def tensor_dm(*rhos: DensityMatrix) -> DensityMatrix:
    dims = tuple(d for r in rhos for d in r.space.dims)
    return DensityMatrix(ModeSpace(dims), reduce(np.kron, [r.data for r in rhos]))


def expectation(rho, op: Operator) -> complex:
    """``Tr(rho O)`` for a density matrix, or ``<psi|O|psi>`` for a ket."""
    if rho.space != op.space:
        raise DimensionError(f"space mismatch: {rho.space.dims} vs {op.space.dims}")
    if isinstance(rho, StateVector):
        v = rho.amplitudes
        return complex(np.vdot(v, op.data @ v))
    return complex(np.einsum("ij,ji->", rho.data, op.data))
