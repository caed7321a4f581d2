"""Circuit parameters, derived constants and the two model Hamiltonians.

All Hamiltonians are returned as frequency operators (hbar = 1, entries in
rad/s). The coefficient formulas themselves are evaluated in SI units, so any
explicit hbar they contain is the physical constant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np
from scipy import constants

from .errors import CoefficientError, NonHermitianError, SingularCircuitError
from .fock import ModeSpace, Operator, _space_of, mode_operators

HBAR = constants.hbar
KB = constants.k
PLANCK = constants.h

#: Names of the six distinct nonlinear expressions, in the order they are
#: listed in the appendix formula block.
NONLINEAR_EXPRESSIONS = (
    "q1phi1",
    "q2phi2",
    "q2phi1",
    "q1phi2",
    "phi2phi2",
    "q1phi1_b",
)


@dataclass(frozen=True)
class CircuitParams:
    """Physical inputs of the two-oscillator HEMT circuit (SI units).

    The device block defaults to the cryogenic InP HEMT small-signal values.
    External elements default to the desk profile: each oscillator has a
    100 ohm impedance and resonates at 5.57 / 5.77 GHz; the input and
    coupling capacitances are large enough that the linear couplings stay a few
    percent of the mode frequency, and the DC flux derivative sets a
    composite nonlinearity ``g_N2`` strong enough to show mixing in a
    tens-of-nanoseconds trajectory.
    """

    # device (small-signal model)
    rg: float = 0.3
    lg: float = 75e-12
    ld: float = 70e-12
    cgs: float = 107e-15
    cds: float = 51e-15
    cgd: float = 60e-15
    ri: float = 0.07
    rj: float = 8.0
    gd: float = 12e-3
    gm: float = 82e-3
    temp: float = 4.2
    td: float = 450.0
    # transconductance nonlinearity
    gm2: float = 0.0
    gm3: float = 10e-3
    # external circuit (desk defaults)
    c1: float = 300e-12
    c2: float = 300e-12
    cin: float = 300e-12
    l1: float = 100.0 / (2 * math.pi * 5.57e9)
    l2: float = 100.0 / (2 * math.pi * 5.77e9)
    cq1: float = 1.0 / (100.0 * 2 * math.pi * 5.57e9)
    cq2: float = 1.0 / (100.0 * 2 * math.pi * 5.77e9)
    cc: float = 300e-12
    vrf: float = 0.0
    # operating point
    phi2_dc: float = 0.0
    dphi1dt_dc: float = 1.2e8
    # noise / environment
    gamma_noise: float = 1.0
    rd: float = 1.0 / 12e-3
    kappa1: float = 1e8
    kappa2: float = 1e8

    def __post_init__(self):
        positive = (
            "rg", "lg", "ld", "cgs", "cds", "cgd", "ri", "rj", "gd", "gm",
            "temp", "td", "c1", "c2", "cin", "l1", "l2", "cq1", "cq2", "cc", "rd",
        )
        for name in positive:
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"circuit parameter {name} must be strictly positive, got {value!r}")
        for name in ("kappa1", "kappa2", "gamma_noise"):
            if getattr(self, name) < 0:
                raise ValueError(f"circuit parameter {name} must be >= 0")
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise ValueError(f"circuit parameter {f.name} is not finite")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DerivedCircuit:
    """Capacitance combinations, impedances and noise currents."""

    cA: float
    cB: float
    cC: float
    cN: float
    cAprime: float
    cM2: float
    z1: float
    z2: float
    omega1: float
    omega2: float
    gN2: float
    i2_g: float
    i2_d: float
    i2_j: float
    i2_i: float
    i2_ds: float
    i2_gs_bar: float
    i2_ds_bar: float

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class CoefficientMapping:
    """Binding between printed Hamiltonian terms and coefficient formulas.

    ``term5_literal`` selects the printed operator pair ``(a2 - a2^+)(a2 + a2^+)``
    for the fifth linear term instead of ``(a2 - a2^+)(a1 + a1^+)``.
    ``nonlinear_order`` names which appendix expression feeds n1..n6.
    ``ordering`` is ``"symmetric"`` (each product replaced by its Hermitian
    part) or ``"printed"`` (products used as written; several are not
    Hermitian and are rejected by the builder).
    ``noise_model`` picks ``4 k T gamma g_m`` (``"printed"``) or
    ``4 k T_d G_d`` (``"drain_temperature"``) for the channel noise, and
    ``drive_noise`` toggles the noise-current contributions to the drive
    coefficients.
    """

    term5_literal: bool = False
    nonlinear_order: tuple[str, ...] = NONLINEAR_EXPRESSIONS
    ordering: str = "symmetric"
    noise_model: str = "printed"
    drive_noise: bool = True

    def __post_init__(self):
        order = tuple(self.nonlinear_order)
        if len(order) != 6 or any(name not in NONLINEAR_EXPRESSIONS for name in order):
            raise ValueError(
                f"nonlinear_order needs six names from {NONLINEAR_EXPRESSIONS}, got {order}"
            )
        object.__setattr__(self, "nonlinear_order", order)
        if self.ordering not in ("symmetric", "printed"):
            raise ValueError(f"unknown operator ordering {self.ordering!r}")
        if self.noise_model not in ("printed", "drain_temperature"):
            raise ValueError(f"unknown noise model {self.noise_model!r}")


@dataclass(frozen=True)
class HamiltonianCoefficients:
    """Angular-rate coefficients of the full Hamiltonian (rad/s)."""

    delta1: float
    delta2: float
    c_qq: float = 0.0
    c_q1p2: float = 0.0
    c_q2p1: float = 0.0
    d_x1: float = 0.0
    d_x2: float = 0.0
    d_y1: float = 0.0
    d_y2: float = 0.0
    n1: float = 0.0
    n2: float = 0.0
    n3: float = 0.0
    n4: float = 0.0
    n5: float = 0.0
    n6: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, complex) or not math.isfinite(value):
                raise CoefficientError(f"coefficient {f.name} must be real and finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))

    def to_dict(self):
        return asdict(self)

    def max_abs(self) -> float:
        return max(abs(v) for v in asdict(self).values())

    def reduced(self) -> "HamiltonianCoefficients":
        """Keep only the free terms and the charge-charge coupling."""
        return HamiltonianCoefficients(self.delta1, self.delta2, c_qq=self.c_qq)

    def nonlinear(self) -> tuple[float, ...]:
        return (self.n1, self.n2, self.n3, self.n4, self.n5, self.n6)


def derive_circuit(params: CircuitParams, mapping: CoefficientMapping | None = None) -> DerivedCircuit:
    mapping = mapping or CoefficientMapping()
    p = params
    cC = p.cgd
    cB = p.c2 + p.cgd
    cA = p.cin + p.c1 + p.cgs + p.cgd
    cN = p.gm2 * p.phi2_dc + 6.0 * p.gm3 * p.phi2_dc * p.dphi1dt_dc
    cAprime = cA + cN
    cM2 = cB * (cA + cN) - cC ** 2
    if abs(cM2) < 1e-30:
        raise SingularCircuitError(
            f"C_M^2 = C_B (C_A + C_N) - C_C^2 = {cM2:.3e} F^2 vanishes "
            f"(C_B={cB:.3e}, C_A={cA:.3e}, C_N={cN:.3e}, C_C={cC:.3e})"
        )
    kt4 = 4.0 * KB * p.temp
    i2_g = kt4 / p.rg
    i2_d = kt4 / p.rd
    i2_j = kt4 / p.rj
    i2_i = kt4 / p.ri
    if mapping.noise_model == "printed":
        i2_ds = kt4 * p.gamma_noise * p.gm
    else:
        i2_ds = 4.0 * KB * p.td * p.gd
    return DerivedCircuit(
        cA=cA,
        cB=cB,
        cC=cC,
        cN=cN,
        cAprime=cAprime,
        cM2=cM2,
        z1=math.sqrt(p.l1 / p.cq1),
        z2=math.sqrt(p.l2 / p.cq2),
        omega1=1.0 / math.sqrt(p.l1 * p.cq1),
        omega2=1.0 / math.sqrt(p.l2 * p.cq2),
        gN2=p.gm2 + 6.0 * p.gm3 * p.dphi1dt_dc,
        i2_g=i2_g,
        i2_d=i2_d,
        i2_j=i2_j,
        i2_i=i2_i,
        i2_ds=i2_ds,
        i2_gs_bar=i2_g - i2_j,
        i2_ds_bar=i2_ds + i2_d + i2_j,
    )


def nonlinear_expressions(params: CircuitParams, d: DerivedCircuit) -> dict[str, float]:
    """The six nonlinear appendix expressions, keyed by name."""
    cB, cC, z1, z2, gm = d.cB, d.cC, d.z1, d.z2, params.gm
    pref = d.gN2 / d.cM2 ** 2
    return {
        "q1phi1": pref * cB ** 2 * math.sqrt(HBAR * z2 / 2) / (2 * z1),
        "q2phi2": pref * cC ** 2 * math.sqrt(HBAR * z2 / 2) / (2 * z2),
        "q2phi1": -pref * 2 * gm * cB * cC * math.sqrt(HBAR / (2 * z2)) * z2 / 2,
        "q1phi2": pref * 2 * gm * cB ** 2 * math.sqrt(HBAR / (2 * z1)) * z2 / 2,
        "phi2phi2": pref * gm ** 2 * cB ** 2 * math.sqrt(HBAR * z2 / 2) / (2 * z2),
        "q1phi1_b": pref * 2 * gm * cB * cC * math.sqrt(HBAR / (2 * z1)) * math.sqrt(z1 * z2) / 2,
    }


def compute_coefficients(
    params: CircuitParams,
    derived: DerivedCircuit | None = None,
    mapping: CoefficientMapping | None = None,
    *,
    delta1: float | None = None,
    delta2: float | None = None,
) -> HamiltonianCoefficients:
    """Evaluate every coefficient of the full Hamiltonian.

    ``delta1``/``delta2`` default to the bare LC resonances ``1/sqrt(L C_q)``.
    """
    mapping = mapping or CoefficientMapping()
    d = derived or derive_circuit(params, mapping)
    p = params
    cA, cB, cC, cAp = d.cA, d.cB, d.cC, d.cAprime
    cM4 = d.cM2 ** 2
    gm, cin, vrf = p.gm, p.cin, p.vrf
    noise = 1.0 if mapping.drive_noise else 0.0

    values = {
        "c_qq": (cB * cC * cA - cC ** 3) / cM4 / (4 * math.sqrt(d.z1 * d.z2)),
        "c_q1p2": math.sqrt(d.z2 / d.z1) * (3 * cB * cC ** 2 * gm - 2 * gm * cB ** 2 * cA) / (2 * cM4),
        "c_q2p1": (cC ** 3 * gm + cB * cC * cAp * gm - cB * cC * gm * cA) / (2 * cM4),
        "d_y1": noise * d.i2_gs_bar * math.sqrt(d.z1 / (2 * HBAR)),
        "d_x1": (cB ** 2 * cin * cA * vrf - cC ** 2 * cin * cB * vrf) / cM4
        * math.sqrt(1 / (2 * d.z1 * HBAR)),
        "d_y2": (gm * cC ** 2 * cin * cB * vrf - gm * cB ** 2 * cin * cA * vrf - noise * d.i2_ds_bar)
        / cM4 * math.sqrt(d.z2 / (2 * HBAR)),
        "d_x2": (0.5 * cB * cC * cin * cA * vrf + cB * cC * cin * cA * vrf - cC ** 3 * cin * vrf)
        / cM4 * math.sqrt(1 / (2 * d.z2 * HBAR)),
    }
    nl = nonlinear_expressions(p, d)
    for k, name in enumerate(mapping.nonlinear_order, start=1):
        values[f"n{k}"] = nl[name]
    for name, value in values.items():
        if not math.isfinite(value):
            raise CoefficientError(f"coefficient {name} diverged (value {value!r})")
    return HamiltonianCoefficients(
        delta1=d.omega1 if delta1 is None else delta1,
        delta2=d.omega2 if delta2 is None else delta2,
        **values,
    )


def reduced_coupling_rate(cc: float, z1: float, z2: float) -> float:
    """Capacitive coupling rate ``1 / (C_c sqrt(Z1 Z2))`` in rad/s."""
    if not (cc > 0 and z1 > 0 and z2 > 0):
        raise ValueError(f"coupling inputs must be positive (cc={cc}, z1={z1}, z2={z2})")
    return 1.0 / (cc * math.sqrt(z1 * z2))


def _two_mode(space) -> ModeSpace:
    space = _space_of(space)
    if space.n_modes != 2:
        raise ValueError(f"Hamiltonian needs a two-mode space, got dims {space.dims}")
    return space


def _quadrature_blocks(space):
    a1, a1d = mode_operators(space, 0)
    a2, a2d = mode_operators(space, 1)
    return (a1.data, a1d.data, a2.data, a2d.data)


def _hermitian_scale(h: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(h))))


def build_reduced_hamiltonian(delta1: float, delta2: float, gamma_c: float, space) -> Operator:
    space = _two_mode(space)
    a1, a1d, a2, a2d = _quadrature_blocks(space)
    h = delta1 * (a1d @ a1) + delta2 * (a2d @ a2) - gamma_c * ((a1d - a1) @ (a2d - a2))
    err = float(np.max(np.abs(h - h.conj().T)))
    if err > 1e-10 * _hermitian_scale(h):
        raise NonHermitianError(f"reduced Hamiltonian not Hermitian ({err:.3e})")
    return Operator(space, h)


def full_hamiltonian_terms(coeffs: HamiltonianCoefficients, space, mapping: CoefficientMapping | None = None):
    """Printed-order list of ``(label, matrix)`` terms of the full Hamiltonian.

    Matrices carry their coefficient and sign but no ordering fix-up.
    """
    mapping = mapping or CoefficientMapping()
    space = _two_mode(space)
    a1, a1d, a2, a2d = _quadrature_blocks(space)
    x1, p1 = a1 + a1d, a1 - a1d
    x2, p2 = a2 + a2d, a2 - a2d
    c = coeffs
    term5 = p2 @ x2 if mapping.term5_literal else p2 @ x1
    return [
        ("delta1 n1", c.delta1 * (a1d @ a1)),
        ("delta2 n2", c.delta2 * (a2d @ a2)),
        ("c_qq", -c.c_qq * (p1 @ p2)),
        ("c_q1p2", -1j * c.c_q1p2 * (p1 @ x2)),
        ("c_q2p1", -1j * c.c_q2p1 * term5),
        ("d_x1", -c.d_x1 * x1),
        ("d_x2", c.d_x2 * x2),
        ("d_y1", -1j * c.d_y1 * p1),
        ("d_y2", -1j * c.d_y2 * p2),
        ("n1", -c.n1 * (p1 @ p1 @ x2)),
        ("n2", -c.n2 * (x2 @ p2 @ p2)),
        ("n3", 1j * c.n3 * (p1 @ x2 @ x2)),
        ("n4", c.n4 * (x2 @ x2 @ x2)),
        ("n5", 1j * c.n5 * (p2 @ x2 @ x2)),
        ("n6", -1j * c.n6 * (p1 @ x1 @ x2)),
    ]


def build_full_hamiltonian(
    coeffs: HamiltonianCoefficients, space, mapping: CoefficientMapping | None = None
) -> Operator:
    """Sum of the nine linear and six nonlinear terms.

    With ``ordering="printed"`` a term whose operator product is not Hermitian
    raises :class:`NonHermitianError` carrying its 1-based printed index.
    """
    mapping = mapping or CoefficientMapping()
    space = _two_mode(space)
    terms = full_hamiltonian_terms(coeffs, space, mapping)
    total = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for index, (label, m) in enumerate(terms, start=1):
        if mapping.ordering == "symmetric":
            m = 0.5 * (m + m.conj().T)
        total = total + m
        err = float(np.max(np.abs(total - total.conj().T)))
        if err > 1e-10 * _hermitian_scale(total):
            raise NonHermitianError(
                f"full Hamiltonian loses Hermiticity at term {index} ({label}): "
                f"max |H - H^H| = {err:.3e}",
                term=index,
            )
    return Operator(space, total)


def thermal_occupation(frequency: float, temp: float) -> float:
    """Bose-Einstein photon number ``1 / (exp(h f / k_B T) - 1)``."""
    if frequency <= 0:
        raise ValueError("frequency must be positive")
    if temp < 0:
        raise ValueError("temperature must be non-negative")
    if temp == 0:
        return 0.0
    return float(1.0 / np.expm1(PLANCK * frequency / (KB * temp)))
