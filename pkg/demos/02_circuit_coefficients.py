# # From circuit elements to Hamiltonian rates
#
# The HEMT small-signal values and the two LC tanks fix every coefficient of
# the two-mode Hamiltonian. All rates are angular (rad/s) with hbar = 1.

from dataclasses import replace

import numpy as np

from hemtq.circuit import (
    CircuitParams,
    CoefficientMapping,
    build_full_hamiltonian,
    build_reduced_hamiltonian,
    compute_coefficients,
    derive_circuit,
    reduced_coupling_rate,
    thermal_occupation,
)

params = CircuitParams()
d = derive_circuit(params)
print(f"C_A = {d.cA:.4e} F, C_B = {d.cB:.4e} F, C_C = {d.cC:.1e} F")
print(f"Z1 = {d.z1:.1f} ohm, f1 = {d.omega1 / 2 / np.pi / 1e9:.3f} GHz")
print(f"g_N2 = {d.gN2:.3e} A/V^2")

# Taken literally, the drive coefficients include the noise currents, and the
# drain term comes out near 1e33 rad/s: far beyond anything an integrator
# can follow. The scenarios therefore switch those contributions off.

literal = compute_coefficients(params)
print(f"literal d_y2 = {literal.d_y2:.3e} rad/s")

c = compute_coefficients(params, mapping=CoefficientMapping(drive_noise=False))
for name, value in c.to_dict().items():
    print(f"  {name:7s} {value: .4e}")

# Nonlinear rates scale linearly with g_m3.

strong = compute_coefficients(replace(params, gm3=0.12), mapping=CoefficientMapping(drive_noise=False))
print("n4 ratio at 120 vs 10 mA/V^3:", strong.n4 / c.n4)

# The reduced model keeps only the capacitive coupling.

gamma_c = reduced_coupling_rate(params.cc, d.z1, d.z2)
H_red = build_reduced_hamiltonian(c.delta1, c.delta2, gamma_c, (8, 8))
H_full = build_full_hamiltonian(c, (8, 8))
print("reduced vs full, largest element difference:", np.abs(H_full.data - H_red.data).max())

# Bath occupation at 4.2 K and at the desk temperature.

print("nbar(5.77 GHz, 4.2 K) =", thermal_occupation(5.77e9, 4.2))
print("nbar(5.77 GHz, 0.1 K) =", thermal_occupation(5.77e9, 0.1))
