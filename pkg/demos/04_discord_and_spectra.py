# # Reading a trajectory: covariance, discord and spectra
#
# Quadrature covariance matrices are half-unit (vacuum = 1/2); the discord
# and symplectic eigenvalues are evaluated in vacuum units (vacuum = 1).

import math

import numpy as np

from hemtq import analysis
from hemtq.fock import ModeSpace, fock_state, DensityMatrix

# The vacuum has sigma = I / 2 and nu = (1, 1).

vac = DensityMatrix.from_state(fock_state(ModeSpace((6, 6)), [0, 0]))
sigma = analysis.covariance_matrix(vac)
print(np.round(sigma, 12))
print("nu:", analysis.symplectic_eigenvalues(sigma))

# A two-mode squeezed vacuum is pure, so both symplectic eigenvalues are one,
# and its discord equals the entropy of either reduced mode.

r = 0.5
c, s = math.cosh(2 * r), math.sinh(2 * r)
z = np.diag([1.0, -1.0])
tmsv = np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]]) / 2
rec = analysis.covariance_record(0.0, tmsv)
print(f"TMSV r={r}: nu = ({rec.nu_minus:.12f}, {rec.nu_plus:.12f}), D = {rec.discord:.12f}")
print("entropy of one mode:", analysis.entropy_vacuum_units(c))

# Spectra are mean-subtracted, Hann-windowed and normalised to one. Mixing
# two tones produces the sum and the difference frequency.

f1, f2, dt = 5.57e9, 5.77e9, 0.02e-9
t = np.arange(2500) * dt
spec = analysis.fft_spectrum(np.cos(2 * np.pi * f1 * t) * np.cos(2 * np.pi * f2 * t), dt)
peaks = analysis.find_peaks(spec, 0.02)
for p in analysis.label_mixing_products(peaks, f1, f2, 5, spec.bin_width, 2):
    zero_if = "  (zero-IF)" if p.zero_if else ""
    print(f"{p.freq / 1e9:6.3f} GHz  {p.magnitude:.3f}  {p.label} {analysis.order_name(p.order)}{zero_if}")

# The products labelled up to fifth order.

for m, n, fp in analysis.mixing_products(f1, f2, 5):
    if abs(m) + abs(n) in (3, 5) and fp < 12e9:
        print(f"  {analysis.product_label(m, n):9s} {fp / 1e9:.2f} GHz")
