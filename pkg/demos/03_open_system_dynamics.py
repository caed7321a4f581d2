# # Master-equation dynamics
#
# A single damped mode relaxes to its thermal occupation, a free coherent
# state just rotates, and the regression theorem gives two-time
# correlations from the same generator.

import numpy as np

from hemtq.analysis import first_order_coherence
from hemtq.fock import DensityMatrix, ModeSpace, coherent_state, fock_state, mode_operators, number
from hemtq.fock import Operator, thermal_state
from hemtq.lindblad import CollapseSet, evolve, single_mode_collapse, two_time_correlation

kappa, nbar, dim = 1e8, 0.5, 30
space = ModeSpace((dim,))
H0 = Operator(space, np.zeros((dim, dim)))

# Start in |3> and let the bath pull <n> towards nbar.

rho0 = DensityMatrix.from_state(fock_state(space, [3]))
times = np.linspace(0, 5 / kappa, 6)
traj = evolve(rho0, H0, single_mode_collapse(space, kappa, nbar), times, {"n": number(dim)}, rate=kappa)
for t, n in zip(times, traj.real("n")):
    exact = nbar + (3 - nbar) * np.exp(-kappa * t)
    print(f"t = {t * 1e9:5.1f} ns  <n> = {n:.8f}  exact {exact:.8f}")

# Free rotation at 1 GHz: <a(t)> = alpha exp(-i Delta t).

delta = 2 * np.pi * 1e9
H = delta * number(dim)
a, ad = mode_operators(space, 0)
rho = DensityMatrix.from_state(coherent_state(dim, 1.5))
t = np.linspace(0, 1e-9, 5)
free = evolve(rho, H, CollapseSet(space), t, {"a": a}, rate=delta)
print("phase error:", np.abs(free["a"] - 1.5 * np.exp(-1j * delta * t)).max())

# First-order coherence of a thermal field decays at kappa / 2.

rho_th = thermal_state(dim, nbar)
taus = np.linspace(0, 20e-9, 5)
corr = two_time_correlation(rho_th, H, single_mode_collapse(space, kappa, nbar), ad, a, taus, rate=delta)
g1 = first_order_coherence(corr, nbar, nbar)
print("|g1|:", np.round(g1, 6), " exp(-kappa tau / 2):", np.round(np.exp(-kappa * taus / 2), 6))
