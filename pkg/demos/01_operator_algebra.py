# # Truncated Fock spaces
#
# Every mode is cut off at a finite number of levels. Operators are dense
# complex matrices and two-mode operators are Kronecker products with mode 0
# on the left.

import numpy as np

from hemtq.fock import (
    DensityMatrix,
    ModeSpace,
    annihilation,
    coherent_state,
    creation,
    expectation,
    fock_state,
    mode_operators,
    number,
    tensor,
)

# The lowering operator puts sqrt(n) on the first superdiagonal.

a = annihilation(4)
print(a.data.real)

# Truncation shows up in the commutator: it is the identity except for the
# bottom-right corner, which carries -(dim - 1).

print(np.diag(a.commutator(creation(4)).data).real)

# A two-mode space with 3 and 2 levels. The composite index of |n1, n2> is
# n1 * dim2 + n2, so |1, 1> sits at index 3.

space = ModeSpace((3, 2))
print(space.index([1, 1]), np.flatnonzero(fock_state(space, [1, 1]).amplitudes))

# Operators on different modes commute exactly.

a1, a1d = mode_operators(space, 0)
a2, a2d = mode_operators(space, 1)
print("max |[a1, a2^+]| =", np.abs(a1.commutator(a2d).data).max())

# A coherent state needs enough levels: with alpha = 2 and 40 levels the
# discarded Poisson tail is negligible and <a> comes back as alpha.

psi = coherent_state(40, 2.0)
rho = DensityMatrix.from_state(psi)
print("<a> =", expectation(rho, annihilation(40)), " <n> =", expectation(rho, number(40)).real)
print("tail dropped:", psi.truncation_tail)

# The scenarios start from |0> (x) |alpha>.

start = tensor(fock_state((8,), [0]), coherent_state(8, 0.5))
print(start.space.dims, np.round(np.abs(start.amplitudes[:8]) ** 2, 4))
