import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from hemtq.circuit import build_reduced_hamiltonian
from hemtq.errors import DimensionError
from hemtq.fock import (
    DensityMatrix,
    ModeSpace,
    Operator,
    coherent_state,
    expectation,
    fock_state,
    mode_operators,
    number,
    tensor_dm,
    thermal_state,
)
from hemtq.lindblad import (
    CollapseSet,
    _Generator,
    evolve,
    lindblad_rhs,
    max_step,
    single_mode_collapse,
    steady_state_by_relaxation,
    thermal_collapse_ops,
    two_time_correlation,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _random_problem(seed, dims=(3, 3), n_ops=2):
    rng = np.random.default_rng(seed)
    space = ModeSpace(dims)
    n = space.total_dim
    H = Operator(space, oracles.random_hermitian(rng, n))
    ops = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(n_ops)]
    C = CollapseSet(space, tuple((Operator(space, c), f"c{i}") for i, c in enumerate(ops)))
    return rng, space, H, C, ops


def test_closed_and_empty_limits():
    space = ModeSpace((2, 2))
    rho = DensityMatrix.from_state(fock_state(space, [1, 0]))
    zero = Operator(space, np.zeros((4, 4)))
    assert np.all(lindblad_rhs(zero, CollapseSet(space), rho) == 0)
    rng, _, H, _, _ = _random_problem(1, (2, 2))
    r = oracles.random_density(rng, 4)
    np.testing.assert_allclose(lindblad_rhs(H, CollapseSet(space), r), -1j * (H.data @ r - r @ H.data),
                               atol=1e-14)


def test_single_collapse_against_superoperator():
    rng, _, H, C, ops = _random_problem(5, (2, 2), n_ops=1)
    rho = oracles.random_density(rng, 4)
    want = oracles.apply_liouvillian(oracles.liouvillian(H.data, ops), rho)
    assert np.max(np.abs(lindblad_rhs(H, C, rho) - want)) < 1e-12


@given(seeds, st.booleans())
def test_compiled_generator_matches_reference(seed, hermitian):
    rng, space, H, C, _ = _random_problem(seed)
    rho = oracles.random_density(rng, space.total_dim)
    X = rho if hermitian else rho @ rng.normal(size=rho.shape)
    gen = _Generator(H, C)
    got = gen.apply(np.ascontiguousarray(X), hermitian)
    assert np.max(np.abs(got - lindblad_rhs(H, C, X))) < 1e-11


@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_rhs_is_linear(seed, s, t):
    rng, space, H, C, _ = _random_problem(seed)
    r1 = oracles.random_density(rng, space.total_dim)
    r2 = oracles.random_density(rng, space.total_dim)
    lhs = lindblad_rhs(H, C, s * r1 + t * r2)
    rhs = s * lindblad_rhs(H, C, r1) + t * lindblad_rhs(H, C, r2)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


@given(seeds)
def test_rhs_is_traceless_and_hermitian(seed):
    rng, space, H, C, _ = _random_problem(seed)
    rho = oracles.random_density(rng, space.total_dim)
    d = lindblad_rhs(H, C, rho)
    assert abs(np.trace(d)) < 1e-11
    assert np.max(np.abs(d - d.conj().T)) < 1e-11


@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_gibbs_state_is_stationary(n1, n2):
    # the truncated geometric distribution balances exactly at any cutoff
    space = ModeSpace((6, 5))
    H = build_reduced_hamiltonian(1.3, 0.7, 0.0, space)
    C = thermal_collapse_ops(space, 1.0, 2.0, n1, n2)
    rho = tensor_dm(thermal_state(space.dims[0], n1), thermal_state(space.dims[1], n2))
    assert np.max(np.abs(lindblad_rhs(H, C, rho))) < 1e-10


def test_collapse_constructors():
    space = ModeSpace((3, 3))
    assert len(thermal_collapse_ops(space, 1.0, 1.0, 0.0, 0.0)) == 2
    assert len(thermal_collapse_ops(space, 0.0, 0.0, 1.0, 1.0)) == 0
    assert thermal_collapse_ops(space, 1.0, 1.0, 0.5, 0.0).labels == ["decay1", "excite1", "decay2"]
    with pytest.raises(ValueError):
        thermal_collapse_ops(space, -1.0, 1.0, 0.0, 0.0)
    with pytest.raises(DimensionError):
        CollapseSet(space, ((number(3), "wrong"),))
    nbar = 14.7
    C = single_mode_collapse((4,), 2.0, nbar)
    up, down = (np.linalg.norm(op.data) ** 2 for op in reversed(C.operators))
    assert up / down == pytest.approx(nbar / (nbar + 1))


def test_evolve_static_state():
    space = ModeSpace((3, 2))
    rho = DensityMatrix.from_state(fock_state(space, [2, 1]))
    traj = evolve(rho, Operator(space, np.zeros((6, 6))), CollapseSet(space), np.linspace(0, 1, 5),
                  rate=1.0)
    for snap in traj.snapshots:
        np.testing.assert_array_equal(snap, rho.data)


def test_evolve_audit_and_snapshots():
    space = ModeSpace((4, 4))
    H = build_reduced_hamiltonian(2.0, 2.2, 0.3, space)
    C = thermal_collapse_ops(space, 0.1, 0.1, 0.2, 0.2)
    rho0 = DensityMatrix.from_state(fock_state(space, [0, 1]))
    times = np.linspace(0, 5, 26)
    traj = evolve(rho0, H, C, times, {"n1": mode_operators(space, 0)[1] @ mode_operators(space, 0)[0]},
                  rate=2.2, snapshot_stride=10)
    assert traj.snapshot_times.tolist() == [times[0], times[10], times[20], times[25]]
    assert traj.audit["max_trace_drift"] < 1e-10
    assert traj.audit["min_eigenvalue"] > -1e-10
    assert "n1" in traj.hermitian
    assert traj.step <= max_step(H, C, 2.2) * (1 + 1e-12)


def test_evolve_rejects_space_mismatch():
    space = ModeSpace((2, 2))
    rho = DensityMatrix.from_state(fock_state((3, 2), [0, 0]))
    with pytest.raises(DimensionError):
        evolve(rho, Operator(space, np.eye(4)), CollapseSet(space), [0, 1])


def test_evolve_matches_matrix_exponential():
    from scipy.linalg import expm

    rng, space, H, C, ops = _random_problem(11, (2, 2))
    H = Operator(space, 0.5 * H.data)
    C = CollapseSet(space, tuple((Operator(space, 0.3 * c), f"c{i}") for i, c in enumerate(ops)))
    rho0 = DensityMatrix(space, oracles.random_density(rng, 4))
    L = oracles.liouvillian(H.data, [0.3 * c for c in ops])
    times = np.linspace(0, 2, 11)
    traj = evolve(rho0, H, C, times, snapshot_stride=1, rate=float(np.max(np.abs(np.linalg.eigvals(L)))))
    for t, snap in zip(traj.snapshot_times, traj.snapshots):
        want = (expm(L * t) @ rho0.data.reshape(-1, order="F")).reshape(4, 4, order="F")
        assert np.max(np.abs(snap - want)) < 1e-8


def test_steady_state_from_stationary_input_returns_immediately():
    space = ModeSpace((20,))
    C = single_mode_collapse(space, 1.0, 0.5)
    rho = thermal_state(20, 0.5)
    ss = steady_state_by_relaxation(rho, Operator(space, np.zeros((20, 20))), C, horizon=10.0, tol=1e-8)
    assert ss.converged and ss.time == 0.0


def test_steady_state_reports_nonconvergence():
    space = ModeSpace((20,))
    C = single_mode_collapse(space, 1.0, 0.5)
    rho = DensityMatrix.from_state(fock_state(space, [5]))
    ss = steady_state_by_relaxation(rho, Operator(space, np.zeros((20, 20))), C, horizon=0.1, tol=1e-12)
    assert not ss.converged
    assert ss.residual > 1e-12


def test_correlation_at_zero_lag_is_trace():
    rng, space, H, C, _ = _random_problem(3)
    rho = DensityMatrix(space, oracles.random_density(rng, space.total_dim))
    a, ad = mode_operators(space, 1)
    A, B = ad, a @ a
    corr = two_time_correlation(rho, H, C, A, B, [0.0, 0.1], rate=5.0)
    assert abs(corr[0] - np.trace(A.data @ B.data @ rho.data)) < 1e-13


def test_correlation_of_free_coherent_state():
    dim, delta = 30, 2.0
    space = ModeSpace((dim,))
    rho = DensityMatrix.from_state(coherent_state(dim, 1.2))
    a, ad = mode_operators(space, 0)
    taus = np.linspace(0, 3, 31)
    corr = two_time_correlation(rho, delta * number(dim), CollapseSet(space), ad, a, taus)
    n0 = expectation(rho, ad @ a).real
    np.testing.assert_allclose(corr, n0 * np.exp(-1j * delta * taus), atol=1e-8)


def test_max_step_respects_rate_and_spectrum():
    space = ModeSpace((4,))
    H = 3.0 * number(4)
    C = single_mode_collapse(space, 0.5, 0.0)
    h = max_step(H, C, rate=3.0)
    assert h <= 1 / (50 * 3.0) + 1e-15
    assert math.isfinite(h) and h > 0
