import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hemtq.errors import DimensionError
from hemtq.fock import (
    DensityMatrix,
    ModeSpace,
    TruncationWarning,
    annihilation,
    coherent_state,
    creation,
    embed,
    expectation,
    fock_state,
    identity,
    mode_operators,
    number,
    tensor,
    thermal_state,
)

dims = st.integers(min_value=2, max_value=12)


def test_annihilation_smallest_case():
    np.testing.assert_array_equal(annihilation(2).data, [[0, 1], [0, 0]])
    np.testing.assert_array_equal(creation(2).data, [[0, 0], [1, 0]])


def test_dim_below_two_rejected():
    for bad in (0, 1):
        with pytest.raises(DimensionError):
            annihilation(bad)


@given(dims)
def test_number_diagonal(dim):
    n = creation(dim) @ annihilation(dim)
    np.testing.assert_allclose(np.diag(n.data).real, np.arange(dim), atol=1e-12)
    np.testing.assert_allclose(n.data, number(dim).data, atol=1e-12)


@given(dims)
def test_commutator_truncation_corner(dim):
    c = annihilation(dim).commutator(creation(dim)).data
    expected = np.eye(dim)
    expected[-1, -1] = -(dim - 1)
    np.testing.assert_allclose(c, expected, atol=1e-12)


@given(dims, st.data())
def test_lowering_action(dim, data):
    k = data.draw(st.integers(min_value=0, max_value=dim - 1))
    ket = np.zeros(dim)
    ket[k] = 1
    out = annihilation(dim).data @ ket
    want = np.zeros(dim)
    if k > 0:
        want[k - 1] = np.sqrt(k)
    np.testing.assert_allclose(out, want, atol=1e-15)


def test_creation_edges():
    ad = creation(4).data
    np.testing.assert_array_equal(ad @ np.eye(4)[0], np.eye(4)[1])
    np.testing.assert_array_equal(ad @ np.eye(4)[3], np.zeros(4))


def test_embed_definition_and_diagonal():
    a = annihilation(2)
    np.testing.assert_array_equal(embed(a, (2, 2), 0).data, np.kron(a.data, np.eye(2)))
    n = embed(number(2), (3, 2), 1)
    np.testing.assert_array_equal(np.diag(n.data).real, [0, 1, 0, 1, 0, 1])


def test_embed_rejects_mismatch():
    with pytest.raises(DimensionError):
        embed(annihilation(3), (2, 2), 0)
    with pytest.raises((DimensionError, ValueError)):
        embed(annihilation(2), (2, 2), 2)


@given(dims, dims)
def test_operators_on_different_modes_commute(d0, d1):
    space = ModeSpace((d0, d1))
    a0, _ = mode_operators(space, 0)
    _, ad1 = mode_operators(space, 1)
    assert np.max(np.abs(a0.commutator(ad1).data)) < 1e-12


def test_fock_state_indices():
    assert fock_state((3, 3), [0, 0]).amplitudes[0] == 1
    assert np.flatnonzero(fock_state((3, 3), [1, 1]).amplitudes).tolist() == [4]
    space = ModeSpace((4, 3))
    rho = DensityMatrix.from_state(fock_state(space, [2, 0]))
    n1 = embed(number(4), space, 0)
    assert expectation(rho, n1) == pytest.approx(2)
    with pytest.raises((DimensionError, ValueError)):
        fock_state((3, 3), [3, 0])


def test_coherent_state_moments():
    psi = coherent_state(40, 2.0)
    a = annihilation(40).data
    v = psi.amplitudes
    assert abs(np.vdot(v, a @ v) - 2.0) < 1e-6
    assert abs(np.vdot(v, number(40).data @ v) - 4.0) < 1e-6
    np.testing.assert_allclose(coherent_state(5, 0).amplitudes, np.eye(5)[0])


def test_coherent_state_truncation_warning():
    with pytest.warns(TruncationWarning):
        psi = coherent_state(4, 2.0)
    assert psi.truncation_tail > 0.1
    assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0)


@given(st.complex_numbers(max_magnitude=1.5), st.integers(min_value=12, max_value=30))
def test_coherent_state_is_normalised(alpha, dim):
    assert np.linalg.norm(coherent_state(dim, alpha).amplitudes) == pytest.approx(1.0, abs=1e-12)


def test_expectation_identity_and_hermitian():
    rng = np.random.default_rng(3)
    space = ModeSpace((3, 2))
    g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rho = DensityMatrix(space, g @ g.conj().T / np.trace(g @ g.conj().T))
    assert expectation(rho, identity(space)) == pytest.approx(1.0)
    h = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    from hemtq.fock import Operator

    val = expectation(rho, Operator(space, h + h.conj().T))
    assert abs(val.imag) < 1e-12
    one = DensityMatrix.from_state(fock_state((3,), [1]))
    assert expectation(one, number(3)) == pytest.approx(1.0)
    with pytest.raises(DimensionError):
        expectation(rho, number(3))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix((2,), np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        DensityMatrix((2,), np.array([[0.5, 0.1], [0.3, 0.5]]))


def test_thermal_state_and_tensor():
    rho = thermal_state(60, 1.0)
    assert np.trace(rho.data).real == pytest.approx(1.0)
    assert expectation(rho, number(60)).real == pytest.approx(1.0, rel=1e-9)
    psi = tensor(fock_state((2,), [1]), fock_state((3,), [2]))
    assert psi.space.dims == (2, 3)
    assert np.flatnonzero(psi.amplitudes).tolist() == [5]
