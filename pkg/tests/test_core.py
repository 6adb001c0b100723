import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from qlti.core import (
    FrequencyGrid,
    GridMismatchError,
    MatrixFunction,
    NumericalError,
    OffGridError,
    conjugate_symplectic_residual,
    from_ladder,
    generator_of,
    group_inverse,
    is_conjugate_symplectic,
    ladder_map,
    random_group_element,
    symplectic_form,
    to_ladder,
    two_photon_embed,
)
from qlti.decompose import interferometer, squeezer


def test_symplectic_form_layout():
    J = symplectic_form(2)
    assert np.array_equal(J[:2, 2:], np.eye(2))
    assert np.array_equal(J[2:, :2], -np.eye(2))
    assert np.array_equal(J @ J, -np.eye(4))


def test_ladder_map_diagonalizes_iJ():
    for n in (1, 3):
        P = ladder_map(n)
        want = np.diag(np.concatenate([np.ones(n), -np.ones(n)]))
        assert np.allclose(P.conj().T @ (1j * symplectic_form(n)) @ P, want)
        assert np.allclose(P.conj().T @ P, np.eye(2 * n))


def test_grid_rejects_bad_input():
    with pytest.raises(ValueError):
        FrequencyGrid([1.0, 0.5])
    with pytest.raises(ValueError):
        FrequencyGrid([-1.0, 0.5])
    with pytest.raises(ValueError):
        FrequencyGrid([])


def test_grid_locate_signed():
    g = FrequencyGrid.linear(0.0, 2.0, 5)
    assert g.locate(1.0) == (2, False)
    assert g.locate(-1.0) == (2, True)
    with pytest.raises(OffGridError):
        g.locate(0.7)


def test_negative_frequency_is_conjugate():
    M = random_group_element(2, seed=3, grid=FrequencyGrid([0.0, 1.0]))
    assert np.array_equal(M.at(-1.0), M.at(1.0).conj())
    assert np.isrealobj(M.samples) or np.abs(M.samples[0].imag).max() == 0


def test_zero_frequency_must_be_real():
    g = FrequencyGrid([0.0, 1.0])
    bad = np.stack([np.eye(2) * 1j, np.eye(2)])
    with pytest.raises(ValueError):
        MatrixFunction(g, bad)


def test_grid_mismatch():
    a = MatrixFunction.constant(FrequencyGrid([1.0]), np.eye(2))
    b = MatrixFunction.constant(FrequencyGrid([2.0]), np.eye(2))
    with pytest.raises(GridMismatchError):
        a @ b


def test_factor_builders_are_group_elements():
    rng = np.random.default_rng(0)
    V = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    assert is_conjugate_symplectic(interferometer(V))
    assert is_conjugate_symplectic(squeezer([0.3, -1.0, 2.0]))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 10_000), mag=st.floats(0.01, 2.0))
def test_random_elements_close_under_product_and_inverse(n, seed, mag):
    g = FrequencyGrid([0.0, 0.3])
    A = random_group_element(n, seed=seed, magnitude=mag, grid=g)
    B = random_group_element(n, seed=seed + 1, magnitude=mag, grid=g)
    for a, b in zip(A.samples, B.samples):
        assert conjugate_symplectic_residual(a @ b) < 1e-9 * max(1, np.linalg.norm(a @ b) ** 2)
        assert np.allclose(group_inverse(a) @ a, np.eye(2 * n), atol=1e-10)


def test_generator_roundtrip():
    M = random_group_element(2, seed=11, magnitude=0.5, grid=FrequencyGrid([0.0, 1.0]))
    gen = generator_of(M)
    back = np.stack([scipy.linalg.expm(lam) for lam in gen.Lambda])
    assert np.allclose(back, M.samples, atol=1e-10)
    assert gen.as_matrix_function().kind == "algebra"
    assert gen.hermiticity_residual().max() < 1e-10
    K = gen.hamiltonian_kernel()
    assert np.allclose(K, np.conj(np.swapaxes(K, 1, 2)), atol=1e-10)


def test_generator_rejects_negative_eigenvalue():
    M = MatrixFunction.constant(FrequencyGrid([1.0]), -np.eye(2))
    with pytest.raises(NumericalError) as err:
        generator_of(M)
    assert 0 in err.value.failures


def test_ladder_roundtrip_and_negative_frequency():
    M = random_group_element(2, seed=5, grid=FrequencyGrid([0.0, 0.7]))
    A = to_ladder(M)
    assert A.picture == "ladder"
    assert np.allclose(from_ladder(A).samples, M.samples)
    # the ladder picture keeps the same group element at -w
    assert np.allclose(A.at(-0.7), to_ladder(M.at(-0.7)))


def test_two_photon_embedding_is_real_symplectic():
    M = random_group_element(2, seed=9, grid=FrequencyGrid([0.0, 0.4]))
    X = two_photon_embed(M, 0.4)
    assert np.isrealobj(X)
    Jb = np.kron(np.eye(2), symplectic_form(2))
    assert np.allclose(X @ Jb @ X.T, Jb, atol=1e-10)
