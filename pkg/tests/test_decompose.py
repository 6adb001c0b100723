import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlti.core import FrequencyGrid, MatrixFunction, conjugate_symplectic_residual, random_group_element
from qlti.decompose import (
    MeshProgram,
    circuit_eval,
    cs_block,
    csd_sp,
    interferometer,
    mesh_decompose,
    optical_decomposition,
    sort_eigenelements,
    squeezer,
    svd_sp,
    symplectic_spectral,
)


def _unitary(n, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_identity_decomposes_to_identity():
    sf = symplectic_spectral(np.eye(4))
    assert np.allclose(sf.U, np.eye(4))
    assert np.allclose(sf.d, 1)


def test_sort_pairs_reciprocals():
    H = squeezer([0.4, -0.9])
    lam, _ = sort_eigenelements(H)
    assert np.allclose(lam[:2] * lam[2:], 1)
    assert np.all(np.diff(lam[:2]) >= 0) and np.all(lam[:2] >= 1)


def test_sort_rejects_non_hermitian():
    with pytest.raises(ValueError):
        sort_eigenelements(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_spectral_with_degenerate_unit_block():
    V = interferometer(_unitary(3, 2))
    H = V @ squeezer([0.7, 0.0, 0.0]) ** 2 @ V.conj().T
    sf = symplectic_spectral(H)
    assert np.allclose(sf.reconstruct(), H, atol=1e-12)
    assert conjugate_symplectic_residual(sf.U) < 1e-12


def test_csd_of_known_factors():
    V, W = _unitary(2, 3), _unitary(2, 4)
    theta = np.array([0.3, -1.1])
    Q = interferometer(V) @ cs_block(theta) @ interferometer(W)
    cs = csd_sp(Q)
    assert np.allclose(cs.reconstruct(), Q, atol=1e-12)
    assert np.allclose(np.sort(np.cos(2 * cs.theta)), np.sort(np.cos(2 * theta)))


def test_csd_rejects_non_unitary():
    with pytest.raises(ValueError):
        csd_sp(squeezer([0.5]))


def test_bloch_messiah_of_squeezer():
    bm = svd_sp(squeezer([0.2, 1.3]))
    assert np.allclose(np.sort(bm.d), np.exp([0.2, 1.3]))


@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 50_000), mag=st.floats(0.05, 2.5))
def test_optical_decomposition_property(n, seed, mag):
    M = random_group_element(n, seed=seed, magnitude=mag, grid=FrequencyGrid([0.0, 0.9]))
    circ = optical_decomposition(M)
    assert circ.residuals(M).max() < 1e-8
    # w = 0 stays real and the gauge fixes the first row of V1
    assert np.all(np.abs(circ.V1[:, 0, :].imag) < 1e-12)
    assert np.allclose(circuit_eval(circ, -0.9), M.at(-0.9), atol=1e-8 * np.linalg.norm(M.samples[1]))


def test_decomposition_reports_bad_frequency():
    g = FrequencyGrid([0.5, 1.0])
    samples = np.stack([squeezer([0.3]), np.array([[2.0, 0], [0, 2.0]])])
    circ = optical_decomposition(MatrixFunction(g, samples))
    assert 1 in circ.failures and 0 not in circ.failures
    assert np.all(np.isnan(circ.r[1]))


@pytest.mark.parametrize("n", [2, 3, 6])
def test_mesh_replays_unitary(n):
    U = _unitary(n, n)
    prog = mesh_decompose(U)
    assert np.allclose(prog.to_matrix(), U, atol=1e-12)
    again = MeshProgram.from_dict(prog.to_dict())
    assert np.allclose(again.to_matrix(), U, atol=1e-12)
    # rectangular mesh: n(n-1)/2 beam splitters
    from qlti.decompose import MeshRotation

    assert sum(isinstance(e, MeshRotation) for e in prog.elements) == n * (n - 1) // 2
