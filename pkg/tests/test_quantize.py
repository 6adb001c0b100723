import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_contraction
from qlti.core import FrequencyGrid, MatrixFunction, conjugate_symplectic_residual, random_group_element
from qlti.quantize import RankToleranceWarning, ccr_deficit, dilate, minimal_noise, qqpp_permutation


def _const(matrix, omega=(0.0, 1.0)):
    return MatrixFunction.constant(FrequencyGrid(np.asarray(omega)), np.asarray(matrix), "transfer")


def test_loss_needs_one_noise_mode():
    eta = 0.3
    model = minimal_noise(_const(np.sqrt(eta) * np.eye(2)))
    assert np.all(model.ell == 1)
    assert np.allclose(model.N.samples, np.sqrt(1 - eta) * np.eye(2))


def test_phase_insensitive_amplifier():
    g = np.sqrt(2.0)
    model = minimal_noise(_const(g * np.eye(2)))
    assert np.all(model.ell == 1)
    assert np.all(model.d_minus == 1) and np.all(model.d_plus == 1)
    assert model.constraint_residual().max() < 1e-12
    assert np.allclose(np.abs(model.N.samples[0]), np.eye(2))


def test_group_element_needs_no_noise():
    M = random_group_element(2, seed=4, grid=FrequencyGrid([0.0, 1.0]))
    model = minimal_noise(M)
    assert np.all(model.ell == 0)
    assert model.N.cols == 0


def test_real_at_zero_frequency():
    G = random_contraction(3, omega=(0.0, 0.5))
    model = minimal_noise(G)
    assert np.isrealobj(model.N.samples) or np.abs(model.N.samples[0].imag).max() == 0


def test_rank_tolerance_warning():
    # a deficit eigenvalue right at the threshold
    G = _const(np.diag([np.sqrt(1 - 3e-10), np.sqrt(1 - 3e-10)]), omega=(1.0,))
    with pytest.warns(RankToleranceWarning):
        minimal_noise(G, rank_tol=1e-9)


def test_rejects_odd_dimensions():
    with pytest.raises(ValueError):
        minimal_noise(_const(np.eye(3)[:, :2], omega=(1.0,)))


def test_rank_two_deficit_gets_two_noise_modes():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    G = MatrixFunction(FrequencyGrid([0.4]), (0.5 * a / np.linalg.norm(a, 2))[None])
    model = minimal_noise(G)
    assert model.ell[0] == 2
    assert model.constraint_residual()[0] < 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_minimal_noise_and_dilation_properties(seed):
    G = random_contraction(seed, omega=(0.0, 0.3, 1.1))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankToleranceWarning)
        model = minimal_noise(G)
    for k, g in enumerate(G.samples):
        assert int(model.ell[k]) == max(model.d_plus[k], model.d_minus[k])
        assert model.constraint_residual()[k] < 1e-9
        assert np.linalg.norm(ccr_deficit(g) - ccr_deficit(g).conj().T) < 1e-12
    dil = dilate(model)
    assert dil.residuals().max() < 1e-9
    assert np.array_equal(dil.G().samples, G.samples)
    assert dil.M_ext.samples.shape[1] == dil.M_ext.samples.shape[2]
    # the global-order view is a plain group element
    glob = dil.as_group_element()
    assert max(conjugate_symplectic_residual(x) for x in glob.samples) < 1e-9


def test_qqpp_permutation():
    perm = qqpp_permutation(1, 2)
    # blocks (q1 p1 | q2 q3 p2 p3) to (q1 q2 q3 p1 p2 p3)
    assert perm.tolist() == [0, 2, 3, 1, 4, 5]


def test_one_noise_mode_cannot_replace_two():
    from scipy.optimize import minimize

    from qlti.core import symplectic_form

    rng = np.random.default_rng(1)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    g = 0.5 * a / np.linalg.norm(a, 2)
    model = minimal_noise(MatrixFunction(FrequencyGrid([0.4]), g[None]))
    assert model.ell[0] == 2
    D = ccr_deficit(g)
    kept = np.abs(model.deficit_eigenvalues[0]).min()
    iJ = 1j * symplectic_form(1)

    def loss(x):
        N = (x[:8] + 1j * x[8:]).reshape(4, 2)
        return np.linalg.norm(N @ iJ @ N.conj().T - D, 2)

    best = min(minimize(loss, rng.standard_normal(16), method="BFGS").fun for _ in range(10))
    assert best >= kept / 2
