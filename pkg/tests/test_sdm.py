import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_physical_sdm
from qlti.apps import two_mode_invariants, two_mode_sigma_delta
from qlti.core import FrequencyGrid, MatrixFunction, NumericalError, conjugate_symplectic_residual, random_group_element
from qlti.decompose import squeezer
from qlti.sdm import (
    SpectralDensityMatrix,
    normal_form,
    occupations,
    open_system_bound,
    sdm_from_ladder,
    sdm_to_ladder,
    single_mode_bound_check,
    thermal_sdm,
    transform_sdm,
    uncertainty_margin,
    vacuum_sdm,
    williamson,
)

G1 = FrequencyGrid([0.0, 1.0])


def test_validation():
    with pytest.raises(ValueError):
        SpectralDensityMatrix.constant(G1, np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        SpectralDensityMatrix.constant(G1, -np.eye(2))


def test_margins_examples():
    assert uncertainty_margin(vacuum_sdm(1, G1), 0.0) == pytest.approx(0, abs=1e-15)
    assert uncertainty_margin(thermal_sdm([0.5], G1), 1.0) == pytest.approx(0.5)
    S = SpectralDensityMatrix.constant(G1, np.eye(2) / 4)
    assert uncertainty_margin(S, 0.0) < 0 and not S.is_physical()


def test_squeezer_on_vacuum():
    r = 0.7
    M = MatrixFunction.constant(G1, squeezer([r]))
    S = transform_sdm(M, vacuum_sdm(1, G1))
    assert np.allclose(S.samples[1], np.diag([np.exp(2 * r), np.exp(-2 * r)]) / 2)


def test_open_system_congruence_structure():
    G = np.sqrt(0.6) * np.eye(2)
    N = np.sqrt(0.4) * np.eye(2)
    MN = MatrixFunction.constant(G1, np.hstack([G, N]))
    S_in = SpectralDensityMatrix.constant(G1, np.diag([2.0, 0.3, 0.5, 0.5]))
    out = transform_sdm(MN, S_in).samples[0]
    assert np.allclose(out, G @ np.diag([2.0, 0.3]) @ G.T + N @ N.T / 2)


def test_single_mode_bound_examples():
    assert single_mode_bound_check(np.eye(2) / 2) == pytest.approx((0.25, 0.25))
    assert single_mode_bound_check(normal_form([1.0], [0.5])) == pytest.approx((0.75, 0.75))
    with pytest.raises(ValueError):
        single_mode_bound_check(np.eye(4) / 2)


def test_williamson_vacuum_and_occupations():
    form = williamson(vacuum_sdm(2, G1))
    assert np.allclose(form.sigma, 0.5) and np.allclose(form.delta, 0)
    S = SpectralDensityMatrix.constant(FrequencyGrid([1.0]), normal_form([1.0], [0.5]))
    assert np.allclose(occupations(williamson(S), 1.0), ([1.0], [0.0]))
    assert np.allclose(occupations(williamson(S), -1.0), ([0.0], [1.0]))
    th = williamson(thermal_sdm([1.0], G1))
    assert np.allclose(occupations(th, 1.0), ([1.0], [1.0]))


def test_williamson_rejects_singular_without_eps():
    S = SpectralDensityMatrix.constant(FrequencyGrid([1.0]), np.diag([1.0, 0.0]))
    with pytest.raises((NumericalError, ValueError)):
        williamson(S)
    form = williamson(S, eps=1e-6)
    assert np.all(np.isfinite(form.sigma))


def test_williamson_zero_frequency_is_classical():
    S = random_physical_sdm(2, seed=3, omega=(0.0,))
    form = williamson(S)
    assert np.allclose(form.delta, 0, atol=1e-12)
    assert np.isrealobj(form.M.samples) or np.abs(form.M.samples.imag).max() == 0
    # classical Williamson: symplectic eigenvalues of the real covariance
    V = S.samples[0].real
    J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    nu = np.sort(np.abs(np.linalg.eigvals(1j * J @ V)))[::2]
    assert np.allclose(np.sort(form.sigma[0]), nu)


def test_two_mode_generator_williamson():
    s = two_mode_sigma_delta(0.0, 1.0)
    sig, dlt = two_mode_invariants(0.0, 1.0)
    form = williamson(SpectralDensityMatrix(FrequencyGrid([1.0]), s[None]))
    assert form.sigma[0, 0] == pytest.approx(sig, abs=1e-10)
    assert form.delta[0, 0] == pytest.approx(dlt, abs=1e-10)
    assert dlt == pytest.approx(np.sinh(1.0) ** 2 / 2)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 3), seed=st.integers(0, 100_000))
def test_williamson_properties(n, seed):
    S = random_physical_sdm(n, seed=seed, omega=(0.0, 0.4, 1.2))
    form = williamson(S)
    for k in range(3):
        assert np.allclose(form.reconstruct(k), S.samples[k], atol=1e-8 * np.linalg.norm(S.samples[k]))
        assert conjugate_symplectic_residual(form.M.samples[k]) < 1e-8 * np.linalg.norm(form.M.samples[k]) ** 2
    assert np.all(form.sigma >= 0.5 + np.abs(form.delta) - 1e-10)
    sig, dlt = form.invariants(-0.4)
    assert np.allclose(sig, form.sigma[1]) and np.allclose(dlt, -form.delta[1])
    M = random_group_element(n, seed=seed + 1, grid=S.grid)
    assert transform_sdm(M, S).is_physical()


def test_ladder_map_examples():
    Sa = sdm_to_ladder(normal_form([1.3], [0.4]))
    assert np.allclose(Sa, np.diag([0.9, 1.7]))
    s = random_physical_sdm(2, seed=1).samples[0]
    assert np.allclose(sdm_from_ladder(sdm_to_ladder(s)), s, atol=1e-12)


def test_open_system_bound_examples():
    rep = open_system_bound(np.eye(2), np.zeros((2, 0)), np.eye(2) / 2)
    assert np.allclose(rep.lhs, 0.5) and np.allclose(rep.rhs, 0.5)
    with pytest.raises(ValueError):
        open_system_bound(np.eye(2), np.zeros((4, 2)), np.eye(2) / 2)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_open_system_bound_holds(seed):
    from conftest import random_contraction
    from qlti.quantize import minimal_noise

    model = minimal_noise(random_contraction(seed))
    S_in = random_physical_sdm(2, seed=seed)
    rep = open_system_bound(model.G, model.N, S_in, 0.7)
    assert np.all(rep.lhs >= rep.rhs - 1e-10)
    assert np.all(rep.rhs >= rep.rhs_noise_only - 1e-12)
