"""
Invariants of a spectral density matrix
=======================================

Every physical SDM is congruent to a normal form [[sigma, i Delta], [-i Delta, sigma]].
sigma is the symmetrized occupation plus 1/2 and Delta the sideband asymmetry.
"""

# %%
import numpy as np

from qlti.apps import two_mode_invariants, two_mode_sigma_delta
from qlti.core import FrequencyGrid, random_group_element
from qlti.sdm import (
    SpectralDensityMatrix,
    normal_form,
    occupations,
    single_mode_bound_check,
    transform_sdm,
    uncertainty_margin,
    williamson,
)

grid = FrequencyGrid([0.0, 0.5, 1.0])
M0 = random_group_element(2, seed=4, magnitude=0.8, grid=grid)
sigma, delta = np.array([1.1, 0.8]), np.array([0.4, -0.2])
S = SpectralDensityMatrix(grid, np.stack([
    m @ normal_form(sigma, delta * (w > 0)) @ m.conj().T for w, m in zip(grid.omega, M0.samples)
]))

form = williamson(S)
print("sigma:\n", np.round(form.sigma, 10))
print("Delta:\n", np.round(form.delta, 10))
print("occupations n[+w], n[-w] at w=1:", occupations(form, 1.0))

# %%
# the invariants do not change under any further group congruence
M = random_group_element(2, seed=9, grid=grid)
print(np.allclose(np.sort(williamson(transform_sdm(M, S)).sigma), np.sort(form.sigma)))

# %%
# the uncertainty relation with imaginary correlations is tighter than the real one
s = normal_form([1.0], [0.5])
print("margin:", uncertainty_margin(s), " (lhs, rhs):", single_mode_bound_check(s))

# %%
# the two-mode generator: squeezers, mixers and a cosine-sine block, one output kept
for r1, r2 in [(0.0, 1.0), (0.5, 0.2)]:
    out = two_mode_sigma_delta(r1, r2)
    print(r1, r2, out[0, 0].real, out[0, 1].imag, two_mode_invariants(r1, r2))
