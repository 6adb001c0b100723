"""
Quantizing a classical transfer function
========================================

A passive or amplifying filter G[w] does not preserve the commutators by
itself. The deficit iJ - G iJ G^dagger fixes how many noise modes must be
added, and the noise coupling N[w] can then be completed to a closed system.
"""

# %%
import numpy as np

from qlti.core import FrequencyGrid
from qlti.quantize import dilate, minimal_noise
from qlti.transfer import sample_transfer_function

# a 90 % beam-splitter port in front of a one-pole lowpass, on both quadratures
t = np.sqrt(0.9)
spec = {"entries": [[{"num": [t], "den": [0.5, 1.0]}, 0.0], [0.0, {"num": [t], "den": [0.5, 1.0]}]]}
grid = FrequencyGrid.linear(0.0, 4.0, 9)
G = sample_transfer_function(spec, grid)

model = minimal_noise(G)
print("noise modes per frequency:", model.ell)
print("CCR residual:", model.constraint_residual().max())

# %%
# the loss grows with frequency, and so does the noise coupling
gain = np.abs(G.samples[:, 0, 0]) ** 2
for w, g, gam in zip(grid.omega, gain, model.gamma):
    print(f"w={w:.1f}  |G|^2={g:.3f}  gamma={np.round(gam, 3)}")

# %%
# embed [G N] in a square element with one ancillary output mode
dil = dilate(model)
print("ancilla modes:", dil.n_anc, " group residual:", dil.residuals().max())
print("blocks kept exactly:", np.array_equal(dil.G().samples, G.samples))
