"""
Frequency-dependent group elements and their optical circuits
=============================================================

A lossless quantum LTI system is a matrix function M[w] with
M J M^dagger = J at every frequency. Any such element factors into
interferometers, cosine-sine blocks and single-mode squeezers.
"""

# %%
import numpy as np

from qlti.core import FrequencyGrid, conjugate_symplectic_residual, group_inverse, random_group_element
from qlti.decompose import mesh_decompose, optical_decomposition

grid = FrequencyGrid.linear(0.0, 2.0, 5)
M = random_group_element(3, seed=1, magnitude=1.2, grid=grid)

# group membership and the closed-form inverse at each stored frequency
for w, m in zip(grid.omega, M.samples):
    inv_err = np.linalg.norm(group_inverse(m) @ m - np.eye(6))
    print(f"w={w:.2f}  residual={conjugate_symplectic_residual(m):.1e}  inverse={inv_err:.1e}")

# negative frequencies are never stored; they follow from M[-w] = M[w]^*
print(np.allclose(M.at(-1.0), M.at(1.0).conj()))

# %%
# seven-factor circuit: V1 CS W1 D W2 CS V2
circ = optical_decomposition(M)
print("reconstruction:", circ.residuals(M).max())
print("squeezing parameters r[w]:")
print(np.round(circ.r, 4))

# %%
# each interferometer can be programmed on a mesh of beam splitters
prog = mesh_decompose(circ.V1[2])
print(len(prog.elements), "mesh elements, replay error",
      np.abs(prog.to_matrix() - circ.V1[2]).max())
