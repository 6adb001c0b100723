"""Regenerate the bundled example inputs (deterministic, seed 2024)."""

from pathlib import Path

import numpy as np

from qlti.core import FrequencyGrid, MatrixFunction, random_group_element
from qlti.io import dump_json, matfn_to_doc
from qlti.sdm import SpectralDensityMatrix, normal_form

HERE = Path(__file__).parent
rng = np.random.default_rng(2024)
grid = FrequencyGrid.linear(0.0, 2.0, 9)

# 2x4 contraction: one output mode fed by two input modes, with a delay line
A0, A1 = rng.normal(size=(2, 2, 4))
scale = 0.6 / (np.linalg.norm(A0, 2) + np.linalg.norm(A1, 2))
G = MatrixFunction.from_callable(grid, lambda w: scale * (A0 + A1 * np.exp(1j * w)), "transfer")
dump_json(matfn_to_doc(G), HERE / "contraction.json")

# 90 % transmission beam splitter port followed by a one-pole lowpass
dump_json(
    {
        "schema": "qlti.transfer/1",
        "entries": [
            [{"num": [0.9486832980505138], "den": [0.5, 1.0]}, 0.0],
            [0.0, {"num": [0.9486832980505138], "den": [0.5, 1.0]}],
        ],
    },
    HERE / "lossy_lowpass.transfer.json",
)

# two-mode group element
M = random_group_element(2, seed=7, magnitude=0.8, grid=grid)
dump_json(matfn_to_doc(M), HERE / "group_element.json")

# two-mode physical SDM with sideband asymmetry away from w = 0
samples = []
for k, w in enumerate(grid.omega):
    Mk = M.samples[k]
    delta = np.array([0.3, -0.1]) * np.tanh(w)
    samples.append(Mk @ normal_form(np.array([0.9, 0.7]), delta) @ Mk.conj().T)
dump_json(matfn_to_doc(SpectralDensityMatrix(grid, np.stack(samples))), HERE / "two_mode_sdm.json")
