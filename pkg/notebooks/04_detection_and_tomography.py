"""
Balanced detection with arbitrary local oscillators
===================================================

Homodyne detection only sees Re S. Two-tone (synodyne) detection reads the full
Hermitian form alpha^dagger S alpha, which is enough to reconstruct S.
"""

# %%
import numpy as np

from qlti.apps import lossy_squeezer_sdm
from qlti.core import FrequencyGrid
from qlti.detect import (
    Heterodyne,
    Homodyne,
    Synodyne,
    homodyne_spectrum,
    photocurrent_spectrum,
    reconstruct_sdm,
    synodyne_Q,
)
from qlti.sdm import SpectralDensityMatrix

# a squeezed state seen through unequal sideband losses, flat over a band
s = lossy_squeezer_sdm(np.sqrt(0.99), np.sqrt(0.3), 1.0)
S = SpectralDensityMatrix.constant(FrequencyGrid.linear(0.5, 1.5, 11), s)
print(np.round(s, 4))

# %%
thetas = np.linspace(0, np.pi, 7)
print("homodyne:", np.round([homodyne_spectrum(S, th, 1.0, 1.0) for th in thetas], 4))
print("heterodyne at w=0:", photocurrent_spectrum(S, Heterodyne(1.0, 1.0), omega=[0.0]).values)

# %%
# five synodyne probes recover the full matrix, including Im S_qp
rec = reconstruct_sdm(lambda aq, ap: synodyne_Q(S, 1.0, aq, ap))
print("reconstruction error:", np.abs(rec - s).max())

# the same numbers from the two-tone photocurrent itself
lo = Synodyne(1.0, 1.0, 0.0)
print(photocurrent_spectrum(S, lo, omega=[0.0]).values[0], synodyne_Q(S, 1.0, *lo.alpha0))
