"""
Spectral bound for a feedback oscillator
========================================

An amplifier closed on itself through a beam splitter. With vacuum noise at
both inputs, the output spectra sit exactly on (|H_G|^2 + 1/2)^2.
"""

# %%
import numpy as np

from qlti.apps import FeedbackOscillator, oscillator_bound, oscillator_H, oscillator_open_bound, oscillator_transfer
from qlti.core import conjugate_symplectic_residual

osc = FeedbackOscillator(eta=0.5, tau=1.0)
for w in np.linspace(0.0, 3.0, 7):
    h0, hg, _, _ = oscillator_H(osc, w)
    bound, achieved = oscillator_bound(osc, w)
    res = conjugate_symplectic_residual(oscillator_transfer(osc, w))
    print(f"w={w:.1f}  |HG|^2={abs(hg)**2:8.3f}  bound={bound:10.4f}  achieved={achieved:10.4f}  group={res:.0e}")

# %%
# the open-system bound, treating both inputs as noise modes, gives the same number
rep = oscillator_open_bound(osc, 1.0)
print(rep.lhs, rep.rhs)
