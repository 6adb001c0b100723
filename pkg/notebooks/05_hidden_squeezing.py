"""
Squeezing hidden by frequency-dependent loss
============================================

Behind a detuned lossy cavity the two sidebands see different losses. The SDM
then keeps sub-vacuum noise in its complex eigenvalue while every homodyne
quadrature is above vacuum.
"""

# %%
import numpy as np

from qlti.apps import (
    CavityLossModel,
    cavity_F,
    hidden_squeezing_metrics,
    lambda_asymptotes,
    lossy_squeezer_sdm,
    r_lim,
)

Fp, Fm = np.sqrt(0.99), np.sqrt(0.3)
print("r_lim =", r_lim(Fp, Fm))
for r in (0.5, 1.0, 1.5, 2.5, 4.0):
    h = hidden_squeezing_metrics(lossy_squeezer_sdm(Fp, Fm, r))
    aC, aR = lambda_asymptotes(Fp, Fm, r)
    print(f"r={r:.1f}  Lambda_C={h.Lambda_C:.4f} ({aC:.4f})  Lambda_R={h.Lambda_R:.4f} ({aR:.4f})  hidden={h.hidden}")

# %%
# the same effect swept over frequency for a detuned cavity; squeezing is hidden
# wherever r = 3 exceeds the local r_lim (the lower sideband sits on resonance at w = 0.3)
cav = CavityLossModel(R=0.9, phi0=0.3, tau_rt=1.0)
for w in np.linspace(0.0, 0.6, 13):
    fp, fm = cavity_F(cav, w), cavity_F(cav, -w)
    h = hidden_squeezing_metrics(lossy_squeezer_sdm(fp, fm, 3.0))
    # with one sideband fully lost nothing is squeezed at all, so r_lim is undefined
    rl = r_lim(fp, fm) if abs(fm) > 1e-12 else float("nan")
    print(f"w={w:.2f}  |F+|^2={abs(fp)**2:.3f}  |F-|^2={abs(fm)**2:.3f}  r_lim={rl:.2f}  hidden={h.hidden}")
