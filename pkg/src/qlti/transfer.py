"""Sample classical rational-plus-delay transfer functions onto a frequency grid.

Each scalar entry is ``num(s) / den(s) * exp(i w delay)`` with ``s = -i w`` and
real coefficients listed from the highest power down, so the one-pole lowpass
``1 / (1 + sT)`` reads ``{"num": [1], "den": [T, 1]}`` and equals
``1 / (1 - i w T)``. Real coefficients and delays give ``G[-w] = G[w]^*``.
"""

from __future__ import annotations

import numpy as np

from .core import FrequencyGrid, GuardError, MatrixFunction, ladder_map

__all__ = ["sample_entry", "sample_transfer_function", "cavity_transfer", "PRESETS"]

POLE_TOL = 1e-12


def _coeffs(values, what):
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{what} must be a non-empty list of real coefficients")
    return arr


def sample_entry(entry, omega: np.ndarray) -> np.ndarray:
    """Evaluate one entry (a number or ``{num, den, delay}``) at each ``omega``."""
    omega = np.asarray(omega, dtype=float)
    if isinstance(entry, (int, float)):
        return np.full(omega.shape, float(entry), dtype=complex)
    num = _coeffs(entry.get("num", [1.0]), "num")
    den = _coeffs(entry.get("den", [1.0]), "den")
    delay = float(entry.get("delay", 0.0))
    s = -1j * omega
    d = np.polyval(den, s)
    bad = np.flatnonzero(np.abs(d) <= POLE_TOL * np.max(np.abs(den)))
    if bad.size:
        raise GuardError(f"denominator vanishes at w = {omega[bad].tolist()}")
    return np.polyval(num, s) / d * np.exp(1j * omega * delay)


def cavity_transfer(grid: FrequencyGrid, R: float, phi0: float = 0.0, tau_rt: float = 1.0) -> MatrixFunction:
    """Quadrature transfer of the lossy cavity, ``P diag(F[w], F[-w]^*) P^dagger``."""
    from .apps import CavityLossModel, cavity_F

    model = CavityLossModel(R, phi0, tau_rt)
    P = ladder_map(1)
    return MatrixFunction.from_callable(
        grid,
        lambda w: P @ np.diag([cavity_F(model, w), np.conj(cavity_F(model, -w))]) @ P.conj().T,
        "transfer",
    )


def _oscillator(grid: FrequencyGrid, eta: float, tau: float = 1.0) -> MatrixFunction:
    from .apps import FeedbackOscillator, oscillator_transfer_function

    return oscillator_transfer_function(FeedbackOscillator(eta, tau), grid)


PRESETS = {"cavity": cavity_transfer, "oscillator": _oscillator}


def sample_transfer_function(spec: dict, grid: FrequencyGrid) -> MatrixFunction:
    """Build a :class:`MatrixFunction` from an entry table or a named preset.

    Parameters
    ----------
    spec : dict
        Either ``{"entries": [[entry, ...], ...]}`` (rows of entries) or
        ``{"preset": name, **params}`` with ``name`` in ``PRESETS``.
    grid : FrequencyGrid
    """
    if "preset" in spec:
        params = {k: v for k, v in spec.items() if k not in ("preset", "schema")}
        try:
            builder = PRESETS[spec["preset"]]
        except KeyError:
            raise ValueError(f"unknown preset {spec['preset']!r}") from None
        return builder(grid, **params)
    rows = spec["entries"]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("entries must be a non-empty rectangular table")
    w = grid.omega
    samples = np.zeros((len(w), len(rows), len(rows[0])), dtype=complex)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            samples[:, i, j] = sample_entry(entry, w)
    return MatrixFunction(grid, samples, "transfer")
