"""Worked systems: hidden squeezing behind a lossy cavity, the two-mode
sideband-asymmetry generator, and the quantum feedback oscillator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import FrequencyGrid, GuardError, MatrixFunction, ladder_map
from .decompose import cs_block, interferometer, squeezer
from .sdm import open_system_bound, transform_sdm, vacuum_sdm

__all__ = [
    "CavityLossModel",
    "cavity_F",
    "cavity_F_magnitude_sq",
    "lossy_squeezer_sdm",
    "lossy_channel",
    "HiddenSqueezing",
    "hidden_squeezing_metrics",
    "lambda_asymptotes",
    "r_lim",
    "two_mode_circuit",
    "two_mode_sigma_delta",
    "two_mode_invariants",
    "FeedbackOscillator",
    "oscillator_H",
    "oscillator_transfer",
    "oscillator_inverse",
    "oscillator_noise_blocks",
    "oscillator_bound",
    "oscillator_open_bound",
    "oscillator_transfer_function",
]

POLE_GUARD = 1e-6


# ---------------------------------------------------------------------------
# lossy cavity and complex squeezing


@dataclass(frozen=True)
class CavityLossModel:
    """Detuned cavity with mirror power reflectivity ``R`` and single-trip time ``tau_rt``."""

    R: float
    phi0: float = 0.0
    tau_rt: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.R < 1.0:
            raise ValueError(f"R must lie in (0, 1), got {self.R}")

    def phase(self, omega):
        return np.asarray(omega, dtype=float) * self.tau_rt + self.phi0


def cavity_F(model: CavityLossModel, omega):
    """Amplitude response ``sqrt(R)(1 - e^{2i phi}) / (1 - R e^{2i phi})`` at signed ``omega``."""
    e = np.exp(2j * model.phase(omega))
    return np.sqrt(model.R) * (1 - e) / (1 - model.R * e)


def cavity_F_magnitude_sq(model: CavityLossModel, omega):
    s2 = np.sin(model.phase(omega)) ** 2
    return 4 * model.R * s2 / ((1 - model.R) ** 2 + 4 * model.R * s2)


def _split_F(F):
    F = complex(F)
    if abs(F) > 1 + 1e-12:
        raise ValueError(f"|F| = {abs(F):.6g} exceeds 1")
    return F


def lossy_squeezer_sdm(F_plus, F_minus, r: float) -> np.ndarray:
    """Output SDM of a ``diag(e^{2r}, e^{-2r})/2`` squeezed input behind the loss ``F``.

    ``F_plus`` and ``F_minus`` are the complex responses ``F[w]`` and ``F[-w]``;
    real inputs give ``theta_D = 0``.
    """
    Fp, Fm = _split_F(F_plus), _split_F(F_minus)
    a, b = abs(Fp), abs(Fm)
    theta = np.angle(Fp * Fm) / 2 if a * b > 0 else 0.0
    sh2, s2r = np.sinh(r) ** 2, np.sinh(2 * r)
    diag = 1 + (a**2 + b**2) * sh2
    c = a * b * np.cos(2 * theta) * s2r
    off = a * b * np.sin(2 * theta) * s2r + 1j * (a**2 - b**2) * sh2
    return 0.5 * np.array([[diag + c, off], [np.conj(off), diag - c]])


def lossy_channel(F_plus, F_minus) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature ``(G, N)`` of ``a_out = F a_in`` plus its minimal loss port."""
    P = ladder_map(1)
    G = P @ np.diag([complex(F_plus), np.conj(complex(F_minus))]) @ P.conj().T
    Lp = np.sqrt(max(0.0, 1 - abs(F_plus) ** 2))
    Lm = np.sqrt(max(0.0, 1 - abs(F_minus) ** 2))
    N = P @ np.diag([Lp, Lm]) @ P.conj().T
    return G, N


class HiddenSqueezing(NamedTuple):
    Lambda_C: float
    Lambda_R: float
    hidden: bool


def hidden_squeezing_metrics(sample) -> HiddenSqueezing:
    """Smallest eigenvalues of ``S`` and ``Re S``, and the hidden-squeezing verdict."""
    s = np.asarray(sample, dtype=complex)
    lc = float(np.linalg.eigvalsh((s + s.conj().T) / 2)[0])
    lr = float(np.linalg.eigvalsh(s.real)[0])
    return HiddenSqueezing(lc, lr, bool(lc < 0.5 <= lr))


def lambda_asymptotes(F_plus: float, F_minus: float, r: float) -> tuple[float, float]:
    """Large-``r`` limits of ``(Lambda_C, Lambda_R)``."""
    a, b = abs(F_plus), abs(F_minus)
    eta_c = 2 / (a**-2 + b**-2)
    return 0.5 * ((1 - eta_c) + eta_c * np.exp(-2 * r)), (a - b) ** 2 * np.exp(2 * r) / 8


def r_lim(F_plus: float, F_minus: float) -> float:
    """Squeezing level above which homodyne sees no squeezing; ``inf`` when ``|F+| = |F-|``."""
    a, b = abs(F_plus), abs(F_minus)
    if a <= 0 or b <= 0:
        raise ValueError("sideband responses must be non-zero")
    x = 2 * a * b / (a**2 + b**2)
    if x >= 1 - 1e-15:
        return float("inf")
    return float(np.arctanh(x))


# ---------------------------------------------------------------------------
# two-mode sideband-asymmetry generator


def _mixer(alpha: float, beta: float) -> np.ndarray:
    return np.array(
        [
            [np.cos(alpha), -np.exp(1j * beta) * np.sin(alpha)],
            [np.exp(-1j * beta) * np.sin(alpha), np.cos(alpha)],
        ]
    )


def two_mode_circuit(
    r1: float,
    r2: float,
    alpha=(np.pi / 4, np.pi / 4),
    beta=(np.pi / 2, 0.0),
    theta=(np.pi / 2, 0.0),
) -> np.ndarray:
    """``diag(W2,W2) CS(theta) diag(W1,W1) diag(e^r, e^-r)`` on two modes (qqpp order)."""
    W1 = _mixer(alpha[0], beta[0])
    W2 = _mixer(alpha[1], beta[1])
    return interferometer(W2) @ cs_block(theta) @ interferometer(W1) @ squeezer([r1, r2])


def two_mode_sigma_delta(r1: float, r2: float, **kw) -> np.ndarray:
    """Second-mode SDM of :func:`two_mode_circuit` acting on vacuum."""
    M = two_mode_circuit(r1, r2, **kw)
    S = M @ M.conj().T / 2
    return S[np.ix_([1, 3], [1, 3])]


def two_mode_invariants(r1: float, r2: float) -> tuple[float, float]:
    """Closed-form ``(Sigma, Delta)`` of :func:`two_mode_sigma_delta`."""
    return (np.cosh(2 * r1) + np.cosh(2 * r2)) / 4, (np.sinh(r2) ** 2 - np.sinh(r1) ** 2) / 2


# ---------------------------------------------------------------------------
# feedback oscillator


@dataclass(frozen=True)
class FeedbackOscillator:
    """Amplifier of gain ``1/sqrt(eta)`` closed by a beam splitter of reflectivity ``eta``."""

    eta: float
    tau: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")

    @property
    def gain(self) -> float:
        return 1 / np.sqrt(self.eta)


def oscillator_H(osc: FeedbackOscillator, omega: float) -> tuple[complex, complex, complex, complex]:
    """``(H0, HG, HA, e^{i w tau})``; raises :class:`GuardError` near a pole."""
    e = np.exp(1j * omega * osc.tau)
    den = 1 + e
    if abs(den) <= POLE_GUARD:
        raise GuardError(f"w*tau = {omega * osc.tau:.12g} is within {POLE_GUARD} of a pole")
    s = np.sqrt(osc.eta)
    return (s + e / s) / den, (1 / s - s) / den, (1 / s + s * e) / den, e


def oscillator_transfer(osc: FeedbackOscillator, omega: float) -> np.ndarray:
    """Map ``(q0, qG, p0, pG) -> (q_out, q_anc, p_out, p_anc)``."""
    h0, hg, ha, e = oscillator_H(osc, omega)
    return np.array(
        [
            [h0, hg, 0, 0],
            [e * hg, ha, 0, 0],
            [0, 0, h0, -hg],
            [0, 0, -e * hg, ha],
        ]
    )


def oscillator_inverse(osc: FeedbackOscillator, omega: float) -> np.ndarray:
    h0, hg, ha, e = oscillator_H(osc, omega)
    return np.array(
        [
            [ha, -hg, 0, 0],
            [-e * hg, h0, 0, 0],
            [0, 0, ha, hg],
            [0, 0, e * hg, h0],
        ]
    )


def oscillator_transfer_function(osc: FeedbackOscillator, grid: FrequencyGrid) -> MatrixFunction:
    return MatrixFunction.from_callable(grid, lambda w: oscillator_transfer(osc, w), "oscillator")


def oscillator_noise_blocks(osc: FeedbackOscillator, omega: float) -> tuple[np.ndarray, np.ndarray]:
    """Output-mode blocks ``(N_out0, N_outG)`` acting on the beam-splitter and amplifier noise."""
    M = oscillator_transfer(osc, omega)
    return M[np.ix_([0, 2], [0, 2])], M[np.ix_([0, 2], [1, 3])]


def oscillator_bound(osc: FeedbackOscillator, omega: float) -> tuple[float, float]:
    """``((|HG|^2 + 1/2)^2, S_qq S_pp)`` at the output for vacuum inputs."""
    _, hg, _, _ = oscillator_H(osc, omega)
    bound = (abs(hg) ** 2 + 0.5) ** 2
    grid = FrequencyGrid(np.array([abs(omega)]))
    out_rows = MatrixFunction(grid, oscillator_transfer(osc, abs(omega))[[0, 2]])
    s = transform_sdm(out_rows, vacuum_sdm(2, grid)).samples[0]
    return float(bound), float((s[0, 0] * s[1, 1]).real)


def oscillator_open_bound(osc: FeedbackOscillator, omega: float):
    """Open-system bound on the output with both noise inputs treated as noise modes."""
    M = oscillator_transfer(osc, omega)
    N = M[[0, 2]]
    return open_system_bound(np.zeros((2, 0)), N, np.zeros((0, 0)))
