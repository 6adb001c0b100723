"""Symplectodyne detection: photocurrent spectra for arbitrary local oscillators and SDM tomography.

A local oscillator (LO) is described by the spectrum ``alpha[W]`` of its real
quadrature waveform ``(alpha_q(t), alpha_p(t))``. The photocurrent spectrum is

    S_II[w] * 2 pi delta[0] = int dW/2pi  alpha[W]^dagger S[w + W] alpha[W].

Delta-line LOs ``alpha[W] = 2 pi sum_k c_k delta(W - W_k)`` are handled exactly
and give ``S_II[w] = sum_k c_k^dagger S[w + W_k] c_k``. A sampled LO is
integrated with the trapezoidal rule and the integral itself is returned.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from .core import GridMismatchError, OffGridError
from .sdm import SpectralDensityMatrix

__all__ = [
    "InterpolationWarning",
    "Homodyne",
    "Heterodyne",
    "Synodyne",
    "LineOscillator",
    "SampledOscillator",
    "PhotocurrentSpectrum",
    "synodyne_quadratures",
    "photocurrent_spectrum",
    "homodyne_spectrum",
    "heterodyne_spectrum",
    "synodyne_Q",
    "reconstruct_sdm",
    "multimode_reconstruct",
    "PROBES",
]

PROBES = (
    (1.0, 0.0),
    (0.0, 1.0),
    (1 / np.sqrt(2), 1 / np.sqrt(2)),
    (1 / np.sqrt(2), -1j / np.sqrt(2)),
    (1 / np.sqrt(2), 1j / np.sqrt(2)),
)


class InterpolationWarning(UserWarning):
    """A spectrum was read between grid points."""


# ---------------------------------------------------------------------------
# local oscillators


@dataclass(frozen=True)
class LineOscillator:
    """Sum of spectral lines ``2 pi c_k delta(W - W_k)``; ``c_k`` has length ``2n``."""

    freqs: tuple
    weights: tuple

    def __post_init__(self):
        w = tuple(np.asarray(c, dtype=complex) for c in self.weights)
        if len(w) != len(self.freqs):
            raise ValueError("one weight vector per line is required")
        object.__setattr__(self, "freqs", tuple(float(f) for f in self.freqs))
        object.__setattr__(self, "weights", w)

    def lines(self) -> "LineOscillator":
        return self

    @classmethod
    def from_complex_tones(cls, tones: dict, norm: float = 2 * np.pi) -> "LineOscillator":
        """Single-mode LO from a complex amplitude ``alpha[W] = norm sum a_k delta(W - W_k)``.

        Each tone feeds both quadratures: ``alpha_q = (alpha + alpha^*)/2`` and
        ``alpha_p = i(alpha^* - alpha)/2``, so a tone at ``W_k`` also puts a
        conjugate line at ``-W_k``.
        """
        acc: dict[float, np.ndarray] = {}
        scale = norm / (2 * np.pi)
        for f, a in tones.items():
            a = complex(a)
            for freq, vec in ((f, np.array([a / 2, -1j * a / 2])), (-f, np.array([np.conj(a) / 2, 1j * np.conj(a) / 2]))):
                key = float(freq) + 0.0
                acc[key] = acc.get(key, 0) + scale * vec
        keys = sorted(acc)
        return cls(tuple(keys), tuple(acc[k] for k in keys))


@dataclass(frozen=True)
class Homodyne:
    """Constant LO ``amp (cos theta, sin theta)``."""

    theta: float
    amp: float = 1.0

    def lines(self) -> LineOscillator:
        return LineOscillator((0.0,), (self.amp * np.array([np.cos(self.theta), np.sin(self.theta)]),))


@dataclass(frozen=True)
class Heterodyne:
    """Single tone ``alpha[W] = 2 pi alpha0 delta(W - omega0)``."""

    omega0: float
    alpha0: complex

    def lines(self) -> LineOscillator:
        return LineOscillator.from_complex_tones({self.omega0: self.alpha0})


@dataclass(frozen=True)
class Synodyne:
    """Two tones ``sqrt(2) pi (alpha_plus delta(W - omega0) + alpha_minus delta(W + omega0))``."""

    omega0: float
    alpha_plus: complex
    alpha_minus: complex

    @property
    def alpha0(self) -> np.ndarray:
        return synodyne_quadratures(self.alpha_plus, self.alpha_minus)

    def lines(self) -> LineOscillator:
        a0 = self.alpha0
        return LineOscillator((-self.omega0, self.omega0), (a0.conj() / np.sqrt(2), a0 / np.sqrt(2)))


@dataclass(frozen=True)
class SampledOscillator:
    """LO spectrum sampled on a uniform signed frequency grid ``W`` (values ``(K, 2n)``)."""

    W: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if W.ndim != 1 or v.shape[0] != W.size:
            raise ValueError("one LO sample per frequency is required")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "values", v)


def synodyne_quadratures(alpha_plus: complex, alpha_minus: complex) -> np.ndarray:
    """``(alpha_q0, alpha_p0) = ((a+ + a-^*)/2, i(a-^* - a+)/2)``."""
    ap, am = complex(alpha_plus), complex(alpha_minus)
    return np.array([(ap + np.conj(am)) / 2, 1j * (np.conj(am) - ap) / 2])


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class PhotocurrentSpectrum:
    omega: np.ndarray
    values: np.ndarray
    interpolated: list = field(default_factory=list)


def _read(S: SpectralDensityMatrix, omega: float, notes: list | None = None) -> np.ndarray:
    try:
        return S.at(omega)
    except OffGridError:
        if notes is not None:
            notes.append(omega)
        return S.as_matrix_function().interp(omega)


def _real(value: complex, scale: float) -> float:
    if abs(value.imag) > 1e-12 * max(1.0, scale):
        raise ArithmeticError(f"photocurrent spectrum has imaginary part {value.imag:.3e}")
    return float(value.real)


def _lines_at(S, lo: LineOscillator, omega: float, notes: list) -> float:
    total = 0j
    scale = 0.0
    for f, c in zip(lo.freqs, lo.weights):
        s = _read(S, omega + f, notes)
        if c.size != s.shape[0]:
            raise ValueError(f"LO has {c.size} quadratures, SDM has {s.shape[0]}")
        total += c.conj() @ s @ c
        scale += np.linalg.norm(c) ** 2 * np.linalg.norm(s)
    return _real(total, scale)


def _sampled_at(S, lo: SampledOscillator, omega: float) -> float:
    vals = []
    for W, c in zip(lo.W, lo.values):
        try:
            s = S.at(omega + W)
        except OffGridError as exc:
            raise GridMismatchError(
                f"LO grid is not commensurate with the SDM grid at w + W = {omega + W:.17g}"
            ) from exc
        vals.append(c.conj() @ s @ c)
    out = scipy.integrate.trapezoid(np.array(vals), lo.W) / (2 * np.pi)
    return _real(out, float(np.max(np.abs(vals), initial=0.0)) * (lo.W[-1] - lo.W[0]))


def photocurrent_spectrum(S: SpectralDensityMatrix, lo, omega=None) -> PhotocurrentSpectrum:
    """Photocurrent spectrum at each (signed) ``omega``; defaults to the SDM grid.

    Line oscillators are evaluated exactly; frequencies ``w + W_k`` that miss the
    grid are interpolated linearly with an :class:`InterpolationWarning`. A
    sampled oscillator must land on grid points, otherwise
    :class:`GridMismatchError` is raised.
    """
    omegas = S.grid.omega if omega is None else np.atleast_1d(np.asarray(omega, dtype=float))
    notes: list = []
    if isinstance(lo, SampledOscillator):
        values = [_sampled_at(S, lo, w) for w in omegas]
    else:
        lines = lo.lines()
        values = [_lines_at(S, lines, w, notes) for w in omegas]
    if notes:
        warnings.warn(
            f"interpolated the SDM at {len(notes)} off-grid frequencies", InterpolationWarning, stacklevel=2
        )
    return PhotocurrentSpectrum(np.asarray(omegas), np.array(values), notes)


def _mode_block(s: np.ndarray, mode: int) -> np.ndarray:
    n = s.shape[0] // 2
    return s[np.ix_([mode, n + mode], [mode, n + mode])]


def homodyne_spectrum(S, theta: float, amp: float, omega: float, mode: int = 0) -> float:
    """``alpha0^T Re(S[w]) alpha0`` with ``alpha0 = amp (cos theta, sin theta)``."""
    s = S.at(omega) if isinstance(S, SpectralDensityMatrix) else np.asarray(S, dtype=complex)
    s = _mode_block(s, mode)
    a = amp * np.array([np.cos(theta), np.sin(theta)])
    return float(a @ s.real @ a)


def heterodyne_spectrum(S: SpectralDensityMatrix, omega0: float, alpha0: complex, omega: float, mode: int = 0) -> float:
    """Heterodyne spectrum from the sidebands ``omega0 +/- omega`` of one mode."""
    notes: list = []
    sp = _mode_block(_read(S, omega0 + omega, notes), mode)
    sm = _mode_block(_read(S, omega0 - omega, notes), mode)
    if notes:
        warnings.warn(f"interpolated the SDM at {notes}", InterpolationWarning, stacklevel=2)
    total = sp[0, 0] + sm[0, 0] + sp[1, 1] + sm[1, 1] + 2 * (sp[0, 1] + sm[0, 1]).imag
    return float(abs(alpha0) ** 2 / 4 * total.real)


def synodyne_Q(S, omega0: float, alpha_q0: complex, alpha_p0: complex) -> float:
    """Hermitian form ``alpha0^dagger S[omega0] alpha0`` for a single mode."""
    s = S.at(omega0) if isinstance(S, SpectralDensityMatrix) else np.asarray(S, dtype=complex)
    a = np.array([alpha_q0, alpha_p0], dtype=complex)
    return _real(a.conj() @ s @ a, np.linalg.norm(s) * np.vdot(a, a).real)


# ---------------------------------------------------------------------------
# tomography


def reconstruct_sdm(oracle, amplitude: float = 1.0) -> np.ndarray:
    """Single-mode SDM from five synodyne probes.

    ``oracle(alpha_q0, alpha_p0)`` returns the measured ``Q``. With probes
    scaled by ``amplitude``::

        S_qq = Q(1, 0)                 S_pp = Q(0, 1)
        Re S_qp = Q(1, 1)/sqrt2 - (S_qq + S_pp)/2
        Im S_qp = (Q(1, -i)/sqrt2 - Q(1, i)/sqrt2) / 2
    """
    if amplitude == 0:
        raise ValueError("zero-amplitude probe")
    norm = abs(amplitude) ** 2
    q = [oracle(amplitude * a, amplitude * b) / norm for a, b in PROBES]
    sqq, spp = q[0], q[1]
    re = q[2] - (sqq + spp) / 2
    im = (q[3] - q[4]) / 2
    sqp = re + 1j * im
    return np.array([[sqq, sqp], [np.conj(sqp), spp]])


def multimode_reconstruct(S: SpectralDensityMatrix, omega0: float, oracle=None) -> np.ndarray:
    """Full ``2n x 2n`` SDM at ``omega0`` from per-mode synodyne photocurrents.

    ``oracle(alpha)`` gives the spectrum of the summed photocurrent for an
    ``n``-mode probe ``alpha``; by default it is evaluated from ``S``. Diagonal
    blocks come from :func:`reconstruct_sdm`. For quadratures ``a`` and ``b``
    of different modes, probing ``e_a + c e_b`` with ``c`` in ``{1, -1, -i, i}``
    gives ``Q(1) - Q(-1) = 4 Re S_ab`` and ``Q(-i) - Q(i) = 4 Im S_ab``.
    """
    s0 = S.at(omega0)
    dim = s0.shape[0]
    n = dim // 2
    if oracle is None:
        def oracle(alpha):
            return _real(alpha.conj() @ s0 @ alpha, np.linalg.norm(s0) * np.vdot(alpha, alpha).real)

    out = np.zeros((dim, dim), dtype=complex)
    for j in range(n):
        idx = [j, n + j]

        def single(aq, ap, idx=idx):
            a = np.zeros(dim, dtype=complex)
            a[idx[0]], a[idx[1]] = aq, ap
            return oracle(a)

        out[np.ix_(idx, idx)] = reconstruct_sdm(single)

    def probe(a, b, c):
        v = np.zeros(dim, dtype=complex)
        v[a] = 1.0
        v[b] = c
        return oracle(v)

    for j in range(n):
        for k in range(j + 1, n):
            for a in (j, n + j):
                for b in (k, n + k):
                    re = (probe(a, b, 1) - probe(a, b, -1)) / 4
                    im = (probe(a, b, -1j) - probe(a, b, 1j)) / 4
                    out[a, b] = re + 1j * im
                    out[b, a] = re - 1j * im
    return out
