"""Spectral density matrices, their invariant (Williamson-type) form and uncertainty bounds.

An SDM sample ``S[w]`` is the symmetrized cross-spectrum of the quadratures,
a Hermitian positive semi-definite ``2n x 2n`` matrix with ``S[-w] = S[w]^*``.
A state is physical when ``S + iJ/2`` is positive semi-definite; vacuum is
``1/2`` times the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    FrequencyGrid,
    GridMismatchError,
    MatrixFunction,
    NumericalError,
    REALNESS_TOL,
    ladder_map,
    symplectic_form,
)
from ._parallel import frequency_map

__all__ = [
    "SpectralDensityMatrix",
    "WilliamsonForm",
    "BoundReport",
    "vacuum_sdm",
    "thermal_sdm",
    "transform_sdm",
    "uncertainty_margin",
    "single_mode_bound_check",
    "williamson",
    "normal_form",
    "occupations",
    "open_system_bound",
    "sdm_to_ladder",
    "sdm_from_ladder",
]

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class SpectralDensityMatrix:
    """Per-frequency Hermitian PSD quadrature spectra on non-negative frequencies."""

    grid: FrequencyGrid
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        if s.ndim == 2:
            s = s[None]
        if s.ndim != 3 or s.shape[1] != s.shape[2] or s.shape[1] % 2:
            raise ValueError(f"SDM samples must be (K, 2n, 2n), got {s.shape}")
        if s.shape[0] != len(self.grid):
            raise GridMismatchError(f"{s.shape[0]} samples for {len(self.grid)} frequencies")
        scale = max(1.0, float(np.max(np.abs(s), initial=0.0)))
        herm = np.max(np.abs(s - np.conj(np.swapaxes(s, 1, 2))), initial=0.0)
        if herm > HERMITIAN_TOL * scale:
            raise ValueError(f"SDM samples are not Hermitian (deviation {herm:.3e})")
        s = (s + np.conj(np.swapaxes(s, 1, 2))) / 2
        if self.grid.omega[0] == 0.0:
            if np.max(np.abs(s[0].imag), initial=0.0) > REALNESS_TOL * scale:
                raise ValueError("SDM sample at w=0 must be real")
            s[0] = s[0].real
        low = min(np.linalg.eigvalsh(x)[0] for x in s)
        if low < -PSD_TOL * scale:
            raise ValueError(f"SDM is not positive semi-definite (min eigenvalue {low:.3e})")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def constant(cls, grid: FrequencyGrid, matrix) -> "SpectralDensityMatrix":
        m = np.asarray(matrix, dtype=complex)
        return cls(grid, np.broadcast_to(m, (len(grid),) + m.shape))

    @classmethod
    def from_matrix_function(cls, F: MatrixFunction) -> "SpectralDensityMatrix":
        return cls(F.grid, F.samples)

    def as_matrix_function(self) -> MatrixFunction:
        return MatrixFunction(self.grid, self.samples, "sdm")

    @property
    def n(self) -> int:
        return self.samples.shape[1] // 2

    def at(self, omega: float) -> np.ndarray:
        idx, conj = self.grid.locate(omega)
        s = self.samples[idx]
        return s.conj() if conj else s

    def margins(self) -> np.ndarray:
        """Uncertainty margin at each stored frequency."""
        return np.array([_margin(s) for s in self.samples])

    def is_physical(self, tol: float = 1e-10) -> bool:
        return bool(np.all(self.margins() >= -tol))


def vacuum_sdm(n: int, grid: FrequencyGrid) -> SpectralDensityMatrix:
    return SpectralDensityMatrix.constant(grid, np.eye(2 * n) / 2)


def thermal_sdm(occupation, grid: FrequencyGrid) -> SpectralDensityMatrix:
    """``(n_j + 1/2)`` on both quadratures of each mode."""
    occ = np.atleast_1d(np.asarray(occupation, dtype=float))
    return SpectralDensityMatrix.constant(grid, np.diag(np.concatenate([occ, occ]) + 0.5))


def _sample(S, omega):
    if isinstance(S, SpectralDensityMatrix):
        if omega is None:
            raise ValueError("omega is required for a SpectralDensityMatrix")
        return S.at(omega)
    return np.asarray(S, dtype=complex)


def transform_sdm(M: MatrixFunction, S: SpectralDensityMatrix) -> SpectralDensityMatrix:
    """``M S M^dagger`` at every frequency; ``M`` may be rectangular."""
    if M.grid != S.grid:
        raise GridMismatchError("transfer matrix and SDM live on different grids")
    if M.cols != S.samples.shape[1]:
        raise ValueError(f"shape mismatch: M has {M.cols} columns, SDM is {S.samples.shape[1]}")
    out = M.samples @ S.samples @ np.conj(np.swapaxes(M.samples, 1, 2))
    return SpectralDensityMatrix(S.grid, (out + np.conj(np.swapaxes(out, 1, 2))) / 2)


def _margin(s: np.ndarray) -> float:
    n = s.shape[0] // 2
    h = s + 0.5j * symplectic_form(n)
    return float(np.linalg.eigvalsh((h + h.conj().T) / 2)[0])


def uncertainty_margin(S, omega: float | None = None) -> float:
    """Smallest eigenvalue of ``S[w] + iJ/2``; non-negative for physical spectra."""
    return _margin(_sample(S, omega))


def single_mode_bound_check(S, omega: float | None = None) -> tuple[float, float]:
    """``(S_qq S_pp - |S_qp|^2, 1/4 + |Im S_qp|)`` for a single mode."""
    s = _sample(S, omega)
    if s.shape != (2, 2):
        raise ValueError("single_mode_bound_check needs a single-mode SDM")
    lhs = float((s[0, 0] * s[1, 1]).real - abs(s[0, 1]) ** 2)
    return lhs, 0.25 + abs(s[0, 1].imag)


# ---------------------------------------------------------------------------
# Williamson-type reduction


def normal_form(sigma, delta) -> np.ndarray:
    """``[[sigma, i Delta], [-i Delta, sigma]]`` with diagonal blocks."""
    s = np.diag(np.asarray(sigma, dtype=float))
    d = np.diag(np.asarray(delta, dtype=float))
    return np.block([[s, 1j * d], [-1j * d, s]])


@dataclass(frozen=True)
class WilliamsonForm:
    """``S[w] = M[w] normal_form(sigma[w], delta[w]) M[w]^dagger``.

    ``sigma`` is even in frequency and ``delta`` odd; ``mu`` holds the
    eigenvalues of ``iJS`` as ``(mu_+ descending, paired mu_-)``.
    """

    M: MatrixFunction
    sigma: np.ndarray
    delta: np.ndarray
    mu: np.ndarray

    @property
    def grid(self) -> FrequencyGrid:
        return self.M.grid

    @property
    def n(self) -> int:
        return self.sigma.shape[1]

    def invariants(self, omega: float) -> tuple[np.ndarray, np.ndarray]:
        """``(sigma, delta)`` at a signed on-grid frequency."""
        idx, conj = self.grid.locate(omega)
        return self.sigma[idx], (-self.delta[idx] if conj else self.delta[idx])

    def reconstruct(self, k: int) -> np.ndarray:
        m = self.M.samples[k]
        return m @ normal_form(self.sigma[k], self.delta[k]) @ m.conj().T


def _gauge(v):
    k = int(np.argmax(np.abs(v).round(12)))
    return v * (abs(v[k]) / v[k])


def _williamson_one(s: np.ndarray, eps: float):
    n = s.shape[0] // 2
    J = symplectic_form(n)
    s = s + eps * np.eye(2 * n)
    lam, q = np.linalg.eigh(s)
    if lam[0] < SINGULAR_TOL * max(1.0, lam[-1]):
        raise NumericalError(f"SDM is (near) singular, min eigenvalue {lam[0]:.3e}")
    root = (q * np.sqrt(lam)) @ q.conj().T
    iroot = (q / np.sqrt(lam)) @ q.conj().T
    K = root @ (1j * J) @ root
    mu, w = np.linalg.eigh((K + K.conj().T) / 2)
    pos = np.argsort(-mu)[:n]  # descending
    neg = np.argsort(mu)[:n]  # most negative first
    if not (np.all(mu[pos] > 0) and np.all(mu[neg] < 0)):
        raise NumericalError("iJS does not split into n positive and n negative eigenvalues")
    # y = S^{-1/2} w sqrt|mu| gives y^dagger iJ y = sign(mu); orthogonality is automatic
    y_plus = np.stack([iroot @ _gauge(w[:, j]) * np.sqrt(mu[j]) for j in pos], axis=1)
    if np.max(np.abs(s.real - s), initial=0.0) <= REALNESS_TOL * max(1.0, lam[-1]):
        y_minus = y_plus.conj()
        mu_minus = -mu[pos]
    else:
        y_minus = np.stack([iroot @ _gauge(w[:, j]) * np.sqrt(-mu[j]) for j in neg], axis=1)
        mu_minus = mu[neg]
    norms = np.real(np.einsum("ij,ik,kj->j", np.concatenate([y_plus, y_minus], 1).conj(),
                              1j * J, np.concatenate([y_plus, y_minus], 1)))
    if np.min(np.abs(norms)) < 1e-12:
        raise NumericalError("indefinite-metric normalization failed")
    P = ladder_map(n)
    T = np.concatenate([y_plus, y_minus], axis=1) @ P.conj().T
    M = -J @ T @ J
    mu_all = np.concatenate([mu[pos], mu_minus])
    sigma = (mu[pos] - mu_minus) / 2
    delta = (mu[pos] + mu_minus) / 2
    return M, sigma, delta, mu_all


def williamson(S: SpectralDensityMatrix, eps: float = 0.0, tol: float = 1e-8) -> WilliamsonForm:
    """Reduce ``S`` to ``normal_form(sigma, delta)`` by a conjugate-symplectic congruence.

    Parameters
    ----------
    S : SpectralDensityMatrix
        Must be strictly positive definite at every frequency.
    eps : float
        Added to the diagonal before reduction, to regularize pure states.
    tol : float
        Relative reconstruction tolerance.

    Raises
    ------
    NumericalError
        Listing each failing frequency index.
    """
    def guarded(s):
        try:
            return _williamson_one(s, eps)
        except (NumericalError, np.linalg.LinAlgError) as exc:
            return exc

    results = frequency_map(guarded, S.samples)
    failures = {k: str(r) for k, r in enumerate(results) if isinstance(r, Exception)}
    if failures:
        raise NumericalError(f"Williamson reduction failed at {sorted(failures)}", failures)
    Ms, sig, dlt, mus = (np.stack(x) for x in zip(*results))
    form = WilliamsonForm(MatrixFunction(S.grid, Ms, "williamson"), sig, dlt, mus)
    target = S.samples + eps * np.eye(S.samples.shape[1])
    for k in range(len(S.grid)):
        res = np.linalg.norm(form.reconstruct(k) - target[k]) / np.linalg.norm(target[k])
        if res > tol:
            failures[k] = f"reconstruction residual {res:.3e}"
    if failures:
        raise NumericalError(f"Williamson reconstruction failed at {sorted(failures)}", failures)
    return form


def occupations(form: WilliamsonForm, omega: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-mode mean quantum numbers ``(n[+w], n[-w]) = sigma +/- delta - 1/2``."""
    sigma, delta = form.invariants(omega)
    return sigma + delta - 0.5, sigma - delta - 0.5


# ---------------------------------------------------------------------------
# ladder basis


def sdm_to_ladder(S, omega: float | None = None) -> np.ndarray:
    """``P^T S P^*``; the diagonal minus 1/2 lists ``n[-w]`` then ``n[+w]`` per mode."""
    s = _sample(S, omega)
    P = ladder_map(s.shape[0] // 2)
    return P.T @ s @ P.conj()


def sdm_from_ladder(Sa: np.ndarray) -> np.ndarray:
    P = ladder_map(Sa.shape[0] // 2)
    return P.conj() @ Sa @ P.T


# ---------------------------------------------------------------------------
# open-system bound


@dataclass(frozen=True)
class BoundReport:
    """Per-output-mode ``lhs >= rhs >= rhs_noise_only``."""

    lhs: np.ndarray
    rhs: np.ndarray
    rhs_noise_only: np.ndarray

    @property
    def slack(self) -> np.ndarray:
        return self.lhs - self.rhs


def _mode_block(A: np.ndarray, i: int, j: int, m: int, n: int) -> np.ndarray:
    return A[np.ix_([i, m + i], [j, n + j])]


def open_system_bound(G, N, S_in, omega: float | None = None) -> BoundReport:
    """Output-mode uncertainty bound for ``x_out = G x_in + N x_N``.

    The noise inputs are taken to be vacuum and uncorrelated with each other
    and with the accessible inputs; this is the caller's contract and is not
    checked.
    """
    g = G.at(omega) if isinstance(G, MatrixFunction) else np.asarray(G, dtype=complex)
    nn = N.at(omega) if isinstance(N, MatrixFunction) else np.asarray(N, dtype=complex)
    s_in = _sample(S_in, omega) if g.shape[1] else np.zeros((0, 0))
    if g.shape[0] != nn.shape[0] or g.shape[1] != s_in.shape[0] or g.shape[0] % 2 or nn.shape[1] % 2:
        raise ValueError(f"block shapes do not conform: G {g.shape}, N {nn.shape}, S {s_in.shape}")
    m, n, L = g.shape[0] // 2, g.shape[1] // 2, nn.shape[1] // 2
    signal = g @ s_in @ g.conj().T if n else np.zeros((2 * m, 2 * m), dtype=complex)
    s_out = signal + nn @ nn.conj().T / 2
    lhs, rhs, noise = [], [], []
    for i in range(m):
        lhs.append(np.sqrt(max(0.0, (s_out[i, i] * s_out[m + i, m + i]).real)))
        blk = _mode_block(signal, i, i, m, m)
        first = np.sqrt(max(0.0, np.linalg.det(blk).real))
        nterm = 0.5 * sum(abs(np.linalg.det(_mode_block(nn, i, j, m, L))) for j in range(L))
        rhs.append(first + nterm)
        noise.append(nterm)
    return BoundReport(np.array(lhs), np.array(rhs), np.array(noise))
