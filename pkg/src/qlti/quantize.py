"""Minimal added noise for a classical transfer matrix, and its unitary dilation.

A classical transfer matrix ``G[w]`` (``2m x 2n``) generally violates the
commutation relations at its outputs. The shortfall

    D[w] = iJ_out - G[w] iJ_in G[w]^dagger

is Hermitian; its positive and negative eigenvalues fix the fewest noise modes
``ell = max(d+, d-)`` and the noise coupling ``N[w]`` with
``N iJ_N N^dagger = D``. :func:`dilate` then completes ``[G N]`` to a square
conjugate-symplectic matrix ``[[G, N], [K, L]]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    FrequencyGrid,
    MatrixFunction,
    NumericalError,
    block_symplectic_form,
    ladder_map,
    symplectic_form,
)
from ._parallel import frequency_map

__all__ = [
    "RankToleranceWarning",
    "NoiseModel",
    "Dilation",
    "ccr_deficit",
    "minimal_noise",
    "dilate",
    "qqpp_permutation",
]


class RankToleranceWarning(UserWarning):
    """An eigenvalue of the deficit sits close to the zero threshold."""


def _modes(dim: int, what: str) -> int:
    if dim % 2:
        raise ValueError(f"{what} dimension {dim} is not even")
    return dim // 2


def ccr_deficit(G, omega: float | None = None) -> np.ndarray:
    """``iJ_out - G iJ_in G^dagger`` at one frequency (exactly Hermitian)."""
    if isinstance(G, MatrixFunction):
        if omega is None:
            raise ValueError("omega is required for a MatrixFunction")
        G = G.at(omega)
    G = np.asarray(G, dtype=complex)
    m = _modes(G.shape[0], "output")
    n = _modes(G.shape[1], "input")
    d = 1j * symplectic_form(m) - G @ (1j * symplectic_form(n)) @ G.conj().T
    return (d + d.conj().T) / 2


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec).round(12)))
    a = vec[k]
    return vec * (abs(a) / a) if abs(a) > 0 else vec


@dataclass(frozen=True)
class _Split:
    plus: np.ndarray  # eigenvalues, descending magnitude
    minus: np.ndarray
    u_plus: np.ndarray  # columns
    u_minus: np.ndarray
    u_null: np.ndarray
    ambiguous: bool


def _split_deficit(d: np.ndarray, rank_tol: float, scale: float) -> _Split:
    # scale is the size of the terms that cancel in the deficit, so a deficit made
    # only of rounding error counts as zero
    lam, vec = np.linalg.eigh(d)
    thresh = rank_tol * scale
    ambiguous = bool(np.any((np.abs(lam) > thresh / 10) & (np.abs(lam) < thresh * 10)))
    pos = [i for i in np.argsort(-np.abs(lam)) if lam[i] > thresh]
    neg = [i for i in np.argsort(-np.abs(lam)) if lam[i] < -thresh]
    null = [i for i in range(lam.size) if abs(lam[i]) <= thresh]

    u_plus = np.stack([_fix_phase(vec[:, i]) for i in pos], axis=1) if pos else np.zeros((d.shape[0], 0))
    plus = lam[pos]
    dim = d.shape[0]
    if np.max(np.abs(d.real), initial=0.0) <= 1e-12 * max(1.0, scale) and len(pos) == len(neg):
        # purely imaginary deficit: pair each negative eigenvector with the conjugate
        # of a positive one so that N comes out real
        u_minus = u_plus.conj()
        minus = -plus
    else:
        u_minus = (
            np.stack([_fix_phase(vec[:, i]) for i in neg], axis=1) if neg else np.zeros((dim, 0))
        )
        minus = lam[neg]
    u_null = vec[:, null] if null else np.zeros((dim, 0))
    return _Split(plus, minus, u_plus, u_minus, u_null, ambiguous)


@dataclass(frozen=True)
class NoiseModel:
    """Quantized LTI system ``x_out = G x_in + N x_N`` with minimal noise.

    ``N`` has ``2 * max(ell)`` columns on every frequency; at frequencies needing
    fewer noise modes the extra columns are zero.
    """

    G: MatrixFunction
    N: MatrixFunction
    ell: np.ndarray
    gamma: list = field(repr=False)
    d_plus: np.ndarray
    d_minus: np.ndarray
    deficit_eigenvalues: list = field(repr=False, default_factory=list)

    @property
    def grid(self) -> FrequencyGrid:
        return self.G.grid

    @property
    def m(self) -> int:
        return self.G.rows // 2

    @property
    def n(self) -> int:
        return self.G.cols // 2

    @property
    def n_noise(self) -> int:
        return self.N.cols // 2

    def constraint_residual(self) -> np.ndarray:
        """Per-frequency ``||N iJ_N N^dagger - D||_F``."""
        jn = 1j * symplectic_form(self.n_noise) if self.n_noise else np.zeros((0, 0))
        out = []
        for g, nn in zip(self.G.samples, self.N.samples):
            out.append(np.linalg.norm(nn @ jn @ nn.conj().T - ccr_deficit(g)))
        return np.array(out)


def minimal_noise(G: MatrixFunction, rank_tol: float = 1e-10) -> NoiseModel:
    """Noise coupling ``N[w] = U Gamma P^dagger`` with the fewest noise modes.

    Eigenvalues with ``|lambda| <= rank_tol * max(1, ||G[w]||_2^2)`` count as zero. A
    :class:`RankToleranceWarning` names every frequency index with an eigenvalue
    within a factor 10 of that threshold.
    """
    m = _modes(G.rows, "output")
    _modes(G.cols, "input")
    splits = frequency_map(
        lambda g: _split_deficit(ccr_deficit(g), rank_tol, max(1.0, np.linalg.norm(g, 2) ** 2)), G.samples
    )
    ambiguous = [k for k, s in enumerate(splits) if s.ambiguous]
    if ambiguous:
        warnings.warn(
            f"deficit eigenvalue near the rank threshold at frequency indices {ambiguous}",
            RankToleranceWarning,
            stacklevel=2,
        )
    d_plus = np.array([s.plus.size for s in splits])
    d_minus = np.array([s.minus.size for s in splits])
    ell = np.maximum(d_plus, d_minus)
    L = int(ell.max(initial=0))
    P = ladder_map(L)

    samples, gammas, eigs = [], [], []
    for s in splits:
        dp, dm = s.plus.size, s.minus.size
        U = np.concatenate([s.u_plus, s.u_minus, s.u_null], axis=1)
        gamma_mat = np.zeros((2 * m, 2 * L), dtype=complex)
        # rows from D+ multiply the +1 ladder columns, rows from D- the -1 ones
        for i in range(dp):
            gamma_mat[i, i] = np.sqrt(s.plus[i])
        for j in range(dm):
            gamma_mat[dp + j, L + j] = np.sqrt(-s.minus[j])
        samples.append(U @ gamma_mat @ P.conj().T if L else np.zeros((2 * m, 0)))
        gammas.append(np.concatenate([np.sqrt(s.plus), np.sqrt(-s.minus)]))
        eigs.append(np.concatenate([s.plus, s.minus]))

    N = MatrixFunction(G.grid, np.stack(samples), "noise")
    return NoiseModel(G, N, ell, gammas, d_plus, d_minus, eigs)


# ---------------------------------------------------------------------------
# dilation


@dataclass(frozen=True)
class Dilation:
    """Square closed system ``[[G, N], [K, L]]``.

    Rows are ordered (accessible outputs, ancilla outputs); columns are
    (accessible inputs, noise inputs). Each subsystem uses its own qq...pp
    block, so the commutation form on either side is block-diagonal.
    """

    M_ext: MatrixFunction
    m: int
    n: int
    n_noise: int
    n_anc: int

    @property
    def grid(self) -> FrequencyGrid:
        return self.M_ext.grid

    @property
    def J_out(self) -> np.ndarray:
        return block_symplectic_form(self.m, self.n_anc)

    @property
    def J_in(self) -> np.ndarray:
        return block_symplectic_form(self.n, self.n_noise)

    def G(self) -> MatrixFunction:
        return self.M_ext.block(slice(0, 2 * self.m), slice(0, 2 * self.n))

    def N(self) -> MatrixFunction:
        return self.M_ext.block(slice(0, 2 * self.m), slice(2 * self.n, None))

    def K(self) -> MatrixFunction:
        return self.M_ext.block(slice(2 * self.m, None), slice(0, 2 * self.n))

    def L(self) -> MatrixFunction:
        return self.M_ext.block(slice(2 * self.m, None), slice(2 * self.n, None))

    def as_group_element(self) -> MatrixFunction:
        """``M_ext`` with rows and columns in global qq...pp order.

        The result satisfies ``M J M^dagger = J`` with the plain symplectic form
        and can be passed to the decompositions.
        """
        rows = qqpp_permutation(self.m, self.n_anc)
        cols = qqpp_permutation(self.n, self.n_noise)
        return MatrixFunction(self.grid, self.M_ext.samples[:, rows][:, :, cols], "group")

    def residuals(self) -> np.ndarray:
        jo, ji = self.J_out, self.J_in
        return np.array([np.linalg.norm(x @ ji @ x.conj().T - jo) for x in self.M_ext.samples])


def qqpp_permutation(*sizes: int) -> np.ndarray:
    """Indices taking subsystem-blocked ``(q1 p1 q2 p2 ...)`` to global ``(q1 q2 ... p1 p2 ...)``."""
    starts = np.cumsum([0] + [2 * k for k in sizes])
    qs = [np.arange(s, s + k) for s, k in zip(starts, sizes)]
    ps = [np.arange(s + k, s + 2 * k) for s, k in zip(starts, sizes)]
    return np.concatenate(qs + ps).astype(int)


def _bar_permutation(sizes: list[int]) -> np.ndarray:
    """Index map swapping the +/- halves of each ladder subsystem."""
    idx, offset = [], 0
    for k in sizes:
        idx.extend(list(range(offset + k, offset + 2 * k)) + list(range(offset, offset + k)))
        offset += 2 * k
    return np.array(idx, dtype=int)


def _project(vec, rows, signs, metric):
    for _ in range(2):
        for r, s in zip(rows, signs):
            vec = vec - s * ((vec * metric) @ r.conj()) * r
    return vec


def _complete_rows(top: np.ndarray, metric: np.ndarray, n_anc: int, bar: np.ndarray):
    """Extend metric-orthonormal rows by ``n_anc`` (+1) and ``n_anc`` (-1) rows."""
    dim = top.shape[1]
    half = top.shape[0] // 2
    rows = list(top)
    signs = [1.0] * half + [-1.0] * half
    plus, minus = [], []
    seeds = np.eye(dim, dtype=complex)

    def best_seed(sign):
        cands = [_project(e, rows, signs, metric) for e in seeds]
        norms = np.array([np.real((c * metric) @ c.conj()) for c in cands]) * sign
        k = int(np.argmax(norms))
        return cands[k], norms[k]

    for _ in range(n_anc):
        vec, nrm = best_seed(+1.0)
        if nrm < 1e-6:
            raise NumericalError("no positive-norm completion vector found")
        r = vec / np.sqrt(nrm)
        rows.append(r)
        signs.append(1.0)
        plus.append(r)

        partner = _project(r.conj()[bar], rows, signs, metric)
        nrm = -np.real((partner * metric) @ partner.conj())
        if nrm < 0.5:
            partner, nrm = best_seed(-1.0)
            if nrm < 1e-6:
                raise NumericalError("no negative-norm completion vector found")
        r = partner / np.sqrt(nrm)
        rows.append(r)
        signs.append(-1.0)
        minus.append(r)
    return np.array(plus + minus).reshape(2 * n_anc, dim)


def dilate(model: NoiseModel, tol: float = 1e-9) -> Dilation:
    """Complete ``[G N]`` to a conjugate-symplectic ``M_ext`` with ancilla outputs.

    The completion runs in the ladder picture, where the condition becomes
    orthonormality of rows in the indefinite metric ``diag(1, -1, 1, -1)``; new
    rows come from a hyperbolic Gram-Schmidt sweep over standard basis seeds.
    """
    m, n, L = model.m, model.n, model.n_noise
    n_anc = n + L - m
    if n_anc < 0:
        raise NumericalError(f"cannot dilate: {m} outputs exceed {n} inputs + {L} noise modes")
    P_out = ladder_map(m)
    P_anc = ladder_map(n_anc)
    P_in = np.zeros((2 * (n + L), 2 * (n + L)), dtype=complex)
    P_in[: 2 * n, : 2 * n] = ladder_map(n)
    P_in[2 * n :, 2 * n :] = ladder_map(L)
    metric = np.concatenate([np.ones(n), -np.ones(n), np.ones(L), -np.ones(L)])
    bar = _bar_permutation([n, L])

    def one(gn):
        top = P_out.conj().T @ gn @ P_in
        if n_anc == 0:
            return gn
        bottom = _complete_rows(top, metric, n_anc, bar)
        kl = P_anc @ bottom @ P_in.conj().T
        return np.concatenate([gn, kl], axis=0)

    gn_all = np.concatenate([model.G.samples, model.N.samples], axis=2)
    failures, samples = {}, []
    for k, res in enumerate(frequency_map(_guard(one), gn_all)):
        if isinstance(res, Exception):
            failures[k] = str(res)
            samples.append(np.full((2 * (m + n_anc), 2 * (n + L)), np.nan + 0j))
        else:
            samples.append(res)
    if failures:
        raise NumericalError(f"dilation failed at frequency indices {sorted(failures)}", failures)

    samples = np.stack(samples)
    # keep the accessible blocks bit-exact
    samples[:, : 2 * m, : 2 * n] = model.G.samples
    samples[:, : 2 * m, 2 * n :] = model.N.samples
    dil = Dilation(MatrixFunction(model.grid, samples, "dilation"), m, n, L, n_anc)
    bad = {
        k: f"residual {r:.3e}"
        for k, r in enumerate(dil.residuals())
        if r > tol * max(1.0, np.linalg.norm(samples[k]) ** 2)
    }
    if bad:
        raise NumericalError(f"dilation residual above tolerance at {sorted(bad)}", bad)
    return dil


def _guard(func):
    def wrapped(x):
        try:
            return func(x)
        except (NumericalError, np.linalg.LinAlgError) as exc:
            return exc

    return wrapped
