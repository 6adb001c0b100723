"""Structure-preserving factorizations of conjugate-symplectic matrices.

The chain is: sort the eigenpairs of a positive group element, build a unitary
conjugate-symplectic eigenbasis, split unitary group elements into
interferometer / rotation / interferometer (a cosine-sine decomposition), and
combine these into a seven-factor optical circuit. Unitaries can be lowered to
a rectangular mesh of two-mode rotations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .core import (
    FrequencyGrid,
    MatrixFunction,
    NumericalError,
    OffGridError,
    ladder_map,
    symplectic_form,
)
from ._parallel import frequency_map

__all__ = [
    "SpectralFactorization",
    "CsdFactors",
    "BlochMessiah",
    "OpticalCircuit",
    "MeshRotation",
    "MeshPhase",
    "MeshProgram",
    "sort_eigenelements",
    "symplectic_spectral",
    "csd_sp",
    "svd_sp",
    "optical_decomposition",
    "mesh_decompose",
    "circuit_eval",
    "interferometer",
    "cs_block",
    "squeezer",
]

UNIT_EIGENVALUE_TOL = 1e-8
GROUP_TOL = 1e-8
GAUGE_SKIP = 1e-12


def interferometer(V: np.ndarray) -> np.ndarray:
    """Quadrature-picture ``diag(V, V)``."""
    V = np.asarray(V, dtype=complex)
    z = np.zeros_like(V)
    return np.block([[V, z], [z, V]])


def cs_block(theta) -> np.ndarray:
    """``[[C, -S], [S, C]]`` with ``C = diag(cos theta)``, ``S = diag(sin theta)``."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.diag(np.cos(theta)), np.diag(np.sin(theta))
    return np.block([[c, -s], [s, c]]).astype(complex)


def squeezer(r) -> np.ndarray:
    """``diag(e^r, e^-r)``."""
    r = np.asarray(r, dtype=float)
    return np.diag(np.concatenate([np.exp(r), np.exp(-r)])).astype(complex)


def _modes(M: np.ndarray) -> int:
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ValueError(f"expected a square even-dimensional matrix, got {M.shape}")
    return M.shape[0] // 2


def _check_group(M: np.ndarray, what: str = "input"):
    n = _modes(M)
    J = symplectic_form(n)
    res = np.linalg.norm(M @ J @ M.conj().T - J)
    if res > GROUP_TOL * max(1.0, np.linalg.norm(M) ** 2):
        raise ValueError(f"{what} is not conjugate symplectic (residual {res:.3e})")


def _gauge_column(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v).round(12)))
    a = v[k]
    return v * (abs(a) / a) if abs(a) > 0 else v


# ---------------------------------------------------------------------------
# eigenvalue sorting and the spectral decomposition


def sort_eigenelements(H: np.ndarray):
    """Eigenpairs of a positive group element ordered as ``(l, 1/l)`` pairs.

    Returns ``(values, vectors)`` where ``values[:n]`` ascend from 1 and
    ``values[n + j] = 1 / values[j]``.

    Raises
    ------
    ValueError
        If ``H`` is not Hermitian positive definite or not in the group.
    """
    H = np.asarray(H, dtype=complex)
    n = _modes(H)
    if np.linalg.norm(H - H.conj().T) > GROUP_TOL * max(1.0, np.linalg.norm(H)):
        raise ValueError("input is not Hermitian")
    _check_group(H)
    lam, vec = np.linalg.eigh((H + H.conj().T) / 2)
    if lam[0] <= 0:
        raise ValueError(f"input is not positive definite (min eigenvalue {lam[0]:.3e})")
    order = np.argsort(lam, kind="stable")
    perm = np.concatenate([order[n:], order[n - 1 :: -1]])
    return lam[perm], vec[:, perm]


@dataclass(frozen=True)
class SpectralFactorization:
    """``H = U diag(d, 1/d) U^dagger`` with ``U`` unitary and in the group."""

    U: np.ndarray
    d: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.U @ np.diag(np.concatenate([self.d, 1 / self.d])) @ self.U.conj().T


def _unit_subspace_pairs(basis: np.ndarray, J: np.ndarray, k: int) -> np.ndarray:
    """``k`` columns ``q`` spanning half the subspace with ``(q, -Jq)`` orthonormal.

    The subspace is split into the +1 and -1 eigenspaces of ``iJ``; each
    column is ``(w + x) / sqrt(2)`` with ``w``, ``x`` unit vectors from either
    side. Seeds are standard basis vectors projected onto the subspace, so the
    result depends only on the subspace (identity in, identity out).
    """
    proj = basis @ basis.conj().T
    split_plus = proj @ (np.eye(J.shape[0]) + 1j * J) / 2
    split_minus = proj @ (np.eye(J.shape[0]) - 1j * J) / 2
    ws, xs, cols = [], [], []
    for _ in range(k):
        best, best_score = None, -1.0
        for i in range(J.shape[0]):
            w, x = split_plus[:, i].copy(), split_minus[:, i].copy()
            for _ in range(2):
                for a in ws:
                    w -= (a.conj() @ w) * a
                for b in xs:
                    x -= (b.conj() @ x) * b
            score = min(np.linalg.norm(w), np.linalg.norm(x))
            if score > best_score + 1e-12:
                best, best_score = (w, x), score
        if best_score < 1e-6:
            raise NumericalError("eigenvalue-1 subspace is not balanced under iJ")
        w, x = best[0] / np.linalg.norm(best[0]), best[1] / np.linalg.norm(best[1])
        ws.append(w)
        xs.append(x)
        cols.append((w + x) / np.sqrt(2))
    return np.stack(cols, axis=1)


def symplectic_spectral(H: np.ndarray) -> SpectralFactorization:
    """Unitary conjugate-symplectic eigenbasis of a positive group element.

    Eigenvectors with eigenvalue away from 1 are paired as ``(v, -Jv)``. The
    eigenvalue-1 subspace is re-split through the eigenvectors of ``iJ``
    restricted to it, so that its columns pair up the same way.
    """
    H = np.asarray(H, dtype=complex)
    n = _modes(H)
    J = symplectic_form(n)
    lam, vec = sort_eigenelements(H)
    unit = np.abs(lam[:n] - 1) <= UNIT_EIGENVALUE_TOL
    U = np.zeros((2 * n, 2 * n), dtype=complex)
    for j in np.flatnonzero(~unit):
        u = _gauge_column(vec[:, j])
        U[:, j] = u
        U[:, n + j] = -J @ u

    k = int(unit.sum())
    if k:
        full = np.abs(lam - 1) <= UNIT_EIGENVALUE_TOL
        if int(full.sum()) != 2 * k:
            raise NumericalError("eigenvalue-1 subspace has odd dimension")
        q = _unit_subspace_pairs(vec[:, full], J, k)
        slots = np.flatnonzero(unit)
        U[:, slots] = q
        U[:, n + slots] = -J @ q
    d = lam[:n].copy()
    d[unit] = 1.0
    return SpectralFactorization(U, d)


# ---------------------------------------------------------------------------
# cosine-sine decomposition


@dataclass(frozen=True)
class CsdFactors:
    """``Q = diag(V, V) [[C, -S], [S, C]] diag(W, W)``."""

    V: np.ndarray
    theta: np.ndarray
    W: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return interferometer(self.V) @ cs_block(self.theta) @ interferometer(self.W)


def csd_sp(Q: np.ndarray, tol: float = 1e-9) -> CsdFactors:
    """Cosine-sine split of a unitary conjugate-symplectic matrix.

    In the ladder picture ``Q`` is ``diag(Q1, Q2)``; ``Q2^dagger Q1`` is unitary
    with eigenvalues ``e^{2i theta}``. A complex Schur form diagonalizes it
    even inside degenerate clusters.
    """
    Q = np.asarray(Q, dtype=complex)
    n = _modes(Q)
    P = ladder_map(n)
    A = P.conj().T @ Q @ P
    off = max(np.linalg.norm(A[:n, n:]), np.linalg.norm(A[n:, :n]))
    if off > tol * max(1.0, np.linalg.norm(Q)):
        raise ValueError(f"input is not unitary conjugate symplectic (off-block {off:.3e})")
    if np.linalg.norm(Q.conj().T @ Q - np.eye(2 * n)) > tol * 2 * n:
        raise ValueError("input is not unitary")
    Q1, Q2 = A[:n, :n], A[n:, n:]
    T, Z = scipy.linalg.schur(Q2.conj().T @ Q1, output="complex")
    phase = np.diag(T)
    theta = np.angle(phase) / 2
    # angle() lands on (-pi, pi]; keep the half angle in (-pi/2, pi/2]
    theta = np.where(theta <= -np.pi / 2, theta + np.pi, theta)
    W = Z.conj().T
    for j in range(n):
        W[j] = _gauge_column(W[j])
    V = Q1 @ W.conj().T @ np.diag(np.exp(-1j * theta))
    return CsdFactors(V, theta, W)


# ---------------------------------------------------------------------------
# Bloch-Messiah


class BlochMessiah(NamedTuple):
    """``M = left @ diag(d, 1/d) @ right^dagger``."""

    left: np.ndarray
    right: np.ndarray
    d: np.ndarray


def svd_sp(M: np.ndarray) -> BlochMessiah:
    """Polar decomposition followed by the symplectic spectral decomposition."""
    M = np.asarray(M, dtype=complex)
    _check_group(M)
    s, q = np.linalg.eigh(M.conj().T @ M)
    if s[0] <= 0:
        raise NumericalError("matrix is singular")
    H = (q * np.sqrt(s)) @ q.conj().T
    H = (H + H.conj().T) / 2
    U = M @ (q / np.sqrt(s)) @ q.conj().T
    sf = symplectic_spectral(H)
    return BlochMessiah(U @ sf.U, sf.U, sf.d)


# ---------------------------------------------------------------------------
# optical circuit


@dataclass(frozen=True)
class OpticalCircuit:
    """Per-frequency seven-factor circuit

    ``M = diag(V1,V1) CS(theta1) diag(W1,W1) diag(e^r, e^-r) diag(W2,W2) CS(theta2) diag(V2,V2)``.

    Arrays carry a leading frequency axis. Frequencies listed in ``failures``
    hold NaN.
    """

    grid: FrequencyGrid
    V1: np.ndarray
    theta1: np.ndarray
    W1: np.ndarray
    r: np.ndarray
    W2: np.ndarray
    theta2: np.ndarray
    V2: np.ndarray
    failures: dict = field(default_factory=dict)

    @property
    def n_modes(self) -> int:
        return self.V1.shape[-1]

    def factors(self, k: int) -> list[np.ndarray]:
        """The seven quadrature-picture factors at stored index ``k``, left to right."""
        return [
            interferometer(self.V1[k]),
            cs_block(self.theta1[k]),
            interferometer(self.W1[k]),
            squeezer(self.r[k]),
            interferometer(self.W2[k]),
            cs_block(self.theta2[k]),
            interferometer(self.V2[k]),
        ]

    def residuals(self, M: MatrixFunction) -> np.ndarray:
        """Relative Frobenius reconstruction error at each stored frequency."""
        out = []
        for k, w in enumerate(self.grid.omega):
            out.append(
                np.linalg.norm(circuit_eval(self, w) - M.samples[k]) / np.linalg.norm(M.samples[k])
            )
        return np.array(out)


def _gauge_circuit(V1, W1, W2, V2):
    def col_phases(row):
        # phases p with row * p real positive; tiny entries untouched
        p = np.ones(row.size, dtype=complex)
        big = np.abs(row) > GAUGE_SKIP
        p[big] = np.abs(row[big]) / row[big]
        return p

    p = col_phases(V1[0])
    V1 = V1 * p
    W1 = p.conj()[:, None] * W1
    p = col_phases(W1[0])
    W1 = W1 * p
    W2 = p.conj()[:, None] * W2
    p = col_phases(V2[:, 0])
    V2 = p[:, None] * V2
    W2 = W2 * p.conj()
    return V1, W1, W2, V2


def _decompose_one(M: np.ndarray):
    bm = svd_sp(M)
    a = csd_sp(bm.left)
    b = csd_sp(bm.right.conj().T)
    V1, W1, W2, V2 = _gauge_circuit(a.V, a.W, b.V, b.W)
    return V1, a.theta, W1, np.log(bm.d), W2, b.theta, V2


def optical_decomposition(M: MatrixFunction, tol: float = 1e-8) -> OpticalCircuit:
    """Seven-factor optical circuit at every grid frequency.

    A frequency where a step fails or the reconstruction misses ``tol``
    (relative) is recorded in ``failures``; the rest are still returned.
    """
    n = M.rows // 2
    if M.rows != M.cols or M.rows % 2:
        raise ValueError(f"expected square even-dimensional samples, got {M.shape}")

    def guarded(x):
        try:
            return _decompose_one(x)
        except (ValueError, NumericalError, np.linalg.LinAlgError) as exc:
            return exc

    results = frequency_map(guarded, M.samples)
    K = len(M.grid)
    nan_m = np.full((K, n, n), np.nan + 0j)
    arrays = [nan_m.copy(), np.full((K, n), np.nan), nan_m.copy(), np.full((K, n), np.nan),
              nan_m.copy(), np.full((K, n), np.nan), nan_m.copy()]
    failures = {}
    for k, res in enumerate(results):
        if isinstance(res, Exception):
            failures[k] = f"{type(res).__name__}: {res}"
            continue
        for arr, val in zip(arrays, res):
            arr[k] = val
    circ = OpticalCircuit(M.grid, *arrays, failures=failures)
    for k, w in enumerate(M.grid.omega):
        if k in failures:
            continue
        rel = np.linalg.norm(circuit_eval(circ, w) - M.samples[k]) / np.linalg.norm(M.samples[k])
        if rel > tol:
            failures[k] = f"reconstruction residual {rel:.3e}"
    return circ


def circuit_eval(circuit: OpticalCircuit, omega: float) -> np.ndarray:
    """Multiply the seven factors at a signed on-grid frequency."""
    try:
        k, conj = circuit.grid.locate(omega)
    except OffGridError:
        raise
    out = np.linalg.multi_dot(circuit.factors(k))
    return out.conj() if conj else out


# ---------------------------------------------------------------------------
# rectangular mesh


@dataclass(frozen=True)
class MeshRotation:
    """``[[e^{i phi} cos theta, -sin theta], [e^{i phi} sin theta, cos theta]]`` on ``modes``."""

    modes: tuple[int, int]
    theta: float
    phi: float

    def matrix(self, n: int) -> np.ndarray:
        j, k = self.modes
        t = np.eye(n, dtype=complex)
        c, s, e = np.cos(self.theta), np.sin(self.theta), np.exp(1j * self.phi)
        t[j, j], t[j, k], t[k, j], t[k, k] = e * c, -s, e * s, c
        return t


@dataclass(frozen=True)
class MeshPhase:
    mode: int
    phi: float

    def matrix(self, n: int) -> np.ndarray:
        t = np.eye(n, dtype=complex)
        t[self.mode, self.mode] = np.exp(1j * self.phi)
        return t


@dataclass(frozen=True)
class MeshProgram:
    """Primitives in the order they act on an input vector."""

    n_modes: int
    elements: list

    def to_matrix(self) -> np.ndarray:
        U = np.eye(self.n_modes, dtype=complex)
        for el in self.elements:
            U = el.matrix(self.n_modes) @ U
        return U

    def to_dict(self) -> dict:
        items = []
        for el in self.elements:
            if isinstance(el, MeshRotation):
                items.append({"type": "rotation", "modes": list(el.modes), "theta": el.theta, "phi": el.phi})
            else:
                items.append({"type": "phase", "mode": el.mode, "phi": el.phi})
        return {"n_modes": self.n_modes, "elements": items}

    @classmethod
    def from_dict(cls, data: dict) -> "MeshProgram":
        els = []
        for it in data["elements"]:
            if it["type"] == "rotation":
                els.append(MeshRotation(tuple(it["modes"]), float(it["theta"]), float(it["phi"])))
            else:
                els.append(MeshPhase(int(it["mode"]), float(it["phi"])))
        return cls(int(data["n_modes"]), els)


def _angles(num, den):
    # tan(theta) e^{i phi} = num / den
    if abs(den) < 1e-300:
        return np.pi / 2, 0.0
    ratio = num / den
    return float(np.arctan(abs(ratio))), float(np.angle(ratio))


def _swap_through(rot: MeshRotation, d: np.ndarray, n: int):
    """Rewrite ``rot^{-1} diag(d)`` as ``diag(d') rot'`` on the same modes."""
    j, k = rot.modes
    A = rot.matrix(n)[np.ix_([j, k], [j, k])].conj().T @ np.diag(d[[j, k]])
    c, s = np.cos(rot.theta), np.sin(rot.theta)
    if s < 1e-12:
        phi, a, b = 0.0, np.angle(A[0, 0]), np.angle(A[1, 1])
    elif c < 1e-12:
        phi, a, b = 0.0, np.angle(-A[0, 1]), np.angle(A[1, 0])
    else:
        a, b = np.angle(-A[0, 1]), np.angle(A[1, 1])
        phi = np.angle(A[0, 0]) - a
    d = d.copy()
    d[j], d[k] = np.exp(1j * a), np.exp(1j * b)
    return MeshRotation(rot.modes, rot.theta, float(phi)), d


def mesh_decompose(U0: np.ndarray, tol: float = 1e-10) -> MeshProgram:
    """Rectangular (Clements) mesh of two-mode rotations and output phases.

    Raises
    ------
    ValueError
        If ``U0`` is not unitary to 1e-9.
    """
    U0 = np.atleast_2d(np.asarray(U0, dtype=complex))
    n = U0.shape[0]
    if U0.shape != (n, n) or np.linalg.norm(U0.conj().T @ U0 - np.eye(n)) > 1e-9:
        raise ValueError("input is not unitary")
    V = U0.copy()
    left, right = [], []
    for i in range(n - 1):
        if i % 2 == 0:
            for j in range(i + 1):
                row, col = n - 1 - j, i - j
                theta, phi = _angles(V[row, col], V[row, col + 1])
                rot = MeshRotation((col, col + 1), theta, phi)
                V = V @ rot.matrix(n).conj().T
                right.append(rot)
        else:
            for j in range(1, i + 2):
                row, col = n + j - i - 2, j - 1
                theta, phi = _angles(-V[row, col], V[row - 1, col])
                rot = MeshRotation((row - 1, row), theta, phi)
                V = rot.matrix(n) @ V
                left.append(rot)
    d = np.diag(V).copy()
    # U0 = left_1^-1 ... left_k^-1 diag(d) right_m ... right_1
    moved = []
    for rot in reversed(left):
        new, d = _swap_through(rot, d, n)
        moved.append(new)
    elements = list(right) + moved + [MeshPhase(j, float(np.angle(d[j]))) for j in range(n)]
    prog = MeshProgram(n, elements)
    res = np.linalg.norm(prog.to_matrix() - U0)
    if res > tol:
        raise NumericalError(f"mesh replay residual {res:.3e}")
    return prog
