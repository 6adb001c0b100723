"""Frequency grids, matrix-valued functions and conjugate-symplectic primitives.

All quadrature vectors use the ``qq...pp`` ordering ``(q_1..q_n, p_1..p_n)``.
Only non-negative frequencies are stored; a sample at ``-w`` is the element-wise
complex conjugate of the sample at ``+w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "QltiError",
    "GridMismatchError",
    "OffGridError",
    "NumericalError",
    "GuardError",
    "FrequencyGrid",
    "MatrixFunction",
    "AlgebraElement",
    "DEFAULT_TOL",
    "symplectic_form",
    "block_symplectic_form",
    "ladder_map",
    "indefinite_metric",
    "two_photon_map",
    "conjugate_symplectic_residual",
    "is_conjugate_symplectic",
    "group_inverse",
    "random_group_element",
    "generator_of",
    "exp_algebra",
    "to_ladder",
    "from_ladder",
    "two_photon_embed",
]

DEFAULT_TOL = 1e-10
REALNESS_TOL = 1e-12


class QltiError(Exception):
    """Base class for library errors."""


class GridMismatchError(QltiError, ValueError):
    pass


class OffGridError(QltiError, KeyError):
    pass


class NumericalError(QltiError, ArithmeticError):
    """A numeric postcondition failed at one or more frequencies.

    ``failures`` maps frequency index to a short diagnostic string.
    """

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = dict(failures or {})


class GuardError(QltiError, ValueError):
    """A pole or degeneracy guard tripped."""


# ---------------------------------------------------------------------------
# fixed matrices


def symplectic_form(n: int) -> np.ndarray:
    """The ``2n x 2n`` matrix ``[[0, 1], [-1, 0]]`` in qq...pp ordering."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def block_symplectic_form(*sizes: int) -> np.ndarray:
    """Block-diagonal symplectic form, one qq...pp block per subsystem size."""
    blocks = [symplectic_form(k) for k in sizes if k > 0]
    return scipy.linalg.block_diag(*blocks) if blocks else np.zeros((0, 0))


def ladder_map(n: int) -> np.ndarray:
    r"""Unitary ``P`` with ``a = P^\dagger x`` and ``P^\dagger (iJ) P = diag(1, -1)``."""
    eye = np.eye(n)
    return np.block([[eye, eye], [-1j * eye, 1j * eye]]) / np.sqrt(2)


def indefinite_metric(p: int, q: int | None = None) -> np.ndarray:
    q = p if q is None else q
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)]))


def two_photon_map(n: int) -> np.ndarray:
    """The ``4n x 4n`` unitary taking ``[x(+w); x(-w)]`` to the two-photon quadratures.

    Rows ``0..2n`` give the ``A`` set ``(x(+w) + x(-w))/sqrt(2)``; rows ``2n..4n``
    give the ``B`` set ``-i (x(+w) - x(-w))/sqrt(2)``.
    """
    return ladder_map(2 * n)


# ---------------------------------------------------------------------------
# grid and sampled functions


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing, non-negative angular frequencies (rad/s)."""

    omega: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.omega, dtype=float)).copy()
        if w.ndim != 1 or w.size == 0:
            raise ValueError("frequency grid must be a non-empty 1-d sequence")
        if np.any(w < 0):
            raise ValueError("frequency grid entries must be >= 0")
        if np.any(np.diff(w) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        w.setflags(write=False)
        object.__setattr__(self, "omega", w)

    @classmethod
    def linear(cls, start: float, stop: float, count: int) -> "FrequencyGrid":
        return cls(np.linspace(start, stop, count))

    @classmethod
    def log(cls, start: float, stop: float, count: int) -> "FrequencyGrid":
        return cls(np.geomspace(start, stop, count))

    def __len__(self):
        return self.omega.size

    def __iter__(self):
        return iter(self.omega)

    def __eq__(self, other):
        return isinstance(other, FrequencyGrid) and np.array_equal(self.omega, other.omega)

    def __hash__(self):
        return hash(self.omega.tobytes())

    def locate(self, omega: float, atol: float = 1e-12) -> tuple[int, bool]:
        """Return ``(index, conjugate)`` for a signed frequency lying on the grid."""
        target = abs(float(omega))
        idx = int(np.argmin(np.abs(self.omega - target)))
        scale = max(1.0, abs(target))
        if abs(self.omega[idx] - target) > atol * scale:
            raise OffGridError(f"frequency {omega!r} is not on the grid")
        return idx, omega < 0

    def contains(self, omega: float, atol: float = 1e-12) -> bool:
        try:
            self.locate(omega, atol)
        except OffGridError:
            return False
        return True


@dataclass(frozen=True)
class MatrixFunction:
    """Frequency-sampled complex matrix function with ``F[-w] = F[w]^*``."""

    grid: FrequencyGrid
    samples: np.ndarray
    kind: str = "matrix"
    picture: str = "quadrature"

    def __post_init__(self):
        if self.picture not in ("quadrature", "ladder"):
            raise ValueError(f"unknown picture {self.picture!r}")
        s = np.array(self.samples, dtype=complex)
        if s.ndim == 2:
            s = s[None]
        if s.ndim != 3:
            raise ValueError("samples must have shape (n_freq, rows, cols)")
        if s.shape[0] != len(self.grid):
            raise GridMismatchError(
                f"{s.shape[0]} samples for a grid of {len(self.grid)} frequencies"
            )
        if self.picture == "quadrature" and self.grid.omega[0] == 0.0 and s[0].size:
            imag = np.max(np.abs(s[0].imag))
            if imag > REALNESS_TOL * max(1.0, np.max(np.abs(s[0]))):
                raise ValueError(
                    f"sample at w=0 must be real (max imaginary part {imag:.3e})"
                )
            s[0] = s[0].real
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def constant(cls, grid: FrequencyGrid, matrix, kind: str = "matrix") -> "MatrixFunction":
        m = np.asarray(matrix, dtype=complex)
        return cls(grid, np.broadcast_to(m, (len(grid),) + m.shape), kind)

    @classmethod
    def from_callable(cls, grid: FrequencyGrid, func, kind: str = "matrix") -> "MatrixFunction":
        return cls(grid, np.stack([np.asarray(func(w), dtype=complex) for w in grid.omega]), kind)

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape[1:]

    @property
    def rows(self) -> int:
        return self.samples.shape[1]

    @property
    def cols(self) -> int:
        return self.samples.shape[2]

    @property
    def omega(self) -> np.ndarray:
        return self.grid.omega

    def __len__(self):
        return len(self.grid)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.samples[k]

    def _negate(self, s: np.ndarray) -> np.ndarray:
        if self.picture == "quadrature":
            return s.conj()
        # ladder picture: A[-w] = X A[w]^* X with X swapping the two halves
        r, c = s.shape
        rows = np.roll(np.arange(r), r // 2)
        cols = np.roll(np.arange(c), c // 2)
        return s.conj()[np.ix_(rows, cols)]

    def at(self, omega: float) -> np.ndarray:
        """Sample at a signed on-grid frequency."""
        idx, conj = self.grid.locate(omega)
        s = self.samples[idx]
        return self._negate(s) if conj else s

    def interp(self, omega: float) -> np.ndarray:
        """Linear interpolation at any signed frequency inside the grid span."""
        target = abs(float(omega))
        w = self.grid.omega
        if target < w[0] - 1e-12 or target > w[-1] * (1 + 1e-12) + 1e-12:
            raise OffGridError(f"frequency {omega!r} outside the grid span")
        hi = int(np.searchsorted(w, target))
        if hi < len(w) and abs(w[hi] - target) <= 1e-12 * max(1.0, target):
            s = self.samples[hi]
        elif hi == 0:
            s = self.samples[0]
        elif hi >= len(w):
            s = self.samples[-1]
        else:
            t = (target - w[hi - 1]) / (w[hi] - w[hi - 1])
            s = (1 - t) * self.samples[hi - 1] + t * self.samples[hi]
        return self._negate(s) if omega < 0 else s

    def map(self, func, kind: str | None = None) -> "MatrixFunction":
        """Apply ``func`` to each stored sample."""
        return MatrixFunction(
            self.grid, np.stack([func(s) for s in self.samples]), kind or self.kind, self.picture
        )

    def _check_grid(self, other: "MatrixFunction"):
        if self.grid != other.grid:
            raise GridMismatchError("matrix functions live on different grids")

    def __matmul__(self, other: "MatrixFunction") -> "MatrixFunction":
        self._check_grid(other)
        return MatrixFunction(self.grid, self.samples @ other.samples, picture=self.picture)

    def dagger(self) -> "MatrixFunction":
        """Per-frequency conjugate transpose (not a function of ``-w``)."""
        return MatrixFunction(
            self.grid, np.conj(np.swapaxes(self.samples, 1, 2)), self.kind, self.picture
        )

    def block(self, rows, cols) -> "MatrixFunction":
        return MatrixFunction(self.grid, self.samples[:, rows][:, :, cols], self.kind, self.picture)

    def allclose(self, other: "MatrixFunction", atol: float = 1e-12) -> bool:
        self._check_grid(other)
        return self.shape == other.shape and np.allclose(self.samples, other.samples, atol=atol)


@dataclass(frozen=True)
class AlgebraElement:
    """Per-frequency generator ``Lambda`` with ``Lambda J`` Hermitian.

    ``hamiltonian_kernel`` gives ``J Lambda``, the coefficient matrix of the
    quadratic Hamiltonian ``1/2 x^T J Lambda x`` at each frequency.
    """

    grid: FrequencyGrid
    n: int
    Lambda: np.ndarray = field(repr=False)

    def hermiticity_residual(self) -> np.ndarray:
        J = symplectic_form(self.n)
        out = []
        for lam in self.Lambda:
            lj = lam @ J
            out.append(np.linalg.norm(lj - lj.conj().T))
        return np.array(out)

    def hamiltonian_kernel(self) -> np.ndarray:
        return symplectic_form(self.n) @ self.Lambda

    def as_matrix_function(self) -> MatrixFunction:
        return MatrixFunction(self.grid, self.Lambda, "algebra")


# ---------------------------------------------------------------------------
# group operations


def _mode_count(matrix: np.ndarray) -> int:
    r, c = matrix.shape
    if r != c:
        raise ValueError(f"expected a square matrix, got {r}x{c}")
    if r % 2:
        raise ValueError(f"expected an even dimension, got {r}")
    return r // 2


def conjugate_symplectic_residual(M, omega: float | None = None, J=None) -> float:
    """Frobenius norm of ``M J M^dagger - J``.

    ``M`` may be a plain matrix or a :class:`MatrixFunction` evaluated at ``omega``.
    A custom form ``J`` (e.g. block-diagonal) may be supplied.
    """
    if isinstance(M, MatrixFunction):
        if omega is None:
            raise ValueError("omega is required for a MatrixFunction")
        M = M.at(omega)
    M = np.asarray(M)
    if J is None:
        J = symplectic_form(_mode_count(M))
    if M.shape != J.shape:
        raise ValueError(f"matrix shape {M.shape} does not match form {J.shape}")
    return float(np.linalg.norm(M @ J @ M.conj().T - J))


def is_conjugate_symplectic(M, tol: float = DEFAULT_TOL) -> bool:
    M = np.asarray(M)
    J = symplectic_form(_mode_count(M))
    return conjugate_symplectic_residual(M, J=J) <= tol * np.linalg.norm(J)


def group_inverse(M: np.ndarray) -> np.ndarray:
    """Closed-form inverse ``-J M^dagger J`` of a conjugate-symplectic matrix."""
    J = symplectic_form(_mode_count(M))
    return -J @ M.conj().T @ J


def _random_hermitian(rng: np.random.Generator, dim: int, real: bool) -> np.ndarray:
    a = rng.standard_normal((dim, dim))
    if not real:
        a = a + 1j * rng.standard_normal((dim, dim))
    h = (a + a.conj().T) / 2
    norm = np.linalg.norm(h, 2)
    return h / norm if norm > 0 else h


def exp_algebra(Lambda: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(Lambda)


def random_group_element(
    n: int,
    seed: int | None = None,
    magnitude: float = 1.0,
    grid: FrequencyGrid | None = None,
) -> MatrixFunction:
    """Seeded random element ``exp(J H[w])`` with ``H[w]`` Hermitian, ``||H[w]||_2 = magnitude``.

    At ``w = 0`` the Hermitian matrix is real symmetric so the sample is real.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    grid = FrequencyGrid([1.0]) if grid is None else grid
    rng = np.random.default_rng(seed)
    J = symplectic_form(n)
    samples = []
    for w in grid.omega:
        h = magnitude * _random_hermitian(rng, 2 * n, real=(w == 0.0))
        m = scipy.linalg.expm(J @ h)
        samples.append(m.real if w == 0.0 else m)
    return MatrixFunction(grid, np.stack(samples))


def generator_of(M: MatrixFunction, tol: float = 1e-8) -> AlgebraElement:
    """Principal-branch generator ``Lambda[w]`` with ``exp(Lambda[w]) = M[w]``.

    Raises :class:`NumericalError` listing each frequency where an eigenvalue sits
    on the negative real axis or the logarithm leaves the algebra.
    """
    n = _mode_count(M.samples[0])
    J = symplectic_form(n)
    logs, failures = [], {}
    for k, m in enumerate(M.samples):
        ev = np.linalg.eigvals(m)
        on_cut = np.abs(ev.imag) <= 1e-12 * np.maximum(1.0, np.abs(ev))
        if np.any(on_cut & (ev.real < 0)):
            failures[k] = "eigenvalue on the negative real axis; principal log undefined"
            logs.append(np.full_like(m, np.nan))
            continue
        lam = scipy.linalg.logm(m)
        lj = lam @ J
        herm = np.linalg.norm(lj - lj.conj().T)
        back = np.linalg.norm(scipy.linalg.expm(lam) - m) / max(1.0, np.linalg.norm(m))
        scale = max(1.0, np.linalg.norm(lam))
        if herm > tol * scale or back > tol:
            failures[k] = f"log leaves the algebra (hermiticity {herm:.2e}, roundtrip {back:.2e})"
        if M.omega[k] == 0.0:
            lam = lam.real
        logs.append(lam)
    if failures:
        raise NumericalError(
            f"generator undefined at {len(failures)} frequenc(ies): {sorted(failures)}",
            failures,
        )
    return AlgebraElement(M.grid, n, np.stack(logs))


def to_ladder(M) -> MatrixFunction | np.ndarray:
    """``P^dagger M P``: quadrature picture to creation/annihilation picture."""
    if isinstance(M, MatrixFunction):
        if M.picture != "quadrature":
            raise ValueError("input is already in the ladder picture")
        P = ladder_map(_mode_count(M.samples[0]))
        return MatrixFunction(M.grid, P.conj().T @ M.samples @ P, M.kind, "ladder")
    M = np.asarray(M)
    P = ladder_map(_mode_count(M))
    return P.conj().T @ M @ P


def from_ladder(A) -> MatrixFunction | np.ndarray:
    """Inverse of :func:`to_ladder`."""
    if isinstance(A, MatrixFunction):
        if A.picture != "ladder":
            raise ValueError("input is not in the ladder picture")
        P = ladder_map(_mode_count(A.samples[0]))
        return MatrixFunction(A.grid, P @ A.samples @ P.conj().T, A.kind)
    A = np.asarray(A)
    P = ladder_map(_mode_count(A))
    return P @ A @ P.conj().T


def two_photon_embed(M: MatrixFunction | np.ndarray, omega: float | None = None) -> np.ndarray:
    """Real ``4n x 4n`` action of ``M`` on the two-photon quadratures at ``omega``.

    Returns ``PP diag(M[+w], M[-w]) PP^dagger`` which, for conjugate-symplectic
    ``M``, is in ``Sp(4n, R)`` with respect to ``diag(J_2n, J_2n)``.
    """
    if isinstance(M, MatrixFunction):
        if omega is None:
            raise ValueError("omega is required for a MatrixFunction")
        plus, minus = M.at(omega), M.at(-omega)
    else:
        plus = np.asarray(M)
        minus = plus.conj()
    n = _mode_count(plus)
    PP = two_photon_map(n)
    X = PP @ scipy.linalg.block_diag(plus, minus) @ PP.conj().T
    imag = np.max(np.abs(X.imag))
    if imag > REALNESS_TOL * max(1.0, np.max(np.abs(X))):
        raise NumericalError(f"two-photon embedding is not real (imag {imag:.2e})")
    return X.real
