"""Bogoliubov transformations and their Bloch-Messiah reduction.

A Gaussian unitary acts on annihilation operators as
``b_j = sum_k A_jk a_k + B_jk a_k^dag``; the pair ``(A, B)`` is stored as a
:class:`BogoliubovPair`.  :func:`reduce` factors a pair into
``A = U A_D V^dag`` and ``B = U B_D V^T`` (interferometer, parallel
squeezers, interferometer).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import qr

BOGOLIUBOV_TOL = 1e-10
# relative gap below which singular values are treated as degenerate
DEGENERACY_TOL = 1e-9
# B entries below this count as rounding noise, not squeezing
UNSQUEEZED_TOL = 1e-13


class BlochMessiahError(RuntimeError):
    """Raised when a reduction cannot meet its reconstruction tolerance."""


@dataclass(frozen=True)
class BogoliubovPair:
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        B = np.array(self.B, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
            raise ValueError(f"A and B must be equal square matrices, got {A.shape}, {B.shape}")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n_modes(self) -> int:
        return self.A.shape[0]

    @classmethod
    def identity(cls, n: int) -> "BogoliubovPair":
        return cls(np.eye(n), np.zeros((n, n)))

    @classmethod
    def passive(cls, U) -> "BogoliubovPair":
        U = np.asarray(U, dtype=complex)
        return cls(U, np.zeros_like(U))

    @classmethod
    def phases(cls, thetas: Sequence[float]) -> "BogoliubovPair":
        """Per-mode phase shifts ``a_k -> exp(i theta_k) a_k``."""
        return cls.passive(np.diag(np.exp(1j * np.asarray(thetas, dtype=float))))

    def then(self, other: "BogoliubovPair") -> "BogoliubovPair":
        """Transformation applying ``self`` first, then ``other``."""
        if other.n_modes != self.n_modes:
            raise ValueError("Cannot compose transformations on different mode counts")
        A = other.A @ self.A + other.B @ self.B.conj()
        B = other.A @ self.B + other.B @ self.A.conj()
        return BogoliubovPair(A, B)

    def embed(self, n: int, targets: Sequence[int]) -> "BogoliubovPair":
        """Act on ``targets`` of an ``n``-mode system, identity elsewhere."""
        targets = list(targets)
        if len(targets) != self.n_modes or len(set(targets)) != len(targets):
            raise ValueError("targets must be distinct and match the transformation size")
        A = np.eye(n, dtype=complex)
        B = np.zeros((n, n), dtype=complex)
        idx = np.ix_(targets, targets)
        A[idx] = self.A
        B[idx] = self.B
        return BogoliubovPair(A, B)

    def allclose(self, other: "BogoliubovPair", atol: float = BOGOLIUBOV_TOL) -> bool:
        return bool(
            np.allclose(self.A, other.A, rtol=0, atol=atol)
            and np.allclose(self.B, other.B, rtol=0, atol=atol)
        )


def compose(*pairs: BogoliubovPair) -> BogoliubovPair:
    """Compose transformations listed in the order they act."""
    if not pairs:
        raise ValueError("compose needs at least one transformation")
    total = pairs[0]
    for p in pairs[1:]:
        total = total.then(p)
    return total


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    unitarity_residual: float
    symmetry_residual: float

    def __bool__(self):
        return self.valid


def validate(pair: BogoliubovPair, tol: float = BOGOLIUBOV_TOL) -> ValidationReport:
    """Check ``A A^dag - B B^dag = I`` and ``A B^T = B A^T``."""
    A, B = pair.A, pair.B
    n = pair.n_modes
    unitarity = float(np.max(np.abs(A @ A.conj().T - B @ B.conj().T - np.eye(n))))
    symmetry = float(np.max(np.abs(A @ B.T - B @ A.T)))
    return ValidationReport(unitarity <= tol and symmetry <= tol, unitarity, symmetry)


# ---------------------------------------------------------------------------
# quadrature picture

def _xxpp_to_xpxp(n: int) -> np.ndarray:
    perm = np.empty(2 * n, dtype=int)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n, 2 * n)
    return perm


def symplectic_matrix(pair: BogoliubovPair) -> np.ndarray:
    """Real symplectic matrix acting on ``(q_1, p_1, q_2, p_2, ...)``."""
    A, B = pair.A, pair.B
    S = np.block([[(A + B).real, -(A - B).imag], [(A + B).imag, (A - B).real]])
    perm = _xxpp_to_xpxp(pair.n_modes)
    return S[np.ix_(perm, perm)]


def from_symplectic(S: np.ndarray) -> BogoliubovPair:
    """Inverse of :func:`symplectic_matrix`."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0] // 2
    perm = _xxpp_to_xpxp(n)
    X = np.empty_like(S)
    X[np.ix_(perm, perm)] = S
    S11, S12, S21, S22 = X[:n, :n], X[:n, n:], X[n:, :n], X[n:, n:]
    A = 0.5 * (S11 + S22 + 1j * (S21 - S12))
    B = 0.5 * (S11 - S22 + 1j * (S21 + S12))
    return BogoliubovPair(A, B)


# ---------------------------------------------------------------------------
# Bloch-Messiah

@dataclass(frozen=True)
class BlochMessiahFactors:
    U: np.ndarray
    V: np.ndarray
    A_D: np.ndarray
    B_D: np.ndarray

    @property
    def squeezing(self) -> np.ndarray:
        """Single-mode squeezing parameters ``arcsinh`` of the diagonal of ``B_D``."""
        return np.arcsinh(np.diag(self.B_D))


def reconstruct(factors: BlochMessiahFactors) -> BogoliubovPair:
    U, V = factors.U, factors.V
    return BogoliubovPair(U @ factors.A_D @ V.conj().T, U @ factors.B_D @ V.T)


def _takagi_equal(M: np.ndarray) -> np.ndarray:
    """Unitary ``W`` with ``W^dag M conj(W)`` real diagonal and non-negative.

    Works from the real symmetric embedding ``[[Re M, Im M], [Im M, -Re M]]``,
    whose positive eigenvectors ``(x, y)`` give the Takagi vectors ``x + iy``.
    Requires all Takagi values of ``M`` to be strictly positive.
    """
    k = M.shape[0]
    P, Q = M.real, M.imag
    H = np.block([[P, Q], [Q, -P]])
    vals, vecs = np.linalg.eigh(H)
    pos = vecs[:, k:]
    return pos[:k] + 1j * pos[k:]


def _group_degenerate(values: np.ndarray) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        if groups and abs(values[groups[-1][0]] - v) <= DEGENERACY_TOL * max(1.0, v):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _column_key(col: np.ndarray) -> tuple:
    return tuple(np.round(np.concatenate([col.real, col.imag]), 9))


def _canonical_rotation(cols: np.ndarray, real: bool) -> np.ndarray:
    """Basis change inside a degenerate block that depends only on its span.

    Squeezed blocks admit a real orthogonal rotation, unsqueezed ones any
    unitary.  Column-pivoted QR of the (realified) block picks rows by norms
    that do not depend on the basis, then triangularises it.
    """
    if real:
        stacked = np.empty((2 * cols.shape[0], cols.shape[1]))
        stacked[0::2], stacked[1::2] = cols.real, cols.imag
    else:
        stacked = cols
    Q, R, _ = qr(stacked.conj().T, pivoting=True)
    diag = np.diag(R)
    if real:
        return Q * np.where(diag < 0, -1.0, 1.0)
    mags = np.abs(diag)
    # makes the triangular diagonal of cols @ Q real and positive
    return Q * np.divide(diag, mags, out=np.ones_like(diag), where=mags > 0)


def reduce(pair: BogoliubovPair, tol: float = BOGOLIUBOV_TOL) -> BlochMessiahFactors:
    """Bloch-Messiah reduction of a valid Bogoliubov pair.

    ``A_D`` is sorted in descending order.  Inside a block of degenerate
    singular values the basis is first made a function of the block's span
    (:func:`_canonical_rotation`), then the columns are ordered
    lexicographically by the corresponding column of ``V``.  The remaining
    gauge freedom is fixed by
    making the first significant entry of every ``U`` column real and positive
    when that mode is unsqueezed, and of non-negative real part otherwise (a
    squeezed mode only admits a sign flip).

    Raises:
        ValueError: if the pair is not a valid Bogoliubov transformation.
        BlochMessiahError: if the factors fail to reproduce the pair.
    """
    report = validate(pair, tol)
    if not report:
        raise ValueError(
            "Not a valid Bogoliubov transformation "
            f"(unitarity residual {report.unitarity_residual:.3e}, "
            f"symmetry residual {report.symmetry_residual:.3e})"
        )
    A, B = pair.A, pair.B
    U, sigma, Vh = np.linalg.svd(A)
    V = Vh.conj().T
    # M is block diagonal over degenerate groups and symmetric inside each block
    M = U.conj().T @ B @ V.conj()

    for group in _group_degenerate(sigma):
        g = np.array(group)
        block = M[np.ix_(g, g)]
        # squeezing can be real yet far below sigma's resolution, so test B itself
        squeezed = np.max(np.abs(block)) > UNSQUEEZED_TOL * max(1.0, sigma[g[0]])
        if squeezed:
            W = _takagi_equal(0.5 * (block + block.T))
            U[:, g] = U[:, g] @ W
            V[:, g] = V[:, g] @ W
        if len(g) > 1:
            W = _canonical_rotation(U[:, g], real=squeezed)
            U[:, g] = U[:, g] @ W
            V[:, g] = V[:, g] @ W
            order = sorted(range(len(g)), key=lambda j: _column_key(V[:, g[j]]))
            U[:, g] = U[:, g[order]]
            V[:, g] = V[:, g[order]]

    # gauge fixing
    B_diag = np.real(np.diag(U.conj().T @ B @ V.conj()))
    for k in range(pair.n_modes):
        col = U[:, k]
        lead = col[np.argmax(np.abs(col) > 1e-8)]
        if B_diag[k] > 1e-12:
            phase = -1.0 if lead.real < 0 else 1.0
        else:
            phase = np.conj(lead) / abs(lead)
        U[:, k] *= phase
        V[:, k] *= phase

    A_D = np.diag(sigma)
    # read B_D off the diagonalised block: sqrt(sigma^2 - 1) loses half the
    # digits for unsqueezed modes
    B_D = np.diag(np.maximum(np.real(np.diag(U.conj().T @ B @ V.conj())), 0.0))
    factors = BlochMessiahFactors(U, V, A_D, B_D)

    rebuilt = reconstruct(factors)
    residual = max(np.max(np.abs(rebuilt.A - A)), np.max(np.abs(rebuilt.B - B)))
    scale = max(1.0, float(np.max(sigma)))
    if residual > tol * scale:
        raise BlochMessiahError(f"Reconstruction residual {residual:.3e} exceeds {tol:.1e}")
    return factors


# ---------------------------------------------------------------------------
# the CZ gate

def cz_bogoliubov(weight: float = 1.0) -> BogoliubovPair:
    """``exp(i g q_1 q_2)``: ``p_1 -> p_1 + g q_2`` and ``p_2 -> p_2 + g q_1``.

    Derived from ``a_1 -> a_1 + i g q_2 / sqrt(2)`` with ``q_2 = (a_2 + a_2^dag)/sqrt(2)``.
    """
    g = 0.5j * weight
    A = np.array([[1.0, g], [g, 1.0]])
    B = np.array([[0.0, g], [g, 0.0]])
    return BogoliubovPair(A, B)


def cz_symplectic(weight: float = 1.0) -> np.ndarray:
    g = weight
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, g, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [g, 0.0, 0.0, 1.0],
        ]
    )
