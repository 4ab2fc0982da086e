"""Gaussian states over bosonic modes and the operations acting on them.

Conventions used throughout the package:

* quadratures ordered per mode, ``(q_1, p_1, q_2, p_2, ...)``;
* ``q = (a + a^dag)/sqrt(2)``, ``p = (a - a^dag)/(i sqrt(2))`` with hbar = 1, so
  the vacuum covariance is ``I/2``;
* fidelities are Uhlmann fidelities ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

States and operations are immutable; every function returns a new state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import eigh, expm, schur, sqrtm

VACUUM_VARIANCE = 0.5

SYMMETRY_TOL = 1e-12
SYMPLECTIC_TOL = 1e-10
PHYSICAL_TOL = 1e-9
# deviation of purity from one below which the pure-state overlap formula is used
PURE_TOL = 1e-10


def omega(n: int) -> np.ndarray:
    """Canonical symplectic form for ``n`` modes in (q, p) per-mode ordering."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _as_symmetric(cov: np.ndarray) -> np.ndarray:
    return 0.5 * (cov + cov.T)


@dataclass(frozen=True)
class GaussianState:
    """Mean quadrature vector and covariance matrix of an ``n_modes`` Gaussian state.

    The covariance is symmetrised on construction; a relative asymmetry above
    ``SYMMETRY_TOL`` is rejected as a malformed input rather than silently fixed.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError(f"Invalid covariance shape {cov.shape}")
        if mean.shape[0] != cov.shape[0]:
            raise ValueError(
                f"Mean vector of length {mean.shape[0]} does not match covariance {cov.shape}"
            )
        if cov.shape[0] == 0:
            raise ValueError("A Gaussian state needs at least one mode")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise ValueError("Covariance matrix is not symmetric")
        mean.setflags(write=False)
        cov = _as_symmetric(cov)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def mode_block(self, mode: int) -> np.ndarray:
        i = _check_mode(self, mode)
        return np.array(self.cov[2 * i : 2 * i + 2, 2 * i : 2 * i + 2])

    @property
    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    @property
    def purity(self) -> float:
        return purity(self)

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        """True when the uncertainty relation ``cov + i Omega / 2 >= 0`` holds."""
        return bool(np.all(self.symplectic_eigenvalues >= VACUUM_VARIANCE - tol))


@dataclass(frozen=True)
class SymplecticOp:
    """Affine symplectic map ``x -> S x + d`` on the quadratures of ``n`` modes."""

    matrix: np.ndarray
    displacement: np.ndarray = field(default=None)

    def __post_init__(self):
        S = np.asarray(self.matrix, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise ValueError(f"Invalid symplectic matrix shape {S.shape}")
        n = S.shape[0] // 2
        residual = np.max(np.abs(S.T @ omega(n) @ S - omega(n)))
        if residual > SYMPLECTIC_TOL * max(1.0, np.max(np.abs(S)) ** 2):
            raise ValueError(f"Matrix is not symplectic (residual {residual:.3e})")
        d = np.zeros(2 * n) if self.displacement is None else np.asarray(
            self.displacement, dtype=float
        ).reshape(-1)
        if d.shape != (2 * n,):
            raise ValueError("Displacement length does not match the matrix")
        S.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "matrix", S)
        object.__setattr__(self, "displacement", d)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def then(self, other: "SymplecticOp") -> "SymplecticOp":
        """The map applying ``self`` first and ``other`` second."""
        if other.n_modes != self.n_modes:
            raise ValueError("Cannot compose operations on different mode counts")
        return SymplecticOp(
            other.matrix @ self.matrix,
            other.matrix @ self.displacement + other.displacement,
        )

    def inverse(self) -> "SymplecticOp":
        n = self.n_modes
        S_inv = -omega(n) @ self.matrix.T @ omega(n)
        return SymplecticOp(S_inv, -S_inv @ self.displacement)

    @classmethod
    def identity(cls, n: int) -> "SymplecticOp":
        return cls(np.eye(2 * n))


def is_symplectic(S: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    S = np.asarray(S, dtype=float)
    n = S.shape[0] // 2
    return bool(np.max(np.abs(S.T @ omega(n) @ S - omega(n))) <= tol * max(1.0, np.max(np.abs(S)) ** 2))


def _check_mode(state: GaussianState, mode) -> int:
    i = int(mode)
    if i != mode or not 0 <= i < state.n_modes:
        raise IndexError(f"Mode {mode} out of range for a {state.n_modes}-mode state")
    return i


def _quad_indices(modes: Iterable[int]) -> np.ndarray:
    return np.array([2 * m + k for m in modes for k in (0, 1)], dtype=int)


# ---------------------------------------------------------------------------
# state preparation


def vacuum(n: int = 1) -> GaussianState:
    if int(n) != n or n < 1:
        raise ValueError(f"Number of modes must be a positive integer, got {n}")
    return GaussianState(np.zeros(2 * n), VACUUM_VARIANCE * np.eye(2 * n))


def squeezed_vacuum(r: float) -> GaussianState:
    """Single-mode squeezed vacuum; ``r > 0`` squeezes the momentum quadrature."""
    if not np.isfinite(r):
        raise ValueError(f"Squeezing parameter must be finite, got {r}")
    return GaussianState(
        np.zeros(2), VACUUM_VARIANCE * np.diag([np.exp(2 * r), np.exp(-2 * r)])
    )


def coherent(alpha: complex) -> GaussianState:
    alpha = complex(alpha)
    return GaussianState(
        np.sqrt(2) * np.array([alpha.real, alpha.imag]), VACUUM_VARIANCE * np.eye(2)
    )


def thermal(nbar: float) -> GaussianState:
    if nbar < 0:
        raise ValueError("Mean photon number must be non-negative")
    return GaussianState(np.zeros(2), (nbar + VACUUM_VARIANCE) * np.eye(2))


def db_to_r(db: float) -> float:
    """Squeezing parameter for a squeezing level given in decibels.

    Equivalent to ``-log(10 ** (-dB / 10)) / 2``.
    """
    if not np.isfinite(db):
        raise ValueError(f"Squeezing in dB must be finite, got {db}")
    return float(db) * np.log(10.0) / 20.0


def r_to_db(r: float) -> float:
    return 20.0 * float(r) / np.log(10.0)


# ---------------------------------------------------------------------------
# elementary symplectic maps


def rotation(theta: float) -> SymplecticOp:
    """Phase shift ``a -> exp(i theta) a`` on a single mode."""
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticOp(np.array([[c, -s], [s, c]]))


def squeezer(r: float) -> SymplecticOp:
    """Single-mode squeezer mapping vacuum to ``squeezed_vacuum(r)``."""
    return SymplecticOp(np.diag([np.exp(r), np.exp(-r)]))


def displacement(q: float, p: float) -> SymplecticOp:
    return SymplecticOp(np.eye(2), np.array([q, p], dtype=float))


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.5) -> SymplecticOp:
    """Random symplectic matrix ``expm(Omega H)`` with ``H`` random symmetric."""
    H = rng.normal(scale=scale, size=(2 * n, 2 * n))
    H = H + H.T
    return SymplecticOp(expm(omega(n) @ H))


# ---------------------------------------------------------------------------
# structural operations


def apply(state: GaussianState, op: SymplecticOp, targets: Sequence[int]) -> GaussianState:
    """Apply ``op`` to the modes ``targets`` of ``state`` (in that order)."""
    targets = [_check_mode(state, t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"Repeated target modes {targets}")
    if op.n_modes != len(targets):
        raise ValueError(
            f"Operation acts on {op.n_modes} modes but {len(targets)} targets were given"
        )
    idx = _quad_indices(targets)
    S = op.matrix
    mean = state.mean.copy()
    mean[idx] = S @ mean[idx] + op.displacement
    # only the target rows and columns change
    cov = state.cov.copy()
    cov[idx, :] = S @ cov[idx, :]
    cov[:, idx] = cov[:, idx] @ S.T
    return GaussianState(mean, cov)


def tensor(*states: GaussianState) -> GaussianState:
    if not states:
        raise ValueError("tensor needs at least one state")
    dim = sum(s.cov.shape[0] for s in states)
    cov = np.zeros((dim, dim))
    start = 0
    for s in states:
        k = s.cov.shape[0]
        cov[start : start + k, start : start + k] = s.cov
        start += k
    return GaussianState(np.concatenate([s.mean for s in states]), cov)


def reduced(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    """Marginal state on ``modes``, in the order given."""
    modes = [_check_mode(state, m) for m in modes]
    if not modes:
        raise ValueError("Cannot keep zero modes")
    if len(set(modes)) != len(modes):
        raise ValueError(f"Repeated modes {modes}")
    idx = _quad_indices(modes)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def trace_out(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    drop = {_check_mode(state, m) for m in modes}
    keep = [m for m in range(state.n_modes) if m not in drop]
    if not keep:
        raise ValueError("Cannot trace out every mode of a state")
    return reduced(state, keep)


def permute(state: GaussianState, order: Sequence[int]) -> GaussianState:
    """Reorder modes so that new mode ``k`` is old mode ``order[k]``."""
    if sorted(order) != list(range(state.n_modes)):
        raise ValueError("order must be a permutation of all modes")
    return reduced(state, order)


def lossy_coupling(state: GaussianState, mode: int, delta_eta: float) -> GaussianState:
    """Mix ``mode`` with a fresh vacuum on a beam splitter of transmissivity
    ``1 - delta_eta`` and discard the vacuum port."""
    if not 0.0 <= delta_eta <= 1.0:
        raise ValueError(f"delta_eta must lie in [0, 1], got {delta_eta}")
    i = _check_mode(state, mode)
    amp = np.sqrt(1.0 - delta_eta)
    scale = np.ones(2 * state.n_modes)
    scale[2 * i : 2 * i + 2] = amp
    cov = state.cov * np.outer(scale, scale)
    cov[2 * i, 2 * i] += delta_eta * VACUUM_VARIANCE
    cov[2 * i + 1, 2 * i + 1] += delta_eta * VACUUM_VARIANCE
    return GaussianState(state.mean * scale, cov)


def homodyne(state: GaussianState, mode: int, angle: float, outcome: float) -> GaussianState:
    """Condition on the outcome of measuring ``cos(angle) q + sin(angle) p`` of ``mode``.

    The measured mode is removed. A measured quadrature with vanishing
    variance is handled with a pseudo-inverse.
    """
    i = _check_mode(state, mode)
    if not np.isfinite(outcome):
        raise ValueError(f"Homodyne outcome must be finite, got {outcome}")
    if state.n_modes == 1:
        raise ValueError("Homodyne on a single-mode state leaves no modes")
    state = apply(state, rotation(-angle), [i])
    keep = [m for m in range(state.n_modes) if m != i]
    a = _quad_indices(keep)
    var_x = state.cov[2 * i, 2 * i]
    cross = state.cov[a, 2 * i]
    gain = cross / var_x if var_x > 1e-300 else np.zeros_like(cross)
    cov = state.cov[np.ix_(a, a)] - np.outer(gain, cross)
    mean = state.mean[a] + gain * (outcome - state.mean[2 * i])
    return GaussianState(mean, cov)


# ---------------------------------------------------------------------------
# invariants


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Williamson spectrum of ``cov``, sorted ascending, one value per mode."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    vals = np.abs(np.linalg.eigvals(1j * omega(n) @ cov))
    return np.sort(vals)[::2]


def purity(state: GaussianState) -> float:
    """``tr rho^2`` = ``1 / (2^N sqrt(det cov))`` in the vacuum-1/2 convention."""
    sign, logdet = np.linalg.slogdet(2.0 * state.cov)
    if sign <= 0:
        raise ValueError("Covariance matrix is not positive definite")
    return float(np.exp(-0.5 * logdet))


def fidelity(a: GaussianState, b: GaussianState) -> float:
    """Uhlmann fidelity between two Gaussian states."""
    if a.n_modes != b.n_modes:
        raise ValueError(f"Mode counts differ: {a.n_modes} vs {b.n_modes}")
    if np.array_equal(a.cov, b.cov) and np.array_equal(a.mean, b.mean):
        return 1.0
    total = a.cov + b.cov
    delta = a.mean - b.mean
    sign, logdet = np.linalg.slogdet(total)
    if sign <= 0:
        raise ValueError("Sum of covariance matrices is not positive definite")
    exponent = float(delta @ np.linalg.solve(total, delta))

    if min(1.0 - purity(a), 1.0 - purity(b)) < PURE_TOL:
        # overlap <psi|rho|psi> with a pure state
        value = np.exp(-0.5 * logdet - 0.5 * exponent)
    else:
        value = _mixed_fidelity(a.cov, b.cov) * np.exp(-0.5 * exponent)
    return float(min(max(value, 0.0), 1.0))


def williamson(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic diagonalisation ``S cov S^T = diag(nu_1, nu_1, nu_2, nu_2, ...)``.

    Args:
        cov: Positive-definite covariance matrix.

    Returns:
        ``(S, nus)`` with ``S`` symplectic and ``nus`` the per-quadrature spectrum.
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    w, U = eigh(cov)
    inv_sqrt = (U / np.sqrt(w)) @ U.T
    T, Z = schur(inv_sqrt @ omega(n) @ inv_sqrt, output="real")
    nus = np.empty(n)
    for k in range(n):
        b = T[2 * k, 2 * k + 1]
        if b < 0:
            Z[:, [2 * k, 2 * k + 1]] = Z[:, [2 * k + 1, 2 * k]]
            b = -b
        nus[k] = 1.0 / b
    diag = np.repeat(nus, 2)
    return (np.sqrt(diag)[:, None] * Z.T) @ inv_sqrt, diag


def _mixed_fidelity(V1: np.ndarray, V2: np.ndarray, total: np.ndarray | None = None) -> float:
    # Whitening V1 to its Williamson form first keeps the closed form accurate
    # when a symplectic eigenvalue sits close to 1/2; fidelity is invariant.
    S, diag = williamson(V1)
    V2 = S @ V2 @ S.T
    V2 = 0.5 * (V2 + V2.T)
    V1 = np.diag(diag)
    total = V1 + V2
    # general closed form for zero-mean states (Banchi, Braunstein, Pirandola 2015)
    n = V1.shape[0] // 2
    W = omega(n)
    V_aux = W.T @ np.linalg.solve(total, W / 4.0 + V2 @ W @ V1)
    M = np.linalg.inv(V_aux @ W)
    inner = sqrtm(np.eye(2 * n) + 0.25 * M @ M)
    num = np.linalg.det(2.0 * (inner + np.eye(2 * n)) @ V_aux)
    root_fid = (np.real(num) / np.linalg.det(total)) ** 0.25
    return float(root_fid**2)
