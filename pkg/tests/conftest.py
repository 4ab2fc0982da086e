"""Shared fixtures and independent oracles."""

import numpy as np
import pytest
from scipy.linalg import expm

from tfcluster.bogoliubov import BogoliubovPair, compose
from tfcluster.raman import PhasePair, RamanBS, RamanTMS, bogoliubov

TOL = 1e-10


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tol():
    return TOL


def random_two_mode_op(rng, max_r=1.0):
    kind = rng.integers(3)
    if kind == 0:
        return RamanBS(rng.uniform(-np.pi, np.pi), rng.uniform(0, 2 * np.pi))
    if kind == 1:
        return RamanTMS(rng.uniform(0, max_r), rng.uniform(0, 2 * np.pi))
    return PhasePair(rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))


def random_chain_pair(rng, n_modes, length=6, max_r=1.0) -> BogoliubovPair:
    """Random valid pair built from BS/TMS/phase operations on random mode pairs."""
    pairs = []
    for _ in range(length):
        targets = rng.choice(n_modes, size=2, replace=False)
        op = random_two_mode_op(rng, max_r)
        pairs.append(bogoliubov(op).embed(n_modes, targets))
    return compose(*pairs)


# ---------------------------------------------------------------------------
# truncated Fock-space oracles


def annihilation(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1)


def fock_vacuum_overlap_squeezed(r, cutoff=80):
    """|<0|S(r)|0>|^2 with S built by exponentiating the truncated generator."""
    a = annihilation(cutoff)
    gen = 0.5 * r * (a @ a - a.T @ a.T)
    S = expm(gen)
    return abs(S[0, 0]) ** 2


def fock_lossy_tms_fidelity(r, delta_eta, cutoff=200):
    """<psi| (I x L)(|psi><psi|) |psi> for a two-mode squeezed |psi> and a loss
    channel L of transmissivity 1 - delta_eta on the second mode.

    The Kraus operator K_k removes k photons from the second mode, so only
    K_0 |n, n> = (1 - delta_eta)^(n/2) |n, n> overlaps with |psi>.
    """
    n = np.arange(cutoff)
    weights = np.tanh(r) ** (2 * n) / np.cosh(r) ** 2
    return float(np.sum(weights * (1.0 - delta_eta) ** (n / 2))) ** 2


def fock_cz_heisenberg(cutoff=60, levels=4):
    """Matrix elements of ``U^dag a_k U`` for ``U = exp(i q_1 q_2)`` on the
    lowest ``levels`` x ``levels`` number states, next to the same elements of
    the annihilation and creation operators, for fitting a Bogoliubov row."""
    import scipy.sparse as sp
    from scipy.sparse.linalg import expm_multiply

    a = sp.diags(np.sqrt(np.arange(1, cutoff)), 1)
    eye = sp.identity(cutoff)
    q = (a + a.T) / np.sqrt(2)
    generator = 1j * sp.kron(q, q).tocsc()
    low = [i * cutoff + j for i in range(levels) for j in range(levels)]
    basis = np.zeros((cutoff * cutoff, len(low)), dtype=complex)
    basis[low, np.arange(len(low))] = 1.0
    evolved = expm_multiply(generator, basis)
    modes = [sp.kron(a, eye), sp.kron(eye, a)]
    heis = [evolved.conj().T @ (m @ evolved) for m in modes]
    plain = [m.toarray()[np.ix_(low, low)] for m in modes]
    return heis, plain


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion that ran."""
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number].line())
