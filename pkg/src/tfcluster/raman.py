"""Raman memory interactions between a field mode and a stationary memory mode.

With a bright control field the Raman coupling reduces either to a beam
splitter (:class:`RamanBS`) or to a two-mode squeezer (:class:`RamanTMS`).
Both act on the ordered pair ``(field, memory)``.  The coupling constant and
interaction time only ever enter through the effective parameters
``(phi, theta)`` and ``(r, psi)``, so they are not represented separately.

Phase shifts preceding an interaction can be moved behind it by retuning the
control-field phase (:func:`commute_phases_bs`, :func:`commute_phases_tms`);
:func:`rewrite_chain` applies this repeatedly to an arbitrary chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .bogoliubov import BogoliubovPair, compose, symplectic_matrix, validate
from .gaussian import SymplecticOp


@dataclass(frozen=True)
class RamanBS:
    phi: float
    theta: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.phi) and np.isfinite(self.theta)):
            raise ValueError("Beam splitter parameters must be finite")

    @property
    def coupling(self) -> float:
        """Fraction of the field excitation transferred into the memory, ``sin^2 phi``."""
        return float(np.sin(self.phi) ** 2)


@dataclass(frozen=True)
class RamanTMS:
    """Two-mode squeezer; a negative ``r`` is folded into ``psi``."""

    r: float
    psi: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.r) and np.isfinite(self.psi)):
            raise ValueError("Squeezing parameters must be finite")
        if self.r < 0:
            object.__setattr__(self, "r", -self.r)
            object.__setattr__(self, "psi", self.psi + np.pi)

    @property
    def db(self) -> float:
        return 20.0 * self.r / np.log(10.0)


@dataclass(frozen=True)
class PhasePair:
    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.theta1) and np.isfinite(self.theta2)):
            raise ValueError("Phases must be finite")

    def __add__(self, other: "PhasePair") -> "PhasePair":
        return PhasePair(self.theta1 + other.theta1, self.theta2 + other.theta2)

    def __neg__(self) -> "PhasePair":
        return PhasePair(-self.theta1, -self.theta2)


ChainOp = Union[RamanBS, RamanTMS, PhasePair]


def bs_bogoliubov(op: RamanBS) -> BogoliubovPair:
    c, s = np.cos(op.phi), np.sin(op.phi)
    A = np.array(
        [[c, np.exp(-1j * op.theta) * s], [-np.exp(1j * op.theta) * s, c]], dtype=complex
    )
    return BogoliubovPair.passive(A)


def tms_bogoliubov(op: RamanTMS) -> BogoliubovPair:
    mu, nu = np.cosh(op.r), np.sinh(op.r)
    B = np.exp(1j * op.psi) * nu * np.array([[0, 1], [1, 0]], dtype=complex)
    return BogoliubovPair(mu * np.eye(2), B)


def phase_bogoliubov(op: PhasePair) -> BogoliubovPair:
    return BogoliubovPair.phases([op.theta1, op.theta2])


def bogoliubov(op: ChainOp) -> BogoliubovPair:
    if isinstance(op, RamanBS):
        return bs_bogoliubov(op)
    if isinstance(op, RamanTMS):
        return tms_bogoliubov(op)
    if isinstance(op, PhasePair):
        return phase_bogoliubov(op)
    raise TypeError(f"Not a two-mode chain operation: {op!r}")


def chain_bogoliubov(ops: Iterable[ChainOp]) -> BogoliubovPair:
    """Total transformation of a chain listed in time order."""
    pairs = [bogoliubov(op) for op in ops]
    return compose(*pairs) if pairs else BogoliubovPair.identity(2)


def to_symplectic(pair: BogoliubovPair) -> SymplecticOp:
    report = validate(pair)
    if not report:
        raise ValueError(
            "Cannot convert an invalid Bogoliubov pair "
            f"(residuals {report.unitarity_residual:.3e}, {report.symmetry_residual:.3e})"
        )
    return SymplecticOp(symplectic_matrix(pair))


def op_symplectic(op: ChainOp) -> SymplecticOp:
    return to_symplectic(bogoliubov(op))


def commute_phases_bs(phases: PhasePair, phi: float) -> tuple[RamanBS, PhasePair]:
    """Rewrite ``phases`` followed by a real beam splitter ``phi`` as a Raman
    beam splitter with control phase ``theta1 - theta2`` followed by the same
    phases."""
    return RamanBS(phi, phases.theta1 - phases.theta2), phases


def commute_phases_tms(phases: PhasePair, r: float) -> tuple[RamanTMS, PhasePair]:
    """Same as :func:`commute_phases_bs` for a real two-mode squeezer; the
    control phase becomes ``-(theta1 + theta2)``."""
    return RamanTMS(r, -(phases.theta1 + phases.theta2)), phases


def rewrite_chain(ops: Iterable[ChainOp]) -> tuple[list[Union[RamanBS, RamanTMS]], PhasePair]:
    """Push every phase shift of a chain to its end.

    Each Raman operation with control phase ``c`` is first split into
    ``-c`` on the memory, the real interaction, and ``+c`` on the memory; the
    accumulated phases are then commuted through the real interaction.

    Returns:
        The memory-implementable interactions, in time order, and the terminal
        per-mode phases (to be absorbed into the measurement basis).
    """
    carried = PhasePair()
    out: list[Union[RamanBS, RamanTMS]] = []
    for op in ops:
        if isinstance(op, PhasePair):
            carried = carried + op
        elif isinstance(op, RamanBS):
            bs, _ = commute_phases_bs(carried + PhasePair(0.0, -op.theta), op.phi)
            out.append(bs)
        elif isinstance(op, RamanTMS):
            tms, _ = commute_phases_tms(carried + PhasePair(0.0, -op.psi), op.r)
            out.append(tms)
        else:
            raise TypeError(f"Not a two-mode chain operation: {op!r}")
    return out, carried
