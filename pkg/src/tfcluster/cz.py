"""Synthesis of the CZ gate from three Raman memory interactions.

Bloch-Messiah reduction of ``exp(i q_1 q_2)`` gives two identical single-mode
squeezers flanked by interferometers.  Rewriting those squeezers as one
two-mode squeezer and absorbing the interferometers' outer phases leaves

    phase(-pi/2 on mode 2), BS(-phi'), TMS(r), BS(-phi'), phase(+pi/2 on mode 2)

which :func:`rewrite_chain` turns into three Raman operations with no
leftover phases.  Mode 1 is the field qumode and mode 2 the memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bogoliubov import BogoliubovPair, cz_bogoliubov
from .raman import (
    ChainOp,
    PhasePair,
    RamanBS,
    RamanTMS,
    chain_bogoliubov,
    rewrite_chain,
)

# single-mode squeezing of the reduced CZ: A_D = sqrt(5)/2, B_D = 1/2
CZ_SQUEEZING = float(np.arcsinh(0.5))
# rotation angle of the reduced CZ interferometers
CZ_PHI = float(0.5 * np.arcsin(2.0 / np.sqrt(5.0)))
# beam splitter angle left after merging the 50:50 splitter of the TMS rewrite
CZ_PHI_PRIME = float(np.pi / 4.0 - CZ_PHI)


@dataclass(frozen=True)
class CZSequence:
    """The three memory operations realizing a CZ, with their origin."""

    raman_ops: tuple
    terminal_phases: PhasePair
    layers: tuple

    @property
    def coupling(self) -> float:
        """Beam splitter coupling ``sin^2 phi'`` of the first and last operation."""
        return self.raman_ops[0].coupling

    @property
    def squeezing_db(self) -> float:
        return self.raman_ops[1].db

    def bogoliubov(self) -> BogoliubovPair:
        ops: list[ChainOp] = list(self.raman_ops) + [self.terminal_phases]
        return chain_bogoliubov(ops)


def _canonical_bs(op: RamanBS) -> RamanBS:
    """Same transformation with ``phi`` in ``[0, pi/2]`` when possible."""
    phi, theta = op.phi, op.theta
    if phi < 0:
        phi, theta = -phi, theta + np.pi
    return RamanBS(phi, float(np.mod(theta, 2 * np.pi)))


def cz_layers(frame_phases=(0.0, 0.0)) -> list[ChainOp]:
    """Time-ordered chain with explicit phase shifts.

    Args:
        frame_phases: rotations ``(t1, t2)`` describing each qumode's frame.
            The gate is applied to the frame quadratures, i.e. the chain is
            conjugated by these phase shifts.
    """
    t1, t2 = frame_phases
    return [
        PhasePair(t1, t2),
        PhasePair(0.0, -np.pi / 2),
        RamanBS(-CZ_PHI_PRIME, 0.0),
        RamanTMS(CZ_SQUEEZING, 0.0),
        RamanBS(-CZ_PHI_PRIME, 0.0),
        PhasePair(0.0, np.pi / 2),
        PhasePair(-t1, -t2),
    ]


def cz_sequence(frame_phases=(0.0, 0.0)) -> CZSequence:
    """Raman operations implementing a CZ between a field and a memory qumode.

    Args:
        frame_phases: see :func:`cz_layers`.

    Returns:
        A :class:`CZSequence` whose three operations compose to the gate.
    """
    layers = cz_layers(frame_phases)
    ops, terminal = rewrite_chain(layers)
    ops = [_canonical_bs(op) if isinstance(op, RamanBS) else op for op in ops]
    psi = float(np.mod(ops[1].psi, 2 * np.pi))
    ops[1] = RamanTMS(ops[1].r, psi)
    return CZSequence(tuple(ops), terminal, tuple(layers))


def frame_conjugated_cz(frame_phases=(0.0, 0.0)) -> BogoliubovPair:
    """Target transformation ``R(-t) CZ R(t)`` for the given frames."""
    t1, t2 = frame_phases
    return chain_bogoliubov([PhasePair(t1, t2)]).then(cz_bogoliubov()).then(
        chain_bogoliubov([PhasePair(-t1, -t2)])
    )


def tms_as_parallel_squeezers(r: float) -> BogoliubovPair:
    """Conjugate a two-mode squeezer by a 50:50 splitter and a pi/2 phase.

    The result is two independent single-mode squeezers ``(cosh r, sinh r)``,
    the identity used to turn the reduced CZ into a TMS.
    """
    left = np.array([[1, 1], [1j, -1j]]) / np.sqrt(2)
    right = np.array([[1, -1j], [1, 1j]]) / np.sqrt(2)
    tms = chain_bogoliubov([RamanTMS(r, 0.0)])
    return BogoliubovPair(left @ tms.A @ right, left @ tms.B @ right.conj())
