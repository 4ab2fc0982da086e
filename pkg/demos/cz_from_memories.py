"""A CZ gate from three Raman memory interactions.

Run with ``python demos/cz_from_memories.py``.
"""

# %% The target gate and its Bloch-Messiah factors
import numpy as np

from tfcluster.bogoliubov import cz_bogoliubov, reduce, symplectic_matrix
from tfcluster.cz import cz_layers, cz_sequence

np.set_printoptions(precision=4, suppress=True)

target = cz_bogoliubov()
factors = reduce(target)
print("CZ in quadratures (q1, p1, q2, p2):")
print(symplectic_matrix(target))
print("A_D diagonal", np.diag(factors.A_D), " B_D diagonal", np.diag(factors.B_D))
# two equal squeezers of r = asinh(1/2) sit between two interferometers

# %% Time-ordered chain with explicit phase shifts
for layer in cz_layers():
    print("  ", layer)

# %% After pushing phases into the control fields, three operations remain
seq = cz_sequence()
for op in seq.raman_ops:
    print("  ", op)
print("leftover phases", seq.terminal_phases)
print(f"beam splitter coupling sin^2 phi' = {seq.coupling:.4f}")
print(f"two-mode squeezing = {seq.squeezing_db:.2f} dB")

# %% The three operations compose to the gate
composed = seq.bogoliubov()
residual = max(np.abs(composed.A - target.A).max(), np.abs(composed.B - target.B).max())
print(f"max |composed - CZ| = {residual:.1e}")

# %% Nodes read out of a memory carry a pi/2 frame; the chain adapts
framed = cz_sequence((0.0, np.pi / 2))
for op in framed.raman_ops:
    print("  ", op)
