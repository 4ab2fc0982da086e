"""Compiling a time-frequency lattice into operations on a chain of memories.

Run with ``python demos/memory_schedule.py``.
"""

# %% Compile a 2-channel, 3-site lattice
from collections import Counter

import numpy as np

from tfcluster.protocols import build_2d_cluster
from tfcluster.scheduler import ArchitectureConstraints, compile, execute, memory_roles, validate

constraints = ArchitectureConstraints(t_mem=1e-4, delta_full=1e8)
schedule = compile(2, 3, constraints, dt=1e-6)
print(f"{len(schedule.chain_memory_ids)} memories over {schedule.n_bins} time bins")
print(Counter(role.stage for role in memory_roles(2)))

# %% What each memory does, bin by bin
for memory, entries in schedule.by_memory().items():
    ops = " ".join(f"{e.time_bin}:{e.op_kind.value}" for e in entries if e.op_kind.value != "BS_PASSTHROUGH_HOLD")
    print(f"memory {memory:2d}  {ops}")

# %% The validator replays occupancy; replaying the physics reproduces the lattice
print("valid:", bool(validate(schedule)))
replay = execute(schedule, r=1.0, delta_eta=0.01).canonical()
direct = build_2d_cluster(2, 3, 1.0, 0.01).canonical(replay.graph.nodes)
print("max covariance difference", np.abs(replay.state.cov - direct.state.cov).max())

# %% Too many channels for the memory bandwidth is refused
try:
    compile(10, 2, ArchitectureConstraints(1e-4, 5e6), dt=1e-6)
except ValueError as exc:
    print("refused:", exc)
