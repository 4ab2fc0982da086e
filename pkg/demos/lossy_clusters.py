"""How memory inefficiency degrades two-qumode clusters, CZ links and lattices.

Run with ``python demos/lossy_clusters.py``.
"""

# %% Fidelity of a two-qumode cluster against its lossless counterpart
import numpy as np

from tfcluster.gaussian import db_to_r
from tfcluster.protocols import (
    build_2d_cluster,
    cz_fidelity,
    cz_fidelity_closed_form,
    nullifier_variances,
    two_qumode_fidelity,
    two_qumode_fidelity_closed_form,
)

etas = np.logspace(-6, -2, 5)
print("dB    " + "  ".join(f"{e:8.0e}" for e in etas))
for db in (5.0, 10.0, 15.0, 20.0):
    row = [1 - two_qumode_fidelity_closed_form(db, e) for e in etas]
    print(f"{db:4.0f}  " + "  ".join(f"{x:8.1e}" for x in row))
# infidelity grows with both squeezing and loss

# %% The closed forms agree with full covariance simulation
for db, eta in [(17.4, 7e-5), (17.4, 1e-5)]:
    print(
        f"{db} dB, delta_eta {eta:.0e}: two-qumode {two_qumode_fidelity(db, eta):.8f} "
        f"(closed {two_qumode_fidelity_closed_form(db, eta):.8f}), "
        f"CZ {cz_fidelity(db, eta):.8f} (closed {cz_fidelity_closed_form(db, eta):.8f})"
    )

# %% Nullifiers of a 2 x 3 lattice shrink like exp(-2r) when transfers are perfect
for db in (5.0, 10.0, 20.0):
    r = db_to_r(db)
    ideal = nullifier_variances(build_2d_cluster(2, 3, r)).max()
    lossy = nullifier_variances(build_2d_cluster(2, 3, r, 1e-3)).max()
    print(f"{db:4.0f} dB  exp(-2r) {np.exp(-2 * r):.2e}  ideal {ideal:.2e}  delta_eta=1e-3 {lossy:.2e}")
# with loss the variances floor out instead of vanishing
