"""Gaussian simulation of time-frequency cluster states built with Raman memories."""

__version__ = "0.1.0"

from .bogoliubov import (
    BlochMessiahError,
    BlochMessiahFactors,
    BogoliubovPair,
    compose,
    cz_bogoliubov,
    cz_symplectic,
    from_symplectic,
    reconstruct,
    reduce,
    symplectic_matrix,
    validate,
)
from .cz import CZ_PHI, CZ_PHI_PRIME, CZ_SQUEEZING, cz_sequence
from .gaussian import (
    GaussianState,
    SymplecticOp,
    apply,
    coherent,
    db_to_r,
    fidelity,
    homodyne,
    lossy_coupling,
    purity,
    r_to_db,
    squeezed_vacuum,
    symplectic_eigenvalues,
    tensor,
    thermal,
    trace_out,
    vacuum,
)
from .lattice import lattice_links
from .protocols import (
    ClusterGraph,
    ProtocolResult,
    apply_cz,
    build_2d_cluster,
    cz_fidelity_closed_form,
    nullifier_variances,
    pi_phase_route,
    two_qumode_cluster,
    two_qumode_fidelity_closed_form,
)
from .raman import PhasePair, RamanBS, RamanTMS, rewrite_chain
from .scheduler import (
    ArchitectureConstraints,
    Plaquette,
    Schedule,
    ScheduleEntry,
    ScheduleError,
    execute,
    memory_count,
)
from .scheduler import compile as compile_schedule
from .scheduler import validate as validate_schedule
