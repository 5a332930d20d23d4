"""Dissipative preparation of a three-atom W state in a Rydberg-atom cavity system.

The package builds the full Lindblad model of three five-level atoms coupled
to one cavity mode, derives its Zeno and Rydberg-antiblockade effective
models, computes steady states and trajectories, and reproduces the
associated fidelity and purity sweeps as CSV data.

Fidelity is ``sqrt(<W|rho|W>)`` throughout.
"""

from .effective import (
    NAMED_STATES,
    ZenoDecomposition,
    antiblockade_oracle,
    build_effective_model,
    effective_basis,
    rydberg_effective_hamiltonian,
    zeno_decompose,
    zeno_effective_hamiltonian,
    zeno_effective_lindblads,
    zeno_projection_rates,
)
from .exceptions import (
    ConfigError,
    DecompositionError,
    DerivationError,
    NonUniqueSteadyStateError,
    OracleInconclusiveError,
    PositivityError,
    RydbergWError,
    ShapeError,
    SizingError,
    StiffnessError,
    UnsupportedRegimeError,
)
from .model import (
    BasisLabel,
    LindbladModel,
    SystemParams,
    build_basis,
    build_collapse_ops,
    build_full_model,
    build_h_r,
    build_h_z,
)
from .observables import TargetState, fidelity, population, purity, target_state, w_state
from .operators import Superoperator, dagger, embed, kron, liouvillian, unvec, vec
from .solvers import (
    SteadyStateResult,
    TrajectoryResult,
    evolve,
    null_space_probe,
    steady_state,
    trace_distance,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BasisLabel",
    "LindbladModel",
    "SystemParams",
    "Superoperator",
    "TargetState",
    "ZenoDecomposition",
    "SteadyStateResult",
    "TrajectoryResult",
    "NAMED_STATES",
    "antiblockade_oracle",
    "build_basis",
    "build_collapse_ops",
    "build_effective_model",
    "build_full_model",
    "build_h_r",
    "build_h_z",
    "dagger",
    "effective_basis",
    "embed",
    "evolve",
    "fidelity",
    "kron",
    "liouvillian",
    "null_space_probe",
    "population",
    "purity",
    "rydberg_effective_hamiltonian",
    "steady_state",
    "target_state",
    "trace_distance",
    "unvec",
    "vec",
    "w_state",
    "zeno_decompose",
    "zeno_effective_hamiltonian",
    "zeno_effective_lindblads",
    "zeno_projection_rates",
    "ConfigError",
    "DecompositionError",
    "DerivationError",
    "NonUniqueSteadyStateError",
    "OracleInconclusiveError",
    "PositivityError",
    "RydbergWError",
    "ShapeError",
    "SizingError",
    "StiffnessError",
    "UnsupportedRegimeError",
]
