"""Stacked tetrahedral tensegrity manipulators: force-density inverse kinematics,
dynamic-relaxation validation and trajectory generation."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateGeometryError,
    DivergenceError,
    EmptySystemError,
    HedraError,
    InfeasibleLoadError,
    InvalidParameterError,
    NotStaticallyFeasibleError,
    SlackImpossibleError,
)
from .ik import (  # noqa: E402
    IKSolution,
    optimize_densities,
    pseudoinverse,
    rest_lengths,
    solve_general,
    solve_pose,
)
from .motion import (  # noqa: E402
    RelaxationParams,
    Trace,
    TrajectorySpec,
    active_lengths,
    pose_sequence,
    relax,
    run_trajectory,
    trace,
)
from .statics import (  # noqa: E402
    EquilibriumSystem,
    ForceState,
    assemble,
    forces_from_densities,
    gravity_loads,
    residual,
)
from .structure import (  # noqa: E402
    CableClass,
    ConnectivityMatrix,
    Member,
    MemberKind,
    ModulePose,
    Node,
    TensegrityModel,
    TetraParams,
    apply_pose,
    base_tetra_nodes,
    build_hedra,
    compose_poses,
    connectivity,
    member_lengths,
)

DEFAULT_PARAMS = TetraParams(radius=0.1, height=0.15)
