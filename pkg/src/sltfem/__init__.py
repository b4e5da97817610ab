"""2D Galerkin FE solver for thermo-elasticity in transversely isotropic
strain-limiting materials: edge-cracked plates under thermal and mechanical
loading, solved sequentially (linear heat conduction, then Picard iteration
on the nonlinear momentum balance)."""

from .assembly import (
    FEField,
    FESpace,
    LinearSystem,
    MechanicalBC,
    ThermalBC,
    assemble_mechanical,
    assemble_thermal,
    evaluate_strain,
    thermal_gradient_at_qp,
)
from .config import RunConfig, RunResult, parse_config, run_single, serialize_config
from .constitutive import (
    DELTA_GUARD,
    MaterialParams,
    relaxation_factor,
    strain_energy_density,
    strain_from_stress,
    stress_from_strain,
    thermal_stress,
)
from .errors import (
    EmptyDirichlet,
    InadmissibleStrain,
    InvariantViolation,
    MisalignedCrack,
    NotPositiveDefinite,
    SltfemError,
    SolverBreakdown,
    TypeMismatch,
    UnknownKey,
)
from .mesh import (
    CrackedMesh,
    CrackSpec,
    build_cracked_grid,
    build_grid,
    dump_mesh,
    refine_uniform,
)
from .postprocess import (
    NodalField,
    SweepRow,
    crack_opening_profile,
    recover_fields,
    run_sweep,
    write_csv,
    write_vtk,
)
from .solver import PicardConfig, SolveReport, linear_solve, picard_solve, solve_thermal
from .tensors import (
    Compliance3,
    Stiffness3,
    SymTensor2,
    build_compliance,
    build_stiffness,
    energy_norm,
)

__version__ = "0.1.0"
