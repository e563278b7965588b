"""Multiscale finite elements with non-intrusive effective coefficients."""

from ._msfem import (
    Error,
    ExperimentConfig,
    GlueSingular,
    InvalidArgument,
    Meshes,
    Method,
    OfflineData,
    ParseError,
    Problem,
    RegistryError,
    SingularMatrix,
    Solution,
    cell_tensor,
    cell_tensor_of,
    checkerboard_tensor,
    laminate_tensor,
    make_problem,
    offline,
    reference_solve,
    relative_h1_difference,
    relative_h1_error,
    run_experiment,
    solve,
    sweep_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
