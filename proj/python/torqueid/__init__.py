"""Joint torque identification for a six-joint arm.

Rigid-body inverse dynamics, simulated grid-sweep datasets, MLP torque
models (single, multiple, cascade) and a TPE hyperparameter search, backed
by the C++ core.
"""

from ._torqueid import (
    IoError,
    NumericalError,
    default_robot_text,
    default_sweep_text,
    friction_torque,
    gen_data,
    generate_dataset,
    gravity_torque,
    hpo,
    inverse_dynamics,
    mass_matrix,
    minimize,
    plot,
    report,
    sha256_file,
    train,
)

__all__ = [
    "IoError",
    "NumericalError",
    "default_robot_text",
    "default_sweep_text",
    "friction_torque",
    "gen_data",
    "generate_dataset",
    "gravity_torque",
    "hpo",
    "inverse_dynamics",
    "mass_matrix",
    "minimize",
    "plot",
    "report",
    "sha256_file",
    "train",
]

__version__ = "0.1.0"
