"""Finite-time work-penalty decomposition for driven open systems."""

from workpen._core import (
    Error,
    eigh,
    equilibrium_free_energy,
    gibbs,
    gibbs_matrix,
    kl_divergence,
    partition_function,
    relative_entropy,
    run,
    shannon_entropy,
    sweep_csv,
    trajectory_csv,
    von_neumann_entropy,
)

__all__ = [
    "Error",
    "eigh",
    "equilibrium_free_energy",
    "gibbs",
    "gibbs_matrix",
    "kl_divergence",
    "partition_function",
    "relative_entropy",
    "run",
    "shannon_entropy",
    "sweep_csv",
    "trajectory_csv",
    "von_neumann_entropy",
]
