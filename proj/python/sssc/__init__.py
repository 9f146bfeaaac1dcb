"""Scalable sparse and low-rank subspace clustering."""

from ._core import (
    DataError,
    SolverError,
    UsageError,
    accuracy,
    cluster,
    l21_shrink,
    nmi,
    nuclear_norm,
    outlier_columns,
    solve_lasso,
    solve_lrr,
    sparse_self_representation,
    spectral_cluster,
    svt,
    synth,
    uniform_split,
)

__all__ = [
    "DataError",
    "SolverError",
    "UsageError",
    "accuracy",
    "cluster",
    "l21_shrink",
    "nmi",
    "nuclear_norm",
    "outlier_columns",
    "solve_lasso",
    "solve_lrr",
    "sparse_self_representation",
    "spectral_cluster",
    "svt",
    "synth",
    "uniform_split",
]
