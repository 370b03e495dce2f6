"""Numerical laboratory for norm inflation of the cubic NLS on the torus.

The package builds sparse Fourier data concentrated on lattice cubes, expands
small-data solutions as power series indexed by ternary trees, evaluates the
Duhamel integrals behind each series term, and cross-checks everything
against an independent split-step solver. A command-line front end drives
the experiments and writes deterministic CSV reports.
"""

from .construction import (
    ConditionEntry,
    ConditionReport,
    InflationParams,
    build_background,
    build_phi_n,
    check_conditions,
    f_of_A,
    select_parameters,
    threshold_log2N,
)
from .duhamel import (
    QuadratureSpec,
    ResonancePhase,
    SeriesTable,
    build_series,
    duhamel_integral,
    lwp_radius,
    partial_sum,
    phase_kernel,
    psi_eval,
    trilinear_product,
    wick_trilinear_product,
    xi1_exact,
    xi1_phase_stats,
    xi_diff,
)
from .kernels import backend
from .oracle import (
    AliasingError,
    DenseGrid,
    DivergenceError,
    StepperConfig,
    evolve,
    from_dense,
    picard_solve,
    to_dense,
)
from .spectra import (
    NormSpec,
    SparseSpectrum,
    SupportCapError,
    convolve,
    cube_indicator,
    fl_norm,
    l2_norm,
    propagate,
    read_spectrum,
    read_spectrum_path,
    reflect_conj,
    sobolev_norm,
    write_spectrum,
    write_spectrum_path,
)
from .trees import (
    C0,
    LEAF,
    TernaryTree,
    count_trees,
    enumerate_trees,
    growth_bound_ratio,
    leaf_conjugation_flags,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "C0",
    "ConditionEntry",
    "ConditionReport",
    "DenseGrid",
    "DivergenceError",
    "InflationParams",
    "LEAF",
    "NormSpec",
    "QuadratureSpec",
    "ResonancePhase",
    "SeriesTable",
    "SparseSpectrum",
    "StepperConfig",
    "SupportCapError",
    "TernaryTree",
    "backend",
    "build_background",
    "build_phi_n",
    "build_series",
    "check_conditions",
    "convolve",
    "count_trees",
    "cube_indicator",
    "duhamel_integral",
    "enumerate_trees",
    "evolve",
    "f_of_A",
    "fl_norm",
    "from_dense",
    "growth_bound_ratio",
    "l2_norm",
    "leaf_conjugation_flags",
    "lwp_radius",
    "partial_sum",
    "phase_kernel",
    "picard_solve",
    "propagate",
    "psi_eval",
    "read_spectrum",
    "read_spectrum_path",
    "reflect_conj",
    "select_parameters",
    "sobolev_norm",
    "threshold_log2N",
    "to_dense",
    "trilinear_product",
    "wick_trilinear_product",
    "write_spectrum",
    "write_spectrum_path",
    "xi1_exact",
    "xi1_phase_stats",
    "xi_diff",
]
