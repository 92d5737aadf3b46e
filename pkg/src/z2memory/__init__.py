"""Low-temperature coherence numerics for the periodic transverse-field
Ising chain viewed as a two-state quantum memory.

The library covers exact diagonalization resolved by global flip parity,
correlation-matrix spectra for grading additive-operator fluctuations,
thermal commutator diagnostics, bond-stabilizer algebra, and
valence-bond superposition identities, plus the z2mem CSV command line.
"""

__version__ = "0.1.0"

from .errors import (
    CapabilityError,
    ContractError,
    ConvergenceError,
    DomainError,
    Z2MemoryError,
)
from .pauli import (
    AdditiveOperator,
    PauliAxis,
    StateVector,
    additive_variance,
    apply_pauli,
    basis_state,
    expectation,
    ghz_state,
    mz_diagonal,
    two_point,
)
from .model import (
    StabilizerReport,
    TfimHamiltonian,
    build_tfim,
    global_flip_expectation,
    stabilizer_check,
)
from .eigensolve import (
    EigenPairs,
    FullSpectrum,
    adiabatic_time_estimate,
    full_spectrum,
    gap_scan,
    lowest_eigenpairs,
    superposed_state,
)
from .macroscopicity import (
    CorrelationKind,
    CorrelationMatrix,
    FitModel,
    FluctuationOperator,
    MzDistribution,
    ScalingFit,
    build_vcm,
    fit_exponential_gap,
    fit_index_p,
    max_fluctuation_operator,
    mz_distribution,
    second_eigenvalue_scan,
)
from .thermal import (
    GibbsState,
    build_w_matrix,
    default_kt_grid,
    gibbs_from_spectrum,
    gibbs_state,
    thermal_scan,
)
from .rvb import (
    PairCovering,
    build_rvb,
    build_vb,
    connected_correlation_scan,
    iterated_swap_residual,
    rvb_vcm_check,
    singlet_projector_apply,
    t_operator_apply,
    t_operator_moments,
)

__all__ = [
    "__version__",
    "Z2MemoryError",
    "DomainError",
    "ContractError",
    "ConvergenceError",
    "CapabilityError",
    "PauliAxis",
    "StateVector",
    "AdditiveOperator",
    "additive_variance",
    "apply_pauli",
    "basis_state",
    "expectation",
    "ghz_state",
    "mz_diagonal",
    "two_point",
    "TfimHamiltonian",
    "StabilizerReport",
    "build_tfim",
    "global_flip_expectation",
    "stabilizer_check",
    "EigenPairs",
    "FullSpectrum",
    "adiabatic_time_estimate",
    "full_spectrum",
    "gap_scan",
    "lowest_eigenpairs",
    "superposed_state",
    "CorrelationKind",
    "CorrelationMatrix",
    "FitModel",
    "FluctuationOperator",
    "MzDistribution",
    "ScalingFit",
    "build_vcm",
    "fit_exponential_gap",
    "fit_index_p",
    "max_fluctuation_operator",
    "mz_distribution",
    "second_eigenvalue_scan",
    "GibbsState",
    "build_w_matrix",
    "default_kt_grid",
    "gibbs_from_spectrum",
    "gibbs_state",
    "thermal_scan",
    "PairCovering",
    "build_rvb",
    "build_vb",
    "connected_correlation_scan",
    "iterated_swap_residual",
    "rvb_vcm_check",
    "singlet_projector_apply",
    "t_operator_apply",
    "t_operator_moments",
]
