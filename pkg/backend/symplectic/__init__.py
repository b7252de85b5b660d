"""
Symplectic toolkit: Maslov indices of Lagrangian loops, Poisson and Dirac
brackets, argument-shift families, the commuting integrals of projectively
equivalent metrics on tori, momentum maps on homogeneous spaces and the
integer classifiers of Eschenburg and Witten-Kreck-Stolz spaces.
"""

from .config import Tolerances, default_tolerances, override, tolerances

from .errors import (
    SymplecticError,
    InputError,
    SpecError,
    DimensionMismatchError,
    NonUnitaryFrameError,
    OffShellError,
    NonCoprimeError,
    NumericalSingularityError,
    SamplingTooCoarseError,
    DegenerateCrossingError,
    ResampleError,
    SingularParameterError,
    ConstraintDegeneracyError,
    RankDeficiencyError,
    NoRealSolutionError,
    EnergyDriftError,
    FlowDivergenceError,
    ConsistencyError,
    ProjectionError,
    RegularPointNotFoundError,
)

from .poisson import (
    ScalarField,
    ConstraintSet,
    Trajectory,
    canonical_bracket,
    dirac_bracket,
    hamiltonian_vector_field,
    hamiltonian_flow,
    involution_matrix,
    independence_rank,
    tangent_rank,
    convexity_probe,
)

from .lie import (
    LieAlgebra,
    LieAlgebraElement,
    ProductAlgebraElement,
    CasimirSpec,
    ShiftFamily,
    lie_poisson_bracket,
    mf_shift_family,
    differential_dimension,
    differential_rank,
)

from .maslov import (
    LagrangianFrame,
    LagrangianLoop,
    maslov_index,
    signed_crossings,
    canonical_loop,
    intersection_dimension,
)

from .projtori import (
    TrigPolynomial,
    SeparatedEigenFunctions,
    ModelMetricPair,
    FirstIntegralPolynomial,
    ImageClass,
    J_tau,
    claim1_coefficients,
    image_membership,
    liouville_torus_point,
    coordinate_loop_maslov,
)

from .homog import (
    SphereCotangentPoint,
    MomentumValue,
    TrivializedCotangentPoint,
    WKSIntegrableSystem,
    EschenburgU,
    psi_G,
    psi_V,
    trivialized_bracket,
    eschenburg_integral_report,
    mp_hypothesis_check,
)

from .topo7 import (
    EschenburgQuartet,
    WKSPair,
    TableRow,
    admissible,
    enumerate_admissible,
    verify_reference_table,
    wks_hypothesis,
)

__all__ = [
    # Configuration
    'Tolerances',
    'default_tolerances',
    'override',
    'tolerances',

    # Errors
    'SymplecticError',
    'InputError',
    'SpecError',
    'DimensionMismatchError',
    'NonUnitaryFrameError',
    'OffShellError',
    'NonCoprimeError',
    'NumericalSingularityError',
    'SamplingTooCoarseError',
    'DegenerateCrossingError',
    'ResampleError',
    'SingularParameterError',
    'ConstraintDegeneracyError',
    'RankDeficiencyError',
    'NoRealSolutionError',
    'EnergyDriftError',
    'FlowDivergenceError',
    'ConsistencyError',
    'ProjectionError',
    'RegularPointNotFoundError',

    # Brackets and flows
    'ScalarField',
    'ConstraintSet',
    'Trajectory',
    'canonical_bracket',
    'dirac_bracket',
    'hamiltonian_vector_field',
    'hamiltonian_flow',
    'involution_matrix',
    'independence_rank',
    'tangent_rank',
    'convexity_probe',

    # Lie algebras
    'LieAlgebra',
    'LieAlgebraElement',
    'ProductAlgebraElement',
    'CasimirSpec',
    'ShiftFamily',
    'lie_poisson_bracket',
    'mf_shift_family',
    'differential_dimension',
    'differential_rank',

    # Maslov
    'LagrangianFrame',
    'LagrangianLoop',
    'maslov_index',
    'signed_crossings',
    'canonical_loop',
    'intersection_dimension',

    # Projectively equivalent metrics
    'TrigPolynomial',
    'SeparatedEigenFunctions',
    'ModelMetricPair',
    'FirstIntegralPolynomial',
    'ImageClass',
    'J_tau',
    'claim1_coefficients',
    'image_membership',
    'liouville_torus_point',
    'coordinate_loop_maslov',

    # Homogeneous spaces
    'SphereCotangentPoint',
    'MomentumValue',
    'TrivializedCotangentPoint',
    'WKSIntegrableSystem',
    'EschenburgU',
    'psi_G',
    'psi_V',
    'trivialized_bracket',
    'eschenburg_integral_report',
    'mp_hypothesis_check',

    # Integer classifiers
    'EschenburgQuartet',
    'WKSPair',
    'TableRow',
    'admissible',
    'enumerate_admissible',
    'verify_reference_table',
    'wks_hypothesis',
]
