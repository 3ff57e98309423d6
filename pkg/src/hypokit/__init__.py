"""hypokit: hypocoercivity index, staircase forms, and decay-rate analysis
for finite (or spectrally truncated) dissipative generators."""

from .decay import (
    DecayCurve,
    ShortTimeFit,
    StabilityReport,
    TaylorSeriesData,
    default_fit_times,
    energy_change,
    fit_short_time,
    perturbation_coefficients,
    perturbed_initial,
    propagator_norm_curve,
    short_time_constant,
    stability_check,
    sum_of_squares_residual,
    taylor_U,
)
from .errors import (
    ContractViolationError,
    DimensionError,
    HypokitError,
    InvalidEntryError,
    NoDecayError,
    NotPSDError,
    NumericalError,
    PreconditionError,
    RangeError,
)
from .gallery import (
    ck_closed_form_norm,
    ck_matrix,
    ck_properties,
    ek_matrix,
    ek_properties,
    ek_rescale_factor,
    make_example,
)
from .hc_index import (
    AuditReport,
    IndexReport,
    ObstructionWitness,
    eigenvector_obstruction,
    equivalence_audit,
    index_via_powers,
    kalman_kernel_defect,
    random_accretive,
)
from .lorentz import (
    KAPPA_LIMIT,
    LAMBDA0,
    AppendixCConstants,
    LorentzField,
    appendix_constants,
    build_velocity_operators,
    cubic_bound_verify,
    full_propagator_bounds,
    kappa_truncated,
    lyapunov_margin,
    lyapunov_weight,
    modal_generator,
    modal_propagator_norm,
    simulate,
    simulate_curve,
)
from .operator_core import (
    OperatorDecomposition,
    hermitian_split,
    matrix_exponential,
    matrix_from_json,
    matrix_to_json,
    min_eig_hermitian,
    psd_sqrt,
    spectral_abscissa,
    spectral_norm,
)
from .staircase import StaircaseForm, build_staircase, verify_staircase

__version__ = "0.1.0"
