"""Translates of general Dirichlet series: equivalence twists, Kronecker search, rigidity checks."""
from .exponents import (
    BohrMatrix,
    DenominatorCapExceeded,
    ExplicitExponents,
    Generator,
    IntegralityReport,
    OrdinaryExponents,
    SymbolicExponents,
    common_denominator,
    explicit_spec,
    integrality,
    ordinary_spec,
    same_exponents,
    symbolic_spec,
)
from .series import (
    AccuracyUnreachable,
    ConstantCoefficients,
    DirichletSeries,
    PolarCoefficients,
    SamplingPlan,
    UniformBound,
    evaluate,
    kuniyeda_Tx,
    sigma_absolute_estimate,
    sigma_uniform_estimate,
    tail_bound,
)
from .equivalence import (
    HellyFailure,
    Incompatible,
    TwistDetection,
    TwistVector,
    detect_twist,
    detect_vector_twist,
    helly_limit,
    limit_series,
    twist,
)
from .kronecker import KroneckerProblem, KroneckerSolution, solve
from .rigidity import (
    Disk,
    ErrorBudget,
    NotEquivalent,
    Rectangle,
    SearchExhausted,
    TranslateCertificate,
    audit_budget,
    density_of_translates,
    error_budget,
    find_translate,
    value_set_check,
    verify_translate,
    winding_number,
)
from .corpus import CORPUS, bohr_example, dirichlet_L, hurwitz_series, smooth_zeta, zeta_series
from .specfile import canonical_json, emit_series, load_series, parse_series

__version__ = "0.1.0"
