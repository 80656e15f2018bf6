"""Outer-function annihilators and Smirnov-class detectors for singular spectrum.

The package models self-adjoint multiplication operators on L^2(mu) for
mixed measures mu (atoms + absolutely continuous densities + Cantor-type
iterated-function-system pieces), constructs bounded outer functions that
weakly annihilate the singular part of the operator, and classifies the
spectrum inside a target region through Hardy/Smirnov line-norm certificates.
"""

from .errors import (
    BoundaryEvaluationError,
    ConfigError,
    DomainError,
    GapError,
    PrecisionError,
    SingspecError,
    SingularEvaluationError,
    TailDecayError,
)
from .measure import (
    AcPiece,
    ScPiece,
    SpectralMeasure,
    SymbolVector,
    constant_symbol,
    indicator_symbol,
    poisson_imaginary,
    refine_sc,
    weighted_borel_transform,
)
from .operator import (
    CharacteristicData,
    OperatorModel,
    characteristic_function,
    gamma_a,
    outer_determinant_delta,
    perturbation_determinant,
    theta,
    theta_prime,
)
from .hardy import (
    C1Extension,
    HerglotzBump,
    LineTrace,
    OuterFunction,
    beta_eval,
    build_bump,
    c1_extension,
    hilbert_transform,
    line_norm,
    outer_from_logmod,
)
from .annihilator import (
    AnnihilatorBundle,
    build_beta_thm3,
    build_bundle_thm3,
    build_gamma_thm2,
    derealize,
    weak_trace_thm2,
    weak_trace_thm3,
)
from .detect import (
    Calibration,
    DetectorReport,
    ac_baseline_trace,
    build_dictionary,
    classify,
    smirnov_strong_trace,
    smirnov_weak_trace,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
