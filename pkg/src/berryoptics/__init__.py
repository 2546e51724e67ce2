"""Berry phases of a two-level atom crossing shaped standing light waves.

Submodules:

* :mod:`berryoptics.model` -- physical and dimensionless zone parameters;
* :mod:`berryoptics.phases` -- dynamical and geometric phases (quadrature,
  closed forms, weak-field limit, derivative relation, two-zone totals);
* :mod:`berryoptics.circuit` -- parameter-space circuit, dressed states,
  winding-by-winding flux sums;
* :mod:`berryoptics.dynamics` -- direct integration of the two-level
  equations, WKB and perturbative phases, two-zone sequences;
* :mod:`berryoptics.wavepacket` -- imprinting the phase on a transverse
  Gaussian packet and free propagation;
* :mod:`berryoptics.cli` -- the ``berryoptics`` command.
"""

__version__ = "0.1.0"

from ._backend import NAME as BACKEND
from .errors import (
    AliasingError,
    BerryOpticsError,
    ConfigError,
    DomainError,
    NumericalError,
    ParameterMismatchError,
    PhaseUnwrapError,
    QuadratureError,
    StepSizeError,
)
from .model import (
    Envelope,
    EnvelopeKind,
    PhysicalSetup,
    ZoneParameters,
    argon_setup,
    eckart,
    gaussian,
    mesa,
    tabulated,
    to_dimensionless,
    validity_report,
)
from .phases import (
    Method,
    PhaseResult,
    closed_form_phases,
    kramers_kronig_check,
    quadrature_phases,
    two_zone_total,
    weak_field_result,
)

__all__ = [
    "BACKEND",
    "AliasingError",
    "BerryOpticsError",
    "ConfigError",
    "DomainError",
    "NumericalError",
    "ParameterMismatchError",
    "PhaseUnwrapError",
    "QuadratureError",
    "StepSizeError",
    "Envelope",
    "EnvelopeKind",
    "PhysicalSetup",
    "ZoneParameters",
    "argon_setup",
    "eckart",
    "gaussian",
    "mesa",
    "tabulated",
    "to_dimensionless",
    "validity_report",
    "Method",
    "PhaseResult",
    "closed_form_phases",
    "kramers_kronig_check",
    "quadrature_phases",
    "two_zone_total",
    "weak_field_result",
]
