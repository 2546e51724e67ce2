"""Dynamical and geometric phases of one or two interaction zones.

All phases are in radians and reported unwrapped. ``beta`` is always built
from ``|Delta|``; the sign of the detuning enters only in
:func:`total_phases`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ParameterMismatchError
from .model import EnvelopeKind, ZoneParameters
from .quadrature import DEFAULT_TOL, QuadResult, integrate, integrate_fixed


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed_form"
    WEAK_FIELD = "weak_field"
    WINDING_SUM = "winding_sum"
    ODE = "ode"
    WKB = "wkb"
    PERTURBATIVE = "perturbative"


class PhaseEstimate(NamedTuple):
    value: float
    error: float


def wrap_phase(phi: float) -> float:
    """Map ``phi`` into ``(-pi, pi]``."""
    w = math.remainder(phi, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class PhaseResult:
    beta: float
    gamma: float
    phi_g: float
    phi_e: float
    method: Method
    est_error: float = 0.0

    @classmethod
    def assemble(cls, beta: float, gamma: float, delta_sign: int, method: Method,
                 est_error: float = 0.0) -> "PhaseResult":
        phi_g, phi_e = total_phases(beta, gamma, delta_sign)
        return cls(beta, gamma, phi_g, phi_e, Method(method), est_error)

    @property
    def wrapped(self) -> tuple[float, float]:
        """``(phi_g, phi_e)`` reduced to ``(-pi, pi]``."""
        return wrap_phase(self.phi_g), wrap_phase(self.phi_e)

    def to_dict(self) -> dict:
        g, e = self.wrapped
        return {
            "method": self.method.value,
            "beta": self.beta,
            "gamma": self.gamma,
            "phi_g": self.phi_g,
            "phi_e": self.phi_e,
            "phi_g_wrapped": g,
            "phi_e_wrapped": e,
            "est_error": self.est_error,
        }


def total_phases(beta: float, gamma: float, delta_sign: int) -> tuple[float, float]:
    """Ground and excited total phases for a zone of detuning sign ``delta_sign``."""
    if beta < 0:
        raise DomainError(f"beta must be non-negative, got {beta}")
    if delta_sign not in (1, -1):
        delta_sign = 1 if delta_sign > 0 else -1
    phi_g = beta * delta_sign + gamma
    phi_e = -phi_g - (math.pi if delta_sign < 0 else 0.0)
    return phi_g, phi_e


# -- integrands in theta = t/tau, stable for small a f -----------------------

def _sqrt_minus_one(u):
    # sqrt(1+u) - 1
    return u / (np.sqrt(1.0 + u) + 1.0)


def _inv_sqrt_minus_one(u):
    # 1/sqrt(1+u) - 1
    s = np.sqrt(1.0 + u)
    return -u / (s * (s + 1.0))


def _breakpoints(zone: ZoneParameters) -> tuple:
    env = zone.envelope
    if env.kind == EnvelopeKind.TABULATED:
        return env.nodes
    # peaked at 0 with width ~1; a few seeds speed up the adaptive split
    return tuple(p for p in (1.0, 4.0, 12.0) if p < env.half_window)


def _half_integral(zone: ZoneParameters, kernel, tol: float, prefactor: float,
                   a: float | None = None) -> QuadResult:
    a = zone.a if a is None else a
    env = zone.envelope
    a2 = a * a
    itol = tol / max(1.0, abs(prefactor))
    return integrate(lambda th: kernel(a2 * env(th) ** 2), 0.0, env.half_window,
                     tol=itol, breakpoints=_breakpoints(zone))


def geometric_phase_quadrature(zone: ZoneParameters, tol: float = DEFAULT_TOL) -> PhaseEstimate:
    """``gamma = (omega_alpha tau / 2) int (1/sqrt(1 + a^2 f^2) - 1) dtheta`` by adaptive quadrature."""
    if zone.a == 0 or zone.omega_alpha_tau == 0:
        return PhaseEstimate(0.0, 0.0)
    pref = zone.omega_alpha_tau
    res = _half_integral(zone, _inv_sqrt_minus_one, tol, pref)
    return PhaseEstimate(pref * res.value, pref * res.error)


def dynamical_phase_quadrature(zone: ZoneParameters, tol: float = DEFAULT_TOL) -> PhaseEstimate:
    """``beta = (|Delta| tau / 2) int (sqrt(1 + a^2 f^2) - 1) dtheta`` by adaptive quadrature."""
    if zone.a == 0:
        return PhaseEstimate(0.0, 0.0)
    pref = abs(zone.delta_tau)
    res = _half_integral(zone, _sqrt_minus_one, tol, pref)
    return PhaseEstimate(pref * res.value, pref * res.error)


def quadrature_phases(zone: ZoneParameters, tol: float = DEFAULT_TOL) -> PhaseResult:
    beta, eb = dynamical_phase_quadrature(zone, tol)
    gamma, eg = geometric_phase_quadrature(zone, tol)
    return PhaseResult.assemble(beta, gamma, zone.delta_sign, Method.QUADRATURE, eb + eg)


# -- Eckart closed forms -------------------------------------------------------

def eckart_geometric_phase(a: float, omega_alpha_tau: float) -> float:
    """``-(omega_alpha tau / 2) ln(1 + a^2)``."""
    if a < 0:
        raise DomainError("a must be non-negative")
    return -0.5 * omega_alpha_tau * math.log1p(a * a)


def _arctan_minus_log(a: float) -> float:
    # a*atan(a) - ln(1+a^2)/2, series below 0.1 to dodge the cancellation
    if a < 0.1:
        a2 = a * a
        term, total = a2, 0.0
        for n in range(1, 12):
            total += term / (2 * n * (2 * n - 1)) * (1 if n % 2 else -1)
            term *= a2
        return total
    return a * math.atan(a) - 0.5 * math.log1p(a * a)


def eckart_dynamical_phase(a: float, delta_tau_abs: float) -> float:
    """``|Delta| tau [a arctan(a) - ln(1 + a^2)/2]``."""
    if a < 0:
        raise DomainError("a must be non-negative")
    if not delta_tau_abs > 0:
        raise DomainError("delta_tau_abs must be positive")
    return delta_tau_abs * _arctan_minus_log(a)


def closed_form_phases(zone: ZoneParameters) -> PhaseResult:
    if zone.envelope.kind != EnvelopeKind.ECKART:
        raise DomainError(f"closed forms exist only for the Eckart envelope, not {zone.envelope.name}")
    beta = eckart_dynamical_phase(zone.a, abs(zone.delta_tau))
    gamma = eckart_geometric_phase(zone.a, zone.omega_alpha_tau)
    return PhaseResult.assemble(beta, gamma, zone.delta_sign, Method.CLOSED_FORM)


# -- weak field -------------------------------------------------------------------

WEAK_FIELD_LIMIT = 0.3


def weak_field_phases(zone: ZoneParameters) -> tuple[float, float]:
    """Leading-order ``(beta, gamma)`` in ``a``; their ratio is ``omega_alpha/|Delta|`` for any envelope."""
    if zone.a > WEAK_FIELD_LIMIT:
        warnings.warn(f"a = {zone.a:g} exceeds {WEAK_FIELD_LIMIT}; weak-field phases are inaccurate",
                      stacklevel=2)
    s = 0.25 * zone.a**2 * zone.envelope.square_integral()
    return abs(zone.delta_tau) * s, -zone.omega_alpha_tau * s


def weak_field_result(zone: ZoneParameters) -> PhaseResult:
    beta, gamma = weak_field_phases(zone)
    return PhaseResult.assemble(beta, gamma, zone.delta_sign, Method.WEAK_FIELD)


# -- derivative relation --------------------------------------------------------

class KramersKronigCheck(NamedTuple):
    lhs: float
    rhs: float
    discrepancy: float


def kramers_kronig_check(zone: ZoneParameters, h: float = 1e-4,
                         tol: float = 1e-13) -> KramersKronigCheck:
    """Compare ``gamma`` with ``omega_alpha * d beta / d|Delta|`` at fixed ``|Omega|``.

    The derivative is a central difference with step ``h`` in ``|Delta| tau``;
    ``a`` is recomputed for the shifted detunings. All three dynamical-phase
    evaluations share one quadrature partition, so the reported discrepancy
    is the O(h^2) difference error plus roundoff.
    """
    if not 1e-6 <= h <= 1e-2:
        raise DomainError(f"h must lie in [1e-6, 1e-2], got {h}")
    lhs = geometric_phase_quadrature(zone, tol).value
    if zone.a == 0:
        return KramersKronigCheck(lhs, 0.0, abs(lhs))
    d = abs(zone.delta_tau)
    rabi = zone.rabi_tau
    env = zone.envelope
    partition = _half_integral(zone, _sqrt_minus_one, tol, d).intervals

    def beta_at(dd: float) -> float:
        a2 = (rabi / dd) ** 2
        return dd * integrate_fixed(lambda th: _sqrt_minus_one(a2 * env(th) ** 2), partition).value

    rhs = zone.omega_alpha_tau * (beta_at(d + h) - beta_at(d - h)) / (2.0 * h)
    return KramersKronigCheck(lhs, rhs, abs(lhs - rhs))


# -- two zones --------------------------------------------------------------------

MATCH_TOL = 1e-12


def check_cancellation_pair(zone_blue: ZoneParameters, zone_red: ZoneParameters) -> None:
    """Raise :class:`ParameterMismatchError` unless the zones have opposite detunings and equal Rabi profiles."""
    d1, d2 = zone_blue.delta_tau, zone_red.delta_tau
    if d1 * d2 > 0 or abs(d1 + d2) > MATCH_TOL * max(1.0, abs(d1)):
        raise ParameterMismatchError(f"detunings must be opposite, got {d1} and {d2}")
    r1, r2 = zone_blue.rabi_tau, zone_red.rabi_tau
    if abs(r1 - r2) > MATCH_TOL * max(1.0, abs(r1)):
        raise ParameterMismatchError(f"Rabi profiles differ: {r1} vs {r2}")
    if zone_blue.envelope != zone_red.envelope:
        raise ParameterMismatchError("zones must share one envelope")


def two_zone_total(zone_blue: ZoneParameters, zone_red: ZoneParameters,
                   tol: float = DEFAULT_TOL) -> PhaseResult:
    """Ground-state phase after two oppositely detuned zones: the dynamical parts cancel."""
    check_cancellation_pair(zone_blue, zone_red)
    g1, e1 = geometric_phase_quadrature(zone_blue, tol)
    g2, e2 = geometric_phase_quadrature(zone_red, tol)
    gamma = g1 + g2
    # one zone is red detuned, so exactly one -pi enters the excited phase
    return PhaseResult(0.0, gamma, gamma, -gamma - math.pi, Method.QUADRATURE, e1 + e2)
