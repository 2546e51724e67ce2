"""Parameter-space circuit, dressed states and the winding-by-winding flux sum.

Coordinates are in units of ``hbar |Delta|``, so the circuit lies in the
plane ``Z = sign(Delta)`` and its radius is ``a f(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import DomainError
from .model import ZoneParameters
from .phases import _inv_sqrt_minus_one, _breakpoints, PhaseEstimate
from .quadrature import DEFAULT_TOL, integrate


@dataclass(frozen=True)
class CircuitSample:
    t: float
    phi: float
    rho: float
    X: float
    Y: float
    Z: float


class CircuitPath(NamedTuple):
    """Column arrays of a sampled circuit."""

    t: np.ndarray
    phi: np.ndarray
    rho: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    def samples(self) -> list[CircuitSample]:
        return [CircuitSample(*map(float, row)) for row in zip(*self)]


def circuit_path(zone: ZoneParameters, n_samples: int = 801,
                 half_window: float | None = None) -> CircuitPath:
    """Sample ``X = rho cos(phi)``, ``Y = -rho sin(phi)`` uniformly in ``t``.

    ``half_window`` overrides the envelope window (useful for plotting the
    visible windings of an Eckart circuit).
    """
    if n_samples < 2:
        raise DomainError("n_samples must be at least 2")
    T = zone.envelope.half_window if half_window is None else half_window
    t = np.linspace(-T, T, n_samples)
    phi = zone.omega_alpha_tau * t
    rho = zone.a * np.asarray(zone.envelope(t), dtype=float)
    X = rho * np.cos(phi)
    Y = -rho * np.sin(phi)
    Z = np.full_like(t, float(zone.delta_sign))
    return CircuitPath(t, phi, rho, X, Y, Z)


# -- dressed states -----------------------------------------------------------

@dataclass(frozen=True)
class DressedDecomposition:
    eps_plus: float
    eps_minus: float
    state_plus: np.ndarray
    state_minus: np.ndarray


def berry_hamiltonian(X: float, Y: float, Z: float) -> np.ndarray:
    """``H = (1/2) [[Z, X - iY], [X + iY, -Z]]`` in the ``(e, g)`` basis."""
    return 0.5 * np.array([[Z, X - 1j * Y], [X + 1j * Y, -Z]], dtype=complex)


def dressed_states(X: float, Y: float, Z: float) -> DressedDecomposition:
    """Eigenpairs of :func:`berry_hamiltonian` in the phase convention

        psi(+-) = (Z +- R, X + iY) / sqrt(2 R (R +- Z)),

    evaluated in a cancellation-free form. On the ``Z`` axis the limit taken
    along ``Y = 0, X > 0`` is used, which gives ``psi(+) = e, psi(-) = g``
    for ``Z > 0`` and ``psi(+) = g, psi(-) = -e`` for ``Z < 0``.
    """
    rho = math.hypot(X, Y)
    R = math.hypot(rho, Z)
    if R == 0.0:
        raise DomainError("dressed states are degenerate at the origin of parameter space")
    phase = complex(X, Y) / rho if rho > 0 else 1.0 + 0j
    # R + |Z| never cancels; R - |Z| = rho^2 / (R + |Z|)
    big = R + abs(Z)
    upper_big = math.sqrt(big / (2.0 * R))
    lower_big = rho / math.sqrt(2.0 * R * big)
    if Z >= 0:
        plus = np.array([upper_big, phase * lower_big], dtype=complex)
        minus = np.array([-lower_big, phase * upper_big], dtype=complex)
    else:
        plus = np.array([lower_big, phase * upper_big], dtype=complex)
        minus = np.array([-upper_big, phase * lower_big], dtype=complex)
    return DressedDecomposition(0.5 * R, -0.5 * R, plus, minus)


# -- winding decomposition --------------------------------------------------------

def _check_winding_args(a: float, omega_alpha_tau: float) -> None:
    if a < 0:
        raise DomainError("a must be non-negative")
    if not omega_alpha_tau > 0:
        raise DomainError("omega_alpha_tau must be positive")


def log_flux_excess(theta: float, a: float) -> float:
    """``ln F - theta`` with ``F = sinh(theta) + sqrt(cosh(theta)^2 + a^2)``, overflow free."""
    return _backend.log_flux_excess(theta, a)


def winding_phase(m: int, a: float, omega_alpha_tau: float, naive: bool = False) -> float:
    """Flux through the ``m``-th winding of the Eckart circuit.

    ``gamma_m = omega_alpha tau (ln(F_m / F_{m-1}) - pi/(omega_alpha tau))``.
    The default evaluation subtracts the growing ``theta_m`` analytically and
    never overflows; ``naive=True`` evaluates ``F_m`` directly and raises
    ``OverflowError`` once ``cosh(theta_m)^2`` leaves double range.
    """
    if m < 1:
        raise DomainError("winding index starts at 1")
    _check_winding_args(a, omega_alpha_tau)
    w = omega_alpha_tau
    if naive:
        def log_f(th):
            if th > 354.0:
                raise OverflowError(f"cosh({th:g})^2 overflows; use the safe form")
            return math.log(math.sinh(th) + math.sqrt(math.cosh(th) ** 2 + a * a))
        th_m, th_prev = m * math.pi / w, (m - 1) * math.pi / w
        return w * (log_f(th_m) - log_f(th_prev) - math.pi / w)
    return w * (log_flux_excess(m * math.pi / w, a) - log_flux_excess((m - 1) * math.pi / w, a))


class WindingSum(NamedTuple):
    partial: float
    telescoped: float
    limit: float
    terms: np.ndarray


def winding_terms(N: int, a: float, omega_alpha_tau: float) -> np.ndarray:
    """``gamma_m`` for ``m = 1..N``."""
    if N < 1:
        raise DomainError("N must be at least 1")
    _check_winding_args(a, omega_alpha_tau)
    return _backend.winding_terms(int(N), float(a), float(omega_alpha_tau))


def winding_sum(N: int, a: float, omega_alpha_tau: float) -> WindingSum:
    """Partial flux sum over the first ``N`` windings.

    ``partial`` is the compensated direct sum, ``telescoped`` the collapsed
    form ``omega_alpha tau (ln F_N - ln F_0 - N pi/(omega_alpha tau))`` and
    ``limit`` the ``N -> infinity`` value ``-(omega_alpha tau/2) ln(1 + a^2)``.
    """
    terms = winding_terms(N, a, omega_alpha_tau)
    partial = _backend.compensated_sum(terms)
    w = omega_alpha_tau
    telescoped = w * (log_flux_excess(N * math.pi / w, a) - log_flux_excess(0.0, a))
    limit = -w * log_flux_excess(0.0, a)
    return WindingSum(partial, telescoped, limit, terms)


def windings_for_convergence(omega_alpha_tau: float) -> int:
    """Number of windings after which the remaining flux is below 1e-8 for ``a <= 5``."""
    return math.ceil(10.0 * omega_alpha_tau) + 20


# -- direct flux integral ------------------------------------------------------------

def surface_flux_quadrature(zone: ZoneParameters, tol: float = DEFAULT_TOL) -> PhaseEstimate:
    """Flux of ``R / (2 R^3)`` through the circuit, integrated over the angle ``phi``.

    The radial integral is done in closed form,
    ``int_0^rho r dr / (1 + r^2)^(3/2) = 1 - 1/sqrt(1 + rho^2)``,
    and the angular one adaptively over ``phi in [-omega_alpha T, omega_alpha T]``.
    """
    w = zone.omega_alpha_tau
    if zone.a == 0 or w == 0:
        return PhaseEstimate(0.0, 0.0)
    env = zone.envelope
    a2 = zone.a**2

    def flux_density(phi):
        rho2 = a2 * env(phi / w) ** 2
        return 0.5 * _inv_sqrt_minus_one(rho2)

    # rho(-phi) = rho(phi): integrate one half and double
    res = integrate(flux_density, 0.0, w * env.half_window, tol=tol / 2.0,
                    breakpoints=[w * p for p in _breakpoints(zone)])
    return PhaseEstimate(2.0 * res.value, 2.0 * res.error)
