"""Physical and dimensionless description of one interaction zone.

Everything downstream works in dimensionless units: times are measured in
the envelope time ``tau`` and every frequency appears as its product with
``tau``. Dimensional quantities only exist in :class:`PhysicalSetup`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import constants
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

#: Truncation of the formally infinite Eckart/Gaussian windows, in units of tau.
DEFAULT_HALF_WINDOW = 40.0

#: Default margin demanded by a "much greater than" validity inequality.
DEFAULT_THRESHOLD = 10.0

#: Geometric-to-dynamical ratio quoted for the argon example; the numbers
#: behind it give ~0.18 (see :func:`argon_setup`).
ARGON_QUOTED_RATIO = 0.1


class EnvelopeKind(enum.IntEnum):
    ECKART = 0
    GAUSSIAN = 1
    MESA = 2
    TABULATED = 3


@dataclass(frozen=True)
class Envelope:
    """Peak-normalized, even longitudinal field profile ``f(theta)``, ``theta = t/tau``.

    Use the factories :func:`eckart`, :func:`gaussian`, :func:`mesa` and
    :func:`tabulated` rather than the constructor.
    """

    kind: EnvelopeKind
    half_window: float
    tail_decay: float
    nodes: tuple = field(default=(), repr=False)
    samples: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if not self.half_window > 0:
            raise DomainError(f"half_window must be positive, got {self.half_window}")
        if self.kind == EnvelopeKind.TABULATED and len(self.nodes) < 2:
            raise DomainError("tabulated envelope needs at least two nodes")

    @property
    def name(self) -> str:
        return self.kind.name.lower()

    @property
    def is_smooth(self) -> bool:
        return self.kind != EnvelopeKind.MESA

    def _interpolant(self):
        interp = self.__dict__.get("_pchip")
        if interp is None:
            interp = PchipInterpolator(np.asarray(self.nodes), np.asarray(self.samples), extrapolate=False)
            object.__setattr__(self, "_pchip", interp)
        return interp

    def __call__(self, theta):
        """Evaluate ``f`` at ``theta`` (scalar or array)."""
        th = np.abs(np.asarray(theta, dtype=float))
        if self.kind == EnvelopeKind.ECKART:
            # 1/cosh without overflow
            q = np.exp(-th)
            out = 2.0 * q / (1.0 + q * q)
        elif self.kind == EnvelopeKind.GAUSSIAN:
            out = np.exp(-0.5 * th * th)
        elif self.kind == EnvelopeKind.MESA:
            out = np.where(th <= self.half_window, 1.0, 0.0)
        else:
            out = np.nan_to_num(self._interpolant()(th), nan=0.0)
            out = np.clip(out, 0.0, 1.0)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def square_integral(self) -> float:
        """``int f(theta)^2 dtheta`` over the whole window."""
        if self.kind == EnvelopeKind.ECKART:
            return 2.0 * math.tanh(self.half_window)
        if self.kind == EnvelopeKind.GAUSSIAN:
            return math.sqrt(math.pi) * math.erf(self.half_window)
        if self.kind == EnvelopeKind.MESA:
            return 2.0 * self.half_window
        from .quadrature import integrate

        res = integrate(lambda th: self(th) ** 2, 0.0, self.half_window, tol=1e-12,
                        breakpoints=self.nodes)
        return 2.0 * res.value

    def to_dict(self) -> dict:
        d = {"kind": self.name, "half_window": self.half_window, "tail_decay": self.tail_decay}
        if self.kind == EnvelopeKind.TABULATED:
            d["theta"] = list(self.nodes)
            d["f"] = list(self.samples)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Envelope":
        kind = str(d.get("kind", "eckart")).lower()
        if kind == "eckart":
            return eckart(d.get("half_window", DEFAULT_HALF_WINDOW))
        if kind == "gaussian":
            return gaussian(d.get("half_window", DEFAULT_HALF_WINDOW))
        if kind == "mesa":
            return mesa(d.get("half_window", 1.0))
        if kind == "tabulated":
            if "theta" not in d or "f" not in d:
                raise DomainError("tabulated envelope needs 'theta' and 'f' arrays")
            return tabulated(d["theta"], d["f"], tail_decay=d.get("tail_decay", 1.0))
        raise DomainError(f"unknown envelope kind {kind!r}")


def eckart(half_window: float = DEFAULT_HALF_WINDOW) -> Envelope:
    """``f = 1/cosh(theta)``: exponential tails with unit decay rate."""
    return Envelope(EnvelopeKind.ECKART, float(half_window), 1.0)


def gaussian(half_window: float = DEFAULT_HALF_WINDOW) -> Envelope:
    """``f = exp(-theta^2/2)`` (``tau`` is the standard deviation of the field)."""
    return Envelope(EnvelopeKind.GAUSSIAN, float(half_window), 1.0)


def mesa(half_window: float = 1.0) -> Envelope:
    """Flat top on ``|theta| <= half_window`` with sharp edges (not adiabatic)."""
    return Envelope(EnvelopeKind.MESA, float(half_window), math.inf)


def tabulated(theta: Sequence[float], f: Sequence[float], tail_decay: float = 1.0) -> Envelope:
    """Envelope from samples on ``theta >= 0``, mirrored to negative ``theta``.

    Samples are rescaled to unit peak and interpolated with a monotone cubic
    (PCHIP); the window ends at the last node.
    """
    th = np.asarray(theta, dtype=float)
    fv = np.asarray(f, dtype=float)
    if th.ndim != 1 or th.shape != fv.shape:
        raise DomainError("theta and f must be 1-D arrays of equal length")
    if th[0] != 0.0 or np.any(np.diff(th) <= 0):
        raise DomainError("theta must start at 0 and increase strictly")
    if np.any(fv < 0) or fv.max() <= 0:
        raise DomainError("envelope samples must be non-negative with a positive peak")
    fv = fv / fv.max()
    return Envelope(EnvelopeKind.TABULATED, float(th[-1]), float(tail_decay),
                    tuple(th.tolist()), tuple(fv.tolist()))


@dataclass(frozen=True)
class PhysicalSetup:
    """Dimensional parameters of one standing-wave zone (SI units, angular frequencies in 1/s)."""

    wavelength: float
    velocity: float
    half_angle_alpha: float
    detuning: float
    rabi_peak: float
    envelope_time: float
    spontaneous_rate: Optional[float] = None
    recoil_frequency: Optional[float] = None

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError("wavelength must be positive")
        if not self.envelope_time > 0:
            raise DomainError("envelope_time must be positive")
        if not self.rabi_peak >= 0:
            raise DomainError("rabi_peak must be non-negative")
        if not 0 < self.half_angle_alpha < math.pi / 2:
            raise DomainError("half_angle_alpha must lie in (0, pi/2)")
        if self.velocity < 0:
            raise DomainError("velocity must be non-negative")
        for name in ("spontaneous_rate", "recoil_frequency"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise DomainError(f"{name} must be non-negative")

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def doppler(self) -> float:
        return doppler_frequency(self.wavenumber, self.velocity, self.half_angle_alpha)

    def replace(self, **changes) -> "PhysicalSetup":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class ZoneParameters:
    """One zone in dimensionless form.

    ``a`` is the dimensionless Rabi frequency ``|Omega(x)|/|Delta|``;
    ``rabi_tau`` is derived from it so the two can never disagree.
    """

    delta_tau: float
    omega_alpha_tau: float
    a: float
    envelope: Envelope = field(default_factory=eckart)

    def __post_init__(self):
        if self.delta_tau == 0 or not math.isfinite(self.delta_tau):
            raise DomainError("delta_tau must be finite and nonzero")
        if not self.omega_alpha_tau >= 0:
            raise DomainError("omega_alpha_tau must be non-negative")
        if not self.a >= 0:
            raise DomainError("a must be non-negative")

    @classmethod
    def from_rabi(cls, delta_tau: float, omega_alpha_tau: float, rabi_tau: float,
                  envelope: Envelope | None = None) -> "ZoneParameters":
        if delta_tau == 0:
            raise DomainError("delta_tau must be nonzero")
        return cls(float(delta_tau), float(omega_alpha_tau), abs(rabi_tau) / abs(delta_tau),
                   envelope if envelope is not None else eckart())

    @property
    def rabi_tau(self) -> float:
        return self.a * abs(self.delta_tau)

    @property
    def delta_sign(self) -> int:
        return 1 if self.delta_tau > 0 else -1

    @property
    def effective_delta_tau(self) -> float:
        """Detuning of the co-moving frame, ``(Delta + omega_alpha) tau``."""
        return self.delta_tau + self.omega_alpha_tau

    def replace(self, **changes) -> "ZoneParameters":
        from dataclasses import replace

        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "delta_tau": self.delta_tau,
            "omega_alpha_tau": self.omega_alpha_tau,
            "a": self.a,
            "rabi_tau": self.rabi_tau,
            "envelope": self.envelope.to_dict(),
        }


@dataclass(frozen=True)
class ValidityReport:
    """Margins of the approximations behind the phase formulas.

    A margin of ``None`` means the inputs needed to evaluate it were absent.
    Flags are ``None`` for unevaluated margins.
    """

    adiabatic_margin: float
    raman_nath_margin: Optional[float]
    spontaneous_margin: Optional[float]
    threshold: float
    weak_field_ratio: float

    @property
    def adiabatic_ok(self) -> bool:
        return self.adiabatic_margin > self.threshold

    @property
    def raman_nath_ok(self) -> Optional[bool]:
        return None if self.raman_nath_margin is None else self.raman_nath_margin > self.threshold

    @property
    def spontaneous_ok(self) -> Optional[bool]:
        return None if self.spontaneous_margin is None else self.spontaneous_margin > self.threshold

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "adiabatic_margin": self.adiabatic_margin,
            "adiabatic_ok": self.adiabatic_ok,
            "raman_nath_margin": self.raman_nath_margin,
            "raman_nath_ok": self.raman_nath_ok,
            "spontaneous_margin": self.spontaneous_margin,
            "spontaneous_ok": self.spontaneous_ok,
            "weak_field_ratio": self.weak_field_ratio,
        }


def doppler_frequency(k: float, v: float, alpha: float) -> float:
    """``k v sin(alpha)``, the rotation rate of the parameter-space circuit."""
    if k < 0 or v < 0:
        raise DomainError(f"wavenumber and speed must be non-negative (k={k}, v={v})")
    if not 0 <= alpha <= math.pi / 2:
        raise DomainError(f"alpha must lie in [0, pi/2], got {alpha}")
    return k * v * math.sin(alpha)


def rabi_frequency(omega0: float, k: float, alpha: float, x):
    """Signed standing-wave Rabi frequency ``Omega0 sin(k x cos(alpha))``."""
    if omega0 < 0:
        raise DomainError("peak Rabi frequency must be non-negative")
    if np.ndim(x):
        return omega0 * np.sin(k * np.asarray(x, dtype=float) * math.cos(alpha))
    return omega0 * math.sin(k * x * math.cos(alpha))


def to_dimensionless(setup: PhysicalSetup, x: float, envelope: Envelope | None = None) -> ZoneParameters:
    tau = setup.envelope_time
    if setup.detuning == 0:
        raise DomainError("detuning must be nonzero")
    omega_x = abs(rabi_frequency(setup.rabi_peak, setup.wavenumber, setup.half_angle_alpha, x))
    return ZoneParameters(
        delta_tau=setup.detuning * tau,
        omega_alpha_tau=setup.doppler * tau,
        a=omega_x / abs(setup.detuning),
        envelope=envelope if envelope is not None else eckart(),
    )


def from_dimensionless(zone: ZoneParameters, tau: float) -> tuple[float, float, float]:
    """Return ``(Delta, omega_alpha, |Omega(x)|)`` in 1/s for envelope time ``tau``."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    delta = zone.delta_tau / tau
    return delta, zone.omega_alpha_tau / tau, zone.a * abs(delta)


def adiabatic_margin(delta_tau: float, omega_alpha_tau: float, tail_decay: float = 1.0) -> float:
    """``|Delta| tau / sqrt(r^2 + (omega_alpha tau)^2)`` with tail decay rate ``r``."""
    if math.isinf(tail_decay):
        return 0.0
    return abs(delta_tau) / math.hypot(tail_decay, omega_alpha_tau)


def validity_report(setup: PhysicalSetup, envelope: Envelope | None = None,
                    threshold: float = DEFAULT_THRESHOLD) -> ValidityReport:
    env = envelope if envelope is not None else eckart()
    tau = setup.envelope_time
    adiabatic = adiabatic_margin(setup.detuning * tau, setup.doppler * tau, env.tail_decay)

    raman_nath = None
    if setup.recoil_frequency is not None:
        denom = setup.recoil_frequency * tau**2 * setup.rabi_peak
        raman_nath = math.inf if denom == 0 else 1.0 / denom

    spontaneous = None
    if setup.spontaneous_rate is not None:
        denom = setup.spontaneous_rate * tau * (setup.rabi_peak / setup.detuning) ** 2
        spontaneous = math.inf if denom == 0 else 1.0 / denom

    return ValidityReport(
        adiabatic_margin=adiabatic,
        raman_nath_margin=raman_nath,
        spontaneous_margin=spontaneous,
        threshold=threshold,
        weak_field_ratio=setup.doppler / abs(setup.detuning),
    )


def recoil_frequency(wavelength: float, mass_u: float) -> float:
    """``hbar k^2 / (2 M)`` for an atom of mass ``mass_u`` atomic mass units."""
    k = 2.0 * math.pi / wavelength
    return constants.hbar * k * k / (2.0 * mass_u * constants.atomic_mass)


def argon_setup(envelope_time: float = 1e-6, rabi_peak: float = 3e6) -> PhysicalSetup:
    """Metastable argon at 812 nm, v = 700 m/s, alpha = 1e-3, Delta = 3e7 1/s.

    ``envelope_time`` and ``rabi_peak`` are not fixed by the example and
    default to 1 us and 3e6 1/s. The spontaneous rate is left unset.
    """
    wavelength = 812e-9
    return PhysicalSetup(
        wavelength=wavelength,
        velocity=700.0,
        half_angle_alpha=1e-3,
        detuning=3e7,
        rabi_peak=rabi_peak,
        envelope_time=envelope_time,
        recoil_frequency=recoil_frequency(wavelength, 39.9623831),
    )

