"""Transverse wave packets with an imprinted geometric phase.

A Gaussian packet ``psi ~ exp(-x^2 / 2 dx0^2)`` picks up the position
dependent phase ``gamma(x)`` of the zone(s) it crosses and then spreads
freely. Near a node of the standing wave ``gamma`` is quadratic,
``-(b/2) x^2/dx0^2``, and the packet first focuses, then spreads.

Widths follow the convention ``|psi|^2 ~ exp(-x^2 / dx^2)``. Numerical work
uses ``x`` in units of ``dx0`` and ``t`` in units of the spreading time
``t_s = M dx0^2 / hbar``, where the free equation is ``i psi_t = -psi_xx / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import AliasingError, DomainError
from .model import EnvelopeKind, ZoneParameters
from .phases import eckart_geometric_phase, geometric_phase_quadrature

#: default grid: 2**12 points over +-10 dx0
DEFAULT_POINTS = 4096
DEFAULT_HALF_WIDTH = 10.0

#: edge amplitude allowed relative to the peak
EDGE_TOLERANCE = 1e-8

#: spectral power allowed in the outer eighth of the momentum band
SPECTRAL_TAIL_TOLERANCE = 1e-12

NORM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class GaussianPacket:
    """Analytic description: initial width, focusing parameter, spreading time."""

    width0: float = 1.0
    b: float = 0.0
    t_s: float = 1.0

    def __post_init__(self):
        if not self.width0 > 0:
            raise DomainError("width0 must be positive")
        if not self.t_s > 0:
            raise DomainError("t_s must be positive")
        if not math.isfinite(self.b):
            raise DomainError("b must be finite")

    @property
    def hbar_over_mass(self) -> float:
        return self.width0**2 / self.t_s

    def with_b(self, b: float) -> "GaussianPacket":
        return GaussianPacket(self.width0, b, self.t_s)


@dataclass(frozen=True)
class SampledPacket:
    """Complex amplitudes on a uniform grid symmetric about 0."""

    x: np.ndarray
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size < 8:
            raise DomainError("grid must be 1-D with at least 8 points")
        if np.shape(self.amps) != x.shape:
            raise DomainError("amplitudes and grid differ in shape")

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2) * self.dx)

    def edge_ratio(self) -> float:
        mag = np.abs(self.amps)
        peak = mag.max()
        return float(max(mag[0], mag[-1]) / peak) if peak > 0 else 0.0

    def with_phase(self, phase) -> "SampledPacket":
        return SampledPacket(self.x, self.amps * np.exp(1j * np.asarray(phase, dtype=float)))


# -- focusing parameter and phase profiles ------------------------------------------------

def quadratic_b(zone: ZoneParameters, k_dx0: float, alpha: float = 0.0, n_zones: int = 1) -> float:
    """Curvature of the imprinted phase near a node, in packet units.

    ``b = n_zones omega_alpha tau (Omega_0/|Delta|)^2 (k dx0 cos alpha)^2`` with
    ``zone.a`` read as the peak ratio ``Omega_0/|Delta|``. Two oppositely
    detuned zones add their geometric phases, hence ``n_zones``.
    """
    if not k_dx0 > 0:
        raise DomainError("k_dx0 must be positive")
    if n_zones not in (1, 2):
        raise DomainError("n_zones must be 1 or 2")
    return n_zones * zone.omega_alpha_tau * zone.a**2 * (k_dx0 * math.cos(alpha)) ** 2


def eckart_lens_profile(x, omega_alpha_tau: float, rabi_ratio: float, k_dx0: float,
                        alpha: float = 0.0, n_zones: int = 1) -> np.ndarray:
    """``gamma(x) = -n (omega_alpha tau / 2) ln(1 + a(x)^2)``, ``a(x) = (Omega_0/|Delta|) |sin(k x cos alpha)|``.

    ``x`` is in units of ``dx0``.
    """
    s = np.sin(k_dx0 * math.cos(alpha) * np.asarray(x, dtype=float))
    return -0.5 * n_zones * omega_alpha_tau * np.log1p((rabi_ratio * s) ** 2)


def berry_phase_profile(zone_family: Callable[[float], ZoneParameters], x,
                        n_zones: int = 1, tol: float = 1e-12) -> np.ndarray:
    """Geometric phase of ``zone_family(x)`` at every grid point, times ``n_zones``.

    Eckart zones use the closed form; other envelopes are integrated, one
    quadrature per distinct ``a``.
    """
    xs = np.asarray(x, dtype=float)
    out = np.empty_like(xs)
    cache: dict = {}
    for i, xi in enumerate(xs.flat):
        z = zone_family(float(xi))
        key = (z.a, z.omega_alpha_tau, z.envelope)
        val = cache.get(key)
        if val is None:
            if z.envelope.kind == EnvelopeKind.ECKART:
                val = eckart_geometric_phase(z.a, z.omega_alpha_tau)
            else:
                val = geometric_phase_quadrature(z, tol).value
            cache[key] = val
        out.flat[i] = n_zones * val
    return out


def standing_wave_family(delta_tau: float, omega_alpha_tau: float, rabi_ratio: float,
                         k_dx0: float, alpha: float = 0.0, envelope=None):
    """Zone at transverse position ``x`` (units of ``dx0``) of a standing wave."""
    kc = k_dx0 * math.cos(alpha)

    def family(x: float) -> ZoneParameters:
        a = abs(rabi_ratio * math.sin(kc * x))
        if envelope is None:
            return ZoneParameters(delta_tau, omega_alpha_tau, a)
        return ZoneParameters(delta_tau, omega_alpha_tau, a, envelope)

    return family


# -- analytic widths --------------------------------------------------------------------

def analytic_width(t, packet: GaussianPacket):
    """``dx0 sqrt((1 - b t/t_s)^2 + (t/t_s)^2)``."""
    tt = np.asarray(t, dtype=float) / packet.t_s
    if np.any(tt < 0):
        raise DomainError("t must be non-negative")
    w = packet.width0 * np.hypot(1.0 - packet.b * tt, tt)
    return float(w) if np.ndim(w) == 0 else w


def min_width(packet: GaussianPacket) -> tuple[float, float]:
    """``(dx_min, t_min)``; for ``b <= 0`` the width never decreases and ``(dx0, 0)`` is returned."""
    b = packet.b
    if b <= 0:
        return packet.width0, 0.0
    return packet.width0 / math.sqrt(1.0 + b * b), packet.t_s * b / (1.0 + b * b)


def figure_curves(b: float = 5.0, t_max: float = 1.0, n: int = 201) -> dict:
    """Width against time for the ground (``b``), excited (``-b``) and free packets, in units of ``(t_s, dx0)``."""
    t = np.linspace(0.0, t_max, n)
    base = GaussianPacket()
    return {
        "t": t,
        "ground": analytic_width(t, base.with_b(b)),
        "excited": analytic_width(t, base.with_b(-b)),
        "free": analytic_width(t, base),
    }


# -- sampled packets ----------------------------------------------------------------------

def _max_width(b: float, t_max: float) -> float:
    # the width is convex in t, so the maximum sits at an end point
    return max(1.0, math.hypot(1.0 - b * t_max, t_max))


def make_grid(b: float = 0.0, t_max: float = 0.0, n_points: int = DEFAULT_POINTS,
              half_width: float = DEFAULT_HALF_WIDTH, max_points: int = 1 << 22) -> np.ndarray:
    """Uniform grid (units of ``dx0``) wide and fine enough for a chirped Gaussian up to ``t_max``.

    Starts from ``n_points`` over ``+-half_width`` and doubles the extent at
    fixed spacing until a Gaussian of the largest width reached on ``[0, t_max]``
    falls below the edge tolerance; the spacing is halved until the momentum
    band ``sqrt(1 + b^2)`` is resolved well inside the Nyquist limit.
    """
    if n_points < 8 or half_width <= 0:
        raise DomainError("need at least 8 points and a positive half width")
    edge_sigmas = math.sqrt(2.0 * math.log(1.0 / EDGE_TOLERANCE)) * 1.1
    w = _max_width(b, t_max)
    dx = 2.0 * half_width / n_points
    k_band = math.sqrt(1.0 + b * b)
    while math.pi / dx < 10.0 * k_band:
        dx *= 0.5
    L = half_width
    while L < edge_sigmas * w:
        L *= 2.0
    n = int(round(2.0 * L / dx))
    if n > max_points:
        raise DomainError(f"grid would need {n} points (limit {max_points})")
    # symmetric about 0, endpoint excluded so the FFT sees one period
    return -L + dx * np.arange(n)


def sample_gaussian(x, b: float = 0.0) -> SampledPacket:
    """Normalized ``exp(-x^2/2) exp(-i b x^2/2)`` on ``x`` (units of ``dx0``)."""
    x = np.asarray(x, dtype=float)
    amps = np.pi ** -0.25 * np.exp(-0.5 * x * x * (1.0 + 1j * b))
    return _normalized(SampledPacket(x, amps))


def _normalized(p: SampledPacket) -> SampledPacket:
    n = p.norm
    if n <= 0:
        raise DomainError("packet has zero norm")
    return SampledPacket(p.x, p.amps / math.sqrt(n))


def imprint(packet: SampledPacket, phase) -> SampledPacket:
    """Multiply by ``exp(i phase(x))``; ``phase`` is an array or a callable of ``x``."""
    ph = phase(packet.x) if callable(phase) else phase
    return packet.with_phase(ph)


def spectral_tail_fraction(packet: SampledPacket) -> float:
    """Share of ``sum |psi_k|^2`` in the outer eighth of the momentum band."""
    spec = np.abs(np.fft.fft(packet.amps)) ** 2
    k = np.abs(np.fft.fftfreq(packet.x.size))  # in units of the sampling rate, max 0.5
    total = spec.sum()
    return float(spec[k > 0.5 * 7 / 8].sum() / total) if total > 0 else 0.0


def propagate_free(packet: SampledPacket, t: float, hbar_over_mass: float = 1.0) -> SampledPacket:
    """Free evolution over ``t``, done exactly in momentum space.

    Raises :class:`AliasingError` if the packet carries momenta near the
    Nyquist limit, or if it reaches the grid edges (it would wrap around).
    """
    if t < 0:
        raise DomainError("t must be non-negative")
    tail = spectral_tail_fraction(packet)
    if tail > SPECTRAL_TAIL_TOLERANCE:
        raise AliasingError(f"{tail:.2e} of the power sits near the Nyquist limit; refine the grid")
    if t == 0:
        return SampledPacket(packet.x, packet.amps.copy())
    k = 2.0 * np.pi * np.fft.fftfreq(packet.x.size, d=packet.dx)
    psi_k = np.fft.fft(packet.amps)
    psi_k *= np.exp(-0.5j * hbar_over_mass * t * k * k)
    out = SampledPacket(packet.x, np.fft.ifft(psi_k))
    if out.edge_ratio() > 1e3 * EDGE_TOLERANCE:
        raise AliasingError(f"packet reaches the grid edge (ratio {out.edge_ratio():.2e}); widen the grid")
    return out


def propagate_direct(packet: SampledPacket, t: float, x_out=None,
                     hbar_over_mass: float = 1.0) -> SampledPacket:
    """Reference evolution by summing the free-particle kernel directly.

    ``O(N M)`` and only accurate when the kernel's oscillation is resolved;
    meant for cross-checking :func:`propagate_free` on small grids.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    x_in = packet.x
    x_out = x_in if x_out is None else np.asarray(x_out, dtype=float)
    c = 1.0 / np.sqrt(2j * np.pi * hbar_over_mass * t)
    d = x_out[:, None] - x_in[None, :]
    kern = np.exp(0.5j * d * d / (hbar_over_mass * t))
    amps = c * packet.dx * (kern @ packet.amps)
    return SampledPacket(x_out, amps)


def measure_width(packet: SampledPacket) -> float:
    """``sqrt(2 Var(x))`` of ``|psi|^2``: equals ``dx`` for ``|psi|^2 ~ exp(-x^2/dx^2)``."""
    p = np.abs(packet.amps) ** 2
    n = p.sum() * packet.dx
    if not n > 0:
        raise DomainError("cannot measure the width of a zero packet")
    if abs(n - 1.0) > 1e-6:
        raise DomainError(f"packet is not normalized (norm {n:.8g})")
    x = packet.x
    mean = np.sum(x * p) * packet.dx / n
    var = np.sum((x - mean) ** 2 * p) * packet.dx / n
    return math.sqrt(2.0 * var)


@dataclass(frozen=True)
class FocusRun:
    """Numerical focusing of a packet with a full (not just quadratic) phase profile."""

    b: float
    times: np.ndarray
    widths: np.ndarray
    analytic: np.ndarray
    width_at_t_min: float
    predicted_min: float

    @property
    def relative_deviation(self) -> float:
        return abs(self.width_at_t_min - self.predicted_min) / self.predicted_min


def focus_full_profile(k_dx0: float, rabi_ratio: float = 1.8, b: float = 5.0, n_zones: int = 2,
                       alpha: float = 0.0, times=None, grid: Optional[np.ndarray] = None) -> FocusRun:
    """Imprint the exact Eckart lens profile tuned to curvature ``b`` and propagate.

    ``omega_alpha tau`` is chosen so that the quadratic part of the profile
    has curvature ``b``; the width at the predicted focus is compared with
    the quadratic-lens minimum.
    """
    kc = k_dx0 * math.cos(alpha)
    omega = b / (n_zones * rabi_ratio**2 * kc**2)
    base = GaussianPacket(b=b)
    dx_min, t_min = min_width(base)
    times = np.linspace(0.0, 2.0 * t_min, 21) if times is None else np.asarray(times, dtype=float)
    x = make_grid(b=b, t_max=float(max(times.max(), t_min))) if grid is None else grid
    psi0 = imprint(sample_gaussian(x),
                   eckart_lens_profile(x, omega, rabi_ratio, k_dx0, alpha, n_zones))
    widths = np.array([measure_width(propagate_free(psi0, t)) for t in times])
    w_min = measure_width(propagate_free(psi0, t_min))
    return FocusRun(b, times, widths, analytic_width(times, base), w_min, dx_min)
