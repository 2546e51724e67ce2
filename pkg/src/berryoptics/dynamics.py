"""Direct integration of the two-level equations of motion.

This is the reference against which the adiabatic phase formulas are
checked. Two frames are supported:

* ``LAB``: ``i dA/dt = (1/2) [[Delta, V*], [V, -Delta]] A`` with the
  moving-atom coupling ``V = Omega f(t) exp(-i omega_alpha t)``;
* ``TILDE``: the co-moving frame, ``i dA~/dt = (1/2) [[D~, Omega f],
  [Omega f, -D~]] A~`` with the effective detuning ``D~ = Delta + omega_alpha``.

They are related by ``A~_e = A_e exp(-i omega_alpha t/2)`` and
``A~_g = A_g exp(+i omega_alpha t/2)``. Times are in units of ``tau``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import _backend
from .errors import DomainError, PhaseUnwrapError
from .model import EnvelopeKind, ZoneParameters, adiabatic_margin
from .phases import (
    Method,
    PhaseResult,
    _half_integral,
    _sqrt_minus_one,
    check_cancellation_pair,
    dynamical_phase_quadrature,
    geometric_phase_quadrature,
)
from .quadrature import DEFAULT_TOL

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12

#: smallest ground amplitude for which the phase of A_g is trusted
MIN_GROUND_AMPLITUDE = 0.5

#: zones closer than this (in tau) overlap through their tails
MIN_GAP = 5.0


class Frame(str, enum.Enum):
    LAB = "lab"
    TILDE = "tilde"

    @property
    def other(self) -> "Frame":
        return Frame.TILDE if self is Frame.LAB else Frame.LAB


@dataclass(frozen=True)
class TwoLevelState:
    amp_e: complex
    amp_g: complex
    frame: Frame
    t: float

    @property
    def norm(self) -> float:
        return abs(self.amp_e) ** 2 + abs(self.amp_g) ** 2

    @property
    def populations(self) -> tuple[float, float]:
        return abs(self.amp_e) ** 2, abs(self.amp_g) ** 2


@dataclass(frozen=True)
class SolverStats:
    steps: int
    rejected: int
    max_norm_drift: float


@dataclass(frozen=True)
class TwoLevelTrajectory:
    """Time-ordered samples of one zone passage, stored column-wise."""

    t: np.ndarray
    amp_e: np.ndarray
    amp_g: np.ndarray
    phase_g: np.ndarray = field(repr=False)
    frame: Frame
    zone: ZoneParameters
    solver_stats: SolverStats
    rtol: float = DEFAULT_RTOL

    @property
    def states(self) -> list[TwoLevelState]:
        return [TwoLevelState(complex(e), complex(g), self.frame, float(t))
                for t, e, g in zip(self.t, self.amp_e, self.amp_g)]

    @property
    def final(self) -> TwoLevelState:
        return TwoLevelState(complex(self.amp_e[-1]), complex(self.amp_g[-1]), self.frame,
                             float(self.t[-1]))

    @property
    def populations(self) -> tuple[np.ndarray, np.ndarray]:
        return np.abs(self.amp_e) ** 2, np.abs(self.amp_g) ** 2

    def norm_deviation(self) -> float:
        pe, pg = self.populations
        return float(np.max(np.abs(pe + pg - 1.0)))


def _frame_detuning(zone: ZoneParameters, frame: Frame) -> float:
    return zone.effective_delta_tau if frame is Frame.TILDE else zone.delta_tau


def solve_two_level(zone: ZoneParameters, frame: Frame | str = Frame.TILDE,
                    rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                    t_eval=None, initial: Optional[TwoLevelState] = None,
                    backend: Optional[str] = None) -> TwoLevelTrajectory:
    """Integrate one zone passage from ``-T`` to ``+T`` (``T`` = envelope half window).

    Starts in the ground state of ``frame`` unless ``initial`` is given.
    Without ``t_eval`` every accepted step is recorded; otherwise the dense
    interpolant is sampled at ``t_eval`` (strictly increasing, inside the
    window).
    """
    frame = Frame(frame)
    if not (rtol > 0 and atol > 0):
        raise DomainError("rtol and atol must be positive")
    env = zone.envelope
    T = env.half_window
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if t_eval.ndim != 1 or t_eval.size == 0:
            raise DomainError("t_eval must be a non-empty 1-D array")
        if np.any(np.diff(t_eval) <= 0):
            raise DomainError("t_eval must be strictly increasing")
        if t_eval[0] < -T or t_eval[-1] > T:
            raise DomainError(f"t_eval must lie inside [-{T:g}, {T:g}]")
    if initial is None:
        ae0, ag0 = 0j, 1 + 0j
    else:
        if initial.frame is not frame:
            initial = frame_transform(initial, zone)
        ae0, ag0 = initial.amp_e, initial.amp_g

    func = env if env.kind == EnvelopeKind.TABULATED else None
    raw = _backend.integrate_two_level(
        int(env.kind), T, func, _frame_detuning(zone, frame), zone.rabi_tau,
        zone.omega_alpha_tau, frame is Frame.LAB, -T, T, ae0, ag0, rtol, atol,
        t_eval=t_eval, backend=backend)
    stats = SolverStats(int(raw["n_steps"]), int(raw["n_rejected"]), float(raw["max_norm_drift"]))
    return TwoLevelTrajectory(raw["t"], raw["amp_e"], raw["amp_g"], raw["phase_g"], frame, zone,
                              stats, rtol)


def frame_transform(state: TwoLevelState, zone: ZoneParameters) -> TwoLevelState:
    """Express ``state`` in the other frame (lab <-> tilde); applying it twice is the identity."""
    half = 0.5 * zone.omega_alpha_tau * state.t
    c, s = math.cos(half), math.sin(half)
    rot = complex(c, s)  # exp(+i omega_alpha t / 2)
    if state.frame is Frame.LAB:
        return TwoLevelState(state.amp_e * rot.conjugate(), state.amp_g * rot, Frame.TILDE, state.t)
    return TwoLevelState(state.amp_e * rot, state.amp_g * rot.conjugate(), Frame.LAB, state.t)


def extract_total_phase(traj: TwoLevelTrajectory) -> float:
    """Ground-state phase gathered over the passage, unwrapped.

    The free precession ``D t/2`` of the frame (``D = D~`` in the tilde
    frame, ``Delta`` in the lab frame) is removed, so a run with no field
    gives zero. Raises :class:`PhaseUnwrapError` if ``|A_g|`` drops below
    one half anywhere, where the phase is not a meaningful observable.
    """
    amp = np.abs(traj.amp_g)
    if amp.size < 2:
        raise DomainError("trajectory needs at least two samples")
    if np.min(amp) <= MIN_GROUND_AMPLITUDE:
        k = int(np.argmin(amp))
        raise PhaseUnwrapError(
            f"|A_g| = {amp[k]:.3g} at t = {traj.t[k]:.6g} is too small to follow its phase")
    D = _frame_detuning(traj.zone, traj.frame)
    elapsed = float(traj.t[-1] - traj.t[0])
    return float(traj.phase_g[-1] - traj.phase_g[0]) - 0.5 * D * elapsed


# -- approximate solutions ------------------------------------------------------------

class WKBPhase(NamedTuple):
    phase: float
    beta_part: float
    gamma_part: float
    error: float


def wkb_phase(zone: ZoneParameters, tol: float = DEFAULT_TOL) -> WKBPhase:
    """Adiabatic ground-state phase in the tilde frame,

        phi~_g = (sign D~ / 2) int (sqrt(D~^2 + Omega^2 f^2) - |D~|) dt,

    with its first-order split in ``omega_alpha/Delta`` into ``beta sign(Delta)``
    and ``gamma``.
    """
    d_eff = zone.effective_delta_tau
    if d_eff == 0:
        raise DomainError("effective detuning vanishes; no adiabatic solution")
    margin = adiabatic_margin(zone.delta_tau, zone.omega_alpha_tau, zone.envelope.tail_decay)
    if margin < 1:
        warnings.warn(f"adiabatic margin {margin:.3g} < 1; the WKB phase is unreliable",
                      stacklevel=2)
    beta, eb = dynamical_phase_quadrature(zone, tol)
    gamma, eg = geometric_phase_quadrature(zone, tol)
    if zone.a == 0:
        return WKBPhase(0.0, 0.0, 0.0, 0.0)
    d = abs(d_eff)
    res = _half_integral(zone, _sqrt_minus_one, tol, d, a=zone.rabi_tau / d)
    sign = 1.0 if d_eff > 0 else -1.0
    return WKBPhase(sign * d * res.value, zone.delta_sign * beta, gamma, d * res.error + eb + eg)


class PerturbativePhase(NamedTuple):
    phase: float
    beta_part: float
    gamma_part: float


def perturbative_phase(zone: ZoneParameters) -> PerturbativePhase:
    """Second-order phase ``(Omega^2 tau^2 / 4 D~ tau) int f^2 dtheta`` and its split.

    The split expands ``1/D~`` to first order in ``omega_alpha``: the parts
    are the weak-field ``beta sign(Delta)`` and ``gamma``.
    """
    if zone.a > 0.3:
        warnings.warn(f"a = {zone.a:g} > 0.3; second-order theory is inaccurate", stacklevel=2)
    d_eff = zone.effective_delta_tau
    if d_eff == 0:
        raise DomainError("effective detuning vanishes")
    s = 0.25 * zone.envelope.square_integral()
    r2 = zone.rabi_tau ** 2
    return PerturbativePhase(r2 * s / d_eff, zone.a**2 * s * zone.delta_tau,
                             -zone.a**2 * s * zone.omega_alpha_tau)


# -- two zones -------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoZoneRun:
    """Outcome of a blue-then-red passage.

    ``result.phi_g`` is the measured ground-state phase; ``expected`` is the
    quadrature value of ``gamma + gamma'`` and ``residual`` their difference,
    i.e. the uncancelled dynamical (and non-adiabatic) contamination.
    """

    result: PhaseResult
    expected: float
    residual: float
    zone_phases: tuple[float, float]
    trajectories: tuple[TwoLevelTrajectory, TwoLevelTrajectory] = field(repr=False)
    gap: float = 0.0


def _to_interaction(state: TwoLevelState, d: float) -> tuple[complex, complex]:
    # strip the free precession of a tilde-frame state: b = A~ exp(+-i D~ t / 2)
    ph = 0.5 * d * state.t
    rot = complex(math.cos(ph), math.sin(ph))
    return state.amp_e * rot, state.amp_g * rot.conjugate()


def _from_interaction(be: complex, bg: complex, d: float, t: float) -> TwoLevelState:
    ph = 0.5 * d * t
    rot = complex(math.cos(ph), math.sin(ph))
    return TwoLevelState(be * rot.conjugate(), bg * rot, Frame.TILDE, t)


def simulate_two_zone(zone_blue: ZoneParameters, zone_red: ZoneParameters, gap: float = 10.0,
                      rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                      tol: float = DEFAULT_TOL, backend: Optional[str] = None) -> TwoZoneRun:
    """Pass through two oppositely detuned zones separated by ``gap`` (units of ``tau``).

    Each zone is integrated in its own co-moving frame with its laser phase
    referenced to the zone center. Between the zones the field is off, so
    the interaction-picture amplitudes are frozen during the gap and carried
    over unchanged, including any small excited-state amplitude.
    """
    check_cancellation_pair(zone_blue, zone_red)
    if not gap >= 0:
        raise DomainError("gap must be non-negative")
    if gap < MIN_GAP:
        warnings.warn(f"gap {gap:g} tau < {MIN_GAP:g} tau: the zones' tails overlap "
                      "and are not modelled", stacklevel=2)

    phases = []
    trajs = []
    state = None
    for zone in (zone_blue, zone_red):
        d = zone.effective_delta_tau
        T = zone.envelope.half_window
        init = None if state is None else _from_interaction(*state, d, -T)
        traj = solve_two_level(zone, Frame.TILDE, rtol, atol, initial=init, backend=backend)
        phases.append(extract_total_phase(traj))
        trajs.append(traj)
        state = _to_interaction(traj.final, d)

    total = phases[0] + phases[1]
    g1, e1 = geometric_phase_quadrature(zone_blue, tol)
    g2, e2 = geometric_phase_quadrature(zone_red, tol)
    expected = g1 + g2
    residual = total - expected
    result = PhaseResult(0.0, total, total, -total - math.pi, Method.ODE, abs(residual))
    return TwoZoneRun(result, expected, residual, (phases[0], phases[1]), (trajs[0], trajs[1]),
                      float(gap))
