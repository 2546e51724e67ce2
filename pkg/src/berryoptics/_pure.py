"""Pure-Python kernels.

Reference implementation of everything in ``_core.pyx``; used when the
compiled extension is missing, for tabulated envelopes, or when
``BERRYOPTICS_BACKEND=python``. Both must implement the same algorithm
step for step.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import StepSizeError

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# difference between the 5th- and 4th-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (-71 / 57600, 71 / 16695, -71 / 1920, 17253 / 339200,
                                -22 / 525, 1 / 40)
# free 4th-order interpolant, coefficients of theta^1..theta^4 per stage
DENSE_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_HALF_PI = 0.5 * math.pi
_TWO_PI = 2.0 * math.pi

ECKART, GAUSSIAN, MESA, TABULATED = 0, 1, 2, 3


def envelope_scalar(kind: int, half_window: float, func=None):
    """Scalar ``f(theta)`` for the kernel loop."""
    if kind == ECKART:
        def f(th):
            q = math.exp(-abs(th))
            return 2.0 * q / (1.0 + q * q)
    elif kind == GAUSSIAN:
        def f(th):
            return math.exp(-0.5 * th * th)
    elif kind == MESA:
        def f(th):
            return 1.0 if abs(th) <= half_window else 0.0
    else:
        def f(th):
            return float(func(th))
    return f


def _wrap(x: float) -> float:
    return x - _TWO_PI * math.floor((x + math.pi) / _TWO_PI)


def integrate_two_level(kind, half_window, func, detuning, rabi, doppler, lab,
                        t0, t1, ae0, ag0, rtol, atol, t_eval=None, h_max=math.inf,
                        max_steps=10_000_000):
    """Integrate ``i d/dt (A_e, A_g) = H(t) (A_e, A_g)`` from ``t0`` to ``t1``.

    ``H = (1/2) [[D, conj(c)], [c, -D]]`` with ``c = rabi f(t)`` in the
    co-moving frame and ``c = rabi f(t) exp(-i doppler t)`` in the lab frame.
    Returns a dict with sample times, both amplitudes, the continuously
    unwrapped ``arg A_g`` and solver statistics.

    Each accepted step is projected back to the initial norm (the exact
    flow is unitary); ``max_norm_drift`` is the largest defect removed.
    """
    env = envelope_scalar(kind, half_window, func)
    D = float(detuning)
    W = float(rabi)
    w = float(doppler)

    if lab:
        def rhs(t, ae, ag):
            c = W * env(t) * complex(math.cos(w * t), -math.sin(w * t))
            return (-0.5j * (D * ae + c.conjugate() * ag), -0.5j * (c * ae - D * ag))
    else:
        def rhs(t, ae, ag):
            c = W * env(t)
            return (-0.5j * (D * ae + c * ag), -0.5j * (c * ae - D * ag))

    t = float(t0)
    t_end = float(t1)
    ae, ag = complex(ae0), complex(ag0)
    norm0 = abs(ae) ** 2 + abs(ag) ** 2
    arg_prev = math.atan2(ag.imag, ag.real)
    phase = arg_prev

    out_t, out_e, out_g, out_p = [], [], [], []
    dense = t_eval is not None
    if dense:
        t_eval = [float(x) for x in t_eval]
        k_eval = 0
        while k_eval < len(t_eval) and t_eval[k_eval] <= t:
            out_t.append(t_eval[k_eval])
            out_e.append(ae)
            out_g.append(ag)
            out_p.append(phase)
            k_eval += 1
    else:
        out_t.append(t)
        out_e.append(ae)
        out_g.append(ag)
        out_p.append(phase)

    scale_rate = 0.5 * math.hypot(D, W) + 1.0
    h = min(h_max, 0.05 / scale_rate, t_end - t)
    k1e, k1g = rhs(t, ae, ag)
    n_steps = n_rejected = 0
    max_drift = 0.0

    while t < t_end:
        if n_steps + n_rejected >= max_steps:
            raise StepSizeError("maximum number of steps exceeded",
                                {"t": t, "h": h, "steps": n_steps, "rejected": n_rejected})
        if h < 1e-13 * max(1.0, abs(t)):
            raise StepSizeError("step size underflow",
                                {"t": t, "h": h, "steps": n_steps, "rejected": n_rejected})
        last = t + h >= t_end
        if last:
            h = t_end - t

        k2e, k2g = rhs(t + _C2 * h, ae + h * (_A21 * k1e), ag + h * (_A21 * k1g))
        k3e, k3g = rhs(t + _C3 * h, ae + h * (_A31 * k1e + _A32 * k2e),
                       ag + h * (_A31 * k1g + _A32 * k2g))
        k4e, k4g = rhs(t + _C4 * h, ae + h * (_A41 * k1e + _A42 * k2e + _A43 * k3e),
                       ag + h * (_A41 * k1g + _A42 * k2g + _A43 * k3g))
        k5e, k5g = rhs(t + _C5 * h,
                       ae + h * (_A51 * k1e + _A52 * k2e + _A53 * k3e + _A54 * k4e),
                       ag + h * (_A51 * k1g + _A52 * k2g + _A53 * k3g + _A54 * k4g))
        k6e, k6g = rhs(t + h,
                       ae + h * (_A61 * k1e + _A62 * k2e + _A63 * k3e + _A64 * k4e + _A65 * k5e),
                       ag + h * (_A61 * k1g + _A62 * k2g + _A63 * k3g + _A64 * k4g + _A65 * k5g))
        ne = ae + h * (_B1 * k1e + _B3 * k3e + _B4 * k4e + _B5 * k5e + _B6 * k6e)
        ng = ag + h * (_B1 * k1g + _B3 * k3g + _B4 * k4g + _B5 * k5g + _B6 * k6g)
        t_new = t_end if last else t + h
        k7e, k7g = rhs(t_new, ne, ng)

        err_e = h * (_E1 * k1e + _E3 * k3e + _E4 * k4e + _E5 * k5e + _E6 * k6e + _E7 * k7e)
        err_g = h * (_E1 * k1g + _E3 * k3g + _E4 * k4g + _E5 * k5g + _E6 * k6g + _E7 * k7g)
        sc_e = atol + rtol * max(abs(ae), abs(ne))
        sc_g = atol + rtol * max(abs(ag), abs(ng))
        err = math.sqrt(0.5 * ((abs(err_e) / sc_e) ** 2 + (abs(err_g) / sc_g) ** 2))

        if err > 1.0:
            h *= max(_MIN_FACTOR, _SAFETY * err ** -0.2)
            n_rejected += 1
            continue
        arg_new = math.atan2(ng.imag, ng.real)
        jump = _wrap(arg_new - arg_prev)
        if abs(jump) >= _HALF_PI:
            # keep consecutive phases on the nearest branch
            h *= 0.5
            n_rejected += 1
            continue

        if dense:
            while k_eval < len(t_eval) and t_eval[k_eval] <= t_new:
                s = (t_eval[k_eval] - t) / h
                ks_e = (k1e, 0.0, k3e, k4e, k5e, k6e, k7e)
                ks_g = (k1g, 0.0, k3g, k4g, k5g, k6g, k7g)
                ye, yg = ae, ag
                for i in range(7):
                    p = DENSE_P[i]
                    q = s * (p[0] + s * (p[1] + s * (p[2] + s * p[3])))
                    if q != 0.0:
                        ye += h * q * ks_e[i]
                        yg += h * q * ks_g[i]
                a_s = math.atan2(yg.imag, yg.real)
                fs = math.sqrt(norm0 / (abs(ye) ** 2 + abs(yg) ** 2))
                out_t.append(t_eval[k_eval])
                out_e.append(ye * fs)
                out_g.append(yg * fs)
                out_p.append(phase + _wrap(a_s - arg_prev))
                k_eval += 1

        # project back onto the norm shell; the system is linear, so the
        # FSAL stage scales by the same factor
        n2 = abs(ne) ** 2 + abs(ng) ** 2
        drift = abs(n2 - norm0)
        if drift > max_drift:
            max_drift = drift
        fac = math.sqrt(norm0 / n2)
        t = t_new
        ae, ag = ne * fac, ng * fac
        k1e, k1g = k7e * fac, k7g * fac
        phase += jump
        arg_prev = arg_new
        n_steps += 1
        if not dense:
            out_t.append(t)
            out_e.append(ae)
            out_g.append(ag)
            out_p.append(phase)

        factor = _MAX_FACTOR if err == 0.0 else min(_MAX_FACTOR, _SAFETY * err ** -0.2)
        h = min(h_max, h * max(_MIN_FACTOR, factor))

    return {
        "t": np.asarray(out_t, dtype=float),
        "amp_e": np.asarray(out_e, dtype=complex),
        "amp_g": np.asarray(out_g, dtype=complex),
        "phase_g": np.asarray(out_p, dtype=float),
        "n_steps": n_steps,
        "n_rejected": n_rejected,
        "max_norm_drift": max_drift,
    }


def log_flux_excess(theta: float, a: float) -> float:
    q = math.exp(-2.0 * theta)
    u = 4.0 * a * a * q / ((1.0 + q) * (1.0 + q))
    s = u / (math.sqrt(1.0 + u) + 1.0)
    return math.log1p(0.5 * (1.0 + q) * s)


def winding_terms(N: int, a: float, omega_alpha_tau: float) -> np.ndarray:
    out = np.empty(N)
    prev = log_flux_excess(0.0, a)
    for m in range(1, N + 1):
        cur = log_flux_excess(m * math.pi / omega_alpha_tau, a)
        out[m - 1] = omega_alpha_tau * (cur - prev)
        prev = cur
    return out


def compensated_sum(values) -> float:
    return math.fsum(values)
