# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: the two-level Dormand-Prince loop and the winding sums.

Mirrors ``_pure.py`` step for step; only the built-in envelope kinds
(Eckart, Gaussian, Mesa) are supported here.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, sqrt, atan2, floor, cos, sin, log1p, hypot, pow, M_PI, INFINITY

from .errors import StepSizeError

cnp.import_array()

ctypedef double complex cplx

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176
cdef double A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784
cdef double B6 = 11.0 / 84
cdef double E1 = -71.0 / 57600, E3 = 71.0 / 16695, E4 = -71.0 / 1920, E5 = 17253.0 / 339200
cdef double E6 = -22.0 / 525, E7 = 1.0 / 40

cdef double[7][4] P
P[0][:] = [1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432]
P[1][:] = [0.0, 0.0, 0.0, 0.0]
P[2][:] = [0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799]
P[3][:] = [0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072]
P[4][:] = [0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632]
P[5][:] = [0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844]
P[6][:] = [0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423]

cdef double SAFETY = 0.9, MIN_FACTOR = 0.2, MAX_FACTOR = 10.0
cdef double HALF_PI = 0.5 * M_PI, TWO_PI = 2.0 * M_PI

ECKART, GAUSSIAN, MESA, TABULATED = 0, 1, 2, 3


cdef inline double envelope(int kind, double hw, double th) noexcept nogil:
    cdef double q
    if kind == 0:
        q = exp(-fabs(th))
        return 2.0 * q / (1.0 + q * q)
    elif kind == 1:
        return exp(-0.5 * th * th)
    else:
        return 1.0 if fabs(th) <= hw else 0.0


cdef inline double wrap(double x) noexcept nogil:
    return x - TWO_PI * floor((x + M_PI) / TWO_PI)


cdef inline double cabs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double cabs(cplx z) noexcept nogil:
    return hypot(z.real, z.imag)


cdef struct Params:
    int kind
    double hw
    double D
    double W
    double w
    bint lab


cdef inline void rhs(Params* p, double t, cplx ae, cplx ag, cplx* de, cplx* dg) noexcept nogil:
    cdef double f = p.W * envelope(p.kind, p.hw, t)
    cdef cplx c, cc
    if p.lab:
        c = f * (cos(p.w * t) - 1j * sin(p.w * t))
        cc = c.real - 1j * c.imag
    else:
        c = f
        cc = f
    de[0] = -0.5j * (p.D * ae + cc * ag)
    dg[0] = -0.5j * (c * ae - p.D * ag)


cdef class _Recorder:
    """Growable column store for the sampled trajectory."""
    cdef double[::1] t, p
    cdef cplx[::1] e, g
    cdef Py_ssize_t n, cap

    def __init__(self, Py_ssize_t cap):
        self.cap = max(cap, 16)
        self.n = 0
        self.t = np.empty(self.cap)
        self.e = np.empty(self.cap, dtype=complex)
        self.g = np.empty(self.cap, dtype=complex)
        self.p = np.empty(self.cap)

    cdef void _grow(self):
        self.cap *= 2
        self.t = np.resize(np.asarray(self.t), self.cap)
        self.e = np.resize(np.asarray(self.e), self.cap)
        self.g = np.resize(np.asarray(self.g), self.cap)
        self.p = np.resize(np.asarray(self.p), self.cap)

    cdef inline void push(self, double t, cplx e, cplx g, double p):
        if self.n == self.cap:
            self._grow()
        self.t[self.n] = t
        self.e[self.n] = e
        self.g[self.n] = g
        self.p[self.n] = p
        self.n += 1

    def arrays(self):
        n = self.n
        return (np.array(self.t[:n]), np.array(self.e[:n]),
                np.array(self.g[:n]), np.array(self.p[:n]))


def integrate_two_level(int kind, double half_window, func, double detuning, double rabi,
                        double doppler, bint lab, double t0, double t1, ae0, ag0,
                        double rtol, double atol, t_eval=None, double h_max=INFINITY,
                        long max_steps=10_000_000):
    """See ``_pure.integrate_two_level``; ``func`` is ignored."""
    if kind not in (0, 1, 2):
        raise ValueError("compiled kernel supports built-in envelopes only")
    cdef Params prm
    prm.kind = kind
    prm.hw = half_window
    prm.D = detuning
    prm.W = rabi
    prm.w = doppler
    prm.lab = lab

    cdef double t = t0, t_end = t1, h, t_new, err, sc_e, sc_g, arg_prev, arg_new, jump, phase
    cdef double norm0, n2, drift, max_drift = 0.0, fac, factor, s, q, a_s, fs
    cdef cplx ae = complex(ae0), ag = complex(ag0), ne, ng, ye, yg
    cdef cplx k1e, k1g, k2e, k2g, k3e, k3g, k4e, k4g, k5e, k5g, k6e, k6g, k7e, k7g
    cdef cplx err_e, err_g
    cdef cplx kse[7]
    cdef cplx ksg[7]
    cdef long n_steps = 0, n_rejected = 0
    cdef bint last
    cdef int i
    cdef Py_ssize_t k_eval = 0, n_eval = 0
    cdef double[::1] te

    norm0 = cabs2(ae) + cabs2(ag)
    arg_prev = atan2(ag.imag, ag.real)
    phase = arg_prev

    cdef _Recorder rec
    cdef bint dense = t_eval is not None
    if dense:
        te_arr = np.ascontiguousarray(t_eval, dtype=float)
        te = te_arr
        n_eval = te.shape[0]
        rec = _Recorder(n_eval)
        while k_eval < n_eval and te[k_eval] <= t:
            rec.push(te[k_eval], ae, ag, phase)
            k_eval += 1
    else:
        rec = _Recorder(1024)
        rec.push(t, ae, ag, phase)

    h = min(h_max, 0.05 / (0.5 * hypot(detuning, rabi) + 1.0), t_end - t)
    rhs(&prm, t, ae, ag, &k1e, &k1g)

    while t < t_end:
        if n_steps + n_rejected >= max_steps:
            raise StepSizeError("maximum number of steps exceeded",
                                {"t": t, "h": h, "steps": n_steps, "rejected": n_rejected})
        if h < 1e-13 * max(1.0, fabs(t)):
            raise StepSizeError("step size underflow",
                                {"t": t, "h": h, "steps": n_steps, "rejected": n_rejected})
        last = t + h >= t_end
        if last:
            h = t_end - t

        rhs(&prm, t + C2 * h, ae + h * (A21 * k1e), ag + h * (A21 * k1g), &k2e, &k2g)
        rhs(&prm, t + C3 * h, ae + h * (A31 * k1e + A32 * k2e),
            ag + h * (A31 * k1g + A32 * k2g), &k3e, &k3g)
        rhs(&prm, t + C4 * h, ae + h * (A41 * k1e + A42 * k2e + A43 * k3e),
            ag + h * (A41 * k1g + A42 * k2g + A43 * k3g), &k4e, &k4g)
        rhs(&prm, t + C5 * h,
            ae + h * (A51 * k1e + A52 * k2e + A53 * k3e + A54 * k4e),
            ag + h * (A51 * k1g + A52 * k2g + A53 * k3g + A54 * k4g), &k5e, &k5g)
        rhs(&prm, t + h,
            ae + h * (A61 * k1e + A62 * k2e + A63 * k3e + A64 * k4e + A65 * k5e),
            ag + h * (A61 * k1g + A62 * k2g + A63 * k3g + A64 * k4g + A65 * k5g), &k6e, &k6g)
        ne = ae + h * (B1 * k1e + B3 * k3e + B4 * k4e + B5 * k5e + B6 * k6e)
        ng = ag + h * (B1 * k1g + B3 * k3g + B4 * k4g + B5 * k5g + B6 * k6g)
        t_new = t_end if last else t + h
        rhs(&prm, t_new, ne, ng, &k7e, &k7g)

        err_e = h * (E1 * k1e + E3 * k3e + E4 * k4e + E5 * k5e + E6 * k6e + E7 * k7e)
        err_g = h * (E1 * k1g + E3 * k3g + E4 * k4g + E5 * k5g + E6 * k6g + E7 * k7g)
        sc_e = atol + rtol * max(cabs(ae), cabs(ne))
        sc_g = atol + rtol * max(cabs(ag), cabs(ng))
        err = sqrt(0.5 * (cabs2(err_e) / (sc_e * sc_e) + cabs2(err_g) / (sc_g * sc_g)))

        if err > 1.0:
            h *= max(MIN_FACTOR, SAFETY * pow(err, -0.2))
            n_rejected += 1
            continue
        arg_new = atan2(ng.imag, ng.real)
        jump = wrap(arg_new - arg_prev)
        if fabs(jump) >= HALF_PI:
            h *= 0.5
            n_rejected += 1
            continue

        if dense:
            kse[0] = k1e; kse[1] = 0; kse[2] = k3e; kse[3] = k4e
            kse[4] = k5e; kse[5] = k6e; kse[6] = k7e
            ksg[0] = k1g; ksg[1] = 0; ksg[2] = k3g; ksg[3] = k4g
            ksg[4] = k5g; ksg[5] = k6g; ksg[6] = k7g
            while k_eval < n_eval and te[k_eval] <= t_new:
                s = (te[k_eval] - t) / h
                ye = ae
                yg = ag
                for i in range(7):
                    q = s * (P[i][0] + s * (P[i][1] + s * (P[i][2] + s * P[i][3])))
                    if q != 0.0:
                        ye = ye + h * q * kse[i]
                        yg = yg + h * q * ksg[i]
                a_s = atan2(yg.imag, yg.real)
                fs = sqrt(norm0 / (cabs2(ye) + cabs2(yg)))
                rec.push(te[k_eval], ye * fs, yg * fs, phase + wrap(a_s - arg_prev))
                k_eval += 1

        n2 = cabs2(ne) + cabs2(ng)
        drift = fabs(n2 - norm0)
        if drift > max_drift:
            max_drift = drift
        fac = sqrt(norm0 / n2)
        t = t_new
        ae = ne * fac
        ag = ng * fac
        k1e = k7e * fac
        k1g = k7g * fac
        phase += jump
        arg_prev = arg_new
        n_steps += 1
        if not dense:
            rec.push(t, ae, ag, phase)

        factor = MAX_FACTOR if err == 0.0 else min(MAX_FACTOR, SAFETY * pow(err, -0.2))
        h = min(h_max, h * max(MIN_FACTOR, factor))

    tt, ee, gg, pp = rec.arrays()
    return {
        "t": tt,
        "amp_e": ee,
        "amp_g": gg,
        "phase_g": pp,
        "n_steps": n_steps,
        "n_rejected": n_rejected,
        "max_norm_drift": max_drift,
    }


cpdef double log_flux_excess(double theta, double a) noexcept nogil:
    cdef double q = exp(-2.0 * theta)
    cdef double u = 4.0 * a * a * q / ((1.0 + q) * (1.0 + q))
    cdef double s = u / (sqrt(1.0 + u) + 1.0)
    return log1p(0.5 * (1.0 + q) * s)


def winding_terms(long N, double a, double omega_alpha_tau):
    out = np.empty(N)
    cdef double[::1] o = out
    cdef double prev = log_flux_excess(0.0, a), cur
    cdef long m
    with nogil:
        for m in range(1, N + 1):
            cur = log_flux_excess(m * M_PI / omega_alpha_tau, a)
            o[m - 1] = omega_alpha_tau * (cur - prev)
            prev = cur
    return out


def compensated_sum(values):
    """Neumaier-compensated sum in input order."""
    cdef double[::1] v = np.ascontiguousarray(values, dtype=float)
    cdef double total = 0.0, comp = 0.0, x, tmp
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        x = v[i]
        tmp = total + x
        if fabs(total) >= fabs(x):
            comp += (total - tmp) + x
        else:
            comp += (x - tmp) + total
        total = tmp
    return total + comp
