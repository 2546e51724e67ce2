import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import dblquad

from berryoptics.circuit import (
    berry_hamiltonian,
    circuit_path,
    dressed_states,
    log_flux_excess,
    surface_flux_quadrature,
    winding_phase,
    winding_sum,
    winding_terms,
    windings_for_convergence,
)
from berryoptics.errors import DomainError
from berryoptics.model import ZoneParameters, eckart, mesa
from berryoptics.phases import eckart_geometric_phase


class TestPath:
    def test_zero_field_at_origin(self):
        p = circuit_path(ZoneParameters(10.0, 1.0, 0.0), 11)
        assert np.all(p.rho == 0) and np.all(p.X == 0) and np.all(p.Y == 0)

    def test_center_sample(self):
        p = circuit_path(ZoneParameters(-10.0, 2.0, 0.7), 101)
        c = p.samples()[50]
        assert (c.t, c.phi, c.rho, c.X, c.Y, c.Z) == (0.0, 0.0, 0.7, 0.7, 0.0, -1.0)

    def test_symmetry(self):
        p = circuit_path(ZoneParameters(10.0, 2.0, 0.7), 201)
        assert np.allclose(p.rho, p.rho[::-1])
        assert np.allclose(p.X**2 + p.Y**2, p.rho**2)
        assert np.allclose(p.Y, -p.rho * np.sin(p.phi))

    def test_mesa_full_circle(self):
        p = circuit_path(ZoneParameters(10.0, 2 * math.pi, 0.5, mesa(1.0)), 401)
        assert np.allclose(p.rho, 0.5)
        assert p.phi[-1] - p.phi[0] == pytest.approx(4 * math.pi)


class TestDressedStates:
    def _check(self, X, Y, Z):
        d = dressed_states(X, Y, Z)
        H = berry_hamiltonian(X, Y, Z)
        for eps, psi in ((d.eps_plus, d.state_plus), (d.eps_minus, d.state_minus)):
            assert np.max(np.abs(H @ psi - eps * psi)) < 1e-12
            assert abs(np.vdot(psi, psi) - 1) < 1e-12
        assert abs(np.vdot(d.state_plus, d.state_minus)) < 1e-12
        assert d.eps_plus == pytest.approx(-d.eps_minus)
        assert d.eps_plus == pytest.approx(0.5 * math.sqrt(X * X + Y * Y + Z * Z))
        return d

    def test_random_unit_shell(self, rng):
        v = rng.normal(size=(10_000, 3))
        v /= np.linalg.norm(v, axis=1)[:, None]
        for X, Y, Z in v:
            self._check(X, Y, Z)

    def test_axis_limits(self):
        d = dressed_states(0.0, 0.0, 1.0)
        assert np.array_equal(d.state_plus, [1, 0]) and np.array_equal(d.state_minus, [0, 1])
        d = dressed_states(0.0, 0.0, -1.0)
        assert np.array_equal(d.state_plus, [0, 1]) and np.array_equal(d.state_minus, [-1, 0])

    def test_equator(self):
        d = self._check(1.0, 0.0, 0.0)
        assert d.eps_plus == 0.5
        assert np.allclose(d.state_plus, np.array([1, 1]) / math.sqrt(2))
        assert np.allclose(d.state_minus, np.array([-1, 1]) / math.sqrt(2))

    def test_convention_matches_literal_formula(self, rng):
        for X, Y, Z in rng.normal(size=(200, 3)):
            R = math.sqrt(X * X + Y * Y + Z * Z)
            d = dressed_states(X, Y, Z)
            lit_p = np.array([Z + R, X + 1j * Y]) / math.sqrt(2 * R * (R + Z))
            lit_m = np.array([Z - R, X + 1j * Y]) / math.sqrt(2 * R * (R - Z))
            assert np.allclose(d.state_plus, lit_p, atol=1e-10)
            assert np.allclose(d.state_minus, lit_m, atol=1e-10)

    @pytest.mark.parametrize("Z", [1.0, -1.0])
    def test_continuous_turn_off(self, Z):
        far = dressed_states(0.0, 0.0, Z)
        for rho in (1e-2, 1e-5, 1e-9):
            near = dressed_states(rho * math.cos(0.3), -rho * math.sin(0.3), Z)
            # only the component that vanishes with rho carries the azimuthal phase
            assert np.max(np.abs(np.abs(near.state_plus) - np.abs(far.state_plus))) < 2 * rho
            assert np.max(np.abs(np.abs(near.state_minus) - np.abs(far.state_minus))) < 2 * rho

    def test_origin_rejected(self):
        with pytest.raises(DomainError):
            dressed_states(0.0, 0.0, 0.0)


def mp_winding(m, a, w):
    mp.mp.dps = 40
    F = lambda th: mp.sinh(th) + mp.sqrt(mp.cosh(th) ** 2 + a * a)  # noqa: E731
    th1, th0 = mp.mpf(m) * mp.pi / w, mp.mpf(m - 1) * mp.pi / w
    return float(w * (mp.log(F(th1) / F(th0)) - mp.pi / w))


class TestWindings:
    def test_first_winding_extended_precision(self):
        assert winding_phase(1, 1.0, 1.0) == pytest.approx(mp_winding(1, 1, 1), abs=1e-13)
        assert winding_phase(1, 1.0, 1.0) == pytest.approx(-0.3447148120, abs=1e-10)

    @pytest.mark.parametrize("m", [1, 2, 5, 40])
    def test_against_mpmath(self, m):
        assert winding_phase(m, 2.0, 0.7) == pytest.approx(mp_winding(m, 2.0, 0.7), abs=1e-14)

    def test_zero_field(self):
        assert np.all(winding_terms(50, 0.0, 2.0) == 0.0)
        assert winding_sum(7, 0.0, 1.0).partial == 0.0

    def test_monotone_decay(self):
        t = np.abs(winding_terms(60, 1.0, 1.0))
        assert np.all(np.diff(t) < 0)

    def test_telescoping(self):
        s = winding_sum(100, 1.0, 1.0)
        assert abs(s.partial - s.telescoped) < 1e-12

    @pytest.mark.parametrize("w", [1.0, 4 * math.pi])
    def test_convergence(self, w):
        s = winding_sum(windings_for_convergence(w), 1.0, w)
        assert abs(s.partial - eckart_geometric_phase(1.0, w)) < 1e-8
        assert s.limit == pytest.approx(eckart_geometric_phase(1.0, w), abs=1e-14)

    def test_naive_form_overflows_safe_form_does_not(self):
        m = math.ceil(360 / math.pi)
        with pytest.raises(OverflowError):
            winding_phase(m, 1.0, 1.0, naive=True)
        assert winding_phase(m, 1.0, 1.0) == pytest.approx(0.0, abs=1e-300)
        assert winding_phase(3, 1.0, 1.0, naive=True) == pytest.approx(winding_phase(3, 1.0, 1.0),
                                                                        abs=1e-13)

    def test_log_flux_excess_at_zero(self):
        assert log_flux_excess(0.0, 1.0) == pytest.approx(0.5 * math.log(2))

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            winding_phase(0, 1.0, 1.0)
        with pytest.raises(DomainError):
            winding_terms(5, 1.0, 0.0)


class TestSurfaceFlux:
    def test_eckart(self):
        assert surface_flux_quadrature(ZoneParameters(10.0, 1.0, 1.0)).value == pytest.approx(
            -0.5 * math.log(2), abs=1e-10)

    def test_zero_field(self):
        assert surface_flux_quadrature(ZoneParameters(10.0, 1.0, 0.0)).value == 0.0

    def test_mesa_brute_force_disc(self):
        a = 0.8
        # two turns of a circle of radius a at height 1: twice the flux of R/(2R^3) through the disc
        flux, _ = dblquad(lambda r, phi: 0.5 * r / (1 + r * r) ** 1.5, 0, 2 * math.pi, 0, a)
        got = surface_flux_quadrature(ZoneParameters(10.0, 2 * math.pi, a, mesa(1.0))).value
        assert got == pytest.approx(-2 * flux, abs=1e-10)
        assert got == pytest.approx(-2 * math.pi * (1 - 1 / math.sqrt(1 + a * a)), abs=1e-12)

    @given(st.floats(0, 5), st.floats(0.1, 20))
    def test_three_ways_agree(self, a, w):
        ref = eckart_geometric_phase(a, w)
        flux = surface_flux_quadrature(ZoneParameters(10.0, w, a, eckart())).value
        lim = winding_sum(1, a, w).limit
        assert abs(flux - ref) < 1e-8 and abs(lim - ref) < 1e-8
