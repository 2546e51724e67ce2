import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from berryoptics.errors import DomainError, ParameterMismatchError
from berryoptics.model import ZoneParameters, eckart, gaussian, mesa, tabulated
from berryoptics.phases import (
    Method,
    PhaseResult,
    closed_form_phases,
    dynamical_phase_quadrature,
    eckart_dynamical_phase,
    eckart_geometric_phase,
    geometric_phase_quadrature,
    kramers_kronig_check,
    quadrature_phases,
    total_phases,
    two_zone_total,
    weak_field_phases,
    weak_field_result,
    wrap_phase,
)

mp.mp.dps = 30


def mp_phases(a, w, d, f=lambda t: mp.sech(t)):
    """Independent extended-precision integrals over the whole real line."""
    a = mp.mpf(a)
    g = mp.quad(lambda t: 1 / mp.sqrt(1 + a**2 * f(t) ** 2) - 1, [-mp.inf, -4, 0, 4, mp.inf])
    b = mp.quad(lambda t: mp.sqrt(1 + a**2 * f(t) ** 2) - 1, [-mp.inf, -4, 0, 4, mp.inf])
    return float(mp.mpf(d) / 2 * b), float(mp.mpf(w) / 2 * g)


class TestQuadrature:
    def test_zero_field(self):
        for env in (eckart(), gaussian(), mesa(2.0)):
            z = ZoneParameters(10.0, 1.0, 0.0, env)
            assert geometric_phase_quadrature(z).value == 0.0
            assert dynamical_phase_quadrature(z).value == 0.0

    def test_mesa_constant_integrand(self):
        T, w, d = 2.5, 0.7, 12.0
        z = ZoneParameters(d, w, math.sqrt(3.0), mesa(T))
        assert geometric_phase_quadrature(z).value == pytest.approx(-w * T / 2, abs=1e-12)
        assert dynamical_phase_quadrature(z).value == pytest.approx(d * T, abs=1e-12)

    @pytest.mark.parametrize("a, w, d", [(1.0, 1.0, 1.0), (0.5, 4 * math.pi, 40.0), (3.0, 0.2, 10.0)])
    def test_eckart_against_extended_precision(self, a, w, d):
        beta_ref, gamma_ref = mp_phases(a, w, d)
        z = ZoneParameters(d, w, a)
        assert dynamical_phase_quadrature(z, 1e-12).value == pytest.approx(beta_ref, abs=1e-10)
        assert geometric_phase_quadrature(z, 1e-12).value == pytest.approx(gamma_ref, abs=1e-10)

    def test_gaussian_against_extended_precision(self):
        beta_ref, gamma_ref = mp_phases(1.5, 2.0, 20.0, f=lambda t: mp.exp(-t * t / 2))
        z = ZoneParameters(20.0, 2.0, 1.5, gaussian())
        r = quadrature_phases(z, 1e-12)
        assert r.beta == pytest.approx(beta_ref, abs=1e-10)
        assert r.gamma == pytest.approx(gamma_ref, abs=1e-10)

    def test_tabulated_envelope_close_to_analytic(self):
        th = np.linspace(0, 40, 4001)
        z_tab = ZoneParameters(10.0, 1.0, 1.0, tabulated(th, 1 / np.cosh(th)))
        assert geometric_phase_quadrature(z_tab).value == pytest.approx(-0.5 * math.log(2), abs=1e-6)


class TestClosedForms:
    def test_reference_values(self):
        assert eckart_geometric_phase(1.0, 1.0) == pytest.approx(-0.34657359, abs=1e-8)
        assert eckart_dynamical_phase(1.0, 1.0) == pytest.approx(math.pi / 4 - 0.5 * math.log(2), abs=1e-15)
        assert eckart_geometric_phase(0.0, 3.0) == 0.0
        assert eckart_dynamical_phase(0.0, 3.0) == 0.0

    def test_weak_field_reductions(self):
        a = 1e-3
        assert eckart_geometric_phase(a, 1.0) == pytest.approx(-0.5 * a * a, rel=1e-6)
        assert eckart_dynamical_phase(0.1, 1.0) == pytest.approx(0.5 * 0.01, rel=0.01)

    @pytest.mark.parametrize("a", [1e-8, 1e-4, 0.05, 0.0999, 0.1, 0.1001, 0.3])
    def test_dynamical_series_branch_continuous(self, a):
        ref = float(mp.mpf(a) * mp.atan(a) - mp.log(1 + mp.mpf(a) ** 2) / 2)
        assert eckart_dynamical_phase(a, 1.0) == pytest.approx(ref, rel=1e-13)

    def test_closed_form_rejects_other_envelopes(self):
        with pytest.raises(DomainError):
            closed_form_phases(ZoneParameters(10.0, 1.0, 1.0, gaussian()))

    @given(st.floats(0, 5), st.floats(0, 20), st.floats(1, 80))
    def test_quadrature_matches_closed_form_everywhere(self, a, w, d):
        z = ZoneParameters(d, w, a)
        q, c = quadrature_phases(z, 1e-12), closed_form_phases(z)
        assert abs(q.beta - c.beta) <= 1e-10
        assert abs(q.gamma - c.gamma) <= 1e-10


class TestSigns:
    @given(st.floats(0.01, 5), st.floats(0.1, 20))
    def test_signs_and_monotonicity(self, a, w):
        z1, z2 = ZoneParameters(10.0, w, a), ZoneParameters(10.0, w, a * 1.1)
        r1, r2 = quadrature_phases(z1), quadrature_phases(z2)
        assert r1.beta >= 0 and r1.gamma <= 0
        assert r2.beta > r1.beta and r2.gamma < r1.gamma

    def test_total_phase_examples(self):
        assert total_phases(1.0, -0.1, 1) == pytest.approx((0.9, -0.9))
        g, e = total_phases(1.0, -0.1, -1)
        assert g == pytest.approx(-1.1) and e == pytest.approx(1.1 - math.pi)
        assert total_phases(0.0, 0.0, 1) == (0.0, 0.0)
        with pytest.raises(DomainError):
            total_phases(-1.0, 0.0, 1)

    def test_result_is_unwrapped_with_wrapped_accessor(self):
        r = closed_form_phases(ZoneParameters(40.0, 1.0, 1.0))
        assert r.phi_g > math.pi
        g, e = r.wrapped
        assert -math.pi < g <= math.pi
        assert math.cos(g) == pytest.approx(math.cos(r.phi_g))
        assert r.to_dict()["method"] == "closed_form"

    def test_wrap_phase_boundary(self):
        assert wrap_phase(-math.pi) == math.pi
        assert wrap_phase(3 * math.pi) == pytest.approx(math.pi)

    def test_assemble(self):
        r = PhaseResult.assemble(2.0, -0.5, -1, "quadrature")
        assert r.method is Method.QUADRATURE
        assert r.phi_g == -2.5 and r.phi_e == pytest.approx(2.5 - math.pi)


class TestWeakField:
    def test_eckart_square_integral(self):
        b, g = weak_field_phases(ZoneParameters(30.0, 2.0, 0.1))
        assert b == pytest.approx(0.5 * 30 * 0.01, rel=1e-12)
        assert g == pytest.approx(-0.5 * 2 * 0.01, rel=1e-12)

    def test_argon_ratio(self):
        b, g = weak_field_phases(ZoneParameters(30.0, 5.416, 0.05))
        assert abs(g / b) == pytest.approx(0.1805, abs=1e-4)

    def test_zero_field(self):
        assert weak_field_phases(ZoneParameters(30.0, 5.0, 0.0)) == (0.0, 0.0)

    def test_warns_outside_validity(self):
        with pytest.warns(UserWarning):
            weak_field_result(ZoneParameters(30.0, 5.0, 0.5))

    @pytest.mark.parametrize("env, f4_over_f2", [(eckart(), 2 / 3), (gaussian(), 1 / math.sqrt(2)),
                                                 (mesa(1.0), 1.0)], ids=["eckart", "gaussian", "mesa"])
    def test_ratio_deviation_is_second_order(self, env, f4_over_f2):
        # |gamma/beta| (|Delta|/omega_alpha) = 1 - (a^2/2) int f^4 / int f^2 + O(a^4)
        a = 0.02
        r = quadrature_phases(ZoneParameters(30.0, 5.416, a, env), 1e-13)
        dev = 1 - abs(r.gamma / r.beta) / (5.416 / 30.0)
        assert dev == pytest.approx(0.5 * a * a * f4_over_f2, rel=1e-3)

    def test_ratio_mesa_exact(self):
        a = 0.05
        r = quadrature_phases(ZoneParameters(30.0, 5.416, a, mesa(2.0)), 1e-13)
        assert abs(r.gamma / r.beta) == pytest.approx(5.416 / 30.0 / math.sqrt(1 + a * a), rel=1e-12)

    @pytest.mark.parametrize("env", [eckart(), gaussian()], ids=lambda e: e.name)
    def test_ratio_smooth_envelopes_within_tenth_percent(self, env):
        r = quadrature_phases(ZoneParameters(30.0, 5.416, 0.05, env), 1e-13)
        assert abs(abs(r.gamma / r.beta) / (5.416 / 30.0) - 1) < 1e-3


class TestDerivativeRelation:
    def test_eckart_small_discrepancy(self):
        kk = kramers_kronig_check(ZoneParameters(10.0, 1.0, 1.0), h=1e-4)
        assert kk.discrepancy < 1e-7
        assert kk.lhs == pytest.approx(-0.5 * math.log(2), abs=1e-10)

    def test_zero_field(self):
        kk = kramers_kronig_check(ZoneParameters(10.0, 1.0, 0.0))
        assert kk.lhs == 0.0 and kk.rhs == 0.0

    @pytest.mark.parametrize("env", [eckart(), gaussian(), mesa(1.0)], ids=lambda e: e.name)
    def test_second_order_convergence(self, env):
        z = ZoneParameters(10.0, 1.0, 1.0, env)
        d1 = kramers_kronig_check(z, h=1e-2).discrepancy
        d2 = kramers_kronig_check(z, h=5e-3).discrepancy
        assert 3.5 <= d1 / d2 <= 4.5

    def test_step_bounds(self):
        with pytest.raises(DomainError):
            kramers_kronig_check(ZoneParameters(10.0, 1.0, 1.0), h=0.1)


class TestTwoZone:
    def test_doubling(self):
        blue, red = ZoneParameters(10.0, 1.0, 1.0), ZoneParameters(-10.0, 1.0, 1.0)
        r = two_zone_total(blue, red)
        assert r.phi_g == pytest.approx(-math.log(2), abs=1e-10)
        assert r.beta == 0.0
        assert r.phi_g == pytest.approx(2 * geometric_phase_quadrature(blue).value, abs=1e-14)

    def test_zero_field(self):
        assert two_zone_total(ZoneParameters(10.0, 1.0, 0.0), ZoneParameters(-10.0, 1.0, 0.0)).phi_g == 0.0

    @pytest.mark.parametrize("red", [ZoneParameters(-12.0, 1.0, 1.0), ZoneParameters(10.0, 1.0, 1.0),
                                     ZoneParameters(-10.0, 1.0, 0.9),
                                     ZoneParameters(-10.0, 1.0, 1.0, gaussian())])
    def test_mismatch(self, red):
        with pytest.raises(ParameterMismatchError):
            two_zone_total(ZoneParameters(10.0, 1.0, 1.0), red)
