import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from berryoptics.errors import DomainError
from berryoptics.model import (
    ARGON_QUOTED_RATIO,
    Envelope,
    EnvelopeKind,
    PhysicalSetup,
    ZoneParameters,
    adiabatic_margin,
    argon_setup,
    doppler_frequency,
    eckart,
    from_dimensionless,
    gaussian,
    mesa,
    rabi_frequency,
    recoil_frequency,
    tabulated,
    to_dimensionless,
    validity_report,
)


class TestEnvelope:
    def test_eckart_is_sech(self):
        th = np.linspace(-30, 30, 121)
        assert np.allclose(eckart()(th), 1 / np.cosh(th), rtol=1e-14, atol=0)

    def test_eckart_no_overflow_far_out(self):
        with np.errstate(over="raise", invalid="raise"):
            assert eckart()(800.0) == 0.0

    def test_gaussian_and_mesa(self):
        assert gaussian()(1.0) == pytest.approx(math.exp(-0.5))
        m = mesa(2.0)
        assert m(1.99) == 1.0 and m(2.01) == 0.0
        assert m.tail_decay == math.inf and not m.is_smooth

    @pytest.mark.parametrize("env", [eckart(), gaussian(), mesa(1.5)], ids=lambda e: e.name)
    def test_square_integral_matches_quadrature(self, env):
        from scipy.integrate import quad
        T = env.half_window
        ref = 2 * quad(lambda t: env(t) ** 2, 0, T, limit=400, points=[1, 4] if T > 4 else None)[0]
        assert env.square_integral() == pytest.approx(ref, rel=1e-10)

    def test_tabulated_reproduces_samples_and_is_even(self):
        th = np.linspace(0, 10, 41)
        env = tabulated(th, 3.0 / np.cosh(th))  # rescaled to unit peak
        assert np.allclose(env(th), 1 / np.cosh(th), atol=1e-14)
        assert env(-2.3) == env(2.3)
        assert env(10.5) == 0.0
        assert env.kind == EnvelopeKind.TABULATED

    def test_tabulated_validation(self):
        with pytest.raises(DomainError):
            tabulated([0.5, 1.0], [1.0, 0.5])
        with pytest.raises(DomainError):
            tabulated([0.0, 1.0], [-1.0, 0.5])

    @pytest.mark.parametrize("env", [eckart(12.0), gaussian(), mesa(3.0),
                                     tabulated([0, 1, 2], [1, 0.5, 0.1])], ids=str)
    def test_dict_round_trip(self, env):
        assert Envelope.from_dict(env.to_dict()) == env


class TestZone:
    def test_rabi_tau_derived(self):
        z = ZoneParameters(-40.0, 0.5, 0.25)
        assert z.rabi_tau == 10.0
        assert z.delta_sign == -1
        assert z.effective_delta_tau == -39.5

    def test_from_rabi(self):
        z = ZoneParameters.from_rabi(-20.0, 1.0, 10.0)
        assert z.a == 0.5

    @pytest.mark.parametrize("kw", [dict(delta_tau=0.0), dict(omega_alpha_tau=-1.0), dict(a=-0.1),
                                    dict(delta_tau=math.inf)])
    def test_invalid(self, kw):
        base = dict(delta_tau=10.0, omega_alpha_tau=1.0, a=1.0)
        with pytest.raises(DomainError):
            ZoneParameters(**{**base, **kw})


class TestPhysical:
    def test_doppler(self):
        assert doppler_frequency(2.0, 3.0, math.pi / 6) == pytest.approx(3.0)
        with pytest.raises(DomainError):
            doppler_frequency(-1.0, 1.0, 0.1)

    def test_rabi_frequency_nodes_and_antinodes(self):
        k = 2 * math.pi / 812e-9
        assert rabi_frequency(3.0, k, 0.0, 0.0) == 0.0
        assert rabi_frequency(3.0, k, 0.0, math.pi / (2 * k)) == pytest.approx(3.0)
        xs = np.array([0.0, math.pi / (2 * k)])
        assert np.allclose(rabi_frequency(3.0, k, 0.0, xs), [0.0, 3.0])

    def test_dimensionless_round_trip(self):
        s = argon_setup()
        k = s.wavenumber
        x = 0.3 / k
        z = to_dimensionless(s, x)
        d, w, om = from_dimensionless(z, s.envelope_time)
        assert d == pytest.approx(s.detuning)
        assert w == pytest.approx(s.doppler)
        assert om == pytest.approx(s.rabi_peak * abs(math.sin(0.3 * math.cos(s.half_angle_alpha))))

    def test_recoil_frequency_oracle(self):
        # hbar k^2 / 2M for Ar-40 at 812 nm, constants written out independently
        hbar, u = 1.054571817e-34, 1.66053906660e-27
        k = 2 * math.pi / 812e-9
        ref = hbar * k * k / (2 * 39.9623831 * u)
        assert recoil_frequency(812e-9, 39.9623831) == pytest.approx(ref, rel=1e-9)

    def test_argon_ratio(self):
        s = argon_setup()
        ratio = s.doppler / s.detuning
        assert 0.17 <= ratio <= 0.19
        # same order of magnitude as the quoted figure, not equal to it
        assert ratio / ARGON_QUOTED_RATIO == pytest.approx(1.8, abs=0.05)

    def test_invalid_setup(self):
        with pytest.raises(DomainError):
            argon_setup().replace(wavelength=0.0)

    def test_validity_report(self):
        s = argon_setup().replace(spontaneous_rate=3.7e7)
        rep = validity_report(s)
        assert rep.adiabatic_margin == pytest.approx(30 / math.hypot(1, s.doppler * 1e-6))
        # |Delta| tau = 30 against omega_alpha tau = 5.4: adiabatic, but short of the 10x margin
        assert rep.adiabatic_margin == pytest.approx(5.4465, rel=1e-4)
        assert not rep.adiabatic_ok
        assert rep.raman_nath_margin > 0 and rep.spontaneous_margin > 0
        assert rep.to_dict()["weak_field_ratio"] == rep.weak_field_ratio

    def test_mesa_is_never_adiabatic(self):
        assert adiabatic_margin(100.0, 1.0, math.inf) == 0.0


@given(st.floats(0.0, 5.0), st.floats(-80, 80).filter(lambda d: abs(d) > 1e-3), st.floats(0, 20))
def test_zone_dict_round_trip(a, d, w):
    z = ZoneParameters(d, w, a)
    dd = z.to_dict()
    z2 = ZoneParameters(dd["delta_tau"], dd["omega_alpha_tau"], dd["a"],
                        Envelope.from_dict(dd["envelope"]))
    assert z2 == z
