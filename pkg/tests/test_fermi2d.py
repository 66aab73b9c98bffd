import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from numdiff import scanned_central_difference

from rtsthermo.fermi2d import (
    K_B,
    OracleError,
    PhysicalConstants,
    PolynomialDOS,
    ReservoirSpec,
    chemical_potential,
    dos_2d,
    entropy,
    fd_oracle,
    fermi_dirac_integrals,
    heat_capacity_per_area,
    helmholtz,
    internal_energy,
    pressure,
    sommerfeld_expansion,
    sommerfeld_for_dos,
    thermo_point,
)

G = dos_2d()

counts = st.floats(0, 1e5)
areas = st.floats(1.0, 1e7)
dos_values = st.floats(1e-6, 1.0)
temps = st.floats(0.0, 500.0)




class TestDos:
    def test_golden_value(self):
        # CODATA 2022: m_e, exact h and e; silicon transverse mass 0.19 m_e
        m_e, hbar, e = 9.1093837139e-31, 6.62607015e-34 / (2 * math.pi), 1.602176634e-19
        g_si = 0.19 * m_e / (math.pi**2 * hbar**2)  # J^-1 m^-2
        expected = g_si * 1e-3 * e * 1e-18  # meV^-1 nm^-2
        assert dos_2d() == pytest.approx(expected, rel=1e-12)
        assert dos_2d() == pytest.approx(2.52639308156097e-4, rel=1e-12)

    def test_linear_in_mass(self):
        c = PhysicalConstants()
        c2 = PhysicalConstants(m_eff=2 * c.m_eff)
        assert dos_2d(c2) == pytest.approx(2 * dos_2d(c), rel=1e-15)

    def test_reservoir_takes_default_dos(self):
        assert ReservoirSpec(10, 100.0).g == dos_2d()

    @pytest.mark.parametrize("kw", [dict(n2=0, sigma2=1.0), dict(n2=1.5, sigma2=1.0),
                                    dict(n2=3, sigma2=0.0), dict(n2=3, sigma2=1.0, g=-1.0)])
    def test_reservoir_invariants(self, kw):
        with pytest.raises(ValueError):
            ReservoirSpec(**kw)

    def test_constants_positive(self):
        with pytest.raises(ValueError, match="k_B"):
            PhysicalConstants(k_B=0.0)


class TestClosedForms:
    def test_chemical_potential_examples(self):
        assert chemical_potential(0, 10.0, 1.0) == 0.0
        assert chemical_potential(200, 100.0, 1.0) == 2.0

    @given(counts, areas, dos_values)
    def test_chemical_potential_linear(self, M, A, g):
        assert chemical_potential(2 * M, A, g) == pytest.approx(2 * chemical_potential(M, A, g), rel=4e-16)

    @pytest.mark.parametrize("args", [(1, 0.0, 1.0), (1, 1.0, 0.0), (-1, 1.0, 1.0)])
    def test_chemical_potential_domain(self, args):
        with pytest.raises(ValueError):
            chemical_potential(*args)

    def test_zero_temperature(self):
        M, A, g = 100, 1e4, G
        assert internal_energy(M, A, g, 0.0) == M**2 / (2 * g * A)
        assert helmholtz(M, A, g, 0.0) == internal_energy(M, A, g, 0.0)
        assert entropy(M, A, g, 0.0) == 0.0
        assert heat_capacity_per_area(g, 0.0) == 0.0
        assert pressure(M, A, g, 0.0) == M**2 / (2 * g * A * A)
        assert pressure(0, A, g, 0.0) == 0.0

    def test_empty_gas_energy(self):
        A, g, T = 1e4, G, 3.0
        assert internal_energy(0, A, g, T) == pytest.approx(math.pi**2 / 6 * g * A * (K_B * T) ** 2, rel=1e-15)

    @pytest.mark.parametrize("fn", [internal_energy, helmholtz, entropy, pressure])
    def test_negative_temperature_rejected(self, fn):
        with pytest.raises(ValueError, match="temperature"):
            fn(1, 1.0, 1.0, -1.0)

    def test_heat_capacity_negative_temperature(self):
        with pytest.raises(ValueError):
            heat_capacity_per_area(1.0, -0.1)

    @given(counts, areas, dos_values, temps)
    def test_matches_direct_formulas(self, M, A, g, T):
        kt = K_B * T
        tp = thermo_point(M, A, g, T)
        direct = (M / (g * A), M * M / (2 * g * A) + math.pi**2 / 6 * g * A * kt * kt,
                  M * M / (2 * g * A) - math.pi**2 / 6 * g * A * kt * kt,
                  math.pi**2 / 3 * g * A * K_B**2 * T, math.pi**2 / 3 * g * K_B**2 * T,
                  M * M / (2 * g * A * A) + math.pi**2 / 6 * g * kt * kt)
        for got, want in zip(tp, direct):
            assert abs(got - want) <= 4 * np.spacing(abs(want)) + 1e-300

    @given(counts, areas, dos_values, temps)
    def test_free_energy_identity(self, M, A, g, T):
        u, psi, s = internal_energy(M, A, g, T), helmholtz(M, A, g, T), entropy(M, A, g, T)
        assert u >= psi
        assert u - psi == pytest.approx(T * s, rel=1e-9, abs=1e-9 * abs(u))

    @given(areas, dos_values, temps)
    def test_entropy_is_area_times_heat_capacity(self, A, g, T):
        assert entropy(5, A, g, T) == pytest.approx(A * heat_capacity_per_area(g, T), rel=1e-15)
        assert entropy(5, 2 * A, g, T) == pytest.approx(2 * entropy(5, A, g, T), rel=1e-15)
        assert heat_capacity_per_area(g, 2 * T) == pytest.approx(2 * heat_capacity_per_area(g, T), rel=1e-15)

    def test_helmholtz_decreases_with_temperature(self):
        ts = np.linspace(0, 300, 50)
        psi = [helmholtz(100, 1e4, G, t) for t in ts]
        assert np.all(np.diff(psi) < 0)

    def test_finite_difference_derivatives(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            M, A, T = rng.uniform(1, 1e3), rng.uniform(1e3, 1e5), rng.uniform(0.5, 300)
            s_fd = -scanned_central_difference(lambda t: helmholtz(M, A, G, t), T)
            p_fd = -scanned_central_difference(lambda a: helmholtz(M, a, G, T), A)
            c_fd = scanned_central_difference(lambda t: internal_energy(M, A, G, t), T) / A
            assert s_fd == pytest.approx(entropy(M, A, G, T), rel=1e-6)
            assert p_fd == pytest.approx(pressure(M, A, G, T), rel=1e-6)
            assert c_fd == pytest.approx(heat_capacity_per_area(G, T), rel=1e-6)

    def test_energy_unit_rescaling(self):
        # meV -> ueV: energies x1000, g /1000, k_B x1000
        M, A, T, lam = 80, 5e3, 3.3, 1000.0
        a = thermo_point(M, A, G, T, K_B)
        b = thermo_point(M, A, G / lam, T, K_B * lam)
        for x, y in zip(a, b):
            assert y == pytest.approx(lam * x, rel=1e-13)


class TestSommerfeld:
    def test_constant_dos_reduces_to_closed_form(self):
        g, mu, T = 0.3, 12.0, 7.0
        u, n = sommerfeld_expansion(g, 0.0, mu, T)
        assert u == pytest.approx(g / 2 * mu**2 + math.pi**2 / 6 * g * (K_B * T) ** 2, rel=1e-15)
        assert n == g * mu
        A = 1e3
        assert A * u == pytest.approx(internal_energy(A * n, A, g, T), rel=1e-14)

    def test_zero_temperature_is_ground_state_integral(self):
        dos = PolynomialDOS([1.0, 0.5, 2.0])
        u, n = sommerfeld_for_dos(dos, 1.3, 0.0)
        assert u == dos.energy_integral(1.3)
        assert n == dos.number_integral(1.3)

    def test_polynomial_dos_integrals(self):
        from scipy.integrate import quad
        dos = PolynomialDOS([1.0, 0.5, 2.0])
        assert dos.number_integral(1.3) == pytest.approx(quad(dos, 0, 1.3)[0], rel=1e-13)
        assert dos.energy_integral(1.3) == pytest.approx(quad(lambda e: e * dos(e), 0, 1.3)[0], rel=1e-13)

    def test_fourth_order_remainder(self):
        # the next Sommerfeld term is (7 pi^4/360) (kT)^4 d^3/dE^3 [E g(E)];
        # for g = 1 + E^2 that derivative is 6
        dos, mu = PolynomialDOS([1.0, 0.0, 1.0]), 1.0
        for t in (0.03, 0.02, 0.01):
            u, _ = sommerfeld_for_dos(dos, mu, t / K_B)
            u_exact, _ = fermi_dirac_integrals(dos, mu, t / K_B)
            predicted = 7 * math.pi**4 / 360 * t**4 * 6
            assert (u_exact - u) / predicted == pytest.approx(1.0, rel=1e-6)

    def test_shrinking_temperature_order(self):
        dos, mu = PolynomialDOS([1.0, 0.0, 1.0]), 1.0
        ts = np.geomspace(0.005, 0.05, 6)
        err = []
        for t in ts:
            u, _ = sommerfeld_for_dos(dos, mu, t / K_B)
            ue, _ = fermi_dirac_integrals(dos, mu, t / K_B)
            err.append(abs(u - ue) / ue)
        slope = np.polyfit(np.log(ts), np.log(err), 1)[0]
        assert slope >= 3.5

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            sommerfeld_expansion(1.0, 0.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            sommerfeld_expansion(1.0, 0.0, 1.0, -1.0)


class TestOracle:
    def test_degenerate_limit(self):
        M, A = 100, 1e4
        mu_f = M / (G * A)
        for T in (20.0, 5.0, 1.0):
            assert fd_oracle(M, A, G, T).mu_exact == pytest.approx(mu_f, rel=1e-9)

    def test_closed_form_density(self):
        for T in (1.0, 50.0, 300.0, 3000.0):
            r = fd_oracle(100, 1e4, G, T)
            assert r.n_quadrature == pytest.approx(r.n_closed_form, rel=1e-10)
            assert r.n_closed_form == pytest.approx(100 / 1e4, rel=1e-10)

    def test_nondegenerate_chemical_potential(self):
        # closed form inverse: mu = kT ln(expm1(n / (g kT)))
        M, A, T = 100, 1e4, 3000.0
        kt = K_B * T
        expected = kt * math.log(math.expm1(M / A / (G * kt)))
        assert fd_oracle(M, A, G, T).mu_exact == pytest.approx(expected, rel=1e-9)

    def test_sommerfeld_agreement_regression(self):
        # k_B T / mu_F = 0.02; for constant g the expansion error is
        # exponentially small (~exp(-mu/kT)), so only round-off remains
        M, A = 100, 1e4
        T = 0.02 * M / (G * A) / K_B
        r = fd_oracle(M, A, G, T)
        gap = abs(internal_energy(M, A, G, T) - r.u_exact) / r.u_exact
        assert gap <= 1e-3
        assert gap <= 1e-13

    def test_domain(self):
        with pytest.raises(ValueError):
            fd_oracle(100, 1e4, G, 0.0)

    def test_bracket_failure_is_reported(self, monkeypatch):
        import rtsthermo.fermi2d as f
        monkeypatch.setattr(f, "fermi_dirac_integrals", lambda *a, **k: (0.0, -1.0))
        with pytest.raises(OracleError, match="bracketed"):
            f.fd_oracle(100, 1e4, G, 4.2)

    def test_closed_form_mismatch_is_reported(self):
        with pytest.raises(OracleError, match="closed form"):
            fd_oracle(100, 1e4, G, 4.2, epsrel=1e-2, check_rtol=1e-30)
