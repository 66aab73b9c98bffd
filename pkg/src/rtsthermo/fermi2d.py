"""Low-temperature thermodynamics of a two-dimensional Fermi electron gas.

Unit system used throughout the package: energies in meV, areas in nm^2,
temperatures in K and times in s.  Boltzmann's constant is therefore in
meV/K and the density of states ``g`` in meV^-1 nm^-2.

The closed-form expressions (chemical potential, internal energy, Helmholtz
potential, entropy, heat capacity per area, pressure) are the second-order
Sommerfeld results for a constant density of states.  :func:`fd_oracle`
solves the full Fermi-Dirac problem numerically and is used to check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import constants as _codata
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import expit

__all__ = [
    "PhysicalConstants",
    "ReservoirSpec",
    "ThermoPoint",
    "PolynomialDOS",
    "OracleResult",
    "OracleError",
    "dos_2d",
    "chemical_potential",
    "internal_energy",
    "helmholtz",
    "entropy",
    "heat_capacity_per_area",
    "pressure",
    "thermo_point",
    "sommerfeld_expansion",
    "sommerfeld_for_dos",
    "fermi_dirac_integrals",
    "fd_oracle",
]

_J_TO_MEV = 1e3 / _codata.e
_KG_TO_MEV_S2_PER_NM2 = _J_TO_MEV * 1e-18

K_B = _codata.k * _J_TO_MEV
HBAR = _codata.hbar * _J_TO_MEV
M_E = _codata.m_e * _KG_TO_MEV_S2_PER_NM2
#: transverse conduction-band mass of silicon, in units of m_e
SI_MASS_RATIO = 0.19

PI2_6 = math.pi**2 / 6.0
PI2_3 = math.pi**2 / 3.0


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants in the package unit system.

    Attributes
    ----------
    k_B : float
        Boltzmann constant (meV/K).
    hbar : float
        Reduced Planck constant (meV s).
    m_eff : float
        Effective electron mass (meV s^2 nm^-2).
    """

    k_B: float = K_B
    hbar: float = HBAR
    m_eff: float = SI_MASS_RATIO * M_E

    def __post_init__(self):
        for name in ("k_B", "hbar", "m_eff"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"constants.{name} must be positive and finite, got {value!r}")

    @classmethod
    def with_mass_ratio(cls, ratio: float, **kwargs) -> "PhysicalConstants":
        """Constants with ``m_eff = ratio * m_e``."""
        return cls(m_eff=ratio * M_E, **kwargs)


def dos_2d(constants: PhysicalConstants | None = None) -> float:
    """Density of states per unit area, ``m_eff / (pi^2 hbar^2)``.

    This is the prefactor used by the ensemble model.  The usual spin-degenerate
    value ``m/(pi hbar^2)`` differs by a factor of pi; pass an explicit ``g`` to
    :class:`ReservoirSpec` to use it instead.
    """
    c = constants or PhysicalConstants()
    return c.m_eff / (math.pi**2 * c.hbar**2)


@dataclass(frozen=True)
class ReservoirSpec:
    """The finite two-dimensional electron bath.

    Attributes
    ----------
    n2 : int
        Number of electrons in the bath.
    sigma2 : float
        Bath area (nm^2).
    g : float
        Density of states per energy per area (meV^-1 nm^-2).  Defaults to
        :func:`dos_2d` with the default constants.
    """

    n2: int
    sigma2: float
    g: float = field(default_factory=dos_2d)

    def __post_init__(self):
        if isinstance(self.n2, bool) or int(self.n2) != self.n2 or self.n2 < 1:
            raise ValueError(f"reservoir.n2 must be an integer >= 1, got {self.n2!r}")
        object.__setattr__(self, "n2", int(self.n2))
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"reservoir.sigma2 must be > 0, got {self.sigma2!r}")
        if not (math.isfinite(self.g) and self.g > 0):
            raise ValueError(f"reservoir.g must be > 0, got {self.g!r}")

    @property
    def density(self) -> float:
        """Areal electron density n2/sigma2 (nm^-2)."""
        return self.n2 / self.sigma2

    def mu(self) -> float:
        """Chemical potential of the bath (meV)."""
        return chemical_potential(self.n2, self.sigma2, self.g)


class ThermoPoint(NamedTuple):
    mu: float
    u: float
    psi: float
    s: float
    c_a: float
    p: float


def _check(M, A, g, T=0.0):
    if M < 0:
        raise ValueError(f"particle count must be >= 0, got {M!r}")
    if not A > 0:
        raise ValueError(f"area must be > 0, got {A!r}")
    if not g > 0:
        raise ValueError(f"density of states must be > 0, got {g!r}")
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")


def chemical_potential(M: float, A: float, g: float) -> float:
    """Chemical potential ``M / (g A)`` of a 2D gas with constant DOS (meV)."""
    _check(M, A, g)
    return M / (g * A)


def internal_energy(M: float, A: float, g: float, T: float, k_B: float = K_B) -> float:
    """Internal energy ``M^2/(2gA) + (pi^2/6) g A (k_B T)^2`` (meV)."""
    _check(M, A, g, T)
    kt = k_B * T
    return M * M / (2.0 * g * A) + PI2_6 * g * A * kt * kt


def helmholtz(M: float, A: float, g: float, T: float, k_B: float = K_B) -> float:
    """Helmholtz potential ``M^2/(2gA) - (pi^2/6) g A (k_B T)^2`` (meV)."""
    _check(M, A, g, T)
    kt = k_B * T
    return M * M / (2.0 * g * A) - PI2_6 * g * A * kt * kt


def entropy(M: float, A: float, g: float, T: float, k_B: float = K_B) -> float:
    """Entropy ``(pi^2/3) g A k_B^2 T`` (meV/K); independent of ``M``."""
    _check(M, A, g, T)
    return PI2_3 * g * A * k_B * k_B * T


def heat_capacity_per_area(g: float, T: float, k_B: float = K_B) -> float:
    """Heat capacity per unit area at constant area (meV K^-1 nm^-2)."""
    if not g > 0:
        raise ValueError(f"density of states must be > 0, got {g!r}")
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    return PI2_3 * g * k_B * k_B * T


def pressure(M: float, A: float, g: float, T: float, k_B: float = K_B) -> float:
    """Two-dimensional pressure ``-dPsi/dA`` (meV nm^-2)."""
    _check(M, A, g, T)
    kt = k_B * T
    return M * M / (2.0 * g * A * A) + PI2_6 * g * kt * kt


def thermo_point(M: float, A: float, g: float, T: float, k_B: float = K_B) -> ThermoPoint:
    """All closed-form quantities at one state point."""
    return ThermoPoint(
        mu=chemical_potential(M, A, g),
        u=internal_energy(M, A, g, T, k_B),
        psi=helmholtz(M, A, g, T, k_B),
        s=entropy(M, A, g, T, k_B),
        c_a=heat_capacity_per_area(g, T, k_B),
        p=pressure(M, A, g, T, k_B),
    )


def sommerfeld_expansion(
    g_at_mu: float,
    g_prime_at_mu: float,
    mu_F: float,
    T: float,
    k_B: float = K_B,
    *,
    u0: float | None = None,
    n0: float | None = None,
) -> tuple[float, float]:
    """Second-order Sommerfeld energy and particle densities.

    Returns ``(u, n)`` per unit area::

        u = u0 + (pi^2/6) (k_B T)^2 [mu g'(mu) + g(mu)]
        n = n0 + (pi^2/6) (k_B T)^2 g'(mu)

    ``u0`` and ``n0`` are the zero-temperature integrals of ``E g(E)`` and
    ``g(E)`` from 0 to ``mu_F``.  When omitted they are taken for a constant
    DOS equal to ``g_at_mu``, which is only consistent when ``g_prime_at_mu``
    is zero; use :func:`sommerfeld_for_dos` for an energy-dependent DOS.
    The correction terms are evaluated at ``mu_F``.
    """
    if not mu_F > 0:
        raise ValueError(f"mu_F must be > 0, got {mu_F!r}")
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    if u0 is None:
        u0 = 0.5 * g_at_mu * mu_F * mu_F
    if n0 is None:
        n0 = g_at_mu * mu_F
    kt2 = (k_B * T) ** 2
    u = u0 + PI2_6 * kt2 * (mu_F * g_prime_at_mu + g_at_mu)
    n = n0 + PI2_6 * kt2 * g_prime_at_mu
    return u, n


@dataclass(frozen=True)
class PolynomialDOS:
    """Density of states ``g(E) = sum_k coeffs[k] * E**k`` for ``E >= 0``.

    Used to exercise the Sommerfeld expansion away from the constant-DOS case.
    """

    coeffs: Sequence[float]

    def __call__(self, E):
        return np.polynomial.polynomial.polyval(E, self.coeffs)

    def derivative(self, E):
        return np.polynomial.polynomial.polyval(E, np.polynomial.polynomial.polyder(self.coeffs))

    def number_integral(self, mu: float) -> float:
        """Integral of g from 0 to mu."""
        return float(sum(c * mu ** (k + 1) / (k + 1) for k, c in enumerate(self.coeffs)))

    def energy_integral(self, mu: float) -> float:
        """Integral of E g(E) from 0 to mu."""
        return float(sum(c * mu ** (k + 2) / (k + 2) for k, c in enumerate(self.coeffs)))


def sommerfeld_for_dos(dos: PolynomialDOS, mu: float, T: float, k_B: float = K_B) -> tuple[float, float]:
    """Sommerfeld ``(u, n)`` for a polynomial DOS at chemical potential ``mu``."""
    return sommerfeld_expansion(
        float(dos(mu)), float(dos.derivative(mu)), mu, T, k_B,
        u0=dos.energy_integral(mu), n0=dos.number_integral(mu),
    )


def _fd_quad(func, mu, kt, epsrel):
    # integrate from the band bottom to mu + 40 kT, split at mu where the
    # Fermi factor turns over; the tail beyond is below exp(-40)
    top = max(mu, 0.0) + 40.0 * kt
    pieces = [(0.0, mu), (mu, top)] if mu > 0 else [(0.0, top)]
    total = 0.0
    for a, b in pieces:
        val, _ = quad(func, a, b, epsabs=0.0, epsrel=epsrel, limit=400)
        total += val
    return total


def fermi_dirac_integrals(dos, mu: float, T: float, k_B: float = K_B,
                          epsrel: float = 1e-13) -> tuple[float, float]:
    """Exact ``(u, n)`` per unit area by quadrature of the full Fermi factor.

    ``dos`` is any callable ``g(E)``.
    """
    if not T > 0:
        raise ValueError(f"temperature must be > 0, got {T!r}")
    kt = k_B * T

    def occ(E):
        return expit((mu - E) / kt)

    n = _fd_quad(lambda E: dos(E) * occ(E), mu, kt, epsrel)
    u = _fd_quad(lambda E: E * dos(E) * occ(E), mu, kt, epsrel)
    return u, n


class OracleError(RuntimeError):
    """Raised when the Fermi-Dirac oracle cannot bracket or verify a root."""


class OracleResult(NamedTuple):
    mu_exact: float
    u_exact: float
    n_quadrature: float
    n_closed_form: float


def fd_oracle(
    M: float,
    A: float,
    g: float,
    T: float,
    k_B: float = K_B,
    *,
    xtol: float = 1e-12,
    epsrel: float = 1e-13,
    check_rtol: float = 1e-10,
) -> OracleResult:
    """Exact chemical potential and internal energy of a constant-DOS 2D gas.

    The chemical potential is found by Brent's method on the quadrature
    density over ``[-50 kT, mu_F + 50 kT]`` and the internal energy
    ``U = A * int E g f(E) dE`` is integrated numerically.  The quadrature
    density at the root is checked against the closed form
    ``g kT ln(1 + exp(mu/kT))``.

    Raises
    ------
    OracleError
        If the root is not bracketed or the closed-form check fails.
    """
    if not (M > 0 and A > 0 and g > 0 and T > 0):
        raise ValueError(f"fd_oracle needs M, A, g, T > 0, got {(M, A, g, T)!r}")
    kt = k_B * T
    n_target = M / A
    mu_f = n_target / g

    def dos(E):
        return g

    def excess(mu):
        return fermi_dirac_integrals(dos, mu, T, k_B, epsrel)[1] - n_target

    lo, hi = -50.0 * kt, mu_f + 50.0 * kt
    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo * f_hi > 0:
        raise OracleError(
            f"chemical potential not bracketed in [{lo:g}, {hi:g}] meV: "
            f"density excess {f_lo:g} .. {f_hi:g} nm^-2"
        )
    mu = brentq(excess, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    u_area, n_quad = fermi_dirac_integrals(dos, mu, T, k_B, epsrel)
    n_closed = g * kt * np.logaddexp(0.0, mu / kt)
    if abs(n_quad - n_closed) > check_rtol * abs(n_closed):
        raise OracleError(
            f"quadrature density {n_quad!r} disagrees with closed form {n_closed!r} "
            f"(rtol {check_rtol:g})"
        )
    return OracleResult(mu, A * u_area, n_quad, float(n_closed))
