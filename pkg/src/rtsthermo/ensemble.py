"""Finite grand canonical ensemble of a (1 <-> 2)-electron island.

The island holds one or two electrons and exchanges one electron with a
finite 2D bath of ``N2`` electrons.  Relative to the usual grand canonical
weights, the fugacity exponent carries a finite-bath correction
``n1 * (1 + n1 / (2 N2))``.  All exponentials are handled in log space, so
quantities that overflow a double come back as a :class:`LogValue` whose
``value`` is ``None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.special import expit

from .fermi2d import (
    PI2_6,
    PhysicalConstants,
    ReservoirSpec,
    chemical_potential,
    fd_oracle,
    heat_capacity_per_area,
)

__all__ = [
    "DotSpec",
    "EnsembleParams",
    "OccupancyDistribution",
    "LogValue",
    "IslandArea",
    "dot_energy",
    "delta_helmholtz_exact",
    "delta_helmholtz_approx",
    "fugacity_exponent",
    "log_weight",
    "weight",
    "partition_qg",
    "occupation_probability",
    "occupation_ratio",
    "effective_energy_gap",
    "energy_gap",
    "infinite_reservoir_ratio",
    "state_equation_residual",
    "consistent_island_area",
]

# largest x with exp(x) finite in IEEE double
_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class DotSpec:
    """Energy model of the island.

    Attributes
    ----------
    e_t : float
        Ground level energy of the first electron (meV).
    delta_e_c : float
        Coulomb charging energy of the second electron (meV).
    delta_e_l : float
        Lattice relaxation energy on capture of the second electron (meV).
    deg1, deg2 : int
        Degeneracies of the one- and two-electron states (spin doublet and
        singlet by default).
    sigma1 : float
        Island area (nm^2).
    """

    e_t: float
    delta_e_c: float = 0.0
    delta_e_l: float = 0.0
    deg1: int = 2
    deg2: int = 1
    sigma1: float = 0.0

    def __post_init__(self):
        for name in ("deg1", "deg2"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise ValueError(f"dot.{name} must be an integer >= 1, got {v!r}")
            object.__setattr__(self, name, int(v))
        if not (math.isfinite(self.sigma1) and self.sigma1 >= 0):
            raise ValueError(f"dot.sigma1 must be >= 0, got {self.sigma1!r}")
        if not (math.isfinite(self.delta_e_c) and self.delta_e_c >= 0):
            raise ValueError(f"dot.delta_e_c must be >= 0, got {self.delta_e_c!r}")
        for name in ("e_t", "delta_e_l"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"dot.{name} must be finite")

    @classmethod
    def from_huang_rhys(cls, e_t: float, delta_e_c: float, s_hr: float, hbar_omega: float,
                        **kwargs) -> "DotSpec":
        """Build a dot whose relaxation energy is ``s_hr * hbar_omega`` (meV)."""
        return cls(e_t=e_t, delta_e_c=delta_e_c, delta_e_l=s_hr * hbar_omega, **kwargs)

    def degeneracy(self, n1: int) -> int:
        _check_n1(n1)
        return self.deg1 if n1 == 1 else self.deg2


@dataclass(frozen=True)
class EnsembleParams:
    reservoir: ReservoirSpec
    dot: DotSpec
    temperature: float
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    #: take the bath chemical potential from the Fermi-Dirac oracle instead
    #: of the linear ``N2/(g sigma2)`` law
    oracle_mu: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError(f"temperature must be > 0, got {self.temperature!r}")

    @property
    def beta(self) -> float:
        """Inverse thermal energy 1/(k_B T) in meV^-1."""
        return 1.0 / (self.constants.k_B * self.temperature)

    @property
    def mu(self) -> float:
        r = self.reservoir
        if self.oracle_mu:
            return fd_oracle(r.n2, r.sigma2, r.g, self.temperature, self.constants.k_B).mu_exact
        return chemical_potential(r.n2, r.sigma2, r.g)

    def with_temperature(self, temperature: float) -> "EnsembleParams":
        return replace(self, temperature=temperature)


class OccupancyDistribution(NamedTuple):
    p1: float
    p2: float


@dataclass(frozen=True)
class LogValue:
    """A positive number held through its natural logarithm.

    ``value`` is the float when it is representable and ``None`` when only
    the logarithm fits in a double.
    """

    log: float

    @property
    def representable(self) -> bool:
        return self.log <= _LOG_MAX

    @property
    def value(self) -> float | None:
        return math.exp(self.log) if self.representable else None

    def __float__(self) -> float:
        if not self.representable:
            raise OverflowError(f"exp({self.log}) is not representable as a float")
        return math.exp(self.log)


class IslandArea(NamedTuple):
    sigma1: float | None
    ok: bool
    reason: str


def _check_n1(n1):
    if n1 not in (1, 2):
        raise ValueError(f"island occupancy must be 1 or 2 (a third electron cannot be captured), got {n1!r}")


def dot_energy(dot: DotSpec, n1: int) -> float:
    """Total island energy: ``E_T`` for one electron, ``2 E_T + dE_C + dE_L`` for two."""
    _check_n1(n1)
    if n1 == 1:
        return dot.e_t
    return 2.0 * dot.e_t + dot.delta_e_c + dot.delta_e_l


def delta_helmholtz_exact(n1: int, reservoir: ReservoirSpec, sigma1: float, T: float,
                          k_B: float | None = None) -> float:
    """Helmholtz variation ``Psi(N1+N2, sigma1+sigma2) - Psi(N2, sigma2)`` without
    the ``sigma1 << sigma2`` approximation (meV)."""
    _check_n1(n1)
    k_B = PhysicalConstants().k_B if k_B is None else k_B
    if not T > 0:
        raise ValueError(f"temperature must be > 0, got {T!r}")
    if sigma1 < 0:
        raise ValueError(f"sigma1 must be >= 0, got {sigma1!r}")
    g, n2, s2 = reservoir.g, reservoir.n2, reservoir.sigma2
    kt2 = (k_B * T) ** 2
    return (
        (n1 + n2) ** 2 / (2.0 * g * (sigma1 + s2))
        - n2**2 / (2.0 * g * s2)
        - PI2_6 * g * (sigma1 + s2) * kt2
        + PI2_6 * g * s2 * kt2
    )


def delta_helmholtz_approx(n1: int, reservoir: ReservoirSpec, sigma1: float, T: float,
                           k_B: float | None = None) -> float:
    """Helmholtz variation with ``sigma1 + sigma2 ~ sigma2`` in the energy term:
    ``n1 mu (1 + n1/(2 N2)) - c_A sigma1 T / 2`` (meV)."""
    _check_n1(n1)
    k_B = PhysicalConstants().k_B if k_B is None else k_B
    if not T > 0:
        raise ValueError(f"temperature must be > 0, got {T!r}")
    if sigma1 < 0:
        raise ValueError(f"sigma1 must be >= 0, got {sigma1!r}")
    mu = reservoir.mu()
    c_a = heat_capacity_per_area(reservoir.g, T, k_B)
    return n1 * mu * (1.0 + n1 / (2.0 * reservoir.n2)) - 0.5 * c_a * sigma1 * T


def fugacity_exponent(n1: int, n2: int) -> float:
    """Power of ``z = exp(beta mu)`` in the weight of ``n1`` island electrons."""
    _check_n1(n1)
    return n1 * (1.0 + n1 / (2.0 * n2))


def log_weight(params: EnsembleParams, n1: int) -> float:
    """Natural log of ``deg(n1) z^{n1(1+n1/2N2)} exp(-beta E(n1))``."""
    b = params.beta
    return (
        math.log(params.dot.degeneracy(n1))
        + b * params.mu * fugacity_exponent(n1, params.reservoir.n2)
        - b * dot_energy(params.dot, n1)
    )


def weight(params: EnsembleParams, n1: int) -> LogValue:
    """Unnormalised ensemble weight of occupancy ``n1``.

    The common factor ``exp(-c_A sigma1 / (2 k_B))`` shared by both
    occupancies is left out; it only enters :func:`state_equation_residual`.
    """
    return LogValue(log_weight(params, n1))


def partition_qg(params: EnsembleParams) -> LogValue:
    """Partition sum over the one- and two-electron states."""
    return LogValue(float(np.logaddexp(log_weight(params, 1), log_weight(params, 2))))


def occupation_probability(params: EnsembleParams) -> OccupancyDistribution:
    """Occupation probabilities ``(p1, p2)`` of the island."""
    d = log_weight(params, 1) - log_weight(params, 2)
    p1 = float(expit(d))
    p2 = float(expit(-d))
    return OccupancyDistribution(p1, p2)


def energy_gap(reservoir: ReservoirSpec, dot: DotSpec, *, infinite_reservoir: bool = False,
               mu: float | None = None) -> float:
    """Temperature-independent form of :func:`effective_energy_gap`.

    ``mu`` defaults to the linear law ``N2 / (g sigma2)``.
    """
    mu = reservoir.mu() if mu is None else mu
    corr = 1.0 if infinite_reservoir else 1.0 + 1.5 / reservoir.n2
    return dot.e_t + dot.delta_e_l + dot.delta_e_c - mu * corr


def effective_energy_gap(params: EnsembleParams, *, infinite_reservoir: bool = False) -> float:
    """Energy ``X = E_T + dE_L + dE_C - mu (1 + 3/(2 N2))`` that sets p1/p2 (meV).

    With ``infinite_reservoir`` the finite-bath factor is dropped.
    """
    return energy_gap(params.reservoir, params.dot, infinite_reservoir=infinite_reservoir,
                      mu=params.mu)


def occupation_ratio(params: EnsembleParams) -> LogValue:
    """Closed form ``p1/p2 = (deg1/deg2) exp(beta X)``."""
    d = params.dot
    return LogValue(math.log(d.deg1 / d.deg2) + params.beta * effective_energy_gap(params))


def infinite_reservoir_ratio(params: EnsembleParams) -> LogValue:
    """The ``N2 -> infinity`` limit of :func:`occupation_ratio` at the same mu."""
    d = params.dot
    x = effective_energy_gap(params, infinite_reservoir=True)
    return LogValue(math.log(d.deg1 / d.deg2) + params.beta * x)


def _area_term(params: EnsembleParams, sigma1: float) -> float:
    # c_A sigma1 / (2 k_B), dimensionless
    c_a = heat_capacity_per_area(params.reservoir.g, params.temperature, params.constants.k_B)
    return c_a * sigma1 / (2.0 * params.constants.k_B)


def state_equation_residual(params: EnsembleParams) -> float:
    """``ln Z_QG - c_A sigma1 / (2 k_B)``; zero when the ensemble is normalised."""
    return partition_qg(params).log - _area_term(params, params.dot.sigma1)


def consistent_island_area(params: EnsembleParams) -> IslandArea:
    """Island area that zeroes :func:`state_equation_residual`.

    When ``ln Z_QG < 0`` no nonnegative area exists; the result then has
    ``ok=False`` and ``sigma1=None``.
    """
    log_z = partition_qg(params).log
    per_area = _area_term(params, 1.0)
    if log_z < 0:
        return IslandArea(None, False, f"ln Z_QG = {log_z:.6g} < 0: no nonnegative consistent area")
    return IslandArea(log_z / per_area, True, "")
