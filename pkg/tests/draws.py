"""Random ensemble parameters for property tests.

Energies are drawn in units of k_B T so that the conditioning of the
ratio, ``beta * (|E(1)| + |E(2)| + 2 mu)``, stays below a few thousand.
"""

import numpy as np

from rtsthermo.ensemble import DotSpec, EnsembleParams
from rtsthermo.fermi2d import K_B, ReservoirSpec, dos_2d

G = dos_2d()


def draw_params(rng, *, t_range=(0.05, 300.0), bx_range=(-50.0, 50.0), bmu_max=300.0,
                bec_max=200.0, bel_max=100.0, n2_range=(10, 10**6)):
    """One random parameter set with ``beta X`` uniform in ``bx_range``."""
    n2 = int(np.exp(rng.uniform(*np.log(n2_range))))
    T = float(np.exp(rng.uniform(*np.log(t_range))))
    kt = K_B * T
    bmu = float(np.exp(rng.uniform(np.log(0.1), np.log(bmu_max))))
    res = ReservoirSpec(n2, n2 / (G * bmu * kt))
    mu = res.mu()
    dec, del_ = rng.uniform(0, bec_max) * kt, rng.uniform(0, bel_max) * kt
    x = rng.uniform(*bx_range) * kt
    e_t = x + mu * (1 + 1.5 / n2) - dec - del_
    dot = DotSpec(e_t, dec, del_, sigma1=float(rng.uniform(0, 100)))
    return EnsembleParams(res, dot, T)


def conditioning(p):
    from rtsthermo.ensemble import dot_energy
    return p.beta * (abs(dot_energy(p.dot, 1)) + abs(dot_energy(p.dot, 2)) + 2 * p.mu)
