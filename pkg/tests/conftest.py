"""Shared samplers for the test suite.

Everything is seeded through numpy Generators so reruns are bit-identical.
"""
import numpy as np

from squeezelab import (
    CouplingMatrix,
    OpenSystem,
    QuadraticHamiltonian,
    diffusion_matrix,
    drift_matrix,
    spectral_abscissa,
)


def random_hurwitz_pair(rng):
    """Draw a single-mode open system whose drift is comfortably stable.

    Rejection keeps max Re eigenvalue <= -0.2 and spectral radius <= 4 so
    fixed-step integration converges quickly in every test that uses this.
    Returns (drift, diffusion).
    """
    while True:
        h = rng.uniform(-2.0, 2.0, size=(2, 2))
        h = (h + h.T) / 2.0
        c = rng.uniform(-1.5, 1.5, size=(2, 2))
        nbar = float(rng.uniform(1.0, 3.0))
        system = OpenSystem(QuadraticHamiltonian(h), CouplingMatrix(c), nbar)
        a = drift_matrix(system)
        if spectral_abscissa(a) > -0.2:
            continue
        if np.max(np.abs(np.linalg.eigvals(a))) > 4.0:
            continue
        return a, diffusion_matrix(system)
