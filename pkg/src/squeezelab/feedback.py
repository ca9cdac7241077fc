"""Passive coherent-feedback loops around a single damped mode.

A loop routes the first l output ports of the system through an interferometer
Z together with n_anc ancilla vacuum/thermal inputs, and feeds the first m of
Z's outputs back into the system's m feedback input ports.  Eliminating the
in-loop fields leaves an ordinary open system with effective coupling C_cf and
Hamiltonian H_cf, built here, whose stable steady states all obey the
min-eigenvalue floor nbar/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    CouplingMatrix,
    CovarianceMatrix,
    OpenSystem,
    QuadraticHamiltonian,
    diffusion_matrix,
    drift_matrix,
    is_hurwitz,
    lyapunov_steady_state,
    spectral_abscissa,
    squeezing_hamiltonian,
)
from .errors import StabilityError
from .serialize import matrix_to_json
from .symplectic import PassiveTransform, beam_splitter, block_decompose, epsilon_sum, omega

# Loops whose drift eigenvalues sit within this margin of the imaginary axis
# (marginal loops, e.g. lossless feedback with delta = 0) are treated as
# unstable, so the verdict is deterministic.
STABILITY_MARGIN = 1e-9


@dataclass(frozen=True)
class FeedbackTopology:
    """Port layout of a loop: l monitored/environment ports, m fed-back ports, n_anc ancillas."""

    l: int
    m: int
    n_anc: int
    gamma: float = 1.0

    def __post_init__(self):
        if self.l < 1:
            raise ValueError(f"l must be >= 1, got {self.l}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.n_anc < 0:
            raise ValueError(f"n_anc must be >= 0, got {self.n_anc}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.m > self.l + self.n_anc:
            raise ValueError(
                f"m={self.m} fed-back ports exceed the {self.l + self.n_anc} loop outputs"
            )

    @property
    def loop_modes(self) -> int:
        """Modes entering the interferometer: l system outputs plus n_anc ancillas."""
        return self.l + self.n_anc


def coupling_stack(k: int, gamma: float) -> np.ndarray:
    """Horizontal stack sqrt(gamma) (Omega^T ... Omega^T), shape 2 x 2k."""
    if k < 1:
        raise ValueError(f"port count must be >= 1, got {k}")
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    return np.sqrt(gamma) * np.hstack([omega(1).T] * k)


def boundary_stack(k: int, gamma: float) -> np.ndarray:
    """Vertical stack sqrt(gamma) (1_2 ... 1_2)^T from the input-output boundary, shape 2k x 2."""
    if k < 1:
        raise ValueError(f"port count must be >= 1, got {k}")
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    return np.sqrt(gamma) * np.vstack([np.eye(2)] * k)


@dataclass(frozen=True, eq=False)
class FeedbackLoop:
    """Effective open-system dynamics of one mode inside a passive feedback loop."""

    topology: FeedbackTopology
    interferometer: PassiveTransform
    coupling: np.ndarray
    hamiltonian: np.ndarray
    nbar: float
    epsilon: float
    delta: float
    beta: float
    drift: np.ndarray
    diffusion: np.ndarray
    stable: bool

    def effective_system(self) -> OpenSystem:
        return OpenSystem(
            QuadraticHamiltonian(self.hamiltonian), CouplingMatrix(self.coupling), self.nbar
        )


def build_feedback(topology: FeedbackTopology, z, h_s, nbar: float = 1.0) -> FeedbackLoop:
    """Close a passive loop and eliminate the in-loop fields.

    Args:
        topology: port counts (l, m, n_anc) and the per-port rate gamma.
        z: interferometer on l + n_anc modes (PassiveTransform or matrix).
        h_s: system Hamiltonian matrix, 2x2 symmetric.
        nbar: thermal occupation parameter of every input, >= 1.

    The effective coupling is C_cf = (C_l - C_m E | C_m F) and the Hamiltonian
    picks up the loop-mediated shift C_m E Gamma_l + transpose.
    """
    if not isinstance(z, PassiveTransform):
        z = PassiveTransform(np.asarray(z, dtype=float))
    if z.modes != topology.loop_modes:
        raise ValueError(
            f"interferometer acts on {z.modes} modes but topology routes {topology.loop_modes}"
        )
    h = h_s if isinstance(h_s, QuadraticHamiltonian) else QuadraticHamiltonian(h_s)
    if h.modes != 1:
        raise ValueError(f"system must be a single mode, got {h.modes}")
    gamma = topology.gamma
    e, f, _, _ = block_decompose(z, topology.m, topology.l)
    c_l = coupling_stack(topology.l, gamma)
    c_m = coupling_stack(topology.m, gamma)
    c_cf = np.hstack([c_l - c_m @ e, c_m @ f])
    shift = c_m @ e @ boundary_stack(topology.l, gamma)
    h_cf = QuadraticHamiltonian(h.matrix + shift + shift.T)
    system = OpenSystem(h_cf, CouplingMatrix(c_cf), nbar)
    a = drift_matrix(system)
    d = diffusion_matrix(system)
    eps = epsilon_sum(e)
    return FeedbackLoop(
        topology=topology,
        interferometer=z,
        coupling=c_cf,
        hamiltonian=h_cf.matrix,
        nbar=nbar,
        epsilon=eps,
        delta=diffusion_eigenvalue(topology, eps, nbar),
        beta=drift_trace_shift(topology, eps),
        drift=a,
        diffusion=d,
        stable=is_hurwitz(a, STABILITY_MARGIN),
    )


def diffusion_eigenvalue(topology: FeedbackTopology, epsilon: float, nbar: float = 1.0) -> float:
    """Scalar delta with D = delta * 1: nbar * gamma * (l + m - 2 epsilon)."""
    return nbar * topology.gamma * (topology.l + topology.m - 2.0 * epsilon)


def drift_trace_shift(topology: FeedbackTopology, epsilon: float) -> float:
    """Damping shift beta = gamma (2 epsilon - l - m) / 2; the loop drift has trace 2 beta."""
    return 0.5 * topology.gamma * (2.0 * epsilon - topology.l - topology.m)


def steady_state(loop: FeedbackLoop) -> CovarianceMatrix:
    """Steady covariance of a stable loop; marginal loops are rejected."""
    if not loop.stable:
        raise StabilityError(
            f"loop is not stable (max Re drift eigenvalue = {spectral_abscissa(loop.drift):.3e})",
            max_real_part=spectral_abscissa(loop.drift),
        )
    return lyapunov_steady_state(loop.drift, loop.diffusion)


@dataclass(frozen=True)
class BoundCertificate:
    """Outcome of checking a loop's steady state against the nbar/2 floor."""

    min_eig: float
    bound: float
    margin: float


def verify_3db_certificate(loop: FeedbackLoop) -> BoundCertificate:
    """Certify min eig(sigma_inf) against nbar/2; margin <= 0 would falsify the floor."""
    sigma = steady_state(loop)
    min_eig = sigma.min_eigenvalue()
    bound = loop.nbar / 2.0
    return BoundCertificate(min_eig=min_eig, bound=bound, margin=min_eig - bound)


def loop_identity_deviations(loop: FeedbackLoop) -> dict:
    """Structural identities every passive loop satisfies, as raw deviations.

    Returns max |D - delta*1|, |trace(A) - 2 beta|, and (min Re eigenvalue of A)
    minus the 2 beta floor (positive for every stable loop).
    """
    dim = loop.diffusion.shape[0]
    diffusion_dev = float(np.abs(loop.diffusion - loop.delta * np.eye(dim)).max())
    trace_dev = float(abs(np.trace(loop.drift) - 2.0 * loop.beta))
    eigen_floor_excess = float(np.linalg.eigvals(loop.drift).real.min() - 2.0 * loop.beta)
    return {
        "diffusion": diffusion_dev,
        "trace": trace_dev,
        "eigen_floor_excess": eigen_floor_excess,
    }


def simple_loop_closed_form(chi: float, gamma: float, eta: float, nbar: float = 1.0) -> float:
    """x-variance nbar*gamma*(1 - sqrt(eta)) / (chi/2 + gamma*(1 - sqrt(eta))) of the single lossy loop."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if nbar < 1.0:
        raise ValueError(f"nbar must be >= 1, got {nbar}")
    damping = gamma * (1.0 - math.sqrt(eta))
    if damping <= chi / 2.0:
        raise StabilityError(
            f"loop unstable: need gamma*(1-sqrt(eta)) > chi/2, got {damping:.6g} <= {chi / 2.0:.6g}",
            max_real_part=chi / 2.0 - damping,
        )
    return nbar * damping / (chi / 2.0 + damping)


def optimal_eta(chi: float, gamma: float, margin: float) -> float:
    """Transmissivity with sqrt(eta) = 1 - chi/(2 gamma) - margin, just inside stability.

    As margin -> 0 the loop variance approaches its floor nbar/2 while the
    slow quadrature diverges; margin keeps the loop strictly stable.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if not 0.0 < chi < 2.0 * gamma:
        raise ValueError(f"need 0 < chi < 2 gamma, got chi={chi}, gamma={gamma}")
    if margin <= 0:
        raise ValueError(f"margin must be > 0, got {margin}")
    root = 1.0 - chi / (2.0 * gamma) - margin
    if root < 0.0:
        raise ValueError(f"margin {margin} pushes sqrt(eta) below 0 (chi={chi}, gamma={gamma})")
    return root * root


def simple_feedback_loop(chi: float, gamma: float, eta: float, nbar: float = 1.0) -> FeedbackLoop:
    """The l = m = n_anc = 1 beam-splitter loop around the squeezing drive."""
    return build_feedback(
        FeedbackTopology(l=1, m=1, n_anc=1, gamma=gamma),
        beam_splitter(eta),
        squeezing_hamiltonian(chi),
        nbar,
    )


def loop_to_json(loop: FeedbackLoop) -> dict:
    """JSON document for a loop: topology, matrices, loop scalars, and sigma_inf if stable."""
    doc = {
        "topology": {
            "l": loop.topology.l,
            "m": loop.topology.m,
            "n_anc": loop.topology.n_anc,
            "gamma": loop.topology.gamma,
        },
        "interferometer": matrix_to_json(loop.interferometer.matrix),
        "coupling": matrix_to_json(loop.coupling),
        "hamiltonian": matrix_to_json(loop.hamiltonian),
        "nbar": loop.nbar,
        "epsilon": loop.epsilon,
        "delta": loop.delta,
        "beta": loop.beta,
        "stable": loop.stable,
        "steady_state": matrix_to_json(steady_state(loop).matrix) if loop.stable else None,
    }
    return doc
