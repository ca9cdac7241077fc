"""Open-system dynamics of Gaussian modes driven by thermal white noise.

Builds the drift and diffusion matrices of the covariance equation
sigma' = A sigma + sigma A^T + D from a quadratic Hamiltonian and a bath
coupling matrix, and solves for steady states.  Covariances are in vacuum
units (vacuum = identity); bath inputs are thermal with sigma_in = nbar * 1,
nbar = 2N + 1 >= 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StabilityError
from .symplectic import omega

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])

# Eigenvalues of sigma + i*Omega may dip this far below zero from rounding
# before a covariance matrix is rejected as unphysical.
UNCERTAINTY_SLACK = 1e-9


def _even_matrix(m, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] % 2 or m.shape[1] % 2:
        raise ValueError(f"{name} must have even dimensions, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    """Symmetric Hamiltonian matrix H of the quadratic form (1/2) r^T H r.

    Symmetrized on construction, so H = H^T holds exactly.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = _even_matrix(self.matrix, "Hamiltonian")
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got shape {m.shape}")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Bath coupling matrix C, shape 2n x 2m for n system modes and m input ports."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _even_matrix(self.matrix, "coupling matrix")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def ports(self) -> int:
        return self.matrix.shape[1] // 2


@dataclass(frozen=True, eq=False)
class OpenSystem:
    """A Gaussian system coupled to thermal white-noise inputs with occupation nbar."""

    hamiltonian: QuadraticHamiltonian
    coupling: CouplingMatrix
    nbar: float = 1.0

    def __post_init__(self):
        if self.nbar < 1.0:
            raise ValueError(f"nbar = 2N + 1 must be >= 1, got {self.nbar}")
        if self.hamiltonian.modes != self.coupling.modes:
            raise ValueError(
                f"Hamiltonian acts on {self.hamiltonian.modes} modes but coupling on "
                f"{self.coupling.modes}"
            )

    @property
    def modes(self) -> int:
        return self.hamiltonian.modes


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetric second-moment matrix satisfying sigma + i*Omega >= 0 (vacuum units)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _even_matrix(self.matrix, "covariance matrix")
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"covariance matrix must be square, got shape {m.shape}")
        asym = float(np.abs(m - m.T).max())
        if asym > 1e-9 * max(1.0, float(np.abs(m).max())):
            raise ValueError(f"covariance matrix is not symmetric (|sigma - sigma^T|_max = {asym:.3e})")
        m = 0.5 * (m + m.T)
        n = m.shape[0] // 2
        unc = float(np.linalg.eigvalsh(m + 1j * omega(n)).min())
        if unc < -UNCERTAINTY_SLACK:
            raise ValueError(
                f"covariance matrix violates the uncertainty relation: "
                f"min eig(sigma + i Omega) = {unc:.3e}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of sigma (the most-squeezed variance)."""
        return float(np.linalg.eigvalsh(self.matrix).min())


def squeezing_hamiltonian(chi: float) -> QuadraticHamiltonian:
    """Single-mode Hamiltonian -(chi/2) sigma_x; drives x below vacuum for chi > 0."""
    return QuadraticHamiltonian(-(chi / 2.0) * PAULI_X)


def exchange_coupling(gamma: float, ports: int = 1) -> CouplingMatrix:
    """Excitation-exchange coupling sqrt(gamma) Omega^T per port, stacked horizontally."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if ports < 1:
        raise ValueError(f"port count must be >= 1, got {ports}")
    block = np.sqrt(gamma) * omega(1).T
    return CouplingMatrix(np.hstack([block] * ports))


def squeezing_system(chi: float, gamma: float, nbar: float = 1.0, ports: int = 1) -> OpenSystem:
    """Damped single mode with a quadrature-squeezing drive; the workbench workhorse."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    return OpenSystem(squeezing_hamiltonian(chi), exchange_coupling(gamma, ports), nbar)


def drift_matrix(system: OpenSystem) -> np.ndarray:
    """Drift A = Omega H + (1/2) (Omega C) (Omega_bath C^T) of the covariance flow."""
    h = system.hamiltonian.matrix
    c = system.coupling.matrix
    om_sys = omega(system.modes)
    om_bath = omega(system.coupling.ports)
    return om_sys @ h + 0.5 * (om_sys @ c) @ (om_bath @ c.T)


def diffusion_matrix(system: OpenSystem) -> np.ndarray:
    """Diffusion D = nbar (Omega C)(Omega C)^T for thermal inputs sigma_in = nbar*1."""
    oc = omega(system.modes) @ system.coupling.matrix
    return system.nbar * (oc @ oc.T)


def spectral_abscissa(a) -> float:
    """Largest real part over the eigenvalues of a."""
    a = np.asarray(a, dtype=float)
    return float(np.linalg.eigvals(a).real.max())


def is_hurwitz(a, margin: float = 0.0) -> bool:
    """True iff every eigenvalue of a has real part < -margin."""
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    return spectral_abscissa(a) < -margin


def lyapunov_steady_state(a, d) -> CovarianceMatrix:
    """Unique solution of A sigma + sigma A^T + D = 0 for Hurwitz A.

    Solved by Kronecker-sum vectorization; dimensions here are small enough
    that the dense solve is exact to machine precision.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    if a.shape != d.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"A and D must be square with equal shapes, got {a.shape} and {d.shape}")
    worst = spectral_abscissa(a)
    if worst >= 0.0:
        raise StabilityError(
            f"drift matrix is not Hurwitz (max Re eigenvalue = {worst:.3e})",
            max_real_part=worst,
        )
    k = a.shape[0]
    eye = np.eye(k)
    lhs = np.kron(eye, a) + np.kron(a, eye)
    sigma = np.linalg.solve(lhs, -d.reshape(-1)).reshape(k, k)
    return CovarianceMatrix(0.5 * (sigma + sigma.T))


def _rk4_affine_2x2(a, d, x, c, y, dt, steps):
    # Component-form RK4 for sigma' = A sigma + sigma A^T + D on the symmetric
    # triple (s11, s12, s22); evolving the triple symmetrizes every step.
    a11, a12 = a[0, 0], a[0, 1]
    a21, a22 = a[1, 0], a[1, 1]
    d11, d12, d22 = d[0, 0], d[0, 1], d[1, 1]
    asum = a11 + a22
    h2 = dt * 0.5
    h6 = dt / 6.0
    for _ in range(steps):
        k1x = 2.0 * (a11 * x + a12 * c) + d11
        k1c = a21 * x + asum * c + a12 * y + d12
        k1y = 2.0 * (a21 * c + a22 * y) + d22
        x1 = x + h2 * k1x
        c1 = c + h2 * k1c
        y1 = y + h2 * k1y
        k2x = 2.0 * (a11 * x1 + a12 * c1) + d11
        k2c = a21 * x1 + asum * c1 + a12 * y1 + d12
        k2y = 2.0 * (a21 * c1 + a22 * y1) + d22
        x1 = x + h2 * k2x
        c1 = c + h2 * k2c
        y1 = y + h2 * k2y
        k3x = 2.0 * (a11 * x1 + a12 * c1) + d11
        k3c = a21 * x1 + asum * c1 + a12 * y1 + d12
        k3y = 2.0 * (a21 * c1 + a22 * y1) + d22
        x1 = x + dt * k3x
        c1 = c + dt * k3c
        y1 = y + dt * k3y
        k4x = 2.0 * (a11 * x1 + a12 * c1) + d11
        k4c = a21 * x1 + asum * c1 + a12 * y1 + d12
        k4y = 2.0 * (a21 * c1 + a22 * y1) + d22
        x += h6 * (k1x + 2.0 * (k2x + k3x) + k4x)
        c += h6 * (k1c + 2.0 * (k2c + k3c) + k4c)
        y += h6 * (k1y + 2.0 * (k2y + k3y) + k4y)
    return x, c, y


def evolve_covariance(sigma0, a, d, t_final: float, dt: float) -> CovarianceMatrix:
    """Integrate sigma' = A sigma + sigma A^T + D with fixed-step classical RK4.

    The state is symmetrized every step.  If t_final is not an integer multiple
    of dt, a final shortened step lands exactly on t_final.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be >= 0, got {t_final}")
    s = sigma0.matrix if isinstance(sigma0, CovarianceMatrix) else np.asarray(sigma0, dtype=float)
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    if s.shape != a.shape or s.shape != d.shape:
        raise ValueError(f"shape mismatch: sigma {s.shape}, A {a.shape}, D {d.shape}")
    if t_final == 0:
        return CovarianceMatrix(s)
    steps = int(np.floor(t_final / dt + 1e-9))
    remainder = t_final - steps * dt
    if s.shape == (2, 2):
        x, c, y = _rk4_affine_2x2(a, d, s[0, 0], s[0, 1], s[1, 1], dt, steps)
        if remainder > 1e-12 * dt:
            x, c, y = _rk4_affine_2x2(a, d, x, c, y, remainder, 1)
        return CovarianceMatrix(np.array([[x, c], [c, y]]))

    def rk4_step(m, h):
        k1 = a @ m + m @ a.T + d
        m1 = m + 0.5 * h * k1
        k2 = a @ m1 + m1 @ a.T + d
        m1 = m + 0.5 * h * k2
        k3 = a @ m1 + m1 @ a.T + d
        m1 = m + h * k3
        k4 = a @ m1 + m1 @ a.T + d
        m = m + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        return 0.5 * (m + m.T)

    s = s.copy()
    for _ in range(steps):
        s = rk4_step(s, dt)
    if remainder > 1e-12 * dt:
        s = rk4_step(s, remainder)
    return CovarianceMatrix(s)


def squeezing_db(sigma_element: float) -> float:
    """Noise suppression relative to vacuum in decibels: -10 log10(sigma_element)."""
    if sigma_element <= 0:
        raise ValueError(f"variance must be > 0, got {sigma_element}")
    return float(-10.0 * np.log10(sigma_element))


def no_control_squeezing(chi: float, gamma: float, nbar: float = 1.0) -> float:
    """Steady-state x-variance nbar*gamma/(chi + gamma) of the bare damped mode."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if nbar < 1.0:
        raise ValueError(f"nbar must be >= 1, got {nbar}")
    if abs(chi) >= gamma:
        raise StabilityError(
            f"no steady state: |chi| must be below gamma (chi={chi}, gamma={gamma})",
            max_real_part=(abs(chi) - gamma) / 2.0,
        )
    return nbar * gamma / (chi + gamma)


def load_system_config(path) -> dict:
    """Parse a flat key = value config file; '#' starts a comment, blank lines skipped."""
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            values[key] = _coerce(value.strip())
    return values


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def system_from_config(config: dict) -> OpenSystem:
    """Build the standard squeezing system from a config mapping with chi/gamma/nbar."""
    for key in ("chi", "gamma"):
        if key not in config:
            raise ValueError(f"config missing required key {key!r}")
    return squeezing_system(
        float(config["chi"]), float(config["gamma"]), float(config.get("nbar", 1.0))
    )
