"""Conditional steady states under continuous general-dyne and homodyne monitoring.

Monitoring the output field turns the linear covariance flow into the Riccati
equation sigma' = A~ sigma + sigma A~^T + D~ - sigma B B^T sigma.  Ideal
x-homodyne is the limit in which the measurement covariance diverges along p;
that limit is taken analytically here (B acquires a single nonzero column
along x), with a finite regularization kept as a numerical cross-check.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .dynamics import (
    CovarianceMatrix,
    OpenSystem,
    diffusion_matrix,
    drift_matrix,
    is_hurwitz,
    lyapunov_steady_state,
    squeezing_system,
)
from .errors import ConvergenceError, StabilityError
from .symplectic import omega

CONVERGENCE_TOL = 1e-12  # |sigma'|_max at which the flow counts as converged
RESIDUAL_LIMIT = 1e-9  # largest residual an accepted steady state may carry
TIME_CAP_FACTOR = 1e4  # integration stops at TIME_CAP_FACTOR / rate


@dataclass(frozen=True, eq=False)
class GeneralDyneMeasurement:
    """Gaussian continuous measurement parametrized by its covariance sigma_m.

    sigma_m None together with zeta marks ideal x-homodyne with detector
    efficiency zeta, i.e. the limit in which the p-entry of sigma_m diverges.
    """

    sigma_m: Optional[np.ndarray]
    zeta: Optional[float] = None

    def __post_init__(self):
        if self.sigma_m is None:
            if self.zeta is None:
                raise ValueError("either sigma_m or zeta (homodyne limit) must be given")
            if not 0.0 < self.zeta <= 1.0:
                raise ValueError(f"efficiency must lie in (0, 1], got {self.zeta}")
            return
        m = np.asarray(self.sigma_m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError(f"sigma_m must be even-dimensioned square, got shape {m.shape}")
        if float(np.abs(m - m.T).max()) > 1e-9 * max(1.0, float(np.abs(m).max())):
            raise ValueError("sigma_m must be symmetric")
        if float(np.linalg.eigvalsh(m).min()) <= 0.0:
            raise ValueError("sigma_m must be positive definite")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "sigma_m", m)

    @classmethod
    def homodyne_x(cls, zeta: float) -> "GeneralDyneMeasurement":
        """Ideal-limit x-quadrature homodyne with detector efficiency zeta."""
        return cls(sigma_m=None, zeta=zeta)

    @classmethod
    def homodyne_x_regularized(cls, zeta: float, z: float) -> "GeneralDyneMeasurement":
        """Finite stand-in for x homodyne: sigma_m = diag((z+1-zeta)/zeta, (1/z+1-zeta)/zeta)."""
        if not 0.0 < zeta <= 1.0:
            raise ValueError(f"efficiency must lie in (0, 1], got {zeta}")
        if z <= 0:
            raise ValueError(f"regularization z must be > 0, got {z}")
        return cls(
            sigma_m=np.diag([(z + 1.0 - zeta) / zeta, (1.0 / z + 1.0 - zeta) / zeta]), zeta=zeta
        )

    @property
    def is_homodyne_limit(self) -> bool:
        return self.sigma_m is None


@dataclass(frozen=True, eq=False)
class RiccatiSystem:
    """Matrices of sigma' = A~ sigma + sigma A~^T + D~ - sigma B B^T sigma."""

    a_tilde: np.ndarray
    d_tilde: np.ndarray
    b: np.ndarray
    rate: float = field(default=1.0)

    def __post_init__(self):
        a = np.asarray(self.a_tilde, dtype=float)
        d = np.asarray(self.d_tilde, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape[0] != a.shape[1] or d.shape != a.shape or b.shape[0] != a.shape[0]:
            raise ValueError(
                f"inconsistent shapes: A~ {a.shape}, D~ {d.shape}, B {b.shape}"
            )
        scale = max(1.0, float(np.abs(d).max()))
        if float(np.abs(d - d.T).max()) > 1e-9 * scale:
            raise ValueError("D~ must be symmetric")
        d = 0.5 * (d + d.T)
        if float(np.linalg.eigvalsh(d).min()) < -1e-9 * scale:
            raise ValueError("D~ must be positive semidefinite up to numerical slack")
        if self.rate <= 0:
            raise ValueError(f"rate must be > 0, got {self.rate}")
        for m in (a, d, b):
            m.setflags(write=False)
        object.__setattr__(self, "a_tilde", a)
        object.__setattr__(self, "d_tilde", d)
        object.__setattr__(self, "b", b)


def riccati_matrices(system: OpenSystem, measurement: GeneralDyneMeasurement) -> RiccatiSystem:
    """Conditional-dynamics matrices for monitoring all output ports of a system.

    B = C Omega (sigma_in + sigma_m)^(-1/2), G = Omega C sigma_in (sigma_in + sigma_m)^(-1/2),
    A~ = A + G B^T and D~ = D - G G^T, with sigma_in = nbar * 1.  In the ideal
    x-homodyne limit (single port) the inverse square root collapses to
    diag(sqrt(zeta / (1 + (nbar - 1) zeta)), 0).
    """
    a = drift_matrix(system)
    d = diffusion_matrix(system)
    c = system.coupling.matrix
    ports = system.coupling.ports
    nbar = system.nbar
    rate = 0.5 * float(np.trace(c @ c.T))
    if rate <= 0:
        raise ValueError("monitoring needs a nonzero system-bath coupling")
    if measurement.is_homodyne_limit:
        if ports != 1:
            raise ValueError(f"homodyne limit is defined for a single port, got {ports}")
        zeta = measurement.zeta
        s = np.sqrt(zeta / (1.0 + (nbar - 1.0) * zeta))
        inv_sqrt = np.diag([s, 0.0])
    else:
        m = nbar * np.eye(2 * ports) + measurement.sigma_m
        if m.shape != (2 * ports, 2 * ports):
            raise ValueError(
                f"sigma_m shape {measurement.sigma_m.shape} does not match {ports} ports"
            )
        vals, vecs = np.linalg.eigh(m)
        if vals.min() <= 0:
            raise ValueError("sigma_in + sigma_m must be positive definite")
        inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.T
    om_bath = omega(ports)
    om_sys = omega(system.modes)
    b = c @ om_bath @ inv_sqrt
    g = om_sys @ c @ (nbar * inv_sqrt)
    return RiccatiSystem(a_tilde=a + g @ b.T, d_tilde=d - g @ g.T, b=b, rate=rate)


@dataclass(frozen=True, eq=False)
class MonitoredSteadyState:
    """Converged conditional covariance together with its flow residual."""

    sigma: CovarianceMatrix
    residual: float

    def __post_init__(self):
        if self.residual > RESIDUAL_LIMIT:
            raise ValueError(
                f"residual {self.residual:.3e} above the accepted limit {RESIDUAL_LIMIT:.1e}"
            )
        if self.sigma.min_eigenvalue() <= 0.0:
            raise ValueError("conditional covariance must be strictly positive definite")


def _riccati_chunk(a, d, k, x, c, y, dt, steps, tol):
    # Component-form RK4 on the symmetric triple (s11, s12, s22); the k1 stage
    # doubles as the convergence probe, so a converged state is returned
    # without taking the step.
    a11, a12 = a[0, 0], a[0, 1]
    a21, a22 = a[1, 0], a[1, 1]
    asum = a11 + a22
    d11, d12, d22 = d[0, 0], d[0, 1], d[1, 1]
    k11, k12, k22 = k[0, 0], k[0, 1], k[1, 1]
    h2 = dt * 0.5
    h6 = dt / 6.0
    resid = np.inf

    def f(x, c, y):
        m11 = k11 * x + k12 * c
        m12 = k11 * c + k12 * y
        m21 = k12 * x + k22 * c
        m22 = k12 * c + k22 * y
        fx = 2.0 * (a11 * x + a12 * c) + d11 - (x * m11 + c * m21)
        fc = a21 * x + asum * c + a12 * y + d12 - (x * m12 + c * m22)
        fy = 2.0 * (a21 * c + a22 * y) + d22 - (c * m12 + y * m22)
        return fx, fc, fy

    for i in range(steps):
        f1x, f1c, f1y = f(x, c, y)
        resid = max(abs(f1x), abs(f1c), abs(f1y))
        if resid < tol:
            return x, c, y, resid, True, i
        f2x, f2c, f2y = f(x + h2 * f1x, c + h2 * f1c, y + h2 * f1y)
        f3x, f3c, f3y = f(x + h2 * f2x, c + h2 * f2c, y + h2 * f2y)
        f4x, f4c, f4y = f(x + dt * f3x, c + dt * f3c, y + dt * f3y)
        x += h6 * (f1x + 2.0 * (f2x + f3x) + f4x)
        c += h6 * (f1c + 2.0 * (f2c + f3c) + f4c)
        y += h6 * (f1y + 2.0 * (f2y + f3y) + f4y)
    return x, c, y, resid, False, steps


def riccati_steady_state(rs: RiccatiSystem, sigma0=None) -> MonitoredSteadyState:
    """Integrate the conditional covariance flow to its fixed point.

    Classical RK4 on the symmetric components (symmetrization is built in), with
    the step size refreshed from the current state magnitude every chunk.  Stops
    once |sigma'|_max < 1e-12, or raises ConvergenceError past t = 1e4 / rate.
    Starts from the vacuum state unless sigma0 is given.
    """
    if sigma0 is None:
        sigma0 = np.eye(2)
    s = sigma0.matrix if isinstance(sigma0, CovarianceMatrix) else np.asarray(sigma0, dtype=float)
    if s.shape != (2, 2) or rs.a_tilde.shape != (2, 2):
        raise ValueError("fixed-point integration is implemented for single-mode systems")
    kmat = rs.b @ rs.b.T
    x, c, y = float(s[0, 0]), float(s[0, 1]), float(s[1, 1])
    t_cap = TIME_CAP_FACTOR / rs.rate
    t = 0.0
    resid = np.inf
    chunk = 256
    a_scale = float(np.abs(rs.a_tilde).sum())
    d_scale = float(np.abs(rs.d_tilde).sum())
    # Quadratic-term stiffness only involves the sectors K couples to, so an
    # unmonitored quadrature drifting to large values must not shrink the step.
    k_row_x = abs(kmat[0, 0]) + abs(kmat[0, 1])
    k_row_y = abs(kmat[0, 1]) + abs(kmat[1, 1])
    while t < t_cap:
        if max(abs(x), abs(y)) > 1e9:
            raise ConvergenceError(
                f"conditional covariance diverged (|sigma|_max > 1e9 at t = {t:.3g})",
                residual=resid,
            )
        quad = 2.0 * (
            k_row_x * max(abs(x), abs(c), 1.0) + k_row_y * max(abs(c), abs(y), 1.0)
        )
        stiffness = 2.0 * a_scale + quad + np.sqrt(d_scale * max(k_row_x, k_row_y))
        dt = 0.05 / max(stiffness, rs.rate * 1e-3, 1e-12)
        steps = min(chunk, max(1, int(np.ceil((t_cap - t) / dt))))
        x, c, y, resid, converged, done = _riccati_chunk(
            rs.a_tilde, rs.d_tilde, kmat, x, c, y, dt, steps, CONVERGENCE_TOL
        )
        t += done * dt
        if converged:
            return MonitoredSteadyState(
                sigma=CovarianceMatrix(np.array([[x, c], [c, y]])), residual=resid
            )
    raise ConvergenceError(
        f"no fixed point within t = {t_cap:.3g} (last residual {resid:.3e})", residual=resid
    )


def homodyne_steady_state(
    chi: float, gamma: float, zeta: float, nbar: float = 1.0, sigma0=None
) -> MonitoredSteadyState:
    """Conditional steady state for ideal-limit x homodyne on the squeezing system.

    The flow starts from the unmonitored steady state when the drift is Hurwitz
    and from nbar * 1 otherwise.
    """
    system = squeezing_system(chi, gamma, nbar)
    rs = riccati_matrices(system, GeneralDyneMeasurement.homodyne_x(zeta))
    if sigma0 is None:
        a = drift_matrix(system)
        if is_hurwitz(a):
            sigma0 = lyapunov_steady_state(a, diffusion_matrix(system))
        else:
            sigma0 = CovarianceMatrix(nbar * np.eye(2))
    return riccati_steady_state(rs, sigma0)


class HomodyneVariances(NamedTuple):
    sigma11: float
    sigma22: float


def _check_monitoring_params(chi: float, gamma: float, zeta: float, nbar: float):
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if nbar < 1.0:
        raise ValueError(f"nbar must be >= 1, got {nbar}")
    if not 0.0 < zeta <= 1.0:
        raise ValueError(f"efficiency must lie in (0, 1], got {zeta}")
    if abs(chi) >= gamma:
        raise StabilityError(
            f"conditional variances defined for |chi| < gamma, got chi={chi}, gamma={gamma}",
            max_real_part=(abs(chi) - gamma) / 2.0,
        )


def homodyne_closed_form(
    chi: float, gamma: float, zeta: float, nbar: float = 1.0
) -> HomodyneVariances:
    """Diagonal conditional variances for x homodyne with efficiency zeta.

    sigma11 is the positive root of the monitored balance equation,
    (a + sqrt(a^2 + b)) / (2 zeta) with a = 2 nbar zeta - (1 + (nbar-1) zeta)(1 + chi/gamma)
    and b = 4 nbar zeta (1 - zeta); the negative root is unphysical.  sigma22 is
    measurement-free: nbar / (1 - chi/gamma).  Off-diagonals vanish.
    """
    _check_monitoring_params(chi, gamma, zeta, nbar)
    a = 2.0 * nbar * zeta - (1.0 + (nbar - 1.0) * zeta) * (1.0 + chi / gamma)
    b = 4.0 * nbar * zeta * (1.0 - zeta)
    sigma11 = (a + np.sqrt(a * a + b)) / (2.0 * zeta)
    sigma22 = nbar / (1.0 - chi / gamma)
    return HomodyneVariances(float(sigma11), float(sigma22))


def efficiency_threshold(chi: float, gamma: float, nbar: float = 1.0) -> Optional[float]:
    """Detector efficiency above which x homodyne beats every stable passive loop.

    Returns 2(gamma - chi) / (2(gamma - chi) + nbar (2 chi - gamma)) when that
    lies in [0, 1], and None when no threshold exists (chi < gamma/2, where the
    conditional variance never drops below nbar/2).
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if nbar < 1.0:
        raise ValueError(f"nbar must be >= 1, got {nbar}")
    if not 0.0 < chi <= gamma:
        raise ValueError(f"threshold defined for 0 < chi <= gamma, got chi={chi}, gamma={gamma}")
    numerator = 2.0 * (gamma - chi)
    denominator = numerator + nbar * (2.0 * chi - gamma)
    if denominator <= 0.0:
        return None
    zeta_star = numerator / denominator
    return float(zeta_star) if zeta_star <= 1.0 else None


def monitored_stable_squeezing_condition(chi: float, gamma: float, nbar: float = 1.0) -> bool:
    """True iff ideal homodyne stabilizes below-vacuum x noise: nbar (1 - chi/gamma) < 1."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if nbar < 1.0:
        raise ValueError(f"nbar must be >= 1, got {nbar}")
    if abs(chi) >= gamma:
        raise StabilityError(
            f"condition defined for |chi| < gamma, got chi={chi}, gamma={gamma}",
            max_real_part=(abs(chi) - gamma) / 2.0,
        )
    return nbar * (1.0 - chi / gamma) < 1.0


MONITORING_CSV_HEADER = ("chi", "gamma", "zeta", "nbar", "sigma11_m", "sigma22_m", "threshold", "source")


def monitoring_sweep_rows(
    chi_values, gamma: float, zeta_values, nbar_values, source: str = "closed_form"
) -> list:
    """Conditional-variance sweep rows in canonical (nbar, chi, zeta) order.

    source selects the computation route: the closed form, or the Riccati
    fixed-point integration (slower, used as the independent cross-check).
    """
    if source not in ("closed_form", "riccati"):
        raise ValueError(f"source must be 'closed_form' or 'riccati', got {source!r}")
    rows = []
    gamma = float(gamma)
    for nbar in map(float, nbar_values):
        for chi in map(float, chi_values):
            for zeta in map(float, zeta_values):
                if source == "closed_form":
                    var = homodyne_closed_form(chi, gamma, zeta, nbar)
                    s11, s22 = var.sigma11, var.sigma22
                else:
                    sigma = homodyne_steady_state(chi, gamma, zeta, nbar).sigma.matrix
                    s11, s22 = float(sigma[0, 0]), float(sigma[1, 1])
                threshold = efficiency_threshold(chi, gamma, nbar) if 0.0 < chi <= gamma else None
                rows.append(
                    {
                        "chi": float(chi),
                        "gamma": float(gamma),
                        "zeta": float(zeta),
                        "nbar": float(nbar),
                        "sigma11_m": s11,
                        "sigma22_m": s22,
                        "threshold": threshold,
                        "source": source,
                    }
                )
    return rows


def write_monitoring_csv(rows, fileobj) -> None:
    """Write monitoring sweep rows with the fixed header; absent thresholds are empty."""
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(MONITORING_CSV_HEADER)
    for row in rows:
        writer.writerow(
            [
                repr(row["chi"]),
                repr(row["gamma"]),
                repr(row["zeta"]),
                repr(row["nbar"]),
                repr(row["sigma11_m"]),
                repr(row["sigma22_m"]),
                "" if row["threshold"] is None else repr(row["threshold"]),
                row["source"],
            ]
        )
