"""Randomized certification of the squeezing floor and regime-comparison sweeps."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import no_control_squeezing, squeezing_hamiltonian
from .errors import InconclusiveSearchError
from .feedback import (
    FeedbackLoop,
    FeedbackTopology,
    build_feedback,
    loop_identity_deviations,
    optimal_eta,
    simple_feedback_loop,
    simple_loop_closed_form,
    verify_3db_certificate,
)
from .monitoring import efficiency_threshold, homodyne_closed_form
from .symplectic import random_passive


@dataclass(frozen=True)
class SearchConfig:
    """Settings of a randomized campaign over loop topologies and Hamiltonians."""

    trials: int = 1000
    seed: int = 0
    l_max: int = 3
    m_max: int = 3
    n_anc_max: int = 3
    hamiltonian_scale: float = 5.0
    nbar: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.l_max < 1 or self.m_max < 1 or self.n_anc_max < 0:
            raise ValueError(
                f"need l_max >= 1, m_max >= 1, n_anc_max >= 0, got "
                f"({self.l_max}, {self.m_max}, {self.n_anc_max})"
            )
        if self.hamiltonian_scale <= 0:
            raise ValueError(f"hamiltonian_scale must be > 0, got {self.hamiltonian_scale}")
        if self.nbar < 1.0:
            raise ValueError(f"nbar must be >= 1, got {self.nbar}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    # Sub-stream per trial: reproducible independently of execution order.
    return np.random.default_rng(np.random.SeedSequence((seed, index)))


def sample_loop(config: SearchConfig, index: int) -> FeedbackLoop:
    """Deterministically sample the loop for (config.seed, trial index)."""
    rng = _trial_rng(config.seed, index)
    while True:
        l = int(rng.integers(1, config.l_max + 1))
        m = int(rng.integers(1, config.m_max + 1))
        n_anc = int(rng.integers(0, config.n_anc_max + 1))
        if m <= l + n_anc:
            break
    z = random_passive(l + n_anc, rng)
    scale = config.hamiltonian_scale * config.gamma
    entries = rng.uniform(-scale, scale, size=3)
    h_s = np.array([[entries[0], entries[1]], [entries[1], entries[2]]])
    topology = FeedbackTopology(l=l, m=m, n_anc=n_anc, gamma=config.gamma)
    return build_feedback(topology, z, h_s, config.nbar)


def _check_loop_identities(loop: FeedbackLoop) -> None:
    # Piggybacked structural assertions; a failure here is an implementation bug.
    dev = loop_identity_deviations(loop)
    scale = max(1.0, abs(loop.delta), abs(2.0 * loop.beta))
    if dev["diffusion"] > 1e-10 * scale or dev["trace"] > 1e-10 * scale:
        raise RuntimeError(
            f"loop identity violated: |D - delta*1| = {dev['diffusion']:.3e}, "
            f"|tr A - 2 beta| = {dev['trace']:.3e}"
        )
    if loop.stable and dev["eigen_floor_excess"] <= -1e-10 * scale:
        raise RuntimeError(
            f"stable loop drift eigenvalue below the 2 beta floor by "
            f"{-dev['eigen_floor_excess']:.3e}"
        )


@dataclass(frozen=True)
class BoundSearchResult:
    """Outcome of a random campaign against the nbar/2 floor."""

    config: SearchConfig
    stable_count: int
    unstable_count: int
    violations: int
    min_margin: float
    argmin: dict

    @property
    def trials(self) -> int:
        return self.stable_count + self.unstable_count


def random_bound_search(config: SearchConfig, progress=None) -> BoundSearchResult:
    """Sample random passive loops and certify every stable one against nbar/2.

    Unstable samples are counted, not resampled.  Identical configs give
    identical results.  The optional progress callback receives
    (completed_trials, total_trials).
    """
    stable = 0
    unstable = 0
    violations = 0
    min_margin = np.inf
    argmin: Optional[dict] = None
    for index in range(config.trials):
        loop = sample_loop(config, index)
        _check_loop_identities(loop)
        if not loop.stable:
            unstable += 1
        else:
            stable += 1
            certificate = verify_3db_certificate(loop)
            if certificate.margin <= 0.0:
                violations += 1
            if certificate.margin < min_margin:
                min_margin = certificate.margin
                argmin = {
                    "trial": index,
                    "l": loop.topology.l,
                    "m": loop.topology.m,
                    "n_anc": loop.topology.n_anc,
                    "epsilon": loop.epsilon,
                    "min_eig": certificate.min_eig,
                    "margin": certificate.margin,
                }
        if progress is not None:
            progress(index + 1, config.trials)
    if stable == 0:
        raise InconclusiveSearchError(
            f"no stable loops in {config.trials} trials; nothing to certify"
        )
    return BoundSearchResult(
        config=config,
        stable_count=stable,
        unstable_count=unstable,
        violations=violations,
        min_margin=float(min_margin),
        argmin=argmin,
    )


def bound_search_report(result: BoundSearchResult) -> dict:
    """JSON-ready report of a campaign; content is a pure function of the config."""
    return {
        "config": {
            "trials": result.config.trials,
            "seed": result.config.seed,
            "l_max": result.config.l_max,
            "m_max": result.config.m_max,
            "n_anc_max": result.config.n_anc_max,
            "hamiltonian_scale": result.config.hamiltonian_scale,
            "nbar": result.config.nbar,
            "gamma": result.config.gamma,
        },
        "stable_count": result.stable_count,
        "unstable_count": result.unstable_count,
        "violations": result.violations,
        "bound": result.config.nbar / 2.0,
        "min_margin": result.min_margin,
        "argmin": result.argmin,
    }


def probe_near_bound(chi: float, gamma: float, nbar: float, gap: float) -> float:
    """Certificate margin of the beam-splitter loop at sqrt(eta) = 1 - chi/(2 gamma) - gap.

    The directed probe of the floor: margins shrink towards 0 as gap -> 0.
    """
    eta = optimal_eta(chi, gamma, gap)
    loop = simple_feedback_loop(chi, gamma, eta, nbar)
    return verify_3db_certificate(loop).margin


def stability_frontier(
    chi: float,
    gamma: float,
    topology: FeedbackTopology,
    nbar: float = 1.0,
    trials: int = 200,
    seed: int = 0,
) -> float:
    """Empirical most-negative drift eigenvalue over random stable loops.

    Samples interferometers for the given topology around the squeezing drive
    of strength chi, checks that every loop's slowest eigenvalue stays above
    its own 2 beta floor, and returns the smallest real part seen.
    """
    h_s = squeezing_hamiltonian(chi)
    worst = None
    for index in range(trials):
        rng = _trial_rng(seed, index)
        z = random_passive(topology.loop_modes, rng)
        loop = build_feedback(topology, z, h_s, nbar)
        if not loop.stable:
            continue
        real_parts = np.linalg.eigvals(loop.drift).real
        slowest = float(real_parts.min())
        floor = 2.0 * loop.beta
        if slowest <= floor - 1e-10 * max(1.0, abs(floor)):
            raise RuntimeError(
                f"drift eigenvalue {slowest:.6g} below the 2 beta floor {floor:.6g}"
            )
        worst = slowest if worst is None else min(worst, slowest)
    if worst is None:
        raise InconclusiveSearchError(f"no stable loops in {trials} trials")
    return worst


@dataclass(frozen=True)
class SweepRecord:
    """One grid point of the regime comparison; None marks absent (unstable) values."""

    chi: float
    gamma: float
    nbar: float
    zeta: float
    eta: Optional[float]
    sigma11_none: Optional[float]
    sigma11_simple_cf: Optional[float]
    sigma11_general_cf: Optional[float]
    sigma11_homodyne: Optional[float]
    threshold: Optional[float]
    winner: str
    stable: bool


def regime_comparison_sweep(
    chi_values, gamma: float, zeta_values, nbar_values, cf_margin: float = 1e-4
) -> list:
    """Compare no-control, optimal simple feedback, and homodyne over a grid.

    The winner is "homodyne" where the conditional variance beats nbar/2 (the
    supremum of every stable passive loop) and "coherent_feedback" otherwise.
    Grid points outside the stability domain produce absent records.
    """
    records = []
    gamma = float(gamma)
    for nbar in map(float, nbar_values):
        for chi in map(float, chi_values):
            for zeta in map(float, zeta_values):
                if not 0.0 < chi < gamma:
                    records.append(
                        SweepRecord(
                            chi=float(chi),
                            gamma=float(gamma),
                            nbar=float(nbar),
                            zeta=float(zeta),
                            eta=None,
                            sigma11_none=None,
                            sigma11_simple_cf=None,
                            sigma11_general_cf=None,
                            sigma11_homodyne=None,
                            threshold=None,
                            winner="",
                            stable=False,
                        )
                    )
                    continue
                eta = optimal_eta(chi, gamma, cf_margin)
                homodyne = homodyne_closed_form(chi, gamma, zeta, nbar).sigma11
                records.append(
                    SweepRecord(
                        chi=chi,
                        gamma=gamma,
                        nbar=nbar,
                        zeta=zeta,
                        eta=eta,
                        sigma11_none=no_control_squeezing(chi, gamma, nbar),
                        sigma11_simple_cf=simple_loop_closed_form(chi, gamma, eta, nbar),
                        sigma11_general_cf=None,
                        sigma11_homodyne=homodyne,
                        threshold=efficiency_threshold(chi, gamma, nbar),
                        winner="homodyne" if homodyne < nbar / 2.0 else "coherent_feedback",
                        stable=True,
                    )
                )
    return records


SWEEP_CSV_HEADER = (
    "chi",
    "gamma",
    "nbar",
    "zeta",
    "eta",
    "sigma11_none",
    "sigma11_cf",
    "sigma11_hd",
    "winner",
    "stable",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_sweep_csv(records, fileobj) -> None:
    """Write sweep records under the fixed header; floats use shortest round-trip form."""
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for r in records:
        writer.writerow(
            [
                _cell(r.chi),
                _cell(r.gamma),
                _cell(r.nbar),
                _cell(r.zeta),
                _cell(r.eta),
                _cell(r.sigma11_none),
                _cell(r.sigma11_simple_cf),
                _cell(r.sigma11_homodyne),
                r.winner,
                _cell(r.stable),
            ]
        )


def sweep_records_json(records) -> list:
    """All sweep record fields (including general_cf and threshold) as plain dicts."""
    return [
        {
            "chi": r.chi,
            "gamma": r.gamma,
            "nbar": r.nbar,
            "zeta": r.zeta,
            "eta": r.eta,
            "sigma11_none": r.sigma11_none,
            "sigma11_simple_cf": r.sigma11_simple_cf,
            "sigma11_general_cf": r.sigma11_general_cf,
            "sigma11_homodyne": r.sigma11_homodyne,
            "threshold": r.threshold,
            "winner": r.winner,
            "stable": r.stable,
        }
        for r in records
    ]


def write_sweep_json(records, fileobj) -> None:
    json.dump(sweep_records_json(records), fileobj, indent=2, sort_keys=True)
    fileobj.write("\n")
