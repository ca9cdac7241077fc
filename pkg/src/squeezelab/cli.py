"""Command-line interface: point reports, regime sweeps, and bound certification.

Parameter precedence is flags > config file > defaults; output is a pure
function of the resolved parameters (no timestamps, no locale dependence).
Exit codes: 0 success, 1 certification/verification failure, 2 usage or
parameter errors.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .dynamics import (
    lyapunov_steady_state,
    diffusion_matrix,
    drift_matrix,
    load_system_config,
    no_control_squeezing,
    squeezing_db,
    squeezing_system,
)
from .errors import ConvergenceError, InconclusiveSearchError, StabilityError
from .feedback import optimal_eta, simple_feedback_loop, simple_loop_closed_form
from .monitoring import (
    efficiency_threshold,
    homodyne_closed_form,
    homodyne_steady_state,
    monitored_stable_squeezing_condition,
)
from .search import (
    SearchConfig,
    bound_search_report,
    probe_near_bound,
    random_bound_search,
    regime_comparison_sweep,
    write_sweep_csv,
    write_sweep_json,
)
from .symplectic import (
    epsilon_sum,
    is_passive,
    random_passive,
    reorder_to_grouped,
    reorder_to_interleaved,
    submatrix_asymmetry,
)

OPTIMAL_ETA_MARGIN = 1e-4


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:steps, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValueError(f"grid must be start:stop:steps with numeric fields, got {text!r}") from exc
    if steps < 1:
        raise ValueError(f"grid needs at least one step, got {steps}")
    return np.linspace(start, stop, steps)


class _Params:
    """Resolved parameters: flag value if given, else config file, else default."""

    def __init__(self, args):
        self.args = args
        self.config = load_system_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key, default=None, cast=float):
        value = getattr(self.args, key, None)
        if value is not None:
            return value
        if key in self.config:
            raw = self.config[key]
            return cast(raw) if cast is not None else raw
        return default

    def require(self, key, cast=float):
        value = self.get(key, None, cast)
        if value is None:
            raise ValueError(f"parameter {key!r} is required (flag --{key.replace('_', '-')} or config)")
        return value

    def grid(self, grid_key, scalar_key, scalar_default):
        text = self.get(grid_key, None, cast=str)
        if text is not None:
            return _parse_grid(text)
        return np.array([self.get(scalar_key, scalar_default)])


def _open_out(params):
    path = params.get("out", None, cast=str)
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_point(args) -> int:
    """Report sigma11, dB, and stability for every regime at one parameter point."""
    params = _Params(args)
    chi = params.require("chi")
    gamma = params.get("gamma", 1.0)
    nbar = params.get("nbar", 1.0)
    zeta = params.get("zeta", 1.0)
    eta = params.get("eta", None)
    sigma_none = no_control_squeezing(chi, gamma, nbar)
    eta_origin = "given"
    if eta is None:
        eta = optimal_eta(chi, gamma, OPTIMAL_ETA_MARGIN)
        eta_origin = "optimal"
    sigma_cf = simple_loop_closed_form(chi, gamma, eta, nbar)
    variances = homodyne_closed_form(chi, gamma, zeta, nbar)
    threshold = efficiency_threshold(chi, gamma, nbar) if 0.0 < chi <= gamma else None
    monitored_ok = monitored_stable_squeezing_condition(chi, gamma, nbar)
    report = {
        "chi": chi,
        "gamma": gamma,
        "nbar": nbar,
        "zeta": zeta,
        "eta": eta,
        "eta_origin": eta_origin,
        "regimes": {
            "none": {"sigma11": sigma_none, "squeezing_db": squeezing_db(sigma_none), "stable": True},
            "coherent_feedback": {
                "sigma11": sigma_cf,
                "squeezing_db": squeezing_db(sigma_cf),
                "stable": True,
            },
            "homodyne": {
                "sigma11": variances.sigma11,
                "sigma22": variances.sigma22,
                "squeezing_db": squeezing_db(variances.sigma11),
                "stable": True,
            },
        },
        "efficiency_threshold": threshold,
        "monitored_stable_squeezing": monitored_ok,
    }
    out, close = _open_out(params)
    try:
        if params.get("format", "text", cast=str) == "json":
            json.dump(report, out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            out.write(f"chi={chi:g} gamma={gamma:g} nbar={nbar:g} zeta={zeta:g} "
                      f"eta={eta:.12g} ({eta_origin})\n")
            out.write(f"{'regime':<20}{'sigma11':>20}{'squeezing_db':>16}{'stable':>8}\n")
            for name in ("none", "coherent_feedback", "homodyne"):
                row = report["regimes"][name]
                out.write(
                    f"{name:<20}{row['sigma11']:>20.12f}{row['squeezing_db']:>16.4f}"
                    f"{'yes' if row['stable'] else 'no':>8}\n"
                )
            thr = "none" if threshold is None else f"{threshold:.12g}"
            out.write(f"efficiency_threshold: {thr}\n")
            out.write(f"monitored_stable_squeezing: {'yes' if monitored_ok else 'no'}\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_sweep(args) -> int:
    """Grid sweep of all regimes, written as CSV (fixed header) or JSON."""
    params = _Params(args)
    gamma = params.get("gamma", 1.0)
    chis = params.grid("grid_chi", "chi", 0.5)
    zetas = params.grid("grid_zeta", "zeta", 1.0)
    nbars = params.grid("grid_nbar", "nbar", 1.0)
    records = regime_comparison_sweep(chis, gamma, zetas, nbars)
    fmt = params.get("format", "csv", cast=str)
    out, close = _open_out(params)
    try:
        if fmt == "json":
            write_sweep_json(records, out)
        else:
            write_sweep_csv(records, out)
    finally:
        if close:
            out.close()
    return 0


def cmd_bound_search(args) -> int:
    """Random certification campaign; exit 1 if any stable loop beats nbar/2."""
    params = _Params(args)
    config = SearchConfig(
        trials=int(params.get("trials", 1000, cast=int)),
        seed=int(params.get("seed", 0, cast=int)),
        l_max=int(params.get("l_max", 3, cast=int)),
        m_max=int(params.get("m_max", 3, cast=int)),
        n_anc_max=int(params.get("n_anc_max", 3, cast=int)),
        hamiltonian_scale=params.get("hamiltonian_scale", 5.0),
        nbar=params.get("nbar", 1.0),
        gamma=params.get("gamma", 1.0),
    )

    def progress(done, total):
        if done % max(1, total // 10) == 0 or done == total:
            print(f"trial {done}/{total}", file=sys.stderr)

    result = random_bound_search(config, progress=progress)
    report = bound_search_report(result)
    out, close = _open_out(params)
    try:
        json.dump(report, out, indent=2, sort_keys=True)
        out.write("\n")
    finally:
        if close:
            out.close()
    print(
        f"stable={result.stable_count} unstable={result.unstable_count} "
        f"violations={result.violations} min_margin={result.min_margin:.6g}",
        file=sys.stderr,
    )
    return 1 if result.violations else 0


def cmd_compare(args) -> int:
    """Text comparison table over a chi grid at fixed zeta and nbar."""
    params = _Params(args)
    gamma = params.get("gamma", 1.0)
    chis = params.grid("grid_chi", "chi", 0.5)
    zeta = params.get("zeta", 1.0)
    nbar = params.get("nbar", 1.0)
    records = regime_comparison_sweep(chis, gamma, [zeta], [nbar])
    out, close = _open_out(params)
    try:
        out.write(f"gamma={gamma:g} zeta={zeta:g} nbar={nbar:g}\n")
        out.write(
            f"{'chi':>10}{'sigma11_none':>16}{'sigma11_cf':>16}{'sigma11_hd':>16}"
            f"{'threshold':>12}{'winner':>20}\n"
        )
        for r in records:
            if not r.stable:
                out.write(f"{r.chi:>10.4f}{'-':>16}{'-':>16}{'-':>16}{'-':>12}{'unstable':>20}\n")
                continue
            thr = "-" if r.threshold is None else f"{r.threshold:.4f}"
            out.write(
                f"{r.chi:>10.4f}{r.sigma11_none:>16.6f}{r.sigma11_simple_cf:>16.6f}"
                f"{r.sigma11_homodyne:>16.6f}{thr:>12}{r.winner:>20}\n"
            )
    finally:
        if close:
            out.close()
    return 0


def _verify_checks(trials: int, seed: int):
    rng = np.random.default_rng(seed)

    def passive_samples():
        for _ in range(50):
            modes = int(rng.integers(1, 5))
            z = random_passive(modes, rng)
            assert is_passive(z.matrix, 1e-12)
            assert submatrix_asymmetry(z) < 1e-12
            e = z.matrix[: 2 * modes, : 2 * modes]
            assert abs(epsilon_sum(e) - e[1::2, 1::2].sum()) < 1e-12

    def ordering_round_trip():
        for n in (1, 2, 3, 4):
            m = rng.standard_normal((2 * n, 2 * n))
            assert np.allclose(reorder_to_grouped(reorder_to_interleaved(m)), m, atol=0, rtol=0)

    def no_control_vs_solver():
        for chi in np.linspace(0.1, 0.9, 9):
            for nbar in (1.0, 2.0, 5.0):
                system = squeezing_system(chi, 1.0, nbar)
                sigma = lyapunov_steady_state(drift_matrix(system), diffusion_matrix(system))
                assert abs(sigma.matrix[0, 0] - no_control_squeezing(chi, 1.0, nbar)) < 1e-10

    def feedback_vs_closed_form():
        from .feedback import steady_state

        for chi in np.linspace(0.1, 0.9, 5):
            for eta in (0.0, 0.3, 0.6):
                try:
                    expected = simple_loop_closed_form(chi, 1.0, eta)
                except StabilityError:
                    continue
                loop = simple_feedback_loop(chi, 1.0, eta)
                assert loop.stable
                assert abs(steady_state(loop).matrix[0, 0] - expected) < 1e-10

    def near_bound_probe():
        margin = probe_near_bound(0.5, 1.0, 1.0, 1e-3)
        assert 0.0 < margin < 1e-2

    def homodyne_riccati_vs_closed_form():
        for chi in (0.3, 0.6, 0.9):
            for zeta in (0.4, 1.0):
                expected = homodyne_closed_form(chi, 1.0, zeta).sigma11
                got = homodyne_steady_state(chi, 1.0, zeta).sigma.matrix[0, 0]
                assert abs(got - expected) < 1e-6

    def threshold_partition():
        for _ in range(200):
            chi = float(rng.uniform(0.501, 0.999))
            zeta = float(rng.uniform(0.01, 1.0))
            nbar = float(rng.uniform(1.0, 5.0))
            star = efficiency_threshold(chi, 1.0, nbar)
            assert star is not None
            if abs(zeta - star) <= 1e-9:
                continue
            squeezed = homodyne_closed_form(chi, 1.0, zeta, nbar).sigma11 < nbar / 2.0
            assert squeezed == (zeta > star)

    def bound_search():
        result = random_bound_search(SearchConfig(trials=trials, seed=seed))
        assert result.violations == 0
        assert result.min_margin > 0.0

    return [
        ("passive_samples", passive_samples),
        ("ordering_round_trip", ordering_round_trip),
        ("no_control_vs_solver", no_control_vs_solver),
        ("feedback_vs_closed_form", feedback_vs_closed_form),
        ("near_bound_probe", near_bound_probe),
        ("homodyne_riccati_vs_closed_form", homodyne_riccati_vs_closed_form),
        ("threshold_partition", threshold_partition),
        ("bound_search", bound_search),
    ]


def cmd_verify(args) -> int:
    """Run the self-check battery; one PASS/FAIL line per check."""
    params = _Params(args)
    trials = int(params.get("trials", 500, cast=int))
    seed = int(params.get("seed", 0, cast=int))
    failures = 0
    for name, check in _verify_checks(trials, seed):
        try:
            check()
        except Exception as exc:  # report and continue; exit code carries the verdict
            failures += 1
            print(f"{name}: FAIL ({exc})")
            continue
        print(f"{name}: PASS")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squeezelab",
        description="Steady-state squeezing workbench: feedback synthesis, monitoring, certification.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value parameter file")
    common.add_argument("--chi", type=float, help="squeezing drive strength")
    common.add_argument("--gamma", type=float, help="per-port coupling rate (default 1)")
    common.add_argument("--nbar", type=float, help="thermal input parameter 2N+1 (default 1)")
    common.add_argument("--zeta", type=float, help="homodyne detector efficiency (default 1)")
    common.add_argument("--eta", type=float, help="feedback beam-splitter transmissivity")
    common.add_argument("--trials", type=int, help="randomized campaign size")
    common.add_argument("--seed", type=int, help="campaign seed (default 0)")
    common.add_argument("--grid-chi", dest="grid_chi", metavar="a:b:n", help="chi grid start:stop:steps")
    common.add_argument("--grid-zeta", dest="grid_zeta", metavar="a:b:n", help="zeta grid start:stop:steps")
    common.add_argument("--grid-nbar", dest="grid_nbar", metavar="a:b:n", help="nbar grid start:stop:steps")
    common.add_argument("--format", choices=("csv", "json", "text"), help="output format")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--l-max", dest="l_max", type=int, help="max monitored ports in search")
    common.add_argument("--m-max", dest="m_max", type=int, help="max fed-back ports in search")
    common.add_argument("--n-anc-max", dest="n_anc_max", type=int, help="max ancilla modes in search")
    common.add_argument(
        "--hamiltonian-scale",
        dest="hamiltonian_scale",
        type=float,
        help="uniform Hamiltonian entry range in units of gamma (default 5)",
    )
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("point", parents=[common], help="single-point regime report").set_defaults(
        func=cmd_point
    )
    sub.add_parser("sweep", parents=[common], help="regime sweep to CSV/JSON").set_defaults(
        func=cmd_sweep
    )
    sub.add_parser(
        "bound-search", parents=[common], help="random certification of the nbar/2 floor"
    ).set_defaults(func=cmd_bound_search)
    sub.add_parser("compare", parents=[common], help="regime comparison table").set_defaults(
        func=cmd_compare
    )
    sub.add_parser("verify", parents=[common], help="self-check battery").set_defaults(
        func=cmd_verify
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValueError, OSError, StabilityError, ConvergenceError, InconclusiveSearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
