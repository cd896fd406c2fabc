"""Command-line front end: sweeps, optimization runs, verification, CSV export.

Every table goes out as comma-separated values with two leading comment
lines: ``# schema=1`` and ``# config=<resolved configuration as JSON>``.
Numbers are printed with 17 significant digits, so files round-trip and
reruns with the same configuration are byte identical. Scaling sweeps
append their fitted power laws as ``# fit`` footer lines.

Exit codes: 0 success, 1 configuration error, 2 I/O error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import energetics, metrology, optimize
from .channel import NoiseParams, channel_at, cp_check, time_local_rates
from .errors import DomainError
from .oracle import run_verification

SCHEMA_LINE = "# schema=1"

DEFAULTS = {
    "omega": 1.0,
    "temp": 200.0,
    "gamma0": 5e-4,
    "lam": 5.0,
    "n": None,
    "n_min": None,
    "n_max": None,
    "n_step": 1,
    "t": 1.0,
    "t_max": None,
    "t_points": 100,
    "zeta2_points": 721,
    "lambda_min": 1.0,
    "lambda_max": 100.0,
    "lambda_points": 30,
    "fisher_mode": "small-r",
    "objective": "energy",
    "out": None,
    "seed": 0,
    "jobs": 1,
}

_FISHER_MODES = {"small-r": optimize.FISHER_SMALL_R,
                 "exact": optimize.FISHER_EXACT}
_OBJECTIVES = {"time": optimize.OBJECTIVE_TIME,
               "energy": optimize.OBJECTIVE_ENERGY}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    """Resolved configuration of one CLI invocation."""

    omega: float
    temp: float
    gamma0: float
    lam: float
    n: int | None
    n_min: int | None
    n_max: int | None
    n_step: int
    t: float
    t_max: float | None
    t_points: int
    zeta2_points: int
    lambda_min: float
    lambda_max: float
    lambda_points: int
    fisher_mode: str
    objective: str
    out: str | None
    seed: int
    jobs: int

    def validate(self) -> "RunConfig":
        if self.omega <= 0 or self.temp <= 0 or self.lam <= 0:
            raise ConfigError("omega, temp and lambda must all be positive")
        if self.gamma0 < 0:
            raise ConfigError("gamma0 must be nonnegative")
        if self.t_points < 1 or self.zeta2_points < 1 or self.lambda_points < 1:
            raise ConfigError("point counts must be positive")
        if self.n is not None and self.n < 1:
            raise ConfigError("n must be >= 1")
        if (self.n_min is None) != (self.n_max is None):
            raise ConfigError("give both --n-min and --n-max or neither")
        if self.n_min is not None:
            if self.n_min < 1 or self.n_max < self.n_min or self.n_step < 1:
                raise ConfigError("invalid n range")
        if self.lambda_min <= 0 or self.lambda_max < self.lambda_min:
            raise ConfigError("invalid lambda range")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.fisher_mode not in _FISHER_MODES:
            raise ConfigError(f"unknown fisher mode {self.fisher_mode!r}")
        if self.objective not in _OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}")
        return self

    def params(self) -> NoiseParams:
        return NoiseParams(omega=self.omega, temperature=self.temp,
                           gamma0=self.gamma0, lam=self.lam)

    def n_values(self, default_n: int = 9,
                 default_range: tuple | None = None) -> list[int]:
        if self.n_min is not None:
            return list(range(self.n_min, self.n_max + 1, self.n_step))
        if self.n is not None:
            return [self.n]
        if default_range is not None:
            lo, hi, step = default_range
            return list(range(lo, hi + 1, step))
        return [default_n]

    def as_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value) + 0.0, ".17g")


def _write_table(config: RunConfig, header: list[str], rows: list[tuple],
                 footers: list[str] | None = None) -> None:
    lines = [SCHEMA_LINE, f"# config={config.as_json()}", ",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    lines.extend(footers or [])
    text = "\n".join(lines) + "\n"
    if config.out is None:
        sys.stdout.write(text)
    else:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fit_footer(name: str, points) -> list[str]:
    usable = [(n, v) for n, v in points if v > 0]
    if len(usable) < 3:
        return [f"# fit {name} skipped=insufficient-points"]
    fit = optimize.scaling_fit(usable)
    return [f"# fit {name} exponent={_fmt(fit.exponent)} "
            f"intercept={_fmt(fit.intercept)} r_squared={_fmt(fit.r_squared)} "
            f"n_min={_fmt(fit.n_range[0])} n_max={_fmt(fit.n_range[1])}"]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_channel(config: RunConfig) -> int:
    params = config.params()
    t_max = config.t_max
    if t_max is None:
        t_max = optimize.default_t_max(params, 1)
    rows = []
    for t in np.linspace(0.0, t_max, config.t_points):
        snap = channel_at(params, float(t))
        rates = time_local_rates(params, float(t))
        rows.append((t, snap.eta_par, snap.eta_perp, snap.kappa,
                     rates.gamma_plus, rates.gamma_minus, rates.gamma_z,
                     cp_check(snap).margin_sum))
    _write_table(config,
                 ["t", "eta_par", "eta_perp", "kappa", "gamma_plus",
                  "gamma_minus", "gamma_z", "cp_margin"], rows)
    return 0


def cmd_fisher(config: RunConfig) -> int:
    params = config.params()
    n, t = (config.n if config.n is not None else 9), config.t
    qfi_small = metrology.qfi_small_r(params, n, t)
    qfi_full = metrology.qfi_exact(params, n, t)
    zeta1 = 0.5 * math.pi - config.omega * t
    rows = []
    for zeta2 in np.linspace(0.0, 2.0 * math.pi, config.zeta2_points):
        setting = metrology.MeasurementSetting(zeta1=zeta1, zeta2=float(zeta2),
                                               omega_bar=config.omega)
        rows.append((zeta2,
                     metrology.cfi(params, n, t, setting,
                                   metrology.MODE_FINITE_DIFFERENCE),
                     metrology.cfi(params, n, t, setting,
                                   metrology.MODE_FROZEN),
                     qfi_full, qfi_small))
    _write_table(config,
                 ["zeta2", "cfi_exact", "cfi_small_R", "qfi_exact",
                  "qfi_small_R"], rows)
    return 0


def _size_row(payload):
    omega, temp, gamma0, lam, n, fisher_mode, t_max = payload
    params = NoiseParams(omega=omega, temperature=temp, gamma0=gamma0, lam=lam)
    opt_time = optimize.optimal_time(params, n, optimize.OBJECTIVE_TIME,
                                     fisher_mode, t_max)
    opt_energy = optimize.optimal_time(params, n, optimize.OBJECTIVE_ENERGY,
                                       fisher_mode, t_max)
    setting = metrology.optimal_setting(n, omega, opt_energy.t_star)
    led = energetics.ledger(params, n, opt_energy.t_star, setting)
    fisher = optimize.fisher_value(params, n, opt_energy.t_star, fisher_mode)
    return (n, opt_time.t_star, opt_time.value, opt_energy.t_star,
            opt_energy.value, led.e_init, led.e_meas, fisher)


def _map_rows(worker, payloads, jobs: int) -> list[tuple]:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, payloads))
    return [worker(p) for p in payloads]


def cmd_scan_size(config: RunConfig) -> int:
    mode = _FISHER_MODES[config.fisher_mode]
    payloads = [(config.omega, config.temp, config.gamma0, config.lam,
                 n, mode, config.t_max)
                for n in config.n_values(default_range=(10, 200, 10))]
    rows = _map_rows(_size_row, payloads, config.jobs)
    footers = []
    footers += _fit_footer("eta_time", [(r[0], r[2]) for r in rows])
    footers += _fit_footer("eta_energy", [(r[0], r[4]) for r in rows])
    footers += _fit_footer("omega_t_star_energy",
                           [(r[0], config.omega * r[3]) for r in rows])
    footers += _fit_footer("omega_t_star_time",
                           [(r[0], config.omega * r[1]) for r in rows])
    _write_table(config,
                 ["n", "t_star_time", "eta_time", "t_star_energy",
                  "eta_energy", "e_init", "e_meas", "fisher"], rows, footers)
    return 0


def _lambda_row(payload):
    omega, temp, gamma0, lam, n, fisher_mode, t_max = payload
    params = NoiseParams(omega=omega, temperature=temp, gamma0=gamma0, lam=lam)
    opt = optimize.optimal_time(params, n, optimize.OBJECTIVE_ENERGY,
                                fisher_mode, t_max)
    return (lam, opt.t_star, opt.value)


def cmd_scan_lambda(config: RunConfig) -> int:
    mode = _FISHER_MODES[config.fisher_mode]
    n = config.n if config.n is not None else 2
    if config.lambda_points == 1:
        grid = np.array([config.lambda_min])
    else:
        grid = np.exp(np.linspace(math.log(config.lambda_min),
                                  math.log(config.lambda_max),
                                  config.lambda_points))
        grid[0], grid[-1] = config.lambda_min, config.lambda_max
    payloads = [(config.omega, config.temp, config.gamma0, float(lam), n,
                 mode, config.t_max) for lam in grid]
    rows = _map_rows(_lambda_row, payloads, config.jobs)
    _write_table(config, ["lambda", "t_star", "eta_energy"], rows)
    return 0


def cmd_optimal_time(config: RunConfig) -> int:
    mode = _FISHER_MODES[config.fisher_mode]
    objective = _OBJECTIVES[config.objective]
    params = config.params()
    rows = []
    for n in config.n_values(default_n=9):
        opt = optimize.optimal_time(params, n, objective, mode, config.t_max)
        rows.append((n, objective, opt.t_star, opt.value, opt.converged))
    _write_table(config, ["n", "objective", "t_star", "value", "converged"],
                 [(r[0], r[1], r[2], r[3], r[4]) for r in rows])
    return 0


def cmd_verify(config: RunConfig, corrupt: str | None = None) -> int:
    sizes = tuple(config.n_values(default_range=(2, 6, 1)))
    if max(sizes) > 6:
        sys.stderr.write(f"verify: probe sizes above 6 are not supported "
                         f"(dense oracle), got {max(sizes)}\n")
        return 1
    report = run_verification(seed=config.seed, sizes=sizes, draws=200,
                              corrupt=corrupt)
    out = sys.stdout
    out.write(f"verification: seed={report.seed} draws={report.draws} "
              f"sizes={list(report.sizes)}\n")
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        out.write(f"[{status}] {check.name}: max deviation "
                  f"{check.max_deviation:.3e} (tolerance {check.tolerance:.0e})\n")
    if not report.passed:
        out.write("verification FAILED\n")
        return 3
    out.write("verification passed\n")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--omega", type=float, help="atomic frequency")
    parser.add_argument("--temp", type=float, help="bath temperature")
    parser.add_argument("--gamma0", type=float, help="bare decay rate")
    parser.add_argument("--lambda", dest="lam", type=float,
                        help="inverse bath memory time")
    parser.add_argument("--n", type=int, help="probe size")
    parser.add_argument("--n-min", type=int, help="probe-size sweep start")
    parser.add_argument("--n-max", type=int, help="probe-size sweep end")
    parser.add_argument("--n-step", type=int, help="probe-size sweep step")
    parser.add_argument("--t", type=float, help="interrogation time")
    parser.add_argument("--t-max", type=float, help="time-search horizon")
    parser.add_argument("--t-points", type=int, help="time-grid points")
    parser.add_argument("--zeta2-points", type=int,
                        help="points of the zeta2 sweep")
    parser.add_argument("--lambda-min", type=float, help="lambda sweep start")
    parser.add_argument("--lambda-max", type=float, help="lambda sweep end")
    parser.add_argument("--lambda-points", type=int,
                        help="points of the lambda sweep")
    parser.add_argument("--fisher-mode", choices=sorted(_FISHER_MODES),
                        help="Fisher information flavor")
    parser.add_argument("--objective", choices=sorted(_OBJECTIVES),
                        help="efficiency to maximise")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--config", help="JSON file with defaults")
    parser.add_argument("--seed", type=int, help="seed for randomized checks")
    parser.add_argument("--jobs", type=int, help="parallel sweep workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzfreq",
        description="Energy-resolved frequency estimation with entangled "
                    "thermal probes under memory-kernel dissipation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("channel", "dump channel damping factors and time-local rates"),
        ("fisher", "sweep Fisher information over the readout angle"),
        ("scan-size", "optimal times and efficiencies versus probe size"),
        ("scan-lambda", "energy efficiency versus inverse memory time"),
        ("optimal-time", "interrogation-time optimum for given sizes"),
        ("verify", "run the dense-oracle verification suite"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "verify":
            p.add_argument("--inject-coherence-sign-flip", action="store_true",
                           help=argparse.SUPPRESS)
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in loaded.items():
            norm = key.replace("-", "_")
            if norm == "lambda":
                norm = "lam"
            if norm not in merged:
                raise ConfigError(f"unknown config key {key!r}")
            merged[norm] = value
    for key in merged:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    try:
        return RunConfig(**merged).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 1

    handlers = {
        "channel": cmd_channel,
        "fisher": cmd_fisher,
        "scan-size": cmd_scan_size,
        "scan-lambda": cmd_scan_lambda,
        "optimal-time": cmd_optimal_time,
    }
    try:
        if args.command == "verify":
            corrupt = ("flip_coherence_sign"
                       if getattr(args, "inject_coherence_sign_flip", False)
                       else None)
            return cmd_verify(config, corrupt)
        return handlers[args.command](config)
    except (DomainError, ConfigError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
