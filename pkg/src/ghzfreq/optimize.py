"""Efficiency functionals and interrogation-time optimization.

Two figures of merit are maximised over the free-evolution time:

    eta_time   = F / t                      (time is the scarce resource)
    eta_energy = F / (e_init + e_meas)      (energy is the scarce resource)

where F is the Fisher information of a single round at the parity-optimal
measurement setting. The search is a deterministic global grid over a log
spaced time axis followed by golden-section refinement; the objective can
oscillate, so a single local search is never used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import energetics, metrology
from .channel import NoiseParams
from .energetics import EnergyLedger
from .errors import (ConvergenceError, DomainError, InsufficientBudgetError,
                     UndefinedEfficiencyError)

FISHER_SMALL_R = "small_r"
FISHER_EXACT = "exact"

OBJECTIVE_TIME = "eta_time"
OBJECTIVE_ENERGY = "eta_energy"

#: points in the coarse global grid
GRID_POINTS = 200
#: span of the log grid below t_max
GRID_SPAN = 1e6
#: relative tolerance of the golden-section refinement
REFINE_TOL = 1e-8
#: refinement iteration cap
MAX_REFINE_STEPS = 500
#: grid maxima within this relative band tie-break to the smallest t
TIE_TOL = 1e-10

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EfficiencyPoint:
    """Efficiencies of one (probe size, interrogation time) pair."""

    n: int
    t: float
    fisher: float
    fisher_mode: str
    eta_time: float
    eta_energy: float


@dataclass(frozen=True)
class OptimalTime:
    """Result of the global interrogation-time search."""

    t_star: float
    objective: str
    value: float
    bracket: tuple
    converged: bool


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares power law log(value) = exponent * log(n) + intercept."""

    exponent: float
    intercept: float
    r_squared: float
    n_range: tuple


class RoundsBound(NamedTuple):
    rounds: int
    delta_omega: float


def fisher_value(params: NoiseParams, n: int, t: float,
                 fisher_mode: str = FISHER_SMALL_R) -> float:
    """Fisher information at the parity-optimal setting with omega_bar = omega.

    ``small_r`` uses the frozen-convention quantum value (cheap, O(n));
    ``exact`` the finite-difference classical value of the actual readout.
    """
    if fisher_mode == FISHER_SMALL_R:
        return metrology.qfi_small_r(params, n, t)
    if fisher_mode == FISHER_EXACT:
        setting = metrology.optimal_setting(n, params.omega, t)
        return metrology.cfi(params, n, t, setting,
                             metrology.MODE_FINITE_DIFFERENCE)
    raise DomainError(f"unknown fisher mode {fisher_mode!r}")


def _round_ledger(params: NoiseParams, n: int, t: float) -> EnergyLedger:
    setting = metrology.optimal_setting(n, params.omega, t)
    return energetics.ledger(params, n, t, setting)


def eta_energy(params: NoiseParams, n: int, t: float,
               fisher_mode: str = FISHER_SMALL_R) -> float:
    """Fisher information per unit energy spent in one round."""
    if t <= 0.0:
        raise DomainError(f"interrogation time must be positive, got {t!r}")
    cost = _round_ledger(params, n, t).cost_per_round
    if cost <= 0.0:
        raise UndefinedEfficiencyError(
            f"per-round cost {cost!r} is not positive; efficiency undefined")
    return fisher_value(params, n, t, fisher_mode) / cost


def eta_time(params: NoiseParams, n: int, t: float,
             fisher_mode: str = FISHER_SMALL_R) -> float:
    """Fisher information per unit interrogation time."""
    if t <= 0.0:
        raise DomainError(f"interrogation time must be positive, got {t!r}")
    return fisher_value(params, n, t, fisher_mode) / t


def efficiency_point(params: NoiseParams, n: int, t: float,
                     fisher_mode: str = FISHER_SMALL_R) -> EfficiencyPoint:
    """Evaluate both efficiencies at one (n, t)."""
    fisher = fisher_value(params, n, t, fisher_mode)
    cost = _round_ledger(params, n, t).cost_per_round
    if cost <= 0.0:
        raise UndefinedEfficiencyError(
            f"per-round cost {cost!r} is not positive; efficiency undefined")
    return EfficiencyPoint(n=n, t=t, fisher=fisher, fisher_mode=fisher_mode,
                           eta_time=fisher / t, eta_energy=fisher / cost)


def default_t_max(params: NoiseParams, n: int) -> float:
    """Search horizon 20 / (lam * rate_ratio * max(1, n)).

    lam * rate_ratio is the asymptotic relaxation rate, so the horizon
    covers several relaxation times of the fastest-decaying probe.
    """
    rate = params.lam * params.rate_ratio
    if rate <= 0.0:
        raise DomainError("gamma0 = 0 gives an unbounded search horizon; "
                          "pass t_max explicitly")
    return 20.0 / (rate * max(1, n))


def _golden_refine(fn, lo: float, hi: float):
    """Golden-section maximization on [lo, hi] to REFINE_TOL relative in t."""
    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(MAX_REFINE_STEPS):
        if b - a <= REFINE_TOL * max(abs(a), abs(b)):
            x = 0.5 * (a + b)
            return x, fn(x), True
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = fn(d)
    raise ConvergenceError((a, b),
                           f"golden-section refinement exceeded "
                           f"{MAX_REFINE_STEPS} steps on bracket ({a!r}, {b!r})")


def optimal_time(params: NoiseParams, n: int,
                 objective: str = OBJECTIVE_ENERGY,
                 fisher_mode: str = FISHER_SMALL_R,
                 t_max: float | None = None) -> OptimalTime:
    """Global maximum of the chosen efficiency over t in (0, t_max].

    A 200-point log grid locates the best basin (ties within TIE_TOL
    relative resolve to the smallest t), then golden-section refinement
    polishes it to REFINE_TOL relative. Fully deterministic.
    """
    if n < 1:
        raise DomainError(f"probe size must be >= 1, got {n!r}")
    if objective == OBJECTIVE_TIME:
        fn = lambda t: eta_time(params, n, t, fisher_mode)
    elif objective == OBJECTIVE_ENERGY:
        fn = lambda t: eta_energy(params, n, t, fisher_mode)
    else:
        raise DomainError(f"unknown objective {objective!r}")
    if t_max is None:
        t_max = default_t_max(params, n)
    if t_max <= 0.0:
        raise DomainError(f"t_max must be positive, got {t_max!r}")

    grid = np.exp(np.linspace(math.log(t_max) - math.log(GRID_SPAN),
                              math.log(t_max), GRID_POINTS))
    vals = np.array([fn(t) for t in grid])
    vmax = vals.max()
    if not vmax > 0.0:
        raise UndefinedEfficiencyError("objective vanished on the whole grid")
    best = int(np.flatnonzero(vals >= vmax * (1.0 - TIE_TOL))[0])
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, GRID_POINTS - 1)]
    t_star, value, converged = _golden_refine(fn, lo, hi)
    # the refined endpoint may beat the interior on edge basins
    if vals[best] > value:
        t_star, value = float(grid[best]), float(vals[best])
    return OptimalTime(t_star=float(t_star), objective=objective,
                       value=float(value), bracket=(float(lo), float(hi)),
                       converged=converged)


def joint_optimal(params: NoiseParams, n: int,
                  sweeps: int = 3,
                  t_max: float | None = None):
    """Coordinate-ascent search over (t, zeta1, zeta2) jointly.

    Maximises the exact-readout energy efficiency
    cfi(t, zeta1, zeta2) / (e_init + e_meas(zeta1, zeta2)). The first
    rotation angle is parametrized as an offset from the phase-referenced
    prescription pi/2 - omega*t, so the time sweep stays well conditioned;
    each sweep refreshes t by the global grid search at the current
    angles, then each angle by golden section around its current value.
    Returns (t, MeasurementSetting, value).
    """
    parity_zeta2 = metrology.optimal_setting(n, params.omega, 1.0).zeta2
    offset1, zeta2 = 0.0, parity_zeta2

    def value_at(t: float, off1: float, z2: float) -> float:
        s = metrology.MeasurementSetting(
            zeta1=0.5 * math.pi - params.omega * t + off1, zeta2=z2,
            omega_bar=params.omega)
        led = energetics.ledger(params, n, t, s)
        if led.cost_per_round <= 0.0:
            return 0.0
        fisher = metrology.cfi(params, n, t, s,
                               metrology.MODE_FINITE_DIFFERENCE)
        return fisher / led.cost_per_round

    if t_max is None:
        t_max = default_t_max(params, n)
    grid = np.exp(np.linspace(math.log(t_max) - math.log(GRID_SPAN),
                              math.log(t_max), GRID_POINTS))
    t_cur = float(grid[-1])
    best = 0.0
    for _ in range(sweeps):
        vals = [value_at(t, offset1, zeta2) for t in grid]
        i = int(np.argmax(vals))
        t_cur, best, _ = _golden_refine(
            lambda t: value_at(t, offset1, zeta2),
            grid[max(i - 1, 0)], grid[min(i + 1, GRID_POINTS - 1)])
        for which in (1, 2):
            if which == 1:
                f = lambda z: value_at(t_cur, z, zeta2)
                center = offset1
            else:
                f = lambda z: value_at(t_cur, offset1, z)
                center = zeta2
            zgrid = center + np.linspace(-math.pi, math.pi, 61)
            zvals = [f(z) for z in zgrid]
            j = int(np.argmax(zvals))
            z_best, z_val, _ = _golden_refine(
                f, zgrid[max(j - 1, 0)], zgrid[min(j + 1, 60)])
            if z_val >= best:
                best = z_val
                if which == 1:
                    offset1 = z_best
                else:
                    zeta2 = z_best
    setting = metrology.MeasurementSetting(
        zeta1=0.5 * math.pi - params.omega * t_cur + offset1,
        zeta2=zeta2, omega_bar=params.omega)
    return t_cur, setting, best


def rounds_and_bound(total_energy: float, ledger: EnergyLedger,
                     fisher: float) -> RoundsBound:
    """Affordable rounds and the ensuing frequency-uncertainty bound.

    rounds = floor(total_energy / cost_per_round);
    delta_omega = 1 / sqrt(rounds * fisher). Raises
    InsufficientBudgetError when not even one round fits.
    """
    if total_energy <= 0.0:
        raise DomainError(f"energy budget must be positive, got {total_energy!r}")
    if ledger.cost_per_round <= 0.0:
        raise DomainError("cost per round must be positive")
    if fisher <= 0.0:
        raise DomainError(f"fisher must be positive, got {fisher!r}")
    rounds = int(math.floor(total_energy / ledger.cost_per_round))
    if rounds < 1:
        raise InsufficientBudgetError(
            f"budget {total_energy!r} below one round "
            f"(cost {ledger.cost_per_round!r})")
    return RoundsBound(rounds=rounds,
                       delta_omega=1.0 / math.sqrt(rounds * fisher))


def scaling_fit(points: Iterable[Sequence[float]]) -> ScalingFit:
    """Least-squares line through (log n, log value).

    Needs at least 3 points with positive sizes and values.
    """
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 3:
        raise DomainError(f"need at least 3 points, got {len(pts)}")
    if any(n <= 0.0 or v <= 0.0 for n, v in pts):
        raise DomainError("scaling fit requires positive sizes and values")
    ln = np.log([p[0] for p in pts])
    lv = np.log([p[1] for p in pts])
    design = np.column_stack([ln, np.ones_like(ln)])
    (slope, intercept), *_ = np.linalg.lstsq(design, lv, rcond=None)
    resid = lv - design @ np.array([slope, intercept])
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((lv - lv.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ScalingFit(exponent=float(slope), intercept=float(intercept),
                      r_squared=r_squared,
                      n_range=(min(p[0] for p in pts), max(p[0] for p in pts)))
