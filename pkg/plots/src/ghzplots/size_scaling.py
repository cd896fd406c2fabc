"""Probe-size scaling panels with footer-fit overlays.

Each panel plots one column of a size sweep against n on log-log axes and
overlays the power law recorded in the corresponding ``# fit`` footer.
A footer that was skipped (too few points) drops the overlay; a footer
that is absent altogether is a schema mismatch.
"""

from __future__ import annotations

import numpy as np

from .schema import SchemaError, Table


def _fit_for(table: Table, name: str):
    if name in table.fits:
        return table.fits[name]
    if name in table.skipped_fits:
        return None
    raise SchemaError(f"fit footer {name!r} missing; re-run the size sweep "
                      "or pass a file produced by it")


def _overlay(ax, fit) -> None:
    # exp(intercept) * n^exponent across the fitted range, verbatim from
    # the footer: the renderer never refits
    xs = np.geomspace(fit.n_min, fit.n_max, 64)
    ys = np.exp(fit.intercept) * xs ** fit.exponent
    ax.plot(xs, ys, "--", color="0.35", linewidth=1.2,
            label=f"fit: slope {fit.exponent:.3f} (r$^2$={fit.r_squared:.4f})")


def draw_tstar(table: Table, ax) -> None:
    n = table.column("n")
    omega = float(table.config.get("omega", 1.0))
    ax.plot(n, omega * table.column("t_star_energy"), "o", color="k",
            markersize=4, label=r"$\omega\, t_\star$ (energy objective)")
    fit = _fit_for(table, "omega_t_star_energy")
    if fit is not None:
        _overlay(ax, fit)
    ax.set_xlabel("probe size n")
    ax.set_ylabel(r"$\omega\, t_\star$")
    ax.legend(loc="best")


def draw_eta_time(table: Table, ax) -> None:
    n = table.column("n")
    eta = table.column("eta_time")
    ax.plot(n, eta, "o", color="k", markersize=4, label="time efficiency")
    fit = _fit_for(table, "eta_time")
    if fit is not None:
        _overlay(ax, fit)
    # super-extensive reference: slope-3/2 guide anchored below the data
    xs = np.geomspace(n.min(), n.max(), 32)
    ys = 0.6 * eta[0] * (xs / n[0]) ** 1.5
    ax.plot(xs, ys, ":", color="0.55", linewidth=1.0, label="slope 3/2 guide")
    ax.set_xlabel("probe size n")
    ax.set_ylabel(r"$\eta_T$ at the optimal time")
    ax.legend(loc="best")


def draw_eta_energy(table: Table, ax) -> None:
    n = table.column("n")
    ax.plot(n, table.column("eta_energy"), "o", color="k", markersize=4,
            label="energy efficiency")
    fit = _fit_for(table, "eta_energy")
    if fit is not None:
        _overlay(ax, fit)
    ax.set_xlabel("probe size n")
    ax.set_ylabel(r"$\eta_E$ at the optimal time")
    ax.legend(loc="best")
