"""Energy efficiency versus the inverse memory time."""

from __future__ import annotations

from .schema import Table


def draw(table: Table, ax) -> None:
    lam = table.column("lambda")
    ax.plot(lam, table.column("eta_energy"), "o-", color="k", markersize=4,
            label="energy efficiency at the optimal time")
    ax.set_xlabel(r"inverse memory time $\lambda$")
    ax.set_ylabel(r"$\eta_E$ at the optimal time")
    ax.legend(loc="best")
