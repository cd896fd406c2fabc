"""Figure registry and rendering entry point.

Five figure ids are supported, one per panel of the standard report:

    fisher-vs-zeta2   all four Fisher quantities over the readout angle
    tstar-vs-n        optimal interrogation time versus probe size
    etaT-vs-n         time efficiency at its optimum versus probe size
    etaE-vs-n         energy efficiency at its optimum versus probe size
    etaE-vs-lambda    energy efficiency versus inverse memory time

Rendering never recomputes physics: curves are the CSV columns as read,
and the power-law overlays on the scaling panels come verbatim from the
``# fit`` footers the sweep wrote. The renderer is deterministic, so the
same CSV yields byte-identical image files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import fisher_sweep, lambda_sweep, size_scaling
from .schema import SchemaError, Table, read_table

FIGURE_IDS = ("fisher-vs-zeta2", "tstar-vs-n", "etaT-vs-n", "etaE-vs-n",
              "etaE-vs-lambda")

_RC = {
    "figure.figsize": (6.0, 4.2),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 9,
    "savefig.dpi": 150,
}


@dataclass(frozen=True)
class FigureSpec:
    """One rendering request.

    log_x / log_y default to the figure family's natural axes when None.
    """

    figure_id: str
    input_csv: str
    output_image: str
    log_x: bool | None = None
    log_y: bool | None = None


def _draw(spec: FigureSpec, table: Table, ax) -> None:
    if spec.figure_id == "fisher-vs-zeta2":
        fisher_sweep.draw(table, ax)
        default_log = (False, False)
    elif spec.figure_id == "tstar-vs-n":
        size_scaling.draw_tstar(table, ax)
        default_log = (True, True)
    elif spec.figure_id == "etaT-vs-n":
        size_scaling.draw_eta_time(table, ax)
        default_log = (True, True)
    elif spec.figure_id == "etaE-vs-n":
        size_scaling.draw_eta_energy(table, ax)
        default_log = (True, True)
    elif spec.figure_id == "etaE-vs-lambda":
        lambda_sweep.draw(table, ax)
        default_log = (True, False)
    else:
        raise SchemaError(f"unknown figure id {spec.figure_id!r}; "
                          f"known: {', '.join(FIGURE_IDS)}")
    log_x = default_log[0] if spec.log_x is None else spec.log_x
    log_y = default_log[1] if spec.log_y is None else spec.log_y
    if log_x:
        ax.set_xscale("log")
    if log_y:
        ax.set_yscale("log")


def render(spec: FigureSpec):
    """Render one figure to ``spec.output_image``; returns the Figure.

    The table is parsed and validated before any file is touched, so a
    malformed CSV never leaves a partial image behind.
    """
    table = read_table(spec.input_csv)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        try:
            _draw(spec, table, ax)
            fig.tight_layout()
            fig.savefig(spec.output_image, metadata={"Software": "ghzplots"})
        except Exception:
            plt.close(fig)
            raise
    plt.close(fig)
    return fig
