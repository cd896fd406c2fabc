"""Fisher-information sweep panel: four curves over the readout angle."""

from __future__ import annotations

from .schema import Table

_SERIES = [
    ("cfi_exact", "readout information (full derivative)", "k-"),
    ("cfi_small_R", "readout information (frozen)", "0.5"),
    ("qfi_exact", "quantum bound (full derivative)", "k--"),
    ("qfi_small_R", "quantum bound (frozen)", "0.6"),
]


def draw(table: Table, ax) -> None:
    zeta2 = table.column("zeta2")
    for name, label, style in _SERIES:
        values = table.column(name)
        if style in ("0.5", "0.6"):
            ax.plot(zeta2, values, color=style, linestyle=":" if name ==
                    "qfi_small_R" else "-", label=label)
        else:
            ax.plot(zeta2, values, style, label=label)
    ax.set_xlabel(r"readout angle $\zeta_2$ (rad)")
    ax.set_ylabel("Fisher information")
    ax.legend(loc="best")
