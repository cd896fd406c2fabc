"""Small numerical helpers used across modules."""

from __future__ import annotations

from typing import Callable

import numpy as np

#: default relative step for frequency derivatives
DEFAULT_REL_STEP = 1e-6


def richardson_central(fn: Callable[[float], np.ndarray | float],
                       x0: float,
                       h: float):
    """Central difference with one Richardson extrapolation level.

    D(h) = [f(x0+h) - f(x0-h)] / 2h; returns (4 D(h/2) - D(h)) / 3,
    accurate to O(h^4). ``fn`` may return scalars or arrays.
    """
    d1 = (fn(x0 + h) - fn(x0 - h)) / (2.0 * h)
    d2 = (fn(x0 + 0.5 * h) - fn(x0 - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0
