"""Reference numpy implementations of the grid kernels."""

import numpy as np


def simpson(y, h):
    """Composite Simpson rule on equally spaced samples (odd count >= 3)."""
    y = np.asarray(y, dtype=float)
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-1:2])))


def trapezoid(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.sum(np.diff(x) * (y[:-1] + y[1:])) / 2.0)


def _cells(x, y, ym):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.diff(x) / 6.0 * (y[:-1] + 4.0 * np.asarray(ym, dtype=float) + y[1:])


def cellwise_simpson(x, y, ym):
    """Sum of one-panel Simpson rules over the cells of ``x`` (midpoint values ``ym``)."""
    return float(np.sum(_cells(x, y, ym)))


def cumulative_simpson(x, y, ym):
    out = np.empty(len(x))
    out[0] = 0.0
    np.cumsum(_cells(x, y, ym), out=out[1:])
    return out


def rs_sum(p, f):
    """Riemann-Stieltjes sum of tags ``p`` against the increments of ``f``."""
    return float(np.sum(np.asarray(p, dtype=float) * np.diff(np.asarray(f, dtype=float))))


def variation(y):
    return float(np.sum(np.abs(np.diff(np.asarray(y, dtype=float)))))


def max_slope(x, y):
    return float(np.max(np.abs(np.diff(np.asarray(y, dtype=float)) / np.diff(np.asarray(x, dtype=float)))))
