"""Derivative and integral oracles that never look at a jet's derivative slots."""

import numpy as np


def _richardson(d, h):
    return (4.0 * d(h / 2) - d(h)) / 3.0


def fd_jet(value, p, h=1e-2):
    """Value and partials by Richardson-extrapolated central differences.

    ``value`` maps a point (tuple of coordinates) to a number.  Returns
    ``(v, grad, hess)`` with ``hess[i][j]`` the full matrix.
    """
    p = np.asarray(p, dtype=float)
    n = len(p)
    e = np.eye(n)

    def f(q):
        return float(value(tuple(q)))

    v = f(p)
    grad = [_richardson(lambda s: (f(p + s * e[i]) - f(p - s * e[i])) / (2 * s), h) for i in range(n)]
    hess = [[0.0] * n for _ in range(n)]
    for i in range(n):
        hess[i][i] = _richardson(lambda s: (f(p + s * e[i]) - 2 * v + f(p - s * e[i])) / (s * s), h)
        for j in range(i + 1, n):
            def mixed(s):
                return (
                    f(p + s * e[i] + s * e[j])
                    - f(p + s * e[i] - s * e[j])
                    - f(p - s * e[i] + s * e[j])
                    + f(p - s * e[i] - s * e[j])
                ) / (4 * s * s)

            hess[i][j] = hess[j][i] = _richardson(mixed, h)
    return v, grad, hess


def simpson(fn, a, b, n=2000):
    """Composite Simpson on [a, b] (n even) for a vectorized ``fn``."""
    x = np.linspace(a, b, n + 1)
    y = fn(x)
    hstep = (b - a) / n
    return hstep / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
