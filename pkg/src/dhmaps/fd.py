"""Central finite differences and convergence-order fitting."""

import numpy as np

DEFAULT_STEP = 1e-4


def partial(f, x, axis, h=DEFAULT_STEP):
    """Central difference of ``f`` along coordinate ``axis`` at ``x``."""
    x = np.asarray(x, dtype=float)
    dx = np.zeros_like(x)
    dx[axis] = h
    return (np.asarray(f(x + dx)) - np.asarray(f(x - dx))) / (2 * h)


def gradient(f, x, h=DEFAULT_STEP):
    """Stack of partial derivatives, shape ``(dim,) + f(x).shape``."""
    x = np.asarray(x, dtype=float)
    return np.stack([partial(f, x, a, h) for a in range(x.size)])


def second_partial(f, x, axis, h=DEFAULT_STEP):
    x = np.asarray(x, dtype=float)
    dx = np.zeros_like(x)
    dx[axis] = h
    return (np.asarray(f(x + dx)) - 2 * np.asarray(f(x)) + np.asarray(f(x - dx))) / h**2


def mixed_partial(f, x, a, b, h=DEFAULT_STEP):
    if a == b:
        return second_partial(f, x, a, h)
    x = np.asarray(x, dtype=float)
    da = np.zeros_like(x)
    db = np.zeros_like(x)
    da[a] = h
    db[b] = h
    return (
        np.asarray(f(x + da + db))
        - np.asarray(f(x + da - db))
        - np.asarray(f(x - da + db))
        + np.asarray(f(x - da - db))
    ) / (4 * h**2)


def fitted_order(steps, errors):
    """Least-squares slope of log(error) against log(step)."""
    steps = np.asarray(steps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if steps.size < 2:
        raise ValueError("need at least two steps to fit an order")
    slope, _ = np.polyfit(np.log(steps), np.log(errors), 1)
    return float(slope)
