"""Centered B-spline kernels of arbitrary order.

The kernel of order ``n`` is the (n+1)-fold convolution of the centered
unit box with itself.  It is evaluated here by the Cox-de Boor recurrence
on integer knots, which gives the exact piecewise-polynomial values
without any quadrature error.  The kernel is supported on
``[-(n+1)/2, (n+1)/2]`` and its integer shifts form a partition of unity.
"""

import numpy as np

MAX_ORDER = 9


def half_support(order):
    """Half width of the order-``order`` kernel support."""
    _check_order(order)
    return (order + 1) / 2.0


def bspline_eval(order, x):
    """Evaluate the centered B-spline kernel of the given order.

    Parameters
    ----------
    order : int
        Spline order, between 0 and ``MAX_ORDER``.
    x : float or array_like
        Evaluation points.

    Returns
    -------
    float or ndarray
        Kernel values, matching the shape of ``x``.  For ``order == 0``
        the jump points ``|x| == 1/2`` evaluate to the half value 0.5;
        for ``order >= 1`` support endpoints evaluate to the limit 0.
    """
    _check_order(order)
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    t = np.atleast_1d(x) + (order + 1) / 2.0

    if order == 0:
        out = np.where((t > 0.0) & (t < 1.0), 1.0, 0.0)
        out = np.where((t == 0.0) | (t == 1.0), 0.5, out)
        return float(out[0]) if scalar else out.reshape(x.shape)

    # De Boor triangle over knots 0 .. order+1, in place over the
    # indicator row; ascending i only reads entries not yet overwritten.
    cols = [np.where((t >= i) & (t < i + 1), 1.0, 0.0) for i in range(order + 1)]
    for p in range(1, order + 1):
        for i in range(order + 1 - p):
            cols[i] = ((t - i) / p) * cols[i] + ((i + p + 1 - t) / p) * cols[i + 1]
    out = cols[0]
    return float(out[0]) if scalar else out.reshape(x.shape)


def delta_neighborhood(order, x, step=1.0):
    """Sample indices whose order-``order`` kernel support covers ``x``.

    Returns the ascending integers ``k`` with ``|x/step - k| < (order+1)/2``
    (strict inequality, so points exactly at a support endpoint are
    excluded).
    """
    _check_order(order)
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    u = float(x) / float(step)
    delta = (order + 1) / 2.0
    base = int(np.floor(u - delta)) + 1
    ks = base + np.arange(order + 1)
    return ks[np.abs(u - ks) < delta]


def neighbor_window(order, u):
    """Candidate neighbor indices for an array of lattice coordinates.

    For each ``u`` the window ``base + 0 .. base + order`` contains every
    integer ``k`` with ``|u - k| < (order+1)/2``; entries at exactly the
    support boundary may slip in and must be masked by the caller where
    a strict neighborhood is required (the kernel itself vanishes there
    for ``order >= 1``).
    """
    delta = (order + 1) / 2.0
    base = np.floor(u - delta).astype(np.int64) + 1
    return base[..., None] + np.arange(order + 1)


def window_values(order, u):
    """Kernel values of every window neighbor in one triangular pass.

    Returns ``(indices, values)`` where ``values[p, c]`` is the order-
    ``order`` kernel of neighbor ``indices[p, c]`` evaluated at ``u[p]``.
    All neighbors share the fractional offset of ``u``, so the classic
    all-nonzero-values recurrence yields the entire row at once; it
    reproduces the limit conventions of :func:`bspline_eval` everywhere
    except the order-0 jump points, which callers mask out.
    """
    delta = (order + 1) / 2.0
    shifted = u - delta
    base = np.floor(shifted).astype(np.int64) + 1
    indices = base[:, None] + np.arange(order + 1)
    frac = shifted - np.floor(shifted)
    values = np.zeros((len(u), order + 1))
    values[:, 0] = 1.0
    for p in range(1, order + 1):
        values[:, p] = (frac / p) * values[:, p - 1]
        for r in range(p - 1, 0, -1):
            values[:, r] = ((frac + p - r) / p) * values[:, r - 1] \
                + ((r + 1 - frac) / p) * values[:, r]
        values[:, 0] *= (1.0 - frac) / p
    return indices, values


def _check_order(order):
    if not isinstance(order, (int, np.integer)) or isinstance(order, bool):
        raise ValueError(f"order must be an integer, got {order!r}")
    if order < 0 or order > MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
