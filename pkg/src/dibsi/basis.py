"""Shift-variant, domain-informed B-spline generating bases.

Each sample index ``k`` carries its own kernel: a dominant part, the
standard kernel gated by the subdomain functions that dominate at the
sample position, plus a residual part that redistributes whatever the
dominant parts of the neighborhood leave uncovered.  The redistribution
weights are shaped by a logistic function so that the family keeps the
partition of unity exactly while adapting to subdomain transitions.
"""

from collections import namedtuple

import numpy as np

from dibsi.bsplines import bspline_eval, window_values

ARGMAX_TIE_TOL = 1e-12
DEGENERATE_TOL = 1e-12
DEFAULT_QUAD_STEP = 1e-3
LATTICE_SNAP_TOL = 1e-9


def _snap_lattice(u):
    """Round lattice coordinates that are within a few ulps of an integer.

    Neighborhood membership switches exactly at lattice points, so
    positions meant to hit a sample (``x = k * step``) must resolve to
    the integer coordinate rather than to its floating-point neighbor.
    """
    r = np.round(u)
    return np.where(np.abs(u - r) < LATTICE_SNAP_TOL, r, u)

PanelEval = namedtuple(
    "PanelEval",
    ["indices", "inside", "bval", "dominant", "total", "omega", "weights",
     "theta", "values"],
)


def logistic_shape(x, gamma):
    """Logistic shaping of [0, 1] onto itself.

    ``(1 + exp(-gamma/2)) / (1 + exp(-gamma (x - 1/2)))``; fixes the
    point 1 exactly, compresses small weights and boosts large ones.
    Steeper for larger ``gamma``.
    """
    if gamma < 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("logistic_shape input must lie in [0, 1]")
    out = (1.0 + np.exp(-gamma / 2.0)) / (1.0 + np.exp(-gamma * (x - 0.5)))
    return float(out) if out.ndim == 0 else out


class StandardBasis:
    """Shift-invariant B-spline basis; every sample shares one kernel."""

    domain_informed = False

    def __init__(self, order, step=1.0, origin=0.0, k_min=None, k_max=None):
        if step <= 0:
            raise ValueError(f"step must be positive, got {step}")
        self.order = int(order)
        self.step = float(step)
        self.origin = float(origin)
        self.half_support = (self.order + 1) / 2.0
        self.k_min = None if k_min is None else int(k_min)
        self.k_max = None if k_max is None else int(k_max)

    def sample_position(self, k):
        return self.origin + np.asarray(k, dtype=np.float64) * self.step

    def kernel(self, k, x):
        return bspline_eval(self.order, x)

    def panel(self, positions):
        """Neighbor indices and kernel values at absolute positions."""
        positions = np.atleast_1d(np.asarray(positions, dtype=np.float64)).ravel()
        u = _snap_lattice((positions - self.origin) / self.step)
        indices, values = window_values(self.order, u)
        inside = np.abs(u[:, None] - indices) < self.half_support
        values = np.where(inside, values, 0.0)
        return indices, values


class DomainInformedBasis:
    """Domain-informed B-spline basis over a subdomain description.

    Parameters
    ----------
    dom : SubdomainSet
        The inhomogeneous domain description.
    order : int
        B-spline order of the underlying kernel.
    step : float
        Sampling step; sample ``k`` sits at ``origin + k * step``.
    gamma : float or None
        Logistic shaping parameter (>= 1).  ``None`` selects the identity
        shaping, in which case the residual weights equal the plain
        normalized dominant-kernel weights.
    k_min, k_max : int, optional
        Sample index range covered by the basis; defaults to the sample
        positions falling inside the domain interval.
    origin : float
        Absolute position of sample 0.
    """

    domain_informed = True

    def __init__(self, dom, order, step=1.0, gamma=10.0, k_min=None,
                 k_max=None, origin=0.0):
        if step <= 0:
            raise ValueError(f"step must be positive, got {step}")
        if gamma is not None and gamma < 1.0:
            raise ValueError(f"gamma must be >= 1 (or None), got {gamma}")
        self.dom = dom
        self.order = int(order)
        self.step = float(step)
        self.gamma = gamma
        self.origin = float(origin)
        self.half_support = (self.order + 1) / 2.0
        if k_min is None:
            k_min = int(np.ceil((dom.lo - self.origin) / self.step - 1e-9))
        if k_max is None:
            k_max = int(np.floor((dom.hi - self.origin) / self.step + 1e-9))
        if k_max < k_min:
            raise ValueError(
                f"empty sample range [{k_min}, {k_max}] for step {step}"
            )
        self.k_min = int(k_min)
        self.k_max = int(k_max)
        self._build_dominant_masks()

    # -- dominant subdomain bookkeeping ---------------------------------

    def _build_dominant_masks(self):
        margin = self.order + 3
        self._mask_lo = self.k_min - margin
        ks = np.arange(self._mask_lo, self.k_max + margin + 1)
        dvals = self.dom.eval_all(self.sample_position(ks))
        top = dvals.max(axis=0)
        self._masks = (dvals >= top - ARGMAX_TIE_TOL).T.astype(np.float64)

    def sample_position(self, k):
        """Absolute position of sample ``k``."""
        return self.origin + np.asarray(k, dtype=np.float64) * self.step

    def dominant_indices(self, k):
        """Sets (maximizers, rest) of subdomain indices at sample ``k``.

        Subdomains whose value at the sample position ties with the
        maximum within a 1e-12 tolerance all count as maximizers.
        """
        row = self._mask_row(np.asarray([k]))[0]
        dominant = tuple(int(j) for j in np.flatnonzero(row > 0.5))
        rest = tuple(int(j) for j in np.flatnonzero(row < 0.5))
        return dominant, rest

    def _mask_row(self, ks):
        idx = np.clip(ks - self._mask_lo, 0, len(self._masks) - 1)
        return self._masks[idx]

    # -- core vectorized evaluation -------------------------------------

    def panel(self, positions):
        """Evaluate all kernels covering each absolute position.

        Returns a :class:`PanelEval` whose arrays have one row per
        position and one column per candidate neighbor index.
        """
        positions = np.atleast_1d(np.asarray(positions, dtype=np.float64)).ravel()
        u = _snap_lattice((positions - self.origin) / self.step)
        indices, bval = window_values(self.order, u)
        inside = np.abs(u[:, None] - indices) < self.half_support
        bval = np.where(inside, bval, 0.0)

        dvals = self.dom.eval_all(positions)
        masks = self._mask_row(indices)
        dominant_mass = np.einsum("pkj,jp->pk", masks, dvals)
        dominant = dominant_mass * bval
        total = dominant.sum(axis=1)
        omega = np.clip(1.0 - total, 0.0, 1.0)

        degenerate = total < DEGENERATE_TOL
        if np.any(degenerate):
            bsum = bval.sum(axis=1)
            safe_total = np.where(degenerate, 1.0, total)
            safe_bsum = np.where(bsum < DEGENERATE_TOL, 1.0, bsum)
            weights = np.where(
                degenerate[:, None], bval / safe_bsum[:, None],
                dominant / safe_total[:, None],
            )
        else:
            weights = dominant / total[:, None]
        weights = np.clip(weights, 0.0, 1.0)

        shaped = self._shape(weights) * inside
        theta = shaped / shaped.sum(axis=1)[:, None]
        values = np.where(inside, dominant + theta * omega[:, None], 0.0)
        return PanelEval(indices, inside, bval, dominant, total, omega,
                         weights * inside, theta, values)

    def _shape(self, w):
        if self.gamma is None:
            return w
        return (1.0 + np.exp(-self.gamma / 2.0)) / (
            1.0 + np.exp(-self.gamma * (w - 0.5))
        )

    def _select(self, panel, k):
        """Column of ``panel`` rows that belongs to sample ``k``."""
        col = k - panel.indices[:, 0]
        valid = (col >= 0) & (col <= self.order)
        col = np.clip(col, 0, self.order)
        return col, valid

    def _panel_column(self, k, x, field):
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        xflat = np.atleast_1d(x).ravel()
        panel = self.panel(self.origin + (xflat + k) * self.step)
        col, valid = self._select(panel, k)
        arr = getattr(panel, field)
        out = np.where(valid, arr[np.arange(len(xflat)), col], 0.0)
        out = np.where(np.abs(xflat) < self.half_support, out, 0.0)
        return float(out[0]) if scalar else out.reshape(x.shape)

    # -- kernel-level operations ----------------------------------------

    def subdomain_kernel(self, k, j, x):
        """Standard kernel gated by subdomain ``j`` around sample ``k``."""
        if not 0 <= j < self.dom.J:
            raise ValueError(f"subdomain index must be in 0..{self.dom.J - 1}")
        x = np.asarray(x, dtype=np.float64)
        gate = self.dom.eval_one(j, self.origin + (x + k) * self.step)
        out = np.where(np.abs(x) <= self.half_support,
                       gate * bspline_eval(self.order, x), 0.0)
        return float(out) if out.ndim == 0 else out

    def dominant(self, k, x):
        """Dominant part of kernel ``k``: its maximally associated
        subdomain kernels summed."""
        return self._panel_column(k, x, "dominant")

    def weight(self, k, x):
        """Dominant kernel of ``k`` normalized over the neighborhood.

        Falls back to standard B-spline weights where every neighboring
        dominant kernel vanishes, which keeps the redistribution weights
        normalized there as well.
        """
        return self._panel_column(k, x, "weights")

    def shaped_weight(self, k, x):
        """Logistically shaped, renormalized redistribution weight."""
        return self._panel_column(k, x, "theta")

    def kernel(self, k, x):
        """Domain-informed kernel of sample ``k`` in local coordinates."""
        return self._panel_column(k, x, "values")

    def residual(self, position):
        """Uncovered mass at an absolute position: one minus the sum of
        all neighboring dominant kernels.  Zero on homogeneous regions."""
        position = np.asarray(position, dtype=np.float64)
        scalar = position.ndim == 0
        panel = self.panel(np.atleast_1d(position).ravel())
        out = panel.omega
        return float(out[0]) if scalar else out.reshape(position.shape)

    def similarity(self, k, x):
        """Mean-absolute subdomain agreement between ``x`` and sample ``k``,
        logistically shaped; zero outside the open kernel support."""
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        xflat = np.atleast_1d(x).ravel()
        dvals = self.dom.eval_all(self.origin + (xflat + k) * self.step)
        dref = self.dom.eval_all(self.sample_position(k))
        raw = 1.0 - np.mean(np.abs(dvals - dref), axis=0)
        shaped = self._shape(np.clip(raw, 0.0, 1.0))
        out = np.where(np.abs(xflat) < self.half_support, shaped, 0.0)
        return float(out[0]) if scalar else out.reshape(x.shape)

    def basis_sum(self, position):
        """Sum of all kernels covering an absolute position; equals one
        wherever the partition of unity holds."""
        position = np.asarray(position, dtype=np.float64)
        scalar = position.ndim == 0
        panel = self.panel(np.atleast_1d(position).ravel())
        out = panel.values.sum(axis=1)
        return float(out[0]) if scalar else out.reshape(position.shape)


def coherence_factor(basis, quad_step=DEFAULT_QUAD_STEP):
    """Domain-basis coherence of a domain-informed basis.

    Ratio of the similarity-weighted inner products of the adapted
    kernels to those of the standard kernel, accumulated over the sample
    range.  Equals one on a homogeneous domain; larger values indicate a
    basis better aligned with the domain.
    """
    ks = np.arange(basis.k_min, basis.k_max + 1)
    if ks.size < 1:
        raise ValueError("basis must cover at least one sample")
    delta = basis.half_support
    m = int(round(2 * delta / quad_step)) + 1
    local = np.linspace(-delta, delta, m)
    weights = np.full(m, quad_step)
    weights[0] = weights[-1] = quad_step / 2.0

    positions = (basis.origin
                 + (local[None, :] + ks[:, None]) * basis.step).ravel()
    panel = basis.panel(positions)
    cols = np.repeat(ks, m) - panel.indices[:, 0]
    valid = (cols >= 0) & (cols <= basis.order)
    rows = np.arange(len(positions))
    adapted = np.where(valid, panel.values[rows, np.clip(cols, 0, basis.order)],
                       0.0).reshape(len(ks), m)

    dvals = basis.dom.eval_all(positions).reshape(basis.dom.J, len(ks), m)
    dref = basis.dom.eval_all(basis.sample_position(ks))
    raw = 1.0 - np.mean(np.abs(dvals - dref[:, :, None]), axis=0)
    sim = basis._shape(np.clip(raw, 0.0, 1.0))
    sim[:, 0] = sim[:, -1] = 0.0

    standard = bspline_eval(basis.order, local)
    numerator = np.sum((sim * adapted) @ weights)
    denominator = np.sum((sim * standard[None, :]) @ weights)
    return float(numerator / denominator)


def riesz_bounds(basis, quad_step=DEFAULT_QUAD_STEP):
    """Numerical frame-bound estimates from the basis Gram matrix.

    Builds the Gram matrix of the basis over its sample range by
    trapezoidal quadrature (``quad_step`` in lattice units, at most 0.1)
    and returns its smallest and largest eigenvalues.
    """
    if quad_step > 0.1:
        raise ValueError(
            f"quadrature step {quad_step} too coarse; need <= 0.1 lattice units"
        )
    ks = np.arange(basis.k_min, basis.k_max + 1)
    n = ks.size
    if n < 2:
        raise ValueError("basis must cover at least two samples")
    delta = basis.half_support
    lo = basis.k_min - delta
    hi = basis.k_max + delta
    m = int(round((hi - lo) / quad_step)) + 1
    u = np.linspace(lo, hi, m)
    w = np.full(m, quad_step)
    w[0] = w[-1] = quad_step / 2.0

    if basis.domain_informed:
        panel = basis.panel(basis.origin + u * basis.step)
        indices, values = panel.indices, panel.values
    else:
        indices, values = basis.panel(basis.origin + u * basis.step)

    gram = np.zeros((n, n))
    width = indices.shape[1]
    flat = np.zeros(n * n)
    for a in range(width):
        ia = indices[:, a] - basis.k_min
        ok_a = (ia >= 0) & (ia < n)
        for b in range(width):
            ib = indices[:, b] - basis.k_min
            ok = ok_a & (ib >= 0) & (ib < n)
            if not np.any(ok):
                continue
            contrib = w[ok] * values[ok, a] * values[ok, b]
            flat += np.bincount(ia[ok] * n + ib[ok], weights=contrib,
                                minlength=n * n)
    gram = flat.reshape(n, n)
    gram = 0.5 * (gram + gram.T)
    eigenvalues = np.linalg.eigvalsh(gram)
    return float(eigenvalues[0]), float(eigenvalues[-1])
