"""Interpolation on standard and domain-informed B-spline bases.

Coefficients are found from the square banded collocation system whose
row ``k`` matches the interpolant to the sample at ``k``.  Boundaries
use mirror extension of the samples (coefficients of out-of-range
kernels fold onto their mirrored indices); subdomain functions extend by
clamping.  The system is shift-variant, so coefficients come from a
direct banded LU solve rather than recursive prefiltering.
"""

import numpy as np

from dibsi.basis import DomainInformedBasis, StandardBasis

PIVOT_TOL = 1e-12
RESIDUAL_RTOL = 1e-9


class SingularSystemError(Exception):
    """Collocation system is numerically singular."""

    def __init__(self, pivot_index, pivot_value):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f"singular collocation system: pivot {pivot_value:.3e} "
            f"at row {pivot_index}"
        )


class SolverResidualError(Exception):
    """Solved coefficients fail the residual bound."""


class SampleSequence:
    """Uniform samples ``values[i]`` taken at ``origin + (k_offset+i)*step``."""

    def __init__(self, values, step, k_offset=0, origin=0.0):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 1 or len(values) < 1:
            raise ValueError("values must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(values)):
            raise ValueError("sample values must be finite")
        if step <= 0:
            raise ValueError(f"step must be positive, got {step}")
        self.values = values
        self.step = float(step)
        self.k_offset = int(k_offset)
        self.origin = float(origin)

    def __len__(self):
        return len(self.values)

    @property
    def positions(self):
        return self.origin + (self.k_offset + np.arange(len(self))) * self.step


class BandedSystem:
    """Square banded system in diagonal-band storage.

    ``band[i, half_bandwidth + (j - i)]`` holds entry (i, j); ``rhs`` is
    the right-hand side and ``k_offset`` maps rows back to sample indices.
    """

    def __init__(self, band, rhs, half_bandwidth, k_offset):
        self.band = band
        self.rhs = rhs
        self.half_bandwidth = half_bandwidth
        self.k_offset = k_offset

    @property
    def size(self):
        return len(self.rhs)

    def dense(self):
        n, p = self.size, self.half_bandwidth
        full = np.zeros((n, n))
        for d in range(-p, p + 1):
            rows = np.arange(max(0, -d), min(n, n - d))
            full[rows, rows + d] = self.band[rows, p + d]
        return full


def mirror_index(rel, n):
    """Reflect an out-of-range relative index back into ``0..n-1``
    (whole-sample symmetry about both ends)."""
    if n == 1:
        return np.zeros_like(np.asarray(rel))
    period = 2 * (n - 1)
    folded = np.mod(np.asarray(rel), period)
    return np.where(folded > n - 1, period - folded, folded)


def assemble_collocation(basis, samples):
    """Build the banded collocation system for a basis and sample set.

    Row ``k`` contains the kernels of the ``floor(order/2)``-neighborhood
    of sample ``k`` evaluated at their integer offsets; columns of
    out-of-range kernels are folded onto mirrored coefficient indices.
    """
    order = basis.order
    n = len(samples)
    if n < order + 1:
        raise ValueError(
            f"need at least {order + 1} samples for order {order}, got {n}"
        )
    if abs(basis.step - samples.step) > 1e-12 * samples.step:
        raise ValueError("basis and samples disagree on the sampling step")
    p = order // 2
    ks = samples.k_offset + np.arange(n)
    indices, values = _panel_arrays(basis, samples.positions)

    band = np.zeros((n, 2 * p + 1))
    for col in range(indices.shape[1]):
        rel = indices[:, col] - samples.k_offset
        mirrored = mirror_index(rel, n)
        offset = mirrored - np.arange(n) + p
        keep = np.abs(values[:, col]) > 0
        keep &= (offset >= 0) & (offset <= 2 * p)
        np.add.at(band, (np.flatnonzero(keep), offset[keep]),
                  values[keep, col])
    return BandedSystem(band, samples.values.copy(), p, samples.k_offset)


def _panel_arrays(basis, positions):
    panel = basis.panel(positions)
    if basis.domain_informed:
        return panel.indices, panel.values
    return panel


def solve_coefficients(system):
    """Solve a banded collocation system for the coefficients.

    Banded LU without pivoting; when a pivot drops below ``PIVOT_TOL``
    the solve is retried densely with partial pivoting.  The returned
    coefficients satisfy ``max |A c - s| < RESIDUAL_RTOL * max |s|``.
    """
    n, p = system.size, system.half_bandwidth
    rhs = system.rhs
    if p == 0:
        diag = system.band[:, 0]
        bad = np.flatnonzero(np.abs(diag) < PIVOT_TOL)
        if bad.size:
            raise SingularSystemError(int(bad[0]), float(diag[bad[0]]))
        coeffs = rhs / diag
        return _check_residual(system, coeffs)

    band = system.band.copy()
    x = rhs.copy()
    small_pivot = None
    for i in range(n):
        pivot = band[i, p]
        if abs(pivot) < PIVOT_TOL:
            small_pivot = (i, pivot)
            break
        reach = min(p, n - 1 - i)
        for r in range(1, reach + 1):
            factor = band[i + r, p - r] / pivot
            if factor == 0.0:
                continue
            band[i + r, p - r:p - r + p + 1] -= factor * band[i, p:2 * p + 1]
            x[i + r] -= factor * x[i]
    if small_pivot is None:
        for i in range(n - 1, -1, -1):
            reach = min(p, n - 1 - i)
            acc = x[i]
            for r in range(1, reach + 1):
                acc -= band[i, p + r] * x[i + r]
            x[i] = acc / band[i, p]
        try:
            return _check_residual(system, x)
        except SolverResidualError:
            pass
    return _dense_fallback(system, small_pivot)


def _dense_fallback(system, small_pivot):
    try:
        coeffs = np.linalg.solve(system.dense(), system.rhs)
    except np.linalg.LinAlgError as exc:
        if small_pivot is not None:
            raise SingularSystemError(small_pivot[0], small_pivot[1]) from exc
        raise SingularSystemError(-1, 0.0) from exc
    return _check_residual(system, coeffs)


def _check_residual(system, coeffs):
    n, p = system.size, system.half_bandwidth
    residual = -system.rhs.copy()
    for d in range(-p, p + 1):
        rows = np.arange(max(0, -d), min(n, n - d))
        residual[rows] += system.band[rows, p + d] * coeffs[rows + d]
    scale = max(np.max(np.abs(system.rhs)), 1e-300)
    worst = np.max(np.abs(residual))
    if worst >= RESIDUAL_RTOL * scale:
        raise SolverResidualError(
            f"residual {worst:.3e} exceeds {RESIDUAL_RTOL:.0e} * {scale:.3e}"
        )
    return coeffs


class Interpolant:
    """Solved interpolant bound to its basis and sample set."""

    boundary_mode = "mirror"

    def __init__(self, coeffs, basis, samples):
        self.coeffs = np.asarray(coeffs, dtype=np.float64)
        self.basis = basis
        self.samples = samples

    @property
    def step(self):
        return self.samples.step

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Evaluate the interpolant at absolute positions.

        Positions must stay within the mirror-extended sample range; one
        full reflection on each side.
        """
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        flat = np.atleast_1d(x).ravel()
        n = len(self.samples)
        k0 = self.samples.k_offset
        rel = (flat - self.samples.origin) / self.step - k0
        if np.any(rel < -(n - 1) - 1e-9) or np.any(rel > 2 * (n - 1) + 1e-9):
            raise ValueError(
                "evaluation point outside the mirror-extended sample range"
            )
        indices, values = _panel_arrays(self.basis, flat)
        folded = mirror_index(indices - k0, n)
        out = np.einsum("pk,pk->p", self.coeffs[folded], values)
        return float(out[0]) if scalar else out.reshape(x.shape)


def interpolate(samples, basis):
    """Assemble and solve the collocation system for a prepared basis."""
    system = assemble_collocation(basis, samples)
    coeffs = solve_coefficients(system)
    return Interpolant(coeffs, basis, samples)


def interpolate_bsi(samples, order):
    """Standard shift-invariant B-spline interpolation of the samples."""
    basis = StandardBasis(order, step=samples.step, origin=samples.origin,
                          k_min=samples.k_offset,
                          k_max=samples.k_offset + len(samples) - 1)
    return interpolate(samples, basis)


def interpolate_dibsi(samples, dom, order, gamma=10.0):
    """Domain-informed B-spline interpolation of the samples."""
    basis = DomainInformedBasis(
        dom, order, step=samples.step, gamma=gamma,
        k_min=samples.k_offset,
        k_max=samples.k_offset + len(samples) - 1,
        origin=samples.origin,
    )
    return interpolate(samples, basis)
