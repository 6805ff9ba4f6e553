"""Inhomogeneous domain descriptions and their random synthesis.

A domain is described by a set of nonnegative subdomain functions that
sum to one everywhere.  Random domains are realized by warping a system
of Meyer-type kernels with a random monotone map and grouping the
kernels into subdomains.
"""

import json
import os

import numpy as np

DEFAULT_GRID_STEP = 1e-3
POU_TOL = 1e-9
LOAD_RENORM_TOL = 1e-6


class GridFunction:
    """Real function on an interval stored as uniform grid samples.

    Evaluation is piecewise linear between samples and clamps to the
    boundary value outside ``[lo, hi]``.
    """

    def __init__(self, lo, hi, step, values):
        if not lo < hi:
            raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
        if step <= 0:
            raise ValueError(f"step must be positive, got {step}")
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        expected = int(np.floor((hi - lo) / step + 1e-9)) + 1
        if len(values) != expected:
            raise ValueError(
                f"expected {expected} samples on [{lo}, {hi}] at step {step}, "
                f"got {len(values)}"
            )
        self.lo = float(lo)
        self.hi = float(hi)
        self.step = float(step)
        self.values = values
        self._grid = self.lo + self.step * np.arange(len(values))

    @classmethod
    def from_callable(cls, func, lo, hi, step=DEFAULT_GRID_STEP):
        npts = int(np.floor((hi - lo) / step + 1e-9)) + 1
        grid = lo + step * np.arange(npts)
        return cls(lo, hi, step, func(grid))

    @property
    def grid(self):
        return self._grid

    def __call__(self, x):
        return np.interp(x, self._grid, self.values)


class SubdomainSet:
    """Partition-of-unity family of subdomain functions on a shared grid."""

    def __init__(self, functions, renormalize=False):
        if not functions:
            raise ValueError("need at least one subdomain function")
        first = functions[0]
        for f in functions[1:]:
            if (f.lo, f.hi, f.step, len(f.values)) != (
                first.lo,
                first.hi,
                first.step,
                len(first.values),
            ):
                raise ValueError("subdomain functions must share one grid")
        values = np.vstack([f.values for f in functions])
        if np.any(values < -1e-12):
            raise ValueError("subdomain functions must be nonnegative")
        values = np.clip(values, 0.0, None)
        total = values.sum(axis=0)
        if renormalize:
            if np.any(total <= 0):
                raise ValueError("cannot renormalize: zero pointwise sum")
            values = values / total
        elif np.max(np.abs(total - 1.0)) > POU_TOL:
            raise ValueError(
                "subdomain functions do not form a partition of unity "
                f"(max deviation {np.max(np.abs(total - 1.0)):.3e})"
            )
        self.values = values
        self.lo = first.lo
        self.hi = first.hi
        self.step = first.step
        self._grid = first.grid

    @property
    def J(self):
        return self.values.shape[0]

    @property
    def grid(self):
        return self._grid

    def function(self, j):
        return GridFunction(self.lo, self.hi, self.step, self.values[j])

    def eval_all(self, x):
        """Evaluate every subdomain function; returns shape (J, x.size)."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
        return np.vstack([np.interp(x, self._grid, row) for row in self.values])

    def eval_one(self, j, x):
        return np.interp(x, self._grid, self.values[j])


def meyer_aux(x):
    """Auxiliary polynomial nu(x) = x^4 (35 - 84 x + 70 x^2 - 20 x^3).

    Monotone nondecreasing from nu(0) = 0 to nu(1) = 1; input outside
    [0, 1] is rejected.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("meyer_aux input must lie in [0, 1]")
    out = x**4 * (35.0 - 84.0 * x + 70.0 * x**2 - 20.0 * x**3)
    return float(out) if out.ndim == 0 else out


def _aux_clipped(t):
    # internal: branch arithmetic may overshoot [0, 1] by rounding
    return meyer_aux(np.clip(t, 0.0, 1.0))


class MeyerSystem:
    """System of K Meyer-type kernels partitioning unity on [lo, hi].

    Adjacent kernels overlap on half-width windows where a squared
    sine/cosine pair sums to one; kernels two apart have disjoint
    supports.  Requires ``lo < hi / (2 K)``.
    """

    def __init__(self, K, lo, hi):
        if not isinstance(K, (int, np.integer)) or K < 2:
            raise ValueError(f"K must be an integer >= 2, got {K!r}")
        if lo <= 0 or hi <= 0 or lo >= hi:
            raise ValueError(f"need 0 < lo < hi, got [{lo}, {hi}]")
        if not lo < hi / (2 * K):
            raise ValueError(
                f"need lo < hi/(2K) = {hi / (2 * K)}, got lo = {lo}"
            )
        self.K = int(K)
        self.lo = float(lo)
        self.hi = float(hi)
        self.width = self.hi / self.K

    def kernel(self, k, x):
        """Evaluate kernel ``k`` (1-based, 1..K) at points in [lo, hi]."""
        if not 1 <= k <= self.K:
            raise ValueError(f"kernel index must be in 1..{self.K}, got {k}")
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < self.lo - 1e-12) or np.any(x > self.hi + 1e-12):
            raise ValueError(f"x must lie in [{self.lo}, {self.hi}]")
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        d = self.width
        out = np.zeros_like(x)

        if k == 1:
            flat = x <= d / 2
            fall = (x > d / 2) & (x <= 3 * d / 2)
            out[flat] = 1.0
            out[fall] = np.cos(0.5 * np.pi * _aux_clipped(x[fall] / d - 0.5)) ** 2
        elif k == self.K:
            kappa = (self.K - 1.5) * d
            rise = (x > kappa) & (x <= kappa + d)
            flat = x > kappa + d
            out[rise] = np.sin(0.5 * np.pi * _aux_clipped(x[rise] / d - k + 1.5)) ** 2
            out[flat] = 1.0
        else:
            alpha = (k - 1.5) * d
            rise = (x > alpha) & (x <= alpha + d)
            fall = (x > alpha + d) & (x <= alpha + 2 * d)
            out[rise] = np.sin(0.5 * np.pi * _aux_clipped(x[rise] / d - k + 1.5)) ** 2
            out[fall] = np.cos(0.5 * np.pi * _aux_clipped(x[fall] / d - k + 0.5)) ** 2
        return float(out[0]) if scalar else out

    def eval_all(self, x):
        return np.vstack([self.kernel(k, x) for k in range(1, self.K + 1)])


def random_warp(lo, hi, seed, knots=20):
    """Random monotone map of [lo, hi] onto itself, pinned at both ends.

    Draws ``knots`` positive increments, normalizes their cumulative sum
    to span [lo, hi] and interpolates linearly between the resulting
    vertices.  Deterministic for a given seed.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if knots < 2:
        raise ValueError(f"need at least 2 increments, got {knots}")
    rng = np.random.default_rng(seed)
    increments = rng.uniform(0.05, 1.0, knots)
    heights = np.concatenate(([0.0], np.cumsum(increments)))
    heights = lo + (hi - lo) * heights / heights[-1]
    heights[0] = lo
    heights[-1] = hi
    return GridFunction(lo, hi, (hi - lo) / knots, heights)


def realize_domain(J, K, lo=1.0, hi=30.0, seed=0, step=DEFAULT_GRID_STEP,
                   warp_knots=20):
    """Randomly realize a ``J``-subdomain partition of unity on [lo, hi].

    A Meyer system of ``K`` kernels is warped with a random monotone map,
    the kernels are dealt to the subdomains round-robin in a randomized
    order and summed within each group, and the result is sampled on a
    uniform grid and renormalized pointwise.
    """
    if J < 1:
        raise ValueError(f"need at least one subdomain, got J = {J}")
    if K < J:
        raise ValueError(f"need K >= J, got K = {K}, J = {J}")
    system = MeyerSystem(K, lo, hi)
    rng = np.random.default_rng(seed)
    warp_seed = int(rng.integers(0, 2**63 - 1))
    warp = random_warp(lo, hi, warp_seed, knots=warp_knots)
    order = rng.permutation(K)

    npts = int(np.floor((hi - lo) / step + 1e-9)) + 1
    grid = lo + step * np.arange(npts)
    warped = np.clip(warp(grid), lo, hi)
    kernels = system.eval_all(warped)

    functions = []
    for j in range(J):
        members = order[j::J]
        functions.append(GridFunction(lo, hi, step, kernels[members].sum(axis=0)))
    return SubdomainSet(functions, renormalize=True)


def is_homogeneous(dom, a, b, tol=POU_TOL):
    """Test whether one subdomain covers [a, b] entirely.

    Returns ``(True, j)`` when subdomain ``j`` satisfies ``d_j >= 1 - tol``
    at every grid point of [a, b] and at both endpoints, ``(False, None)``
    otherwise.
    """
    if not a <= b:
        raise ValueError(f"empty interval [{a}, {b}]")
    grid = dom.grid
    inside = grid[(grid >= a) & (grid <= b)]
    probes = np.concatenate(([a], inside, [b]))
    vals = dom.eval_all(probes)
    ok = np.min(vals, axis=1) >= 1.0 - tol
    hits = np.flatnonzero(ok)
    if hits.size:
        return True, int(hits[0])
    return False, None


def save_domain(dom, manifest_path):
    """Write a domain as a JSON manifest plus a CSV of grid columns."""
    manifest_path = os.fspath(manifest_path)
    root, _ = os.path.splitext(manifest_path)
    csv_path = root + "_values.csv"
    header = ",".join(f"d{j + 1}" for j in range(dom.J))
    np.savetxt(csv_path, dom.values.T, delimiter=",", header=header,
               comments="", fmt="%.17g")
    manifest = {
        "lo": dom.lo,
        "hi": dom.hi,
        "step": dom.step,
        "J": dom.J,
        "values": os.path.basename(csv_path),
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


def load_domain(manifest_path):
    """Load a domain manifest, validating and renormalizing on the way.

    Pointwise sums deviating from one by more than ``LOAD_RENORM_TOL``
    are rejected; smaller deviations are renormalized away.
    """
    manifest_path = os.fspath(manifest_path)
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    for key in ("lo", "hi", "step", "J", "values"):
        if key not in manifest:
            raise ValueError(f"domain manifest missing key {key!r}")
    csv_path = os.path.join(os.path.dirname(manifest_path), manifest["values"])
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != manifest["J"]:
        raise ValueError(
            f"manifest declares J = {manifest['J']} but CSV has "
            f"{data.shape[1]} columns"
        )
    if np.any(data < -1e-12):
        raise ValueError("subdomain columns must be nonnegative")
    total = data.sum(axis=1)
    if np.max(np.abs(total - 1.0)) > LOAD_RENORM_TOL:
        raise ValueError(
            "pointwise sum deviates from 1 by "
            f"{np.max(np.abs(total - 1.0)):.3e} (limit {LOAD_RENORM_TOL})"
        )
    functions = [
        GridFunction(manifest["lo"], manifest["hi"], manifest["step"], col)
        for col in data.T
    ]
    return SubdomainSet(functions, renormalize=True)
