"""Synthetic signals on inhomogeneous domains and the Monte Carlo study.

Ground-truth signals are random splines interpolating uniform control
values on jittered knots, gated per subdomain so that each signal
respects the domain structure.  The Monte Carlo driver compares standard
and domain-informed interpolation over ensembles of random domains and
signals across spline orders and sampling steps.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.interpolate import make_interp_spline

from dibsi._seeds import derive_seed
from dibsi.basis import DomainInformedBasis
from dibsi.domains import realize_domain
from dibsi.interpolation import (
    SampleSequence,
    interpolate,
    interpolate_bsi,
)

GATE_TIE_TOL = 1e-12
KNOT_MARGIN = 10

_DOMAIN_PATH = 1
_SIGNAL_PATH = 2


class SyntheticSignal:
    """Random piecewise-spline signal gated by the subdomain functions.

    One random spline per subdomain interpolates uniform control values
    on a shared jittered knot sequence; at every point the signal is the
    sum of the splines whose subdomain carries more than its equal share
    of the domain there.
    """

    def __init__(self, dom, order, alpha, seed):
        if not 0 <= alpha < 0.5:
            raise ValueError(f"jitter must lie in [0, 0.5), got {alpha}")
        self.dom = dom
        self.order = int(order)
        self.alpha = float(alpha)
        self.seed = seed
        rng = np.random.default_rng(seed)
        k_lo = int(np.floor(dom.lo)) - KNOT_MARGIN
        k_hi = int(np.ceil(dom.hi)) + KNOT_MARGIN
        base = np.arange(k_lo, k_hi + 1, dtype=np.float64)
        self.knots = base + rng.uniform(-alpha, alpha, len(base))
        self.control_values = rng.uniform(0.0, 1.0, (dom.J, len(base)))
        self.splines = [
            make_interp_spline(self.knots, row, k=self.order)
            for row in self.control_values
        ]

    def gates(self, x):
        """Boolean (J, npts) matrix of open subdomain gates.

        A gate opens where its subdomain exceeds 1/J strictly; at ties
        within ``GATE_TIE_TOL`` only the smallest tied index opens.
        """
        x = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
        diff = self.dom.eval_all(x) - 1.0 / self.dom.J
        tied = np.abs(diff) < GATE_TIE_TOL
        open_ = (diff > 0) & ~tied
        has_tie = tied.any(axis=0)
        if np.any(has_tie):
            first = np.argmax(tied, axis=0)
            cols = np.flatnonzero(has_tie)
            open_[first[cols], cols] = True
        return open_

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        flat = np.atleast_1d(x).ravel()
        open_ = self.gates(flat)
        out = np.zeros(len(flat))
        for j, spline in enumerate(self.splines):
            cols = open_[j]
            if np.any(cols):
                out[cols] += spline(flat[cols])
        return float(out[0]) if scalar else out.reshape(x.shape)


def realize_signal(dom, order, alpha=0.25, seed=0):
    """Realize a random gated spline signal on the given domain."""
    return SyntheticSignal(dom, order, alpha, seed)


def sample_signal(signal, step, k_range=None):
    """Sample a synthetic signal at the lattice points inside its domain."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if k_range is None:
        k_min = int(np.ceil(signal.dom.lo / step - 1e-9))
        k_max = int(np.floor(signal.dom.hi / step + 1e-9))
    else:
        k_min, k_max = map(int, k_range)
    ks = np.arange(k_min, k_max + 1)
    return SampleSequence(signal(ks * step), step, k_offset=k_min)


def relative_l2_error(truth, interpolant, interval, quad_step=None):
    """Relative L2 distance between an interpolant and its ground truth.

    Trapezoidal quadrature of the squared difference and the squared
    truth over ``interval``; defaults to fifty quadrature cells per
    sampling step.
    """
    a, b = interval
    if not a < b:
        raise ValueError(f"empty evaluation interval [{a}, {b}]")
    if quad_step is None:
        quad_step = interpolant.step / 50.0
    npts = int(round((b - a) / quad_step)) + 1
    grid = np.linspace(a, b, max(npts, 2))
    diff = interpolant.evaluate(grid) - truth(grid)
    ref = truth(grid)
    ref_norm = np.trapezoid(ref**2, grid)
    if ref_norm <= 0:
        raise ValueError("ground truth has zero norm on the interval")
    return float(np.sqrt(np.trapezoid(diff**2, grid) / ref_norm))


class ErrorTable:
    """Ensemble relative errors indexed by method, order and step."""

    methods = ("bsi", "dibsi")

    def __init__(self, orders, steps, errors, D, S, master_seed):
        self.orders = list(orders)
        self.steps = list(steps)
        self.errors = np.asarray(errors, dtype=np.float64)
        self.D = D
        self.S = S
        self.master_seed = master_seed
        if self.errors.shape != (2, len(self.orders), len(self.steps)):
            raise ValueError("error array shape mismatch")
        if not np.all(np.isfinite(self.errors)) or np.any(self.errors < 0):
            raise ValueError("errors must be finite and nonnegative")

    def get(self, method, order, step):
        m = self.methods.index(method)
        io = self.orders.index(order)
        it = self.steps.index(step)
        return float(self.errors[m, io, it])

    def rows(self):
        """Rows (method, order, step, error) in fixed sorted order."""
        out = []
        for m, method in enumerate(self.methods):
            for io, order in enumerate(self.orders):
                for it, step in enumerate(self.steps):
                    out.append((method, order, step,
                                float(self.errors[m, io, it])))
        return out


def monte_carlo(D, S, orders, steps, gamma=10.0, master_seed=0, threads=1,
                domain_J=2, domain_K=9, lo=1.0, hi=30.0, alpha=0.25,
                signal_order=None):
    """Ensemble interpolation errors of both methods over random cases.

    Realizes ``D`` domains and ``S`` signals per domain (seeds derived
    from the master seed and the case path, so the table is independent
    of execution order and thread count), interpolates each sampled
    signal with both methods for every order and step, and averages the
    per-realization relative errors.

    Ground-truth signals use the spline order under test unless
    ``signal_order`` pins a fixed one.
    """
    if D < 1 or S < 1:
        raise ValueError("need at least one domain and one signal")
    orders = [int(n) for n in orders]
    steps = [float(t) for t in steps]
    ratios = np.zeros((2, D, S, len(orders), len(steps)))

    def run_domain(i):
        dom = realize_domain(domain_J, domain_K, lo, hi,
                             seed=derive_seed(master_seed, _DOMAIN_PATH, i))
        bases = {}
        samples_range = {}
        for t in steps:
            k_min = int(np.ceil(lo / t - 1e-9))
            k_max = int(np.floor(hi / t + 1e-9))
            samples_range[t] = (k_min, k_max)
        for j in range(S):
            seed = derive_seed(master_seed, _SIGNAL_PATH, i, j)
            for io, order in enumerate(orders):
                truth_order = order if signal_order is None else signal_order
                sig = realize_signal(dom, truth_order, alpha, seed)
                delta = (order + 1) / 2.0
                for it, t in enumerate(steps):
                    k_min, k_max = samples_range[t]
                    samples = sample_signal(sig, t, (k_min, k_max))
                    key = (order, t)
                    if key not in bases:
                        bases[key] = DomainInformedBasis(
                            dom, order, step=t, gamma=gamma,
                            k_min=k_min, k_max=k_max,
                        )
                    interval = ((k_min + delta) * t, (k_max - delta) * t)
                    bsi = interpolate_bsi(samples, order)
                    dibsi = interpolate(samples, bases[key])
                    ratios[0, i, j, io, it] = relative_l2_error(
                        sig, bsi, interval)
                    ratios[1, i, j, io, it] = relative_l2_error(
                        sig, dibsi, interval)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_domain, range(D)))
    else:
        for i in range(D):
            run_domain(i)

    ensemble = ratios.mean(axis=(1, 2))
    return ErrorTable(orders, steps, ensemble, D, S, master_seed)
