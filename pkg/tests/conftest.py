import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from dibsi.domains import GridFunction, MeyerSystem, SubdomainSet, realize_domain


@pytest.fixture(scope="session")
def two_subdomain_dom():
    """Random two-subdomain domain on [1, 30]."""
    return realize_domain(2, 9, 1.0, 30.0, seed=7)


@pytest.fixture(scope="session")
def homogeneous_dom():
    """Single-subdomain domain on [1, 30]."""
    return realize_domain(1, 4, 1.0, 30.0, seed=2)


@pytest.fixture(scope="session")
def split_dom():
    """Unwarped two-subdomain split: kernels 1..3 versus 4..9.

    Subdomain 0 covers [1, ~8.3] exactly; the transition sits around
    x = 8.33, and subdomain 1 owns everything beyond ~9.4.
    """
    system = MeyerSystem(9, 1.0, 30.0)
    step = 1e-3
    npts = int(np.floor(29.0 / step + 1e-9)) + 1
    grid = 1.0 + step * np.arange(npts)
    kernels = system.eval_all(grid)
    d0 = GridFunction(1.0, 30.0, step, kernels[:3].sum(axis=0))
    d1 = GridFunction(1.0, 30.0, step, kernels[3:].sum(axis=0))
    return SubdomainSet([d0, d1], renormalize=True)
