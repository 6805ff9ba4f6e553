"""Independent numerical oracles used by the test suite."""

import numpy as np


class BsplineConvolutionOracle:
    """Centered B-spline values built by iterated convolution with the box.

    Convolving with the unit box equals integrating over a sliding unit
    window, so each order is obtained from the previous one by exact
    integration of its piecewise-linear grid representation; the window
    edges land on grid nodes, which keeps the integration a pure index
    shift of the cumulative antiderivative.  Entirely independent of the
    recurrence used by the library.
    """

    def __init__(self, order, grid_step=1e-4):
        per_unit = int(round(1.0 / grid_step))
        if per_unit % 2 or abs(per_unit * grid_step - 1.0) > 1e-12:
            raise ValueError("grid step must evenly divide 0.5")
        half = per_unit // 2
        span = (order + 1) * half + per_unit
        self.grid = np.arange(-span, span + 1) / per_unit

        if order == 0:
            vals = np.where(np.abs(self.grid) < 0.5, 1.0, 0.0)
            vals[np.abs(np.abs(self.grid) - 0.5) < grid_step / 4] = 0.5
        else:
            # first convolution: exact overlap of the window with the box
            upper = np.minimum(self.grid + 0.5, 0.5)
            lower = np.maximum(self.grid - 0.5, -0.5)
            vals = np.clip(upper - lower, 0.0, None)
            for _ in range(2, order + 1):
                cells = 0.5 * (vals[:-1] + vals[1:]) * grid_step
                anti = np.concatenate(([0.0], np.cumsum(cells)))
                padded = np.pad(anti, half, mode="edge")
                vals = padded[2 * half:] - padded[:len(anti)]
        self.values = vals

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)
