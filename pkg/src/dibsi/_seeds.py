"""Deterministic seed derivation for nested experiments.

Derived seeds come from folding each path element into a SplitMix64
state, so any sub-experiment can be reproduced from the master seed and
its integer path alone, independent of execution order or thread count.
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(state):
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master, *path):
    """Fold integer path elements into a 64-bit seed."""
    state = _splitmix64(int(master) & _MASK)
    for element in path:
        state = _splitmix64(state ^ ((int(element) * _GOLDEN + 1) & _MASK))
    return state
