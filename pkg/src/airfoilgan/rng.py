"""Seeded, portable random streams.

A SplitMix64 generator feeds both uniform draws and Box-Muller normal
draws, so a given seed yields the same numbers on any platform that
implements the same integer recipe.
"""
import numpy as np

from . import kernels


class Rng:
    """Deterministic random stream.

    Parameters
    ----------
    seed : int
        Any integer; reduced modulo 2**64.
    """

    def __init__(self, seed=0):
        self.state = int(seed) & ((1 << 64) - 1)

    def __repr__(self):
        return f"Rng(state={self.state:#018x})"

    def random(self, size=None):
        n, shape = _count(size)
        out, self.state = kernels.splitmix64_uniform(self.state, n)
        return float(out[0]) if shape is None else out.reshape(shape)

    def uniform(self, low=0.0, high=1.0, size=None):
        u = self.random(size)
        return low + (high - low) * u

    def normal(self, size=None):
        """Standard normal draws via the Box-Muller transform."""
        n, shape = _count(size)
        out, self.state = kernels.box_muller_normal(self.state, n)
        return float(out[0]) if shape is None else out.reshape(shape)

    def permutation(self, n):
        # stable argsort keeps ties (vanishingly rare) deterministic
        return np.argsort(self.random(n), kind="stable")

    def spawn(self):
        """Independent child stream seeded from this one."""
        _, self.state = kernels.splitmix64_uniform(self.state, 1)
        return Rng(self.state ^ 0xD1B54A32D192ED03)


def _count(size):
    if size is None:
        return 1, None
    shape = (size,) if np.isscalar(size) else tuple(size)
    return int(np.prod(shape, dtype=np.int64)), shape
