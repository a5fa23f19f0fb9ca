"""Backend selection for the hot loops.

The compiled Cython module is used when it was built; otherwise, or
when ``AIRFOILGAN_PURE_PYTHON=1`` is set, the numpy implementation in
``_pykernels`` is used. ``BACKEND`` names the active choice.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("AIRFOILGAN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def _as_batch(y):
    return np.ascontiguousarray(np.atleast_2d(np.asarray(y, dtype=np.float64)))


def splitmix64_uniform(state, n):
    return _impl.splitmix64_uniform(state, n)


def box_muller_normal(state, n):
    return _impl.box_muller_normal(state, n)


def cyclic_mean3(y):
    return _impl.cyclic_mean3(_as_batch(y))


def cyclic_smoothing(y, omega):
    return _impl.cyclic_smoothing(_as_batch(y), float(omega))


def cyclic_correlate(y, weights):
    w = np.ascontiguousarray(weights, dtype=np.float64)
    return _impl.cyclic_correlate(_as_batch(y), w)


def adam_update(p, g, m, v, lr, beta1, beta2, c1, c2, eps):
    """In-place Adam step on same-shaped contiguous arrays.

    Returns the number of entries whose update was non-finite; those
    entries are left unchanged.
    """
    flat = [a.reshape(-1) for a in (p, np.ascontiguousarray(g), m, v)]
    if any(not np.shares_memory(a, f) for a, f in ((p, flat[0]), (m, flat[2]), (v, flat[3]))):
        raise ValueError("parameter and moment arrays must be contiguous")
    return _impl.adam_update(*flat, lr, beta1, beta2, c1, c2, eps)
