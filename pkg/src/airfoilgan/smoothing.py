"""Curve smoothness on the closed 38-point loop.

The smoothing loss of a curve ``y`` with ``n`` points is

    L = (omega / n) * sum_i (y_i - ybar_i)**2,

where ``ybar`` is the three-point moving average taken cyclically, so the
trailing-edge point's neighbours are the first upper and last lower
points. All functions accept a single curve or a ``(B, n)`` batch and
return results of matching rank.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _pykernels, kernels
from .errors import DomainError

WINDOW = 3


@dataclass(frozen=True)
class SmoothingConfig:
    omega: float = 10.0
    window: int = WINDOW

    def __post_init__(self):
        if self.omega < 0:
            raise DomainError(f"omega must be >= 0, got {self.omega}")
        if self.window != WINDOW:
            raise DomainError(f"window is fixed at {WINDOW}, got {self.window}")


def _prepare(y):
    y = np.asarray(y, dtype=np.float64)
    if y.ndim not in (1, 2):
        raise DomainError(f"expected a curve or a batch of curves, got shape {y.shape}")
    if y.shape[-1] < 3:
        raise DomainError(f"need at least 3 points, got {y.shape[-1]}")
    return y, y.ndim == 1


def moving_average_cyclic(y):
    y, single = _prepare(y)
    out = kernels.cyclic_mean3(y)
    return out[0] if single else out


def deviations(y):
    y, single = _prepare(y)
    out = _pykernels.cyclic_deviation(np.atleast_2d(y))
    return out[0] if single else out


def smoothing_loss(y, omega=1.0):
    """Weighted mean-square deviation from the cyclic moving average."""
    if omega < 0:
        raise DomainError(f"omega must be >= 0, got {omega}")
    y, single = _prepare(y)
    loss, _ = kernels.cyclic_smoothing(y, omega)
    return float(loss[0]) if single else loss


def smoothing_loss_grad(y, omega=1.0):
    """Exact gradient of :func:`smoothing_loss` with respect to ``y``.

    With ``M = I - A`` (``A`` the cyclic mean operator, which is
    symmetric) the gradient is ``(2 omega / n) M^T M y``.
    """
    if omega < 0:
        raise DomainError(f"omega must be >= 0, got {omega}")
    y, single = _prepare(y)
    _, grad = kernels.cyclic_smoothing(y, omega)
    return grad[0] if single else grad


def smoothing_loss_and_grad(y, omega=1.0):
    y, single = _prepare(y)
    loss, grad = kernels.cyclic_smoothing(y, omega)
    return (float(loss[0]), grad[0]) if single else (loss, grad)


@lru_cache(maxsize=32)
def _sg_weights(window, order):
    half = window // 2
    # least-squares fit: rows are powers of the offset, centre value = first coefficient
    offsets = np.arange(-half, half + 1, dtype=np.float64)
    design = np.vander(offsets, order + 1, increasing=True)
    coeffs = np.linalg.pinv(design)
    w = coeffs[0].copy()
    w.setflags(write=False)
    return w


def savgol_weights(window=5, order=2):
    """Centre-point convolution weights of a Savitzky-Golay smoother."""
    _check_sg(window, order)
    return _sg_weights(window, order)


def _check_sg(window, order, n=None):
    if window < 1 or window % 2 == 0:
        raise DomainError(f"window must be a positive odd integer, got {window}")
    if order < 0 or order >= window:
        raise DomainError(f"order must satisfy 0 <= order < window, got order={order}, window={window}")
    if n is not None and window > n:
        raise DomainError(f"window {window} longer than the curve ({n} points)")


def savitzky_golay(y, window=5, order=2, cyclic=True):
    """Savitzky-Golay smoothing.

    With ``cyclic=True`` (default) the curve is treated as a closed loop.
    Otherwise points within ``window // 2`` of either end are taken from
    a polynomial fitted to the first or last ``window`` points.
    """
    y, single = _prepare(y)
    _check_sg(window, order, y.shape[-1])
    w = _sg_weights(window, order)
    yb = np.atleast_2d(y)
    if cyclic:
        out = kernels.cyclic_correlate(yb, w)
    else:
        out = _savgol_open(yb, window, order, w)
    return out[0] if single else out


def _savgol_open(y, window, order, w):
    n = y.shape[1]
    half = window // 2
    out = np.empty_like(y)
    for i in range(half, n - half):
        out[:, i] = y[:, i - half : i + half + 1] @ w
    t = np.arange(window, dtype=np.float64)
    design = np.vander(t, order + 1, increasing=True)
    proj = np.linalg.pinv(design)  # (order+1, window)
    head = np.vander(np.arange(half, dtype=np.float64), order + 1, increasing=True) @ proj
    tail = np.vander(np.arange(window - half, window, dtype=np.float64), order + 1, increasing=True) @ proj
    out[:, :half] = y[:, :window] @ head.T
    out[:, n - half :] = y[:, n - window :] @ tail.T
    return out
