"""Pure-Python (numpy) versions of the compiled kernels.

Every function here has the same signature and semantics as its
counterpart in ``_ckernels.pyx``. Integer streams are bit-identical
between the two; transcendental results may differ in the last ulp
because numpy and libm use different ``log`` implementations.
"""
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1
_TO_UNIT = 2.0 ** -53


def _raw_stream(state, n):
    steps = np.arange(1, n + 1, dtype=np.uint64)
    z = np.uint64(state & _MASK64) + steps * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    z = z ^ (z >> np.uint64(31))
    new_state = (state + n * 0x9E3779B97F4A7C15) & _MASK64
    return z, new_state


def splitmix64_uniform(state, n):
    z, new_state = _raw_stream(state, n)
    return (z >> np.uint64(11)).astype(np.float64) * _TO_UNIT, new_state


def box_muller_normal(state, n):
    pairs = (n + 1) // 2
    u, new_state = splitmix64_uniform(state, 2 * pairs)
    u1 = 1.0 - u[0::2]
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:n], new_state


def cyclic_mean3(y):
    return (np.roll(y, 1, axis=1) + y + np.roll(y, -1, axis=1)) / 3.0


def cyclic_deviation(y):
    # y - mean3(y), written so a constant row gives exact zeros
    return (2.0 * y - np.roll(y, 1, axis=1) - np.roll(y, -1, axis=1)) / 3.0


def cyclic_smoothing(y, omega):
    n = y.shape[1]
    dev = cyclic_deviation(y)
    loss = omega * np.sum(dev * dev, axis=1) / n
    grad = (2.0 * omega / n) * cyclic_deviation(dev)
    return loss, grad


def cyclic_correlate(y, weights):
    h = len(weights) // 2
    out = np.zeros_like(y)
    for k, w in enumerate(weights):
        out += w * np.roll(y, h - k, axis=1)
    return out


def adam_update(p, g, m, v, lr, beta1, beta2, c1, c2, eps):
    with np.errstate(invalid="ignore", over="ignore"):
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        u = lr * (m / c1) / (np.sqrt(v / c2) + eps)
    ok = np.isfinite(u)
    bad = int(u.size - np.count_nonzero(ok))
    if bad:
        p[ok] -= u[ok]
    else:
        p -= u
    return bad
