"""Compare the compiled and numpy kernel backends.

Run with ``python3 benchmarks/bench_kernels.py``. Each row times one
kernel on a training-sized input under both backends; the last row is a
full generator plus discriminator update at the default network size.
"""
import argparse
import timeit

import numpy as np

from airfoilgan import _pykernels, kernels
from airfoilgan.gan import GanConfig, train
from airfoilgan.smoothing import savgol_weights
from airfoilgan.synth import synthetic_corpus

try:
    from airfoilgan import _ckernels
except ImportError:
    _ckernels = None


def _cases(batch):
    rng = np.random.default_rng(0)
    y = rng.normal(size=(batch, 38))
    w = np.array(savgol_weights(5, 2))
    n_params = 134 * 256 + 2 * 256 * 256 + 256 * 38
    p, g = rng.normal(size=n_params), rng.normal(size=n_params)
    m, v = np.zeros(n_params), np.zeros(n_params)
    return {
        "uniform x8192": lambda k: k.splitmix64_uniform(1, 8192),
        "normal x8192": lambda k: k.box_muller_normal(1, 8192),
        "mean3": lambda k: k.cyclic_mean3(y),
        "smoothing loss+grad": lambda k: k.cyclic_smoothing(y, 10.0),
        "savgol correlate": lambda k: k.cyclic_correlate(y, w),
        f"adam ({n_params} params)": lambda k: k.adam_update(p, g, m, v, 1e-4, 0.9, 0.999, 0.1, 0.001, 1e-8),
    }


def _best(fn, number, repeat=5):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def _train_step(module, dataset, epochs):
    old = kernels._impl
    kernels._impl = module
    try:
        cfg = GanConfig(epochs=epochs, seed=0)
        steps = epochs * -(-len(dataset) // cfg.batch_size)
        return _best(lambda: train(dataset, cfg), 1, repeat=3) / steps
    finally:
        kernels._impl = old


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--number", type=int, default=200)
    ap.add_argument("--epochs", type=int, default=5, help="epochs for the training-step row")
    args = ap.parse_args(argv)

    modules = [("python", _pykernels)]
    if _ckernels is not None:
        modules.append(("cython", _ckernels))
    else:
        print("compiled extension not built; showing the numpy backend only")

    header = f"{'kernel':<28}" + "".join(f"{name + ' (us)':>16}" for name, _ in modules)
    if len(modules) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, fn in _cases(args.batch).items():
        times = [_best(lambda: fn(mod), args.number) * 1e6 for _, mod in modules]
        row = f"{label:<28}" + "".join(f"{t:>16.1f}" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    dataset, _, _ = synthetic_corpus(32, seed=0)
    times = [_train_step(mod, dataset, args.epochs) * 1e6 for _, mod in modules]
    row = f"{'training step':<28}" + "".join(f"{t:>16.1f}" for t in times)
    if len(times) == 2:
        row += f"{times[0] / times[1]:>9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
