"""Accuracy and diversity scores for a set of generated airfoils."""
from dataclasses import dataclass

import numpy as np

from .dataset import ClassLabel
from .errors import DomainError
from .geometry import N_COORDS, thickness


@dataclass(frozen=True)
class SampleSet:
    samples: np.ndarray
    label: ClassLabel

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.samples, dtype=np.float64))
        if s.shape[0] == 0 or s.shape[1] != N_COORDS:
            raise DomainError(f"need a nonempty (N, {N_COORDS}) sample array, got {s.shape}")
        object.__setattr__(self, "samples", s)


def _batch(samples):
    s = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if s.shape[0] == 0:
        raise DomainError("empty sample set")
    return s


def mean_shape(samples):
    return _batch(samples).mean(axis=0)


def acc_tau(samples, label, tau_threshold=0.12):
    """Percentage of samples on the thickness side the class demands."""
    if tau_threshold <= 0:
        raise DomainError(f"threshold must be positive, got {tau_threshold}")
    if isinstance(label, str):
        label = ClassLabel.from_code(label)
    high = thickness(_batch(samples)) > tau_threshold
    ok = high if label.thick_high else ~high
    return 100.0 * float(np.mean(ok))


def sigma_tau(samples):
    """Population std of thickness after dividing by the set's maximum."""
    tau = thickness(_batch(samples))
    top = tau.max()
    if top <= 0:
        raise DomainError("maximum thickness is not positive; cannot rescale")
    return float(np.std(tau / top))


def shape_diversity(samples):
    """Mean Euclidean distance of the samples from their mean shape."""
    s = _batch(samples)
    return float(np.mean(np.linalg.norm(s - s.mean(axis=0), axis=1)))


def evaluate(sample_set, tau_threshold=0.12):
    s = sample_set.samples
    return {
        "class": sample_set.label.code,
        "acc_tau": acc_tau(s, sample_set.label, tau_threshold),
        "sigma_tau": sigma_tau(s),
        "S": shape_diversity(s),
    }
