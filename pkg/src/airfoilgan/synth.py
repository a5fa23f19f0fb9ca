"""Synthetic NACA 4-digit training corpus.

Each airfoil gets one made-up performance record whose cl/cd and
angle of attack sit clearly on the requested side of the thresholds,
and its NACA thickness is drawn so the measured thickness does too.
Labels then come out of :func:`~airfoilgan.dataset.assign_classes`
exactly as they would for real records.
"""
import numpy as np

from .dataset import ALL_CLASSES, PerformanceRecord, Thresholds, assign_classes
from .geometry import naca4, thickness
from .rng import Rng

THIN_RANGE = (0.06, 0.11)
THICK_RANGE = (0.13, 0.20)
CAMBER_RANGE = (0.0, 0.06)
CAMBER_POS_RANGE = (0.2, 0.6)
TAU_MARGIN = 0.004


def _draw_airfoil(rng, thick_high, tau_threshold):
    lo, hi = THICK_RANGE if thick_high else THIN_RANGE
    while True:
        m = rng.uniform(*CAMBER_RANGE)
        p = rng.uniform(*CAMBER_POS_RANGE)
        t = rng.uniform(lo, hi)
        y = naca4(m, p, t)
        tau = float(thickness(y))
        if (tau > tau_threshold + TAU_MARGIN) if thick_high else (tau < tau_threshold - TAU_MARGIN):
            return (m, p, t), y


def synthetic_corpus(count_per_class, seed=0, thresholds=Thresholds()):
    """Build ``8 * count_per_class`` labelled NACA airfoils.

    Returns ``(dataset, airfoils, records)`` where ``airfoils`` is the list
    of ``(id, y)`` pairs fed to class assignment.
    """
    if count_per_class < 1:
        raise ValueError("count_per_class must be >= 1")
    rng = Rng(seed)
    airfoils, records = [], []
    for k in range(count_per_class):
        # round-robin over the classes so partial corpora stay balanced
        for label in ALL_CLASSES:
            (m, p, t), y = _draw_airfoil(rng, label.thick_high, thresholds.tau)
            aid = f"naca-m{m:.4f}-p{p:.3f}-t{t:.4f}-{label.code}-{k:04d}"
            clcd = thresholds.clcd * (1.5 if label.perf_high else 0.5)
            alpha = thresholds.alpha * (1.5 if label.alpha_high else 0.5)
            airfoils.append((aid, y))
            records.append(PerformanceRecord(aid, 6e6, 0.1, alpha, clcd * 0.01, 0.01))
    return assign_classes(airfoils, records, thresholds), airfoils, records
