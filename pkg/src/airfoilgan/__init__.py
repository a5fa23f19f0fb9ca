"""Conditional GAN for airfoil curves with a cyclic smoothing loss."""
from .dataset import ALL_CLASSES, ClassLabel, LabeledDataset, assign_classes, encode_label
from .gan import GanConfig, GanModel, generate, sample_class, train
from .geometry import cosine_stations, naca4, parse_selig, resample, thickness
from .kernels import BACKEND
from .metrics import acc_tau, mean_shape, shape_diversity, sigma_tau
from .smoothing import (
    moving_average_cyclic,
    savitzky_golay,
    smoothing_loss,
    smoothing_loss_grad,
)

__version__ = "0.1.0"
