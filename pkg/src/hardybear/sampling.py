import logging
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from hardybear.config import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)


def disk_samples(n: int, seed: int = DEFAULT_TOLERANCES.seed, r_max: float = 0.95) -> np.ndarray:
    """Reproducible pseudo-random points, uniform by area in the disk of radius `r_max`."""
    rng = np.random.default_rng(seed)
    radius = r_max * np.sqrt(rng.uniform(0.0, 1.0, n))
    angle = rng.uniform(0.0, 2 * np.pi, n)
    return radius * np.exp(1j * angle)


def polar_grid(radii: tuple[float, ...] | list[float], angles: int) -> np.ndarray:
    """Points r e^{2 pi i k / angles} for every r in `radii`, radius-major order."""
    circle = np.exp(2j * np.pi * np.arange(angles) / angles)
    return np.concatenate([r * circle for r in radii])


def boundary_points(n: int = DEFAULT_TOLERANCES.boundary_samples) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def boundary_sup(func: Callable[[np.ndarray], np.ndarray], samples: int = DEFAULT_TOLERANCES.boundary_samples) -> float:
    """Estimate sup_t |func(e^{it})|.

    The maximum over `samples` uniform boundary points is refined once with a
    golden-section search bracketed by the neighbouring samples.

    Args:
        func: Vectorized function of a complex array.
        samples: Number of uniform boundary samples.

    Returns:
        float: The sup-norm estimate.
    """
    values = np.abs(func(boundary_points(samples)))
    k = int(np.argmax(values))
    best = float(values[k])

    step = 2 * np.pi / samples
    t0 = 2 * np.pi * k / samples

    def negative_modulus(t: float) -> float:
        return -float(np.abs(func(np.array([np.exp(1j * t)]))[0]))

    try:
        res = minimize_scalar(negative_modulus, bracket=(t0 - step, t0, t0 + step), method="golden")
    except ValueError:
        # flat maximum, nothing to refine
        return best
    return max(best, -float(res.fun))
