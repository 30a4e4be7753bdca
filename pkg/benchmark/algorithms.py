"""
Statistics-based baseline illumination estimators.

Every estimator works on black-level-subtracted linear data restricted to
the usable region (outside the SpyderCube mask, no black-clipped or
saturated channels) and returns an unnormalized RawEstimate. An optional
boolean ``region`` further restricts the pixels that enter the statistic,
which is how the two-illuminant baseline runs an estimator on one half of
the image.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import cv2
import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError

from benchmark.color import RawEstimate, mean_chromaticity
from benchmark.dataset import linear_image, usable_mask
from benchmark.exceptions import (
    ArityMismatch,
    DegenerateGradient,
    EmptySample,
    EmptyUsableRegion,
    InvalidConfig,
    UnknownEstimator,
)
from benchmark.validators import validate_fraction, validate_minkowski_p

logger = logging.getLogger(__name__)

# Prefixes that turn an arity-1 estimator into a two-illuminant one
SPLIT_PREFIX = "split_"
DUPLICATE_PREFIX = "dup_"

# Gradient magnitudes at or below this fraction of the image peak count as zero
# (blurring a flat image leaves rounding residue)
GRADIENT_FLOOR = 1e-9


@dataclass(frozen=True)
class EstimatorConfig:
    """
    Parameters shared by the statistics-based estimators.

    - minkowski_p: norm for Shades-of-Gray and Gray-Edge (>= 1)
    - derivative_sigma: Gaussian pre-smoothing for Gray-Edge, in pixels (>= 0)
    - saturation_fraction: clipped-pixel threshold as a fraction of the
      saturation level, in (0, 1]
    - epsilon_floor: opt-in component floor applied when the estimate is
      normalized (0 disables it)
    """

    minkowski_p: float = 6.0
    derivative_sigma: float = 2.0
    saturation_fraction: float = 0.95
    epsilon_floor: float = 0.0

    def __post_init__(self):
        try:
            validate_minkowski_p(self.minkowski_p)
            validate_fraction(self.saturation_fraction)
        except ValidationError as exc:
            raise InvalidConfig(exc.messages[0]) from exc

        if not math.isfinite(self.derivative_sigma) or self.derivative_sigma < 0:
            raise InvalidConfig("derivative_sigma must be a finite number >= 0.")
        if not math.isfinite(self.epsilon_floor) or self.epsilon_floor < 0:
            raise InvalidConfig("epsilon_floor must be a finite number >= 0.")

    @classmethod
    def from_settings(cls, **overrides):
        """
        Build a config from the IEC_* settings, with explicit overrides on top.
        """
        values = {
            "minkowski_p": settings.IEC_MINKOWSKI_P,
            "derivative_sigma": settings.IEC_DERIVATIVE_SIGMA,
            "saturation_fraction": settings.IEC_SATURATION_FRACTION,
            "epsilon_floor": settings.IEC_EPSILON_FLOOR,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class Estimator:
    """
    A named estimator bound to its configuration.

    ``function(record, config, region)`` returns a tuple of ``arity``
    RawEstimates.
    """

    name: str
    arity: int
    config: EstimatorConfig
    function: Callable = field(repr=False, compare=False)

    def estimate(self, record, region=None):
        estimates = self.function(record, self.config, region)
        if len(estimates) != self.arity:
            raise ArityMismatch(
                f"{self.name} returned {len(estimates)} estimates, expected {self.arity}."
            )
        return estimates


def _usable_region(record, config, region=None):
    """
    Return the linear image and the mask of pixels that may enter a statistic.
    """
    usable = usable_mask(record, config.saturation_fraction)
    if region is not None:
        usable &= region
    if not usable.any():
        raise EmptyUsableRegion(f"{record.id}: no usable pixels.")
    return linear_image(record), usable


def _power_mean(values, p):
    """
    Per-channel (mean(x^p))^(1/p) over an (N, 3) array of non-negative values.

    Each channel is scaled by its maximum first so large p cannot overflow.
    """
    peak = values.max(axis=0)
    safe_peak = np.where(peak > 0, peak, 1.0)
    scaled = values / safe_peak
    return np.mean(scaled ** p, axis=0) ** (1.0 / p) * peak


def gray_world(record, config, region=None):
    """
    Per-channel arithmetic mean of the usable pixels.
    """
    image, usable = _usable_region(record, config, region)
    return RawEstimate.from_iterable(image[usable].mean(axis=0))


def max_rgb(record, config, region=None):
    """
    Per-channel maximum of the usable pixels (White-Patch).
    """
    image, usable = _usable_region(record, config, region)
    return RawEstimate.from_iterable(image[usable].max(axis=0))


def shades_of_gray(record, config, region=None):
    """
    Per-channel Minkowski p-mean of the usable pixels.
    """
    image, usable = _usable_region(record, config, region)
    return RawEstimate.from_iterable(_power_mean(image[usable], config.minkowski_p))


def _erode(mask, radius):
    """
    Shrink a mask so every kept pixel has its full (2r+1)^2 neighborhood
    inside the mask; pixels near the image border are dropped.
    """
    kernel = np.ones((2 * radius + 1, 2 * radius + 1), dtype=np.uint8)
    eroded = cv2.erode(
        mask.astype(np.uint8), kernel, borderType=cv2.BORDER_CONSTANT, borderValue=0
    )
    return eroded.astype(bool)


def gradient_magnitude(image, sigma):
    """
    Per-channel gradient magnitude after separable Gaussian smoothing.

    Central differences; the outermost row and column are left at zero.
    Returns (magnitude, stencil_radius) where stencil_radius is how far a
    pixel's value reaches into its neighborhood.
    """
    if sigma > 0:
        radius = math.ceil(3 * sigma)
        size = 2 * radius + 1
        smoothed = cv2.GaussianBlur(
            image, (size, size), sigmaX=sigma, sigmaY=sigma, borderType=cv2.BORDER_REFLECT
        )
    else:
        radius = 0
        smoothed = image

    dx = np.zeros_like(smoothed)
    dy = np.zeros_like(smoothed)
    dx[:, 1:-1] = (smoothed[:, 2:] - smoothed[:, :-2]) / 2
    dy[1:-1, :] = (smoothed[2:, :] - smoothed[:-2, :]) / 2
    return np.sqrt(dx * dx + dy * dy), radius + 1


def gray_edge(record, config, region=None):
    """
    Per-channel Minkowski p-mean of gradient magnitudes (first-order Gray-Edge).

    Only pixels whose whole derivative stencil lies in the usable region
    contribute, so masked and clipped pixels never leak into a gradient.
    """
    if record.height < 3 or record.width < 3:
        raise EmptyUsableRegion(f"{record.id}: Gray-Edge needs at least a 3x3 raster.")

    image, usable = _usable_region(record, config)
    magnitude, reach = gradient_magnitude(image, config.derivative_sigma)

    valid = _erode(usable, reach)
    if region is not None:
        valid &= region
    if not valid.any():
        raise EmptyUsableRegion(f"{record.id}: no pixel has a fully usable derivative stencil.")

    values = magnitude[valid]
    if values.max() <= GRADIENT_FLOOR * max(float(image.max()), 1.0):
        raise DegenerateGradient(f"{record.id}: all gradients are zero.")

    return RawEstimate.from_iterable(_power_mean(values, config.minkowski_p))


def constant_baseline(training_gts):
    """
    Normalized component-wise mean of the training ground truths.

    The same vector is emitted for every test image.
    """
    training_gts = list(training_gts)
    if not training_gts:
        raise EmptySample("The constant baseline needs at least one training ground truth.")
    return mean_chromaticity(training_gts)


def two_illuminant_baseline(record, inner, mode="split"):
    """
    Two estimates per image from an arity-1 estimator.

    - "split": run ``inner`` on the left and right halves of the image,
      split at the horizontal midpoint, mask respected.
    - "duplicate": run ``inner`` on the whole image and return its answer
      twice (the single-answer behavior the two-illuminant metric penalizes).
    """
    if inner.arity != 1:
        raise ArityMismatch(f"{inner.name} returns {inner.arity} estimates; need exactly 1.")

    if mode == "duplicate":
        (estimate,) = inner.estimate(record)
        return estimate, estimate

    if mode != "split":
        raise ValueError(f"Unknown two-illuminant mode {mode!r}.")

    columns = np.arange(record.width)
    left_half = np.broadcast_to(columns < record.width // 2, (record.height, record.width))
    (left,) = inner.estimate(record, region=left_half)
    (right,) = inner.estimate(record, region=~left_half)
    return left, right


# Arity-1 estimators that read the image
IMAGE_ESTIMATORS = {
    "gray_world": gray_world,
    "max_rgb": max_rgb,
    "shades_of_gray": shades_of_gray,
    "gray_edge": gray_edge,
}


def _single(function):
    def run(record, config, region=None):
        return (function(record, config, region),)
    return run


def estimator_names():
    """
    Names accepted by ``get_estimator`` (the split_/dup_ families are open-ended).
    """
    base = sorted(IMAGE_ESTIMATORS) + ["constant"]
    wrapped = [prefix + name for prefix in (SPLIT_PREFIX, DUPLICATE_PREFIX) for name in base]
    return base + wrapped


def duplicate(inner):
    """
    Wrap an arity-1 estimator so it answers twice with the whole-image estimate.
    """
    return Estimator(
        name=DUPLICATE_PREFIX + inner.name,
        arity=2,
        config=inner.config,
        function=lambda record, config, region=None: two_illuminant_baseline(
            record, inner, mode="duplicate"
        ),
    )


def get_estimator(name, config=None, training_gts=None):
    """
    Resolve an estimator name.

    - gray_world, max_rgb, shades_of_gray, gray_edge: image statistics.
    - constant: needs ``training_gts``.
    - split_<name>: midline two-illuminant baseline around <name>.
    - dup_<name>: duplicate-single-answer wrapper around <name>.
    """
    config = config or EstimatorConfig.from_settings()

    if name in IMAGE_ESTIMATORS:
        return Estimator(name=name, arity=1, config=config, function=_single(IMAGE_ESTIMATORS[name]))

    if name == "constant":
        if training_gts is None:
            raise InvalidConfig("The constant estimator needs training ground truths.")
        vector = RawEstimate.from_iterable(constant_baseline(training_gts))
        return Estimator(
            name=name,
            arity=1,
            config=config,
            function=lambda record, config, region=None: (vector,),
        )

    if name.startswith(SPLIT_PREFIX):
        inner = get_estimator(name[len(SPLIT_PREFIX):], config, training_gts)
        if inner.arity != 1:
            raise UnknownEstimator(f"{name}: cannot split a two-illuminant estimator.")
        return Estimator(
            name=name,
            arity=2,
            config=config,
            function=lambda record, config, region=None: two_illuminant_baseline(
                record, inner, mode="split"
            ),
        )

    if name.startswith(DUPLICATE_PREFIX):
        inner = get_estimator(name[len(DUPLICATE_PREFIX):], config, training_gts)
        if inner.arity != 1:
            raise UnknownEstimator(f"{name}: cannot duplicate a two-illuminant estimator.")
        return duplicate(inner)

    raise UnknownEstimator(
        f"Unknown estimator {name!r}. Choose from: {', '.join(estimator_names())}."
    )
