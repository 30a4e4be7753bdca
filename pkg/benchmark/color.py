"""
Illuminant chromaticities and the challenge's angular error metrics.

All angles are in degrees. Chromaticities are stored L2-normalized with
strictly positive components so the element-wise quotient in the
reproduction error is always defined.
"""
import math
from dataclasses import dataclass

import numpy as np

from benchmark.exceptions import NonPositiveComponent, ZeroVector
from benchmark.validators import contains_non_finite, contains_non_positive, is_all_zero

# Tolerance on the stored unit norm
NORM_TOLERANCE = 1e-9

# Fraction of the largest component used when the epsilon floor is requested
# without an explicit value
DEFAULT_EPSILON_FLOOR = 1e-6

# Norm deviation (a few ulps) under which a vector counts as already normalized
IDEMPOTENCE_SLACK = 1e-15


@dataclass(frozen=True)
class RawEstimate:
    """
    Unnormalized illuminant estimate as produced by an estimator or read from
    a submission file.

    Components are non-negative and not all zero.
    """

    r: float
    g: float
    b: float

    def __post_init__(self):
        for value in (self.r, self.g, self.b):
            if not math.isfinite(value):
                raise NonPositiveComponent(f"Estimate component is not finite: {value!r}")
            if value < 0:
                raise NonPositiveComponent(f"Estimate component is negative: {value!r}")
        if is_all_zero(self.as_tuple()):
            raise ZeroVector("Estimate is the zero vector.")

    @classmethod
    def from_iterable(cls, values):
        r, g, b = (float(value) for value in values)
        return cls(r, g, b)

    def as_tuple(self):
        return (self.r, self.g, self.b)


@dataclass(frozen=True)
class Chromaticity:
    """
    Unit-norm, strictly positive RGB direction of an illuminant.

    Build instances through ``normalize`` unless the components are already
    normalized; the constructor only validates.
    """

    r: float
    g: float
    b: float

    def __post_init__(self):
        components = (self.r, self.g, self.b)
        if contains_non_finite(components) or contains_non_positive(components):
            raise NonPositiveComponent(
                f"Chromaticity components must be strictly positive: {components!r}"
            )
        norm = math.hypot(*components)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"Chromaticity is not unit norm (norm={norm!r}).")

    def as_tuple(self):
        return (self.r, self.g, self.b)

    def as_array(self):
        return np.array(self.as_tuple(), dtype=np.float64)

    def __iter__(self):
        return iter(self.as_tuple())


def normalize(v, epsilon_floor=0.0):
    """
    Scale an estimate to unit Euclidean norm.

    - Accepts a RawEstimate, a Chromaticity or any 3-sequence of numbers.
    - ``epsilon_floor`` > 0 opts into flooring every component at
      ``epsilon_floor * max(v)`` before normalizing; with the default 0 a
      zero or negative component raises NonPositiveComponent.
    """
    values = v.as_tuple() if hasattr(v, "as_tuple") else tuple(float(x) for x in v)
    if len(values) != 3:
        raise ValueError(f"Expected three components, got {len(values)}.")

    if contains_non_finite(values):
        raise NonPositiveComponent(f"Estimate has non-finite components: {values!r}")

    if is_all_zero(values):
        raise ZeroVector("Cannot normalize the zero vector.")

    if epsilon_floor > 0:
        floor = epsilon_floor * max(values)
        if floor > 0:
            values = tuple(max(x, floor) for x in values)

    if contains_non_positive(values):
        raise NonPositiveComponent(
            f"Estimate has a zero or negative component: {values!r}"
        )

    norm = math.hypot(*values)

    # Leave already-normalized input untouched so normalization is idempotent
    if abs(norm - 1.0) <= IDEMPOTENCE_SLACK:
        return Chromaticity(*values)
    return Chromaticity(values[0] / norm, values[1] / norm, values[2] / norm)


# The vector of perfectly corrected white color
WHITE = Chromaticity(*(1 / math.sqrt(3),) * 3)


def _angle_deg(u, v):
    """
    Angle between two 3-vectors in degrees.

    Uses atan2(|u x v|, u . v), which equals the clamped arccos of the
    normalized inner product but keeps full precision near 0 degrees.
    """
    cx = u[1] * v[2] - u[2] * v[1]
    cy = u[2] * v[0] - u[0] * v[2]
    cz = u[0] * v[1] - u[1] * v[0]
    dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
    return math.degrees(math.atan2(math.hypot(cx, cy, cz), dot))


def reproduction_error(gt, est):
    """
    Reproduction angular error between a ground truth and an estimate.

    The angle between white and the ground truth corrected by the estimate
    (element-wise quotient gt / est). Scale-invariant in both arguments.
    """
    quotient = (gt.r / est.r, gt.g / est.g, gt.b / est.b)
    return _angle_deg((1.0, 1.0, 1.0), quotient)


def recovery_error(gt, est):
    """
    Plain angle between the ground-truth and the estimated illuminant vectors.
    """
    return _angle_deg(gt.as_tuple(), est.as_tuple())


def two_illuminant_error(gt1, gt2, e1, e2):
    """
    Squared-sum reproduction error for a two-illuminant scene, in squared degrees.

    Takes the better of the two ways of pairing estimates with ground truths,
    so the result is symmetric under swapping either pair.
    """
    straight = reproduction_error(gt1, e1) ** 2 + reproduction_error(gt2, e2) ** 2
    crossed = reproduction_error(gt1, e2) ** 2 + reproduction_error(gt2, e1) ** 2
    return min(straight, crossed)


def reproduction_errors(gts, ests):
    """
    Vectorized reproduction error over (N, 3) arrays of positive triples.
    """
    gts = np.asarray(gts, dtype=np.float64)
    ests = np.asarray(ests, dtype=np.float64)
    quotient = gts / ests
    white = np.ones_like(quotient)
    cross = np.linalg.norm(np.cross(white, quotient), axis=-1)
    dot = quotient.sum(axis=-1)
    return np.degrees(np.arctan2(cross, dot))


def recovery_errors(gts, ests):
    """
    Vectorized recovery error over (N, 3) arrays.
    """
    gts = np.asarray(gts, dtype=np.float64)
    ests = np.asarray(ests, dtype=np.float64)
    cross = np.linalg.norm(np.cross(gts, ests), axis=-1)
    dot = (gts * ests).sum(axis=-1)
    return np.degrees(np.arctan2(cross, dot))


def mean_chromaticity(chromaticities):
    """
    Normalized component-wise mean of a non-empty collection of chromaticities.
    """
    stacked = np.array([c.as_tuple() for c in chromaticities], dtype=np.float64)
    if stacked.size == 0:
        raise ValueError("Cannot average an empty collection of chromaticities.")
    return normalize(stacked.mean(axis=0))
