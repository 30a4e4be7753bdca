import math
from numbers import Real

from django.core.exceptions import ValidationError


def contains_non_number(values):
    """
    Check if any of the given values is not a real number (bools are rejected too).
    Returns True if such a value is found, otherwise False.
    """
    for value in values:
        if isinstance(value, bool) or not isinstance(value, Real):
            return True
    return False


def contains_non_finite(values):
    """
    Check if any of the given values is NaN or infinite.
    Returns True if a non-finite value is found, otherwise False.
    """
    for value in values:
        if not math.isfinite(value):
            return True
    return False


def contains_non_positive(values):
    """
    Check if any of the given values is zero or negative.
    Returns True if such a value is found, otherwise False.
    """
    for value in values:
        if value <= 0:
            return True
    return False


def is_all_zero(values):
    """
    Check if every given value equals zero.
    """
    return all(value == 0 for value in values)


def validate_rgb_triple(value):
    """
    Field validator for an RGB triple read from a sidecar or a submission.

    - Must be a list/tuple of exactly three real numbers.
    - All values must be finite.

    Positivity is deliberately not checked here: the caller decides whether a
    zero component is a schema problem or an invalid ground truth.
    """
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ValidationError("Expected an [r, g, b] triple.", code="invalid_triple")

    if contains_non_number(value) or contains_non_finite(value):
        raise ValidationError("RGB components must be finite numbers.", code="invalid_triple")


def validate_fraction(value):
    """
    Field validator for fractions in the half-open interval (0, 1].
    """
    if not 0 < value <= 1:
        raise ValidationError(
            "Value must be greater than 0 and at most 1.", code="invalid_fraction"
        )


def validate_minkowski_p(value):
    """
    Minkowski norms below 1 are not norms, so they are rejected.
    """
    if not math.isfinite(value) or value < 1:
        raise ValidationError("Minkowski p must be a finite number >= 1.", code="invalid_p")


def validate_polygon(value, width, height):
    """
    Validate a mask polygon against the raster size.

    - Must be a list of at least three [x, y] vertices.
    - Every vertex must lie within [0, width] x [0, height].
    """
    if not isinstance(value, (list, tuple)) or len(value) < 3:
        raise ValidationError("A polygon needs at least three vertices.", code="invalid_polygon")

    for vertex in value:
        if (
            not isinstance(vertex, (list, tuple))
            or len(vertex) != 2
            or contains_non_number(vertex)
            or contains_non_finite(vertex)
        ):
            raise ValidationError("Polygon vertices must be [x, y] pairs.", code="invalid_polygon")

        x, y = vertex
        if not (0 <= x <= width and 0 <= y <= height):
            raise ValidationError(
                "Polygon vertex lies outside the raster bounds.", code="polygon_out_of_bounds"
            )
