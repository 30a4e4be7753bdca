import math

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from benchmark.color import RawEstimate, normalize
from benchmark.exceptions import NonPositiveComponent, ZeroVector
from benchmark.validators import (
    contains_non_finite,
    contains_non_number,
    contains_non_positive,
    is_all_zero,
    validate_fraction,
    validate_minkowski_p,
    validate_polygon,
    validate_rgb_triple,
)


class PredicateTests(SimpleTestCase):
    def test_non_number(self):
        self.assertTrue(contains_non_number([1.0, "2", 3.0]))
        self.assertTrue(contains_non_number([1.0, True, 3.0]))
        self.assertFalse(contains_non_number([1, 2.5, 3]))

    def test_non_finite(self):
        self.assertTrue(contains_non_finite([1.0, math.nan, 3.0]))
        self.assertTrue(contains_non_finite([1.0, math.inf, 3.0]))
        self.assertFalse(contains_non_finite([1.0, 0.0, -3.0]))

    def test_non_positive(self):
        self.assertTrue(contains_non_positive([1.0, 0.0, 1.0]))
        self.assertTrue(contains_non_positive([1.0, -1e-12, 1.0]))
        self.assertFalse(contains_non_positive([1e-12, 1.0, 2.0]))

    def test_all_zero(self):
        self.assertTrue(is_all_zero([0.0, 0, -0.0]))
        self.assertFalse(is_all_zero([0.0, 0.0, 1e-300]))

    def test_normalize_refuses_what_the_predicates_flag(self):
        with self.assertRaises(ZeroVector):
            normalize((0.0, 0.0, 0.0))
        with self.assertRaises(NonPositiveComponent):
            normalize((1.0, 0.0, 1.0))
        with self.assertRaises(NonPositiveComponent):
            normalize((1.0, math.inf, 1.0))
        with self.assertRaises(ZeroVector):
            RawEstimate(0.0, 0.0, 0.0)


class FieldValidatorTests(SimpleTestCase):
    """
    Tests for the ValidationError-raising field validators.
    """

    def assertInvalid(self, code, validator, *args):
        with self.assertRaises(ValidationError) as context:
            validator(*args)
        self.assertEqual(context.exception.code, code)

    def test_rgb_triple(self):
        validate_rgb_triple([0.5, 1.0, 0.0])
        self.assertInvalid("invalid_triple", validate_rgb_triple, [1.0, 1.0])
        self.assertInvalid("invalid_triple", validate_rgb_triple, [1.0, "x", 1.0])
        self.assertInvalid("invalid_triple", validate_rgb_triple, [1.0, math.nan, 1.0])

    def test_fraction(self):
        validate_fraction(1.0)
        self.assertInvalid("invalid_fraction", validate_fraction, 0.0)
        self.assertInvalid("invalid_fraction", validate_fraction, 1.01)

    def test_minkowski_p(self):
        validate_minkowski_p(1.0)
        self.assertInvalid("invalid_p", validate_minkowski_p, 0.99)
        self.assertInvalid("invalid_p", validate_minkowski_p, math.inf)

    def test_polygon(self):
        validate_polygon([[0, 0], [8, 0], [8, 6]], 8, 6)
        self.assertInvalid("invalid_polygon", validate_polygon, [[0, 0], [1, 1]], 8, 6)
        self.assertInvalid("polygon_out_of_bounds", validate_polygon, [[0, 0], [9, 0], [8, 6]], 8, 6)
