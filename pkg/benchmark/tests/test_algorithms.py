from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase

from benchmark.algorithms import (
    EstimatorConfig,
    constant_baseline,
    estimator_names,
    get_estimator,
    gray_edge,
    gray_world,
    max_rgb,
    shades_of_gray,
    two_illuminant_baseline,
)
from benchmark.color import WHITE, normalize, recovery_error, reproduction_error, two_illuminant_error
from benchmark.dataset import SceneRecord, single_ground_truth
from benchmark.exceptions import (
    ArityMismatch,
    DegenerateGradient,
    EmptySample,
    EmptyUsableRegion,
    InvalidConfig,
    UnknownEstimator,
)
from benchmark.stats import mean
from benchmark.synthetic import make_record, random_illuminant


def raster_record(raster, saturation_level=15000, cube_mask=()):
    return SceneRecord(
        id="fixture",
        raster=np.asarray(raster, dtype=np.uint16),
        black_level=2048,
        saturation_level=saturation_level,
        left_gt=WHITE,
        right_gt=WHITE,
        cube_mask=cube_mask,
    )


def direction_error(a, b):
    return recovery_error(normalize(a), normalize(b))


class ConfigTests(SimpleTestCase):
    def test_defaults(self):
        config = EstimatorConfig()
        self.assertEqual(
            (config.minkowski_p, config.derivative_sigma, config.saturation_fraction), (6.0, 2.0, 0.95)
        )

    def test_invalid_values(self):
        for kwargs in (
            {"minkowski_p": 0.5},
            {"derivative_sigma": -1.0},
            {"saturation_fraction": 0.0},
            {"saturation_fraction": 1.5},
            {"epsilon_floor": -1e-6},
        ):
            with self.assertRaises(InvalidConfig):
                EstimatorConfig(**kwargs)

    def test_from_settings_ignores_missing_overrides(self):
        config = EstimatorConfig.from_settings(minkowski_p=2.0, derivative_sigma=None)
        self.assertEqual(config.minkowski_p, 2.0)
        self.assertEqual(config.derivative_sigma, 2.0)


class GrayWorldFamilyTests(SimpleTestCase):
    """
    Tests for Gray-World, max-RGB and Shades-of-Gray.
    """

    def setUp(self):
        self.config = EstimatorConfig()
        self.rng = np.random.default_rng(21)

    def test_uniform_image(self):
        record = raster_record(np.full((6, 6, 3), (3048, 4048, 2548)))
        for estimator in (gray_world, max_rgb, shades_of_gray):
            estimate = estimator(record, self.config)
            self.assertEqual(estimate.as_tuple(), (1000.0, 2000.0, 500.0))

    def test_gray_world_on_synthetic_scenes(self):
        errors = []
        for index in range(50):
            record = make_record(f"{index:05d}", random_illuminant(self.rng), self.rng, height=24, width=32)
            estimate = gray_world(record, self.config)
            errors.append(reproduction_error(single_ground_truth(record), normalize(estimate)))
        self.assertLess(mean(errors), 0.1)

    def test_gray_world_over_unmasked_half(self):
        raster = np.full((4, 8, 3), 3048, dtype=np.uint16)
        raster[:, 4:] = (4048, 3048, 2548)
        record = raster_record(raster, cube_mask=((0, 0), (4, 0), (4, 4), (0, 4)))
        self.assertEqual(gray_world(record, self.config).as_tuple(), (2000.0, 1000.0, 500.0))

    def test_max_rgb_finds_white_patch(self):
        illuminant = normalize((0.6, 1.0, 0.5))
        raster = np.full((10, 10, 3), 2048, dtype=np.uint16)
        raster[...] = 2048 + np.round(4000 * illuminant.as_array() * 0.3).astype(np.uint16)
        raster[4:6, 4:6] = 2048 + np.round(9000 * illuminant.as_array()).astype(np.uint16)
        record = raster_record(raster)
        self.assertLess(direction_error(max_rgb(record, self.config), illuminant), 0.01)

    def test_p_equal_one_is_gray_world(self):
        record = make_record("p1", random_illuminant(self.rng), self.rng)
        config = replace(self.config, minkowski_p=1.0)
        expected = np.array(gray_world(record, config).as_tuple())
        actual = np.array(shades_of_gray(record, config).as_tuple())
        np.testing.assert_allclose(actual, expected, rtol=1e-9)

    def test_large_p_approaches_max_rgb(self):
        record = make_record("pinf", random_illuminant(self.rng), self.rng, height=16, width=24)
        config = replace(self.config, minkowski_p=1e4)
        error = direction_error(shades_of_gray(record, config), max_rgb(record, config))
        self.assertLess(error, 0.05)

    def test_power_mean_of_two_values(self):
        raster = np.full((2, 2, 3), 2048 + 1000, dtype=np.uint16)
        raster[0, :] = 2048 + 2000
        record = raster_record(raster)
        expected = ((1000.0 ** 6 + 2000.0 ** 6) / 2) ** (1 / 6)
        estimate = shades_of_gray(record, self.config)
        for component in estimate.as_tuple():
            self.assertAlmostEqual(component, expected, delta=1e-9 * expected)

    def test_fully_masked_image(self):
        record = raster_record(np.full((4, 4, 3), 3000), cube_mask=((0, 0), (4, 0), (4, 4), (0, 4)))
        with self.assertRaises(EmptyUsableRegion):
            gray_world(record, self.config)


class GrayEdgeTests(SimpleTestCase):
    """
    Tests for the first-order Gray-Edge estimator.
    """

    def test_linear_ramp(self):
        slopes = np.array([30, 60, 20])
        columns = np.arange(20)
        raster = np.empty((12, 20, 3), dtype=np.uint16)
        raster[...] = 2148 + columns[None, :, None] * slopes[None, None, :]
        record = raster_record(raster)

        config = EstimatorConfig(minkowski_p=1.0, derivative_sigma=0.0)
        self.assertLess(direction_error(gray_edge(record, config), slopes), 1e-9)

    def test_uniform_image_is_degenerate(self):
        record = raster_record(np.full((32, 32, 3), 3000))
        for sigma in (0.0, 2.0):
            with self.assertRaises(DegenerateGradient):
                gray_edge(record, EstimatorConfig(derivative_sigma=sigma))

    def test_tiny_raster(self):
        record = raster_record(np.full((2, 2, 3), 3000))
        with self.assertRaises(EmptyUsableRegion):
            gray_edge(record, EstimatorConfig())

    def test_smoothing_reduces_noise_gradients(self):
        for seed in range(3):
            rng = np.random.default_rng(seed)
            raster = 4000 + rng.integers(-500, 500, size=(40, 40, 3))
            record = raster_record(raster)
            sharp = gray_edge(record, EstimatorConfig(minkowski_p=2.0, derivative_sigma=0.0))
            smooth = gray_edge(record, EstimatorConfig(minkowski_p=2.0, derivative_sigma=2.0))
            self.assertTrue(all(s < r for s, r in zip(smooth.as_tuple(), sharp.as_tuple())))

    def test_recovers_illuminant_of_gray_texture(self):
        rng = np.random.default_rng(22)
        illuminant = random_illuminant(rng)
        reflectance = rng.uniform(0.2, 1.0, size=(32, 48))
        raster = 2048 + np.round(10000 * reflectance[..., None] * illuminant.as_array())
        estimate = gray_edge(raster_record(raster), EstimatorConfig(derivative_sigma=1.0))
        self.assertLess(direction_error(estimate, illuminant), 0.5)


class ExposureInvarianceTests(SimpleTestCase):
    def test_doubling_exposure_keeps_direction(self):
        rng = np.random.default_rng(23)
        record = make_record("exp", random_illuminant(rng), rng)
        record = replace(record, saturation_level=65535)
        doubled = replace(
            record,
            raster=(2048 + (record.raster.astype(np.int64) - 2048) * 2).astype(np.uint16),
        )

        config = EstimatorConfig()
        for estimator in (gray_world, max_rgb, shades_of_gray, gray_edge):
            a = estimator(record, config)
            b = estimator(doubled, config)
            self.assertLessEqual(direction_error(a, b), 1e-9, estimator.__name__)


class ConstantBaselineTests(SimpleTestCase):
    def test_single_training_ground_truth(self):
        gt = normalize((0.5, 1.0, 0.4))
        self.assertLess(recovery_error(constant_baseline([gt]), gt), 1e-12)

    def test_symmetric_pair(self):
        a = normalize((1.0, 1e-3, 1e-3))
        b = normalize((1e-3, 1.0, 1e-3))
        result = constant_baseline([a, b])
        self.assertAlmostEqual(result.r, result.g, delta=1e-15)
        self.assertGreater(result.b, 0)

    def test_empty_training_set(self):
        with self.assertRaises(EmptySample):
            constant_baseline([])

    def test_constant_estimator_needs_training(self):
        with self.assertRaises(InvalidConfig):
            get_estimator("constant")


class TwoIlluminantBaselineTests(SimpleTestCase):
    """
    Tests for the midline split and duplicate-answer baselines.
    """

    def setUp(self):
        self.rng = np.random.default_rng(24)
        self.left = random_illuminant(self.rng)
        self.right = normalize(self.left.as_array() * (1.3, 1.0, 0.7))

    def test_split_recovers_both_illuminants(self):
        record = make_record("two", self.left, self.rng, right_illuminant=self.right)
        first, second = get_estimator("split_gray_world").estimate(record)
        self.assertLess(direction_error(first, self.left), 0.5)
        self.assertLess(direction_error(second, self.right), 0.5)

    def test_uniform_scene_gives_equal_halves(self):
        raster = np.full((8, 8, 3), (3048, 4048, 2548), dtype=np.uint16)
        first, second = get_estimator("split_gray_world").estimate(raster_record(raster))
        self.assertLessEqual(direction_error(first, second), 1e-6)

    def test_duplicate_mode(self):
        record = make_record("dup", self.left, self.rng, right_illuminant=self.right)
        first, second = get_estimator("dup_gray_world").estimate(record)
        self.assertEqual(first, second)

        a = normalize(first)
        expected = reproduction_error(self.left, a) ** 2 + reproduction_error(self.right, a) ** 2
        self.assertEqual(two_illuminant_error(self.left, self.right, a, a), expected)

    def test_inner_must_be_single(self):
        split = get_estimator("split_gray_world")
        with self.assertRaises(ArityMismatch):
            two_illuminant_baseline(raster_record(np.full((4, 4, 3), 3000)), split)


class EstimatorLookupTests(SimpleTestCase):
    def test_known_names(self):
        for name in ("gray_world", "max_rgb", "shades_of_gray", "gray_edge"):
            self.assertEqual(get_estimator(name).arity, 1)
        self.assertEqual(get_estimator("split_max_rgb").arity, 2)
        self.assertEqual(get_estimator("dup_gray_edge").arity, 2)
        self.assertEqual(get_estimator("constant", training_gts=[WHITE]).arity, 1)

    def test_unknown_name(self):
        for name in ("nope", "split_nope", "split_split_gray_world"):
            with self.assertRaises(UnknownEstimator):
                get_estimator(name)

    def test_listed_names_all_resolve(self):
        names = estimator_names()
        self.assertIn("split_gray_edge", names)
        for name in names:
            self.assertIn(get_estimator(name, training_gts=[WHITE]).arity, (1, 2))

    def test_unknown_name_lists_the_choices(self):
        with self.assertRaisesMessage(UnknownEstimator, "gray_world, max_rgb"):
            get_estimator("grey_world")

    def test_estimates_are_deterministic(self):
        rng = np.random.default_rng(25)
        record = make_record("det", random_illuminant(rng), rng)
        estimator = get_estimator("gray_edge")
        self.assertEqual(estimator.estimate(record), estimator.estimate(record))
