"""
Synthetic Cube++-style records with planted illuminants.

Scenes satisfy the Gray-World assumption exactly up to integer rounding:
every channel of the usable region holds a permutation of the same
reflectance multiset, so per-channel means and maxima are proportional to
the planted illuminant. The SpyderCube sits in a masked corner polygon.
"""
import math

import numpy as np

from benchmark.color import normalize
from benchmark.dataset import SceneProperties, SceneRecord, polygon_mask, write_record

# Sensor levels of the generated rasters
BLACK_LEVEL = 2048
SATURATION_LEVEL = 15000

# Reflectances are drawn from this range so no pixel is black-clipped
REFLECTANCE_RANGE = (0.2, 1.0)

# Brightest channel of a lit white surface, as a fraction of the sensor range
EXPOSURE = 0.85


def random_illuminant(rng):
    """
    Plausible illuminant: green-dominant with red and blue in [0.3, 0.9].
    """
    return normalize((rng.uniform(0.3, 0.9), 1.0, rng.uniform(0.3, 0.9)))


def rotate_away(chromaticity, angle_deg, rng):
    """
    Return a chromaticity at exactly ``angle_deg`` (recovery angle) from the input.

    The rotation direction is random; small angles around plausible
    illuminants keep every component positive.
    """
    u = chromaticity.as_array()
    w = rng.normal(size=3)
    v = w - np.dot(w, u) * u
    v /= np.linalg.norm(v)
    theta = math.radians(angle_deg)
    return normalize(math.cos(theta) * u + math.sin(theta) * v)


def cube_polygon(height, width):
    """
    Mask polygon for a SpyderCube in the bottom-right corner (a diamond).
    """
    size = max(4, min(height, width) // 4)
    cx, cy = width - size, height - size
    half = size // 2
    return ((cx, cy - half), (cx + half, cy), (cx, cy + half), (cx - half, cy))


def _paint_region(raster, region, illuminant, rng):
    """
    Fill the region so every channel holds a permutation of one reflectance set.
    """
    count = int(region.sum())
    if count == 0:
        return
    reflectance = rng.uniform(*REFLECTANCE_RANGE, size=count)
    scale = EXPOSURE * (SATURATION_LEVEL - BLACK_LEVEL)
    for channel, component in enumerate(illuminant.as_tuple()):
        values = np.round(scale * component * rng.permutation(reflectance))
        raster[..., channel][region] = BLACK_LEVEL + values


def _paint_cube(raster, cube, left_gt, right_gt, width):
    """
    Paint the masked cube: its left half lit by the left face, right half by the right.
    """
    columns = np.arange(width)[None, :]
    center = np.nonzero(cube)[1].mean() if cube.any() else 0
    scale = 0.5 * (SATURATION_LEVEL - BLACK_LEVEL)
    faces = ((cube & (columns < center), left_gt), (cube & (columns >= center), right_gt))
    for face, gt in faces:
        for channel, component in enumerate(gt.as_tuple()):
            raster[..., channel][face] = BLACK_LEVEL + round(scale * component)


def make_record(
    record_id,
    illuminant,
    rng,
    face_angle=0.0,
    right_illuminant=None,
    indoor=None,
    daytime=None,
    height=32,
    width=48,
    with_cube=True,
    dominant=False,
):
    """
    Build one synthetic record.

    - Single-illuminant scenes are lit by ``illuminant``; the right face
      ground truth is planted ``face_angle`` degrees away from it.
    - With ``right_illuminant`` the right image half is lit by it instead and
      the face ground truths are the two illuminants.
    - ``dominant`` stores the illuminant as an explicit dominant source.
    """
    raster = np.zeros((height, width, 3), dtype=np.uint16)
    vertices = cube_polygon(height, width) if with_cube else ()
    cube = polygon_mask(height, width, vertices)

    if right_illuminant is None:
        left_gt = illuminant
        right_gt = rotate_away(illuminant, face_angle, rng) if face_angle else illuminant
        _paint_region(raster, ~cube, illuminant, rng)
    else:
        left_gt, right_gt = illuminant, right_illuminant
        left_half = np.broadcast_to(np.arange(width) < width // 2, (height, width))
        _paint_region(raster, ~cube & left_half, illuminant, rng)
        _paint_region(raster, ~cube & ~left_half, right_illuminant, rng)

    _paint_cube(raster, cube, left_gt, right_gt, width)

    return SceneRecord(
        id=record_id,
        raster=raster,
        black_level=BLACK_LEVEL,
        saturation_level=SATURATION_LEVEL,
        left_gt=left_gt,
        right_gt=right_gt,
        dominant_gt=illuminant if dominant else None,
        properties=SceneProperties(indoor=indoor, daytime=daytime, sharp=True),
        cube_mask=vertices,
        metadata={"iso": 100, "exposure_time": 0.01},
    )


def build_dataset(
    directory,
    count=20,
    seed=0,
    two_fraction=0.2,
    indoor_fraction=0.3,
    height=32,
    width=48,
):
    """
    Write ``count`` synthetic records into ``directory`` and return them.

    - Roughly ``two_fraction`` of the scenes are two-region scenes whose face
      angle is at least 3 degrees; the rest plant face angles below 1.5 degrees.
    - Roughly ``indoor_fraction`` of the scenes are labeled indoor.
    """
    rng = np.random.default_rng(seed)
    records = []
    for index in range(count):
        record_id = f"{index + 1:05d}"
        illuminant = random_illuminant(rng)
        indoor = bool(rng.random() < indoor_fraction)
        daytime = "night" if indoor else "day"

        if rng.random() < two_fraction:
            right = rotate_away(illuminant, rng.uniform(3.0, 8.0), rng)
            record = make_record(
                record_id, illuminant, rng, right_illuminant=right,
                indoor=indoor, daytime=daytime, height=height, width=width,
            )
        else:
            record = make_record(
                record_id, illuminant, rng, face_angle=rng.uniform(0.0, 1.5),
                indoor=indoor, daytime=daytime, height=height, width=width,
            )

        write_record(directory, record)
        records.append(record)
    return records
