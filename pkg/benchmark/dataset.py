"""
Cube++-style dataset records and challenge track construction.

A dataset is a flat directory of records, each made of three files:
``<id>.png`` (16-bit linear RGB), ``<id>.json`` (ground truths, labels,
capture metadata) and an optional ``<id>.jpg`` preview that is ignored.
"""
import json
import logging
from dataclasses import dataclass, field

import cv2
import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.db import models

from benchmark.color import mean_chromaticity, normalize, recovery_error, reproduction_error
from benchmark.exceptions import (
    CorruptRaster,
    EmptyDataset,
    EmptyTrack,
    EmptyUsableRegion,
    GroundTruthInvalid,
    MissingFile,
    NonPositiveComponent,
    SchemaMismatch,
    ZeroVector,
)
from benchmark.pool import ordered_map
from benchmark.utils import list_record_ids, record_paths
from benchmark.validators import validate_polygon, validate_rgb_triple

logger = logging.getLogger(__name__)

# Boundary slack on the face-angle rule; absorbs float noise from sidecar round-trips
FACE_ANGLE_TOLERANCE = 1e-9

# Sidecar keys with a dedicated SceneProperties field
KNOWN_PROPERTIES = ("indoor", "daytime", "sharp")


class TrackId(models.TextChoices):
    """
    The three challenge tracks.
    """

    GENERAL = "general", "General"
    INDOOR = "indoor", "Indoor"
    TWO = "two", "Two-illuminant"

    @property
    def arity(self):
        # Number of illuminants per image expected from estimators
        return 2 if self is TrackId.TWO else 1


@dataclass(frozen=True)
class SceneProperties:
    """
    Manually labeled scene information.

    Unlabeled fields are None; unknown sidecar keys are kept in ``extras``.
    """

    indoor: bool | None = None
    daytime: str | None = None
    sharp: bool | None = None
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_sidecar(cls, data):
        if not isinstance(data, dict):
            raise SchemaMismatch("'properties' must be an object.")

        indoor = data.get("indoor")
        sharp = data.get("sharp")
        daytime = data.get("daytime")
        if indoor is not None and not isinstance(indoor, bool):
            raise SchemaMismatch("'properties.indoor' must be a boolean.")
        if sharp is not None and not isinstance(sharp, bool):
            raise SchemaMismatch("'properties.sharp' must be a boolean.")
        if daytime is not None and not isinstance(daytime, str):
            raise SchemaMismatch("'properties.daytime' must be a string.")

        extras = {key: value for key, value in data.items() if key not in KNOWN_PROPERTIES}
        return cls(indoor=indoor, daytime=daytime, sharp=sharp, extras=extras)

    def to_sidecar(self):
        data = dict(self.extras)
        for key in KNOWN_PROPERTIES:
            value = getattr(self, key)
            if value is not None:
                data[key] = value
        return data


@dataclass(frozen=True, eq=False)
class SceneRecord:
    """
    One dataset image with its dual-face ground truths.

    - raster: (H, W, 3) uint16 array in RGB order, stored read-only. A writable
      array is copied, so the caller's array is left untouched.
    - left_gt / right_gt: chromaticities of the SpyderCube gray faces.
    - dominant_gt: manually chosen dominant source, when the sidecar has one.
    - cube_mask: polygon (pixel coordinates) covering the calibration object.
    """

    id: str
    raster: np.ndarray
    black_level: int
    saturation_level: int
    left_gt: object
    right_gt: object
    dominant_gt: object = None
    properties: SceneProperties = field(default_factory=SceneProperties)
    cube_mask: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        raster = self.raster
        if raster.ndim != 3 or raster.shape[2] != 3:
            raise CorruptRaster(f"{self.id}: raster must be (H, W, 3), got {raster.shape}.")
        if raster.shape[0] == 0 or raster.shape[1] == 0:
            raise CorruptRaster(f"{self.id}: raster is empty.")
        if raster.dtype != np.uint16:
            raise CorruptRaster(f"{self.id}: raster must be 16-bit, got {raster.dtype}.")
        if int(raster.max()) > self.saturation_level:
            raise CorruptRaster(
                f"{self.id}: samples exceed the saturation level {self.saturation_level}."
            )
        if not 0 <= self.black_level < self.saturation_level:
            raise SchemaMismatch(f"{self.id}: black level must be below the saturation level.")
        if self.cube_mask:
            try:
                validate_polygon([list(v) for v in self.cube_mask], self.width, self.height)
            except ValidationError as exc:
                raise SchemaMismatch(f"{self.id}: cube_mask: {exc.messages[0]}") from exc

        # Writable input is copied; the caller keeps ownership of its array
        if raster.flags.writeable:
            raster = raster.copy()
            raster.setflags(write=False)
            object.__setattr__(self, "raster", raster)

    @property
    def height(self):
        return self.raster.shape[0]

    @property
    def width(self):
        return self.raster.shape[1]

    def __eq__(self, other):
        if not isinstance(other, SceneRecord):
            return NotImplemented
        return (
            self.id == other.id
            and np.array_equal(self.raster, other.raster)
            and self.black_level == other.black_level
            and self.saturation_level == other.saturation_level
            and self.left_gt == other.left_gt
            and self.right_gt == other.right_gt
            and self.dominant_gt == other.dominant_gt
            and self.properties == other.properties
            and self.cube_mask == other.cube_mask
            and self.metadata == other.metadata
        )

    __hash__ = None

    def to_sidecar(self):
        """
        Serialize everything but the raster into the frozen sidecar schema.
        """
        data = {
            "left_gt": list(self.left_gt.as_tuple()),
            "right_gt": list(self.right_gt.as_tuple()),
            "black_level": self.black_level,
            "saturation_level": self.saturation_level,
            "properties": self.properties.to_sidecar(),
        }
        if self.dominant_gt is not None:
            data["dominant_gt"] = list(self.dominant_gt.as_tuple())
        if self.cube_mask:
            data["cube_mask"] = [list(vertex) for vertex in self.cube_mask]
        if self.metadata:
            data["metadata"] = self.metadata
        return data


@dataclass(frozen=True)
class TrackInstance:
    """
    One track's image ids and ground truths.

    ground_truth maps every id to a tuple of one chromaticity (General, Indoor)
    or an unordered pair (TwoIlluminant).
    """

    track: TrackId
    ids: tuple
    ground_truth: dict

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            raise ValueError(f"{self.track}: duplicate image ids.")
        if set(self.ids) != set(self.ground_truth):
            raise ValueError(f"{self.track}: ids and ground truths disagree.")
        for image_id, truths in self.ground_truth.items():
            if len(truths) != self.arity:
                raise ValueError(f"{self.track}: {image_id} has {len(truths)} ground truths.")

    @property
    def arity(self):
        return TrackId(self.track).arity

    def __len__(self):
        return len(self.ids)

    def require_images(self):
        """
        Raise EmptyTrack when the split left this track without images.
        """
        if not self.ids:
            raise EmptyTrack(f"The {TrackId(self.track).label} track has no images in this dataset.")
        return self

    def to_manifest(self):
        return {
            "track": str(self.track.value),
            "arity": self.arity,
            "count": len(self.ids),
            "ids": list(self.ids),
        }


def _ground_truth(record_id, data, key, required=True):
    """
    Parse and normalize one ground-truth triple from a sidecar.
    """
    if key not in data:
        if required:
            raise SchemaMismatch(f"{record_id}: sidecar lacks '{key}'.")
        return None

    value = data[key]
    try:
        validate_rgb_triple(value)
    except ValidationError as exc:
        raise SchemaMismatch(f"{record_id}: '{key}': {exc.messages[0]}") from exc

    try:
        return normalize(value)
    except (ZeroVector, NonPositiveComponent) as exc:
        raise GroundTruthInvalid(f"{record_id}: '{key}' is not a valid illuminant: {exc}") from exc


def _read_raster(path):
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise CorruptRaster(f"Cannot decode {path}.")
    if raw.ndim != 3 or raw.shape[2] != 3:
        raise CorruptRaster(f"{path} is not a 3-channel image.")
    if raw.dtype != np.uint16:
        raise CorruptRaster(f"{path} is not a 16-bit image ({raw.dtype}).")

    # OpenCV decodes to BGR
    raster = np.ascontiguousarray(raw[..., ::-1])
    raster.setflags(write=False)
    return raster


def _int_field(record_id, data, key, default):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaMismatch(f"{record_id}: '{key}' must be an integer.")
    return value


def load_record(directory, record_id, black_level=None, saturation_level=None):
    """
    Load one record from a dataset directory.

    - black_level / saturation_level are fallbacks used only when the sidecar
      does not declare its own; they default to the IEC_* settings.
    - Ground truths are normalized; zero or non-positive faces raise
      GroundTruthInvalid.
    """
    paths = record_paths(directory, record_id)
    if not paths["json"].is_file():
        raise MissingFile(f"Missing sidecar {paths['json']}.")
    if not paths["png"].is_file():
        raise MissingFile(f"Missing raster {paths['png']}.")

    try:
        data = json.loads(paths["json"].read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaMismatch(f"{paths['json']} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaMismatch(f"{paths['json']} must hold a JSON object.")

    left_gt = _ground_truth(record_id, data, "left_gt")
    right_gt = _ground_truth(record_id, data, "right_gt")
    dominant_gt = _ground_truth(record_id, data, "dominant_gt", required=False)

    if black_level is None:
        black_level = settings.IEC_BLACK_LEVEL
    if saturation_level is None:
        saturation_level = settings.IEC_SATURATION_LEVEL

    cube_mask = data.get("cube_mask", [])
    if not isinstance(cube_mask, list) or not all(isinstance(v, list) for v in cube_mask):
        raise SchemaMismatch(f"{record_id}: 'cube_mask' must be a list of [x, y] vertices.")

    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise SchemaMismatch(f"{record_id}: 'metadata' must be an object.")

    return SceneRecord(
        id=record_id,
        raster=_read_raster(paths["png"]),
        black_level=_int_field(record_id, data, "black_level", black_level),
        saturation_level=_int_field(record_id, data, "saturation_level", saturation_level),
        left_gt=left_gt,
        right_gt=right_gt,
        dominant_gt=dominant_gt,
        properties=SceneProperties.from_sidecar(data.get("properties", {})),
        cube_mask=tuple(tuple(vertex) for vertex in cube_mask),
        metadata=metadata,
    )


def write_record(directory, record):
    """
    Write a record as a PNG + JSON pair that ``load_record`` reads back unchanged.
    """
    paths = record_paths(directory, record.id)
    paths["png"].parent.mkdir(parents=True, exist_ok=True)

    # OpenCV encodes from BGR
    if not cv2.imwrite(str(paths["png"]), np.ascontiguousarray(record.raster[..., ::-1])):
        raise CorruptRaster(f"Cannot encode {paths['png']}.")

    paths["json"].write_text(
        json.dumps(record.to_sidecar(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return paths


def load_dataset(directory, threads=1, skip_invalid=False, black_level=None, saturation_level=None):
    """
    Load every record of a dataset directory, ordered by id.

    - Raises EmptyDataset when the directory holds no records.
    - With skip_invalid, records whose ground truth is invalid are logged and
      left out instead of aborting the load.
    """
    record_ids = list_record_ids(directory)
    if not record_ids:
        raise EmptyDataset(f"no records in {directory}")

    def _load(record_id):
        try:
            return load_record(directory, record_id, black_level, saturation_level)
        except GroundTruthInvalid as exc:
            if not skip_invalid:
                raise
            logger.warning("Skipping %s: %s", record_id, exc)
            return None

    records = [record for record in ordered_map(_load, record_ids, threads) if record is not None]
    if not records:
        raise EmptyDataset(f"no valid records in {directory}")

    logger.info("Loaded %d records from %s", len(records), directory)
    return records


def face_angle(record, metric=None):
    """
    Angle in degrees between the left and right SpyderCube face ground truths.

    The angle is the recovery angle unless IEC_FACE_ANGLE_METRIC (or
    ``metric``) selects the reproduction angle, which is then symmetrized.
    """
    metric = metric or settings.IEC_FACE_ANGLE_METRIC
    if metric == "recovery":
        return recovery_error(record.left_gt, record.right_gt)
    if metric == "reproduction":
        return max(
            reproduction_error(record.left_gt, record.right_gt),
            reproduction_error(record.right_gt, record.left_gt),
        )
    raise ValueError(f"Unknown face angle metric {metric!r}.")


def single_ground_truth(record):
    """
    Ground truth for the single-illuminant tracks.

    The explicit dominant source wins; otherwise the normalized mean of the
    two face chromaticities.
    """
    if record.dominant_gt is not None:
        return record.dominant_gt
    return mean_chromaticity([record.left_gt, record.right_gt])


def split_tracks(records, threshold=None, metric=None, daytime=None):
    """
    Build the General, Indoor and TwoIlluminant tracks.

    - General: face angle < threshold.
    - Indoor: General records labeled indoor.
    - TwoIlluminant: face angle >= threshold; ground truth is the face pair.
    - daytime, when given, keeps only records with that time-of-day label.
    """
    if threshold is None:
        threshold = settings.IEC_FACE_ANGLE_THRESHOLD

    general, indoor, two = {}, {}, {}
    for record in sorted(records, key=lambda r: r.id):
        if daytime is not None and record.properties.daytime != daytime:
            continue

        if face_angle(record, metric) >= threshold - FACE_ANGLE_TOLERANCE:
            two[record.id] = (record.left_gt, record.right_gt)
            continue

        truth = (single_ground_truth(record),)
        general[record.id] = truth
        if record.properties.indoor:
            indoor[record.id] = truth

    return {
        track: TrackInstance(track=track, ids=tuple(ground_truth), ground_truth=ground_truth)
        for track, ground_truth in (
            (TrackId.GENERAL, general),
            (TrackId.INDOOR, indoor),
            (TrackId.TWO, two),
        )
    }


def polygon_mask(height, width, vertices):
    """
    Rasterize a polygon with the even-odd rule, sampling pixel centers.

    Returns a (height, width) boolean array that is True inside the polygon.
    """
    inside = np.zeros((height, width), dtype=bool)
    if not vertices:
        return inside

    xs = np.arange(width, dtype=np.float64) + 0.5
    ys = np.arange(height, dtype=np.float64) + 0.5
    points = [(float(x), float(y)) for x, y in vertices]

    for (x1, y1), (x2, y2) in zip(points, points[1:] + points[:1]):
        if y1 == y2:
            continue
        crosses = (y1 > ys) != (y2 > ys)
        x_at_row = x1 + (ys - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses[:, None] & (xs[None, :] < x_at_row[:, None])

    return inside


def linear_image(record):
    """
    Black-level-subtracted raster as float64, clamped at 0.
    """
    image = record.raster.astype(np.float64) - record.black_level
    return np.maximum(image, 0.0)


def usable_mask(record, saturation_fraction=None):
    """
    Boolean (H, W) mask of pixels usable by statistics-based estimators.

    A pixel is usable when it lies outside the cube mask and every channel is
    strictly above the black level and strictly below the saturation threshold.
    """
    if saturation_fraction is None:
        saturation_fraction = settings.IEC_SATURATION_FRACTION

    threshold = saturation_fraction * record.saturation_level
    raster = record.raster
    usable = np.all(raster > record.black_level, axis=-1) & np.all(raster < threshold, axis=-1)
    if record.cube_mask:
        usable &= ~polygon_mask(record.height, record.width, record.cube_mask)
    return usable


def mask_pixels(record, saturation_fraction=None):
    """
    Usable pixels as an (N, 3) float64 array, black level subtracted.

    Raises EmptyUsableRegion when nothing survives masking and clipping.
    """
    usable = usable_mask(record, saturation_fraction)
    if not usable.any():
        raise EmptyUsableRegion(f"{record.id}: no usable pixels.")
    return linear_image(record)[usable]
