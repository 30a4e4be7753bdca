"""
Diagonal (von Kries) white balance.

Gains are the reciprocal illuminant components divided by the green gain,
so green is the exposure anchor. Output stays linear; the optional preview
writer is the only place a gamma curve is applied.
"""
from dataclasses import dataclass

import numpy as np
from PIL import Image

from benchmark.dataset import linear_image

# Display gamma used only for human-inspection previews
PREVIEW_GAMMA = 1 / 2.2


@dataclass(frozen=True, eq=False)
class CorrectedImage:
    """
    Linear RGB raster in [0, 1] and the gains that produced it.
    """

    raster: np.ndarray
    applied_gains: tuple

    def __post_init__(self):
        if any(gain <= 0 for gain in self.applied_gains):
            raise ValueError(f"Gains must be positive: {self.applied_gains!r}")

    def mean_rgb(self):
        return self.raster.reshape(-1, 3).mean(axis=0)


def white_balance_gains(illuminant):
    """
    Green-anchored diagonal gains that map the illuminant to gray.
    """
    r, g, b = illuminant.as_tuple()
    return (g / r, 1.0, g / b)


def correct_vector(vector, illuminant):
    """
    Apply the diagonal correction for ``illuminant`` to a single RGB vector.
    """
    return np.asarray(vector, dtype=np.float64) * np.array(white_balance_gains(illuminant))


def apply_white_balance(record, illuminant):
    """
    Correct a record's raster by an illuminant estimate.

    Black level is subtracted, values are scaled by the gains and by the
    sensor range (saturation minus black level), then clamped to [0, 1].
    """
    gains = white_balance_gains(illuminant)
    scale = record.saturation_level - record.black_level
    corrected = linear_image(record) * np.array(gains) / scale
    return CorrectedImage(raster=np.clip(corrected, 0.0, 1.0), applied_gains=gains)


def rebalance(image, illuminant):
    """
    Apply a further diagonal correction to an already-corrected image.
    """
    gains = white_balance_gains(illuminant)
    combined = tuple(a * b for a, b in zip(image.applied_gains, gains))
    return CorrectedImage(
        raster=np.clip(image.raster * np.array(gains), 0.0, 1.0), applied_gains=combined
    )


def write_preview(image, path):
    """
    Write an 8-bit gamma-encoded PNG for human inspection.

    Never used by any metric.
    """
    encoded = np.round(np.power(image.raster, PREVIEW_GAMMA) * 255).astype(np.uint8)
    Image.fromarray(encoded).save(path, format="PNG")
    return path
