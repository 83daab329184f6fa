from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..exceptions import DatasetFormatError, InvalidArgument

IMAGE_SUFFIXES = (".ppm", ".png")


@dataclass(frozen=True, eq=False)
class RgbImage:
    pixels: np.ndarray  # (height, width, 3) uint8, row-major

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidArgument(f"RGB image must be (height, width, 3), got {arr.shape}")
        if arr.dtype != np.uint8:
            if np.any(arr < 0) or np.any(arr > 255) or np.any(arr != np.round(arr)):
                raise InvalidArgument("RGB pixels must be 8-bit integers")
            arr = arr.astype(np.uint8)
        arr = np.array(arr, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True, eq=False)
class GrayImage:
    values: np.ndarray  # (height, width) float64

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidArgument(f"gray image must be 2-D, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgument("gray image has non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def read_image(path) -> RgbImage:
    """Binary PPM (P6, maxval 255) or PNG, converted to 8-bit RGB."""
    path = Path(path)
    try:
        with Image.open(path) as im:
            if im.mode not in ("RGB", "RGBA", "L", "P"):
                raise DatasetFormatError(f"{path}: unsupported image mode {im.mode}")
            return RgbImage(np.asarray(im.convert("RGB")))
    except (UnidentifiedImageError, OSError) as exc:
        raise DatasetFormatError(f"{path}: cannot decode image: {exc}") from exc


def write_image(image: RgbImage, path) -> Path:
    path = Path(path)
    Image.fromarray(np.ascontiguousarray(image.pixels), "RGB").save(path)
    return path
