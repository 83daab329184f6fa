"""
Colour deconvolution of H&E images: RGB -> optical density -> per-stain
concentrations. Stain vectors are configuration; the bundled file holds the
standard hematoxylin / eosin / DAB-residual values.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from django.conf import settings
from scipy import linalg

from ..exceptions import InvalidArgument
from .images import GrayImage, RgbImage

logger = logging.getLogger(__name__)

STAIN_NAMES = ("hematoxylin", "eosin", "residual")


def _unit(vector, name: str) -> np.ndarray:
    v = np.asarray(vector, dtype=np.float64).ravel()
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidArgument(f"{name} stain vector must be 3 finite numbers")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise InvalidArgument(f"{name} stain vector is zero")
    return v / norm


@dataclass(frozen=True, eq=False)
class StainMatrix:
    matrix: np.ndarray  # columns: unit OD vectors of hematoxylin, eosin, residual
    inverse: np.ndarray

    @classmethod
    def from_vectors(cls, hematoxylin, eosin, residual=None) -> "StainMatrix":
        h = _unit(hematoxylin, "hematoxylin")
        e = _unit(eosin, "eosin")
        r = _unit(np.cross(h, e) if residual is None else residual, "residual")
        m = np.column_stack([h, e, r])
        try:
            inv = linalg.inv(m, check_finite=True)
        except linalg.LinAlgError as exc:
            raise InvalidArgument(f"stain matrix is singular: {exc}") from exc
        if not np.all(np.isfinite(inv)) or np.linalg.cond(m) > 1e12:
            raise InvalidArgument("stain matrix is singular")
        return cls(matrix=m, inverse=inv)


def load_stain_matrix(path=None) -> StainMatrix:
    """JSON {"hematoxylin": [r, g, b], "eosin": [...], "residual": [...] | null}."""
    path = Path(path or settings.MIML_STAIN_VECTORS_PATH)
    return _load_stain_matrix(str(path.resolve()))


@lru_cache(maxsize=8)
def _load_stain_matrix(path: str) -> StainMatrix:
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
        vectors = [spec.get(name) for name in STAIN_NAMES]
    except (OSError, ValueError, AttributeError) as exc:
        raise InvalidArgument(f"cannot read stain vectors from {path}: {exc}") from exc
    if vectors[0] is None or vectors[1] is None:
        raise InvalidArgument(f"{path}: hematoxylin and eosin vectors are required")
    logger.debug("stain.loaded path=%s", path)
    return StainMatrix.from_vectors(*vectors)


def rgb_to_od(image: RgbImage) -> np.ndarray:
    """(height, width, 3) optical densities, -log10((I + 1) / 256)."""
    return -np.log10((image.pixels.astype(np.float64) + 1.0) / 256.0)


def stain_concentrations(od, stains: StainMatrix, clamp: bool = True) -> np.ndarray:
    od = np.asarray(od, dtype=np.float64)
    if od.shape[-1] != 3:
        raise InvalidArgument(f"OD array must end in 3 channels, got {od.shape}")
    c = od @ stains.inverse.T
    return np.maximum(c, 0.0) if clamp else c


def separate_stains(od, stains: StainMatrix) -> tuple[GrayImage, GrayImage, GrayImage]:
    """Hematoxylin, eosin and residual concentration maps; hematoxylin is the nuclei channel."""
    od = np.asarray(od, dtype=np.float64)
    if od.ndim != 3:
        raise InvalidArgument(f"OD image must be (height, width, 3), got {od.shape}")
    c = stain_concentrations(od, stains)
    return tuple(GrayImage(c[:, :, k]) for k in range(3))
