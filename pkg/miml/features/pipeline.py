from typing import Sequence

import numpy as np

from ..core import Bag
from ..exceptions import InvalidArgument
from .images import RgbImage
from .lbp import lbp8_histogram
from .stain import StainMatrix, load_stain_matrix, rgb_to_od, separate_stains


def roi_instance(image: RgbImage, stains: StainMatrix) -> np.ndarray:
    nuclei, _, _ = separate_stains(rgb_to_od(image), stains)
    return lbp8_histogram(nuclei)


def extract_case_features(roi_images: Sequence[RgbImage], stains: StainMatrix | None = None) -> Bag:
    """One 256-bin nuclei-texture instance per ROI, in the given order."""
    if not roi_images:
        raise InvalidArgument("a case needs at least one ROI image")
    stains = stains or load_stain_matrix()
    return Bag(np.vstack([roi_instance(img, stains) for img in roi_images]))
