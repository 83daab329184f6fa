import numpy as np

from ..exceptions import InvalidArgument
from .images import GrayImage

# (row, col) offsets clockwise from top-left, most significant bit first
NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))
WEIGHTS = np.array([1 << (7 - k) for k in range(8)], dtype=np.int64)
N_BINS = 256


def lbp8_code(window) -> int:
    w = np.asarray(window, dtype=np.float64).reshape(3, 3)
    if not np.all(np.isfinite(w)):
        raise InvalidArgument("LBP window must be finite")
    bits = np.array([w[1 + dr, 1 + dc] >= w[1, 1] for dr, dc in NEIGHBORS])
    return int(bits @ WEIGHTS)


def lbp8_codes(values: np.ndarray) -> np.ndarray:
    """Codes of every interior pixel, shape (height - 2, width - 2)."""
    v = np.asarray(values, dtype=np.float64)
    h, w = v.shape
    center = v[1 : h - 1, 1 : w - 1]
    codes = np.zeros(center.shape, dtype=np.int64)
    for (dr, dc), weight in zip(NEIGHBORS, WEIGHTS):
        neighbor = v[1 + dr : h - 1 + dr, 1 + dc : w - 1 + dc]
        codes += (neighbor >= center) * weight
    return codes


def lbp8_histogram(image: GrayImage) -> np.ndarray:
    values = image.values if isinstance(image, GrayImage) else GrayImage(image).values
    if values.shape[0] < 3 or values.shape[1] < 3:
        raise InvalidArgument(f"LBP needs at least a 3x3 image, got {values.shape}")
    counts = np.bincount(lbp8_codes(values).ravel(), minlength=N_BINS).astype(np.float64)
    return counts / counts.sum()
