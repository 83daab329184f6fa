from .images import IMAGE_SUFFIXES, GrayImage, RgbImage, read_image, write_image
from .lbp import lbp8_code, lbp8_codes, lbp8_histogram
from .pipeline import extract_case_features, roi_instance
from .stain import StainMatrix, load_stain_matrix, rgb_to_od, separate_stains, stain_concentrations

__all__ = [
    "RgbImage",
    "GrayImage",
    "read_image",
    "write_image",
    "IMAGE_SUFFIXES",
    "rgb_to_od",
    "StainMatrix",
    "load_stain_matrix",
    "separate_stains",
    "stain_concentrations",
    "lbp8_code",
    "lbp8_codes",
    "lbp8_histogram",
    "roi_instance",
    "extract_case_features",
]
