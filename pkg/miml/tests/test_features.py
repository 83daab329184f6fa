import json
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from ..exceptions import DatasetFormatError, InvalidArgument
from ..features import (
    GrayImage,
    RgbImage,
    StainMatrix,
    extract_case_features,
    lbp8_code,
    lbp8_codes,
    lbp8_histogram,
    load_stain_matrix,
    read_image,
    rgb_to_od,
    separate_stains,
    stain_concentrations,
    write_image,
)


def _solid(value, height=4, width=4):
    return RgbImage(np.full((height, width, 3), value, dtype=np.uint8))


class OpticalDensityTests(SimpleTestCase):
    def test_known_values(self):
        self.assertAlmostEqual(float(rgb_to_od(_solid(25))[0, 0, 0]), 0.99327, places=5)
        self.assertAlmostEqual(float(rgb_to_od(_solid(0))[0, 0, 0]), 2.40824, places=5)
        self.assertAlmostEqual(float(rgb_to_od(_solid(255))[0, 0, 0]), 0.0, places=12)

    def test_image_validation(self):
        with self.assertRaises(InvalidArgument):
            RgbImage(np.zeros((2, 2)))
        with self.assertRaises(InvalidArgument):
            RgbImage(np.full((2, 2, 3), 300))
        image = RgbImage(np.full((2, 3, 3), 7))
        self.assertEqual((image.height, image.width), (2, 3))
        self.assertEqual(image.pixels.dtype, np.uint8)


class StainTests(SimpleTestCase):
    def test_concentrations_invert_the_mixture(self):
        stains = load_stain_matrix()
        rng = np.random.default_rng(0)
        conc = rng.random((5, 5, 3))
        od = conc @ stains.matrix.T
        np.testing.assert_allclose(stain_concentrations(od, stains, clamp=False), conc, atol=1e-10)

    def test_negative_concentrations_clamped(self):
        stains = load_stain_matrix()
        od = np.array([-1.0, 0.0, 0.0]) @ stains.matrix.T
        self.assertTrue(np.all(stain_concentrations(od, stains) >= 0.0))

    def test_vectors_normalised_and_residual_completed(self):
        stains = StainMatrix.from_vectors([2.0, 0.0, 0.0], [0.0, 3.0, 0.0])
        np.testing.assert_allclose(stains.matrix, np.eye(3))

    def test_singular_vectors_rejected(self):
        with self.assertRaises(InvalidArgument):
            StainMatrix.from_vectors([1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 1.0])
        with self.assertRaises(InvalidArgument):
            StainMatrix.from_vectors([0.0, 0.0, 0.0], [0.0, 1.0, 0.0])

    def test_custom_vector_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "vectors.json"
            path.write_text(json.dumps({"hematoxylin": [1, 0, 0], "eosin": [0, 1, 0], "residual": None}))
            stains = load_stain_matrix(path)
            np.testing.assert_allclose(stains.inverse, np.eye(3), atol=1e-12)

            other = Path(tmp) / "eosin-only.json"
            other.write_text(json.dumps({"eosin": [0, 1, 0]}))
            with self.assertRaises(InvalidArgument):
                load_stain_matrix(other)

    def test_separation_gives_three_maps(self):
        maps = separate_stains(rgb_to_od(_solid(128, 3, 5)), load_stain_matrix())
        self.assertEqual(len(maps), 3)
        self.assertTrue(all(isinstance(m, GrayImage) and m.values.shape == (3, 5) for m in maps))


class LbpTests(SimpleTestCase):
    def test_hand_codes(self):
        flat = np.full((3, 3), 5.0)
        self.assertEqual(lbp8_code(flat), 255)

        peak = np.array([[1, 1, 1], [1, 9, 1], [1, 1, 1]], dtype=float)
        self.assertEqual(lbp8_code(peak), 0)

        # only the top and right neighbors reach the center: 64 + 16
        window = np.array([[0, 6, 0], [0, 5, 7], [0, 0, 0]], dtype=float)
        self.assertEqual(lbp8_code(window), 80)

    def test_vectorised_codes_match_single_window(self):
        values = np.random.default_rng(1).random((6, 7))
        codes = lbp8_codes(values)
        self.assertEqual(codes.shape, (4, 5))
        for r in range(4):
            for c in range(5):
                self.assertEqual(codes[r, c], lbp8_code(values[r : r + 3, c : c + 3]))

    def test_histogram_is_a_distribution(self):
        hist = lbp8_histogram(GrayImage(np.random.default_rng(2).random((10, 10))))
        self.assertEqual(hist.shape, (256,))
        self.assertAlmostEqual(float(hist.sum()), 1.0)

    def test_flat_image_has_single_code(self):
        hist = lbp8_histogram(GrayImage(np.zeros((4, 4))))
        self.assertEqual(hist[255], 1.0)

    def test_too_small(self):
        with self.assertRaises(InvalidArgument):
            lbp8_histogram(GrayImage(np.zeros((2, 5))))


class ImageIoTests(SimpleTestCase):
    def test_ppm_and_png_round_trip(self):
        pixels = np.random.default_rng(3).integers(0, 256, size=(5, 4, 3), dtype=np.uint8)
        with tempfile.TemporaryDirectory() as tmp:
            for suffix in (".ppm", ".png"):
                path = write_image(RgbImage(pixels), Path(tmp) / f"roi{suffix}")
                np.testing.assert_array_equal(read_image(path).pixels, pixels)

    def test_undecodable_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "broken.ppm"
            path.write_bytes(b"not an image")
            with self.assertRaises(DatasetFormatError):
                read_image(path)
            with self.assertRaises(DatasetFormatError):
                read_image(Path(tmp) / "missing.png")


class CaseFeatureTests(SimpleTestCase):
    def test_one_instance_per_roi(self):
        rng = np.random.default_rng(4)
        rois = [RgbImage(rng.integers(0, 256, size=(8, 9, 3), dtype=np.uint8)) for _ in range(3)]
        bag = extract_case_features(rois)
        self.assertEqual(bag.instances.shape, (3, 256))
        np.testing.assert_allclose(bag.instances.sum(axis=1), 1.0)

    def test_order_follows_input(self):
        rng = np.random.default_rng(5)
        a = RgbImage(rng.integers(0, 256, size=(6, 6, 3), dtype=np.uint8))
        b = _solid(200, 6, 6)
        forward = extract_case_features([a, b]).instances
        backward = extract_case_features([b, a]).instances
        np.testing.assert_array_equal(forward[::-1], backward)

    def test_case_without_roi(self):
        with self.assertRaises(InvalidArgument):
            extract_case_features([])
