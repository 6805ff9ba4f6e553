"""Separable 2-D upsampling and image file format tests."""

import numpy as np
import pytest

from dibsi.domains import is_homogeneous
from dibsi.image import (
    ProbabilityAtlas,
    ScalarImage,
    extract_line_domain,
    load_atlas,
    load_image,
    save_atlas,
    save_image,
    upsample_separable,
)


def _band_atlas(rows=16, cols=16, ratio=4, pixel=1.0):
    """Three vertical bands with smooth ramps between them."""
    ar, ac = rows * ratio, cols * ratio
    xs = np.arange(ac) * (pixel / ratio)

    def ramp(x, x0, width):
        t = np.clip((x - x0) / width, 0.0, 1.0)
        return t * t * (3 - 2 * t)

    m1 = 1.0 - ramp(xs, 0.3 * cols, 2.0)
    m3 = ramp(xs, 0.62 * cols, 2.0)
    m2 = 1.0 - m1 - m3
    maps = [ScalarImage(np.tile(m, (ar, 1)), pixel / ratio)
            for m in (m1, m2, m3)]
    return ProbabilityAtlas(maps, ratio)


def _uniform_atlas(rows, cols, ratio, pixel=1.0, J=1):
    ar, ac = rows * ratio, cols * ratio
    maps = [ScalarImage(np.full((ar, ac), 1.0 / J), pixel / ratio)
            for _ in range(J)]
    return ProbabilityAtlas(maps, ratio)


@pytest.fixture
def image():
    rng = np.random.default_rng(2)
    return ScalarImage(rng.uniform(0.0, 1.0, (16, 16)), 1.0)


class TestExtractLineDomain:
    def test_uniform_atlas_gives_homogeneous_domain(self, image):
        atlas = _uniform_atlas(16, 16, 4)
        dom = extract_line_domain(atlas, "x", 3, 1.0)
        assert dom.J == 1
        np.testing.assert_array_equal(dom.values, 1.0)

    def test_partition_of_unity(self):
        atlas = _band_atlas()
        for axis in ("x", "y"):
            dom = extract_line_domain(atlas, axis, 5, 1.0)
            np.testing.assert_allclose(dom.values.sum(axis=0), 1.0,
                                       atol=1e-12)

    def test_values_at_map_grid_points(self):
        atlas = _band_atlas()
        # image line 3 runs along atlas row 12; grid nodes hit map columns
        dom = extract_line_domain(atlas, "x", 3, 1.0)
        for j in range(atlas.J):
            np.testing.assert_allclose(dom.values[j], atlas.maps[j][12, :],
                                       atol=1e-12)

    def test_line_outside_extent_rejected(self):
        atlas = _band_atlas()
        with pytest.raises(ValueError):
            extract_line_domain(atlas, "x", 40, 1.0)

    def test_homogeneity_structure(self):
        atlas = _band_atlas()
        dom = extract_line_domain(atlas, "x", 5, 1.0)
        flag, index = is_homogeneous(dom, 0.0, 3.5)
        assert flag and index == 0
        flag, _ = is_homogeneous(dom, 4.0, 7.5)
        assert not flag


class TestUpsample:
    def test_consistency_at_original_centers(self, image):
        atlas = _band_atlas()
        for method in ("dibsi", "bsi"):
            up = upsample_separable(image, atlas, 4, order=3, method=method)
            np.testing.assert_allclose(up.values[::4, ::4], image.values,
                                       atol=1e-9)
        assert up.rows == 64 and up.cols == 64
        assert up.pixel_size == pytest.approx(0.25)

    def test_uniform_atlas_matches_standard_exactly(self, image):
        atlas = _uniform_atlas(16, 16, 4)
        up_di = upsample_separable(image, atlas, 4, order=3, method="dibsi")
        up_bs = upsample_separable(image, None, 4, order=3, method="bsi")
        np.testing.assert_allclose(up_di.values, up_bs.values, atol=1e-12)

    def test_factor_one_uniform_atlas_is_identity(self, image):
        atlas = _uniform_atlas(16, 16, 4)
        up = upsample_separable(image, atlas, 1, order=3, method="dibsi")
        np.testing.assert_allclose(up.values, image.values, atol=1e-12)

    def test_transpose_symmetry_on_uniform_atlas(self, image):
        atlas = _uniform_atlas(16, 16, 4)
        up = upsample_separable(image, atlas, 4, order=3, method="dibsi")
        transposed = ScalarImage(image.values.T, image.pixel_size)
        up_t = upsample_separable(transposed, atlas, 4, order=3,
                                  method="dibsi")
        np.testing.assert_allclose(up.values, up_t.values.T, atol=1e-9)

    def test_pass_order_configurable(self, image):
        uniform = _uniform_atlas(16, 16, 4)
        a = upsample_separable(image, uniform, 2, order=3, pass_order="rows")
        b = upsample_separable(image, uniform, 2, order=3, pass_order="cols")
        np.testing.assert_allclose(a.values, b.values, atol=1e-12)

    def test_pass_order_asymmetry_at_inhomogeneities(self, image):
        # both orders reproduce the inputs at pixel centers but generally
        # differ in between near subdomain transitions
        atlas = _band_atlas()
        a = upsample_separable(image, atlas, 2, order=3, pass_order="rows")
        b = upsample_separable(image, atlas, 2, order=3, pass_order="cols")
        np.testing.assert_allclose(a.values[::2, ::2], image.values,
                                   atol=1e-9)
        np.testing.assert_allclose(b.values[::2, ::2], image.values,
                                   atol=1e-9)
        assert np.max(np.abs(a.values - b.values)) > 1e-9

    def test_misaligned_atlas_rejected(self, image):
        atlas = _band_atlas(rows=12, cols=12)
        with pytest.raises(ValueError):
            upsample_separable(image, atlas, 2, order=3)

    def test_validation(self, image):
        atlas = _band_atlas()
        with pytest.raises(ValueError):
            upsample_separable(image, atlas, 0, order=3)
        with pytest.raises(ValueError):
            upsample_separable(image, atlas, 2, order=3, method="nearest")
        with pytest.raises(ValueError):
            upsample_separable(image, None, 2, order=3, method="dibsi")


class TestAtlasValidation:
    def test_deficit_folds_into_last_map(self):
        m1 = np.full((8, 8), 0.6)
        m2 = np.full((8, 8), 0.1)
        atlas = ProbabilityAtlas([ScalarImage(m1, 0.5),
                                  ScalarImage(m2, 0.5)], 2)
        np.testing.assert_allclose(atlas.maps[0], 0.6, atol=1e-12)
        np.testing.assert_allclose(atlas.maps[1], 0.4, atol=1e-12)

    def test_excess_rejected(self):
        m1 = np.full((8, 8), 0.9)
        m2 = np.full((8, 8), 0.2)
        with pytest.raises(ValueError):
            ProbabilityAtlas([ScalarImage(m1, 0.5), ScalarImage(m2, 0.5)], 2)

    def test_negative_rejected(self):
        m1 = np.full((8, 8), -0.1)
        with pytest.raises(ValueError):
            ProbabilityAtlas([ScalarImage(m1, 0.5)], 2)

    def test_mismatched_grids_rejected(self):
        m1 = ScalarImage(np.ones((8, 8)), 0.5)
        m2 = ScalarImage(np.ones((8, 4)), 0.5)
        with pytest.raises(ValueError):
            ProbabilityAtlas([m1, m2], 2)


class TestFileFormats:
    def test_binary_round_trip(self, tmp_path, image):
        path = tmp_path / "img.json"
        save_image(image, path)
        back = load_image(path)
        np.testing.assert_array_equal(back.values, image.values)
        assert back.pixel_size == image.pixel_size

    def test_csv_round_trip(self, tmp_path, image):
        path = tmp_path / "img.csv"
        save_image(image, path)
        back = load_image(path, pixel_size=image.pixel_size)
        np.testing.assert_array_equal(back.values, image.values)

    def test_atlas_round_trip(self, tmp_path):
        atlas = _band_atlas()
        path = tmp_path / "atlas.json"
        save_atlas(atlas, path)
        back = load_atlas(path)
        assert back.ratio == atlas.ratio
        np.testing.assert_allclose(back.maps, atlas.maps, atol=1e-15)

    def test_truncated_binary_rejected(self, tmp_path, image):
        path = tmp_path / "img.json"
        save_image(image, path)
        raw = tmp_path / "img.f64"
        raw.write_bytes(raw.read_bytes()[:-16])
        with pytest.raises(ValueError):
            load_image(path)
