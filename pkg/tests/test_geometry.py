import numpy as np
import pytest

from graphdigit.errors import ParameterError, ValidationError
from graphdigit.geometry import (
    GraphGeometry,
    TimeSeries,
    binarize,
    crop_padded,
    iround,
    pixel_to_value,
    value_to_pixel,
    zero_pad,
)


class TestCalibration:
    def test_lower_boundary(self, geom):
        assert pixel_to_value(13, geom) == pytest.approx(30.0, abs=1e-9)

    def test_upper_boundary(self, geom):
        assert pixel_to_value(164, geom) == pytest.approx(210.0, abs=1e-9)

    def test_midpoint(self, geom):
        assert pixel_to_value(88.5, geom) == pytest.approx(120.0, abs=1e-9)

    def test_correction_applied_in_output_units(self, geom):
        # (113-13)/151*180 + 30 + 4
        assert pixel_to_value(113, geom, correction=4.0) == pytest.approx(18000 / 151 + 34, abs=1e-9)
        assert round(pixel_to_value(113, geom, correction=4.0), 1) == 153.2

    def test_round_trip_across_range(self, geom):
        for v in np.linspace(0.0, 250.0, 1001):
            assert pixel_to_value(value_to_pixel(v, geom), geom) == pytest.approx(v, abs=1e-9)

    def test_inverse_examples(self, geom):
        assert value_to_pixel(30, geom) == pytest.approx(13.0, abs=1e-9)
        assert value_to_pixel(210, geom) == pytest.approx(164.0, abs=1e-9)
        assert value_to_pixel(120, geom) == pytest.approx(88.5, abs=1e-9)

    def test_strictly_increasing(self, geom):
        ps = np.linspace(-10, 180, 500)
        vals = [pixel_to_value(p, geom) for p in ps]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_slope_is_units_per_pixel(self, geom):
        slope = pixel_to_value(50, geom) - pixel_to_value(49, geom)
        assert slope == pytest.approx(180 / 151, abs=1e-12)
        assert geom.units_per_px() == pytest.approx(180 / 151, abs=1e-12)

    def test_nonfinite_pixel_rejected(self, geom):
        with pytest.raises(ParameterError):
            pixel_to_value(float("nan"), geom)


class TestGeometryValidation:
    def test_bottom_row_must_be_interior(self):
        with pytest.raises(ValidationError):
            GraphGeometry(bottom_row_px=0)
        with pytest.raises(ValidationError):
            GraphGeometry(bottom_row_px=164)

    def test_value_ordering(self):
        with pytest.raises(ValidationError):
            GraphGeometry(value_at_first_gridline=210, value_at_top=30)

    def test_slot_spacing_positive(self):
        with pytest.raises(ValidationError):
            GraphGeometry(slot_spacing_px=0)


class TestBinarize:
    def test_all_zero(self):
        img = np.zeros((4, 5), dtype=np.uint8)
        assert not binarize(img).any()

    def test_all_255(self):
        img = np.full((4, 5), 255, dtype=np.uint8)
        assert binarize(img).all()

    def test_half_gray_is_just_above_threshold(self):
        # 128/255 = 0.502 > 0.5
        img = np.zeros((3, 3), dtype=np.uint8)
        img[1, 1] = 128
        out = binarize(img, 0.5)
        assert out[1, 1] and out.sum() == 1

    def test_threshold_range_enforced(self):
        img = np.zeros((2, 2), dtype=np.uint8)
        for bad in (0.0, 1.0, -0.3, 2.0):
            with pytest.raises(ParameterError):
                binarize(img, bad)


class TestZeroPad:
    def test_canonical_graph_pad(self):
        img = np.arange(164 * 990, dtype=np.int64).reshape(164, 990) % 256
        img = img.astype(np.uint8)
        padded, offset = zero_pad(img, 1024)
        assert padded.shape == (1024, 1024)
        assert crop_padded(padded, offset, img.shape).tobytes() == img.tobytes()
        # everything outside the placed region is zero
        total = int(padded.sum())
        assert total == int(img.sum())

    def test_identity_when_already_target(self):
        img = np.ones((1024, 1024), dtype=np.uint8)
        padded, offset = zero_pad(img, 1024)
        assert offset == (0, 0)
        assert (padded == img).all()

    def test_too_large_rejected(self):
        with pytest.raises(ParameterError):
            zero_pad(np.zeros((2000, 2000), dtype=np.uint8), 1024)

    def test_mask_dtype_preserved(self):
        m = np.zeros((10, 20), dtype=bool)
        m[3, 4] = True
        padded, offset = zero_pad(m, 64)
        assert padded.dtype == bool
        assert crop_padded(padded, offset, m.shape).tolist() == m.tolist()


class TestTimeSeries:
    def test_blank_has_slot_count_entries(self, geom):
        ts = TimeSeries.blank("heart_rate", geom)
        assert len(ts.slots) == 59
        assert ts.times()[:3] == [0, 5, 10]
        assert ts.times()[-1] == 290

    def test_values_must_be_integers(self):
        with pytest.raises(ValidationError):
            TimeSeries("heart_rate", [1.5])

    def test_unknown_symbol_rejected(self):
        with pytest.raises(ValidationError):
            TimeSeries("oxygen", [None])


def test_iround_half_up():
    assert iround(16.5) == 17
    assert iround(49.5) == 50
    assert iround(-0.5) == 0
    assert iround(2.49) == 2
