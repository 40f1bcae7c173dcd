import json

import numpy as np
import pytest

from graphdigit.errors import FormatError, RasterParseError, ValidationError
from graphdigit.fileio import (
    PointAnnotation,
    RectAnnotation,
    load_annotations,
    load_graph_mask,
    load_mask,
    load_pad_meta,
    load_raster,
    load_series,
    save_annotations,
    save_mask,
    save_pad_meta,
    save_raster,
    save_series,
    sidecar_path,
)
from graphdigit.geometry import GraphGeometry, TimeSeries, zero_pad


class TestRasterRoundTrip:
    def test_bytes_identical_after_save_load_save(self, tmp_path):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 256, size=(37, 53), dtype=np.uint8)
        p1 = tmp_path / "a.pgm"
        p2 = tmp_path / "b.pgm"
        save_raster(img, p1)
        loaded = load_raster(p1)
        assert (loaded == img).all()
        save_raster(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_mask_levels_round_trip(self, tmp_path):
        m = np.random.default_rng(1).random((16, 9)) < 0.5
        path = tmp_path / "m.pgm"
        save_mask(m, path)
        raw = load_raster(path)
        assert set(np.unique(raw)).issubset({0, 255})
        assert (load_mask(path) == m).all()

    def test_truncated_payload_reports_offset(self, tmp_path):
        img = np.zeros((10, 10), dtype=np.uint8)
        path = tmp_path / "t.pgm"
        save_raster(img, path)
        data = path.read_bytes()
        path.write_bytes(data[:-7])
        with pytest.raises(RasterParseError) as err:
            load_raster(path)
        assert err.value.byte_offset is not None

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.pgm"
        path.write_bytes(b"P6\n3 3\n255\n" + b"\x00" * 9)
        with pytest.raises(RasterParseError) as err:
            load_raster(path)
        assert err.value.byte_offset == 0

    def test_trailing_bytes_rejected(self, tmp_path):
        img = np.zeros((4, 4), dtype=np.uint8)
        path = tmp_path / "t.pgm"
        save_raster(img, path)
        path.write_bytes(path.read_bytes() + b"junk")
        with pytest.raises(FormatError):
            load_raster(path)

    def test_non_255_maxval_rejected(self, tmp_path):
        path = tmp_path / "m.pgm"
        path.write_bytes(b"P5\n2 2\n65535\n" + b"\x00" * 8)
        with pytest.raises(FormatError):
            load_raster(path)

    def test_comment_in_header_tolerated(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# made by hand\n3 2\n255\n" + bytes(range(6)))
        img = load_raster(path)
        assert img.shape == (2, 3)
        assert img[1, 2] == 5


class TestSeries:
    def test_round_trip_with_blanks(self, tmp_path, geom):
        slots = [None] * 59
        slots[0], slots[7], slots[58] = 120, 85, 40
        ts = TimeSeries("heart_rate", slots)
        path = tmp_path / "hr.csv"
        save_series(ts, path)
        text = path.read_text()
        assert text.startswith("time_min,value\n0,120\n5,\n")
        back = load_series(path, "heart_rate", expected_slots=59)
        assert back.slots == ts.slots
        assert back.slot_minutes == 5
        save_series(back, tmp_path / "hr2.csv")
        assert (tmp_path / "hr2.csv").read_bytes() == path.read_bytes()

    def test_times_cover_full_window(self, tmp_path):
        ts = TimeSeries("systolic_bp", [None] * 59)
        path = tmp_path / "s.csv"
        save_series(ts, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 60
        assert lines[-1] == "290,"

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("time,value\n0,1\n")
        with pytest.raises(FormatError):
            load_series(path, "heart_rate")

    def test_non_arithmetic_times_rejected(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("time_min,value\n0,1\n5,2\n11,3\n")
        with pytest.raises(FormatError):
            load_series(path, "heart_rate")

    def test_wrong_row_count_rejected(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("time_min,value\n0,1\n")
        with pytest.raises(FormatError):
            load_series(path, "heart_rate", expected_slots=59)


class TestAnnotations:
    def test_round_trip(self, tmp_path):
        records = [
            PointAnnotation("heart_rate", 50, 100),
            RectAnnotation("diastolic_bp", 40, 30, 52, 38),
            RectAnnotation("systolic_bp", 10, 30, 17, 38),
        ]
        path = tmp_path / "ann.json"
        save_annotations(records, path)
        assert load_annotations(path) == records
        save_annotations(load_annotations(path), tmp_path / "ann2.json")
        assert (tmp_path / "ann2.json").read_bytes() == path.read_bytes()

    def test_unknown_symbol_names_record(self, tmp_path):
        path = tmp_path / "ann.json"
        path.write_text(json.dumps({"version": 1, "records": [{"symbol": "пульс", "row": 1, "col": 2}]}))
        with pytest.raises(ValidationError, match="record 0"):
            load_annotations(path)

    def test_mixed_fields_rejected(self, tmp_path):
        path = tmp_path / "ann.json"
        path.write_text(
            json.dumps({"version": 1, "records": [{"symbol": "heart_rate", "row": 1, "top": 2}]})
        )
        with pytest.raises(ValidationError):
            load_annotations(path)


class TestPadSidecar:
    def test_padded_mask_round_trip(self, tmp_path, geom):
        rng = np.random.default_rng(2)
        mask = rng.random((geom.image_height_px, geom.image_width_px)) < 0.1
        padded, offset = zero_pad(mask, 1024)
        path = tmp_path / "p.pgm"
        save_mask(padded, path)
        save_pad_meta(path, offset, mask.shape)
        assert sidecar_path(path).exists()
        got_offset, got_shape = load_pad_meta(path)
        assert got_offset == offset and got_shape == mask.shape
        recovered = load_graph_mask(path, geom)
        assert (recovered == mask).all()

    def test_unpadded_mask_loads_directly(self, tmp_path, geom):
        mask = np.zeros((geom.image_height_px, geom.image_width_px), dtype=bool)
        path = tmp_path / "m.pgm"
        save_mask(mask, path)
        assert load_graph_mask(path, geom).shape == mask.shape

    def test_wrong_dims_without_sidecar_names_file(self, tmp_path, geom):
        path = tmp_path / "bad.pgm"
        save_mask(np.zeros((50, 60), dtype=bool), path)
        with pytest.raises(ValidationError, match="bad.pgm"):
            load_graph_mask(path, geom)
