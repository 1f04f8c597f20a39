import json

import numpy as np
import pytest

from mrsim import phantoms
from mrsim.engine import corrupt_slice
from mrsim.image import ImageSlice, resize_bilinear
from mrsim.io import (load_image, read_manifest, read_record,
                      read_trajectory_csv, save_image, save_pgm,
                      write_manifest, write_record, write_trajectory_csv,
                      DatasetManifest, ManifestEntry)
from mrsim.motion import (SeverityStats, generate_random_trajectory)
from mrsim.sampling import ScannerConfig


class TestPgm:
    def test_8bit_normalization(self, tmp_path):
        p = tmp_path / "img.pgm"
        vals = np.zeros((8, 8), dtype=np.uint8)
        vals[0, 0] = 255
        vals[1, 1] = 51
        save_pgm(vals, p, maxval=255)
        img = load_image(p)
        assert img.pixels[0, 0] == 1.0
        assert img.pixels[1, 1] == pytest.approx(51 / 255)

    def test_16bit_normalization(self, tmp_path):
        p = tmp_path / "img16.pgm"
        vals = np.zeros((8, 8), dtype=np.uint16)
        vals[0, 0] = 65535
        save_pgm(vals, p, maxval=65535)
        img = load_image(p)
        assert img.pixels[0, 0] == 1.0
        assert img.pixels[0, 1] == 0.0

    def test_missing_sidecar_warns_and_defaults(self, tmp_path):
        p = tmp_path / "img.pgm"
        save_pgm(np.ones((8, 8), dtype=np.uint8), p)
        with pytest.warns(UserWarning, match="spacing"):
            img = load_image(p)
        assert img.pixel_spacing_mm == 1.0

    def test_comment_in_header(self, tmp_path):
        p = tmp_path / "img.pgm"
        data = bytes(range(64))
        p.write_bytes(b"P5\n# a comment\n8 8\n255\n" + data)
        with pytest.warns(UserWarning):
            img = load_image(p)
        assert img.pixels[0, 1] == pytest.approx(1 / 255)

    def test_odd_dimensions_rejected(self, tmp_path):
        p = tmp_path / "img.pgm"
        save_pgm(np.ones((9, 8), dtype=np.uint8), p)
        with pytest.raises(ValueError, match="even"), \
                pytest.warns(UserWarning):
            load_image(p)


class TestRawFloat32:
    def test_roundtrip_bit_identical(self, tmp_path, rng):
        img = ImageSlice(np.abs(rng.standard_normal((16, 16)))
                         .astype(np.float32).astype(float), 1.25)
        p = tmp_path / "img.f32"
        save_image(img, p)
        back = load_image(p)
        assert back == img

    def test_missing_sidecar_rejected(self, tmp_path):
        p = tmp_path / "img.f32"
        p.write_bytes(b"\0" * 4 * 64)
        with pytest.raises(ValueError, match="sidecar"):
            load_image(p)

    def test_nonfinite_rejected(self, tmp_path):
        p = tmp_path / "img.f32"
        pix = np.full((8, 8), np.nan, dtype="<f4")
        p.write_bytes(pix.tobytes())
        (tmp_path / "img.f32.json").write_text(json.dumps(
            {"width": 8, "height": 8, "pixel_spacing_mm": 1.0}))
        with pytest.raises(ValueError, match="finite"):
            load_image(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_image(tmp_path / "nope.f32")


class TestResize:
    def test_same_size_identity(self, rng):
        img = ImageSlice(np.abs(rng.standard_normal((16, 16))))
        out = resize_bilinear(img, 16, 16)
        assert np.array_equal(out.pixels, img.pixels)

    def test_constant_stays_constant(self):
        img = ImageSlice(np.full((16, 16), 0.7))
        out = resize_bilinear(img, 32, 32)
        assert np.allclose(out.pixels, 0.7, atol=1e-12)

    def test_upscaled_ramp_stays_linear_interior(self):
        n = 16
        ramp = np.tile(np.arange(n, dtype=float), (n, 1))
        out = resize_bilinear(ImageSlice(ramp), 2 * n, 2 * n)
        row = out.pixels[5]
        d = np.diff(row[2:-2])
        assert np.allclose(d, d[0], atol=1e-9)

    def test_spacing_rescaled(self):
        img = ImageSlice(np.ones((16, 16)), 2.0)
        out = resize_bilinear(img, 32, 32)
        assert out.pixel_spacing_mm == 1.0

    def test_invalid_target_rejected(self):
        img = ImageSlice(np.ones((16, 16)))
        with pytest.raises(ValueError):
            resize_bilinear(img, 15, 16)


class TestTrajectoryCsv:
    def test_roundtrip_bit_exact(self, tmp_path):
        traj = generate_random_trajectory(50, 400,
                                          SeverityStats(1.0, 0.6), 3)
        p = tmp_path / "t.csv"
        write_trajectory_csv(traj, p)
        back = read_trajectory_csv(p)
        assert back == traj

    def test_header_and_time_column(self, tmp_path):
        traj = generate_random_trajectory(4, 250, SeverityStats(1, 0.6), 1)
        p = tmp_path / "t.csv"
        write_trajectory_csv(traj, p)
        lines = p.read_text().splitlines()
        assert lines[0] == \
            "shot,time_s,tx_mm,ty_mm,tz_mm,rx_deg,ry_deg,rz_deg"
        assert len(lines) == 5
        assert float(lines[2].split(",")[1]) == pytest.approx(0.25)

    def test_single_row_needs_tr(self, tmp_path):
        traj = generate_random_trajectory(1, 400, SeverityStats(1, 0.6), 1)
        p = tmp_path / "t.csv"
        write_trajectory_csv(traj, p)
        with pytest.raises(ValueError, match="tr_ms"):
            read_trajectory_csv(p)
        assert read_trajectory_csv(p, tr_ms=400.0) == traj


class TestRecordRoundtrip:
    @pytest.fixture
    def record(self):
        img = phantoms.brain_phantom(32, seed=5)
        cfg = ScannerConfig(matrix_pe=32, matrix_fe=32, scheme="spiral")
        return corrupt_slice(img, cfg, SeverityStats(1.0, 0.6), seed=11)

    def test_roundtrip_equal(self, tmp_path, record):
        write_record(record, tmp_path)
        back = read_record(tmp_path, record.id)
        assert back == record

    def test_tampered_metrics_detected(self, tmp_path, record):
        paths = write_record(record, tmp_path)
        text = paths["metrics"].read_text().splitlines()
        parts = text[1].split(",")
        parts[5] = "0.123456"   # rmse column
        paths["metrics"].write_text(text[0] + "\n" + ",".join(parts) + "\n")
        with pytest.raises(ValueError, match="match"):
            read_record(tmp_path, record.id)

    def test_metrics_recompute_within_tolerance(self, tmp_path, record):
        write_record(record, tmp_path)
        read_record(tmp_path, record.id, verify_metrics=True)


class TestManifest:
    def test_empty_manifest_roundtrip(self, tmp_path):
        m = DatasetManifest(master_seed=7, entries=[])
        p = tmp_path / "manifest.json"
        write_manifest(m, p)
        back = read_manifest(p)
        assert back.master_seed == 7 and back.entries == []

    def test_duplicate_id_rejected(self, tmp_path):
        e = ManifestEntry(id="a", seed=1, label="clean", scheme="cartesian",
                          source="x", trial=0,
                          severity=SeverityStats(0, 0), files={},
                          metrics_summary={})
        with pytest.raises(ValueError, match="duplicate"):
            write_manifest(DatasetManifest(1, [e, e]),
                           tmp_path / "m.json")

    def test_missing_file_rejected(self, tmp_path):
        e = ManifestEntry(id="a", seed=1, label="clean", scheme="cartesian",
                          source="x", trial=0,
                          severity=SeverityStats(0, 0),
                          files={"clean": "gone.f32"}, metrics_summary={})
        with pytest.raises(ValueError, match="missing"):
            write_manifest(DatasetManifest(1, [e]), tmp_path / "m.json")

    def test_bad_version_rejected(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(json.dumps({"version": "2", "master_seed": 0,
                                 "entries": []}))
        with pytest.raises(ValueError, match="version"):
            read_manifest(p)
