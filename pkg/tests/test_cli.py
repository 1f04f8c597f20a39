import numpy as np
import pytest

from mrsim import phantoms
from mrsim.cli import main
from mrsim.io import read_manifest, read_trajectory_csv, save_image
from mrsim.motion import severity_rms


@pytest.fixture
def image_dir(tmp_path):
    d = tmp_path / "images"
    d.mkdir()
    for i in range(2):
        save_image(phantoms.brain_phantom(32, seed=i), d / f"brain{i}.f32")
    return d


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestTrajectoryCommand:
    def test_writes_csv_and_prints_severity(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        code, stdout, _ = run(["trajectory", "--shots", "208",
                               "--tr-ms", "400", "--disp", "1.0",
                               "--rot", "0.6", "--seed", "42",
                               "-o", str(out)], capsys)
        assert code == 0
        traj = read_trajectory_csv(out)
        assert len(traj) == 208
        sev = severity_rms(traj)
        assert sev.rms_displacement_mm == pytest.approx(1.0, rel=1e-9)
        assert "rms_disp_mm=1" in stdout and "rms_rot_deg=0.6" in stdout

    def test_zero_severity_zero_rows(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        code, _, _ = run(["trajectory", "--shots", "10", "--disp", "0",
                          "--rot", "0", "-o", str(out)], capsys)
        assert code == 0
        assert not np.any(read_trajectory_csv(out).poses)

    def test_missing_output_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["trajectory", "--shots", "10"])
        assert exc.value.code == 2


class TestSimulateCommand:
    def test_produces_record_files(self, tmp_path, image_dir, capsys):
        out = tmp_path / "out"
        code, stdout, _ = run(
            ["simulate", "-i", str(image_dir / "brain0.f32"),
             "--scheme", "cartesian", "--matrix", "32", "--tr-ms", "400",
             "--nex", "1", "--disp", "1.0", "--rot", "0.6", "--seed", "1",
             "--record-id", "demo", "-o", str(out)], capsys)
        assert code == 0
        for suffix in ("demo.clean.f32", "demo.corrupted.f32",
                       "demo.errmap.pgm", "demo.trajectory.csv",
                       "demo.metrics.csv", "demo.record.json"):
            assert (out / suffix).exists()
        assert (out / "metrics.csv").exists()
        assert "nrmse=" in stdout

    def test_zero_severity_blank_error_map(self, tmp_path, image_dir,
                                            capsys):
        out = tmp_path / "out"
        code, _, _ = run(
            ["simulate", "-i", str(image_dir / "brain0.f32"),
             "--matrix", "32", "--disp", "0", "--rot", "0",
             "--record-id", "z", "-o", str(out)], capsys)
        assert code == 0
        from mrsim.io import load_error_map
        assert not np.any(load_error_map(out / "z.errmap.pgm").values)

    def test_determinism_identical_bytes(self, tmp_path, image_dir,
                                          capsys):
        args = ["simulate", "-i", str(image_dir / "brain0.f32"),
                "--scheme", "spiral", "--matrix", "32", "--disp", "1.0",
                "--rot", "0.6", "--seed", "3", "--record-id", "r"]
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run(args + ["-o", str(out1)], capsys)[0] == 0
        assert run(args + ["-o", str(out2)], capsys)[0] == 0
        for f in sorted(out1.iterdir()):
            assert f.read_bytes() == (out2 / f.name).read_bytes(), f.name

    def test_unreadable_input_runtime_error(self, tmp_path, capsys):
        code, _, stderr = run(["simulate", "-i", str(tmp_path / "no.f32"),
                               "-o", str(tmp_path / "o")], capsys)
        assert code == 1
        assert "error" in stderr

    def test_bad_scheme_usage_error(self, tmp_path, image_dir):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "-i", str(image_dir / "brain0.f32"),
                  "--scheme", "zigzag", "-o", str(tmp_path / "o")])
        assert exc.value.code == 2


class TestBatchCommand:
    def test_entry_counts(self, tmp_path, image_dir, capsys):
        out = tmp_path / "ds"
        code, stdout, _ = run(
            ["batch", "-i", str(image_dir), "-o", str(out),
             "--matrix", "32", "--trials", "3", "--schemes", "cartesian",
             "--seed", "5", "--threads", "1"], capsys)
        assert code == 0
        manifest = read_manifest(out / "manifest.json")
        # 2 images x 3 trials x (motion + clean)
        assert len(manifest.entries) == 12
        labels = [e.label for e in manifest.entries]
        assert labels.count("motion") == 6 and labels.count("clean") == 6

    def test_rerun_bit_identical(self, tmp_path, image_dir, capsys):
        args = ["batch", "-i", str(image_dir), "--matrix", "32",
                "--trials", "2", "--schemes", "cartesian,spiral",
                "--seed", "9", "--threads", "1"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(args + ["-o", str(a)], capsys)[0] == 0
        assert run(args + ["-o", str(b)], capsys)[0] == 0
        files_a = sorted(p.relative_to(a) for p in a.rglob("*")
                         if p.is_file())
        files_b = sorted(p.relative_to(b) for p in b.rglob("*")
                         if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel

    def test_threads_do_not_change_output(self, tmp_path, image_dir,
                                          capsys):
        base = ["batch", "-i", str(image_dir), "--matrix", "32",
                "--trials", "2", "--schemes", "spiral", "--seed", "4"]
        a, b = tmp_path / "t1", tmp_path / "t2"
        assert run(base + ["--threads", "1", "-o", str(a)], capsys)[0] == 0
        assert run(base + ["--threads", "2", "-o", str(b)], capsys)[0] == 0
        for p in sorted(a.rglob("*")):
            if p.is_file():
                rel = p.relative_to(a)
                assert p.read_bytes() == (b / rel).read_bytes(), rel

    def test_empty_input_dir_runtime_error(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        code, _, stderr = run(["batch", "-i", str(empty),
                               "-o", str(tmp_path / "o")], capsys)
        assert code == 1
        assert "no .pgm" in stderr

    def test_multi_scheme_subdirectories(self, tmp_path, image_dir,
                                         capsys):
        out = tmp_path / "ds"
        code, _, _ = run(
            ["batch", "-i", str(image_dir), "-o", str(out),
             "--matrix", "32", "--trials", "1",
             "--schemes", "cartesian,radial,spiral", "--seed", "2",
             "--threads", "2"], capsys)
        assert code == 0
        manifest = read_manifest(out / "manifest.json")
        assert len(manifest.entries) == 2 * 1 * 3 * 2
        for scheme in ("cartesian", "radial", "spiral"):
            assert (out / scheme).is_dir()


class TestCompareCommand:
    def test_compare_paired_batches(self, tmp_path, image_dir, capsys):
        ds = tmp_path / "ds"
        assert run(["batch", "-i", str(image_dir), "-o", str(ds),
                    "--matrix", "32", "--trials", "4",
                    "--schemes", "cartesian,spiral", "--seed", "11",
                    "--threads", "2"], capsys)[0] == 0
        out = tmp_path / "report"
        code, stdout, _ = run(
            ["compare", "--manifests",
             f"cartesian={ds / 'manifest.json'}",
             f"spiral={ds / 'manifest.json'}",
             "--reps", "2", "-o", str(out)], capsys)
        assert code == 0
        assert (out / "comparison.csv").exists()
        assert "distortion ordering" in stdout

    def test_unpaired_manifests_rejected(self, tmp_path, image_dir,
                                         capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        for seed, d in ((1, a), (2, b)):
            assert run(["batch", "-i", str(image_dir), "-o", str(d),
                        "--matrix", "32", "--trials", "1",
                        "--schemes", "cartesian,spiral",
                        "--seed", str(seed), "--threads", "1"],
                       capsys)[0] == 0
        code, _, stderr = run(
            ["compare", "--manifests", f"cartesian={a / 'manifest.json'}",
             f"spiral={b / 'manifest.json'}", "-o", str(tmp_path / "r")],
            capsys)
        assert code == 1
        assert "unpaired" in stderr

    def test_degenerate_zero_motion_verdict(self, tmp_path, image_dir,
                                            capsys):
        ds = tmp_path / "dz"
        assert run(["batch", "-i", str(image_dir), "-o", str(ds),
                    "--matrix", "32", "--trials", "2",
                    "--schemes", "cartesian,spiral",
                    "--disp-mean", "0", "--disp-std", "0",
                    "--rot-mean", "0", "--rot-std", "0",
                    "--seed", "3", "--threads", "1"], capsys)[0] == 0
        code, stdout, _ = run(
            ["compare", "--manifests",
             f"cartesian={ds / 'manifest.json'}",
             f"spiral={ds / 'manifest.json'}", "--reps", "2",
             "-o", str(tmp_path / "r")], capsys)
        assert code == 0
        assert "degenerate" in stdout

    def test_env_seed_default(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("MRSIM_SEED", "77")
        out = tmp_path / "t.csv"
        code, _, _ = run(["trajectory", "--shots", "5", "-o", str(out)],
                         capsys)
        assert code == 0
        ref = tmp_path / "ref.csv"
        assert run(["trajectory", "--shots", "5", "--seed", "77",
                    "-o", str(ref)], capsys)[0] == 0
        assert out.read_bytes() == ref.read_bytes()


def test_help_lists_units(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    assert "milliseconds" in text and "millimeters" in text \
        and "degrees" in text
