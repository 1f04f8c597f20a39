import numpy as np
import pytest

from mrsim.sampling import (SCHEMES, ScannerConfig, build_plan,
                            cartesian_plan, radial_plan, scan_time,
                            spiral_plan, validate_plan)


def cfg(scheme="cartesian", pe=8, fe=8, **kw):
    return ScannerConfig(matrix_pe=pe, matrix_fe=fe, scheme=scheme, **kw)


class TestConfig:
    def test_defaults_valid(self):
        for scheme in SCHEMES:
            ScannerConfig(scheme=scheme).validate()

    @pytest.mark.parametrize("kw", [
        dict(tr_ms=0), dict(nex=0), dict(matrix_pe=7), dict(matrix_pe=6),
        dict(matrix_fe=10, matrix_pe=9), dict(scheme="epi"),
        dict(fov_mm=0), dict(noise_std=-1),
        dict(scheme="spiral", spiral_interleaves=7),
    ])
    def test_invalid_configs_rejected(self, kw):
        with pytest.raises(ValueError):
            ScannerConfig(**kw)

    def test_scheme_defaults(self):
        c = ScannerConfig(matrix_pe=256, matrix_fe=256, scheme="spiral")
        assert c.n_spiral_interleaves == 32
        assert c.n_spiral_turns == 4
        r = ScannerConfig(matrix_pe=256, matrix_fe=256, scheme="radial")
        assert r.n_radial_spokes == 256


class TestCartesian:
    def test_smallest_case_times_and_lines(self):
        # smallest valid matrix: 8 lines, times 0..7, ky = (i - 4) / 8
        plan = cartesian_plan(cfg(pe=8, fe=8))
        assert plan.n_shots_total == 8
        assert [s.time_index_tr for s in plan.shots] == list(range(8))
        kys = [s.samples[0, 1] for s in plan.shots]
        assert np.allclose(kys, (np.arange(8) - 4) / 8)
        assert np.allclose(plan.shots[0].samples[:, 0],
                           (np.arange(8) - 4) / 8)

    def test_416_shot_count(self):
        # 208 phase-encode steps x 2 excitations
        plan = cartesian_plan(cfg(pe=208, fe=256, nex=2))
        assert plan.n_shots_total == 416
        assert plan.shots[-1].time_index_tr == 415

    def test_full_coverage_once_per_excitation(self):
        plan = cartesian_plan(cfg(pe=16, fe=12, nex=2))
        assert validate_plan(plan) == []
        for e in range(2):
            coords = plan.sample_coords(e)
            uniq = {tuple(c) for c in np.round(coords, 12)}
            assert len(uniq) == 16 * 12

    def test_wrong_scheme_rejected(self):
        with pytest.raises(ValueError, match="scheme"):
            cartesian_plan(cfg(scheme="radial"))


class TestRadial:
    def test_two_spoke_angles(self):
        plan = radial_plan(cfg("radial", radial_spokes=2))
        s0, s1 = plan.shots[0].samples, plan.shots[1].samples
        assert np.allclose(s0[:, 1], 0.0, atol=1e-15)       # on kx axis
        assert np.allclose(s1[:, 0], 0.0, atol=1e-12)       # on ky axis

    def test_near_center_sample_every_spoke(self):
        plan = radial_plan(cfg("radial", pe=16, fe=16))
        for shot in plan.shots:
            r = np.hypot(shot.samples[:, 0], shot.samples[:, 1])
            assert r.min() <= 1 / (2 * 16) + 1e-12

    def test_default_budget_parity_256(self):
        plan = radial_plan(ScannerConfig(matrix_pe=256, matrix_fe=256,
                                         scheme="radial"))
        assert plan.sample_coords(0).shape[0] == 65536
        assert plan.n_shots_total == 256

    def test_point_reflection_symmetry(self):
        plan = radial_plan(cfg("radial", pe=16, fe=16))
        for shot in plan.shots:
            s = shot.samples
            step = np.hypot(*(s[1] - s[0]))
            for p in s:
                d = np.hypot(s[:, 0] + p[0], s[:, 1] + p[1]).min()
                assert d <= step / 2 + 1e-12

    def test_golden_ordering_option(self):
        plan = radial_plan(cfg("radial", pe=16, fe=16,
                               radial_ordering="golden"))
        assert validate_plan(plan) == []
        angles = [np.arctan2(s.samples[-1, 1], s.samples[-1, 0])
                  for s in plan.shots]
        assert len({round(a, 9) for a in angles}) == 16


class TestSpiral:
    def test_first_sample_at_origin(self):
        plan = spiral_plan(cfg("spiral", pe=16, fe=16,
                               spiral_interleaves=2, spiral_turns=2))
        for shot in plan.shots:
            assert np.allclose(shot.samples[0], [0.0, 0.0], atol=1e-15)

    def test_all_samples_within_kmax(self):
        plan = spiral_plan(cfg("spiral", pe=32, fe=32))
        kmax = 0.5 * 31 / 32
        for shot in plan.shots:
            r = np.hypot(shot.samples[:, 0], shot.samples[:, 1])
            assert np.all(r <= kmax + 1e-12)

    def test_default_budget_parity_256(self):
        plan = spiral_plan(ScannerConfig(matrix_pe=256, matrix_fe=256,
                                         scheme="spiral"))
        assert plan.n_shots_total == 32
        assert plan.samples_per_shot == 2048
        assert plan.sample_coords(0).shape[0] == 65536

    def test_nondividing_interleaves_rejected(self):
        with pytest.raises(ValueError, match="divide"):
            ScannerConfig(matrix_pe=16, matrix_fe=16, scheme="spiral",
                          spiral_interleaves=3)


class TestScanTime:
    def test_spin_echo_example_166s(self):
        # classic spin-echo numbers: TR 400 ms, 208 phase steps, NEX 2
        c = ScannerConfig(tr_ms=400, nex=2, matrix_pe=208, matrix_fe=256)
        assert scan_time(c) == pytest.approx(166.4, abs=1e-12)

    def test_single_shot_second(self):
        c = ScannerConfig(tr_ms=1000, matrix_pe=16, matrix_fe=16,
                          scheme="spiral", spiral_interleaves=1,
                          spiral_turns=8)
        assert scan_time(c) == 1.0

    def test_t2_style_long_scan(self):
        # long-TR spin-echo style configuration, hand arithmetic
        c = ScannerConfig(tr_ms=5725, nex=1, matrix_pe=188, matrix_fe=192)
        assert scan_time(c) == pytest.approx(188 * 5.725, abs=1e-9)

    def test_equal_budget_and_time_cartesian_radial(self):
        cart = ScannerConfig(matrix_pe=64, matrix_fe=64)
        rad = ScannerConfig(matrix_pe=64, matrix_fe=64, scheme="radial")
        assert scan_time(cart) == scan_time(rad)
        assert build_plan(cart).sample_coords(0).shape == \
            build_plan(rad).sample_coords(0).shape

    def test_spiral_time_follows_interleaves(self):
        spi = ScannerConfig(matrix_pe=64, matrix_fe=64, scheme="spiral")
        assert scan_time(spi) == spi.n_spiral_interleaves * 0.4


class TestValidatePlan:
    def test_all_schemes_valid(self):
        for scheme in SCHEMES:
            plan = build_plan(cfg(scheme, pe=16, fe=16, nex=2))
            assert validate_plan(plan) == []

    def test_out_of_bounds_sample_reported(self):
        plan = build_plan(cfg(pe=8, fe=8))
        bad = plan.shots[3].samples.copy()
        bad[0, 0] = 0.7
        object.__setattr__(plan.shots[3], "samples", bad)
        assert any("outside" in v for v in validate_plan(plan))

    def test_duplicate_time_index_reported(self):
        plan = build_plan(cfg(pe=8, fe=8))
        object.__setattr__(plan.shots[3], "time_index_tr", 2)
        assert any("consecutive" in v for v in validate_plan(plan))

    def test_budget_violation_reported(self):
        plan = build_plan(cfg("radial", pe=16, fe=16, radial_spokes=9))
        assert any("budget" in v for v in validate_plan(plan))

    def test_plans_deterministic(self):
        for scheme in SCHEMES:
            a = build_plan(cfg(scheme, pe=16, fe=16))
            b = build_plan(cfg(scheme, pe=16, fe=16))
            for sa, sb in zip(a.shots, b.shots):
                assert np.array_equal(sa.samples, sb.samples)

    def test_timestamps_bijection(self):
        plan = build_plan(cfg("spiral", pe=16, fe=16, nex=3))
        times = sorted(s.time_index_tr for s in plan.shots)
        assert times == list(range(plan.n_shots_total))
