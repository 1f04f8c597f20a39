#!/usr/bin/env python3
"""Build the three k-space sampling plans and compare their geometry.

All schemes share one sample budget (matrix_pe x matrix_fe per excitation)
so motion-sensitivity comparisons are not confounded by sample count. The
default spiral packs the budget into matrix_pe/8 long interleaves, so its
scan is 8x shorter at the same TR.
"""

from pathlib import Path

from mrsim import ScannerConfig, build_plan, scan_time, validate_plan
from mrsim.io import write_plan_csv

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

n = 64
for scheme in ("cartesian", "radial", "spiral"):
    cfg = ScannerConfig(tr_ms=400.0, matrix_pe=n, matrix_fe=n,
                        scheme=scheme)
    plan = build_plan(cfg)
    coords = plan.sample_coords(0)
    print(f"{scheme:10s}: {plan.n_shots_total:3d} shots x "
          f"{plan.samples_per_shot:4d} samples = {coords.shape[0]}, "
          f"scan time {scan_time(cfg):6.1f} s, "
          f"violations: {validate_plan(plan)}")
    write_plan_csv(plan, out / f"plan_{scheme}_{n}.csv")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 3, figsize=(14, 4.6))
    for ax, scheme in zip(axes, ("cartesian", "radial", "spiral")):
        cfg = ScannerConfig(matrix_pe=n, matrix_fe=n, scheme=scheme)
        plan = build_plan(cfg)
        # color samples by acquisition time to show the motion exposure
        for shot in plan.shots[:: max(1, plan.n_shots_total // 16)]:
            ax.plot(shot.samples[:, 0], shot.samples[:, 1], ".",
                    markersize=1.5)
        ax.set_title(f"{scheme} ({plan.n_shots_total} shots)")
        ax.set_xlim(-0.55, 0.55)
        ax.set_ylim(-0.55, 0.55)
        ax.set_aspect("equal")
    fig.suptitle("k-space sampling patterns (every 16th shot)")
    fig.savefig(out / "sampling_schemes.png", dpi=120)
    print(f"wrote {out / 'sampling_schemes.png'}")
except ImportError:
    print("matplotlib not installed; skipping the figure")
