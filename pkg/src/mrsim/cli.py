"""mrsim command line: trajectory | simulate | batch | compare.

Exit codes: 0 success, 1 runtime/IO error, 2 usage error. The master seed
defaults to the MRSIM_SEED environment variable (0 when unset). All flag
names carry their units.
"""

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .dataset import SeverityPolicy, compare_manifests, generate_batch
from .engine import corrupt_slice
from .image import resize_bilinear
from .io import (load_image, metrics_csv_row, write_metrics_csv,
                 write_plan_csv, write_record, write_trajectory_csv)
from .motion import SeverityStats, generate_random_trajectory, severity_rms
from .sampling import SCHEMES, ScannerConfig, build_plan


def _default_seed() -> int:
    return int(os.environ.get("MRSIM_SEED", "0"))


def _add_scanner_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=SCHEMES, default="cartesian",
                   help="k-space sampling scheme")
    p.add_argument("--tr-ms", type=float, default=400.0,
                   help="repetition time in milliseconds")
    p.add_argument("--nex", type=int, default=1,
                   help="number of excitations (averaged)")
    p.add_argument("--matrix", type=int, default=256,
                   help="square matrix size in pixels")
    p.add_argument("--fov-mm", type=float, default=256.0,
                   help="field of view in millimeters")
    p.add_argument("--spokes", type=int, default=None,
                   help="radial spokes per excitation (radial only)")
    p.add_argument("--interleaves", type=int, default=None,
                   help="spiral interleaves per excitation (spiral only)")
    p.add_argument("--turns", type=int, default=None,
                   help="spiral turns per interleave (spiral only)")
    p.add_argument("--noise-std", type=float, default=0.0,
                   help="complex k-space noise std (absolute units, "
                        "default off)")


def _scanner_config(args, scheme=None) -> ScannerConfig:
    scheme = scheme or args.scheme
    if args.spokes is not None and scheme != "radial":
        raise ValueError("--spokes applies to the radial scheme only")
    if (args.interleaves is not None or args.turns is not None) \
            and scheme != "spiral":
        raise ValueError("--interleaves/--turns apply to the spiral "
                         "scheme only")
    return ScannerConfig(tr_ms=args.tr_ms, nex=args.nex,
                         matrix_pe=args.matrix, matrix_fe=args.matrix,
                         scheme=scheme, radial_spokes=args.spokes,
                         spiral_interleaves=args.interleaves,
                         spiral_turns=args.turns, fov_mm=args.fov_mm,
                         noise_std=args.noise_std)


def cmd_trajectory(args) -> int:
    target = SeverityStats(args.disp, args.rot)
    traj = generate_random_trajectory(args.shots, args.tr_ms, target,
                                      args.seed, in_plane_only=False)
    write_trajectory_csv(traj, args.output)
    sev = severity_rms(traj)
    print(f"rms_disp_mm={sev.rms_displacement_mm:.9g} "
          f"rms_rot_deg={sev.rms_rotation_deg:.9g}")
    return 0


def cmd_simulate(args) -> int:
    image = load_image(args.input)
    config = _scanner_config(args)
    if image.shape != (config.matrix_pe, config.matrix_fe):
        image = resize_bilinear(image, config.matrix_fe, config.matrix_pe)
    severity = SeverityStats(args.disp, args.rot)
    record = corrupt_slice(image, config, severity, args.seed,
                           record_id=args.record_id)
    out = Path(args.output)
    write_record(record, out)
    write_metrics_csv([metrics_csv_row(record.id, config.scheme,
                                       record.seed, severity,
                                       record.metrics)],
                      out / "metrics.csv")
    if args.emit_plan:
        write_plan_csv(build_plan(config), out / f"{record.id}.plan.csv")
    print(f"id={record.id} rmse={record.metrics.rmse:.9g} "
          f"nrmse={record.metrics.nrmse:.9g}")
    return 0


def cmd_batch(args) -> int:
    in_dir = Path(args.input)
    paths = sorted(p for p in in_dir.iterdir()
                   if p.suffix in (".pgm", ".f32"))
    if not paths:
        print(f"error: no .pgm or .f32 images in {in_dir}",
              file=sys.stderr)
        return 1
    images = []
    for p in paths:
        img = load_image(p)
        if img.shape != (args.matrix, args.matrix):
            img = resize_bilinear(img, args.matrix, args.matrix)
        images.append((p.stem.replace(".", "_"), img))
    schemes = args.schemes.split(",")
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r} in --schemes")
    policy = SeverityPolicy(disp_mean=args.disp_mean, disp_std=args.disp_std,
                            rot_mean=args.rot_mean, rot_std=args.rot_std)
    manifest = generate_batch(images, args.output, schemes, args.trials,
                              args.seed, tr_ms=args.tr_ms, nex=args.nex,
                              severity_policy=policy,
                              noise_std=args.noise_std,
                              threads=args.threads)
    print(f"manifest={manifest}")
    return 0


def cmd_compare(args) -> int:
    manifest_paths = {}
    for item in args.manifests:
        scheme, _, path = item.partition("=")
        if not path:
            print("error: --manifests entries must look like "
                  "scheme=path/manifest.json", file=sys.stderr)
            return 2
        manifest_paths[scheme] = path
    report = compare_manifests(manifest_paths, reps=args.reps,
                               train_frac=args.train_frac, seed=args.seed)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.csv").write_text(report.to_csv())
    text = report.to_text()
    (out / "comparison.txt").write_text(text + "\n")
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrsim",
        description="Retrospective MRI motion-artifact simulator")
    parser.add_argument("--version", action="version",
                        version=f"mrsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trajectory",
                       help="generate a random rigid-motion trajectory CSV")
    p.add_argument("--shots", type=int, required=True,
                   help="number of TR shots")
    p.add_argument("--tr-ms", type=float, default=400.0,
                   help="shot duration in milliseconds")
    p.add_argument("--disp", type=float, default=1.0,
                   help="target RMS displacement in millimeters")
    p.add_argument("--rot", type=float, default=0.6,
                   help="target RMS rotation in degrees")
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help="random seed (default: MRSIM_SEED or 0)")
    p.add_argument("-o", "--output", required=True,
                   help="output CSV path")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("simulate",
                       help="corrupt one slice and write its record")
    p.add_argument("-i", "--input", required=True,
                   help="input image (PGM P5 or raw float32 + sidecar)")
    _add_scanner_flags(p)
    p.add_argument("--disp", type=float, default=1.0,
                   help="target RMS displacement in millimeters")
    p.add_argument("--rot", type=float, default=0.6,
                   help="target RMS rotation in degrees")
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help="random seed (default: MRSIM_SEED or 0)")
    p.add_argument("--record-id", default=None,
                   help="record id (default derived from scheme and seed)")
    p.add_argument("--emit-plan", action="store_true",
                   help="also export the sampling plan CSV")
    p.add_argument("-o", "--output", required=True,
                   help="output directory for the record file set")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("batch",
                       help="generate a labeled clean/motion dataset")
    p.add_argument("-i", "--input", required=True,
                   help="directory of input images (.pgm / .f32)")
    _add_scanner_flags(p)
    p.add_argument("--schemes", default="cartesian",
                   help="comma-separated scheme list")
    p.add_argument("--trials", type=int, default=1,
                   help="motion trials per image")
    p.add_argument("--disp-mean", type=float, default=1.0,
                   help="severity draw: mean RMS displacement in mm")
    p.add_argument("--disp-std", type=float, default=0.4,
                   help="severity draw: std of RMS displacement in mm")
    p.add_argument("--rot-mean", type=float, default=0.6,
                   help="severity draw: mean RMS rotation in degrees")
    p.add_argument("--rot-std", type=float, default=0.4,
                   help="severity draw: std of RMS rotation in degrees")
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help="master seed (default: MRSIM_SEED or 0)")
    p.add_argument("--threads", type=int, default=os.cpu_count(),
                   help="worker processes (default: machine parallelism)")
    p.add_argument("-o", "--output", required=True,
                   help="output dataset directory")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("compare",
                       help="compare schemes from paired batch manifests")
    p.add_argument("--manifests", nargs="+", required=True,
                   metavar="SCHEME=MANIFEST",
                   help="per-scheme manifest paths, e.g. "
                        "cartesian=data/manifest.json")
    p.add_argument("--reps", type=int, default=5,
                   help="probe train/test repetitions")
    p.add_argument("--train-frac", type=float, default=0.7,
                   help="training fraction of the probe split")
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help="split/probe seed (default: MRSIM_SEED or 0)")
    p.add_argument("-o", "--output", required=True,
                   help="output directory for comparison CSV and text")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
