"""Labeled dataset generation and scheme comparison.

Batch generation pairs every motion record with a clean record of the same
slice. Trajectories are paired across schemes: one trajectory per
(image, trial) is generated on the common shot timeline (the longest scan
among the schemes) and each scheme's acquisition reads the poses for its
own shot timestamps. Faster schemes therefore see the early part of the
same motion record, exactly as a shorter scan of the same subject would.

Every record's seed is derived from (master seed, image, trial) with
SplitMix64, so datasets are reproducible from the manifest alone and are
independent of worker-pool scheduling.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import corrupt_slice, reconstruct, simulate_acquisition
from .image import ImageSlice
from .io import (DatasetManifest, ManifestEntry, metrics_csv_row,
                 read_manifest, read_record, write_manifest,
                 write_metrics_csv, write_record)
from .metrics import auc_rank, probe_features, train_probe
from .motion import MotionTrajectory, SeverityStats, \
    generate_random_trajectory
from .recon import GriddingParams
from .rng import make_rng, splitmix64
from .sampling import ScannerConfig

_TAG_SEVERITY = 1
_TAG_TRAJECTORY = 2

#: severity policy defaults (mm / deg), means and stds of the per-record draw
DISP_MEAN, DISP_STD, DISP_MIN = 1.0, 0.4, 0.05
ROT_MEAN, ROT_STD, ROT_MIN = 0.6, 0.4, 0.0


@dataclass(frozen=True)
class SeverityPolicy:
    """Random per-record severity targets: clamped normal draws."""

    disp_mean: float = DISP_MEAN
    disp_std: float = DISP_STD
    disp_min: float = DISP_MIN
    rot_mean: float = ROT_MEAN
    rot_std: float = ROT_STD
    rot_min: float = ROT_MIN

    def draw(self, master_seed: int, image_index: int,
             trial: int) -> SeverityStats:
        rng = make_rng(master_seed, _TAG_SEVERITY, image_index, trial)
        # the floor never exceeds the mean, so a zero-motion policy
        # (mean 0, std 0) really draws zero
        disp = max(min(self.disp_min, self.disp_mean),
                   rng.normal(self.disp_mean, self.disp_std))
        rot = max(min(self.rot_min, self.rot_mean),
                  rng.normal(self.rot_mean, self.rot_std))
        return SeverityStats(disp, rot)


def shared_trajectory_length(configs: list[ScannerConfig]) -> int:
    return max(c.n_shots_total for c in configs)


def clean_reconstruction(image: ImageSlice, config: ScannerConfig,
                         gridding: GriddingParams | None = None,
                         offgrid: str = "auto") -> ImageSlice:
    """Zero-motion reference reconstruction (float32-storage rounded)."""
    from .sampling import build_plan
    plan = build_plan(config)
    identity = MotionTrajectory.identity(plan.n_shots_total, config.tr_ms)
    acq = simulate_acquisition(image, identity, plan, offgrid=offgrid)
    return reconstruct(acq, gridding).astype_storage()


def _record_task(args):
    (image, config, severity, seed, traj_poses, tr_ms, label, record_id,
     out_dir, clean_recon, offgrid) = args
    trajectory = None
    if traj_poses is not None:
        trajectory = MotionTrajectory(traj_poses, tr_ms)
    record = corrupt_slice(image, config, severity, seed,
                           trajectory=trajectory, clean_recon=clean_recon,
                           offgrid=offgrid, record_id=record_id)
    paths = write_record(record, out_dir)
    return {"id": record.id,
            "files": {k: str(Path(out_dir).name + "/" + v.name)
                      for k, v in paths.items() if k != "meta"}
            | {"meta": str(Path(out_dir).name + "/" + paths["meta"].name)},
            "metrics": {"rmse": record.metrics.rmse,
                        "nrmse": record.metrics.nrmse,
                        "hf_ratio": record.metrics.highfreq_energy_ratio,
                        "score": record.metrics.artifact_score},
            "csv_row": metrics_csv_row(record.id, config.scheme, seed,
                                       severity, record.metrics)}


def generate_batch(images: list[tuple[str, ImageSlice]], out_dir,
                   schemes: list[str], trials: int, master_seed: int,
                   tr_ms: float = 400.0, nex: int = 1,
                   severity_policy: SeverityPolicy | None = None,
                   noise_std: float = 0.0, threads: int | None = None,
                   gridding: GriddingParams | None = None,
                   offgrid: str = "auto") -> Path:
    """Generate motion/clean record pairs and write the dataset manifest.

    Returns the manifest path. Layout: one subdirectory per scheme under
    out_dir, plus manifest.json and metrics.csv at the top level.
    """
    if not images:
        raise ValueError("no input images")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if severity_policy is None:
        severity_policy = SeverityPolicy()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    configs = {}
    for scheme in schemes:
        h, w = images[0][1].shape
        configs[scheme] = ScannerConfig(tr_ms=tr_ms, nex=nex, matrix_pe=h,
                                        matrix_fe=w, scheme=scheme,
                                        noise_std=noise_std)
    for name, img in images:
        if img.shape != images[0][1].shape:
            raise ValueError(f"image {name}: all batch images must share "
                             f"one matrix size")
    n_shared = shared_trajectory_length(list(configs.values()))

    clean_refs = {}
    for scheme, cfg in configs.items():
        for name, img in images:
            clean_refs[(scheme, name)] = clean_reconstruction(
                img, cfg, gridding, offgrid)

    tasks = []
    entry_meta = []
    for i, (name, img) in enumerate(images):
        for t in range(trials):
            severity = severity_policy.draw(master_seed, i, t)
            traj_seed = splitmix64(master_seed, _TAG_TRAJECTORY, i, t)
            shared = generate_random_trajectory(
                n_shared, tr_ms, severity, traj_seed, in_plane_only=True)
            for scheme in schemes:
                cfg = configs[scheme]
                scheme_dir = out_dir / scheme
                for label in ("motion", "clean"):
                    rid = f"{name}_t{t:03d}_{scheme}_{label}"
                    sev = severity if label == "motion" \
                        else SeverityStats(0.0, 0.0)
                    poses = shared.poses if label == "motion" else None
                    tasks.append((img, cfg, sev, traj_seed, poses, tr_ms,
                                  label, rid, scheme_dir,
                                  clean_refs[(scheme, name)], offgrid))
                    entry_meta.append({"label": label, "scheme": scheme,
                                       "source": name, "trial": t,
                                       "severity": sev, "seed": traj_seed})

    if threads is not None and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_record_task, tasks, chunksize=1))
    else:
        results = [_record_task(t) for t in tasks]

    entries = []
    csv_rows = []
    for meta, res in zip(entry_meta, results):
        entries.append(ManifestEntry(
            id=res["id"], seed=meta["seed"], label=meta["label"],
            scheme=meta["scheme"], source=meta["source"],
            trial=meta["trial"], severity=meta["severity"],
            files=res["files"], metrics_summary=res["metrics"]))
        csv_rows.append(res["csv_row"])

    manifest = DatasetManifest(master_seed=master_seed, entries=entries)
    manifest_path = out_dir / "manifest.json"
    write_manifest(manifest, manifest_path)
    write_metrics_csv(csv_rows, out_dir / "metrics.csv")
    return manifest_path


# ---------------------------------------------------------------------------
# scheme comparison

@dataclass(frozen=True)
class SchemeStats:
    scheme: str
    n_motion: int
    nrmse_mean: float
    nrmse_std: float
    auc_mean: float
    auc_std: float


@dataclass(frozen=True)
class ComparisonReport:
    stats: list            # SchemeStats, in the input scheme order
    distortion_order: list
    auc_order: list
    distortion_verdict: str
    auc_verdict: str

    def to_text(self) -> str:
        lines = ["scheme      n_motion  nrmse (mean+/-std)   "
                 "probe AUC (mean+/-std)"]
        for s in self.stats:
            lines.append(f"{s.scheme:10s}  {s.n_motion:8d}  "
                         f"{s.nrmse_mean:.5f} +/- {s.nrmse_std:.5f}  "
                         f"{s.auc_mean:.4f} +/- {s.auc_std:.4f}")
        lines.append(f"distortion ordering: {self.distortion_verdict}")
        lines.append(f"detectability ordering: {self.auc_verdict}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["scheme,n_motion,nrmse_mean,nrmse_std,auc_mean,auc_std"]
        for s in self.stats:
            lines.append(f"{s.scheme},{s.n_motion},{s.nrmse_mean:.9g},"
                         f"{s.nrmse_std:.9g},{s.auc_mean:.9g},"
                         f"{s.auc_std:.9g}")
        return "\n".join(lines) + "\n"


def _probe_auc_runs(features: np.ndarray, labels: np.ndarray, reps: int,
                    train_frac: float, seed: int) -> list[float]:
    aucs = []
    idx_pos = np.flatnonzero(labels == 1)
    idx_neg = np.flatnonzero(labels == 0)
    for rep in range(reps):
        rng = make_rng(seed, 0xA0C, rep)
        train, test = [], []
        for idx in (idx_pos, idx_neg):
            perm = rng.permutation(idx)
            k = int(round(train_frac * len(perm)))
            train.extend(perm[:k])
            test.extend(perm[k:])
        train = np.array(sorted(train))
        test = np.array(sorted(test))
        model = train_probe(features[train], labels[train], seed=rep)
        aucs.append(auc_rank(model.scores(features[test]), labels[test]))
    return aucs


def compare_manifests(manifest_paths: dict, reps: int = 5,
                      train_frac: float = 0.7, seed: int = 0
                      ) -> ComparisonReport:
    """Per-scheme distortion and probe-AUC statistics with ordering verdicts.

    manifest_paths maps scheme name to its manifest file. Manifests must be
    paired: the same (source, trial) pairs and per-trial seeds across all
    schemes, as produced by a single generate_batch call (or separate calls
    with one master seed).
    """
    if len(manifest_paths) < 2:
        raise ValueError("comparison needs manifests for >= 2 schemes")
    data = {}
    pairing = None
    for scheme, path in manifest_paths.items():
        manifest = read_manifest(path)
        entries = [e for e in manifest.entries if e.scheme == scheme]
        if not entries:
            raise ValueError(f"{path}: no entries for scheme {scheme}")
        key = sorted((e.source, e.trial, e.label, e.seed) for e in entries)
        pairs = sorted(set((s, t, sd) for s, t, _, sd in key))
        if pairing is None:
            pairing = pairs
        elif pairs != pairing:
            raise ValueError(
                f"{path}: unpaired manifest; (source, trial, seed) sets "
                f"differ between schemes - regenerate with one master seed")
        data[scheme] = (Path(path).parent, entries)

    stats = []
    order_metrics = {}
    for scheme, (base, entries) in data.items():
        nrmses = [e.metrics_summary["nrmse"] for e in entries
                  if e.label == "motion"]
        feats, labels = [], []
        for e in entries:
            rec_dir = base / Path(e.files["meta"]).parent
            record = read_record(rec_dir, e.id, verify_metrics=False)
            feats.append(probe_features(record.corrupted))
            labels.append(1 if e.label == "motion" else 0)
        feats = np.array(feats)
        labels = np.array(labels)
        aucs = _probe_auc_runs(feats, labels, reps, train_frac, seed)
        stats.append(SchemeStats(
            scheme=scheme, n_motion=len(nrmses),
            nrmse_mean=float(np.mean(nrmses)),
            nrmse_std=float(np.std(nrmses)),
            auc_mean=float(np.mean(aucs)), auc_std=float(np.std(aucs))))
        order_metrics[scheme] = (float(np.mean(nrmses)),
                                 float(np.mean(aucs)))

    if all(s.nrmse_mean < 1e-12 for s in stats):
        dist_verdict = "no ordering (degenerate: zero distortion everywhere)"
        auc_verdict = "no ordering (degenerate)"
        dist_order = auc_order = [s.scheme for s in stats]
    else:
        dist_order = sorted(order_metrics, key=lambda s: -order_metrics[s][0])
        auc_order = sorted(order_metrics, key=lambda s: -order_metrics[s][1])
        dist_verdict = " >= ".join(dist_order)
        auc_verdict = " >= ".join(auc_order)

    return ComparisonReport(stats=stats, distortion_order=dist_order,
                            auc_order=auc_order,
                            distortion_verdict=dist_verdict,
                            auc_verdict=auc_verdict)
