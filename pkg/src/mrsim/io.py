"""File formats: images, trajectories, simulation records and manifests.

Formats (all little-endian unless PGM requires otherwise):

* images: raw float32 (little-endian, row-major) next to a JSON sidecar
  ``<file>.json`` holding width/height/pixel_spacing_mm/byte_order, or
  binary PGM (P5, 8- or 16-bit big-endian samples) with intensities
  normalized to [0, 1] on load;
* trajectory CSV: ``shot,time_s,tx_mm,ty_mm,tz_mm,rx_deg,ry_deg,rz_deg``;
* metrics CSV:
  ``id,scheme,seed,rms_disp_mm,rms_rot_deg,rmse,nrmse,hf_ratio,score``;
* plan CSV (debug export): ``shot,time_index,kx,ky``;
* manifest: JSON, format version "1", with the master seed and per-entry
  seeds so the dataset can be regenerated bit-identically.

Floats in CSV files are written with 17 significant digits so round trips
are bit-exact.
"""

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .image import ImageSlice
from .metrics import ErrorMap, MetricsReport, compute_metrics
from .motion import MotionTrajectory, SeverityStats
from .sampling import SamplingPlan, ScannerConfig

MANIFEST_VERSION = "1"
_FMT = "%.17g"


def make_record_id(scheme: str, seed: int) -> str:
    return f"{scheme}_{seed & (1 << 64) - 1:016x}"


# ---------------------------------------------------------------------------
# images

def _sidecar_path(path: Path) -> Path:
    return Path(str(path) + ".json")


def save_image(image: ImageSlice, path) -> None:
    """Raw float32 little-endian with a JSON sidecar."""
    path = Path(path)
    pix = image.pixels.astype("<f4")
    path.write_bytes(pix.tobytes())
    sidecar = {"width": image.width, "height": image.height,
               "pixel_spacing_mm": image.pixel_spacing_mm,
               "byte_order": "little-endian", "dtype": "float32"}
    _sidecar_path(path).write_text(json.dumps(sidecar, sort_keys=True)
                                   + "\n")


def _load_f32(path: Path) -> ImageSlice:
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        raise ValueError(f"missing sidecar {sidecar} for raw image {path}")
    meta = json.loads(sidecar.read_text())
    w, h = int(meta["width"]), int(meta["height"])
    data = np.frombuffer(path.read_bytes(), dtype="<f4")
    if data.size != w * h:
        raise ValueError(f"{path}: expected {w * h} float32 values, "
                         f"got {data.size}")
    return ImageSlice(data.reshape(h, w).astype(float),
                      float(meta.get("pixel_spacing_mm", 1.0)))


def _read_pgm_tokens(buf: bytes, count: int):
    # header tokens separated by whitespace, '#' comments run to newline
    tokens = []
    i = 0
    while len(tokens) < count:
        if i >= len(buf):
            raise ValueError("truncated PGM header")
        c = buf[i:i + 1]
        if c == b"#":
            while i < len(buf) and buf[i:i + 1] != b"\n":
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(buf) and not buf[j:j + 1].isspace():
                j += 1
            tokens.append(buf[i:j])
            i = j
    return tokens, i + 1   # single whitespace after maxval precedes data


def _load_pgm(path: Path, warn_spacing: bool = True) -> ImageSlice:
    buf = path.read_bytes()
    tokens, offset = _read_pgm_tokens(buf, 4)
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    w, h, maxval = (int(t) for t in tokens[1:4])
    if maxval <= 0 or maxval >= 65536:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    dtype = ">u2" if maxval > 255 else "u1"
    data = np.frombuffer(buf, dtype=dtype, count=w * h, offset=offset)
    if data.size != w * h:
        raise ValueError(f"{path}: truncated pixel data")
    spacing = 1.0
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        spacing = float(json.loads(sidecar.read_text())
                        .get("pixel_spacing_mm", 1.0))
    elif warn_spacing:
        warnings.warn(f"{path}: no sidecar, assuming 1.0 mm pixel spacing")
    return ImageSlice(data.reshape(h, w).astype(float) / maxval, spacing)


def load_image(path) -> ImageSlice:
    """Load a PGM (P5) or raw float32 image and enforce dataset invariants."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    with open(path, "rb") as f:
        magic = f.read(2)
    image = _load_pgm(path) if magic == b"P5" else _load_f32(path)
    image.validate_dataset()
    return image


def save_pgm(values: np.ndarray, path, maxval: int = 255) -> None:
    """Write integer grayscale values as binary PGM (P5)."""
    values = np.asarray(values)
    h, w = values.shape
    dtype = ">u2" if maxval > 255 else "u1"
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n{maxval}\n".encode())
        f.write(values.astype(dtype).tobytes())


def save_error_map(errmap: ErrorMap, path) -> None:
    save_pgm(errmap.values, path, maxval=255)


def load_error_map(path) -> ErrorMap:
    img = _load_pgm(Path(path), warn_spacing=False)
    return ErrorMap(np.rint(img.pixels * 255).astype(np.uint8))


# ---------------------------------------------------------------------------
# CSV formats

def write_trajectory_csv(traj: MotionTrajectory, path) -> None:
    times = traj.times_s
    with open(path, "w") as f:
        f.write("shot,time_s,tx_mm,ty_mm,tz_mm,rx_deg,ry_deg,rz_deg\n")
        for i, pose in enumerate(traj.poses):
            cols = ",".join(_FMT % v for v in pose)
            f.write(f"{i},{_FMT % times[i]},{cols}\n")


def read_trajectory_csv(path, tr_ms: float | None = None
                        ) -> MotionTrajectory:
    rows = Path(path).read_text().strip().splitlines()
    if not rows or not rows[0].startswith("shot,"):
        raise ValueError(f"{path}: not a trajectory CSV")
    data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    if data.size == 0:
        raise ValueError(f"{path}: empty trajectory")
    if tr_ms is None:
        if data.shape[0] < 2:
            raise ValueError(f"{path}: single-row trajectory needs an "
                             f"explicit tr_ms")
        tr_ms = (data[1, 1] - data[0, 1]) * 1000.0
    return MotionTrajectory(data[:, 2:8], tr_ms)


def write_plan_csv(plan: SamplingPlan, path) -> None:
    with open(path, "w") as f:
        f.write("shot,time_index,kx,ky\n")
        for shot in plan.shots:
            for kx, ky in shot.samples:
                f.write(f"{shot.index},{shot.time_index_tr},"
                        f"{_FMT % kx},{_FMT % ky}\n")


METRICS_HEADER = ("id,scheme,seed,rms_disp_mm,rms_rot_deg,rmse,nrmse,"
                  "hf_ratio,score")


def metrics_csv_row(record_id: str, scheme: str, seed: int,
                    severity: SeverityStats, metrics: MetricsReport) -> str:
    vals = (severity.rms_displacement_mm, severity.rms_rotation_deg,
            metrics.rmse, metrics.nrmse, metrics.highfreq_energy_ratio,
            metrics.artifact_score)
    return f"{record_id},{scheme},{seed}," + ",".join(_FMT % v for v in vals)


def write_metrics_csv(rows: list[str], path) -> None:
    with open(path, "w") as f:
        f.write(METRICS_HEADER + "\n")
        for row in rows:
            f.write(row + "\n")


def read_metrics_csv(path) -> list[dict]:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != METRICS_HEADER:
        raise ValueError(f"{path}: bad metrics CSV header")
    names = METRICS_HEADER.split(",")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(names, parts))
        for k in names[3:]:
            row[k] = float(row[k])
        row["seed"] = int(row["seed"])
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# simulation records

@dataclass(frozen=True)
class SimulationRecord:
    """One dataset row: the full outcome of a single simulated scan."""

    id: str
    config: ScannerConfig
    seed: int
    severity: SeverityStats
    clean: ImageSlice
    corrupted: ImageSlice
    error_map: ErrorMap
    metrics: MetricsReport
    trajectory: MotionTrajectory

    def __eq__(self, other) -> bool:
        return (isinstance(other, SimulationRecord)
                and self.id == other.id
                and self.config == other.config
                and self.seed == other.seed
                and self.severity == other.severity
                and self.clean == other.clean
                and self.corrupted == other.corrupted
                and np.array_equal(self.error_map.values,
                                   other.error_map.values)
                and self.metrics == other.metrics
                and self.trajectory == other.trajectory)


def record_paths(directory, record_id: str) -> dict:
    d = Path(directory)
    return {"meta": d / f"{record_id}.record.json",
            "clean": d / f"{record_id}.clean.f32",
            "corrupted": d / f"{record_id}.corrupted.f32",
            "error_map": d / f"{record_id}.errmap.pgm",
            "trajectory": d / f"{record_id}.trajectory.csv",
            "metrics": d / f"{record_id}.metrics.csv"}


def write_record(record: SimulationRecord, directory) -> dict:
    """Write the record file set; returns the path mapping."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = record_paths(d, record.id)
    save_image(record.clean, paths["clean"])
    save_image(record.corrupted, paths["corrupted"])
    save_error_map(record.error_map, paths["error_map"])
    write_trajectory_csv(record.trajectory, paths["trajectory"])
    write_metrics_csv([metrics_csv_row(record.id, record.config.scheme,
                                       record.seed, record.severity,
                                       record.metrics)], paths["metrics"])
    meta = {"id": record.id,
            "seed": record.seed,
            "config": record.config.to_dict(),
            "severity": {"rms_displacement_mm":
                         record.severity.rms_displacement_mm,
                         "rms_rotation_deg":
                         record.severity.rms_rotation_deg},
            "files": {k: v.name for k, v in paths.items() if k != "meta"}}
    paths["meta"].write_text(json.dumps(meta, sort_keys=True, indent=1)
                             + "\n")
    return paths


def read_record(directory, record_id: str,
                verify_metrics: bool = True) -> SimulationRecord:
    """Read a record back; optionally recompute and check its metrics."""
    paths = record_paths(directory, record_id)
    if not paths["meta"].exists():
        raise FileNotFoundError(paths["meta"])
    meta = json.loads(paths["meta"].read_text())
    config = ScannerConfig.from_dict(meta["config"])
    severity = SeverityStats(**meta["severity"])
    clean = load_image(paths["clean"])
    corrupted = load_image(paths["corrupted"])
    error_map = load_error_map(paths["error_map"])
    trajectory = read_trajectory_csv(paths["trajectory"], config.tr_ms)
    rows = read_metrics_csv(paths["metrics"])
    if len(rows) != 1 or rows[0]["id"] != record_id:
        raise ValueError(f"metrics CSV does not match record {record_id}")
    stored = rows[0]
    metrics = MetricsReport(rmse=stored["rmse"], nrmse=stored["nrmse"],
                            highfreq_energy_ratio=stored["hf_ratio"],
                            artifact_score=stored["score"])
    if verify_metrics:
        recomputed = compute_metrics(clean, corrupted)
        for name, a, b in (("rmse", metrics.rmse, recomputed.rmse),
                           ("nrmse", metrics.nrmse, recomputed.nrmse),
                           ("hf_ratio", metrics.highfreq_energy_ratio,
                            recomputed.highfreq_energy_ratio),
                           ("score", metrics.artifact_score,
                            recomputed.artifact_score)):
            if abs(a - b) > 1e-9 * max(1.0, abs(b)):
                raise ValueError(
                    f"record {record_id}: stored {name}={a} does not match "
                    f"recomputed {b} (tampered or stale files?)")
    return SimulationRecord(id=meta["id"], config=config,
                            seed=int(meta["seed"]), severity=severity,
                            clean=clean, corrupted=corrupted,
                            error_map=error_map, metrics=metrics,
                            trajectory=trajectory)


# ---------------------------------------------------------------------------
# dataset manifest

@dataclass(frozen=True)
class ManifestEntry:
    id: str
    seed: int
    label: str               # "motion" | "clean"
    scheme: str
    source: str              # input image name
    trial: int
    severity: SeverityStats
    files: dict
    metrics_summary: dict


@dataclass(frozen=True)
class DatasetManifest:
    master_seed: int
    entries: list
    version: str = MANIFEST_VERSION


def write_manifest(manifest: DatasetManifest, path) -> None:
    ids = [e.id for e in manifest.entries]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate record ids in manifest: {dupes}")
    for e in manifest.entries:
        if e.label not in ("motion", "clean"):
            raise ValueError(f"entry {e.id}: label must be motion|clean")
        base = Path(path).parent
        for f in e.files.values():
            if not (base / f).exists():
                raise ValueError(f"entry {e.id}: missing file {f}")
    doc = {"version": manifest.version,
           "master_seed": manifest.master_seed,
           "entries": [{
               "id": e.id, "seed": e.seed, "label": e.label,
               "scheme": e.scheme, "source": e.source, "trial": e.trial,
               "severity": {
                   "rms_displacement_mm": e.severity.rms_displacement_mm,
                   "rms_rotation_deg": e.severity.rms_rotation_deg},
               "files": dict(sorted(e.files.items())),
               "metrics": dict(sorted(e.metrics_summary.items())),
           } for e in manifest.entries]}
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")


def read_manifest(path) -> DatasetManifest:
    doc = json.loads(Path(path).read_text())
    if doc.get("version") != MANIFEST_VERSION:
        raise ValueError(f"{path}: unsupported manifest version "
                         f"{doc.get('version')!r}")
    entries = [ManifestEntry(
        id=e["id"], seed=int(e["seed"]), label=e["label"],
        scheme=e["scheme"], source=e["source"], trial=int(e["trial"]),
        severity=SeverityStats(**e["severity"]),
        files=e["files"], metrics_summary=e["metrics"])
        for e in doc["entries"]]
    return DatasetManifest(master_seed=int(doc["master_seed"]),
                           entries=entries)
