"""Thin array-interchange bindings over the mrsim simulator.

Everything crosses the boundary as plain contiguous numpy arrays and
key/value mappings, copy-in/copy-out, so data-pipeline code never holds
views into simulator state. Configs are validated by the simulator's own
validator (one validation code path); simulator exceptions propagate with
their messages intact.
"""

import numpy as np

import mrsim
from mrsim.engine import corrupt_slice as _corrupt_slice
from mrsim.image import ImageSlice
from mrsim.metrics import probe_features as _probe_features
from mrsim.motion import SeverityStats, generate_random_trajectory
from mrsim.sampling import ScannerConfig, build_plan

__version__ = mrsim.__version__

__all__ = ["corrupt_slice", "make_plan", "make_trajectory",
           "probe_features", "version"]


def version() -> str:
    """Core simulator version this binding wraps."""
    return mrsim.__version__


def _as_image(array, pixel_spacing_mm: float) -> ImageSlice:
    array = np.asarray(array)
    if array.ndim != 2:
        raise ValueError(f"image array must be 2-D, got shape "
                         f"{array.shape}")
    return ImageSlice(np.ascontiguousarray(array, dtype=float),
                      pixel_spacing_mm)


def _as_config(config) -> ScannerConfig:
    if isinstance(config, ScannerConfig):
        return config
    return ScannerConfig(**dict(config))


def make_trajectory(n_shots: int, tr_ms: float, disp_mm: float,
                    rot_deg: float, seed: int,
                    in_plane_only: bool = False) -> np.ndarray:
    """Random trajectory as an (n_shots, 8) array.

    Columns match the trajectory CSV: shot index, time in seconds, then
    tx_mm, ty_mm, tz_mm, rx_deg, ry_deg, rz_deg.
    """
    traj = generate_random_trajectory(n_shots, tr_ms,
                                      SeverityStats(disp_mm, rot_deg),
                                      seed, in_plane_only=in_plane_only)
    out = np.empty((n_shots, 8))
    out[:, 0] = np.arange(n_shots)
    out[:, 1] = traj.times_s
    out[:, 2:] = traj.poses
    return out


def make_plan(config) -> np.ndarray:
    """Sampling plan as an (n_samples, 4) array.

    Columns match the plan CSV: shot index, time index in TR units, kx and
    ky in cycles/pixel. config is a mapping of ScannerConfig fields.
    """
    plan = build_plan(_as_config(config))
    rows = []
    for shot in plan.shots:
        m = shot.samples.shape[0]
        block = np.empty((m, 4))
        block[:, 0] = shot.index
        block[:, 1] = shot.time_index_tr
        block[:, 2:] = shot.samples
        rows.append(block)
    return np.vstack(rows)


def probe_features(image, pixel_spacing_mm: float = 1.0) -> np.ndarray:
    """Eight radial spectral-band energy fractions of a 2-D image array."""
    return np.array(_probe_features(_as_image(image, pixel_spacing_mm)))


def corrupt_slice(image, config, severity, seed: int,
                  pixel_spacing_mm: float = 1.0) -> dict:
    """Run the full corruption pipeline on a 2-D array.

    severity is a (rms_displacement_mm, rms_rotation_deg) pair. Returns a
    mapping with fresh arrays: 'corrupted' and 'clean' reconstructions,
    'error_map' (uint8), 'trajectory' ((n, 8), CSV column order) and a
    'metrics' mapping. Numerically identical to the core path (the CLI
    writes these same arrays to disk).
    """
    cfg = _as_config(config)
    img = _as_image(image, pixel_spacing_mm)
    disp, rot = severity
    record = _corrupt_slice(img, cfg, SeverityStats(disp, rot), seed)
    traj = np.empty((len(record.trajectory), 8))
    traj[:, 0] = np.arange(len(record.trajectory))
    traj[:, 1] = record.trajectory.times_s
    traj[:, 2:] = record.trajectory.poses
    return {
        "corrupted": np.array(record.corrupted.pixels),
        "clean": np.array(record.clean.pixels),
        "error_map": np.array(record.error_map.values),
        "trajectory": traj,
        "metrics": {
            "rmse": record.metrics.rmse,
            "nrmse": record.metrics.nrmse,
            "hf_ratio": record.metrics.highfreq_energy_ratio,
            "score": record.metrics.artifact_score,
        },
    }
