"""Retrospective MRI motion-artifact simulator.

Corrupts k-space acquisition under rigid-body motion for Cartesian, radial
and uniform-spiral sampling, reconstructs images, quantifies distortion and
generates labeled clean/corrupted datasets.
"""

__version__ = "0.1.0"

from .image import ImageSlice, resize_bilinear
from .motion import (MotionTrajectory, RigidPose, SeverityStats,
                     generate_random_trajectory, pose_at_shot,
                     rescale_to_target, severity_rms,
                     smooth_savitzky_golay)
from .sampling import (SCHEMES, SamplingPlan, ScannerConfig, Shot,
                       build_plan, cartesian_plan, radial_plan, scan_time,
                       spiral_plan, validate_plan)
from .recon import (GriddingParams, KSpaceGrid, density_weights,
                    direct_dft_oracle, forward_grid, grid_reconstruct,
                    inverse_grid)
from .engine import (KSpaceAcquisition, UnsupportedMotionError, apply_rigid,
                     corrupt_slice, reconstruct, simulate_acquisition)
from .metrics import (ErrorMap, MetricsReport, ProbeModel, abs_error_map,
                      auc_rank, compute_metrics, evaluate_auc,
                      highfreq_energy_ratio, nrmse, probe_features, rmse,
                      train_probe)
from .io import (DatasetManifest, ManifestEntry, SimulationRecord,
                 load_image, read_manifest, read_record,
                 read_trajectory_csv, save_image, write_manifest,
                 write_record, write_trajectory_csv)
from .dataset import (ComparisonReport, SeverityPolicy, compare_manifests,
                      generate_batch)
from . import phantoms

__all__ = [name for name in dir() if not name.startswith("_")]
