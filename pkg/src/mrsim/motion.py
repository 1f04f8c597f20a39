"""Rigid-body motion trajectories sampled at one pose per TR shot.

A trajectory stores absolute 6-DoF poses (translations in mm, rotations in
degrees about the image-center axes) relative to the t=0 reference frame,
one pose per shot, held piecewise constant over the shot. Random
trajectories are built as smoothed per-axis random walks and rescaled so
their RMS severity hits a requested target exactly.
"""

from dataclasses import dataclass

import numpy as np

from .rng import make_rng

#: column order of the pose array
POSE_AXES = ("tx_mm", "ty_mm", "tz_mm", "rx_deg", "ry_deg", "rz_deg")


@dataclass(frozen=True)
class RigidPose:
    """Absolute rigid pose: translation in mm, rotation in degrees."""

    tx_mm: float = 0.0
    ty_mm: float = 0.0
    tz_mm: float = 0.0
    rx_deg: float = 0.0
    ry_deg: float = 0.0
    rz_deg: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite(v) for v in self.as_array()):
            raise ValueError("pose components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.tx_mm, self.ty_mm, self.tz_mm,
                         self.rx_deg, self.ry_deg, self.rz_deg])

    @property
    def is_identity(self) -> bool:
        return not np.any(self.as_array())

    @property
    def in_plane(self) -> bool:
        """True when tz, rx and ry are all zero."""
        return self.tz_mm == 0.0 and self.rx_deg == 0.0 and self.ry_deg == 0.0


@dataclass(frozen=True)
class SeverityStats:
    """RMS translation norm (mm) and rotation norm (deg) over shots."""

    rms_displacement_mm: float
    rms_rotation_deg: float

    def __post_init__(self):
        if self.rms_displacement_mm < 0 or self.rms_rotation_deg < 0:
            raise ValueError("severity values must be >= 0")


class MotionTrajectory:
    """Per-shot absolute pose sequence with piecewise-constant semantics.

    Parameters
    ----------
    poses : (n_shots, 6) array
        Columns ordered as `POSE_AXES`.
    tr_ms : float
        Shot duration in milliseconds.
    """

    def __init__(self, poses: np.ndarray, tr_ms: float):
        poses = np.array(poses, dtype=float)
        if poses.ndim != 2 or poses.shape[1] != 6:
            raise ValueError(f"poses must be (n, 6), got {poses.shape}")
        if poses.shape[0] < 1:
            raise ValueError("trajectory must contain at least one shot")
        if not np.all(np.isfinite(poses)):
            raise ValueError("trajectory poses must be finite")
        if tr_ms <= 0:
            raise ValueError("tr_ms must be > 0")
        poses.setflags(write=False)
        self.poses = poses
        self.tr_ms = float(tr_ms)

    def __len__(self) -> int:
        return self.poses.shape[0]

    def __eq__(self, other) -> bool:
        return (isinstance(other, MotionTrajectory)
                and self.tr_ms == other.tr_ms
                and np.array_equal(self.poses, other.poses))

    @property
    def times_s(self) -> np.ndarray:
        """Acquisition timestamp of each shot in seconds."""
        return np.arange(len(self)) * self.tr_ms / 1000.0

    @classmethod
    def identity(cls, n_shots: int, tr_ms: float) -> "MotionTrajectory":
        return cls(np.zeros((n_shots, 6)), tr_ms)


def pose_at_shot(traj: MotionTrajectory, shot_index: int) -> RigidPose:
    """Pose held during shot `shot_index` (piecewise-constant lookup)."""
    if not 0 <= shot_index < len(traj):
        raise IndexError(
            f"shot index {shot_index} out of range for trajectory of "
            f"length {len(traj)}")
    return RigidPose(*traj.poses[shot_index])


def severity_rms(traj: MotionTrajectory) -> SeverityStats:
    """RMS of the Euclidean translation / rotation norms over all shots."""
    disp = np.sqrt(np.mean(np.sum(traj.poses[:, :3] ** 2, axis=1)))
    rot = np.sqrt(np.mean(np.sum(traj.poses[:, 3:] ** 2, axis=1)))
    return SeverityStats(float(disp), float(rot))


def rescale_to_target(traj: MotionTrajectory,
                      target: SeverityStats) -> MotionTrajectory:
    """Scale translations and rotations so severity_rms equals `target`.

    A zero target zeroes the corresponding axis group; a nonzero target on
    an identically-zero group cannot be reached and raises ValueError.
    """
    current = severity_rms(traj)
    poses = np.array(traj.poses)
    for cols, cur, tgt, name in (
            (slice(0, 3), current.rms_displacement_mm,
             target.rms_displacement_mm, "displacement"),
            (slice(3, 6), current.rms_rotation_deg,
             target.rms_rotation_deg, "rotation")):
        if tgt == 0.0:
            poses[:, cols] = 0.0
        elif cur == 0.0:
            raise ValueError(
                f"cannot rescale identically-zero {name} to {tgt}")
        else:
            poses[:, cols] *= tgt / cur
    return MotionTrajectory(poses, traj.tr_ms)


def _savgol_coefficients(window: int, order: int) -> np.ndarray:
    # center row of the least-squares smoothing matrix
    half = window // 2
    t = np.arange(-half, half + 1, dtype=float)
    vand = np.vander(t, order + 1, increasing=True)
    # solve for the polynomial fit, keep its value at t=0
    proj = np.linalg.lstsq(vand, np.eye(window), rcond=None)[0]
    return proj[0]


def smooth_savitzky_golay(values, window: int, order: int) -> np.ndarray:
    """Savitzky-Golay smoothing with mirror padding at the edges.

    Each output point is the center value of the least-squares polynomial
    fit of the given order over the window. Mirror padding reflects the
    sequence about its end points (end points not repeated), which bounds
    the window at 2*len(values) - 1.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if window % 2 == 0:
        raise ValueError(f"window must be odd, got {window}")
    if not 1 <= order < window:
        raise ValueError(f"need 1 <= order < window, got order={order}, "
                         f"window={window}")
    if window > 2 * n - 1:
        raise ValueError(f"window {window} too long for {n} samples "
                         f"(mirror padding allows at most {2 * n - 1})")
    half = window // 2
    padded = np.pad(values, half, mode="reflect") if half else values
    coeff = _savgol_coefficients(window, order)
    # correlation: output[i] = sum_j coeff[j] * padded[i + j]
    return np.convolve(padded, coeff[::-1], mode="valid")


def generate_random_trajectory(n_shots: int, tr_ms: float,
                               target: SeverityStats, seed: int,
                               window: int = 11, order: int = 3,
                               in_plane_only: bool = False
                               ) -> MotionTrajectory:
    """Random smoothed trajectory hitting `target` severity exactly.

    Each axis is an independent Gaussian random walk, smoothed with the
    Savitzky-Golay filter (window shrunk for short trajectories), then the
    whole trajectory is rescaled so severity_rms equals the target to
    floating-point accuracy. Deterministic for fixed inputs and seed.

    With `in_plane_only`, the through-plane axes (tz, rx, ry) are zeroed
    before rescaling so the full severity budget lands in the plane.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    rng = make_rng(seed)
    poses = np.empty((n_shots, 6))
    win = min(window, 2 * n_shots - 1)
    if win % 2 == 0:
        win -= 1
    for axis in range(6):
        walk = np.cumsum(rng.standard_normal(n_shots))
        if win >= 3:
            walk = smooth_savitzky_golay(walk, win, min(order, win - 1))
        poses[:, axis] = walk
    if in_plane_only:
        poses[:, 2] = 0.0   # tz
        poses[:, 3] = 0.0   # rx
        poses[:, 4] = 0.0   # ry
    traj = MotionTrajectory(poses, tr_ms)
    return rescale_to_target(traj, target)
