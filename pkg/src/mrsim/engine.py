"""Motion-corrupted k-space acquisition.

Each shot of the sampling plan is simulated by rigidly transforming the
subject image with the pose active at the shot's timestamp and sampling
the transformed image's spectrum at the shot's k-space coordinates:
exactly on the FFT grid for Cartesian shots, and through a deapodized
2x zero-padded FFT with 4-point Kaiser-Bessel interpolation for off-grid
coordinates (a direct DFT path is available and is the default for small
images). Poses repeat often under piecewise-constant motion, so transform
and spectrum results are cached per pose.
"""

from dataclasses import dataclass, field

import numpy as np

from .image import ImageSlice
from .io import SimulationRecord, make_record_id
from .metrics import abs_error_map, compute_metrics
from .motion import MotionTrajectory, RigidPose, SeverityStats, \
    generate_random_trajectory
from .recon import GriddingParams, centered_fft2, direct_dft_oracle, \
    grid_reconstruct, kb_apodization, kb_beta, kb_gather
from .rng import make_rng
from .sampling import SamplingPlan, ScannerConfig, build_plan

#: largest image edge for which 'auto' picks the exact direct-DFT path
DIRECT_DFT_MAX_SIZE = 64


class UnsupportedMotionError(ValueError):
    """Raised for through-plane motion without the explicit opt-in."""


@dataclass(frozen=True)
class KSpaceAcquisition:
    """Complex samples aligned to a plan, shot-major, one excitation.

    Acquisitions are always stored after complex NEX averaging (trivial
    for nex=1), so the value count equals the plan's per-excitation
    sample count.
    """

    plan: SamplingPlan
    values: np.ndarray = field(repr=False)
    nex_averaged: bool = True
    pixel_spacing_mm: float = 1.0

    def __post_init__(self):
        expected = self.plan.sample_coords(0).shape[0]
        if self.values.shape != (expected,):
            raise ValueError(
                f"expected {expected} values, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("acquisition values must be finite")


_IDENTITY_POSE = RigidPose()
_mesh_cache: dict = {}


def _center_mesh(shape):
    if shape not in _mesh_cache:
        h, w = shape
        yy, xx = np.meshgrid(np.arange(h) - h // 2, np.arange(w) - w // 2,
                             indexing="ij")
        _mesh_cache[shape] = (xx.ravel().astype(float),
                              yy.ravel().astype(float))
    return _mesh_cache[shape]


def apply_rigid(image: ImageSlice, pose: RigidPose,
                ignore_through_plane: bool = False) -> ImageSlice:
    """Resample the image under in-plane rigid motion.

    The forward motion rotates by rz_deg about the image center (pixel
    (H//2, W//2)) and then translates by (tx, ty) millimeters; the output
    is the input sampled under the inverse map with bilinear interpolation
    and zero fill outside the field of view. Out-of-plane components raise
    UnsupportedMotionError unless explicitly ignored.
    """
    if not pose.in_plane and not ignore_through_plane:
        raise UnsupportedMotionError(
            "pose has through-plane components (tz/rx/ry); this simulator "
            "models in-plane motion only - pass ignore_through_plane=True "
            "to drop them")
    if pose.tx_mm == 0.0 and pose.ty_mm == 0.0 and pose.rz_deg == 0.0:
        return ImageSlice(image.pixels, image.pixel_spacing_mm)

    h, w = image.shape
    tx = pose.tx_mm / image.pixel_spacing_mm
    ty = pose.ty_mm / image.pixel_spacing_mm
    theta = np.deg2rad(pose.rz_deg)
    ct, st = np.cos(theta), np.sin(theta)

    xx, yy = _center_mesh(image.shape)
    # inverse map: undo translation, then rotate back about the center
    sx = xx - tx
    sy = yy - ty
    ux = ct * sx + st * sy + w // 2
    uy = -st * sx + ct * sy + h // 2

    x0 = np.floor(ux).astype(int)
    y0 = np.floor(uy).astype(int)
    fx = ux - x0
    fy = uy - y0
    # zero border absorbs out-of-FOV reads: clipping any outside index
    # lands on a zero pixel, so no masking is needed
    padded = np.zeros((h + 2, w + 2))
    padded[1:-1, 1:-1] = image.pixels
    flat = padded.ravel()
    xi0 = np.clip(x0 + 1, 0, w + 1)
    xi1 = np.clip(x0 + 2, 0, w + 1)
    yi0 = np.clip(y0 + 1, 0, h + 1) * (w + 2)
    yi1 = np.clip(y0 + 2, 0, h + 1) * (w + 2)
    gx0, gx1 = 1.0 - fx, fx
    gy0, gy1 = 1.0 - fy, fy
    out = (gy0 * (gx0 * flat[yi0 + xi0] + gx1 * flat[yi0 + xi1])
           + gy1 * (gx0 * flat[yi1 + xi0] + gx1 * flat[yi1 + xi1]))
    return ImageSlice(out.reshape(h, w), image.pixel_spacing_mm)


_apod_cache: dict = {}


def _inv_apod2d(h: int, w: int, oversampling: float, kernel_width: int):
    key = (h, w, oversampling, kernel_width)
    if key not in _apod_cache:
        G = int(round(oversampling * max(h, w)))
        beta = kb_beta(kernel_width, oversampling)
        ap = np.outer(kb_apodization(h, G, kernel_width, beta),
                      kb_apodization(w, G, kernel_width, beta))
        _apod_cache[key] = 1.0 / ap
    return _apod_cache[key]


def _fine_spectrum(pixels: np.ndarray, oversampling: float,
                   kernel_width: int) -> np.ndarray:
    """Deapodized zero-padded centered FFT for off-grid interpolation."""
    h, w = pixels.shape
    G = int(round(oversampling * max(h, w)))
    pad = np.zeros((G, G), dtype=complex)
    pad[G // 2 - h // 2:G // 2 + h - h // 2,
        G // 2 - w // 2:G // 2 + w - w // 2] = \
        pixels * _inv_apod2d(h, w, oversampling, kernel_width)
    return centered_fft2(pad)


def simulate_acquisition(image: ImageSlice, traj: MotionTrajectory,
                         plan: SamplingPlan, offgrid: str = "auto",
                         oversampling: float = 2.0, kernel_width: int = 4,
                         ignore_through_plane: bool = False
                         ) -> KSpaceAcquisition:
    """Sample the spectrum of the per-shot transformed image.

    The pose for each shot is the trajectory entry at the shot's
    time_index, so a trajectory longer than the plan is valid (the scan
    simply ends before the motion record does). For nex > 1 the
    per-excitation samples are complex-averaged.

    offgrid: 'direct' evaluates off-grid coordinates with the exact DFT
    sum, 'interp' uses the deapodized oversampled-FFT interpolation, and
    'auto' picks 'direct' for images up to 64x64.
    """
    cfg = plan.config
    if len(traj) < plan.n_shots_total:
        raise ValueError(
            f"trajectory has {len(traj)} shots but the plan needs "
            f"{plan.n_shots_total}")
    if image.shape != (cfg.matrix_pe, cfg.matrix_fe):
        raise ValueError(
            f"image shape {image.shape} does not match plan matrix "
            f"({cfg.matrix_pe}, {cfg.matrix_fe})")
    if offgrid not in ("auto", "direct", "interp"):
        raise ValueError(f"unknown offgrid mode {offgrid!r}")
    if cfg.scheme != "cartesian":
        if cfg.matrix_pe != cfg.matrix_fe:
            raise ValueError("non-Cartesian simulation requires a square "
                             "matrix")
        if offgrid == "auto":
            offgrid = "direct" if max(image.shape) <= DIRECT_DFT_MAX_SIZE \
                else "interp"

    spe = plan.shots_per_excitation
    per_exc = np.zeros((cfg.nex, spe * plan.samples_per_shot),
                       dtype=complex)
    # cache transform/FFT work only for poses that recur (piecewise-held
    # or zero motion); random trajectories would otherwise pin one full
    # spectrum per shot in memory for nothing
    counts: dict = {}
    for shot in plan.shots:
        key = traj.poses[shot.time_index_tr].tobytes()
        counts[key] = counts.get(key, 0) + 1
    cache: dict = {}

    def pose_work(t: int, compute):
        key = traj.poses[t].tobytes()
        if counts[key] == 1:
            return compute(t)
        if key not in cache:
            cache[key] = compute(t)
        return cache[key]

    def transformed(t: int) -> ImageSlice:
        pose = RigidPose(*traj.poses[t])
        return apply_rigid(image, pose, ignore_through_plane)

    if cfg.scheme == "cartesian":
        fe = cfg.matrix_fe

        def shot_fft(t):
            return centered_fft2(transformed(t).pixels)

        for shot in plan.shots:
            grid = pose_work(shot.time_index_tr, shot_fft)
            row = shot.index % cfg.matrix_pe
            e = shot.index // cfg.matrix_pe
            j = (shot.index % spe) * fe
            per_exc[e, j:j + fe] = grid[row, :]
    elif offgrid == "direct":
        for shot in plan.shots:
            timg = pose_work(shot.time_index_tr, transformed)
            e, s = divmod(shot.index, spe)
            m = plan.samples_per_shot
            per_exc[e, s * m:(s + 1) * m] = direct_dft_oracle(
                timg, shot.samples)
    else:
        beta = kb_beta(kernel_width, oversampling)

        def shot_spectrum(t):
            return _fine_spectrum(transformed(t).pixels, oversampling,
                                  kernel_width)

        for shot in plan.shots:
            fine = pose_work(shot.time_index_tr, shot_spectrum)
            e, s = divmod(shot.index, spe)
            m = plan.samples_per_shot
            per_exc[e, s * m:(s + 1) * m] = kb_gather(
                fine, shot.samples, kernel_width, beta)

    values = per_exc.mean(axis=0)
    return KSpaceAcquisition(plan=plan, values=values, nex_averaged=True,
                             pixel_spacing_mm=image.pixel_spacing_mm)


def reconstruct(acq: KSpaceAcquisition,
                gridding: GriddingParams | None = None) -> ImageSlice:
    """Magnitude reconstruction of an acquisition (routes per scheme)."""
    return grid_reconstruct(acq, gridding)


def corrupt_slice(image: ImageSlice, config: ScannerConfig,
                  severity: SeverityStats, seed: int,
                  trajectory: MotionTrajectory | None = None,
                  gridding: GriddingParams | None = None,
                  offgrid: str = "auto",
                  clean_recon: ImageSlice | None = None,
                  record_id: str | None = None) -> SimulationRecord:
    """Run the full pipeline for one slice and return its record.

    Builds the plan, generates an in-plane random trajectory at the target
    severity (unless one is passed in, e.g. a shared trajectory for paired
    scheme comparisons), simulates the acquisition, reconstructs corrupted
    and clean images, and computes metrics on float32-storage-rounded
    pixels so written records round-trip bit-exactly. Deterministic per
    (inputs, seed).

    clean_recon short-circuits the zero-motion reference reconstruction;
    it must equal the reconstruction this function would compute (batch
    generation uses this to avoid recomputing an identical reference per
    trial).
    """
    config.validate()
    image.validate_dataset()
    if image.shape != (config.matrix_pe, config.matrix_fe):
        raise ValueError(
            f"image shape {image.shape} does not match config matrix "
            f"({config.matrix_pe}, {config.matrix_fe}); resize first")
    plan = build_plan(config)
    if trajectory is None:
        trajectory = generate_random_trajectory(
            plan.n_shots_total, config.tr_ms, severity, seed,
            in_plane_only=True)
    acq = simulate_acquisition(image, trajectory, plan, offgrid=offgrid)
    if config.noise_std > 0:
        rng = make_rng(seed, 0x5E01)
        noise = config.noise_std * (rng.standard_normal(acq.values.shape)
                                    + 1j * rng.standard_normal(
                                        acq.values.shape))
        acq = KSpaceAcquisition(plan=acq.plan, values=acq.values + noise,
                                nex_averaged=True,
                                pixel_spacing_mm=acq.pixel_spacing_mm)
    corrupted = reconstruct(acq, gridding).astype_storage()
    if clean_recon is None:
        identity = MotionTrajectory.identity(plan.n_shots_total,
                                             config.tr_ms)
        clean_acq = simulate_acquisition(image, identity, plan,
                                         offgrid=offgrid)
        clean_recon = reconstruct(clean_acq, gridding).astype_storage()
    metrics = compute_metrics(clean_recon, corrupted)
    err_map = abs_error_map(clean_recon, corrupted)
    if record_id is None:
        record_id = make_record_id(config.scheme, seed)
    return SimulationRecord(id=record_id, config=config, seed=seed,
                            severity=severity, clean=clean_recon,
                            corrupted=corrupted, error_map=err_map,
                            metrics=metrics, trajectory=trajectory)
