"""Synthetic test and demo phantoms.

All generators return ImageSlice objects with the image center at pixel
(n//2, n//2), matching the transform and DFT conventions used elsewhere.
"""

import numpy as np

from .image import ImageSlice
from .rng import make_rng


def _center_grids(n: int):
    c = n // 2
    y, x = np.meshgrid(np.arange(n) - c, np.arange(n) - c, indexing="ij")
    return x, y


def constant_phantom(n: int, value: float = 1.0,
                     pixel_spacing_mm: float = 1.0) -> ImageSlice:
    return ImageSlice(np.full((n, n), float(value)), pixel_spacing_mm)


def gaussian_phantom(n: int, sigma_px: float | None = None,
                     amplitude: float = 1.0,
                     pixel_spacing_mm: float = 1.0) -> ImageSlice:
    """Centered isotropic Gaussian blob; default width n/32 pixels."""
    if sigma_px is None:
        sigma_px = n / 32.0
    x, y = _center_grids(n)
    pix = amplitude * np.exp(-(x ** 2 + y ** 2) / (2.0 * sigma_px ** 2))
    return ImageSlice(pix, pixel_spacing_mm)


def disk_phantom(n: int, radius_px: float | None = None,
                 pixel_spacing_mm: float = 1.0) -> ImageSlice:
    if radius_px is None:
        radius_px = 3 * n / 8
    x, y = _center_grids(n)
    return ImageSlice((np.hypot(x, y) <= radius_px).astype(float),
                      pixel_spacing_mm)


def cross_phantom(n: int, arm_halflength: int | None = None,
                  arm_halfwidth: int | None = None,
                  pixel_spacing_mm: float = 1.0) -> ImageSlice:
    """Plus-shaped phantom symmetric under 90-degree rotation about center.

    The support keeps a margin from the image border so that an exact
    90-degree rotation about pixel (n//2, n//2) maps it onto itself.
    """
    if arm_halflength is None:
        arm_halflength = n // 2 - n // 8
    if arm_halfwidth is None:
        arm_halfwidth = max(1, n // 16)
    x, y = _center_grids(n)
    ax, ay = np.abs(x), np.abs(y)
    arm_x = (ax <= arm_halflength) & (ay <= arm_halfwidth)
    arm_y = (ay <= arm_halflength) & (ax <= arm_halfwidth)
    return ImageSlice((arm_x | arm_y).astype(float), pixel_spacing_mm)


def brain_phantom(n: int, seed: int = 0,
                  pixel_spacing_mm: float = 1.0) -> ImageSlice:
    """Head-like phantom: elliptical shell with random internal structure.

    Deterministic per seed; intensities in [0, 1] with an empty margin so
    small rigid motions stay inside the field of view.
    """
    rng = make_rng(seed, 0xB7A1)
    x, y = _center_grids(n)
    a = n * rng.uniform(0.33, 0.40)
    b = n * rng.uniform(0.40, 0.46)
    skull = ((x / a) ** 2 + (y / b) ** 2 <= 1.0).astype(float)
    inner = ((x / (0.88 * a)) ** 2 + (y / (0.90 * b)) ** 2 <= 1.0)
    pix = skull - 0.35 * inner

    n_blobs = int(rng.integers(4, 9))
    for _ in range(n_blobs):
        cx = rng.uniform(-0.45, 0.45) * a
        cy = rng.uniform(-0.45, 0.45) * b
        sx = n * rng.uniform(0.03, 0.10)
        amp = rng.uniform(0.15, 0.45)
        pix += amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * sx ** 2)) * inner
    # ventricle-like dark wedge
    vx = n * rng.uniform(0.04, 0.08)
    pix -= 0.3 * np.exp(-(x ** 2 + (y - 0.1 * b) ** 2) / (2 * vx ** 2)) * inner

    pix = np.clip(pix, 0.0, None)
    pix /= pix.max()
    return ImageSlice(pix, pixel_spacing_mm)
