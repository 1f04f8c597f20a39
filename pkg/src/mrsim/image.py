"""2-D image slices and resampling."""

import numpy as np


class ImageSlice:
    """Real-valued intensity grid with isotropic pixel spacing.

    Pixels are stored row-major as float64, shape (height, width). Finite
    values are enforced on construction; the stricter dataset invariants
    (even dimensions >= 8, non-negative intensities) are checked by
    `validate_dataset` at the file-format and simulation boundaries so the
    math layer can hold signed test images.
    """

    def __init__(self, pixels: np.ndarray, pixel_spacing_mm: float = 1.0):
        pixels = np.array(pixels, dtype=float)
        if pixels.ndim != 2:
            raise ValueError(f"pixels must be 2-D, got shape {pixels.shape}")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValueError("image must be non-empty")
        if not np.all(np.isfinite(pixels)):
            raise ValueError("pixels must be finite")
        if not pixel_spacing_mm > 0:
            raise ValueError(f"pixel_spacing_mm must be > 0, got "
                             f"{pixel_spacing_mm}")
        pixels.setflags(write=False)
        self.pixels = pixels
        self.pixel_spacing_mm = float(pixel_spacing_mm)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self):
        return self.pixels.shape

    def __eq__(self, other) -> bool:
        return (isinstance(other, ImageSlice)
                and self.pixel_spacing_mm == other.pixel_spacing_mm
                and np.array_equal(self.pixels, other.pixels))

    def validate_dataset(self) -> None:
        """Enforce the dataset-image invariants (raises ValueError)."""
        h, w = self.shape
        if h < 8 or w < 8 or h % 2 or w % 2:
            raise ValueError(
                f"dataset images need even dimensions >= 8, got {h}x{w}")
        if np.any(self.pixels < 0):
            raise ValueError("dataset images must be non-negative")

    def astype_storage(self) -> "ImageSlice":
        """Round pixels to float32 storage precision (kept as float64)."""
        return ImageSlice(self.pixels.astype(np.float32).astype(np.float64),
                          self.pixel_spacing_mm)


def resize_bilinear(image: ImageSlice, width: int, height: int) -> ImageSlice:
    """Bilinear resize with edge clamping.

    Output pixel centers map onto input coordinates with the half-pixel
    convention, so resizing to the same size reproduces the input exactly.
    Pixel spacing is rescaled by the width ratio.
    """
    if width < 8 or height < 8 or width % 2 or height % 2:
        raise ValueError(f"target size must be even and >= 8, got "
                         f"{width}x{height}")
    src = image.pixels
    h_in, w_in = src.shape
    if (width, height) == (w_in, h_in):
        return ImageSlice(src, image.pixel_spacing_mm)

    x = (np.arange(width) + 0.5) * (w_in / width) - 0.5
    y = (np.arange(height) + 0.5) * (h_in / height) - 0.5
    x = np.clip(x, 0.0, w_in - 1.0)
    y = np.clip(y, 0.0, h_in - 1.0)
    x0 = np.minimum(np.floor(x).astype(int), w_in - 2) if w_in > 1 else np.zeros(width, int)
    y0 = np.minimum(np.floor(y).astype(int), h_in - 2) if h_in > 1 else np.zeros(height, int)
    fx = x - x0
    fy = y - y0

    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x0 + 1] * fx
    bot = src[y0 + 1][:, x0] * (1 - fx) + src[y0 + 1][:, x0 + 1] * fx
    out = top * (1 - fy)[:, None] + bot * fy[:, None]
    return ImageSlice(out, image.pixel_spacing_mm * w_in / width)
