"""Image <-> k-space transforms and gridding reconstruction.

Fixed DFT convention used everywhere in the package:

    S(kx, ky) = sum_{x,y} I(y, x) * exp(-2j*pi*(kx*(x - cx) + ky*(y - cy)))

with image center (cy, cx) = (H//2, W//2), k in cycles/pixel, forward
unnormalized and the inverse carrying the 1/(H*W) factor. On the grid,
frequency index i maps to k = (i - N//2) / N, so fftshift-centered FFTs
realize the same sum exactly.

Non-Cartesian reconstruction is Kaiser-Bessel gridding: density-compensate,
convolve onto an oversampled grid, inverse FFT, crop, divide by the
kernel's image-domain apodization, take the magnitude.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

from .image import ImageSlice
from .sampling import SamplingPlan

_FFT_WORKERS = 2


# ---------------------------------------------------------------------------
# centered FFT pair and the exact oracle

@dataclass(frozen=True)
class KSpaceGrid:
    """Complex k-space samples on the full Cartesian grid, DC at center."""

    values: np.ndarray = field(repr=False)
    pixel_spacing_mm: float = 1.0

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] % 2 or v.shape[1] % 2:
            raise ValueError(f"grid must be 2-D with even dims, got "
                             f"{v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


_chk_cache: dict = {}


def _checkerboard(shape) -> tuple[np.ndarray, float]:
    # (-1)^(y+x) modulation realizing the fftshift pair without array rolls;
    # exact for even dimensions (sign flips only)
    if shape not in _chk_cache:
        h, w = shape
        cy = (-1.0) ** (np.arange(h) % 2)
        cx = (-1.0) ** (np.arange(w) % 2)
        sign = (-1.0) ** ((h // 2 + w // 2) % 2)
        _chk_cache[shape] = (np.outer(cy, cx), sign)
    return _chk_cache[shape]


def centered_fft2(pixels: np.ndarray) -> np.ndarray:
    """fftshift(fft2(ifftshift(x))) via exact checkerboard modulation."""
    chk, sign = _checkerboard(pixels.shape)
    return (sign * chk) * _fft.fft2(chk * pixels, workers=_FFT_WORKERS)


def centered_ifft2(values: np.ndarray) -> np.ndarray:
    chk, sign = _checkerboard(values.shape)
    return (sign * chk) * _fft.ifft2(chk * values, workers=_FFT_WORKERS)


def forward_grid(image: ImageSlice) -> KSpaceGrid:
    """Centered 2-D DFT of the image under the package convention."""
    return KSpaceGrid(centered_fft2(image.pixels),
                      image.pixel_spacing_mm)


def inverse_grid(grid: KSpaceGrid) -> ImageSlice:
    """Inverse of forward_grid; returns the complex magnitude image."""
    return ImageSlice(np.abs(centered_ifft2(grid.values)),
                      grid.pixel_spacing_mm)


def grid_frequencies(n: int) -> np.ndarray:
    """Grid frequencies (i - n//2)/n in cycles/pixel, i = 0..n-1."""
    return (np.arange(n) - n // 2) / n


def direct_dft_oracle(image: ImageSlice, coords: np.ndarray) -> np.ndarray:
    """Exact DFT sum at arbitrary (kx, ky) coordinates.

    O(N^2) per coordinate; intended for images up to 64x64 where it serves
    as the reference for the engine's interpolated path.
    """
    pix = np.asarray(image.pixels, dtype=complex)
    h, w = pix.shape
    y = np.arange(h) - h // 2
    x = np.arange(w) - w // 2
    coords = np.asarray(coords, dtype=float).reshape(-1, 2)
    out = np.empty(coords.shape[0], dtype=complex)
    chunk = 4096
    for s in range(0, coords.shape[0], chunk):
        kx = coords[s:s + chunk, 0]
        ky = coords[s:s + chunk, 1]
        ey = np.exp(-2j * np.pi * ky[:, None] * y[None, :])
        ex = np.exp(-2j * np.pi * kx[:, None] * x[None, :])
        out[s:s + chunk] = np.einsum("my,yx,mx->m", ey, pix, ex)
    return out


# ---------------------------------------------------------------------------
# Kaiser-Bessel kernel machinery (shared with the acquisition engine)

def kb_beta(kernel_width: int, oversampling: float) -> float:
    """Shape parameter for the given width/oversampling point."""
    return np.pi * np.sqrt(
        (kernel_width / oversampling * (oversampling - 0.5)) ** 2 - 0.8)


def kb_kernel(u, kernel_width: int, beta: float) -> np.ndarray:
    """Kaiser-Bessel kernel I0(beta*sqrt(1-(2u/W)^2))/W on |u| <= W/2."""
    u = np.asarray(u, dtype=float)
    z = 1.0 - (2.0 * u / kernel_width) ** 2
    out = np.zeros_like(u)
    m = z >= 0
    out[m] = np.i0(beta * np.sqrt(z[m])) / kernel_width
    return out


def kb_apodization(n: int, grid_size: int, kernel_width: int,
                   beta: float) -> np.ndarray:
    """Image-domain transform of the kernel at pixel offsets from center.

    Analytic sinh form; switches to the sinc branch where the argument
    turns imaginary (never reached for the default parameters).
    """
    x = np.arange(n) - n // 2
    arg = beta ** 2 - (np.pi * kernel_width * x / grid_size) ** 2
    s = np.sqrt(np.abs(arg))
    with np.errstate(invalid="ignore"):
        out = np.where(arg > 0, np.sinh(s) / np.maximum(s, 1e-300),
                       np.sinc(s / np.pi))
    return out


def _kb_offsets(kernel_width: int) -> np.ndarray:
    return np.arange(-(kernel_width // 2 - 1), kernel_width // 2 + 1)


def kb_gather(grid: np.ndarray, coords: np.ndarray, kernel_width: int,
              beta: float) -> np.ndarray:
    """Interpolate a periodic fine k-space grid at (kx, ky) coordinates."""
    G = grid.shape[0]
    offs = _kb_offsets(kernel_width)
    gx = coords[:, 0] * G + G // 2
    gy = coords[:, 1] * G + G // 2
    x0 = np.floor(gx).astype(int)
    y0 = np.floor(gy).astype(int)
    fx = gx - x0
    fy = gy - y0
    out = np.zeros(coords.shape[0], dtype=complex)
    for a in offs:
        cy = kb_kernel(a - fy, kernel_width, beta)
        iy = (y0 + a) % G
        for b in offs:
            cx = kb_kernel(b - fx, kernel_width, beta)
            ix = (x0 + b) % G
            out += grid[iy, ix] * (cy * cx)
    return out


def kb_scatter(coords: np.ndarray, values: np.ndarray, grid_size: int,
               kernel_width: int, beta: float) -> np.ndarray:
    """Adjoint of kb_gather: spread weighted samples onto the fine grid."""
    G = grid_size
    offs = _kb_offsets(kernel_width)
    gx = coords[:, 0] * G + G // 2
    gy = coords[:, 1] * G + G // 2
    x0 = np.floor(gx).astype(int)
    y0 = np.floor(gy).astype(int)
    fx = gx - x0
    fy = gy - y0
    # kernel values per tap, then one bincount over all (sample, tap) pairs
    cxs = np.stack([kb_kernel(b - fx, kernel_width, beta) for b in offs])
    cys = np.stack([kb_kernel(a - fy, kernel_width, beta) for a in offs])
    ixs = np.stack([(x0 + b) % G for b in offs])
    iys = np.stack([(y0 + a) % G for a in offs])
    idx = (iys[:, None, :] * G + ixs[None, :, :]).reshape(-1)
    w = (values[None, None, :] * (cys[:, None, :] * cxs[None, :, :])
         ).reshape(-1)
    flat = np.bincount(idx, weights=w.real, minlength=G * G) \
        + 1j * np.bincount(idx, weights=w.imag, minlength=G * G)
    return flat.reshape(G, G)


# ---------------------------------------------------------------------------
# density compensation and gridding reconstruction

@dataclass(frozen=True)
class GriddingParams:
    """Kaiser-Bessel gridding parameters.

    kernel_beta defaults to the standard width/oversampling formula.
    density_method 'ramp' uses analytic |k| weights with a center
    correction; 'jackson-iterative' runs 20 fixed-point grid/degrid
    iterations.
    """

    oversampling: float = 2.0
    kernel_width: int = 4
    kernel_beta: float | None = None
    density_method: str = "ramp"

    def __post_init__(self):
        if self.oversampling < 1.25:
            raise ValueError("oversampling must be >= 1.25")
        if self.kernel_width < 2:
            raise ValueError("kernel_width must be >= 2")
        if self.density_method not in ("ramp", "jackson-iterative"):
            raise ValueError(f"unknown density method "
                             f"{self.density_method!r}")

    @property
    def beta(self) -> float:
        if self.kernel_beta is not None:
            return self.kernel_beta
        return kb_beta(self.kernel_width, self.oversampling)


def _area_weights(plan: SamplingPlan) -> np.ndarray:
    """Quadrature cell areas (k-space units^2) for one excitation.

    Ramp |k| profile with two center fixes: samples exactly at the origin
    take half the smallest nonzero ramp weight, and for radial plans the
    innermost ring is scaled by 11/12 (midpoint-rule endpoint correction
    at the |k| kink, which otherwise biases the reconstruction DC).
    """
    cfg = plan.config
    coords = plan.sample_coords(0)
    absk = np.hypot(coords[:, 0], coords[:, 1])
    if cfg.scheme == "radial":
        w = np.pi * absk / (cfg.n_radial_spokes * cfg.matrix_fe)
        ring = absk[absk > 0].min()
        w[np.isclose(absk, ring)] *= 11.0 / 12.0
    elif cfg.scheme == "spiral":
        kmax = 0.5 * (cfg.matrix_fe - 1) / cfg.matrix_fe
        spp = plan.samples_per_shot
        w = 2 * np.pi * kmax * absk / (cfg.n_spiral_interleaves * spp)
    else:
        raise ValueError("density weights apply to non-Cartesian plans only")
    if np.any(absk == 0):
        w[absk == 0] = 0.5 * w[absk > 0].min()
    return w


def _jackson_weights(plan: SamplingPlan, params: GriddingParams,
                     iterations: int = 20) -> np.ndarray:
    cfg = plan.config
    coords = plan.sample_coords(0)
    n = max(cfg.matrix_pe, cfg.matrix_fe)
    G = int(round(params.oversampling * n))
    beta = params.beta
    w = np.ones(coords.shape[0])
    for _ in range(iterations):
        conv = kb_gather(kb_scatter(coords, w.astype(complex), G,
                                    params.kernel_width, beta),
                         coords, params.kernel_width, beta).real
        w = w / np.maximum(conv, 1e-30)
    # rescale to the analytic quadrature mass so intensities stay calibrated
    w *= _area_weights(plan).sum() / w.sum()
    return w


def density_weights(plan: SamplingPlan,
                    method: str = "ramp",
                    params: GriddingParams | None = None) -> np.ndarray:
    """Per-sample density compensation, normalized to the sample count.

    Weights are shot-major for one excitation and sum to the number of
    samples; grid_reconstruct rescales them by the plan's quadrature mass.
    """
    if plan.config.scheme == "cartesian":
        raise ValueError("density weights are not applicable to Cartesian "
                         "plans (samples lie on the grid)")
    if params is None:
        params = GriddingParams(density_method=method)
    if method == "ramp":
        w = _area_weights(plan)
    elif method == "jackson-iterative":
        w = _jackson_weights(plan, params)
    else:
        raise ValueError(f"unknown density method {method!r}")
    return w * (w.size / w.sum())


def _cartesian_to_grid(plan: SamplingPlan, values: np.ndarray,
                       pixel_spacing_mm: float) -> KSpaceGrid:
    cfg = plan.config
    pe, fe = cfg.matrix_pe, cfg.matrix_fe
    coords = plan.sample_coords(0)
    iy = np.rint(coords[:, 1] * pe + pe // 2).astype(int)
    ix = np.rint(coords[:, 0] * fe + fe // 2).astype(int)
    grid = np.zeros((pe, fe), dtype=complex)
    grid[iy, ix] = values
    return KSpaceGrid(grid, pixel_spacing_mm)


def grid_reconstruct(acq, params: GriddingParams | None = None) -> ImageSlice:
    """Reconstruct a magnitude image from a k-space acquisition.

    Cartesian acquisitions scatter exactly onto the grid and invert with
    the FFT; non-Cartesian acquisitions run the full gridding chain.
    """
    if params is None:
        params = GriddingParams()
    plan = acq.plan
    cfg = plan.config
    values = acq.values
    coords = plan.sample_coords(0)
    if values.shape[0] != coords.shape[0]:
        raise ValueError(
            f"acquisition has {values.shape[0]} values for "
            f"{coords.shape[0]} plan samples")
    if cfg.scheme == "cartesian":
        return inverse_grid(_cartesian_to_grid(plan, values,
                                               acq.pixel_spacing_mm))

    n = max(cfg.matrix_pe, cfg.matrix_fe)
    G = int(round(params.oversampling * n))
    beta = params.beta
    w = density_weights(plan, params.density_method, params)
    w = w * (_area_weights(plan).sum() / w.size)   # back to absolute areas

    grid = kb_scatter(coords, w * values, G, params.kernel_width, beta)
    img_os = centered_ifft2(grid) * (G * G)
    c = G // 2
    img = img_os[c - cfg.matrix_pe // 2:c + cfg.matrix_pe // 2,
                 c - cfg.matrix_fe // 2:c + cfg.matrix_fe // 2]
    ap_y = kb_apodization(cfg.matrix_pe, G, params.kernel_width, beta)
    ap_x = kb_apodization(cfg.matrix_fe, G, params.kernel_width, beta)
    img = img / np.outer(ap_y, ap_x)
    return ImageSlice(np.abs(img), acq.pixel_spacing_mm)
