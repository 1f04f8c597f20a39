"""Distortion metrics and the linear motion-detectability probe.

The probe is a deliberately small stand-in for a deep classifier: logistic
regression over eight radial spectral-band energy fractions, trained by
full-batch gradient descent, scored with the rank-statistic AUC.
"""

from dataclasses import dataclass, field

import numpy as np

from .image import ImageSlice
from .recon import centered_fft2, grid_frequencies
from .rng import make_rng

N_BANDS = 8


@dataclass(frozen=True)
class ErrorMap:
    """Absolute-difference image normalized to 8-bit grayscale."""

    values: np.ndarray = field(repr=False)   # uint8, (h, w)

    def __post_init__(self):
        if self.values.dtype != np.uint8 or self.values.ndim != 2:
            raise ValueError("error map must be a 2-D uint8 array")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class MetricsReport:
    rmse: float
    nrmse: float
    highfreq_energy_ratio: float
    artifact_score: float

    def __post_init__(self):
        vals = (self.rmse, self.nrmse, self.highfreq_energy_ratio,
                self.artifact_score)
        if not all(np.isfinite(v) and v >= 0 for v in vals):
            raise ValueError("metrics must be finite and >= 0")


def _check_same_dims(clean: ImageSlice, corrupted: ImageSlice):
    if clean.shape != corrupted.shape:
        raise ValueError(f"image dimensions differ: {clean.shape} vs "
                         f"{corrupted.shape}")


def abs_error_map(clean: ImageSlice, corrupted: ImageSlice) -> ErrorMap:
    """|clean - corrupted| scaled so the max maps to 255, round half-up."""
    _check_same_dims(clean, corrupted)
    diff = np.abs(clean.pixels - corrupted.pixels)
    peak = diff.max()
    if peak == 0.0:
        return ErrorMap(np.zeros(diff.shape, dtype=np.uint8))
    scaled = np.floor(255.0 * diff / peak + 0.5)
    return ErrorMap(scaled.astype(np.uint8))


def rmse(clean: ImageSlice, corrupted: ImageSlice) -> float:
    _check_same_dims(clean, corrupted)
    return float(np.sqrt(np.mean((clean.pixels - corrupted.pixels) ** 2)))


def nrmse(clean: ImageSlice, corrupted: ImageSlice) -> float:
    """RMSE divided by the clean image's RMS."""
    _check_same_dims(clean, corrupted)
    ref = np.sqrt(np.mean(clean.pixels ** 2))
    if ref == 0.0:
        raise ValueError("nrmse undefined for an all-zero clean image")
    return rmse(clean, corrupted) / ref


_radius_cache: dict = {}


def _k_radius(shape) -> np.ndarray:
    if shape not in _radius_cache:
        ky = grid_frequencies(shape[0])
        kx = grid_frequencies(shape[1])
        _radius_cache[shape] = np.hypot(kx[None, :], ky[:, None])
    return _radius_cache[shape]


def highfreq_energy_ratio(image: ImageSlice, cutoff: float = 0.25) -> float:
    """Fraction of spectral energy at radius |k| > cutoff."""
    if not 0.0 < cutoff < 0.5:
        raise ValueError(f"cutoff must be in (0, 0.5), got {cutoff}")
    energy = np.abs(centered_fft2(image.pixels)) ** 2
    total = energy.sum()
    if total == 0.0:
        return 0.0
    return float(energy[_k_radius(image.shape) > cutoff].sum() / total)


def probe_features(image: ImageSlice) -> np.ndarray:
    """Energy fractions in 8 equal radial bands of |k| in [0, 0.5].

    Every grid point lands in exactly one band (corner energy beyond
    |k| = 0.5 folds into the outermost band), so the fractions sum to 1.
    """
    energy = np.abs(centered_fft2(image.pixels)) ** 2
    total = energy.sum()
    if total == 0.0:
        raise ValueError("probe features undefined for an all-zero image")
    band = np.minimum((_k_radius(image.shape) * 2 * N_BANDS).astype(int),
                      N_BANDS - 1)
    feats = np.bincount(band.ravel(), weights=energy.ravel(),
                        minlength=N_BANDS)
    return feats / total


def artifact_score(image: ImageSlice) -> float:
    """Upper-half band energy fraction; a scalar ghosting/streak proxy."""
    return float(probe_features(image)[N_BANDS // 2:].sum())


def compute_metrics(clean: ImageSlice, corrupted: ImageSlice
                    ) -> MetricsReport:
    return MetricsReport(rmse=rmse(clean, corrupted),
                         nrmse=nrmse(clean, corrupted),
                         highfreq_energy_ratio=highfreq_energy_ratio(
                             corrupted),
                         artifact_score=artifact_score(corrupted))


# ---------------------------------------------------------------------------
# detectability probe

@dataclass(frozen=True)
class ProbeModel:
    """Logistic regression weights: 8 band features plus a bias."""

    weights: np.ndarray = field(repr=False)   # (9,)
    epochs: int = 0
    learning_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.weights.shape != (N_BANDS + 1,):
            raise ValueError(f"expected {N_BANDS + 1} weights")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")

    def scores(self, features: np.ndarray) -> np.ndarray:
        """Decision scores (logits) for an (N, 8) feature matrix."""
        features = np.asarray(features, dtype=float)
        return features @ self.weights[:N_BANDS] + self.weights[N_BANDS]


def train_probe(features: np.ndarray, labels: np.ndarray, seed: int = 0,
                epochs: int = 500, learning_rate: float = 5.0) -> ProbeModel:
    """Full-batch gradient-descent logistic regression.

    Deterministic per seed (the seed fixes the small random weight
    initialization). Both classes must be present.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if X.ndim != 2 or X.shape[1] != N_BANDS:
        raise ValueError(f"features must be (N, {N_BANDS})")
    if set(np.unique(y)) != {0.0, 1.0}:
        raise ValueError("labels must contain both classes (0 and 1)")
    Xb = np.column_stack([X, np.ones(X.shape[0])])
    w = 0.01 * make_rng(seed, 0x9B0BE).standard_normal(N_BANDS + 1)
    n = X.shape[0]
    for _ in range(epochs):
        p = 1.0 / (1.0 + np.exp(-(Xb @ w)))
        w -= learning_rate * (Xb.T @ (p - y)) / n
    return ProbeModel(weights=w, epochs=epochs,
                      learning_rate=learning_rate, seed=seed)


def auc_rank(scores: np.ndarray, labels: np.ndarray) -> float:
    """AUC via the Mann-Whitney rank statistic; ties count 0.5."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes in the test set")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.size)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0   # average 1-based rank
        i = j + 1
    rank_sum = ranks[pos].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def evaluate_auc(model: ProbeModel, features: np.ndarray,
                 labels: np.ndarray) -> float:
    return auc_rank(model.scores(features), labels)
