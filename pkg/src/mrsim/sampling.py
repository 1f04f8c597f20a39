"""Timestamped k-space sampling plans for Cartesian, radial and spiral scans.

All coordinates are normalized to cycles/pixel with each component in
[-0.5, 0.5). One shot (a Cartesian phase-encode line, a radial spoke or a
spiral interleave) is acquired per TR; shot timestamps count whole TR
intervals from the start of the scan and continue across excitations.

Defaults give all three schemes the same matrix_pe x matrix_fe sample
budget per excitation. Note that the default spiral trades shot count for
readout length (matrix_pe/8 interleaves), so its scan is shorter than the
Cartesian/radial scans at the same TR.
"""

from dataclasses import dataclass, field, asdict

import numpy as np

SCHEMES = ("cartesian", "radial", "spiral")

#: golden-angle increment for the optional radial ordering, radians
GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True)
class ScannerConfig:
    """Scan parameters; unset scheme-specific counts take their defaults.

    radial_spokes defaults to matrix_pe; spiral_interleaves to matrix_pe/8
    and spiral_turns to matrix_pe/(2*interleaves), preserving the sample
    budget. noise_std adds complex Gaussian k-space noise (defaults off).
    """

    tr_ms: float = 400.0
    nex: int = 1
    matrix_pe: int = 256
    matrix_fe: int = 256
    scheme: str = "cartesian"
    radial_spokes: int | None = None
    spiral_interleaves: int | None = None
    spiral_turns: int | None = None
    fov_mm: float = 256.0
    radial_ordering: str = "uniform"
    noise_std: float = 0.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.tr_ms <= 0:
            raise ValueError(f"tr_ms must be > 0, got {self.tr_ms}")
        if self.nex < 1:
            raise ValueError(f"nex must be >= 1, got {self.nex}")
        for name in ("matrix_pe", "matrix_fe"):
            v = getattr(self, name)
            if v < 8 or v % 2:
                raise ValueError(f"{name} must be even and >= 8, got {v}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got "
                             f"{self.scheme!r}")
        if self.fov_mm <= 0:
            raise ValueError(f"fov_mm must be > 0, got {self.fov_mm}")
        if self.radial_ordering not in ("uniform", "golden"):
            raise ValueError(f"radial_ordering must be 'uniform' or "
                             f"'golden', got {self.radial_ordering!r}")
        if self.noise_std < 0:
            raise ValueError("noise_std must be >= 0")
        if self.scheme == "radial" and self.n_radial_spokes < 1:
            raise ValueError("radial_spokes must be >= 1")
        if self.scheme == "spiral":
            m = self.n_spiral_interleaves
            if m < 1 or self.n_spiral_turns < 1:
                raise ValueError("spiral interleaves and turns must be >= 1")
            if (self.matrix_pe * self.matrix_fe) % m:
                raise ValueError(
                    f"spiral_interleaves={m} does not divide the sample "
                    f"budget {self.matrix_pe}*{self.matrix_fe}")

    @property
    def n_radial_spokes(self) -> int:
        return self.radial_spokes if self.radial_spokes is not None \
            else self.matrix_pe

    @property
    def n_spiral_interleaves(self) -> int:
        return self.spiral_interleaves if self.spiral_interleaves is not None \
            else max(1, self.matrix_pe // 8)

    @property
    def n_spiral_turns(self) -> int:
        if self.spiral_turns is not None:
            return self.spiral_turns
        return max(1, self.matrix_pe // (2 * self.n_spiral_interleaves))

    @property
    def shots_per_excitation(self) -> int:
        if self.scheme == "cartesian":
            return self.matrix_pe
        if self.scheme == "radial":
            return self.n_radial_spokes
        return self.n_spiral_interleaves

    @property
    def n_shots_total(self) -> int:
        return self.shots_per_excitation * self.nex

    @property
    def pixel_spacing_mm(self) -> float:
        return self.fov_mm / self.matrix_fe

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ScannerConfig":
        return cls(**d)


@dataclass(frozen=True)
class Shot:
    """One TR's worth of samples at a given acquisition timestamp."""

    index: int
    time_index_tr: int
    samples: np.ndarray = field(repr=False)   # (m, 2) of (kx, ky)

    def __post_init__(self):
        if self.time_index_tr < 0:
            raise ValueError("time_index_tr must be >= 0")
        if self.samples.ndim != 2 or self.samples.shape[1] != 2 \
                or self.samples.shape[0] < 1:
            raise ValueError("samples must be a non-empty (m, 2) array")
        self.samples.setflags(write=False)


class SamplingPlan:
    """Ordered, timestamped shots covering the k-space sampling budget."""

    def __init__(self, config: ScannerConfig, shots: list[Shot]):
        self.config = config
        self.shots = list(shots)

    @property
    def shots_per_excitation(self) -> int:
        return len(self.shots) // self.config.nex

    @property
    def n_shots_total(self) -> int:
        return len(self.shots)

    @property
    def samples_per_shot(self) -> int:
        return self.shots[0].samples.shape[0]

    def sample_coords(self, excitation: int = 0) -> np.ndarray:
        """All (kx, ky) of one excitation, shot-major order: (M, 2)."""
        spe = self.shots_per_excitation
        return np.vstack([s.samples
                          for s in self.shots[excitation * spe:
                                              (excitation + 1) * spe]])


def _kmax(matrix_fe: int) -> float:
    return 0.5 * (matrix_fe - 1) / matrix_fe


def cartesian_plan(config: ScannerConfig) -> SamplingPlan:
    """Sequential top-to-bottom phase-encode lines on exact grid positions."""
    if config.scheme != "cartesian":
        raise ValueError(f"config scheme is {config.scheme!r}")
    pe, fe = config.matrix_pe, config.matrix_fe
    kx = (np.arange(fe) - fe // 2) / fe
    shots = []
    for e in range(config.nex):
        for i in range(pe):
            ky = (i - pe // 2) / pe
            samples = np.column_stack([kx, np.full(fe, ky)])
            shots.append(Shot(index=e * pe + i, time_index_tr=e * pe + i,
                              samples=samples))
    return SamplingPlan(config, shots)


def radial_plan(config: ScannerConfig) -> SamplingPlan:
    """Uniform-angle full-diameter spokes, matrix_fe samples per spoke."""
    if config.scheme != "radial":
        raise ValueError(f"config scheme is {config.scheme!r}")
    spokes, fe = config.n_radial_spokes, config.matrix_fe
    kmax = _kmax(fe)
    r = np.linspace(-kmax, kmax, fe)
    shots = []
    for e in range(config.nex):
        for s in range(spokes):
            if config.radial_ordering == "golden":
                theta = (s * GOLDEN_ANGLE) % np.pi
            else:
                theta = s * np.pi / spokes
            samples = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
            shots.append(Shot(index=e * spokes + s,
                              time_index_tr=e * spokes + s, samples=samples))
    return SamplingPlan(config, shots)


def spiral_plan(config: ScannerConfig) -> SamplingPlan:
    """Archimedean interleaves r(s) = kmax*s, uniformly sampled in s."""
    if config.scheme != "spiral":
        raise ValueError(f"config scheme is {config.scheme!r}")
    pe, fe = config.matrix_pe, config.matrix_fe
    m_il = config.n_spiral_interleaves
    turns = config.n_spiral_turns
    spp = (pe * fe) // m_il
    kmax = _kmax(fe)
    s = np.arange(spp) / spp
    r = kmax * s
    shots = []
    for e in range(config.nex):
        for m in range(m_il):
            phi = 2 * np.pi * turns * s + 2 * np.pi * m / m_il
            samples = np.column_stack([r * np.cos(phi), r * np.sin(phi)])
            shots.append(Shot(index=e * m_il + m, time_index_tr=e * m_il + m,
                              samples=samples))
    return SamplingPlan(config, shots)


def build_plan(config: ScannerConfig) -> SamplingPlan:
    """Dispatch on config.scheme."""
    return {"cartesian": cartesian_plan,
            "radial": radial_plan,
            "spiral": spiral_plan}[config.scheme](config)


def scan_time(config: ScannerConfig) -> float:
    """Total scan duration in seconds: shots/excitation x NEX x TR."""
    return config.shots_per_excitation * config.nex * config.tr_ms / 1000.0


def validate_plan(plan: SamplingPlan) -> list[str]:
    """Check plan invariants; returns a list of violations (empty = valid)."""
    violations = []
    cfg = plan.config
    times = [s.time_index_tr for s in plan.shots]
    if times != list(range(len(plan.shots))):
        violations.append("shot time indices are not consecutive from 0")
    budget = cfg.matrix_pe * cfg.matrix_fe
    for e in range(cfg.nex):
        coords = plan.sample_coords(e)
        if coords.shape[0] != budget:
            violations.append(
                f"excitation {e}: {coords.shape[0]} samples != budget "
                f"{budget}")
        if np.any(coords < -0.5) or np.any(coords >= 0.5):
            violations.append(
                f"excitation {e}: sample coordinates outside [-0.5, 0.5)")
        if cfg.scheme == "cartesian":
            pe, fe = cfg.matrix_pe, cfg.matrix_fe
            iy = np.rint(coords[:, 1] * pe + pe // 2).astype(int)
            ix = np.rint(coords[:, 0] * fe + fe // 2).astype(int)
            on_grid = (np.allclose(coords[:, 1] * pe + pe // 2, iy)
                       and np.allclose(coords[:, 0] * fe + fe // 2, ix))
            if not on_grid:
                violations.append(f"excitation {e}: samples off grid")
            else:
                counts = np.zeros((pe, fe), dtype=int)
                np.add.at(counts, (iy, ix), 1)
                if not np.all(counts == 1):
                    violations.append(
                        f"excitation {e}: grid not covered exactly once")
    for s in plan.shots:
        if s.samples.shape[0] < 1:
            violations.append(f"shot {s.index}: empty sample list")
    return violations
