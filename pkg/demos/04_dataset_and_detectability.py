#!/usr/bin/env python3
"""Generate a small labeled dataset and rank schemes by detectability.

Builds paired motion/clean records for all three schemes from a handful of
synthetic heads, then trains the spectral-band logistic probe per scheme
and prints distortion and AUC orderings. A desk-scale version of the full
comparison experiment (use the CLI `mrsim batch` / `mrsim compare` for
bigger runs).
"""

from pathlib import Path

from mrsim import compare_manifests, generate_batch
from mrsim import phantoms

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

images = [(f"head{i}", phantoms.brain_phantom(64, seed=i))
          for i in range(4)]

dataset = out / "mini_dataset"
manifest = generate_batch(images, dataset,
                          schemes=["cartesian", "radial", "spiral"],
                          trials=5, master_seed=2026, threads=2)
print(f"dataset manifest: {manifest}")

report = compare_manifests({s: manifest
                            for s in ("cartesian", "radial", "spiral")},
                           reps=3)
print(report.to_text())
(out / "mini_comparison.csv").write_text(report.to_csv())
print(f"wrote {out / 'mini_comparison.csv'}")
