import numpy as np
import pytest

from mrsim.image import ImageSlice
from mrsim import phantoms


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture
def brain64():
    return phantoms.brain_phantom(64, seed=7)


def random_image(rng, n, m=None, signed=True, spacing=1.0) -> ImageSlice:
    m = m or n
    pix = rng.standard_normal((n, m))
    if not signed:
        pix = np.abs(pix)
    return ImageSlice(pix, spacing)
