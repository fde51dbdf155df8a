import numpy as np
import pytest

NATURAL = ("camera", "coins", "moon", "astronaut", "brick")


def natural_image(name, shape=None):
    """A bundled scikit-image photo as an integer-valued float64 gray image."""
    from skimage import data, transform
    from skimage.color import rgb2gray

    img = getattr(data, name)()
    if img.ndim == 3:
        img = rgb2gray(img[..., :3]) * 255.0
    img = np.asarray(img, dtype=np.float64)
    if img.max() <= 1.0:
        img = img * 255.0
    if shape is not None:
        img = transform.resize(img, shape, order=1, anti_aliasing=True, preserve_range=True)
    return np.floor(img + 0.5)


@pytest.fixture(scope="session")
def camera():
    return natural_image("camera", (256, 256))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
