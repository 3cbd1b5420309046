import numpy as np
import pytest

from chplane.synthetic import make_mini_corpus, textured_image


@pytest.fixture(scope="session")
def mini_corpus(tmp_path_factory):
    """Small deterministic corpus shared across test modules."""
    root = tmp_path_factory.mktemp("corpus")
    manifest = make_mini_corpus(root, n_images=66, seed=77)
    return manifest


@pytest.fixture(scope="session")
def texture_bank():
    """Keypoint-rich grayscale images for feature tests."""
    kinds = ["smooth", "noise", "smooth", "noise", "smooth"]
    return [textured_image(500 + i, size=140, kind=k) for i, k in enumerate(kinds)]


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
