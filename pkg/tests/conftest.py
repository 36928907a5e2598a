import pytest

from driveqa.embeddings import Embedder, OfflineProvider
from fixtures import make_scene


@pytest.fixture(scope="session")
def offline_embedder():
    return Embedder(OfflineProvider())


@pytest.fixture
def fixture_scene():
    return make_scene()


@pytest.fixture
def long_scene():
    return make_scene(n_frames=10)
