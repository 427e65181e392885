import numpy as np
import pytest

from mycloth.core import write_seed_catalog
from mycloth.raster import Raster


@pytest.fixture(scope="session")
def seed_catalog(tmp_path_factory):
    root = tmp_path_factory.mktemp("patterns")
    return write_seed_catalog(root)


@pytest.fixture(scope="session")
def seed_catalog_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("patterns_root")
    write_seed_catalog(root)
    return root


def random_rgb(rng, w, h):
    return Raster.from_array(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))


def random_mask(rng, w, h, p=0.5):
    return Raster.from_array(
        np.where(rng.random((h, w)) < p, 255, 0).astype(np.uint8)
    )
