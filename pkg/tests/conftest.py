import numpy as np
import pytest

from polysmooth import ElementKind
from polysmooth.generators import random_element_coords, random_rotation, random_valid_mesh

ALL_KINDS = tuple(ElementKind)


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


def sample_element(kind, rng, transform=True):
    return random_element_coords(kind, rng, transform=transform)


def sample_mesh(rng):
    return random_valid_mesh(rng)


def rotation(rng):
    return random_rotation(rng)
