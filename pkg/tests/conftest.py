import functools

import numpy as np
import pytest

from confsub.scenes import load_preset, sample_points


@functools.lru_cache(maxsize=None)
def scene(name):
    return load_preset(name)


@functools.lru_cache(maxsize=None)
def points(name, count=8, seed=7):
    return tuple(tuple(p) for p in sample_points(scene(name), count=count, seed=seed))


def contexts(name, count=8, seed=7):
    sc = scene(name)
    return [sc.fmap.context(np.array(p), sc.tolerances) for p in points(name, count, seed)]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
