import numpy as np
import pytest

from irslab.geometry import (
    FrequencyGrid,
    IrsLayout,
    Point3,
    Scene,
    SubsurfacePartition,
)

# Small scene: cheap enough for per-test evaluation, large enough that
# beam-split and focusing effects are visible.
SMALL_BS = Point3(0.4, 0.6, -0.5)
SMALL_USER = Point3(2.0, -1.5, -0.9)


@pytest.fixture(scope="session")
def small_layout():
    return IrsLayout(n_y=20, n_z=20, d=0.0005)


@pytest.fixture(scope="session")
def small_partition(small_layout):
    return SubsurfacePartition.for_layout(small_layout, 4, 4)


@pytest.fixture(scope="session")
def small_scene(small_layout, small_partition):
    return Scene(bs=SMALL_BS, user=SMALL_USER, layout=small_layout, partition=small_partition)


@pytest.fixture(scope="session")
def small_grid():
    return FrequencyGrid(f_c=300e9, bandwidth=30e9, m_count=16)


@pytest.fixture(scope="session")
def mirror_scene(small_layout, small_partition):
    """BS and user mirror-symmetric about the panel plane and equidistant."""
    return Scene(
        bs=Point3(1.0, 0.3, -0.2),
        user=Point3(-1.0, 0.3, -0.2),
        layout=small_layout,
        partition=small_partition,
    )


def wrapped_phase_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|a - b| wrapped to [0, pi]."""
    return np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b)))))
