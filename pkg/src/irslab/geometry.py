"""Scene geometry: panel layout, sub-surface partition, distances and link angles.

The IRS panel lies in the y-z plane, centered at the origin. Elements and
sub-surfaces are indexed 1-based along y then z; flattened arrays are
row-major in (iy, iz), i.e. the z index varies fastest.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0
"""Propagation speed in m/s (exact SI value)."""


class DegenerateGeometryError(ValueError):
    """An endpoint coincides with a panel element or reference point."""


class PanelPlaneWarning(UserWarning):
    """An endpoint lies exactly in the panel plane (x = 0).

    The channel formulas stay well defined; grazing placement is accepted
    but flagged because it is usually unintended.
    """


@dataclass(frozen=True)
class Point3:
    """A point in 3-D Cartesian space, in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(np.isfinite([self.x, self.y, self.z])):
            raise ValueError("coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class IrsLayout:
    """Uniform planar array: n_y x n_z elements spaced d meters apart."""

    n_y: int
    n_z: int
    d: float

    def __post_init__(self) -> None:
        if self.n_y < 1 or self.n_z < 1:
            raise ValueError("element counts must be >= 1")
        if not (np.isfinite(self.d) and self.d > 0):
            raise ValueError("element spacing d must be positive")

    @property
    def n_elements(self) -> int:
        return self.n_y * self.n_z


@dataclass(frozen=True)
class SubsurfacePartition:
    """Grouping of the panel into k_y x k_z square sub-surfaces of s x s elements."""

    k_y: int
    k_z: int
    s: int

    def __post_init__(self) -> None:
        if self.k_y < 1 or self.k_z < 1 or self.s < 1:
            raise ValueError("partition counts must be >= 1")

    @property
    def k(self) -> int:
        return self.k_y * self.k_z

    @classmethod
    def for_layout(cls, layout: IrsLayout, k_y: int, k_z: int) -> "SubsurfacePartition":
        """Build a partition of `layout`, validating divisibility.

        Sub-surfaces are square, so n_y / k_y must equal n_z / k_z.
        """
        if k_y < 1 or k_z < 1:
            raise ValueError("sub-surface counts must be >= 1")
        if layout.n_y % k_y != 0:
            raise ValueError(f"n_y={layout.n_y} is not divisible by k_y={k_y}")
        if layout.n_z % k_z != 0:
            raise ValueError(f"n_z={layout.n_z} is not divisible by k_z={k_z}")
        s = layout.n_y // k_y
        if layout.n_z // k_z != s:
            raise ValueError(
                f"partition {k_y}x{k_z} of {layout.n_y}x{layout.n_z} panel has "
                f"non-square sub-surfaces ({s}x{layout.n_z // k_z})"
            )
        return cls(k_y=k_y, k_z=k_z, s=s)

    def matches(self, layout: IrsLayout) -> bool:
        return self.s * self.k_y == layout.n_y and self.s * self.k_z == layout.n_z


@dataclass(frozen=True)
class FrequencyGrid:
    """OFDM subcarrier grid: m_count subcarriers symmetric about f_c.

    Subcarrier m (0-based) sits at f_c + (bandwidth / m_count) * (m - (m_count-1)/2),
    so the grid spans f_c +/- bandwidth*(m_count-1)/(2*m_count). Edge subcarriers
    are indices 0 and m_count - 1.
    """

    f_c: float
    bandwidth: float
    m_count: int
    c: float = SPEED_OF_LIGHT

    def __post_init__(self) -> None:
        if self.f_c <= 0:
            raise ValueError("center frequency must be positive")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.m_count < 1:
            raise ValueError("subcarrier count must be >= 1")
        if self.c <= 0:
            raise ValueError("propagation speed must be positive")

    @property
    def lambda_c(self) -> float:
        """Wavelength at the center frequency, meters."""
        return self.c / self.f_c

    @property
    def frequencies(self) -> np.ndarray:
        """All subcarrier frequencies in Hz, strictly increasing."""
        m = np.arange(self.m_count, dtype=float)
        return self.f_c + (self.bandwidth / self.m_count) * (m - (self.m_count - 1) / 2)


@dataclass(frozen=True)
class Scene:
    """BS and user positions plus the panel layout and its default partition."""

    bs: Point3
    user: Point3
    layout: IrsLayout
    partition: SubsurfacePartition

    def __post_init__(self) -> None:
        if not self.partition.matches(self.layout):
            raise ValueError(
                f"partition {self.partition.k_y}x{self.partition.k_z} (s={self.partition.s}) "
                f"does not tile the {self.layout.n_y}x{self.layout.n_z} layout"
            )
        for name, p in (("BS", self.bs), ("user", self.user)):
            if p.x == 0.0:
                warnings.warn(
                    f"{name} lies exactly in the panel plane (x = 0); "
                    "formulas remain defined but placement is grazing",
                    PanelPlaneWarning,
                    stacklevel=2,
                )

    def endpoint(self, which: str) -> Point3:
        if which == "bs":
            return self.bs
        if which == "user":
            return self.user
        raise ValueError(f"endpoint must be 'bs' or 'user', got {which!r}")


def delta_index(a: int, b: int) -> float:
    """Half-integer offset of slot `a` within an axis of length `b`: a - (b-1)/2.

    Valid for 0 <= a <= b-1; the offsets are symmetric about zero.
    """
    if not 0 <= a <= b - 1:
        raise ValueError(f"index {a} outside [0, {b - 1}]")
    return a - (b - 1) / 2


def element_position(layout: IrsLayout, iy: int, iz: int) -> Point3:
    """Position of the (iy, iz)-th element, 1-based indices.

    The element set is centrosymmetric about the panel center (the origin).
    """
    if not 1 <= iy <= layout.n_y:
        raise ValueError(f"iy={iy} outside [1, {layout.n_y}]")
    if not 1 <= iz <= layout.n_z:
        raise ValueError(f"iz={iz} outside [1, {layout.n_z}]")
    return Point3(
        0.0,
        delta_index(iy - 1, layout.n_y) * layout.d,
        delta_index(iz - 1, layout.n_z) * layout.d,
    )


def subsurface_center(
    layout: IrsLayout, partition: SubsurfacePartition, ky: int, kz: int
) -> Point3:
    """Center of the (ky, kz)-th sub-surface, 1-based indices."""
    if not partition.matches(layout):
        raise ValueError("partition does not tile the layout")
    if not 1 <= ky <= partition.k_y:
        raise ValueError(f"ky={ky} outside [1, {partition.k_y}]")
    if not 1 <= kz <= partition.k_z:
        raise ValueError(f"kz={kz} outside [1, {partition.k_z}]")
    step = partition.s * layout.d
    return Point3(
        0.0,
        delta_index(ky - 1, partition.k_y) * step,
        delta_index(kz - 1, partition.k_z) * step,
    )


def distance(p: Point3, q: Point3) -> float:
    """Euclidean distance between two points, meters."""
    return float(np.linalg.norm(p.as_array() - q.as_array()))


def link_angles(endpoint: Point3, center: Point3) -> tuple[float, float, float]:
    """Link trigonometry of `endpoint` as seen from a sub-surface center.

    Returns (sin_azimuth, sin_elevation, cos_elevation) for the relative
    vector endpoint - center, with azimuth measured in the x-y plane and
    elevation from it, so sin_elevation**2 + cos_elevation**2 == 1.
    """
    rel = endpoint.as_array() - center.as_array()
    r = float(np.linalg.norm(rel))
    if r == 0.0:
        raise DegenerateGeometryError("endpoint coincides with the sub-surface center")
    rho = float(np.hypot(rel[0], rel[1]))
    sin_azi = rel[1] / rho if rho > 0 else 0.0
    return sin_azi, rho / r, rel[2] / r


def fraunhofer_distance(layout: IrsLayout, lambda_c: float) -> float:
    """Near-field boundary 2 D^2 / lambda_c with D the panel diagonal."""
    if lambda_c <= 0:
        raise ValueError("wavelength must be positive")
    diag = layout.d * float(np.hypot(layout.n_y - 1, layout.n_z - 1))
    return 2.0 * diag**2 / lambda_c


# --- vectorized helpers used by the channel and metric kernels ---


def element_offsets(layout: IrsLayout) -> tuple[np.ndarray, np.ndarray]:
    """Element y/z offsets from the panel center, each (n_y,) / (n_z,)."""
    oy = (np.arange(layout.n_y) - (layout.n_y - 1) / 2) * layout.d
    oz = (np.arange(layout.n_z) - (layout.n_z - 1) / 2) * layout.d
    return oy, oz


def element_positions(layout: IrsLayout) -> np.ndarray:
    """All element positions as an (N, 3) array, row-major in (iy, iz)."""
    oy, oz = element_offsets(layout)
    yy, zz = np.meshgrid(oy, oz, indexing="ij")
    return np.stack([np.zeros_like(yy), yy, zz], axis=-1).reshape(-1, 3)


def subsurface_centers(layout: IrsLayout, partition: SubsurfacePartition) -> np.ndarray:
    """All sub-surface centers as a (k_y, k_z, 3) array."""
    if not partition.matches(layout):
        raise ValueError("partition does not tile the layout")
    step = partition.s * layout.d
    cy = (np.arange(partition.k_y) - (partition.k_y - 1) / 2) * step
    cz = (np.arange(partition.k_z) - (partition.k_z - 1) / 2) * step
    yy, zz = np.meshgrid(cy, cz, indexing="ij")
    return np.stack([np.zeros_like(yy), yy, zz], axis=-1)


def distances_to(point: Point3, positions: np.ndarray) -> np.ndarray:
    """Distances from `point` to each row/entry of a (..., 3) position array."""
    return np.linalg.norm(positions - point.as_array(), axis=-1)
