"""Spherical-wave LoS channels, their piece-wise far-field approximation, and
the inter/intra sub-surface decomposition of the cascaded phase.

Convention: the cascaded BS-IRS-user gain is conj(user-side) * reflection *
(BS-side), so per element the normalized cascade carries the phase
-2*pi*(f/c) * (r_bs - r_user). All beamformer designs and the array-gain
metric follow this convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    DegenerateGeometryError,
    FrequencyGrid,
    Scene,
    SubsurfacePartition,
    distances_to,
    element_positions,
    subsurface_centers,
)


@dataclass(frozen=True)
class ChannelSet:
    """Complex gains per (element, subcarrier), shape (N, M).

    `model` is "exact" or "piecewise"; when `normalized` every entry has
    unit magnitude (free-space amplitudes stripped).
    """

    model: str
    normalized: bool
    gains: np.ndarray

    def __post_init__(self) -> None:
        if self.gains.ndim != 2:
            raise ValueError("gains must be a 2-D (element, subcarrier) array")

    def phases(self) -> np.ndarray:
        """Wrapped phase per entry, radians in (-pi, pi]."""
        return np.angle(self.gains)


@dataclass(frozen=True)
class CascadedDecomposition:
    """Split of the cascaded path-length difference into sub-surface terms.

    inter_delta_r[ky-1, kz-1] is the BS-to-center minus center-to-user
    distance difference of a sub-surface (meters, shape (k_y, k_z)).
    intra_delta_phi is the per-element linearized offset difference
    (meters, shape (N,), row-major element order). The piecewise cascaded
    phase at frequency f is -2*pi*(f/c) * (inter - intra) per element.
    """

    partition: SubsurfacePartition
    inter_delta_r: np.ndarray
    intra_delta_phi: np.ndarray

    def __post_init__(self) -> None:
        if self.inter_delta_r.shape != (self.partition.k_y, self.partition.k_z):
            raise ValueError("inter table must have shape (k_y, k_z)")
        if not np.all(np.isfinite(self.inter_delta_r)):
            raise ValueError("inter table must be finite")
        if not np.all(np.isfinite(self.intra_delta_phi)):
            raise ValueError("intra table must be finite")


def element_distances(scene: Scene, endpoint: str) -> np.ndarray:
    """Exact element-to-endpoint distances, shape (N,), row-major order."""
    r = distances_to(scene.endpoint(endpoint), element_positions(scene.layout))
    if np.any(r == 0.0):
        raise DegenerateGeometryError(f"{endpoint} coincides with a panel element")
    return r


def path_length_difference(scene: Scene) -> np.ndarray:
    """Exact per-element cascaded path difference r_bs - r_user, shape (N,)."""
    return element_distances(scene, "bs") - element_distances(scene, "user")


def exact_los_channel(
    scene: Scene, grid: FrequencyGrid, endpoint: str, normalized: bool = False
) -> ChannelSet:
    """Exact spherical-wave LoS channel between `endpoint` and every element.

    Entry (n, m) is A * exp(-j*2*pi*(f_m/c)*r_n) with r_n the exact
    element distance. A is the free-space amplitude c/(4*pi*f_m*r_n), or 1
    when `normalized`.
    """
    r = element_distances(scene, endpoint)
    f = grid.frequencies
    gains = np.exp(-2j * np.pi / grid.c * np.outer(r, f))
    if not normalized:
        gains *= (grid.c / (4.0 * np.pi * f))[None, :] / r[:, None]
    return ChannelSet(model="exact", normalized=normalized, gains=gains)


def _subsurface_geometry(
    scene: Scene, partition: SubsurfacePartition, endpoint: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Center distances and link trigonometry per sub-surface.

    Returns (r, sin_azi, sin_ele, cos_ele), each shaped (k_y, k_z). The
    angles are those of the endpoint relative to each sub-surface center.
    """
    centers = subsurface_centers(scene.layout, partition)
    rel = scene.endpoint(endpoint).as_array() - centers
    r = np.linalg.norm(rel, axis=-1)
    if np.any(r == 0.0):
        raise DegenerateGeometryError(f"{endpoint} coincides with a sub-surface center")
    rho = np.hypot(rel[..., 0], rel[..., 1])
    sin_azi = np.divide(rel[..., 1], rho, out=np.zeros_like(rho), where=rho > 0)
    return r, sin_azi, rho / r, rel[..., 2] / r


def _intra_offsets(partition: SubsurfacePartition, d: float) -> np.ndarray:
    """Element offsets from the sub-surface center along one axis, shape (s,)."""
    return (np.arange(partition.s) - (partition.s - 1) / 2) * d


def _to_element_order(per_subsurface_element: np.ndarray, partition: SubsurfacePartition) -> np.ndarray:
    """Reshape a (k_y, k_z, s, s) table to global row-major element order (N,)."""
    k_y, k_z, s, _ = per_subsurface_element.shape
    return per_subsurface_element.transpose(0, 2, 1, 3).reshape(k_y * s * k_z * s)


def _linearized_distances(
    scene: Scene,
    partition: SubsurfacePartition,
    endpoint: str,
    range_scaled_elevation: bool,
) -> np.ndarray:
    """First-order element distances r_k - dz*cos - dy*sin*sin, shape (N,).

    With `range_scaled_elevation` the elevation offset term is additionally
    multiplied by the sub-surface center distance. That variant is
    dimensionally inconsistent and kept only as a compatibility switch; the
    default is the standard first-order expansion.
    """
    r, sin_azi, sin_ele, cos_ele = _subsurface_geometry(scene, partition, endpoint)
    off = _intra_offsets(partition, scene.layout.d)
    ele_scale = r * cos_ele if range_scaled_elevation else cos_ele
    azi_term = off[None, None, :, None] * (sin_ele * sin_azi)[:, :, None, None]
    ele_term = off[None, None, None, :] * ele_scale[:, :, None, None]
    approx = r[:, :, None, None] - ele_term - azi_term
    return _to_element_order(approx, partition)


def piecewise_channel(
    scene: Scene,
    grid: FrequencyGrid,
    partition: SubsurfacePartition,
    endpoint: str,
    range_scaled_elevation: bool = False,
) -> ChannelSet:
    """Piece-wise far-field channel: exact to sub-surface centers, linear within.

    Always unit magnitude. Entry (n, m) carries the phase
    -2*pi*(f_m/c) * (r_k - dz*d*cos_ele - dy*d*sin_ele*sin_azi) built from
    the element's sub-surface center distance r_k and its intra offsets.
    """
    r_lin = _linearized_distances(scene, partition, endpoint, range_scaled_elevation)
    gains = np.exp(-2j * np.pi / grid.c * np.outer(r_lin, grid.frequencies))
    return ChannelSet(model="piecewise", normalized=True, gains=gains)


def cascaded_decomposition(
    scene: Scene,
    partition: SubsurfacePartition,
    range_scaled_elevation: bool = False,
) -> CascadedDecomposition:
    """Split the piecewise cascaded phase into inter and intra sub-surface parts.

    inter_delta_r[k] = r_bs,k - r_user,k per sub-surface center;
    intra_delta_phi[n] = phi_bs,n - phi_user,n with phi the linear intra
    offset projection for each side. Reconstructing per-element phases as
    -2*pi*(f/c)*(inter - intra) reproduces the piecewise cascaded channel.
    """
    r_b, sa_b, se_b, ce_b = _subsurface_geometry(scene, partition, "bs")
    r_u, sa_u, se_u, ce_u = _subsurface_geometry(scene, partition, "user")
    off = _intra_offsets(partition, scene.layout.d)

    def side_phi(r, sa, se, ce):
        ele_scale = r * ce if range_scaled_elevation else ce
        return (
            off[None, None, :, None] * (se * sa)[:, :, None, None]
            + off[None, None, None, :] * ele_scale[:, :, None, None]
        )

    intra = _to_element_order(
        side_phi(r_b, sa_b, se_b, ce_b) - side_phi(r_u, sa_u, se_u, ce_u), partition
    )
    return CascadedDecomposition(
        partition=partition, inter_delta_r=r_b - r_u, intra_delta_phi=intra
    )


def cascaded_phase_from_decomposition(
    decomp: CascadedDecomposition, f: float, c: float
) -> np.ndarray:
    """Per-element piecewise cascaded phase -2*pi*(f/c)*(inter - intra), shape (N,)."""
    s = decomp.partition.s
    inter_el = np.repeat(np.repeat(decomp.inter_delta_r, s, axis=0), s, axis=1).reshape(-1)
    return -2.0 * np.pi * f / c * (inter_el - decomp.intra_delta_phi)
