"""Array-gain, beam-pattern and achievable-rate evaluation.

All gains are evaluated against the exact spherical-wave channel regardless of
which model a beamformer was designed from. Phasor sums run in the fixed
row-major element order, so results are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .beamforming import BeamformerConfig
from .channel import element_distances
from .geometry import FrequencyGrid, Point3, Scene, distances_to, element_positions

GAIN_TOL = 1e-9


@dataclass(frozen=True)
class GainProfile:
    """Normalized array gain per subcarrier, each value in [0, 1]."""

    frequencies: np.ndarray
    gains: np.ndarray

    def __post_init__(self) -> None:
        if self.frequencies.shape != self.gains.shape:
            raise ValueError("frequency and gain arrays must align")
        if np.any(self.gains < -GAIN_TOL) or np.any(self.gains > 1 + GAIN_TOL):
            raise ValueError("gains must lie in [0, 1]")


@dataclass(frozen=True)
class EvaluationPlane:
    """Axis-aligned horizontal rectangle (fixed z) sampled on a regular grid."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    z: float
    n_x: int
    n_y: int

    def __post_init__(self) -> None:
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("plane resolution must be >= 1 point per axis")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("plane extents must be ordered")
        if (self.n_x > 1 and self.x_min == self.x_max) or (
            self.n_y > 1 and self.y_min == self.y_max
        ):
            raise ValueError("degenerate plane: zero extent with multiple points")
        if self.x_min <= 0.0 <= self.x_max:
            raise ValueError("plane must not cross the panel plane x = 0")

    def x_coords(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    def y_coords(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.n_y)


@dataclass(frozen=True)
class Peak:
    """Location and value of a beam pattern's maximum at one frequency."""

    frequency: float
    x: float
    y: float
    gain: float
    ix: int
    iy: int


@dataclass(frozen=True)
class BeamPattern:
    """Gain over an evaluation plane for a set of frequencies, shape (F, n_x, n_y)."""

    plane: EvaluationPlane
    frequencies: np.ndarray
    gains: np.ndarray
    peaks: tuple[Peak, ...]

    def __post_init__(self) -> None:
        if np.any(self.gains < -GAIN_TOL) or np.any(self.gains > 1 + GAIN_TOL):
            raise ValueError("gains must lie in [0, 1]")


@dataclass(frozen=True)
class RateResult:
    """Per-subcarrier spectral efficiency under an equal-power OFDM budget."""

    p_bs: float
    noise_density: float
    rates: np.ndarray
    mean_rate: float


def _anchor_and_slope(
    config: BeamformerConfig, f_ref: float, clamp: Optional[float]
) -> tuple[np.ndarray, np.ndarray]:
    """Frequency-flat anchor phase and delay slope of the reflection.

    The reflection phase at frequency f is anchor - 2*pi*f*tau_real, with the
    anchor re-folding any clamped-away delay at the design frequency.
    """
    tau_ideal = config.element_delays()
    tau_real = config.element_delays(clamp) if clamp is not None else tau_ideal
    anchor = config.phases.theta - 2 * np.pi * f_ref * (tau_ideal - tau_real)
    return anchor, tau_real


def normalized_array_gain(
    scene: Scene,
    grid: FrequencyGrid,
    config: BeamformerConfig,
    f: float,
    clamp: Optional[float] = None,
    at_point: Optional[Point3] = None,
) -> float:
    """Normalized array gain (1/N)|sum of cascade x reflection phasors| at f.

    `at_point` replaces the user position for beam-pattern style probing.
    """
    r_bs = element_distances(scene, "bs")
    if at_point is None:
        r_to = element_distances(scene, "user")
    else:
        r_to = distances_to(at_point, element_positions(scene.layout))
    anchor, tau = _anchor_and_slope(config, config.design_frequency, clamp)
    delta = (r_bs - r_to) / grid.c + tau
    phasors = np.exp(1j * (anchor - 2 * np.pi * f * delta))
    return float(np.abs(phasors.sum()) / phasors.size)


def gain_profile(
    scene: Scene,
    grid: FrequencyGrid,
    config: BeamformerConfig,
    clamp: Optional[float] = None,
) -> GainProfile:
    """Normalized array gain at every subcarrier of the grid."""
    anchor, tau = _anchor_and_slope(config, config.design_frequency, clamp)
    delta = (element_distances(scene, "bs") - element_distances(scene, "user")) / grid.c + tau
    f = grid.frequencies
    phasors = np.exp(1j * (anchor[:, None] - 2 * np.pi * np.outer(delta, f)))
    gains = np.abs(phasors.sum(axis=0)) / phasors.shape[0]
    return GainProfile(frequencies=f, gains=np.minimum(gains, 1.0))


def edge_gain(profile: GainProfile) -> float:
    """Smaller of the two edge-subcarrier gains."""
    if profile.gains.size < 2:
        raise ValueError("edge gain needs at least two subcarriers")
    return float(min(profile.gains[0], profile.gains[-1]))


def multi_beam_pattern(
    scene: Scene,
    grid: FrequencyGrid,
    configs: dict[str, BeamformerConfig],
    frequencies: Sequence[float],
    plane: EvaluationPlane,
    clamp: Optional[float] = None,
    chunk: int = 512,
) -> dict[str, BeamPattern]:
    """Beam patterns for several configurations over one plane.

    Element-to-point distances and the per-frequency point phasors are
    computed once per chunk and shared across all configurations, which is
    what makes sweeping designs over the default 201x201 plane affordable.
    """
    freqs = np.asarray(list(frequencies), dtype=float)
    pos = element_positions(scene.layout)
    el_y, el_z = pos[:, 1], pos[:, 2]
    r_bs = element_distances(scene, "bs")
    n = pos.shape[0]
    # per-(config, frequency) element weights: cascade BS side x reflection
    weights = {}
    for name, config in configs.items():
        anchor, tau = _anchor_and_slope(config, config.design_frequency, clamp)
        weights[name] = np.exp(
            1j
            * (
                anchor[None, :]
                - 2 * np.pi * freqs[:, None] * (r_bs[None, :] / grid.c + tau[None, :])
            )
        )

    xs, ys = plane.x_coords(), plane.y_coords()
    px = np.repeat(xs, plane.n_y)
    py = np.tile(ys, plane.n_x)
    n_pts = px.size
    gains = {name: np.empty((freqs.size, n_pts)) for name in configs}
    for start in range(0, n_pts, chunk):
        sl = slice(start, min(start + chunk, n_pts))
        r_p = np.sqrt(
            px[sl, None] ** 2
            + (py[sl, None] - el_y[None, :]) ** 2
            + (plane.z - el_z[None, :]) ** 2
        )
        for i, f in enumerate(freqs):
            phasors = np.exp(2j * np.pi * f / grid.c * r_p)
            for name in configs:
                gains[name][i, sl] = np.abs(phasors @ weights[name][i]) / n

    out = {}
    for name in configs:
        g = np.minimum(gains[name].reshape(freqs.size, plane.n_x, plane.n_y), 1.0)
        peaks = []
        for i, f in enumerate(freqs):
            ix, iy = np.unravel_index(int(np.argmax(g[i])), g[i].shape)
            peaks.append(
                Peak(frequency=float(f), x=float(xs[ix]), y=float(ys[iy]),
                     gain=float(g[i, ix, iy]), ix=int(ix), iy=int(iy))
            )
        out[name] = BeamPattern(plane=plane, frequencies=freqs, gains=g, peaks=tuple(peaks))
    return out


def beam_pattern(
    scene: Scene,
    grid: FrequencyGrid,
    config: BeamformerConfig,
    frequencies: Sequence[float],
    plane: EvaluationPlane,
    clamp: Optional[float] = None,
    chunk: int = 512,
) -> BeamPattern:
    """Array gain over a plane: user-side distances replaced by plane points."""
    return multi_beam_pattern(
        scene, grid, {"only": config}, frequencies, plane, clamp=clamp, chunk=chunk
    )["only"]


def cascade_gain_magnitudes(
    scene: Scene,
    grid: FrequencyGrid,
    config: BeamformerConfig,
    clamp: Optional[float] = None,
) -> np.ndarray:
    """|amplitude-weighted cascaded gain| per subcarrier, shape (M,).

    Uses the un-normalized channel amplitudes alpha_m/r on both hops, so the
    result is the magnitude of the end-to-end complex gain.
    """
    r_bs = element_distances(scene, "bs")
    r_ru = element_distances(scene, "user")
    anchor, tau = _anchor_and_slope(config, config.design_frequency, clamp)
    delta = (r_bs - r_ru) / grid.c + tau
    f = grid.frequencies
    phasors = np.exp(1j * (anchor[:, None] - 2 * np.pi * np.outer(delta, f)))
    coherent = np.abs((phasors / (r_bs * r_ru)[:, None]).sum(axis=0))
    return (grid.c / (4.0 * np.pi * f)) ** 2 * coherent


def rates_from_gain(
    gain_mag: np.ndarray, grid: FrequencyGrid, p_bs: float, noise_density: float
) -> np.ndarray:
    """Per-subcarrier rate for a precomputed cascaded gain magnitude."""
    if p_bs <= 0:
        raise ValueError("transmit power must be positive")
    if noise_density <= 0:
        raise ValueError("noise density must be positive")
    m = grid.m_count
    snr = (p_bs / m) * gain_mag**2 / (noise_density * grid.bandwidth / m)
    return np.log2(1.0 + snr)


def achievable_rate(
    scene: Scene,
    grid: FrequencyGrid,
    config: BeamformerConfig,
    p_bs: float,
    noise_density: float,
    clamp: Optional[float] = None,
) -> RateResult:
    """Mean spectral efficiency with power split equally over the subcarriers.

    Per subcarrier: log2(1 + (P/M) |amplitude-weighted cascaded gain|^2 /
    (N0 * B/M)).
    """
    gain_mag = cascade_gain_magnitudes(scene, grid, config, clamp)
    rates = rates_from_gain(gain_mag, grid, p_bs, noise_density)
    return RateResult(
        p_bs=p_bs,
        noise_density=noise_density,
        rates=rates,
        mean_rate=float(rates.mean()),
    )
