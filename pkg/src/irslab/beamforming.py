"""Beamformer construction: phase-only narrowband focusing, the double-layer
delta-delay (DLDD) network, and the per-element true-time-delay benchmark.

Delay sign handling: delta delays may come out negative; hardware realizes the
magnitude and a 2-output switch routes the signal accordingly. Designs store
the signed values, expose physical (non-negative) module delays, and warn with
the offending module labels when a delay family is not sign-consistent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .channel import CascadedDecomposition, cascaded_decomposition, path_length_difference
from .geometry import FrequencyGrid, Scene, SubsurfacePartition


class SignConsistencyWarning(UserWarning):
    """A delta-delay family mixes signs; magnitude routing proceeds per module."""

    def __init__(self, message: str, offending_modules: tuple[str, ...]):
        super().__init__(message)
        self.offending_modules = offending_modules


@dataclass(frozen=True)
class PhaseShiftConfig:
    """Per-element reflection phase shifts, radians in [0, 2*pi)."""

    theta: np.ndarray

    def __post_init__(self) -> None:
        if self.theta.ndim != 1:
            raise ValueError("theta must be a flat per-element array")
        if np.any(self.theta < 0) or np.any(self.theta >= 2 * np.pi):
            raise ValueError("phases must lie in [0, 2*pi)")


@dataclass(frozen=True)
class DlddDelayNetwork:
    """Two-layer delta-delay network over a k_y x k_z sub-surface grid.

    first_layer holds the k_y - 1 signed row-to-row deltas (built from the
    first column); second_layer holds k_y groups of k_z - 1 signed deltas.
    switch_sign records the sign of the dedicated sub-surface delays the
    network reproduces; physical module delays are the magnitudes.
    """

    first_layer: np.ndarray
    second_layer: np.ndarray
    switch_sign: int

    def __post_init__(self) -> None:
        if self.first_layer.ndim != 1 or self.second_layer.ndim != 2:
            raise ValueError("first layer must be 1-D, second layer 2-D")
        if self.second_layer.shape[0] != self.first_layer.shape[0] + 1:
            raise ValueError("second layer must hold one group per k_y")
        if self.switch_sign not in (-1, 1):
            raise ValueError("switch_sign must be +1 or -1")

    @property
    def k_y(self) -> int:
        return self.second_layer.shape[0]

    @property
    def k_z(self) -> int:
        return self.second_layer.shape[1] + 1

    def module_delays(self) -> np.ndarray:
        """Physical (routed, non-negative) delays of all K-1 modules, flat."""
        return np.abs(np.concatenate([self.first_layer, self.second_layer.reshape(-1)]))

    def cumulative_delays(self, clamp: Optional[float] = None) -> np.ndarray:
        """Signed cumulative delay per sub-surface, shape (k_y, k_z).

        Relative to sub-surface (1, 1). With `clamp`, each module magnitude
        saturates at the given value (seconds) before accumulation.
        """
        first = self.first_layer
        second = self.second_layer
        if clamp is not None:
            first = np.sign(first) * np.minimum(np.abs(first), clamp)
            second = np.sign(second) * np.minimum(np.abs(second), clamp)
        rows = np.concatenate([[0.0], np.cumsum(first)])
        cols = np.concatenate([np.zeros((self.k_y, 1)), np.cumsum(second, axis=1)], axis=1)
        return rows[:, None] + cols


@dataclass(frozen=True)
class PerElementDelayConfig:
    """One dedicated delay per element, seconds (signed design values)."""

    tau: np.ndarray

    def __post_init__(self) -> None:
        if self.tau.ndim != 1 or not np.all(np.isfinite(self.tau)):
            raise ValueError("tau must be a finite flat per-element array")


DelayNetwork = Union[None, DlddDelayNetwork, PerElementDelayConfig]


@dataclass(frozen=True)
class BeamformerConfig:
    """A complete reflection configuration: phases plus an optional delay network."""

    design: str
    phases: PhaseShiftConfig
    delay_network: DelayNetwork
    partition: Optional[SubsurfacePartition]
    design_frequency: float

    def __post_init__(self) -> None:
        if isinstance(self.delay_network, DlddDelayNetwork):
            if self.partition is None:
                raise ValueError("DLDD configuration needs its partition")
            expected = self.partition.k * self.partition.s**2
            if self.phases.theta.shape[0] != expected:
                raise ValueError("partition inconsistent with the phase table size")
        if isinstance(self.delay_network, PerElementDelayConfig):
            if self.delay_network.tau.shape != self.phases.theta.shape:
                raise ValueError("per-element delay table size mismatch")

    @property
    def n_elements(self) -> int:
        return self.phases.theta.shape[0]

    def element_delays(self, clamp: Optional[float] = None) -> np.ndarray:
        """Signed delay seen by each element, shape (N,), row-major order.

        With `clamp`, every physical module delay saturates at the given
        value (seconds) before routing.
        """
        if clamp is not None and clamp < 0:
            raise ValueError("clamp must be non-negative")
        net = self.delay_network
        if net is None:
            return np.zeros(self.n_elements)
        if isinstance(net, PerElementDelayConfig):
            if clamp is None:
                return net.tau
            return np.sign(net.tau) * np.minimum(np.abs(net.tau), clamp)
        s = self.partition.s
        cum = net.cumulative_delays(clamp)
        return np.repeat(np.repeat(cum, s, axis=0), s, axis=1).reshape(-1)

    def as_dict(self) -> dict:
        """JSON-ready description (phases in radians, delays in seconds)."""
        out: dict = {
            "design": self.design,
            "design_frequency_hz": self.design_frequency,
            "phases_rad": self.phases.theta.tolist(),
        }
        if self.partition is not None:
            out["partition"] = {
                "k_y": self.partition.k_y,
                "k_z": self.partition.k_z,
                "s": self.partition.s,
            }
        net = self.delay_network
        if net is None:
            out["delay_network"] = {"type": "none"}
        elif isinstance(net, PerElementDelayConfig):
            out["delay_network"] = {"type": "per-element", "tau_s": net.tau.tolist()}
        else:
            out["delay_network"] = {
                "type": "dldd",
                "switch_sign": net.switch_sign,
                "first_layer_s": net.first_layer.tolist(),
                "second_layer_s": net.second_layer.tolist(),
            }
        return out


@dataclass(frozen=True)
class SignReport:
    """Outcome of the delay sign-consistency check."""

    consistent: bool
    sign: int
    offending_modules: tuple[str, ...] = ()


def _wrap_phase(theta: np.ndarray) -> np.ndarray:
    wrapped = np.mod(theta, 2 * np.pi)
    # mod can round up to exactly 2*pi for tiny negative inputs
    wrapped[wrapped >= 2 * np.pi] = 0.0
    return wrapped


def narrowband_design(scene: Scene, grid: FrequencyGrid) -> BeamformerConfig:
    """Phase-only focusing at f_c: theta = (2*pi/lambda_c)(r_bs - r_user) mod 2*pi.

    Cancels the cascaded phase exactly at the center frequency at every
    element, so the normalized array gain at f_c is 1.
    """
    theta = _wrap_phase(2 * np.pi / grid.lambda_c * path_length_difference(scene))
    return BeamformerConfig(
        design="narrowband",
        phases=PhaseShiftConfig(theta),
        delay_network=None,
        partition=None,
        design_frequency=grid.f_c,
    )


def required_subsurface_delays(decomp: CascadedDecomposition, c: float) -> np.ndarray:
    """Dedicated delay per sub-surface, tau_k = -inter_delta_r_k / c, shape (k_y, k_z)."""
    return -decomp.inter_delta_r / c


def _family_signs(values: np.ndarray) -> tuple[bool, int]:
    """Whether all nonzero entries share a sign, and that (majority) sign."""
    pos = values > 0
    neg = values < 0
    if not neg.any():
        return True, 1
    if not pos.any():
        return True, -1
    return False, 1 if pos.sum() >= neg.sum() else -1


def sign_consistency_check(
    decomp: CascadedDecomposition, partition: SubsurfacePartition, c: float
) -> SignReport:
    """Verify the sign structure the 2-output switches rely on.

    Checks that the dedicated sub-surface delays, the first-layer deltas and
    the second-layer deltas are each internally sign-consistent. Returns the
    sign of the dedicated-delay family; inconsistency is an outcome, not an
    error, and the offending modules are named in the report.
    """
    tau = required_subsurface_delays(decomp, c)
    first = tau[1:, 0] - tau[:-1, 0]
    second = tau[:, 1:] - tau[:, :-1]

    offending: list[str] = []
    all_ok = True
    for name, values in (("tau", tau), ("first", first), ("second", second)):
        ok, sign = _family_signs(values.reshape(-1))
        if not ok:
            all_ok = False
            bad = np.argwhere(np.sign(values) == -sign)
            offending.extend(
                f"{name}[{','.join(str(i + 1) for i in idx)}]" for idx in bad
            )
    _, tau_sign = _family_signs(tau.reshape(-1))
    return SignReport(consistent=all_ok, sign=tau_sign, offending_modules=tuple(offending))


def dldd_design(
    scene: Scene,
    grid: FrequencyGrid,
    partition: Optional[SubsurfacePartition] = None,
    range_scaled_elevation: bool = False,
) -> BeamformerConfig:
    """Double-layer delta-delay design over the sub-surface grid.

    Delta delays cancel the inter-sub-surface path difference at every
    frequency (first layer row-to-row from the first column, second layer
    within each row); phase shifts cancel the intra-sub-surface part at the
    center frequency. Sign inconsistency triggers a SignConsistencyWarning
    and the design proceeds with per-module magnitude routing.
    """
    if partition is None:
        partition = scene.partition
    decomp = cascaded_decomposition(scene, partition, range_scaled_elevation)
    tau = required_subsurface_delays(decomp, grid.c)
    report = sign_consistency_check(decomp, partition, grid.c)
    if not report.consistent:
        warnings.warn(
            SignConsistencyWarning(
                "delta-delay signs are not consistent; routing magnitudes per module "
                f"(offending: {', '.join(report.offending_modules)})",
                report.offending_modules,
            ),
            stacklevel=2,
        )
    network = DlddDelayNetwork(
        first_layer=tau[1:, 0] - tau[:-1, 0],
        second_layer=tau[:, 1:] - tau[:, :-1],
        switch_sign=report.sign,
    )
    theta = _wrap_phase(-2 * np.pi * grid.f_c / grid.c * decomp.intra_delta_phi)
    return BeamformerConfig(
        design="dldd",
        phases=PhaseShiftConfig(theta),
        delay_network=network,
        partition=partition,
        design_frequency=grid.f_c,
    )


def cumulative_delay(network: DlddDelayNetwork, ky: int, kz: int) -> float:
    """Cumulative delay reaching sub-surface (ky, kz), 1-based, seconds.

    Sum of the first ky-1 first-layer deltas and the first kz-1 deltas of
    row ky's second-layer group; zero at (1, 1).
    """
    if not 1 <= ky <= network.k_y:
        raise ValueError(f"ky={ky} outside [1, {network.k_y}]")
    if not 1 <= kz <= network.k_z:
        raise ValueError(f"kz={kz} outside [1, {network.k_z}]")
    return float(
        network.first_layer[: ky - 1].sum() + network.second_layer[ky - 1, : kz - 1].sum()
    )


def per_element_td_design(scene: Scene, grid: FrequencyGrid) -> BeamformerConfig:
    """Benchmark with a dedicated delay per element: tau_n = -(r_bs - r_user)/c.

    Cancels the cascaded phase at every frequency, so the normalized array
    gain is 1 at all subcarriers.
    """
    tau = -path_length_difference(scene) / grid.c
    theta = np.zeros_like(tau)
    return BeamformerConfig(
        design="per-element",
        phases=PhaseShiftConfig(theta),
        delay_network=PerElementDelayConfig(tau),
        partition=None,
        design_frequency=grid.f_c,
    )


def effective_reflection(
    config: BeamformerConfig, f: float, clamp: Optional[float] = None
) -> np.ndarray:
    """Per-element unit reflection coefficients at frequency f, shape (N,).

    Unclamped this is exp(j*(theta_n - 2*pi*f*tau_n)). With `clamp`
    (maximum realizable module delay, seconds) the delays saturate and the
    phase shifters are re-anchored so the center-frequency response matches
    the unclamped design; the residual dispersion then scales with f - f_c,
    which is how a recalibrated range-limited delay line behaves.
    """
    if clamp is not None and clamp < 0:
        raise ValueError("clamp must be non-negative")
    tau_ideal = config.element_delays()
    tau_real = config.element_delays(clamp) if clamp is not None else tau_ideal
    f_c = config.design_frequency
    phase = (
        config.phases.theta
        - 2 * np.pi * f_c * tau_ideal
        - 2 * np.pi * (f - f_c) * tau_real
    )
    return np.exp(1j * phase)


def td_module_count(partition: SubsurfacePartition) -> int:
    """Number of delta-delay modules: (k_y - 1) + k_y*(k_z - 1) = K - 1."""
    return (partition.k_y - 1) + partition.k_y * (partition.k_z - 1)


def required_delay_range(config: BeamformerConfig) -> float:
    """Largest delay magnitude a single module must realize, seconds.

    For the DLDD network that is the largest routed delta; for the
    per-element benchmark the largest dedicated element delay.
    """
    net = config.delay_network
    if net is None:
        raise ValueError("configuration has no delay network")
    if isinstance(net, PerElementDelayConfig):
        return float(np.abs(net.tau).max())
    delays = net.module_delays()
    return float(delays.max()) if delays.size else 0.0
