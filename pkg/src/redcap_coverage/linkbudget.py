"""Per-channel maximum-isotropic-loss (MIL) and coupling-loss (MCL) computation.

MIL is the largest total loss between isotropic antenna ports at which a
channel still meets its performance target:

    MIL = P_tx + G_tx + G_rx - NF_rx - N_thermal - SINR_req - L_eff

with the thermal noise taken over the occupied bandwidth and the antenna
efficiency penalty L_eff applied for size-constrained devices in both link
directions. MCL is MIL with the antenna gains removed. Maximum path loss is
not computed here; it would need shadow-fading and penetration margins that
the link budget does not carry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError
from .model import ChannelAllocation, Channel, Direction, Scenario, UeProfile

# Thermal noise density at 290 K reference temperature.
NOISE_DENSITY_DBM_PER_HZ = -174.0


def thermal_noise_dbm(bw_hz: float) -> float:
    """Thermal noise power over a bandwidth, dBm."""
    if bw_hz <= 0:
        raise ValueError(f"bandwidth must be > 0 Hz, got {bw_hz}")
    return NOISE_DENSITY_DBM_PER_HZ + 10.0 * math.log10(bw_hz)


def tx_power_over_allocation_dbm(scenario: Scenario, allocation: ChannelAllocation) -> float:
    """Transmit power falling into the allocation, dBm.

    Downlink power is shared across the carrier at constant spectral density;
    the uplink transmitter concentrates its full power in the allocation.
    """
    if allocation.direction is Direction.UL:
        return scenario.ue_power_dbm
    if allocation.occupied_bw_hz > scenario.carrier_bw_hz:
        raise ConfigurationError(
            f"{scenario.name}/{allocation.channel.value}: DL allocation "
            f"({allocation.occupied_bw_hz:.0f} Hz) exceeds the carrier "
            f"({scenario.carrier_bw_hz:.0f} Hz)"
        )
    return scenario.gnb_power_dbm + 10.0 * math.log10(
        allocation.occupied_bw_hz / scenario.carrier_bw_hz
    )


@dataclass(frozen=True)
class LinkBudgetLine:
    """Fully resolved budget for one channel of one (scenario, profile) pair."""

    scenario: str
    profile: str
    channel: Channel
    direction: Direction
    occupied_bw_hz: float
    tx_power_dbm: float
    tx_antenna_gain_db: float
    rx_antenna_gain_db: float
    rx_noise_figure_db: float
    thermal_noise_dbm: float
    required_sinr_db: float
    antenna_efficiency_loss_db: float
    mil_db: float
    mcl_db: float


def evaluate_channel(
    scenario: Scenario,
    profile: UeProfile,
    allocation: ChannelAllocation,
    required_sinr_db: float,
) -> LinkBudgetLine:
    """Compute the MIL/MCL line for one channel under one UE profile."""
    if allocation.occupied_bw_hz > profile.max_bw_hz:
        raise ConfigurationError(
            f"{scenario.name}/{profile.label}/{allocation.channel.value}: allocation "
            f"({allocation.occupied_bw_hz:.0f} Hz) exceeds the profile bandwidth "
            f"({profile.max_bw_hz:.0f} Hz)"
        )
    tx_power = tx_power_over_allocation_dbm(scenario, allocation)
    if allocation.direction is Direction.DL:
        tx_gain = scenario.gnb_antenna_gain_db
        rx_gain = scenario.ue_antenna_gain_db
        rx_noise_figure = scenario.ue_noise_figure_db
    else:
        tx_gain = scenario.ue_antenna_gain_db
        rx_gain = scenario.gnb_antenna_gain_db
        rx_noise_figure = scenario.gnb_noise_figure_db
    noise = thermal_noise_dbm(allocation.occupied_bw_hz)
    efficiency_loss = profile.antenna_efficiency_loss_db
    mil = (
        tx_power
        + tx_gain
        + rx_gain
        - rx_noise_figure
        - noise
        - required_sinr_db
        - efficiency_loss
    )
    return LinkBudgetLine(
        scenario=scenario.name,
        profile=profile.label,
        channel=allocation.channel,
        direction=allocation.direction,
        occupied_bw_hz=allocation.occupied_bw_hz,
        tx_power_dbm=tx_power,
        tx_antenna_gain_db=tx_gain,
        rx_antenna_gain_db=rx_gain,
        rx_noise_figure_db=rx_noise_figure,
        thermal_noise_dbm=noise,
        required_sinr_db=required_sinr_db,
        antenna_efficiency_loss_db=efficiency_loss,
        mil_db=mil,
        mcl_db=mil - tx_gain - rx_gain,
    )
