"""Scenario, UE-profile, channel-allocation and required-SINR data model.

The required-SINR numbers are link-level simulation outputs consumed as data;
this module only ties them to deployment scenarios and device profiles and
checks the dataset for internal consistency.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

from .errors import ConfigurationError
from .numerology import Numerology, TddPattern, duty_fractions
from .transport import TbsInput


class Channel(Enum):
    """Physical channels and initial-access messages, in report order."""

    SSB = "SSB"
    PRACH = "PRACH"
    MSG2 = "Msg2"
    MSG3 = "Msg3"
    MSG4 = "Msg4"
    PDCCH = "PDCCH"
    PDSCH = "PDSCH"
    PUCCH_F1 = "PUCCH_F1"
    PUCCH_F3 = "PUCCH_F3"
    PUSCH = "PUSCH"


CHANNEL_ORDER: tuple[Channel, ...] = tuple(Channel)
CHANNEL_RANK = {channel: rank for rank, channel in enumerate(CHANNEL_ORDER)}


class Direction(Enum):
    DL = "DL"
    UL = "UL"


CHANNEL_DIRECTION: dict[Channel, Direction] = {
    Channel.SSB: Direction.DL,
    Channel.PRACH: Direction.UL,
    Channel.MSG2: Direction.DL,
    Channel.MSG3: Direction.UL,
    Channel.MSG4: Direction.DL,
    Channel.PDCCH: Direction.DL,
    Channel.PDSCH: Direction.DL,
    Channel.PUCCH_F1: Direction.UL,
    Channel.PUCCH_F3: Direction.UL,
    Channel.PUSCH: Direction.UL,
}

DATA_CHANNELS = (Channel.PDSCH, Channel.PUSCH)


class Duplex(Enum):
    FDD = "FDD"
    TDD = "TDD"


SCENARIO_NAMES = ("Rural", "Urban", "Indoor")
SCENARIO_DUPLEX = {"Rural": Duplex.FDD, "Urban": Duplex.TDD, "Indoor": Duplex.TDD}

PROFILE_LABELS = ("Reference", "RedCap2Rx", "RedCap1Rx")
REFERENCE_LABEL = "Reference"

# Boundary between NR frequency ranges 1 and 2.
FR2_BOUNDARY_HZ = 7.125e9

# Antenna-efficiency penalty carried by size-constrained devices in FR1, dB.
FR1_REDCAP_EFFICIENCY_LOSS_DB = 3.0


@dataclass(frozen=True)
class Scenario:
    """One deployment context, including budget-side gains and noise figures.

    Antenna gains and noise figures are populated from the calibration file at
    load time; they are fitted values, not measured ones.
    """

    name: str
    carrier_hz: float
    duplex: Duplex
    tdd_pattern: Optional[TddPattern]
    carrier_bw_hz: float
    numerology: Numerology
    gnb_power_dbm: float
    gnb_txru_count: int
    gnb_rx_chains: int
    ue_power_dbm: float
    gnb_antenna_gain_db: float
    ue_antenna_gain_db: float
    gnb_noise_figure_db: float
    ue_noise_figure_db: float

    def __post_init__(self) -> None:
        if self.carrier_hz <= 0 or self.carrier_bw_hz <= 0:
            raise ConfigurationError(
                f"scenario {self.name}: carrier frequency and bandwidth must be > 0"
            )
        if self.gnb_txru_count < 1 or self.gnb_rx_chains < 1:
            raise ConfigurationError(
                f"scenario {self.name}: TXRU and RX-chain counts must be >= 1"
            )
        if self.duplex is Duplex.TDD and self.tdd_pattern is None:
            raise ConfigurationError(f"scenario {self.name}: TDD requires a frame pattern")
        if self.duplex is Duplex.FDD and self.tdd_pattern is not None:
            raise ConfigurationError(f"scenario {self.name}: FDD must not carry a frame pattern")

    @property
    def is_fr1(self) -> bool:
        return self.carrier_hz < FR2_BOUNDARY_HZ

    @property
    def duty(self) -> tuple[float, float]:
        """(downlink, uplink) usable symbol-time fractions; (1, 1) for FDD."""
        return duty_fractions(self.tdd_pattern if self.duplex is Duplex.TDD else None)


@dataclass(frozen=True)
class UeProfile:
    """Device capability set evaluated against a scenario."""

    label: str
    max_bw_hz: float
    rx_branches: int
    tx_branches: int
    antenna_efficiency_loss_db: float

    def __post_init__(self) -> None:
        if self.max_bw_hz <= 0:
            raise ConfigurationError(f"profile {self.label}: max bandwidth must be > 0")
        if self.rx_branches < 1 or self.tx_branches < 1:
            raise ConfigurationError(f"profile {self.label}: branch counts must be >= 1")
        if self.antenna_efficiency_loss_db < 0:
            raise ConfigurationError(
                f"profile {self.label}: antenna efficiency loss must be >= 0"
            )


@dataclass(frozen=True)
class ChannelAllocation:
    """One physical channel / initial-access message with its resources.

    ``profiles`` restricts applicability to the listed UE-profile labels; an
    empty tuple means the allocation applies to every profile. PRACH and SSB
    carry explicit occupied bandwidths instead of transport-block inputs since
    they are not MCS-scheduled.
    """

    channel: Channel
    direction: Direction
    occupied_bw_hz: float
    n_symbols: int
    performance_target: str
    n_prb: Optional[int] = None
    tbs_input: Optional[TbsInput] = None
    mcs_table_name: Optional[str] = None
    target_rate_bps: Optional[float] = None
    profiles: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.occupied_bw_hz <= 0:
            raise ConfigurationError(f"{self.channel.value}: occupied bandwidth must be > 0")
        if not 1 <= self.n_symbols <= 14:
            raise ConfigurationError(f"{self.channel.value}: symbol count must be in [1, 14]")
        if self.n_prb is not None and self.n_prb < 1:
            raise ConfigurationError(f"{self.channel.value}: PRB count must be >= 1")
        if self.target_rate_bps is not None and self.target_rate_bps < 0:
            raise ConfigurationError(f"{self.channel.value}: target rate must be >= 0")

    def applies_to(self, profile_label: str) -> bool:
        return not self.profiles or profile_label in self.profiles


@dataclass(frozen=True)
class SinrRequirement:
    """Required SINR (dB) for one (scenario, profile, channel) triple."""

    scenario: str
    profile: str
    channel: Channel
    required_sinr_db: float


def _applicable(
    allocations: Sequence[ChannelAllocation], channel: Channel, profile_label: str
) -> list[ChannelAllocation]:
    return [a for a in allocations if a.channel is channel and a.applies_to(profile_label)]


def validate_dataset(
    scenarios: Sequence[Scenario],
    profiles: Mapping[str, Sequence[UeProfile]],
    allocations: Mapping[str, Sequence[ChannelAllocation]],
    sinr_entries: Sequence[SinrRequirement],
) -> list[str]:
    """Cross-check a loaded dataset; returns a list of violations (empty = evaluable)."""
    violations: list[str] = []
    sinr_index: dict[tuple[str, str, Channel], float] = {}
    for entry in sinr_entries:
        sinr_index[(entry.scenario, entry.profile, entry.channel)] = entry.required_sinr_db

    scenario_names = set()
    for scenario in scenarios:
        scenario_names.add(scenario.name)
        if scenario.name not in SCENARIO_NAMES:
            violations.append(f"unknown scenario name {scenario.name!r}")
        else:
            expected = SCENARIO_DUPLEX[scenario.name]
            if scenario.duplex is not expected:
                violations.append(
                    f"{scenario.name}: duplex must be {expected.value}, got {scenario.duplex.value}"
                )

        scenario_profiles = list(profiles.get(scenario.name, ()))
        labels = [p.label for p in scenario_profiles]
        if REFERENCE_LABEL not in labels:
            violations.append(f"{scenario.name}: no {REFERENCE_LABEL} profile defined")
        for profile in scenario_profiles:
            prefix = f"{scenario.name}/{profile.label}"
            if profile.label not in PROFILE_LABELS:
                violations.append(f"{prefix}: unknown profile label")
                continue
            if profile.tx_branches != 1:
                violations.append(f"{prefix}: profiles carry exactly one TX branch")
            expected_loss = 0.0
            if profile.label != REFERENCE_LABEL and scenario.is_fr1:
                expected_loss = FR1_REDCAP_EFFICIENCY_LOSS_DB
            if profile.antenna_efficiency_loss_db != expected_loss:
                violations.append(
                    f"{prefix}: antenna efficiency loss must be {expected_loss} dB "
                    f"({'FR1' if scenario.is_fr1 else 'FR2'} rule), "
                    f"got {profile.antenna_efficiency_loss_db}"
                )

        scenario_allocs = list(allocations.get(scenario.name, ()))
        present_channels = []
        for alloc in scenario_allocs:
            if alloc.channel not in present_channels:
                present_channels.append(alloc.channel)
            expected_dir = CHANNEL_DIRECTION[alloc.channel]
            if alloc.direction is not expected_dir:
                violations.append(
                    f"{scenario.name}/{alloc.channel.value}: direction must be "
                    f"{expected_dir.value}, got {alloc.direction.value}"
                )
            if alloc.direction is Direction.DL and alloc.occupied_bw_hz > scenario.carrier_bw_hz:
                violations.append(
                    f"{scenario.name}/{alloc.channel.value}: DL allocation "
                    f"({alloc.occupied_bw_hz:.0f} Hz) exceeds the carrier bandwidth"
                )
            for label in alloc.profiles:
                if label not in labels:
                    violations.append(
                        f"{scenario.name}/{alloc.channel.value}: applicability list "
                        f"names unknown profile {label!r}"
                    )

        for channel in present_channels:
            for profile in scenario_profiles:
                matches = _applicable(scenario_allocs, channel, profile.label)
                key = f"{scenario.name}/{profile.label}/{channel.value}"
                if not matches:
                    violations.append(f"{key}: no applicable allocation")
                    continue
                if len(matches) > 1:
                    violations.append(f"{key}: {len(matches)} applicable allocations (ambiguous)")
                    continue
                alloc = matches[0]
                if alloc.occupied_bw_hz > profile.max_bw_hz:
                    violations.append(
                        f"{key}: allocation ({alloc.occupied_bw_hz:.0f} Hz) exceeds the "
                        f"profile bandwidth ({profile.max_bw_hz:.0f} Hz)"
                    )
                if (scenario.name, profile.label, channel) not in sinr_index:
                    violations.append(f"{key}: missing required-SINR entry")

        # UL required SINR must not depend on the profile when the allocation
        # fits the device bandwidth and the TX-branch counts are equal.
        for channel in present_channels:
            if CHANNEL_DIRECTION[channel] is not Direction.UL:
                continue
            seen: list[tuple[UeProfile, ChannelAllocation, float]] = []
            for profile in scenario_profiles:
                matches = _applicable(scenario_allocs, channel, profile.label)
                sinr = sinr_index.get((scenario.name, profile.label, channel))
                if len(matches) != 1 or sinr is None:
                    continue
                seen.append((profile, matches[0], sinr))
            for i, (prof_a, alloc_a, sinr_a) in enumerate(seen):
                for prof_b, alloc_b, sinr_b in seen[i + 1 :]:
                    comparable = (
                        prof_a.tx_branches == prof_b.tx_branches
                        and alloc_a.occupied_bw_hz == alloc_b.occupied_bw_hz
                        and alloc_a.occupied_bw_hz <= min(prof_a.max_bw_hz, prof_b.max_bw_hz)
                    )
                    if comparable and sinr_a != sinr_b:
                        violations.append(
                            f"{scenario.name}/{channel.value}: UL required SINR differs "
                            f"between {prof_a.label} ({sinr_a} dB) and "
                            f"{prof_b.label} ({sinr_b} dB)"
                        )

    for (scenario_name, profile_label, channel), _ in sinr_index.items():
        if scenario_name not in scenario_names:
            violations.append(
                f"SINR entry ({scenario_name}, {profile_label}, {channel.value}): "
                "unknown scenario"
            )
            continue
        known_labels = [p.label for p in profiles.get(scenario_name, ())]
        if profile_label not in known_labels:
            violations.append(
                f"SINR entry ({scenario_name}, {profile_label}, {channel.value}): "
                "unknown profile"
            )
            continue
        scenario_allocs = allocations.get(scenario_name, ())
        if not any(a.channel is channel for a in scenario_allocs):
            violations.append(
                f"SINR entry ({scenario_name}, {profile_label}, {channel.value}): "
                "no allocation for this channel"
            )

    return violations
