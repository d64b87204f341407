"""Bottleneck identification, coverage thresholds and recovery quantification.

The reference UE channel with the lowest MIL is the coverage bottleneck; its
MIL is the threshold every reduced-capability channel is held to. Channels
whose MIL falls below the threshold need coverage recovery equal to the gap.
Proposing recovery techniques (repetition, hopping, aggregation) is out of
scope; the toolkit quantifies the gap only.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Mapping, Optional, Sequence

from .errors import ConfigurationError, SinrLookupError, UnsupportedOperationError
from .linkbudget import LinkBudgetLine, evaluate_channel
from .model import (
    CHANNEL_RANK,
    DATA_CHANNELS,
    REFERENCE_LABEL,
    Channel,
    ChannelAllocation,
    Direction,
    Scenario,
    UeProfile,
)
from .numerology import prb_bandwidth_hz
from .transport import RateMode, TbsInput, achieved_rate_bps, tbs

if TYPE_CHECKING:
    from .bundle import Bundle


@dataclass(frozen=True)
class BottleneckResult:
    channel: Channel
    mil_db: float
    ties: tuple[Channel, ...] = ()


def find_bottleneck(lines: Sequence[LinkBudgetLine]) -> BottleneckResult:
    """Channel with the minimum MIL; ties broken by channel order and reported."""
    if not lines:
        raise ValueError("cannot find a bottleneck in an empty line list")
    winner = min(lines, key=lambda line: (line.mil_db, CHANNEL_RANK[line.channel]))
    ties = tuple(
        sorted(
            (line.channel for line in lines
             if line.mil_db == winner.mil_db and line.channel is not winner.channel),
            key=CHANNEL_RANK.__getitem__,
        )
    )
    return BottleneckResult(channel=winner.channel, mil_db=winner.mil_db, ties=ties)


@dataclass(frozen=True)
class RecoveryEntry:
    profile: str
    channel: Channel
    recovery_db: float


@dataclass(frozen=True)
class EvaluationWarning:
    code: str
    message: str
    channel: str = ""
    profile: str = ""


@dataclass(frozen=True)
class CoverageReport:
    """Per-scenario MIL comparison with threshold, bottleneck and recoveries."""

    scenario: str
    rate_mode: RateMode
    reference_lines: tuple[LinkBudgetLine, ...]
    redcap_lines: dict[str, tuple[LinkBudgetLine, ...]]
    threshold_mil_db: float
    bottleneck_channel: Channel
    bottleneck_ties: tuple[Channel, ...]
    recoveries: tuple[RecoveryEntry, ...]
    warnings: tuple[EvaluationWarning, ...]


def coverage_recoveries(
    reference_lines: Sequence[LinkBudgetLine],
    redcap_lines: Mapping[str, Sequence[LinkBudgetLine]] | Sequence[LinkBudgetLine],
    rate_mode: RateMode = RateMode.PER_SLOT,
    warnings: Sequence[EvaluationWarning] = (),
) -> CoverageReport:
    """Build a coverage report from evaluated reference and RedCap budget lines."""
    if not reference_lines:
        raise ConfigurationError("reference line list must be non-empty")
    if isinstance(redcap_lines, Mapping):
        by_profile = {label: tuple(lines) for label, lines in redcap_lines.items()}
    else:
        lines = tuple(redcap_lines)
        by_profile = {lines[0].profile: lines} if lines else {}

    scenario = reference_lines[0].scenario
    for line in list(reference_lines) + [l for ls in by_profile.values() for l in ls]:
        if line.scenario != scenario:
            raise ConfigurationError(
                f"scenario mismatch: expected {scenario}, got {line.scenario} "
                f"({line.profile}/{line.channel.value})"
            )

    bottleneck = find_bottleneck(reference_lines)
    threshold = bottleneck.mil_db
    label_rank = {label: rank for rank, label in enumerate(by_profile)}
    entries = [
        RecoveryEntry(line.profile, line.channel, threshold - line.mil_db)
        for lines in by_profile.values()
        for line in lines
        if threshold - line.mil_db > 0.0
    ]
    entries.sort(
        key=lambda e: (-e.recovery_db, label_rank[e.profile], CHANNEL_RANK[e.channel])
    )

    all_warnings = tuple(warnings)
    if bottleneck.ties:
        tie_names = ", ".join(c.value for c in bottleneck.ties)
        all_warnings += (
            EvaluationWarning(
                code="bottleneck_tie",
                message=(
                    f"bottleneck MIL is tied between {bottleneck.channel.value} "
                    f"and {tie_names}; kept {bottleneck.channel.value} (channel order)"
                ),
                channel=bottleneck.channel.value,
            ),
        )

    return CoverageReport(
        scenario=scenario,
        rate_mode=rate_mode,
        reference_lines=tuple(reference_lines),
        redcap_lines=by_profile,
        threshold_mil_db=threshold,
        bottleneck_channel=bottleneck.channel,
        bottleneck_ties=bottleneck.ties,
        recoveries=tuple(entries),
        warnings=all_warnings,
    )


@dataclass(frozen=True)
class WhatIfResult:
    """Outcome of re-evaluating a data channel with an alternative allocation."""

    report: CoverageReport
    tbs_bits: int
    achieved_rate_bps: float


class Evaluator:
    """Runs link-budget evaluations over a loaded dataset bundle."""

    def __init__(self, bundle: "Bundle", tbs_table: Optional[Sequence[int]] = None):
        self._bundle = bundle
        self._tbs_table = tbs_table

    def _scenario(self, name: str) -> Scenario:
        try:
            return self._bundle.scenarios[name]
        except KeyError:
            raise ConfigurationError(f"unknown scenario {name!r}") from None

    def _profile(self, scenario_name: str, label: str) -> UeProfile:
        try:
            return self._bundle.profiles[scenario_name][label]
        except KeyError:
            raise ConfigurationError(
                f"unknown profile {label!r} for scenario {scenario_name!r}"
            ) from None

    def required_sinr(self, scenario_name: str, profile_label: str, channel: Channel) -> float:
        key = (scenario_name, profile_label, channel)
        try:
            return self._bundle.sinr[key]
        except KeyError:
            raise SinrLookupError(
                f"no required-SINR entry for ({scenario_name}, {profile_label}, "
                f"{channel.value})"
            ) from None

    def _allocation(
        self,
        scenario: Scenario,
        channel: Channel,
        profile_label: str,
        overrides: Optional[Mapping[Channel, TbsInput]],
    ) -> ChannelAllocation:
        alloc = self._bundle.allocation_for(scenario.name, channel, profile_label)
        if overrides and channel in overrides:
            new_input = overrides[channel]
            alloc = replace(
                alloc,
                n_prb=new_input.n_prb,
                occupied_bw_hz=new_input.n_prb * prb_bandwidth_hz(scenario.numerology),
                n_symbols=new_input.n_symbols,
                tbs_input=new_input,
            )
        return alloc

    def evaluate_lines(
        self,
        scenario_name: str,
        profile_label: str,
        rate_mode: RateMode = RateMode.PER_SLOT,
        overrides: Optional[Mapping[Channel, TbsInput]] = None,
    ) -> tuple[tuple[LinkBudgetLine, ...], tuple[EvaluationWarning, ...]]:
        """Evaluate every allocated channel for one profile, with rate checks."""
        scenario = self._scenario(scenario_name)
        profile = self._profile(scenario_name, profile_label)
        dl_fraction, ul_fraction = scenario.duty
        lines = []
        warnings = []
        for channel in self._bundle.channels_for(scenario_name):
            alloc = self._allocation(scenario, channel, profile_label, overrides)
            sinr = self.required_sinr(scenario_name, profile_label, channel)
            lines.append(evaluate_channel(scenario, profile, alloc, sinr))
            if alloc.tbs_input is None or alloc.target_rate_bps is None:
                continue
            fraction = dl_fraction if alloc.direction is Direction.DL else ul_fraction
            rate = achieved_rate_bps(
                tbs(alloc.tbs_input, self._tbs_table),
                scenario.numerology,
                fraction,
                rate_mode,
            )
            if rate < alloc.target_rate_bps:
                warnings.append(
                    EvaluationWarning(
                        code="rate_below_target",
                        message=(
                            f"{scenario_name}/{profile_label}/{channel.value}: achieved "
                            f"{rate / 1e6:.3f} Mbps ({rate_mode.value}) is below the "
                            f"{alloc.target_rate_bps / 1e6:.3f} Mbps target"
                        ),
                        channel=channel.value,
                        profile=profile_label,
                    )
                )
        return tuple(lines), tuple(warnings)

    def build_report(
        self,
        scenario_name: str,
        profile_labels: str | Sequence[str],
        rate_mode: RateMode = RateMode.PER_SLOT,
        overrides: Optional[Mapping[Channel, TbsInput]] = None,
    ) -> CoverageReport:
        """Coverage report for one or more device profiles against the reference.

        Allocation overrides apply to the RedCap evaluations only; the
        reference threshold is always computed from the unmodified dataset.
        """
        if isinstance(profile_labels, str):
            profile_labels = (profile_labels,)
        reference_lines, warnings = self.evaluate_lines(
            scenario_name, REFERENCE_LABEL, rate_mode
        )
        redcap: dict[str, tuple[LinkBudgetLine, ...]] = {}
        all_warnings = list(warnings)
        for label in profile_labels:
            if label == REFERENCE_LABEL:
                continue
            lines, label_warnings = self.evaluate_lines(
                scenario_name, label, rate_mode, overrides
            )
            redcap[label] = lines
            all_warnings.extend(label_warnings)
        return coverage_recoveries(reference_lines, redcap, rate_mode, all_warnings)

    def what_if_rate_reduction(
        self,
        report: CoverageReport,
        channel: Channel,
        new_tbs_input: TbsInput,
    ) -> WhatIfResult:
        """Re-evaluate one data channel with an alternative allocation/MCS.

        The channel's required SINR is kept at its dataset value, so on the
        uplink a narrower allocation raises MIL through the thermal-noise term
        while on the downlink MIL is unchanged (spectral-density power split).
        """
        if channel not in DATA_CHANNELS:
            raise UnsupportedOperationError(
                f"{channel.value} is not a data channel; only "
                f"{'/'.join(c.value for c in DATA_CHANNELS)} support rate what-ifs"
            )
        scenario = self._scenario(report.scenario)
        labels = tuple(report.redcap_lines)
        probe_label = labels[0] if labels else REFERENCE_LABEL
        base = self._bundle.allocation_for(report.scenario, channel, probe_label)
        if base.tbs_input is None:
            raise UnsupportedOperationError(
                f"{channel.value} carries no transport-block configuration"
            )
        new_report = self.build_report(
            report.scenario, labels, report.rate_mode, overrides={channel: new_tbs_input}
        )
        tbs_bits = tbs(new_tbs_input, self._tbs_table)
        dl_fraction, ul_fraction = scenario.duty
        fraction = (
            dl_fraction
            if base.direction is Direction.DL
            else ul_fraction
        )
        rate = achieved_rate_bps(tbs_bits, scenario.numerology, fraction, report.rate_mode)
        return WhatIfResult(report=new_report, tbs_bits=tbs_bits, achieved_rate_bps=rate)
