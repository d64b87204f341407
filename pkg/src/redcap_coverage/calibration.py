"""Calibration fitting: pin budget-side gains to published coverage thresholds.

Antenna gains and noise figures are not part of the required-SINR dataset, so
the bundle ships fitted values: per scenario, the gNB aggregate antenna gain is
solved so the reference-UE bottleneck MIL lands exactly on the target
threshold. Scenarios may additionally carry a downlink anchor (a profile,
channel and recovery target) that fixes the UE noise figure, which places the
downlink budget relative to the uplink threshold. Everything else (UE antenna
gain, gNB noise figure, and the UE noise figure when not anchored) is taken
from the targets file as a stated assumption.

The fit is exact because every MIL is linear with unit coefficient in each
gain/noise-figure term, and recoveries are invariant to terms shared by both
link directions.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .analysis import Evaluator
from .bundle import Bundle, CalibrationEntry, SCHEMA_VERSION
from .errors import BundleError, ConfigurationError
from .model import Channel, REFERENCE_LABEL

FIT_TOLERANCE_DB = 1e-9


@dataclass(frozen=True)
class DlAnchor:
    """Downlink recovery target that pins the UE noise figure."""

    profile: str
    channel: Channel
    recovery_db: float


@dataclass(frozen=True)
class CalibrationTarget:
    """Per-scenario fit inputs: threshold target plus assumed fixed terms."""

    threshold_mil_db: float
    bottleneck_channel: Channel
    gnb_noise_figure_db: float
    ue_antenna_gain_db: float
    ue_noise_figure_db: Optional[float] = None
    dl_anchor: Optional[DlAnchor] = None

    def __post_init__(self) -> None:
        if (self.ue_noise_figure_db is None) == (self.dl_anchor is None):
            raise ConfigurationError(
                "exactly one of ue_noise_figure_db / dl_anchor must be given"
            )


def load_targets(path: Path | str) -> dict[str, CalibrationTarget]:
    """Parse a calibration-targets TOML file."""
    path = Path(path)
    try:
        document = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise BundleError([f"{path.name}: TOML parse error: {exc}"]) from None
    if document.get("schema") != SCHEMA_VERSION:
        raise BundleError(
            [f"{path.name}: unknown schema version {document.get('schema')!r}"]
        )
    targets: dict[str, CalibrationTarget] = {}
    for name, table in document.items():
        if name == "schema":
            continue
        if not isinstance(table, dict):
            raise BundleError([f"{path.name}: [{name}] must be a table"])
        try:
            anchor = None
            if "dl_anchor" in table:
                raw = table["dl_anchor"]
                anchor = DlAnchor(
                    profile=raw["profile"],
                    channel=Channel(raw["channel"]),
                    recovery_db=float(raw["recovery_db"]),
                )
            ue_nf = table.get("ue_noise_figure_db")
            targets[name] = CalibrationTarget(
                threshold_mil_db=float(table["threshold_mil_db"]),
                bottleneck_channel=Channel(table["bottleneck_channel"]),
                gnb_noise_figure_db=float(table["gnb_noise_figure_db"]),
                ue_antenna_gain_db=float(table["ue_antenna_gain_db"]),
                ue_noise_figure_db=float(ue_nf) if ue_nf is not None else None,
                dl_anchor=anchor,
            )
        except (KeyError, ValueError, ConfigurationError) as exc:
            raise BundleError([f"{path.name}: [{name}]: {exc}"]) from None
    return targets


def _with_calibration(bundle: Bundle, name: str, entry: CalibrationEntry) -> Bundle:
    scenarios = dict(bundle.scenarios)
    scenarios[name] = replace(
        bundle.scenarios[name],
        gnb_antenna_gain_db=entry.gnb_antenna_gain_db,
        ue_antenna_gain_db=entry.ue_antenna_gain_db,
        gnb_noise_figure_db=entry.gnb_noise_figure_db,
        ue_noise_figure_db=entry.ue_noise_figure_db,
    )
    return Bundle(
        scenarios=scenarios,
        profiles=bundle.profiles,
        allocations=bundle.allocations,
        sinr_entries=bundle.sinr_entries,
        calibration={**bundle.calibration, name: entry},
    )


def _line_mil(evaluator: Evaluator, scenario: str, profile: str, channel: Channel) -> float:
    lines, _ = evaluator.evaluate_lines(scenario, profile)
    for line in lines:
        if line.channel is channel:
            return line.mil_db
    raise ConfigurationError(f"{scenario}/{profile}: no line for channel {channel.value}")


def fit_calibration(
    bundle: Bundle, targets: Mapping[str, CalibrationTarget]
) -> dict[str, CalibrationEntry]:
    """Fit a calibration entry per scenario; exact against the stated targets.

    Raises if a target names an unknown scenario or if the fitted budget does
    not reproduce the requested bottleneck identity.
    """
    fitted: dict[str, CalibrationEntry] = {}
    for name, target in targets.items():
        if name not in bundle.scenarios:
            raise ConfigurationError(f"targets name unknown scenario {name!r}")

        probe_entry = CalibrationEntry(
            gnb_antenna_gain_db=0.0,
            ue_antenna_gain_db=target.ue_antenna_gain_db,
            gnb_noise_figure_db=target.gnb_noise_figure_db,
            ue_noise_figure_db=(
                target.ue_noise_figure_db if target.ue_noise_figure_db is not None else 0.0
            ),
        )
        probe = Evaluator(_with_calibration(bundle, name, probe_entry))

        ue_nf = probe_entry.ue_noise_figure_db
        if target.dl_anchor is not None:
            anchor = target.dl_anchor
            # Recovery is invariant to the (shared) gNB gain and linear with
            # unit slope in the UE noise figure, so one probe solves it.
            bottleneck_mil = _line_mil(probe, name, REFERENCE_LABEL, target.bottleneck_channel)
            anchor_mil = _line_mil(probe, name, anchor.profile, anchor.channel)
            ue_nf = anchor.recovery_db - (bottleneck_mil - anchor_mil)
            probe_entry = replace(probe_entry, ue_noise_figure_db=ue_nf)
            probe = Evaluator(_with_calibration(bundle, name, probe_entry))

        # The gNB gain enters every MIL with unit coefficient.
        zero_gain_mil = _line_mil(probe, name, REFERENCE_LABEL, target.bottleneck_channel)
        entry = CalibrationEntry(
            gnb_antenna_gain_db=target.threshold_mil_db - zero_gain_mil,
            ue_antenna_gain_db=target.ue_antenna_gain_db,
            gnb_noise_figure_db=target.gnb_noise_figure_db,
            ue_noise_figure_db=ue_nf,
        )

        check = Evaluator(_with_calibration(bundle, name, entry))
        lines, _ = check.evaluate_lines(name, REFERENCE_LABEL)
        lowest = min(lines, key=lambda line: line.mil_db)
        if lowest.channel is not target.bottleneck_channel:
            raise ConfigurationError(
                f"{name}: fitted budget makes {lowest.channel.value} the bottleneck, "
                f"expected {target.bottleneck_channel.value}"
            )
        if abs(lowest.mil_db - target.threshold_mil_db) > FIT_TOLERANCE_DB:
            raise ConfigurationError(
                f"{name}: fitted threshold {lowest.mil_db:.6f} dB missed the target "
                f"{target.threshold_mil_db:.6f} dB"
            )
        fitted[name] = entry
    return fitted
