"""Coverage-report documents and their output formats.

Three formats are supported:

* ``machine-structured``  - JSON at full float precision; round-trips exactly
* ``human-table``         - fixed-width text at 0.01 dB resolution
* ``delimited-plot-data`` - CSV rows (scenario, profile, channel, mil_db)
                            suitable for bar charts

Warnings raised during evaluation appear in every format. Recovery values
below 0.05 dB are displayed as zero in the human table; raw values are always
preserved in the machine format.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from typing import Callable

from .analysis import CoverageReport
from .model import CHANNEL_RANK

SCHEMA_VERSION = 1
FIXED_TIMESTAMP = "1970-01-01T00:00:00+00:00"

# Recoveries smaller than this display as 0.00 in human output (display only).
DISPLAY_RECOVERY_FLOOR_DB = 0.05


def current_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class ReportLine:
    profile: str
    channel: str
    direction: str
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


@dataclass(frozen=True)
class ReportRecovery:
    profile: str
    channel: str
    recovery_db: float


@dataclass(frozen=True)
class ReportWarning:
    code: str
    message: str
    channel: str = ""
    profile: str = ""


@dataclass(frozen=True)
class ReportDocument:
    """Serializable coverage report for one scenario and one evaluated profile set."""

    schema_version: int
    scenario: str
    profile: str
    rate_mode: str
    generated_at: str
    threshold_mil_db: float
    bottleneck_channel: str
    bottleneck_mil_db: float
    bottleneck_ties: tuple[str, ...]
    lines: tuple[ReportLine, ...]
    recoveries: tuple[ReportRecovery, ...]
    warnings: tuple[ReportWarning, ...]


def document_from_report(report: CoverageReport, generated_at: str) -> ReportDocument:
    """Flatten a coverage report into its serializable document."""
    lines = []
    for line in report.reference_lines:
        lines.append(_report_line(line))
    for label_lines in report.redcap_lines.values():
        for line in label_lines:
            lines.append(_report_line(line))
    labels = tuple(report.redcap_lines)
    profile = "+".join(labels) if labels else "Reference"
    return ReportDocument(
        schema_version=SCHEMA_VERSION,
        scenario=report.scenario,
        profile=profile,
        rate_mode=report.rate_mode.value,
        generated_at=generated_at,
        threshold_mil_db=report.threshold_mil_db,
        bottleneck_channel=report.bottleneck_channel.value,
        bottleneck_mil_db=report.threshold_mil_db,
        bottleneck_ties=tuple(c.value for c in report.bottleneck_ties),
        lines=tuple(lines),
        recoveries=tuple(
            ReportRecovery(r.profile, r.channel.value, r.recovery_db)
            for r in report.recoveries
        ),
        warnings=tuple(
            ReportWarning(w.code, w.message, w.channel, w.profile) for w in report.warnings
        ),
    )


def _report_line(line) -> ReportLine:
    return ReportLine(
        profile=line.profile,
        channel=line.channel.value,
        direction=line.direction.value,
        occupied_bw_hz=line.occupied_bw_hz,
        tx_power_dbm=line.tx_power_dbm,
        tx_antenna_gain_db=line.tx_antenna_gain_db,
        rx_antenna_gain_db=line.rx_antenna_gain_db,
        rx_noise_figure_db=line.rx_noise_figure_db,
        thermal_noise_dbm=line.thermal_noise_dbm,
        required_sinr_db=line.required_sinr_db,
        antenna_efficiency_loss_db=line.antenna_efficiency_loss_db,
        mil_db=line.mil_db,
        mcl_db=line.mcl_db,
    )


def emit_json(document: ReportDocument) -> str:
    """Machine-structured output; full precision, byte-deterministic."""
    return json.dumps(asdict(document), sort_keys=True, indent=2) + "\n"


def parse_json(text: str) -> ReportDocument:
    """Inverse of :func:`emit_json`."""
    raw = json.loads(text)
    return ReportDocument(
        schema_version=raw["schema_version"],
        scenario=raw["scenario"],
        profile=raw["profile"],
        rate_mode=raw["rate_mode"],
        generated_at=raw["generated_at"],
        threshold_mil_db=raw["threshold_mil_db"],
        bottleneck_channel=raw["bottleneck_channel"],
        bottleneck_mil_db=raw["bottleneck_mil_db"],
        bottleneck_ties=tuple(raw["bottleneck_ties"]),
        lines=tuple(ReportLine(**line) for line in raw["lines"]),
        recoveries=tuple(ReportRecovery(**r) for r in raw["recoveries"]),
        warnings=tuple(ReportWarning(**w) for w in raw["warnings"]),
    )


def _profiles_in_order(document: ReportDocument) -> list[str]:
    seen: list[str] = []
    for line in document.lines:
        if line.profile not in seen:
            seen.append(line.profile)
    return seen


def _channels_in_order(document: ReportDocument) -> list[str]:
    seen = {line.channel for line in document.lines}
    order = {channel.value: rank for channel, rank in CHANNEL_RANK.items()}
    return sorted(seen, key=lambda name: order.get(name, len(order)))


def emit_human(document: ReportDocument) -> str:
    """Fixed-width table; channels in report order, 0.01 dB resolution."""
    profiles = _profiles_in_order(document)
    channels = _channels_in_order(document)
    mil = {(l.profile, l.channel): l.mil_db for l in document.lines}
    mcl = {(l.profile, l.channel): l.mcl_db for l in document.lines}
    recovery = {(r.profile, r.channel): r.recovery_db for r in document.recoveries}

    out = [
        f"coverage report: scenario {document.scenario}, profile {document.profile}",
        f"rate mode: {document.rate_mode}; generated at {document.generated_at}",
        (
            f"threshold MIL {document.threshold_mil_db:.2f} dB "
            f"(bottleneck {document.bottleneck_channel}, reference UE)"
        ),
        "",
    ]

    header = f"{'channel':<10}{'dir':<5}"
    for profile in profiles:
        header += f"{'MIL[' + profile + ']':>18}{'MCL[' + profile + ']':>18}"
    header += f"{'recovery':>10}"
    out.append(header)
    direction = {l.channel: l.direction for l in document.lines}
    for channel in channels:
        row = f"{channel:<10}{direction[channel]:<5}"
        for profile in profiles:
            key = (profile, channel)
            if key in mil:
                row += f"{mil[key]:>18.2f}{mcl[key]:>18.2f}"
            else:
                row += f"{'-':>18}{'-':>18}"
        gaps = [recovery[(p, channel)] for p in profiles if (p, channel) in recovery]
        if gaps:
            shown = max(gaps)
            shown = 0.0 if shown < DISPLAY_RECOVERY_FLOOR_DB else shown
            row += f"{shown:>10.2f}"
        else:
            row += f"{'-':>10}"
        out.append(row)

    out.append("")
    if document.recoveries:
        out.append("coverage recovery needed:")
        for entry in document.recoveries:
            shown = (
                0.0
                if entry.recovery_db < DISPLAY_RECOVERY_FLOOR_DB
                else entry.recovery_db
            )
            out.append(f"  {entry.channel} ({entry.profile}): {shown:.2f} dB")
    else:
        out.append("no coverage recovery needed")

    if document.warnings:
        out.append("")
        out.append("warnings:")
        for warning in document.warnings:
            out.append(f"  [{warning.code}] {warning.message}")
    return "\n".join(out) + "\n"


def emit_plot_csv(document: ReportDocument) -> str:
    """One row per (profile, channel, MIL); warnings appended as comments."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["scenario", "profile", "channel", "mil_db"])
    for line in document.lines:
        writer.writerow([document.scenario, line.profile, line.channel, f"{line.mil_db:.2f}"])
    for warning in document.warnings:
        out.write(f"# warning: [{warning.code}] {warning.message}\n")
    return out.getvalue()


FORMATS: dict[str, Callable[[ReportDocument], str]] = {
    "machine-structured": emit_json,
    "human-table": emit_human,
    "delimited-plot-data": emit_plot_csv,
}
