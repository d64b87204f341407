"""Dataset-bundle ingestion and canonical serialization.

A bundle directory holds one TOML document per scenario (schema-versioned with
a ``schema = 1`` header) describing the deployment, its UE profiles and its
channel allocations, plus:

* ``sinr.csv``        - required-SINR table, header ``scenario,profile,channel,sinr_db``
* ``calibration.toml``- fitted antenna gains and noise figures per scenario
* ``targets.toml``    - calibration-fit targets (used by the maintenance command)

Loading is not fail-fast: every problem found is collected into one
:class:`~redcap_coverage.errors.BundleError`. Serializers emit the canonical
spelling, so for canonical files ``serialize(parse(file))`` is byte-identical.
"""

from __future__ import annotations

import csv
import io
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import BundleError, ConfigurationError
from .model import (
    CHANNEL_RANK,
    SCENARIO_NAMES,
    Channel,
    ChannelAllocation,
    Direction,
    Duplex,
    Scenario,
    SinrRequirement,
    UeProfile,
    validate_dataset,
)
from .numerology import Numerology, format_tdd_pattern, parse_tdd_pattern, prb_bandwidth_hz
from .transport import MCS_TABLES, McsEntry, TbsInput

SCHEMA_VERSION = 1

CALIBRATION_FILE = "calibration.toml"
TARGETS_FILE = "targets.toml"
SINR_FILE = "sinr.csv"
_NON_SCENARIO_TOML = (CALIBRATION_FILE, TARGETS_FILE)

SINR_HEADER = ("scenario", "profile", "channel", "sinr_db")


def bundled_dataset_path() -> Path:
    """Location of the dataset shipped with the package."""
    return Path(__file__).parent / "data" / "bundle"


@dataclass(frozen=True)
class CalibrationEntry:
    """Budget-side gains and noise figures for one scenario (fitted values)."""

    gnb_antenna_gain_db: float
    ue_antenna_gain_db: float
    gnb_noise_figure_db: float
    ue_noise_figure_db: float


@dataclass
class Bundle:
    """Validated, immutable-after-load dataset ready for evaluation."""

    scenarios: dict[str, Scenario]
    profiles: dict[str, dict[str, UeProfile]]
    allocations: dict[str, tuple[ChannelAllocation, ...]]
    sinr_entries: tuple[SinrRequirement, ...]
    calibration: dict[str, CalibrationEntry]
    sinr: dict[tuple[str, str, Channel], float] = field(init=False)

    def __post_init__(self) -> None:
        self.sinr = {
            (e.scenario, e.profile, e.channel): e.required_sinr_db for e in self.sinr_entries
        }

    def channels_for(self, scenario_name: str) -> tuple[Channel, ...]:
        seen: list[Channel] = []
        for alloc in self.allocations.get(scenario_name, ()):
            if alloc.channel not in seen:
                seen.append(alloc.channel)
        return tuple(sorted(seen, key=CHANNEL_RANK.__getitem__))

    def allocation_for(
        self, scenario_name: str, channel: Channel, profile_label: str
    ) -> ChannelAllocation:
        matches = [
            a
            for a in self.allocations.get(scenario_name, ())
            if a.channel is channel and a.applies_to(profile_label)
        ]
        if len(matches) != 1:
            raise ConfigurationError(
                f"{scenario_name}/{profile_label}/{channel.value}: expected exactly one "
                f"applicable allocation, found {len(matches)}"
            )
        return matches[0]

    def validate(self) -> list[str]:
        return validate_dataset(
            list(self.scenarios.values()),
            {name: list(profs.values()) for name, profs in self.profiles.items()},
            self.allocations,
            self.sinr_entries,
        )


class _Problems:
    """Collects load problems instead of failing fast."""

    def __init__(self) -> None:
        self.items: list[str] = []

    def add(self, message: str) -> None:
        self.items.append(message)

    def require(self, table: Mapping, key: str, kind: type | tuple, context: str):
        if key not in table:
            self.add(f"{context}: missing required field {key!r}")
            return None
        value = table[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, kind) or isinstance(value, bool):
            expected = kind.__name__ if isinstance(kind, type) else "/".join(
                k.__name__ for k in kind
            )
            self.add(f"{context}: field {key!r} must be {expected}")
            return None
        return value


def _check_schema(document: Mapping, context: str, problems: _Problems) -> bool:
    version = document.get("schema")
    if version != SCHEMA_VERSION:
        problems.add(f"{context}: unknown schema version {version!r} (expected {SCHEMA_VERSION})")
        return False
    return True


def _parse_profile(table: Mapping, context: str, problems: _Problems) -> Optional[UeProfile]:
    label = problems.require(table, "label", str, context)
    max_bw = problems.require(table, "max_bw_hz", float, context)
    rx = problems.require(table, "rx_branches", int, context)
    tx = problems.require(table, "tx_branches", int, context)
    loss = problems.require(table, "antenna_efficiency_loss_db", float, context)
    if None in (label, max_bw, rx, tx, loss):
        return None
    try:
        return UeProfile(label, max_bw, rx, tx, loss)
    except ConfigurationError as exc:
        problems.add(f"{context}: {exc}")
        return None


def _parse_tbs_config(
    table: Mapping,
    n_prb: Optional[int],
    n_symbols: int,
    context: str,
    problems: _Problems,
    mcs_tables: Mapping[str, Sequence[McsEntry]],
) -> tuple[Optional[TbsInput], Optional[str]]:
    table_name = problems.require(table, "mcs_table", str, context)
    mcs_index = problems.require(table, "mcs_index", int, context)
    dmrs_symbols = problems.require(table, "dmrs_symbols", int, context)
    scaling = table.get("scaling", 1.0)
    layers = table.get("layers", 1)
    overhead = table.get("overhead_re_per_prb", 0)
    if None in (table_name, mcs_index, dmrs_symbols):
        return None, None
    if table_name not in mcs_tables:
        problems.add(f"{context}: unknown MCS table {table_name!r}")
        return None, None
    entries = mcs_tables[table_name]
    if not 0 <= mcs_index < len(entries):
        problems.add(f"{context}: MCS index {mcs_index} outside table {table_name!r}")
        return None, None
    if n_prb is None:
        problems.add(f"{context}: transport-block sizing requires n_prb")
        return None, None
    try:
        tbs_input = TbsInput(
            n_prb=n_prb,
            n_symbols=n_symbols,
            dmrs_re_per_prb=12 * int(dmrs_symbols),
            mcs=entries[mcs_index],
            overhead_re_per_prb=int(overhead),
            scaling=float(scaling),
            layers=int(layers),
        )
    except ConfigurationError as exc:
        problems.add(f"{context}: {exc}")
        return None, None
    return tbs_input, table_name


def _parse_allocation(
    table: Mapping,
    numerology: Numerology,
    context: str,
    problems: _Problems,
    mcs_tables: Mapping[str, Sequence[McsEntry]],
) -> Optional[ChannelAllocation]:
    channel_name = problems.require(table, "channel", str, context)
    direction_name = problems.require(table, "direction", str, context)
    n_symbols = problems.require(table, "n_symbols", int, context)
    target = problems.require(table, "performance_target", str, context)
    if None in (channel_name, direction_name, n_symbols, target):
        return None
    try:
        channel = Channel(channel_name)
    except ValueError:
        problems.add(f"{context}: unknown channel {channel_name!r}")
        return None
    try:
        direction = Direction(direction_name)
    except ValueError:
        problems.add(f"{context}: direction must be DL or UL, got {direction_name!r}")
        return None

    n_prb = table.get("n_prb")
    explicit_bw = table.get("occupied_bw_hz")
    if (n_prb is None) == (explicit_bw is None):
        problems.add(f"{context}: exactly one of n_prb / occupied_bw_hz is required")
        return None
    if n_prb is not None:
        occupied = n_prb * prb_bandwidth_hz(numerology)
    else:
        occupied = float(explicit_bw)

    tbs_input = None
    table_name = None
    if "tbs" in table:
        tbs_input, table_name = _parse_tbs_config(
            table["tbs"], n_prb, n_symbols, f"{context}/tbs", problems, mcs_tables
        )
        if tbs_input is None:
            return None

    profiles = tuple(table.get("profiles", ()))
    target_rate = table.get("target_rate_bps")
    try:
        return ChannelAllocation(
            channel=channel,
            direction=direction,
            occupied_bw_hz=occupied,
            n_symbols=n_symbols,
            performance_target=target,
            n_prb=n_prb,
            tbs_input=tbs_input,
            mcs_table_name=table_name,
            target_rate_bps=float(target_rate) if target_rate is not None else None,
            profiles=profiles,
        )
    except ConfigurationError as exc:
        problems.add(f"{context}: {exc}")
        return None


def parse_scenario_document(
    text: str,
    source: str = "<string>",
    mcs_tables: Optional[Mapping[str, Sequence[McsEntry]]] = None,
) -> tuple[Optional[Scenario], list[UeProfile], list[ChannelAllocation], list[str]]:
    """Parse one scenario TOML document; returns (scenario, profiles, allocations, problems).

    The returned scenario carries zeroed antenna gains and noise figures;
    calibration values are merged in by :func:`load_bundle`.
    """
    problems = _Problems()
    tables = mcs_tables if mcs_tables is not None else MCS_TABLES
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        return None, [], [], [f"{source}: TOML parse error: {exc}"]
    if not _check_schema(document, source, problems):
        return None, [], [], problems.items

    head = document.get("scenario")
    if not isinstance(head, dict):
        problems.add(f"{source}: missing [scenario] table")
        return None, [], [], problems.items

    context = source
    name = problems.require(head, "name", str, context)
    carrier = problems.require(head, "carrier_hz", float, context)
    duplex_name = problems.require(head, "duplex", str, context)
    carrier_bw = problems.require(head, "carrier_bw_hz", float, context)
    scs = problems.require(head, "scs_khz", int, context)
    gnb_power = problems.require(head, "gnb_power_dbm", float, context)
    txru = problems.require(head, "gnb_txru_count", int, context)
    gnb_rx = problems.require(head, "gnb_rx_chains", int, context)
    ue_power = problems.require(head, "ue_power_dbm", float, context)
    if None in (name, carrier, duplex_name, carrier_bw, scs, gnb_power, txru, gnb_rx, ue_power):
        return None, [], [], problems.items

    try:
        duplex = Duplex(duplex_name)
    except ValueError:
        problems.add(f"{source}: duplex must be FDD or TDD, got {duplex_name!r}")
        return None, [], [], problems.items

    pattern = None
    if duplex is Duplex.TDD:
        pattern_text = problems.require(head, "tdd_pattern", str, context)
        if pattern_text is None:
            return None, [], [], problems.items
        try:
            pattern = parse_tdd_pattern(pattern_text)
        except ConfigurationError as exc:
            problems.add(f"{source}: {exc}")
            return None, [], [], problems.items
    elif "tdd_pattern" in head:
        problems.add(f"{source}: FDD scenarios must not carry a tdd_pattern")
        return None, [], [], problems.items

    try:
        numerology = Numerology(scs)
        scenario = Scenario(
            name=name,
            carrier_hz=carrier,
            duplex=duplex,
            tdd_pattern=pattern,
            carrier_bw_hz=carrier_bw,
            numerology=numerology,
            gnb_power_dbm=gnb_power,
            gnb_txru_count=txru,
            gnb_rx_chains=gnb_rx,
            ue_power_dbm=ue_power,
            gnb_antenna_gain_db=0.0,
            ue_antenna_gain_db=0.0,
            gnb_noise_figure_db=0.0,
            ue_noise_figure_db=0.0,
        )
    except ConfigurationError as exc:
        problems.add(f"{source}: {exc}")
        return None, [], [], problems.items

    profiles = []
    for position, entry in enumerate(document.get("profile", ()), start=1):
        profile = _parse_profile(entry, f"{source}/profile#{position}", problems)
        if profile is not None:
            profiles.append(profile)
    if not profiles:
        problems.add(f"{source}: no [[profile]] entries")

    allocations = []
    for position, entry in enumerate(document.get("allocation", ()), start=1):
        alloc = _parse_allocation(
            entry, scenario.numerology, f"{source}/allocation#{position}", problems, tables
        )
        if alloc is not None:
            allocations.append(alloc)
    if not allocations:
        problems.add(f"{source}: no [[allocation]] entries")

    return scenario, profiles, allocations, problems.items


def parse_calibration(text: str, source: str = CALIBRATION_FILE) -> tuple[
    dict[str, CalibrationEntry], list[str]
]:
    problems = _Problems()
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        return {}, [f"{source}: TOML parse error: {exc}"]
    if not _check_schema(document, source, problems):
        return {}, problems.items
    entries: dict[str, CalibrationEntry] = {}
    for name, table in document.items():
        if name == "schema":
            continue
        if not isinstance(table, dict):
            problems.add(f"{source}: [{name}] must be a table")
            continue
        context = f"{source}/[{name}]"
        gnb_gain = problems.require(table, "gnb_antenna_gain_db", float, context)
        ue_gain = problems.require(table, "ue_antenna_gain_db", float, context)
        gnb_nf = problems.require(table, "gnb_noise_figure_db", float, context)
        ue_nf = problems.require(table, "ue_noise_figure_db", float, context)
        if None in (gnb_gain, ue_gain, gnb_nf, ue_nf):
            continue
        entries[name] = CalibrationEntry(gnb_gain, ue_gain, gnb_nf, ue_nf)
    return entries, problems.items


def parse_sinr_csv(text: str, source: str = SINR_FILE) -> tuple[
    list[SinrRequirement], list[str]
]:
    problems = _Problems()
    entries: list[SinrRequirement] = []
    seen: dict[tuple[str, str, Channel], int] = {}
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows or tuple(rows[0]) != SINR_HEADER:
        problems.add(f"{source}: header row must be {','.join(SINR_HEADER)}")
        return [], problems.items
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            problems.add(f"{source}:{line_no}: expected 4 fields, got {len(row)}")
            continue
        scenario, profile, channel_name, sinr_text = row
        try:
            channel = Channel(channel_name)
        except ValueError:
            problems.add(f"{source}:{line_no}: unknown channel {channel_name!r}")
            continue
        try:
            sinr = float(sinr_text)
        except ValueError:
            problems.add(f"{source}:{line_no}: sinr_db must be a number, got {sinr_text!r}")
            continue
        key = (scenario, profile, channel)
        if key in seen:
            problems.add(
                f"{source}:{line_no}: duplicate SINR row for ({scenario}, {profile}, "
                f"{channel.value}); first seen on line {seen[key]}"
            )
            continue
        seen[key] = line_no
        entries.append(SinrRequirement(scenario, profile, channel, sinr))
    return entries, problems.items


def _scenario_sort_key(name: str) -> tuple[int, str]:
    try:
        return (SCENARIO_NAMES.index(name), name)
    except ValueError:
        return (len(SCENARIO_NAMES), name)


def load_bundle(
    path: Path | str,
    mcs_tables: Optional[Mapping[str, Sequence[McsEntry]]] = None,
) -> Bundle:
    """Load and assemble a bundle directory, raising BundleError with every problem."""
    root = Path(path)
    if not root.is_dir():
        raise BundleError([f"bundle path {root} is not a directory"])
    problems: list[str] = []

    scenario_files = sorted(
        p for p in root.glob("*.toml") if p.name not in _NON_SCENARIO_TOML
    )
    if not scenario_files:
        problems.append(f"no scenario documents found in {root} (*.toml)")

    scenarios: dict[str, Scenario] = {}
    profiles: dict[str, dict[str, UeProfile]] = {}
    allocations: dict[str, tuple[ChannelAllocation, ...]] = {}
    for file in scenario_files:
        scenario, profs, allocs, file_problems = parse_scenario_document(
            file.read_text(encoding="utf-8"), source=file.name, mcs_tables=mcs_tables
        )
        problems.extend(file_problems)
        if scenario is None:
            continue
        if scenario.name in scenarios:
            problems.append(f"{file.name}: duplicate scenario {scenario.name!r}")
            continue
        scenarios[scenario.name] = scenario
        label_map: dict[str, UeProfile] = {}
        for profile in profs:
            if profile.label in label_map:
                problems.append(f"{file.name}: duplicate profile {profile.label!r}")
                continue
            label_map[profile.label] = profile
        profiles[scenario.name] = label_map
        allocations[scenario.name] = tuple(allocs)

    calibration: dict[str, CalibrationEntry] = {}
    calibration_path = root / CALIBRATION_FILE
    if calibration_path.exists():
        calibration, calibration_problems = parse_calibration(
            calibration_path.read_text(encoding="utf-8")
        )
        problems.extend(calibration_problems)
    else:
        problems.append(f"{CALIBRATION_FILE} not found in {root}")

    sinr_entries: list[SinrRequirement] = []
    sinr_path = root / SINR_FILE
    if sinr_path.exists():
        sinr_entries, sinr_problems = parse_sinr_csv(sinr_path.read_text(encoding="utf-8"))
        problems.extend(sinr_problems)
    else:
        problems.append(f"{SINR_FILE} not found in {root}")

    for name in scenarios:
        if name not in calibration:
            problems.append(f"{CALIBRATION_FILE}: no entry for scenario {name!r}")
    if problems:
        raise BundleError(problems)

    ordered = sorted(scenarios, key=_scenario_sort_key)
    calibrated = {}
    for name in ordered:
        entry = calibration[name]
        calibrated[name] = replace(
            scenarios[name],
            gnb_antenna_gain_db=entry.gnb_antenna_gain_db,
            ue_antenna_gain_db=entry.ue_antenna_gain_db,
            gnb_noise_figure_db=entry.gnb_noise_figure_db,
            ue_noise_figure_db=entry.ue_noise_figure_db,
        )
    return Bundle(
        scenarios=calibrated,
        profiles={name: profiles[name] for name in ordered},
        allocations={name: allocations[name] for name in ordered},
        sinr_entries=tuple(sinr_entries),
        calibration={name: calibration[name] for name in ordered},
    )


# --- canonical serialization -------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        raise ConfigurationError("boolean values have no canonical spelling here")
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise ConfigurationError(f"cannot serialize value of type {type(value).__name__}")


def _kv(key: str, value) -> str:
    return f"{key} = {_fmt(value)}"


def serialize_scenario_document(
    scenario: Scenario,
    profiles: Sequence[UeProfile],
    allocations: Sequence[ChannelAllocation],
) -> str:
    """Canonical TOML for one scenario document (gains/NFs live in calibration)."""
    lines = [f"schema = {SCHEMA_VERSION}", "", "[scenario]"]
    lines.append(_kv("name", scenario.name))
    lines.append(_kv("carrier_hz", float(scenario.carrier_hz)))
    lines.append(_kv("duplex", scenario.duplex.value))
    if scenario.tdd_pattern is not None:
        lines.append(_kv("tdd_pattern", format_tdd_pattern(scenario.tdd_pattern)))
    lines.append(_kv("carrier_bw_hz", float(scenario.carrier_bw_hz)))
    lines.append(_kv("scs_khz", scenario.numerology.scs_khz))
    lines.append(_kv("gnb_power_dbm", float(scenario.gnb_power_dbm)))
    lines.append(_kv("gnb_txru_count", scenario.gnb_txru_count))
    lines.append(_kv("gnb_rx_chains", scenario.gnb_rx_chains))
    lines.append(_kv("ue_power_dbm", float(scenario.ue_power_dbm)))

    for profile in profiles:
        lines += ["", "[[profile]]"]
        lines.append(_kv("label", profile.label))
        lines.append(_kv("max_bw_hz", float(profile.max_bw_hz)))
        lines.append(_kv("rx_branches", profile.rx_branches))
        lines.append(_kv("tx_branches", profile.tx_branches))
        lines.append(_kv("antenna_efficiency_loss_db", float(profile.antenna_efficiency_loss_db)))

    for alloc in allocations:
        lines += ["", "[[allocation]]"]
        lines.append(_kv("channel", alloc.channel.value))
        lines.append(_kv("direction", alloc.direction.value))
        if alloc.profiles:
            lines.append(_kv("profiles", list(alloc.profiles)))
        if alloc.n_prb is not None:
            lines.append(_kv("n_prb", alloc.n_prb))
        else:
            lines.append(_kv("occupied_bw_hz", float(alloc.occupied_bw_hz)))
        lines.append(_kv("n_symbols", alloc.n_symbols))
        lines.append(_kv("performance_target", alloc.performance_target))
        if alloc.tbs_input is not None:
            tbs_input = alloc.tbs_input
            parts = [
                _kv("mcs_table", alloc.mcs_table_name or ""),
                _kv("mcs_index", tbs_input.mcs.index),
                _kv("dmrs_symbols", tbs_input.dmrs_re_per_prb // 12),
            ]
            if tbs_input.overhead_re_per_prb:
                parts.append(_kv("overhead_re_per_prb", tbs_input.overhead_re_per_prb))
            parts.append(_kv("scaling", float(tbs_input.scaling)))
            parts.append(_kv("layers", tbs_input.layers))
            lines.append("tbs = { " + ", ".join(parts) + " }")
        if alloc.target_rate_bps is not None:
            lines.append(_kv("target_rate_bps", float(alloc.target_rate_bps)))

    return "\n".join(lines) + "\n"


def serialize_calibration(entries: Mapping[str, CalibrationEntry]) -> str:
    """Canonical TOML for the calibration file."""
    lines = [f"schema = {SCHEMA_VERSION}"]
    for name in sorted(entries, key=_scenario_sort_key):
        entry = entries[name]
        lines += ["", f"[{name}]"]
        lines.append(_kv("gnb_antenna_gain_db", float(entry.gnb_antenna_gain_db)))
        lines.append(_kv("ue_antenna_gain_db", float(entry.ue_antenna_gain_db)))
        lines.append(_kv("gnb_noise_figure_db", float(entry.gnb_noise_figure_db)))
        lines.append(_kv("ue_noise_figure_db", float(entry.ue_noise_figure_db)))
    return "\n".join(lines) + "\n"


def serialize_sinr_csv(entries: Sequence[SinrRequirement]) -> str:
    """Canonical CSV for the required-SINR table (input order preserved)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SINR_HEADER)
    for entry in entries:
        writer.writerow(
            [entry.scenario, entry.profile, entry.channel.value, repr(entry.required_sinr_db)]
        )
    return out.getvalue()
