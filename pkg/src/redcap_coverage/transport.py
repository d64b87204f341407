"""Transport-block sizing and achieved-data-rate computation.

Implements the TS 38.214 section 5.1.3.2 transport block size determination,
including the optional TBS scaling factor, on top of MCS tables shipped as
data files. The intermediate information-bit count is

    N_info = S * N_RE * R * Q_m * v

with scaling factor S, resource elements N_RE, code rate R, modulation order
Q_m and layer count v. HARQ combining, code-block-group signaling and
limited-buffer rate matching are out of scope.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import ConfigurationError
from .numerology import Numerology, slot_duration_s

_DATA_DIR = Path(__file__).parent / "data"

MCS_TABLE_FILES = {
    "qam64": "mcs_qam64.csv",
    "qam64_low_se": "mcs_qam64_low_se.csv",
}
TBS_TABLE_FILE = "tbs_table.csv"

ALLOWED_SCALING = (1.0, 0.5, 0.25)
RE_CAP_PER_PRB = 156
TBS_SMALL_LIMIT = 3824


@dataclass(frozen=True)
class McsEntry:
    """One MCS table row: index, modulation order Q_m, code rate as R*1024."""

    index: int
    modulation_order: int
    code_rate_x1024: float

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ConfigurationError(f"MCS index must be >= 0, got {self.index}")
        if self.modulation_order not in (2, 4, 6, 8):
            raise ConfigurationError(
                f"modulation order must be one of 2/4/6/8, got {self.modulation_order}"
            )
        if not 0.0 < self.code_rate_x1024 < 1024.0:
            raise ConfigurationError(
                f"code rate x1024 must lie in (0, 1024), got {self.code_rate_x1024}"
            )

    @property
    def code_rate(self) -> float:
        return self.code_rate_x1024 / 1024.0


def _data_rows(path: Path) -> Iterable[dict]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(line for line in handle if not line.startswith("#"))
        yield from reader


def load_mcs_table(path: Path | str) -> tuple[McsEntry, ...]:
    """Load one MCS table file (columns: index, qm, r_x1024), sorted by index."""
    entries = [
        McsEntry(int(row["index"]), int(row["qm"]), float(row["r_x1024"]))
        for row in _data_rows(Path(path))
    ]
    entries.sort(key=lambda e: e.index)
    if [e.index for e in entries] != list(range(len(entries))):
        raise ConfigurationError(f"MCS table {path} has gaps or duplicate indices")
    return tuple(entries)


def load_mcs_tables(directory: Path | str | None = None) -> dict[str, tuple[McsEntry, ...]]:
    """Load the full set of named MCS tables from a directory (default: bundled)."""
    base = Path(directory) if directory is not None else _DATA_DIR
    return {name: load_mcs_table(base / fname) for name, fname in MCS_TABLE_FILES.items()}


def load_tbs_table(path: Path | str | None = None) -> tuple[int, ...]:
    """Load the quantized TBS table (93 ascending entries up to 3824 bits)."""
    base = Path(path) if path is not None else _DATA_DIR / TBS_TABLE_FILE
    values = tuple(int(row["tbs_bits"]) for row in _data_rows(base))
    if not values or list(values) != sorted(values):
        raise ConfigurationError(f"TBS table {base} must be non-empty and ascending")
    return values


MCS_TABLES = load_mcs_tables()
TBS_TABLE = load_tbs_table()


@dataclass(frozen=True)
class TbsInput:
    """Everything needed to size one transport block."""

    n_prb: int
    n_symbols: int
    dmrs_re_per_prb: int
    mcs: McsEntry
    overhead_re_per_prb: int = 0
    scaling: float = 1.0
    layers: int = 1

    def __post_init__(self) -> None:
        if self.n_prb < 1:
            raise ConfigurationError(f"PRB count must be >= 1, got {self.n_prb}")
        if not 1 <= self.n_symbols <= 14:
            raise ConfigurationError(f"symbol count must be in [1, 14], got {self.n_symbols}")
        if self.dmrs_re_per_prb < 0 or self.overhead_re_per_prb < 0:
            raise ConfigurationError("DMRS/overhead RE counts must be >= 0")
        if self.dmrs_re_per_prb + self.overhead_re_per_prb >= 12 * self.n_symbols:
            raise ConfigurationError(
                "DMRS plus overhead REs must leave at least one data RE per PRB "
                f"({self.dmrs_re_per_prb} + {self.overhead_re_per_prb} vs "
                f"{12 * self.n_symbols} available)"
            )
        if self.scaling not in ALLOWED_SCALING:
            raise ConfigurationError(
                f"TBS scaling must be one of {ALLOWED_SCALING}, got {self.scaling}"
            )
        if self.layers < 1:
            raise ConfigurationError(f"layer count must be >= 1, got {self.layers}")


def n_re(tbs_input: TbsInput) -> int:
    """Available resource elements: per-PRB REs capped at 156, times the PRB count."""
    per_prb = 12 * tbs_input.n_symbols - tbs_input.dmrs_re_per_prb - tbs_input.overhead_re_per_prb
    if per_prb <= 0:
        raise ConfigurationError("allocation leaves no data resource elements per PRB")
    return min(RE_CAP_PER_PRB, per_prb) * tbs_input.n_prb


def intermediate_info_bits(tbs_input: TbsInput) -> float:
    """Unquantized information-bit count N_info = S * N_RE * R * Q_m * v."""
    mcs = tbs_input.mcs
    return (
        tbs_input.scaling
        * n_re(tbs_input)
        * mcs.code_rate
        * mcs.modulation_order
        * tbs_input.layers
    )


def tbs(tbs_input: TbsInput, tbs_table: Sequence[int] | None = None) -> int:
    """Transport block size in bits after TS 38.214 section 5.1.3.2 quantization."""
    table = TBS_TABLE if tbs_table is None else tbs_table
    n_info = intermediate_info_bits(tbs_input)
    if n_info <= TBS_SMALL_LIMIT:
        n = max(3, math.floor(math.log2(n_info)) - 6)
        quantized = max(24, (1 << n) * math.floor(n_info / (1 << n)))
        position = bisect_left(table, quantized)
        if position == len(table):
            raise ConfigurationError("quantized N_info exceeds the TBS table range")
        return table[position]
    n = math.floor(math.log2(n_info - 24)) - 5
    quantized = max(3840, (1 << n) * round((n_info - 24) / (1 << n)))
    if tbs_input.mcs.code_rate <= 0.25:
        n_blocks = math.ceil((quantized + 24) / 3816)
    elif quantized > 8424:
        n_blocks = math.ceil((quantized + 24) / 8424)
    else:
        n_blocks = 1
    return 8 * n_blocks * math.ceil((quantized + 24) / (8 * n_blocks)) - 24


class RateMode(Enum):
    """Data-rate accounting: per scheduled slot, or averaged over the TDD pattern."""

    PER_SLOT = "per-slot"
    DUTY_SCALED = "duty-scaled"


def achieved_rate_bps(
    tbs_bits: int,
    numerology: Numerology,
    duty_fraction: float = 1.0,
    mode: RateMode = RateMode.PER_SLOT,
) -> float:
    """Data rate of one transport block per slot, optionally duty-cycle scaled."""
    if tbs_bits < 0:
        raise ConfigurationError(f"TBS must be >= 0, got {tbs_bits}")
    if not 0.0 < duty_fraction <= 1.0:
        raise ConfigurationError(f"duty fraction must lie in (0, 1], got {duty_fraction}")
    rate = tbs_bits / slot_duration_s(numerology)
    if mode is RateMode.DUTY_SCALED:
        rate *= duty_fraction
    return rate


def min_mcs_for_rate(
    target_bps: float,
    allocation: TbsInput,
    mcs_table: Sequence[McsEntry],
    numerology: Numerology,
    duty_fraction: float = 1.0,
    mode: RateMode = RateMode.PER_SLOT,
    tbs_table: Sequence[int] | None = None,
) -> Optional[McsEntry]:
    """Smallest-index MCS whose TBS meets the target rate, or None if infeasible."""
    if not mcs_table:
        raise ConfigurationError("MCS table must be non-empty")
    for entry in sorted(mcs_table, key=lambda e: e.index):
        candidate = replace(allocation, mcs=entry)
        rate = achieved_rate_bps(tbs(candidate, tbs_table), numerology, duty_fraction, mode)
        if rate >= target_bps:
            return entry
    return None
