"""NR time/frequency arithmetic: subcarrier spacing, PRB bandwidth, slot timing, TDD patterns.

Covers the numerologies used by the bundled deployment scenarios (15/30/120 kHz
subcarrier spacing with normal cyclic prefix, i.e. 14-symbol slots). Flexible
slot formats, mini-slots and extended cyclic prefix are out of scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigurationError

SUPPORTED_SCS_KHZ = (15, 30, 120)
SYMBOLS_PER_SLOT = 14
SUBCARRIERS_PER_PRB = 12


@dataclass(frozen=True)
class Numerology:
    """Subcarrier spacing choice; fixes PRB bandwidth and slot duration."""

    scs_khz: int

    def __post_init__(self) -> None:
        if self.scs_khz not in SUPPORTED_SCS_KHZ:
            raise ConfigurationError(
                f"unsupported subcarrier spacing {self.scs_khz} kHz "
                f"(supported: {', '.join(str(s) for s in SUPPORTED_SCS_KHZ)})"
            )


def prb_bandwidth_hz(numerology: Numerology) -> float:
    """Bandwidth of one physical resource block (12 subcarriers) in Hz."""
    return SUBCARRIERS_PER_PRB * numerology.scs_khz * 1e3


def slot_duration_s(numerology: Numerology) -> float:
    """Slot duration in seconds: 1 ms at 15 kHz, scaling inversely with SCS."""
    return 1e-3 * 15 / numerology.scs_khz


class SlotKind(Enum):
    DOWNLINK = "D"
    UPLINK = "U"
    SPECIAL = "S"


@dataclass(frozen=True)
class TddPattern:
    """Slot-level TDD pattern plus the symbol split applied to Special slots.

    ``special_split`` is (downlink, guard, uplink) symbol counts and must sum
    to the 14 symbols of one slot. It is ignored when the sequence contains no
    Special slot.
    """

    sequence: tuple[SlotKind, ...]
    special_split: tuple[int, int, int]

    def __post_init__(self) -> None:
        if not self.sequence:
            raise ConfigurationError("TDD pattern needs at least one slot")
        split = self.special_split
        if len(split) != 3 or any(s < 0 for s in split) or sum(split) != SYMBOLS_PER_SLOT:
            raise ConfigurationError(
                "special-slot split must be three non-negative symbol counts "
                f"summing to {SYMBOLS_PER_SLOT}, got {split!r}"
            )


# Compact notation used in scenario files, e.g. "DDDSU (S: 10D:2G:2U)".
_PATTERN_RE = re.compile(
    r"^(?P<slots>[DUS]+)"
    r"(?:\s*\(S:\s*(?P<dl>\d+)D:(?P<guard>\d+)G:(?P<ul>\d+)U\))?$"
)


def parse_tdd_pattern(text: str) -> TddPattern:
    """Parse compact TDD-pattern notation like ``"DDDDDDDSUU (S: 6D:4G:4U)"``."""
    match = _PATTERN_RE.match(text.strip())
    if match is None:
        raise ConfigurationError(f"malformed TDD pattern {text!r}")
    sequence = tuple(SlotKind(c) for c in match["slots"])
    if match["dl"] is None:
        if SlotKind.SPECIAL in sequence:
            raise ConfigurationError(
                f"TDD pattern {text!r} has Special slots but no '(S: aD:bG:cU)' split"
            )
        split = (0, SYMBOLS_PER_SLOT, 0)
    else:
        split = (int(match["dl"]), int(match["guard"]), int(match["ul"]))
    return TddPattern(sequence, split)


def format_tdd_pattern(pattern: TddPattern) -> str:
    """Inverse of :func:`parse_tdd_pattern` (canonical spelling)."""
    slots = "".join(kind.value for kind in pattern.sequence)
    if SlotKind.SPECIAL not in pattern.sequence:
        return slots
    dl, guard, ul = pattern.special_split
    return f"{slots} (S: {dl}D:{guard}G:{ul}U)"


def duty_fractions(pattern: TddPattern | None) -> tuple[float, float]:
    """Fraction of symbol time usable in (downlink, uplink).

    Special slots contribute their split symbols to each direction; guard
    symbols count toward neither. ``None`` means FDD and yields (1, 1).
    """
    if pattern is None:
        return (1.0, 1.0)
    total = len(pattern.sequence) * SYMBOLS_PER_SLOT
    dl_split, _, ul_split = pattern.special_split
    dl = ul = 0
    for kind in pattern.sequence:
        if kind is SlotKind.DOWNLINK:
            dl += SYMBOLS_PER_SLOT
        elif kind is SlotKind.UPLINK:
            ul += SYMBOLS_PER_SLOT
        else:
            dl += dl_split
            ul += ul_split
    return (dl / total, ul / total)
