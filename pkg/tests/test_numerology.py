import random

import pytest

from redcap_coverage.errors import ConfigurationError
from redcap_coverage.numerology import (
    SYMBOLS_PER_SLOT,
    Numerology,
    SlotKind,
    TddPattern,
    duty_fractions,
    format_tdd_pattern,
    parse_tdd_pattern,
    prb_bandwidth_hz,
    slot_duration_s,
)


@pytest.mark.parametrize(
    "scs,expected_bw,expected_slot",
    [(15, 180_000.0, 1.0e-3), (30, 360_000.0, 0.5e-3), (120, 1_440_000.0, 0.125e-3)],
)
def test_prb_bandwidth_and_slot_duration(scs, expected_bw, expected_slot):
    numerology = Numerology(scs)
    assert prb_bandwidth_hz(numerology) == expected_bw
    assert slot_duration_s(numerology) == expected_slot


def test_unsupported_scs_rejected():
    with pytest.raises(ConfigurationError):
        Numerology(60)


def test_bandwidth_slot_product_is_constant():
    # prb_bandwidth * slot_duration = 12 subcarriers * 15 kHz * 1 ms = 180 Hz*s
    for scs in (15, 30, 120):
        numerology = Numerology(scs)
        assert prb_bandwidth_hz(numerology) * slot_duration_s(numerology) == pytest.approx(
            180.0, abs=1e-12
        )


def test_duty_fractions_indoor_pattern():
    # direct symbol count: 3 DL slots + 10 special-DL symbols over 5 slots
    pattern = parse_tdd_pattern("DDDSU (S: 10D:2G:2U)")
    dl, ul = duty_fractions(pattern)
    assert dl == pytest.approx((3 * 14 + 10) / (5 * 14), abs=1e-15)
    assert ul == pytest.approx((1 * 14 + 2) / (5 * 14), abs=1e-15)


def test_duty_fractions_urban_pattern():
    pattern = parse_tdd_pattern("DDDDDDDSUU (S: 6D:4G:4U)")
    dl, ul = duty_fractions(pattern)
    assert dl == pytest.approx((7 * 14 + 6) / (10 * 14), abs=1e-15)
    assert ul == pytest.approx((2 * 14 + 4) / (10 * 14), abs=1e-15)


def test_duty_fractions_fdd():
    assert duty_fractions(None) == (1.0, 1.0)


def test_pattern_round_trip():
    for text in ("DDDSU (S: 10D:2G:2U)", "DDDDDDDSUU (S: 6D:4G:4U)", "DU"):
        assert format_tdd_pattern(parse_tdd_pattern(text)) == text


@pytest.mark.parametrize(
    "text",
    [
        "",
        "DDXSU (S: 10D:2G:2U)",
        "DDDSU (S: 10D:2G)",
        "DDDSU (S: 10D:3G:2U)",  # split sums to 15
        "DDDSU",  # special slot without a split
    ],
)
def test_malformed_patterns_rejected(text):
    with pytest.raises(ConfigurationError):
        parse_tdd_pattern(text)


def test_duty_fraction_sum_property():
    # dl + ul <= 1, equality iff no guard symbols contribute
    rng = random.Random(1203)
    kinds = [SlotKind.DOWNLINK, SlotKind.UPLINK, SlotKind.SPECIAL]
    for _ in range(300):
        sequence = tuple(rng.choice(kinds) for _ in range(rng.randint(1, 12)))
        dl_sym = rng.randint(0, SYMBOLS_PER_SLOT)
        guard = rng.randint(0, SYMBOLS_PER_SLOT - dl_sym)
        ul_sym = SYMBOLS_PER_SLOT - dl_sym - guard
        pattern = TddPattern(sequence, (dl_sym, guard, ul_sym))
        dl, ul = duty_fractions(pattern)
        guard_fraction = (
            sum(1 for k in sequence if k is SlotKind.SPECIAL)
            * guard
            / (len(sequence) * SYMBOLS_PER_SLOT)
        )
        assert dl + ul <= 1.0 + 1e-12
        assert dl + ul + guard_fraction == pytest.approx(1.0, abs=1e-12)
        if guard == 0 or SlotKind.SPECIAL not in sequence:
            assert dl + ul == pytest.approx(1.0, abs=1e-12)
        else:
            assert dl + ul < 1.0
