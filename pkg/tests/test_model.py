from dataclasses import replace

import pytest

from redcap_coverage.errors import ConfigurationError
from redcap_coverage.model import (
    CHANNEL_DIRECTION,
    Channel,
    Direction,
    Duplex,
    SinrRequirement,
    validate_dataset,
)


def dataset_parts(bundle):
    scenarios = list(bundle.scenarios.values())
    profiles = {name: list(p.values()) for name, p in bundle.profiles.items()}
    allocations = {name: list(a) for name, a in bundle.allocations.items()}
    entries = list(bundle.sinr_entries)
    return scenarios, profiles, allocations, entries


def test_bundled_dataset_is_clean(bundle):
    scenarios, profiles, allocations, entries = dataset_parts(bundle)
    assert validate_dataset(scenarios, profiles, allocations, entries) == []


def test_channel_directions():
    assert CHANNEL_DIRECTION[Channel.PUSCH] is Direction.UL
    assert CHANNEL_DIRECTION[Channel.MSG3] is Direction.UL
    assert CHANNEL_DIRECTION[Channel.PDSCH] is Direction.DL
    assert CHANNEL_DIRECTION[Channel.SSB] is Direction.DL


def test_ul_invariance_violation_flagged(bundle):
    scenarios, profiles, allocations, entries = dataset_parts(bundle)
    tampered = [
        replace(e, required_sinr_db=-2.0)
        if (e.scenario, e.profile, e.channel) == ("Rural", "RedCap1Rx", Channel.PUSCH)
        else e
        for e in entries
    ]
    violations = validate_dataset(scenarios, profiles, allocations, tampered)
    assert any("UL required SINR differs" in v and "PUSCH" in v for v in violations)


def test_direction_mismatch_flagged(bundle):
    scenarios, profiles, allocations, entries = dataset_parts(bundle)
    rural = allocations["Rural"]
    allocations["Rural"] = [
        replace(a, direction=Direction.DL) if a.channel is Channel.PUSCH else a
        for a in rural
    ]
    violations = validate_dataset(scenarios, profiles, allocations, entries)
    assert any("Rural/PUSCH" in v and "direction" in v for v in violations)


def test_bw_overflow_flagged(bundle):
    scenarios, profiles, allocations, entries = dataset_parts(bundle)
    profiles["Urban"] = [
        replace(p, max_bw_hz=5e6) if p.label == "RedCap2Rx" else p
        for p in profiles["Urban"]
    ]
    violations = validate_dataset(scenarios, profiles, allocations, entries)
    assert any(
        "Urban/RedCap2Rx" in v and "exceeds the profile bandwidth" in v
        for v in violations
    )


def test_missing_sinr_flagged(bundle):
    scenarios, profiles, allocations, entries = dataset_parts(bundle)
    trimmed = [
        e
        for e in entries
        if (e.scenario, e.profile, e.channel) != ("Indoor", "RedCap1Rx", Channel.MSG4)
    ]
    violations = validate_dataset(scenarios, profiles, allocations, trimmed)
    assert any(
        "Indoor/RedCap1Rx/Msg4" in v and "missing required-SINR" in v for v in violations
    )


def test_orphan_sinr_flagged(bundle):
    scenarios, profiles, allocations, entries = dataset_parts(bundle)
    entries = entries + [SinrRequirement("Atlantis", "Reference", Channel.PUSCH, -3.0)]
    violations = validate_dataset(scenarios, profiles, allocations, entries)
    assert any("Atlantis" in v and "unknown scenario" in v for v in violations)


def test_unknown_scenario_name_flagged(bundle):
    scenarios, profiles, allocations, entries = dataset_parts(bundle)
    renamed = replace(scenarios[0], name="Suburban")
    violations = validate_dataset([renamed], {"Suburban": profiles["Rural"]}, {}, [])
    assert any("unknown scenario name" in v for v in violations)


def test_duplex_rule_flagged(bundle):
    scenarios, profiles, allocations, entries = dataset_parts(bundle)
    rural = bundle.scenarios["Rural"]
    wrong = replace(
        rural,
        duplex=Duplex.TDD,
        tdd_pattern=bundle.scenarios["Urban"].tdd_pattern,
    )
    violations = validate_dataset(
        [wrong], {"Rural": profiles["Rural"]}, {"Rural": allocations["Rural"]}, entries
    )
    assert any("Rural" in v and "duplex must be FDD" in v for v in violations)


def test_fr1_efficiency_rule_flagged(bundle):
    scenarios, profiles, allocations, entries = dataset_parts(bundle)
    profiles["Rural"] = [
        replace(p, antenna_efficiency_loss_db=0.0) if p.label == "RedCap1Rx" else p
        for p in profiles["Rural"]
    ]
    violations = validate_dataset(scenarios, profiles, allocations, entries)
    assert any(
        "Rural/RedCap1Rx" in v and "antenna efficiency loss" in v for v in violations
    )


def test_scenario_invariants():
    from redcap_coverage.numerology import Numerology

    with pytest.raises(ConfigurationError):
        # TDD without a pattern
        from redcap_coverage.model import Scenario

        Scenario(
            name="Urban",
            carrier_hz=2.6e9,
            duplex=Duplex.TDD,
            tdd_pattern=None,
            carrier_bw_hz=1e8,
            numerology=Numerology(30),
            gnb_power_dbm=53.0,
            gnb_txru_count=64,
            gnb_rx_chains=4,
            ue_power_dbm=23.0,
            gnb_antenna_gain_db=0.0,
            ue_antenna_gain_db=0.0,
            gnb_noise_figure_db=0.0,
            ue_noise_figure_db=0.0,
        )


def test_scenario_fr_split(bundle):
    assert bundle.scenarios["Rural"].is_fr1
    assert bundle.scenarios["Urban"].is_fr1
    assert not bundle.scenarios["Indoor"].is_fr1
