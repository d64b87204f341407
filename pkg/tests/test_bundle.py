import shutil

import pytest

from redcap_coverage.bundle import (
    CALIBRATION_FILE,
    SINR_FILE,
    load_bundle,
    parse_scenario_document,
    serialize_calibration,
    serialize_scenario_document,
    serialize_sinr_csv,
)
from redcap_coverage.calibration import fit_calibration, load_targets
from redcap_coverage.errors import BundleError
from redcap_coverage.model import Channel


def test_bundle_contents(bundle):
    assert list(bundle.scenarios) == ["Rural", "Urban", "Indoor"]
    for name in bundle.scenarios:
        assert list(bundle.profiles[name]) == ["Reference", "RedCap2Rx", "RedCap1Rx"]
        assert len(bundle.channels_for(name)) == 10
    assert len(bundle.sinr_entries) == 90
    assert bundle.validate() == []


def test_allocation_resolution(bundle):
    reference = bundle.allocation_for("Urban", Channel.PDSCH, "Reference")
    redcap = bundle.allocation_for("Urban", Channel.PDSCH, "RedCap1Rx")
    assert reference.n_prb == 200
    assert redcap.n_prb == 51
    shared = bundle.allocation_for("Urban", Channel.PUSCH, "RedCap1Rx")
    assert shared.n_prb == 30


def test_scenario_files_round_trip(bundle, bundle_path):
    for filename in ("rural.toml", "urban.toml", "indoor.toml"):
        text = (bundle_path / filename).read_text(encoding="utf-8")
        scenario, profiles, allocations, problems = parse_scenario_document(
            text, source=filename
        )
        assert problems == []
        assert serialize_scenario_document(scenario, profiles, allocations) == text


def test_calibration_round_trip(bundle, bundle_path):
    text = (bundle_path / CALIBRATION_FILE).read_text(encoding="utf-8")
    assert serialize_calibration(bundle.calibration) == text


def test_sinr_round_trip(bundle, bundle_path):
    text = (bundle_path / SINR_FILE).read_text(encoding="utf-8")
    assert serialize_sinr_csv(bundle.sinr_entries) == text


def test_empty_directory_rejected(tmp_path):
    with pytest.raises(BundleError) as excinfo:
        load_bundle(tmp_path)
    assert any("no scenario documents found" in p for p in excinfo.value.problems)


def test_missing_path_rejected(tmp_path):
    with pytest.raises(BundleError):
        load_bundle(tmp_path / "nope")


def _copy_bundle(bundle_path, tmp_path):
    target = tmp_path / "bundle"
    shutil.copytree(bundle_path, target)
    return target


def test_duplicate_sinr_row_named(bundle_path, tmp_path):
    target = _copy_bundle(bundle_path, tmp_path)
    sinr = target / SINR_FILE
    sinr.write_text(
        sinr.read_text(encoding="utf-8") + "Rural,Reference,PUSCH,-2.4\n",
        encoding="utf-8",
    )
    with pytest.raises(BundleError) as excinfo:
        load_bundle(target)
    assert any(
        "duplicate SINR row" in p and "(Rural, Reference, PUSCH)" in p
        for p in excinfo.value.problems
    )


def test_unknown_schema_version_rejected(bundle_path, tmp_path):
    target = _copy_bundle(bundle_path, tmp_path)
    rural = target / "rural.toml"
    rural.write_text(
        rural.read_text(encoding="utf-8").replace("schema = 1", "schema = 2", 1),
        encoding="utf-8",
    )
    with pytest.raises(BundleError) as excinfo:
        load_bundle(target)
    assert any("unknown schema version" in p for p in excinfo.value.problems)


def test_missing_required_field_reported(bundle_path, tmp_path):
    target = _copy_bundle(bundle_path, tmp_path)
    rural = target / "rural.toml"
    lines = [
        line
        for line in rural.read_text(encoding="utf-8").splitlines()
        if not line.startswith("carrier_hz")
    ]
    rural.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(BundleError) as excinfo:
        load_bundle(target)
    assert any("missing required field 'carrier_hz'" in p for p in excinfo.value.problems)


def test_problems_are_collected_not_fail_fast(bundle_path, tmp_path):
    target = _copy_bundle(bundle_path, tmp_path)
    (target / "rural.toml").write_text("schema = 2\n", encoding="utf-8")
    (target / CALIBRATION_FILE).unlink()
    with pytest.raises(BundleError) as excinfo:
        load_bundle(target)
    assert len(excinfo.value.problems) >= 2


def test_fit_reproduces_shipped_calibration(bundle, bundle_path):
    targets = load_targets(bundle_path / "targets.toml")
    fitted = fit_calibration(bundle, targets)
    assert set(fitted) == set(bundle.calibration)
    for name, entry in fitted.items():
        shipped = bundle.calibration[name]
        assert entry.gnb_antenna_gain_db == pytest.approx(
            shipped.gnb_antenna_gain_db, abs=1e-9
        )
        assert entry.ue_antenna_gain_db == pytest.approx(
            shipped.ue_antenna_gain_db, abs=1e-9
        )
        assert entry.gnb_noise_figure_db == pytest.approx(
            shipped.gnb_noise_figure_db, abs=1e-9
        )
        assert entry.ue_noise_figure_db == pytest.approx(
            shipped.ue_noise_figure_db, abs=1e-9
        )
