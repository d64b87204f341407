from dataclasses import replace

from redcap_coverage.report import (
    FIXED_TIMESTAMP,
    ReportRecovery,
    document_from_report,
    emit_human,
    emit_json,
    emit_plot_csv,
    parse_json,
)


def make_document(evaluator, scenario="Rural", profile="RedCap1Rx"):
    report = evaluator.build_report(scenario, profile)
    return document_from_report(report, FIXED_TIMESTAMP)


def test_json_round_trip(evaluator):
    document = make_document(evaluator)
    assert parse_json(emit_json(document)) == document


def test_json_emission_is_deterministic(evaluator):
    first = emit_json(make_document(evaluator))
    second = emit_json(make_document(evaluator))
    assert first == second


def test_human_table_structure(evaluator):
    text = emit_human(make_document(evaluator))
    lines = text.splitlines()
    assert lines[0].startswith("coverage report: scenario Rural")
    assert "threshold MIL 142.80 dB (bottleneck PUSCH, reference UE)" in text
    # channels appear in report order
    order = ["SSB", "PRACH", "Msg2", "Msg3", "Msg4", "PDCCH", "PDSCH",
             "PUCCH_F1", "PUCCH_F3", "PUSCH"]
    positions = [text.index(f"\n{name} ") for name in order]
    assert positions == sorted(positions)
    assert "coverage recovery needed:" in text
    assert "PUSCH (RedCap1Rx): 3.00 dB" in text


def test_human_table_no_recoveries(evaluator):
    # the 2-branch reduced UE matches the reference everywhere at 28 GHz
    text = emit_human(make_document(evaluator, scenario="Indoor", profile="RedCap2Rx"))
    assert "no coverage recovery needed" in text


def test_human_table_rounds_tiny_recovery_to_zero(evaluator):
    document = make_document(evaluator)
    tweaked = replace(
        document,
        recoveries=(ReportRecovery("RedCap1Rx", "PUSCH", 0.031),),
    )
    text = emit_human(tweaked)
    assert "PUSCH (RedCap1Rx): 0.00 dB" in text


def test_tiny_recovery_kept_raw_in_machine_output(evaluator):
    document = make_document(evaluator)
    tweaked = replace(
        document,
        recoveries=(ReportRecovery("RedCap1Rx", "PUSCH", 0.031),),
    )
    assert parse_json(emit_json(tweaked)).recoveries[0].recovery_db == 0.031


def test_plot_csv_rows(evaluator):
    document = make_document(evaluator)
    rows = [
        line
        for line in emit_plot_csv(document).splitlines()
        if line and not line.startswith("#")
    ]
    assert rows[0] == "scenario,profile,channel,mil_db"
    assert len(rows) == 1 + 2 * 10  # header + (reference + RedCap1Rx) x 10 channels
    assert rows[1].startswith("Rural,Reference,SSB,")


def test_warnings_in_every_format(evaluator):
    document = make_document(evaluator, scenario="Urban", profile="RedCap1Rx")
    assert any(w.code == "rate_below_target" for w in document.warnings)
    assert "rate_below_target" in emit_json(document)
    assert "rate_below_target" in emit_human(document)
    assert "# warning: [rate_below_target]" in emit_plot_csv(document)


def test_reference_only_document(evaluator):
    document = make_document(evaluator, profile="Reference")
    assert document.profile == "Reference"
    assert len(document.lines) == 10
    assert document.recoveries == ()
    assert "no coverage recovery needed" in emit_human(document)
