"""Coverage evaluation toolkit for 5G NR reduced-capability devices.

Computes per-channel link budgets (maximum isotropic loss), identifies the
coverage-bottleneck channel per deployment scenario, and quantifies the
coverage recovery each reduced-capability channel needs relative to a
full-capability reference UE.
"""

from .analysis import (
    BottleneckResult,
    CoverageReport,
    EvaluationWarning,
    Evaluator,
    RecoveryEntry,
    WhatIfResult,
    coverage_recoveries,
    find_bottleneck,
)
from .bundle import (
    Bundle,
    CalibrationEntry,
    bundled_dataset_path,
    load_bundle,
    serialize_calibration,
    serialize_scenario_document,
    serialize_sinr_csv,
)
from .calibration import CalibrationTarget, DlAnchor, fit_calibration, load_targets
from .errors import (
    BundleError,
    ConfigurationError,
    CoverageError,
    SinrLookupError,
    UnsupportedOperationError,
)
from .fading import (
    BranchReductionPenalty,
    OutageSpec,
    branch_reduction_penalty_db,
    closed_form_outage_margin_db,
    closed_form_penalty_db,
    erlang_cdf,
    erlang_quantile,
    mrc_outage_snr_db,
)
from .linkbudget import (
    LinkBudgetLine,
    evaluate_channel,
    thermal_noise_dbm,
    tx_power_over_allocation_dbm,
)
from .model import (
    CHANNEL_DIRECTION,
    CHANNEL_ORDER,
    Channel,
    ChannelAllocation,
    Direction,
    Duplex,
    Scenario,
    SinrRequirement,
    UeProfile,
    validate_dataset,
)
from .numerology import (
    Numerology,
    SlotKind,
    TddPattern,
    duty_fractions,
    format_tdd_pattern,
    parse_tdd_pattern,
    prb_bandwidth_hz,
    slot_duration_s,
)
from .report import (
    FORMATS,
    ReportDocument,
    document_from_report,
    emit_human,
    emit_json,
    emit_plot_csv,
    parse_json,
)
from .transport import (
    MCS_TABLES,
    TBS_TABLE,
    McsEntry,
    RateMode,
    TbsInput,
    achieved_rate_bps,
    intermediate_info_bits,
    load_mcs_table,
    load_mcs_tables,
    load_tbs_table,
    min_mcs_for_rate,
    n_re,
    tbs,
)

__version__ = "0.1.0"
