"""Dendritic network with RRAM delays and multi-level RRAM weights."""

from ._dendrram import (
    ConfigError,
    DomainError,
    EvaluationError,
    HrsDistribution,
    IndexError,
    IoError,
    LrsLevelTable,
    NumericalError,
    ParseError,
    ScaleError,
    SeededRng,
    default_config,
    delay_from_rc,
    delta_modulate,
    evaluate,
    footprint_bits,
    nearest_level,
    normalize_config,
    prepare,
    program_lrs,
    report,
    run_network,
    sample_hrs,
    sweep,
    synth_ecg,
    train,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "EvaluationError",
    "HrsDistribution",
    "IndexError",
    "IoError",
    "LrsLevelTable",
    "NumericalError",
    "ParseError",
    "ScaleError",
    "SeededRng",
    "default_config",
    "delay_from_rc",
    "delta_modulate",
    "evaluate",
    "footprint_bits",
    "nearest_level",
    "normalize_config",
    "prepare",
    "program_lrs",
    "report",
    "run_network",
    "sample_hrs",
    "sweep",
    "synth_ecg",
    "train",
]
