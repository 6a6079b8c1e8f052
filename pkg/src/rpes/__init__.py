"""Reversible prime event structures: step semantics, residuals and equivalence checks."""

from __future__ import annotations

from .audit import AuditReport, audit_semantics
from .dot import export_dot
from .equiv import BisimResult, Counterexample, IsoResult, check_bisimulation, check_isomorphism
from .generate import GenParams, GenerationError, SplitMix64, gen_pes, gen_rpes
from .kernel import (
    Pes,
    PreconditionError,
    Rpes,
    RpesError,
    StructureError,
    ValidationError,
    ValidationReport,
    Violation,
    is_causal,
    is_cause_respecting,
    phi,
    sustained_causation,
    validate_pes,
    validate_rpes,
    varphi,
)
from .residual import (
    ResidualKey,
    build_te,
    remove_configuration,
    remove_step,
    remove_trace,
)
from .stepsem import (
    Lts,
    NotEnabledError,
    Step,
    StepLabel,
    apply_step,
    build_tc,
    enumerate_steps,
    forwards_reachable_configs,
    reachable_configs,
    step_label,
    validate_trace,
)
from .textformat import ParseError, load_fixture, parse_rpes, parse_trace, serialize_rpes

__all__ = [
    "AuditReport", "BisimResult", "Counterexample", "GenParams", "GenerationError", "IsoResult",
    "Lts", "NotEnabledError", "ParseError", "Pes", "PreconditionError", "ResidualKey", "Rpes",
    "RpesError", "SplitMix64", "Step", "StepLabel", "StructureError", "ValidationError",
    "ValidationReport", "Violation", "apply_step", "audit_semantics", "build_tc", "build_te",
    "check_bisimulation", "check_isomorphism", "enumerate_steps", "export_dot",
    "forwards_reachable_configs", "gen_pes", "gen_rpes", "is_causal", "is_cause_respecting",
    "load_fixture", "parse_rpes", "parse_trace", "phi", "reachable_configs", "remove_configuration",
    "remove_step", "remove_trace", "serialize_rpes", "step_label", "sustained_causation",
    "validate_pes", "validate_rpes", "validate_trace", "varphi",
]
