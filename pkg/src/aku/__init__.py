"""aku: actionable knowledge units.

Statement-centred unit store, applicability-condition evaluation under
three-valued logic, the structural/applicable/validated grounding ladder,
and closed-loop orchestration of composite and conditional action units,
fronted by an HTTP gateway and the `aku` command-line tool.
"""

from .actions import (
    ActionUnit,
    ApplicabilityConditionSet,
    Binding,
    Branch,
    ChildStep,
    ConditionItem,
    EvidenceUnit,
    ObjectiveUnit,
    PlanSpecUnit,
    SlotSpec,
    ValidationReport,
    grounding_level,
    validate_action_unit,
)
from .conditions import ConditionExpr, TriValue, parse_condition, to_source
from .conversions import ConversionRegistry
from .engine import (
    ApplicabilityReport,
    Gap,
    WhatIfDiff,
    evaluate_action_unit,
    evaluate_condition,
    what_if,
)
from .errors import AkuError
from .orchestration import ExecutionRecord, ExecutorRegistry, ManualTask, Orchestrator, StepRecord
from .schemas import (
    ConformanceReport,
    SlotSpecDef,
    StatementSchema,
    check_conformance,
    compatible_action_units,
    register_schema,
)
from .units import Assertion, ContextUnit, SemanticUnit, StatementUnit, UnitStore
from .values import SlotValue

__version__ = "0.1.0"

__all__ = [
    "ActionUnit",
    "AkuError",
    "ApplicabilityConditionSet",
    "ApplicabilityReport",
    "Assertion",
    "Binding",
    "Branch",
    "ChildStep",
    "ConditionExpr",
    "ConditionItem",
    "ConformanceReport",
    "ContextUnit",
    "ConversionRegistry",
    "EvidenceUnit",
    "ExecutionRecord",
    "ExecutorRegistry",
    "Gap",
    "ManualTask",
    "ObjectiveUnit",
    "Orchestrator",
    "PlanSpecUnit",
    "SemanticUnit",
    "SlotSpec",
    "SlotSpecDef",
    "SlotValue",
    "StatementSchema",
    "StatementUnit",
    "StepRecord",
    "TriValue",
    "UnitStore",
    "ValidationReport",
    "WhatIfDiff",
    "check_conformance",
    "compatible_action_units",
    "evaluate_action_unit",
    "evaluate_condition",
    "grounding_level",
    "parse_condition",
    "register_schema",
    "to_source",
    "validate_action_unit",
    "what_if",
]
