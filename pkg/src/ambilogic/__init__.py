"""Exact model checking for epistemic probability logic with ambiguous interpretations."""
from .agreement import (
    AgreementReport, AmbiguityReport, AumannReport, PosteriorComparison, SignalFlags, agreement_scan,
    ambiguity_measure, aumann_check, check_agreement_bound, classify_signal, common_prior,
    compare_posteriors_events, compare_posteriors_formulas, recv,
)
from .families import THRESHOLDS, formula_family, propositional_family
from .semantics import (
    ConditioningUndefined, Mode, belief_event, common_belief, evaluate, extension, prob_value, session,
    truth_table, valid,
)
from .structure import (
    MissingDataError, ModelFormatError, Report, Structure, check_cpa, check_prior_generated, dump_model,
    dumps_model, generate_priors, is_common_interpretation, load_model, loads_model, reachable, validate,
    validate_ai,
)
from .syntax import ParseError, is_propositional, normalize, parse, to_text
from .transforms import (
    EquivalenceVerdict, GeneratorConfig, add_cell_labels, check_equivalent, disjoint_copies, identity_pairing,
    project_outermost, random_structure,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementReport", "AmbiguityReport", "AumannReport", "PosteriorComparison", "SignalFlags",
    "agreement_scan", "ambiguity_measure", "aumann_check", "check_agreement_bound", "classify_signal",
    "common_prior", "compare_posteriors_events", "compare_posteriors_formulas", "recv", "THRESHOLDS",
    "formula_family", "propositional_family", "ConditioningUndefined", "Mode", "belief_event",
    "common_belief", "evaluate", "extension", "prob_value", "session", "truth_table", "valid",
    "MissingDataError", "ModelFormatError", "Report", "Structure", "check_cpa",
    "check_prior_generated", "dump_model", "dumps_model", "generate_priors",
    "is_common_interpretation", "load_model", "loads_model", "reachable", "validate", "validate_ai",
    "ParseError", "is_propositional", "normalize", "parse", "to_text", "EquivalenceVerdict",
    "GeneratorConfig", "add_cell_labels", "check_equivalent", "disjoint_copies", "identity_pairing",
    "project_outermost", "random_structure",
]
