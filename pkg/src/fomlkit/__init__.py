"""Typed first-order metamodeling kernel.

Languages are signatures with constraint sentences, models are finite
structures over them, and conformance is satisfaction of every constraint.
"""

from .composition import (
    Bridge, FusionBinding, fuse_signatures, rename_signature,
    restrict_model, restrict_signature,
)
from .errors import (
    CompositionError, DerivationError, EvaluationError, EventError,
    FormulaTypeError, KernelError, ParseError, SignatureError, StructureError,
)
from .events import (
    Create, Delete, DomainEvent, SetAttr, apply_domain, apply_sequence,
    apply_structural, enabled, event_for, make_fire_event, run_domain,
)
from .formula import Evaluator, evaluate, typecheck_formula
from .m2fol import (
    bootstrap_check, complete_closure, derive_signature, m2fol_signature,
)
from .sigcore import (
    Constraint, FunctionSymbol, Kind, RelationSymbol, Role, SignatureDecl,
    TypeName, subtype_order, validate_signature,
)
from .structure import ConformanceReport, Structure, check_conformance
from .values import ListValue, Sym

__version__ = "0.1.0"

__all__ = [
    "Bridge", "CompositionError", "ConformanceReport", "Constraint", "Create",
    "Delete", "DerivationError", "DomainEvent", "EvaluationError",
    "Evaluator", "EventError", "FormulaTypeError", "FunctionSymbol",
    "FusionBinding", "Kind", "KernelError", "ListValue", "ParseError",
    "RelationSymbol", "Role", "SetAttr", "SignatureDecl", "SignatureError",
    "Structure", "StructureError", "Sym", "TypeName", "apply_domain",
    "apply_sequence", "apply_structural", "bootstrap_check",
    "check_conformance", "complete_closure", "derive_signature", "enabled",
    "evaluate", "event_for", "fuse_signatures", "m2fol_signature",
    "make_fire_event", "rename_signature", "restrict_model",
    "restrict_signature", "run_domain", "subtype_order", "typecheck_formula",
    "validate_signature",
]
