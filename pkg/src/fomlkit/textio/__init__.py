"""Concrete syntax: ``.m2l`` languages, ``.m2m`` models, ``.m2b`` bindings and
``.m2c`` constraint lists."""

from .lexer import Diagnostic, SourceSpan, tokenize
from .parser import (
    parse_bindings, parse_constraints, parse_language, parse_model,
)
from .printer import (
    format_domain, format_formula, format_term, format_value,
    serialize_constraints, serialize_language, serialize_model,
)

__all__ = [
    "Diagnostic", "SourceSpan", "tokenize", "parse_bindings",
    "parse_constraints", "parse_language", "parse_model", "format_domain",
    "format_formula", "format_term", "format_value", "serialize_constraints",
    "serialize_language", "serialize_model",
]
