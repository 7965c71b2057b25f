"""Exception hierarchy. Every error carries a machine-readable ``code``."""

from __future__ import annotations


class KernelError(Exception):
    code = "KERNEL_ERROR"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self) -> str:
        return "%s: %s" % (self.code, self.args[0])


class SignatureError(KernelError):
    code = "SIGNATURE_ERROR"


class FormulaTypeError(KernelError):
    """Raised by the type checker; ``errors`` lists every ill-typed node."""

    code = "TYPE_ERROR"

    def __init__(self, errors):
        self.errors = list(errors)
        first = self.errors[0]
        super().__init__(
            "; ".join(str(e) for e in self.errors), code=first.code)


class EvaluationError(KernelError):
    code = "EVALUATION_ERROR"


class StructureError(KernelError):
    code = "STRUCTURE_ERROR"


class DerivationError(KernelError):
    code = "DERIVATION_ERROR"


class CompositionError(KernelError):
    code = "COMPOSITION_ERROR"


class EventError(KernelError):
    code = "EVENT_ERROR"


class ParseError(KernelError):
    """Raised after a parse that produced diagnostics; all are attached."""

    code = "PARSE_ERROR"

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__(
            "\n".join(str(d) for d in self.diagnostics),
            code=self.diagnostics[0].code if self.diagnostics else None)
