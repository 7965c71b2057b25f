"""Models as finite structures over a signature, and conformance checking."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from .errors import EvaluationError, StructureError
from .formula import Evaluator, Exists, Forall, Formula, Not, unfold
from .sigcore import (
    IDENT_RE, EnumDomain, Finding, Kind, ListDomain, NatDomain, NothingDomain,
    ProductDomain, RefDomain, Role, SetDomain, SignatureDecl, UnionDomain,
    ValueDomain, subtypes,
)
from .values import ListValue, Sym, rename_elements, value_sort_key


def _freeze_functions(functions) -> Mapping[str, Mapping[tuple, Any]]:
    out = {}
    for name in sorted(functions):
        entries = functions[name]
        if entries:
            out[name] = MappingProxyType(
                {k: entries[k] for k in sorted(entries, key=value_sort_key)})
    return MappingProxyType(out)


def _freeze_relations(relations) -> Mapping[str, frozenset]:
    return MappingProxyType({name: frozenset(relations[name])
                             for name in sorted(relations)
                             if relations[name]})


@dataclass(frozen=True, eq=False)
class Structure:
    """An interpretation of ``language``.

    ``elements`` maps element ids to their most specific declared type.
    ``functions`` maps a symbol name to ``{argument tuple: value}``.
    ``relations`` maps a relation symbol name to a set of tuples.
    Naturals and enumeration constants are interpreted by the kernel.
    """

    language: SignatureDecl
    name: str = "M"
    elements: Mapping[str, str] = field(default_factory=dict)
    functions: Mapping[str, Mapping[tuple, Any]] = field(default_factory=dict)
    relations: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "elements", MappingProxyType(
            {k: self.elements[k] for k in sorted(self.elements)}))
        object.__setattr__(self, "functions",
                           _freeze_functions(self.functions))
        object.__setattr__(self, "relations",
                           _freeze_relations(self.relations))

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (self.language == other.language and self.name == other.name
                and dict(self.elements) == dict(other.elements)
                and {k: dict(v) for k, v in self.functions.items()}
                == {k: dict(v) for k, v in other.functions.items()}
                and dict(self.relations) == dict(other.relations))

    __hash__ = None

    @classmethod
    def build(cls, language: SignatureDecl, name: str = "M", *,
              elements: Mapping[str, str] | Iterable = (),
              endpoints: Mapping[str, tuple[str, str]] | None = None,
              attributes: Mapping[tuple[str, str], Any] | None = None,
              relations: Mapping[str, Iterable[tuple]] | None = None,
              functions: Mapping[str, Mapping[tuple, Any]] | None = None,
              ) -> "Structure":
        """Convenience constructor.

        ``endpoints`` gives ``(source, target)`` for relation elements and
        ``attributes`` maps ``(element, attribute)`` to a value.
        """
        elements = dict(elements)
        funcs: dict[str, dict] = {k: dict(v) for k, v in (functions or {}).items()}
        for rid, (s, t) in (endpoints or {}).items():
            rtype = elements.get(rid)
            src = language.source_of(rtype) if rtype else None
            tgt = language.target_of(rtype) if rtype else None
            if src is None or tgt is None:
                raise StructureError("%r is not a relation element" % rid,
                                     code="UNDECLARED_TYPE")
            funcs.setdefault(src.name, {})[(rid,)] = s
            funcs.setdefault(tgt.name, {})[(rid,)] = t
        for (eid, attr), value in (attributes or {}).items():
            funcs.setdefault(attr, {})[(eid,)] = value
        rels = {k: set(v) for k, v in (relations or {}).items()}
        return cls(language, name, elements, funcs, rels)

    # queries used by the evaluator ---------------------------------------

    @cached_property
    def _universes(self) -> dict[str, tuple[str, ...]]:
        sig = self.language
        by_type: dict[str, list[str]] = {}
        for eid, t in self.elements.items():
            by_type.setdefault(t, []).append(eid)
        out = {}
        for t in sig.types:
            if t.kind is Kind.DATA:
                continue
            members: list[str] = []
            for sub in subtypes(sig, t.name):
                members.extend(by_type.get(sub, ()))
            out[t.name] = tuple(sorted(members))
        return out

    @cached_property
    def _universe_sets(self) -> dict[str, frozenset[str]]:
        return {k: frozenset(v) for k, v in self._universes.items()}

    def universe(self, type_name: str) -> tuple[str, ...]:
        try:
            return self._universes[type_name]
        except KeyError:
            raise StructureError("no element universe for %r" % type_name,
                                 code="UNKNOWN_TYPE") from None

    def function_value(self, name: str, args: tuple) -> Any:
        try:
            return self.functions[name][args]
        except KeyError:
            raise EvaluationError(
                "%s is undefined on (%s)" % (name, ", ".join(map(str, args))),
                code="PARTIAL_FUNCTION") from None

    def relation_tuples(self, name: str) -> frozenset:
        return self.relations.get(name, frozenset())

    def type_of(self, element: str) -> str:
        return self.elements[element]

    def attribute(self, element: str, attr: str) -> Any:
        return self.function_value(attr, (element,))

    def endpoints(self, element: str) -> tuple[str, str]:
        sig = self.language
        t = self.elements[element]
        return (self.function_value(sig.source_of(t).name, (element,)),
                self.function_value(sig.target_of(t).name, (element,)))

    # functional updates ---------------------------------------------------

    def replace(self, **changes) -> "Structure":
        data = dict(language=self.language, name=self.name,
                    elements=dict(self.elements),
                    functions={k: dict(v) for k, v in self.functions.items()},
                    relations={k: set(v) for k, v in self.relations.items()})
        data.update(changes)
        return Structure(**data)

    def mutable_parts(self):
        """Deep copies of the three tables, for building a successor."""
        return (dict(self.elements),
                {k: dict(v) for k, v in self.functions.items()},
                {k: set(v) for k, v in self.relations.items()})


def universe_of(m: Structure, t: str) -> tuple:
    """Elements (or data values, for finite data types) of type ``t``."""
    sig = m.language
    kind = sig.kind_of(t)
    if kind is None:
        raise StructureError("unknown type %r" % t, code="UNKNOWN_TYPE")
    if kind is Kind.DATA:
        from .formula import domain_values
        return tuple(domain_values(sig, m, RefDomain(t)))
    return m.universe(t)


def relabel(m: Structure, mapping: Mapping[str, str]) -> Structure:
    """Rename element ids through ``mapping`` (ids not mentioned are kept)."""
    def r(v):
        return rename_elements(v, mapping)
    elements = {mapping.get(e, e): t for e, t in m.elements.items()}
    functions = {name: {r(k): r(v) for k, v in entries.items()}
                 for name, entries in m.functions.items()}
    relations = {name: {r(t) for t in tuples}
                 for name, tuples in m.relations.items()}
    return Structure(m.language, m.name, elements, functions, relations)


# -- membership of values in domains -------------------------------------


def value_in_domain(m: Structure, value: Any, dom: ValueDomain) -> bool:
    sig = m.language
    dom = unfold(sig, dom)
    if isinstance(dom, RefDomain):
        univ = m._universe_sets.get(dom.target)
        return isinstance(value, str) and univ is not None and value in univ
    if isinstance(dom, NatDomain):
        return isinstance(value, int) and not isinstance(value, bool) \
            and value >= 0
    if isinstance(dom, EnumDomain):
        return isinstance(value, Sym) and value.name in dom.constants
    if isinstance(dom, ProductDomain):
        return (type(value) is tuple and len(value) == len(dom.items)
                and all(value_in_domain(m, v, d)
                        for v, d in zip(value, dom.items)))
    if isinstance(dom, UnionDomain):
        return any(value_in_domain(m, value, a) for a in dom.alternatives)
    if isinstance(dom, SetDomain):
        return isinstance(value, frozenset) and all(
            value_in_domain(m, v, dom.inner) for v in value)
    if isinstance(dom, ListDomain):
        return isinstance(value, ListValue) and all(
            value_in_domain(m, v, dom.inner) for v in value)
    if isinstance(dom, NothingDomain):
        return False
    return False


def _fmt(value: Any) -> str:
    from .textio.printer import format_value
    return format_value(value)


def validate_structure(m: Structure) -> list[Finding]:
    """Structural findings; empty iff the structure is a well-formed
    interpretation (totality, codomains, declared types)."""
    sig = m.language
    out: list[Finding] = []
    constants = sig.constant_map
    for eid, t in m.elements.items():
        if not IDENT_RE.match(eid):
            out.append(Finding("INVALID_IDENTIFIER", eid, "element id"))
        if eid in constants:
            out.append(Finding("NAME_CLASH", eid,
                               "element id equals a constant"))
        if sig.kind_of(t) not in (Kind.OBJECT, Kind.RELATION):
            out.append(Finding("UNDECLARED_TYPE", eid,
                               "%r is not an object or relation type" % t))

    for name, entries in m.functions.items():
        sym = sig.function_map.get(name)
        if sym is None:
            out.append(Finding("UNKNOWN_SYMBOL", name,
                               "interpretation of an undeclared function"))
            continue
        if sym.builtin is not None:
            out.append(Finding("UNKNOWN_SYMBOL", name,
                               "built-in symbols cannot be reinterpreted"))
            continue
        for args, value in entries.items():
            if len(args) != len(sym.domain) or not all(
                    value_in_domain(m, a, RefDomain(t))
                    for a, t in zip(args, sym.domain)):
                out.append(Finding("BAD_ARGUMENT", name,
                                   "(%s) outside the domain"
                                   % ", ".join(map(_fmt, args))))
            elif not value_in_domain(m, value, sym.codomain):
                out.append(Finding("BAD_CODOMAIN", name,
                                   "%s(%s) = %s outside the codomain"
                                   % (name, ", ".join(map(_fmt, args)),
                                      _fmt(value))))

    for sym in sig.functions:
        if sym.role is Role.AUXILIARY:
            continue
        entries = m.functions.get(sym.name, {})
        owner = sym.domain[0]
        if sig.kind_of(owner) not in (Kind.OBJECT, Kind.RELATION):
            continue
        for eid in m.universe(owner):
            if (eid,) not in entries:
                out.append(Finding("MISSING_INTERPRETATION", sym.name,
                                   "undefined on %s" % eid))

    for name, tuples in m.relations.items():
        sym = sig.relation_map.get(name)
        if sym is None or sym.builtin is not None:
            out.append(Finding("UNKNOWN_SYMBOL", name,
                               "interpretation of an undeclared or built-in "
                               "relation"))
            continue
        for tup in sorted(tuples, key=value_sort_key):
            if len(tup) != len(sym.args) or not all(
                    value_in_domain(m, v, d) for v, d in zip(tup, sym.args)):
                out.append(Finding("BAD_ARGUMENT", name,
                                   "(%s) outside the relation's domain"
                                   % ", ".join(map(_fmt, tup))))
    return out


# -- conformance -----------------------------------------------------------


@dataclass(frozen=True)
class ConstraintResult:
    name: str
    holds: bool
    witness: tuple[tuple[str, Any], ...] | None = None
    error: str | None = None

    def witness_text(self) -> str:
        if not self.witness:
            return ""
        return ", ".join("%s=%s" % (v, _fmt(x)) for v, x in self.witness)


@dataclass(frozen=True)
class ConformanceReport:
    structural_findings: tuple[Finding, ...]
    constraint_results: tuple[ConstraintResult, ...]

    @property
    def conforms(self) -> bool:
        return not self.structural_findings and all(
            r.holds for r in self.constraint_results)

    def result(self, name: str) -> ConstraintResult:
        for r in self.constraint_results:
            if r.name == name:
                return r
        raise KeyError(name)

    def failed(self) -> list[ConstraintResult]:
        return [r for r in self.constraint_results if not r.holds]

    def summary(self) -> str:
        n = len(self.constraint_results)
        k = sum(r.holds for r in self.constraint_results)
        return "%d/%d constraints hold" % (k, n)


def universal_prefix(f: Formula):
    """Split ``f`` into its leading universal binders and the matrix.

    Negated existentials count as universal binders (with flipped polarity).
    Returns ``(binders, matrix, polarity)``: ``f`` holds iff the matrix has
    truth value ``polarity`` under every assignment of the binders.
    """
    binders = []
    polarity = True
    while True:
        if isinstance(f, Forall) and polarity:
            binders.append((f.var, f.type))
            f = f.body
        elif isinstance(f, Exists) and not polarity:
            binders.append((f.var, f.type))
            f = f.body
        elif isinstance(f, Not):
            polarity = not polarity
            f = f.body
        else:
            return binders, f, polarity


def find_witness(ev: Evaluator, f: Formula):
    """First assignment of the outermost universal variables that falsifies
    ``f``, scanning each variable's range in sorted order."""
    binders, matrix, polarity = universal_prefix(f)
    if not binders:
        return None
    ranges = [ev.range_of(t) for _, t in binders]
    names = [v for v, _ in binders]
    for combo in itertools.product(*ranges):
        env = dict(zip(names, combo))
        if ev.holds(matrix, env) != polarity:
            return tuple(zip(names, combo))
    return None


def check_conformance(m: Structure) -> ConformanceReport:
    """Structural validation followed by evaluation of every constraint."""
    findings = tuple(validate_structure(m))
    ev = Evaluator(m.language, m)
    results = []
    for c in m.language.constraints:
        try:
            ok = ev.holds(c.formula, {})
            witness = None if ok else find_witness(ev, c.formula)
            results.append(ConstraintResult(c.name, ok, witness))
        except EvaluationError as exc:
            results.append(ConstraintResult(c.name, False, None, str(exc)))
    return ConformanceReport(findings, tuple(results))
