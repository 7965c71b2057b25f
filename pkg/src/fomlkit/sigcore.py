"""Signatures of modeling languages: types, value domains, symbols, constraints.

A signature is declarative and immutable. :func:`validate_signature` reports
every broken invariant as a :class:`Finding` rather than raising, so tools can
show all problems at once.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Iterator

from .errors import SignatureError

IDENT_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")

# Interpreted symbols shipped with the naturals; see ``formula`` for typing.
BUILTIN_FUNCTIONS = frozenset({"plus", "minus", "last"})
BUILTIN_RELATIONS = frozenset({"lt", "member"})
RESERVED_NAMES = BUILTIN_FUNCTIONS | BUILTIN_RELATIONS


class Kind(enum.Enum):
    OBJECT = "object"
    RELATION = "relation"
    DATA = "data"


KIND_ORDER = {Kind.OBJECT: 0, Kind.RELATION: 1, Kind.DATA: 2}


@dataclass(frozen=True)
class TypeName:
    name: str
    kind: Kind


# -- value domains ---------------------------------------------------------


class ValueDomain:
    """Base class of data-type expressions."""

    def children(self) -> tuple["ValueDomain", ...]:
        return ()

    def walk(self) -> Iterator["ValueDomain"]:
        yield self
        for c in self.children():
            yield from c.walk()


@dataclass(frozen=True)
class EnumDomain(ValueDomain):
    constants: tuple[str, ...]


@dataclass(frozen=True)
class NatDomain(ValueDomain):
    pass


@dataclass(frozen=True)
class RefDomain(ValueDomain):
    """Reference to a declared type. Data-type targets stand for their domain."""

    target: str


@dataclass(frozen=True)
class ProductDomain(ValueDomain):
    items: tuple[ValueDomain, ...]

    def children(self):
        return self.items


@dataclass(frozen=True)
class UnionDomain(ValueDomain):
    alternatives: tuple[ValueDomain, ...]

    def children(self):
        return self.alternatives


@dataclass(frozen=True)
class SetDomain(ValueDomain):
    inner: ValueDomain

    def children(self):
        return (self.inner,)


@dataclass(frozen=True)
class ListDomain(ValueDomain):
    inner: ValueDomain

    def children(self):
        return (self.inner,)


@dataclass(frozen=True)
class NothingDomain(ValueDomain):
    """Type of the empty set literal's members; conforms to every domain."""


def product(items: Iterable[ValueDomain]) -> ValueDomain:
    items = tuple(items)
    if len(items) == 1:
        return items[0]
    return ProductDomain(items)


def referenced_types(dom: ValueDomain) -> set[str]:
    return {d.target for d in dom.walk() if isinstance(d, RefDomain)}


# -- symbols ---------------------------------------------------------------


class Role(enum.Enum):
    REL_SOURCE = "source"
    REL_TARGET = "target"
    ATTRIBUTE = "attribute"
    AUXILIARY = "auxiliary"


def source_symbol(rel_type: str) -> str:
    return "src_" + rel_type


def target_symbol(rel_type: str) -> str:
    return "tgt_" + rel_type


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    domain: tuple[str, ...]
    codomain: ValueDomain
    role: Role = Role.AUXILIARY
    builtin: str | None = None


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    args: tuple[ValueDomain, ...]
    builtin: str | None = None


@dataclass(frozen=True)
class Constraint:
    name: str
    formula: Any


# -- signature -------------------------------------------------------------


def _type_key(t: TypeName):
    return (KIND_ORDER[t.kind], t.name)


@dataclass(frozen=True)
class SignatureDecl:
    """Σ plus postulates. Collections are canonicalised (sorted) on creation,
    so two declarations listing the same content compare equal."""

    name: str = "L"
    types: tuple[TypeName, ...] = ()
    domains: tuple[tuple[str, ValueDomain], ...] = ()
    inh: tuple[tuple[str, str], ...] = ()
    functions: tuple[FunctionSymbol, ...] = ()
    relations: tuple[RelationSymbol, ...] = ()
    constraints: tuple[Constraint, ...] = ()
    events: tuple[Any, ...] = ()

    def __post_init__(self):
        setattr_ = object.__setattr__
        setattr_(self, "types", tuple(sorted(self.types, key=_type_key)))
        domains = self.domains.items() if isinstance(self.domains, dict) \
            else self.domains
        setattr_(self, "domains",
                 tuple(sorted(domains, key=lambda kv: kv[0])))
        setattr_(self, "inh", tuple(sorted(set(self.inh))))
        setattr_(self, "functions",
                 tuple(sorted(self.functions, key=lambda f: f.name)))
        setattr_(self, "relations",
                 tuple(sorted(self.relations, key=lambda r: r.name)))
        setattr_(self, "constraints",
                 tuple(sorted(self.constraints, key=lambda c: c.name)))
        setattr_(self, "events",
                 tuple(sorted(self.events, key=lambda e: e.name)))

    # lookups --------------------------------------------------------------

    @cached_property
    def type_map(self) -> dict[str, TypeName]:
        return {t.name: t for t in self.types}

    @cached_property
    def domain_map(self) -> dict[str, ValueDomain]:
        return dict(self.domains)

    @cached_property
    def function_map(self) -> dict[str, FunctionSymbol]:
        return {f.name: f for f in self.functions}

    @cached_property
    def relation_map(self) -> dict[str, RelationSymbol]:
        return {r.name: r for r in self.relations}

    @cached_property
    def event_map(self) -> dict:
        return {e.name: e for e in self.events}

    @cached_property
    def constant_map(self) -> dict[str, EnumDomain]:
        """Constant name -> the enumeration declaring it (first wins)."""
        out: dict[str, EnumDomain] = {}
        for dom in self._all_domains():
            for d in dom.walk():
                if isinstance(d, EnumDomain):
                    for c in d.constants:
                        out.setdefault(c, d)
        return out

    def _all_domains(self) -> Iterator[ValueDomain]:
        for _, d in self.domains:
            yield d
        for f in self.functions:
            yield f.codomain
        for r in self.relations:
            yield from r.args

    def names_of(self, kind: Kind) -> list[str]:
        return [t.name for t in self.types if t.kind is kind]

    def kind_of(self, name: str) -> Kind | None:
        t = self.type_map.get(name)
        return t.kind if t else None

    def source_of(self, rel_type: str) -> FunctionSymbol | None:
        for f in self.functions:
            if f.role is Role.REL_SOURCE and f.domain == (rel_type,):
                return f
        return None

    def target_of(self, rel_type: str) -> FunctionSymbol | None:
        for f in self.functions:
            if f.role is Role.REL_TARGET and f.domain == (rel_type,):
                return f
        return None

    def attributes_of(self, type_name: str) -> list[FunctionSymbol]:
        """Attribute symbols applicable to elements of ``type_name``."""
        return [f for f in self.functions
                if f.role is Role.ATTRIBUTE
                and is_subtype(self, type_name, f.domain[0])]

    @cached_property
    def _closure(self) -> frozenset[tuple[str, str]]:
        return frozenset(transitive_closure(self.inh))

    @cached_property
    def _is_cyclic(self) -> bool:
        return any(a == b for a, b in self._closure)

    def replace(self, **changes) -> "SignatureDecl":
        from dataclasses import replace
        return replace(self, **changes)


def transitive_closure(pairs: Iterable[tuple[str, str]]) -> set[tuple[str, str]]:
    succ: dict[str, set[str]] = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    out: set[tuple[str, str]] = set()
    for start in succ:
        seen: set[str] = set()
        stack = list(succ[start])
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(succ.get(n, ()))
        out.update((start, n) for n in seen)
    return out


def subtype_order(sig: SignatureDecl) -> frozenset[tuple[str, str]]:
    """The strict order generated by the declared inheritance edges."""
    if sig._is_cyclic:
        cyc = sorted(a for a, b in sig._closure if a == b)
        raise SignatureError("inheritance cycle through %s" % ", ".join(cyc),
                             code="CYCLIC_INHERITANCE")
    return sig._closure


def is_subtype(sig: SignatureDecl, sub: str, sup: str) -> bool:
    for n in (sub, sup):
        if n not in sig.type_map:
            raise SignatureError("unknown type %r" % n, code="UNKNOWN_TYPE")
    return sub == sup or (sub, sup) in sig._closure


def supertypes(sig: SignatureDecl, name: str) -> set[str]:
    """Reflexive supertypes of ``name``."""
    return {name} | {b for a, b in sig._closure if a == name}


def subtypes(sig: SignatureDecl, name: str) -> set[str]:
    """Reflexive subtypes of ``name``."""
    return {name} | {a for a, b in sig._closure if b == name}


# -- validation ------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    code: str
    subject: str
    message: str = ""

    def __str__(self) -> str:
        return "%s [%s] %s" % (self.code, self.subject, self.message)


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.findings

    def codes(self) -> list[str]:
        return [f.code for f in self.findings]

    def __str__(self) -> str:
        if not self.findings:
            return "no findings"
        return "\n".join(str(f) for f in self.findings)


def _domain_findings(sig: SignatureDecl, owner: str,
                     dom: ValueDomain) -> Iterator[Finding]:
    for d in dom.walk():
        if isinstance(d, EnumDomain):
            if len(set(d.constants)) != len(d.constants):
                yield Finding("DUPLICATE_CONSTANT", owner,
                              "enumeration repeats a constant")
            for c in d.constants:
                if not IDENT_RE.match(c):
                    yield Finding("INVALID_IDENTIFIER", c, "constant name")
        elif isinstance(d, ProductDomain) and len(d.items) < 2:
            yield Finding("BAD_ARITY", owner, "product needs >= 2 components")
        elif isinstance(d, UnionDomain) and len(d.alternatives) < 2:
            yield Finding("BAD_ARITY", owner, "union needs >= 2 alternatives")
        elif isinstance(d, RefDomain) and d.target not in sig.type_map:
            yield Finding("UNDECLARED_TYPE", owner,
                          "reference to undeclared type %r" % d.target)
        elif isinstance(d, NothingDomain):
            yield Finding("BAD_DOMAIN", owner, "internal empty domain")


def _recursive_data_types(sig: SignatureDecl) -> set[str]:
    deps = {n: {t for t in referenced_types(d)
                if sig.kind_of(t) is Kind.DATA}
            for n, d in sig.domains}
    edges = [(a, b) for a, bs in deps.items() for b in bs]
    return {a for a, b in transitive_closure(edges) if a == b}


def _function_findings(sig: SignatureDecl,
                       f: FunctionSymbol) -> Iterator[Finding]:
    if not f.domain:
        yield Finding("BAD_ARITY", f.name, "function needs >= 1 argument")
    for t in f.domain:
        if t not in sig.type_map:
            yield Finding("UNDECLARED_TYPE", f.name,
                          "domain type %r undeclared" % t)
    yield from _domain_findings(sig, f.name, f.codomain)
    kinds = [sig.kind_of(t) for t in f.domain]
    if f.role in (Role.REL_SOURCE, Role.REL_TARGET):
        target_kind = sig.kind_of(f.codomain.target) \
            if isinstance(f.codomain, RefDomain) else None
        if kinds != [Kind.RELATION] or target_kind is not Kind.OBJECT:
            yield Finding("BAD_ROLE_SIGNATURE", f.name,
                          "endpoint symbols map a relation type to an "
                          "object type")
    elif f.role is Role.ATTRIBUTE:
        if len(kinds) != 1 or kinds[0] not in (Kind.OBJECT, Kind.RELATION):
            yield Finding("BAD_ROLE_SIGNATURE", f.name,
                          "attributes belong to one object or relation type")
    if f.builtin is not None:
        if f.builtin not in BUILTIN_FUNCTIONS:
            yield Finding("UNKNOWN_BUILTIN", f.name, repr(f.builtin))
        elif f.role is not Role.AUXILIARY:
            yield Finding("BAD_ROLE_SIGNATURE", f.name,
                          "only auxiliary symbols can be interpreted")


def validate_signature(sig: SignatureDecl) -> ValidationReport:
    """Check every signature invariant; never raises."""
    out: list[Finding] = []

    if not IDENT_RE.match(sig.name or ""):
        out.append(Finding("INVALID_IDENTIFIER", sig.name or "",
                           "language name"))
    seen: set[str] = set()
    for t in sig.types:
        if not IDENT_RE.match(t.name):
            out.append(Finding("INVALID_IDENTIFIER", t.name, "type name"))
        if t.name in seen:
            out.append(Finding("DUPLICATE_NAME", t.name, "type declared twice"))
        seen.add(t.name)

    # data domains
    domain_names = [n for n, _ in sig.domains]
    for n in sorted({n for n in domain_names if domain_names.count(n) > 1}):
        out.append(Finding("DUPLICATE_NAME", n, "domain given twice"))
    for n, dom in sig.domains:
        if sig.kind_of(n) is not Kind.DATA:
            out.append(Finding("UNDECLARED_TYPE", n,
                               "domain given for a non-data type"))
        out.extend(_domain_findings(sig, n, dom))
    for n in sig.names_of(Kind.DATA):
        if n not in sig.domain_map:
            out.append(Finding("MISSING_DOMAIN", n, "data type has no domain"))
    for n in sorted(_recursive_data_types(sig)):
        out.append(Finding("RECURSIVE_DOMAIN", n,
                           "domain refers back to itself"))

    constants: dict[str, int] = {}
    for dom in sig._all_domains():
        for d in dom.walk():
            if isinstance(d, EnumDomain):
                for c in set(d.constants):
                    constants[c] = constants.get(c, 0) + 1
    for c in sorted(c for c, k in constants.items() if k > 1):
        out.append(Finding("DUPLICATE_CONSTANT", c,
                           "constant declared by several enumerations"))

    # inheritance
    for a, b in sig.inh:
        for n in (a, b):
            if sig.kind_of(n) is not Kind.OBJECT:
                out.append(Finding("BAD_INHERITANCE", n,
                                   "inheritance relates object types only"))
    if sig._is_cyclic:
        for n in sorted({a for a, b in sig._closure if a == b}):
            out.append(Finding("CYCLIC_INHERITANCE", n,
                               "type inherits from itself"))

    # symbols
    sym_seen: set[str] = set()
    for s in list(sig.functions) + list(sig.relations):
        if not IDENT_RE.match(s.name):
            out.append(Finding("INVALID_IDENTIFIER", s.name, "symbol name"))
        if s.name in sym_seen:
            out.append(Finding("DUPLICATE_NAME", s.name,
                               "symbol declared twice"))
        if s.name in RESERVED_NAMES:
            out.append(Finding("RESERVED_NAME", s.name,
                               "name of an interpreted built-in"))
        sym_seen.add(s.name)
    for f in sig.functions:
        out.extend(_function_findings(sig, f))
    for r in sig.relations:
        if len(r.args) < 2:
            out.append(Finding("BAD_ARITY", r.name,
                               "relation symbols need >= 2 arguments"))
        for a in r.args:
            out.extend(_domain_findings(sig, r.name, a))
        if r.builtin is not None and r.builtin not in BUILTIN_RELATIONS:
            out.append(Finding("UNKNOWN_BUILTIN", r.name, repr(r.builtin)))
    for rel in sig.names_of(Kind.RELATION):
        for role, label in ((Role.REL_SOURCE, "source"),
                            (Role.REL_TARGET, "target")):
            n = sum(1 for f in sig.functions
                    if f.role is role and f.domain == (rel,))
            if n == 0:
                out.append(Finding("MISSING_ENDPOINT", rel,
                                   "no %s symbol" % label))
            elif n > 1:
                out.append(Finding("DUPLICATE_ENDPOINT", rel,
                                   "%d %s symbols" % (n, label)))

    # constraints and events need a sound declaration part to type-check
    if not out:
        out.extend(_sentence_findings(sig))
    return ValidationReport(tuple(out))


def _sentence_findings(sig: SignatureDecl) -> Iterator[Finding]:
    from .formula import builtin_shape_issues, free_variables, typecheck_formula
    from .errors import FormulaTypeError

    for s in list(sig.functions) + list(sig.relations):
        for msg in builtin_shape_issues(sig, s):
            yield Finding("BAD_BUILTIN_SHAPE", s.name, msg)
    names: set[str] = set()
    for c in sig.constraints:
        if not IDENT_RE.match(c.name):
            yield Finding("INVALID_IDENTIFIER", c.name, "constraint name")
        if c.name in names:
            yield Finding("DUPLICATE_NAME", c.name, "constraint declared twice")
        names.add(c.name)
        free = free_variables(c.formula)
        if free:
            yield Finding("CONSTRAINT_NOT_CLOSED", c.name,
                          "free variables: " + ", ".join(sorted(free)))
            continue
        try:
            typecheck_formula(sig, c.formula)
        except FormulaTypeError as exc:
            for e in exc.errors:
                yield Finding(e.code, c.name, e.message)
    if sig.events:
        from .events import check_event
        for ev in sig.events:
            for problem in check_event(sig, ev):
                yield Finding(problem.code, ev.name, problem.message)
