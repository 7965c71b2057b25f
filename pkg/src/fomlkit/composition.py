"""Restricting a language to a view and fusing two languages into one."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import CompositionError, FormulaTypeError
from .formula import (
    Apply, Eq, Exists, Forall, Implies, Var, mentions, rename,
    typecheck_formula,
)
from .sigcore import (
    Constraint, EnumDomain, FunctionSymbol, Kind, RefDomain, RelationSymbol,
    Role, SignatureDecl, TypeName, ValueDomain, referenced_types,
    source_symbol, target_symbol, transitive_closure, validate_signature,
)
from .structure import Structure
from .values import element_refs


# -- renaming --------------------------------------------------------------


def rename_domain(dom: ValueDomain, mapping: Mapping[str, str]) -> ValueDomain:
    from dataclasses import fields, replace
    if isinstance(dom, RefDomain):
        return RefDomain(mapping.get(dom.target, dom.target))
    if isinstance(dom, EnumDomain):
        return EnumDomain(tuple(mapping.get(c, c) for c in dom.constants))
    changes = {}
    for f in fields(dom):
        v = getattr(dom, f.name)
        if isinstance(v, ValueDomain):
            changes[f.name] = rename_domain(v, mapping)
        elif isinstance(v, tuple):
            changes[f.name] = tuple(rename_domain(x, mapping) for x in v)
    return replace(dom, **changes) if changes else dom


def _rename_steps(steps, mapping):
    from dataclasses import replace
    from .events import CreateStep, DeleteStep, ForeachStep, SetStep
    out = []
    for st in steps:
        if isinstance(st, SetStep):
            st = SetStep(rename(st.target, mapping),
                         mapping.get(st.attribute, st.attribute),
                         rename(st.value, mapping))
        elif isinstance(st, DeleteStep):
            st = replace(st, target=rename(st.target, mapping))
        elif isinstance(st, CreateStep):
            st = CreateStep(
                mapping.get(st.type_name, st.type_name), st.element,
                rename(st.source, mapping) if st.source else None,
                rename(st.target, mapping) if st.target else None,
                tuple((mapping.get(a, a), rename(v, mapping))
                      for a, v in st.attributes))
        elif isinstance(st, ForeachStep):
            st = ForeachStep(st.var, mapping.get(st.type_name, st.type_name),
                             rename(st.where, mapping),
                             tuple(_rename_steps(st.body, mapping)))
        out.append(st)
    return out


def endpoint_renames(sig: SignatureDecl,
                     mapping: Mapping[str, str]) -> dict[str, str]:
    """Extend a type renaming so that the source/target symbols of renamed
    relation types follow their type's new name."""
    out = dict(mapping)
    for rel in sig.names_of(Kind.RELATION):
        new = mapping.get(rel)
        if new is None:
            continue
        for sym, old_name, fresh in (
                (sig.source_of(rel), source_symbol(rel), source_symbol(new)),
                (sig.target_of(rel), target_symbol(rel), target_symbol(new))):
            if sym is not None and sym.name == old_name:
                out.setdefault(old_name, fresh)
    return out


def rename_signature(sig: SignatureDecl, mapping: Mapping[str, str],
                     name: str | None = None) -> SignatureDecl:
    """Rename types, symbols, constants and constraints through ``mapping``.

    Bound variables are never renamed. Source/target symbols named after a
    renamed relation type are renamed along with it.
    """
    from .events import DomainEvent
    m = endpoint_renames(sig, mapping)

    def n(x):
        return m.get(x, x)

    return SignatureDecl(
        name=name or sig.name,
        types=tuple(TypeName(n(t.name), t.kind) for t in sig.types),
        domains=tuple((n(k), rename_domain(d, m)) for k, d in sig.domains),
        inh=tuple((n(a), n(b)) for a, b in sig.inh),
        functions=tuple(FunctionSymbol(n(f.name), tuple(n(d) for d in f.domain),
                                       rename_domain(f.codomain, m), f.role,
                                       f.builtin) for f in sig.functions),
        relations=tuple(RelationSymbol(n(r.name),
                                       tuple(rename_domain(a, m) for a in r.args),
                                       r.builtin) for r in sig.relations),
        constraints=tuple(Constraint(n(c.name), rename(c.formula, m))
                          for c in sig.constraints),
        events=tuple(DomainEvent(e.name, tuple((v, n(t)) for v, t in e.params),
                                 rename(e.pre, m),
                                 tuple(_rename_steps(e.body, m)),
                                 rename(e.post, m)) for e in sig.events),
    )


# -- restriction -----------------------------------------------------------


def transitive_reduction(pairs: Iterable[tuple[str, str]]) -> set[tuple[str, str]]:
    """Edges of an acyclic relation not implied by other edges."""
    closure = transitive_closure(pairs)
    nodes = {x for p in closure for x in p}
    return {(a, b) for a, b in closure
            if not any((a, c) in closure and (c, b) in closure for c in nodes)}


def _event_mentions(ev) -> tuple[set[str], set[str]]:
    from .events import CreateStep, ForeachStep, SetStep
    types = {t for _, t in ev.params}
    symbols: set[str] = set()
    nodes = [ev.pre, ev.post]
    stack = list(ev.body)
    while stack:
        st = stack.pop()
        for attr in ("target", "value", "source", "where"):
            v = getattr(st, attr, None)
            if v is not None and not isinstance(v, (str, bool)):
                nodes.append(v)
        if isinstance(st, SetStep):
            symbols.add(st.attribute)
        if isinstance(st, CreateStep):
            types.add(st.type_name)
            symbols.update(a for a, _ in st.attributes)
            nodes.extend(v for _, v in st.attributes)
        if isinstance(st, ForeachStep):
            types.add(st.type_name)
            stack.extend(st.body)
    for node in nodes:
        mm = mentions(node)
        types |= mm.types
        symbols |= mm.symbols
    return types, symbols


def restrict_signature(sig: SignatureDecl, keep: Iterable[str],
                       reclose: bool = False) -> SignatureDecl:
    """The sublanguage over the types in ``keep``.

    Relation types lose their place when an endpoint type is dropped, data
    types when their domain refers to a dropped type, and symbols and
    constraints whenever they mention anything dropped. Inheritance keeps the
    direct edges between kept types; with ``reclose`` edges through dropped
    intermediates are restored.
    """
    keep = set(keep)
    unknown = sorted(keep - set(sig.type_map))
    if unknown:
        raise CompositionError("unknown types: %s" % ", ".join(unknown),
                               code="UNKNOWN_TYPE")
    kept = set(keep)
    changed = True
    while changed:
        changed = False
        for t in sig.types:
            if t.name not in kept:
                continue
            if t.kind is Kind.RELATION:
                deps = set()
                for sym in (sig.source_of(t.name), sig.target_of(t.name)):
                    if sym is not None:
                        deps |= referenced_types(sym.codomain)
            elif t.kind is Kind.DATA and t.name in sig.domain_map:
                deps = referenced_types(sig.domain_map[t.name])
            else:
                continue
            if not deps <= kept:
                kept.discard(t.name)
                changed = True

    def dom_ok(d: ValueDomain) -> bool:
        return referenced_types(d) <= kept

    functions = tuple(f for f in sig.functions
                      if set(f.domain) <= kept and dom_ok(f.codomain))
    relations = tuple(r for r in sig.relations if all(map(dom_ok, r.args)))
    domains = tuple((k, d) for k, d in sig.domains if k in kept)
    types = tuple(t for t in sig.types if t.name in kept)
    if reclose:
        closure = transitive_closure(sig.inh)
        inh = transitive_reduction((a, b) for a, b in closure
                                   if a in kept and b in kept)
    else:
        inh = {(a, b) for a, b in sig.inh if a in kept and b in kept}

    dropped_symbols = ({f.name for f in sig.functions}
                       - {f.name for f in functions}) | \
        ({r.name for r in sig.relations} - {r.name for r in relations})
    dropped_types = set(sig.type_map) - kept
    partial = SignatureDecl(sig.name, types, domains, tuple(inh), functions,
                            relations)
    live_constants = set(partial.constant_map)
    dead_constants = set(sig.constant_map) - live_constants

    def alive(node) -> bool:
        mm = mentions(node)
        return not (mm.types & dropped_types or mm.symbols & dropped_symbols
                    or mm.constants & dead_constants)

    constraints = tuple(c for c in sig.constraints if alive(c.formula))
    events = []
    for ev in sig.events:
        ts, ss = _event_mentions(ev)
        if not (ts & dropped_types or ss & dropped_symbols):
            events.append(ev)
    return partial.replace(constraints=constraints, events=tuple(events))


def restrict_model(m: Structure, sub: SignatureDecl) -> Structure:
    """Project ``m`` onto the sublanguage ``sub``."""
    sig = m.language
    same = (set(sub.type_map) <= set(sig.type_map)
            and all(sig.type_map[t].kind is sub.type_map[t].kind
                    for t in sub.type_map)
            and all(sig.function_map.get(f.name) == f for f in sub.functions)
            and all(sig.relation_map.get(r.name) == r for r in sub.relations))
    if not same:
        raise CompositionError("%s is not a restriction of %s"
                               % (sub.name, sig.name),
                               code="SIGNATURE_MISMATCH")
    elements = {e: t for e, t in m.elements.items() if t in sub.type_map}
    gone = set(m.elements) - set(elements)
    functions = {}
    for name, entries in m.functions.items():
        if name in sub.function_map:
            functions[name] = {k: v for k, v in entries.items()
                               if not set(element_refs(k)) & gone}
    relations = {name: {t for t in tuples if not set(element_refs(t)) & gone}
                 for name, tuples in m.relations.items()
                 if name in sub.relation_map}
    return Structure(sub, m.name, elements, functions, relations)


# -- fusion ----------------------------------------------------------------


@dataclass(frozen=True)
class Bridge:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class FusionBinding:
    """How two languages are put together.

    ``renames`` holds ``(tag, old, new)`` where tag is ``left``/``right`` or
    the name of the language whose declaration is renamed.
    """

    name: str | None = None
    renames: tuple[tuple[str, str, str], ...] = ()
    bridges: tuple[Bridge, ...] = ()
    types: tuple[TypeName, ...] = ()
    domains: tuple[tuple[str, ValueDomain], ...] = ()
    functions: tuple[FunctionSymbol, ...] = ()
    relations: tuple[RelationSymbol, ...] = ()
    constraints: tuple[Constraint, ...] = ()
    events: tuple = field(default=())


def _all_names(sig: SignatureDecl) -> set[str]:
    return (set(sig.type_map) | set(sig.function_map) | set(sig.relation_map)
            | set(sig.constant_map))


def bijectivity_constraints(b: Bridge) -> tuple[Constraint, Constraint]:
    i = b.name

    def ap(v):
        return Apply(i, (Var(v),))

    inj = Forall("x", b.source, Forall("y", b.source, Implies(
        Eq(ap("x"), ap("y")), Eq(Var("x"), Var("y")))))
    sur = Forall("y", b.target, Exists("x", b.source, Eq(ap("x"), Var("y"))))
    return Constraint(i + "_injective", inj), Constraint(i + "_surjective", sur)


def _merge(kind: str, left: dict, right: dict) -> dict:
    out = dict(left)
    for name, item in right.items():
        if name in out and out[name] != item:
            raise CompositionError(
                "%s %r is declared differently in both languages" % (kind, name),
                code="UNRESOLVED_NAME_COLLISION")
        out[name] = item
    return out


def fuse_signatures(a: SignatureDecl, b: SignatureDecl,
                    binding: FusionBinding | None = None) -> SignatureDecl:
    """Unite two languages.

    Object and relation types present in both must be renamed apart on at
    least one side. Data types and symbols that coincide exactly are shared.
    Each bridge ``i : T1 -> T2`` becomes an attribute with generated
    injectivity and surjectivity constraints.
    """
    binding = binding or FusionBinding()
    sides = {"left": 0, "right": 1}
    maps: list[dict[str, str]] = [{}, {}]
    collide = _all_names(a) & _all_names(b)
    for tag, old, new in binding.renames:
        if tag in sides:
            side = sides[tag]
        elif tag == a.name and tag != b.name:
            side = 0
        elif tag == b.name and tag != a.name:
            side = 1
        else:
            raise CompositionError("rename tag %r names neither language "
                                   "unambiguously" % tag, code="BAD_BINDING")
        if old not in collide:
            raise CompositionError("%r is not a name shared by both languages"
                                   % old, code="BAD_BINDING")
        maps[side][old] = new
    left = rename_signature(a, maps[0])
    right = rename_signature(b, maps[1])

    for t in set(left.type_map) & set(right.type_map):
        lt, rt = left.type_map[t], right.type_map[t]
        if lt.kind is not Kind.DATA or rt.kind is not Kind.DATA:
            raise CompositionError("type %r occurs in both languages and is "
                                   "not renamed" % t,
                                   code="UNRESOLVED_NAME_COLLISION")
    types = _merge("type", left.type_map, right.type_map)
    domains = _merge("data type", left.domain_map, right.domain_map)
    functions = _merge("function", left.function_map, right.function_map)
    relations = _merge("relation", left.relation_map, right.relation_map)
    constraints = _merge("constraint", {c.name: c for c in left.constraints},
                         {c.name: c for c in right.constraints})
    events = _merge("event", left.event_map, right.event_map)
    clash = (set(functions) & set(relations)) | \
        ((set(functions) | set(relations)) & set(types))
    if clash:
        raise CompositionError("names used for different things: %s"
                               % ", ".join(sorted(clash)),
                               code="UNRESOLVED_NAME_COLLISION")

    for br in binding.bridges:
        ends = {(br.source in left.type_map, br.target in right.type_map),
                (br.source in right.type_map, br.target in left.type_map)}
        if (True, True) not in ends:
            raise CompositionError("bridge %s must connect a type of each "
                                   "language" % br.name, code="BAD_BINDING")
        if br.name in functions or br.name in relations:
            raise CompositionError("bridge name %r already in use" % br.name,
                                   code="UNRESOLVED_NAME_COLLISION")
        functions[br.name] = FunctionSymbol(br.name, (br.source,),
                                            RefDomain(br.target),
                                            Role.ATTRIBUTE)
        for c in bijectivity_constraints(br):
            constraints[c.name] = c

    def add(kind, target, items, key):
        for it in items:
            name = key(it)
            if name in target:
                raise CompositionError("%s %r already declared" % (kind, name),
                                       code="UNRESOLVED_NAME_COLLISION")
            target[name] = it

    add("type", types, binding.types, lambda t: t.name)
    add("data type", domains, binding.domains, lambda d: d[0])
    add("function", functions, binding.functions, lambda f: f.name)
    add("relation", relations, binding.relations, lambda r: r.name)

    fused = SignatureDecl(
        name=binding.name or a.name,
        types=tuple(types.values()), domains=tuple(domains.items()),
        inh=tuple(set(left.inh) | set(right.inh)),
        functions=tuple(functions.values()),
        relations=tuple(relations.values()),
        constraints=tuple(constraints.values()),
        events=tuple(events.values()))
    for c in binding.constraints:
        if c.name in constraints:
            raise CompositionError("constraint %r already declared" % c.name,
                                   code="UNRESOLVED_NAME_COLLISION")
        try:
            typecheck_formula(fused, c.formula)
        except FormulaTypeError as exc:
            raise CompositionError("constraint %s: %s" % (c.name, exc),
                                   code="ILL_TYPED_NEW_CONSTRAINT") from exc
        constraints[c.name] = c
    fused = fused.replace(constraints=tuple(constraints.values()),
                          events=tuple(events.values())
                          + tuple(binding.events))
    report = validate_signature(fused)
    if not report.ok:
        raise CompositionError("fused language is invalid: %s" % report,
                               code="INVALID_RESULT")
    return fused
