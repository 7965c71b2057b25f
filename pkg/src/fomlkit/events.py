"""Structural events on arbitrary constructs and domain events on models."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence, Union

from .errors import EvaluationError, EventError, FormulaTypeError
from .formula import (
    Apply, Eq, Evaluator, Exists, Forall, Formula, Implies, RelApp, Term,
    Truth, Var, NatLit, conforms, describe, typecheck_formula, typecheck_term,
    And, unfold,
)
from .sigcore import Kind, NatDomain, RefDomain, Role, SignatureDecl, is_subtype
from .structure import Structure, check_conformance, value_in_domain
from .values import element_refs


# -- structural events -----------------------------------------------------


@dataclass(frozen=True)
class Create:
    type_name: str
    element: str
    source: str | None = None
    target: str | None = None
    attributes: tuple[tuple[str, Any], ...] = ()


@dataclass(frozen=True)
class SetAttr:
    element: str
    attribute: str
    value: Any


@dataclass(frozen=True)
class Delete:
    element: str
    cascade: bool = False


StructuralEvent = Union[Create, SetAttr, Delete]


def _check_value(m: Structure, sym, value: Any) -> None:
    if not value_in_domain(m, value, sym.codomain):
        raise EventError("%r does not fit %s of %s"
                         % (value, describe(sym.codomain), sym.name),
                         code="VALUE_DOMAIN_MISMATCH")


def _attribute_for(m: Structure, element: str, attr: str):
    sig = m.language
    sym = sig.function_map.get(attr)
    if sym is None or sym.role is not Role.ATTRIBUTE:
        raise EventError("%r is not an attribute" % attr, code="UNKNOWN_SYMBOL")
    if not is_subtype(sig, m.elements[element], sym.domain[0]):
        raise EventError("%s does not apply to %s of type %s"
                         % (attr, element, m.elements[element]),
                         code="UNKNOWN_SYMBOL")
    return sym


def _create(m: Structure, e: Create) -> Structure:
    sig = m.language
    kind = sig.kind_of(e.type_name)
    if kind not in (Kind.OBJECT, Kind.RELATION):
        raise EventError("cannot create elements of %r" % e.type_name,
                         code="UNKNOWN_SYMBOL")
    if e.element in m.elements:
        raise EventError("element %r already exists" % e.element,
                         code="DUPLICATE_ELEMENT")
    elements, functions, relations = m.mutable_parts()
    elements[e.element] = e.type_name
    if kind is Kind.RELATION:
        if e.source is None or e.target is None:
            raise EventError("relation %r needs a source and a target"
                             % e.element, code="MISSING_ENDPOINT")
        for end, sym in ((e.source, sig.source_of(e.type_name)),
                         (e.target, sig.target_of(e.type_name))):
            if end not in elements:
                raise EventError("unknown element %r" % end,
                                 code="UNKNOWN_ELEMENT")
            functions.setdefault(sym.name, {})[(e.element,)] = end
    elif e.source is not None or e.target is not None:
        raise EventError("object %r cannot have endpoints" % e.element,
                         code="VALUE_DOMAIN_MISMATCH")
    out = Structure(sig, m.name, elements, functions, relations)
    if kind is Kind.RELATION:
        for sym in (sig.source_of(e.type_name), sig.target_of(e.type_name)):
            _check_value(out, sym, out.functions[sym.name][(e.element,)])
    for attr, value in e.attributes:
        out = _set(out, SetAttr(e.element, attr, value))
    return out


def _set(m: Structure, e: SetAttr) -> Structure:
    if e.element not in m.elements:
        raise EventError("unknown element %r" % e.element,
                         code="UNKNOWN_ELEMENT")
    sym = _attribute_for(m, e.element, e.attribute)
    _check_value(m, sym, e.value)
    if m.functions.get(sym.name, {}).get((e.element,), _MISSING) == e.value:
        return m
    elements, functions, relations = m.mutable_parts()
    functions.setdefault(sym.name, {})[(e.element,)] = e.value
    return Structure(m.language, m.name, elements, functions, relations)


_MISSING = object()


def incident_relations(m: Structure, element: str) -> list[str]:
    """Relation instances having ``element`` as source or target."""
    sig = m.language
    out = []
    for rid, t in m.elements.items():
        if sig.kind_of(t) is not Kind.RELATION:
            continue
        ends = [m.functions.get(sym.name, {}).get((rid,))
                for sym in (sig.source_of(t), sig.target_of(t))]
        if element in ends:
            out.append(rid)
    return out


def _references(m: Structure, doomed: set[str],
                skip_endpoint_of: set[str]) -> list[str]:
    """Descriptions of stored values that point at ``doomed`` elements from
    entries that survive the deletion."""
    sig = m.language
    found = []
    for name, entries in m.functions.items():
        sym = sig.function_map.get(name)
        endpoint = sym is not None and sym.role in (Role.REL_SOURCE,
                                                    Role.REL_TARGET)
        for args, value in entries.items():
            if any(a in doomed for a in element_refs(args)):
                continue
            if endpoint and args[0] in skip_endpoint_of:
                continue
            hit = sorted(set(element_refs(value)) & doomed)
            if hit:
                found.append("%s(%s) -> %s" % (name, ", ".join(map(str, args)),
                                               ", ".join(hit)))
    for name, tuples in m.relations.items():
        for tup in sorted(tuples, key=str):
            hit = sorted(set(element_refs(tup)) & doomed)
            if hit:
                found.append("%s%r -> %s" % (name, tup, ", ".join(hit)))
    return found


def _delete(m: Structure, e: Delete) -> Structure:
    if e.element not in m.elements:
        raise EventError("unknown element %r" % e.element,
                         code="UNKNOWN_ELEMENT")
    incident = incident_relations(m, e.element)
    doomed = {e.element}
    if e.cascade:
        doomed.update(incident)
        refs = _references(m, doomed, set(incident))
    else:
        refs = _references(m, doomed, set())
    if refs:
        raise EventError("deleting %s leaves dangling references: %s"
                         % (e.element, "; ".join(refs)),
                         code="DANGLING_REFERENCE")
    elements, functions, relations = m.mutable_parts()
    for d in doomed:
        del elements[d]
    for name in list(functions):
        functions[name] = {k: v for k, v in functions[name].items()
                           if not set(element_refs(k)) & doomed}
    return Structure(m.language, m.name, elements, functions, relations)


def apply_structural(m: Structure, e: StructuralEvent) -> Structure:
    """Apply one structural event. Constraints are never consulted."""
    if isinstance(e, Create):
        return _create(m, e)
    if isinstance(e, SetAttr):
        return _set(m, e)
    if isinstance(e, Delete):
        return _delete(m, e)
    raise TypeError("not a structural event: %r" % (e,))


def apply_sequence(m: Structure, events: Iterable[StructuralEvent]) -> Structure:
    for e in events:
        m = apply_structural(m, e)
    return m


# -- domain events ---------------------------------------------------------


@dataclass(frozen=True)
class SetStep:
    target: Term
    attribute: str
    value: Term


@dataclass(frozen=True)
class CreateStep:
    type_name: str
    element: str
    source: Term | None = None
    target: Term | None = None
    attributes: tuple[tuple[str, Term], ...] = ()


@dataclass(frozen=True)
class DeleteStep:
    target: Term
    cascade: bool = False


@dataclass(frozen=True)
class ForeachStep:
    """Run ``body`` once per value of ``var`` satisfying ``where``.

    The matching values are computed before the first iteration and visited
    in sorted order.
    """

    var: str
    type_name: str
    where: Formula
    body: tuple


Step = Union[SetStep, CreateStep, DeleteStep, ForeachStep]


@dataclass(frozen=True)
class DomainEvent:
    name: str
    params: tuple[tuple[str, str], ...] = ()
    pre: Formula = Truth(True)
    body: tuple = ()
    post: Formula = Truth(True)


@dataclass(frozen=True)
class Problem:
    code: str
    message: str


def _steps_problems(sig: SignatureDecl, steps, scope: dict[str, str],
                    out: list[Problem]) -> None:
    def term(t, what):
        try:
            return typecheck_term(sig, t, scope)
        except FormulaTypeError as exc:
            out.extend(Problem(i.code, "%s: %s" % (what, i.message))
                       for i in exc.errors)
            return None

    def element_type(t, what):
        ty = term(t, what)
        if ty is None:
            return None
        if not (isinstance(ty, RefDomain)
                and sig.kind_of(ty.target) in (Kind.OBJECT, Kind.RELATION)):
            out.append(Problem("TYPE_MISMATCH", "%s is not an element" % what))
            return None
        return ty.target

    def check_attr(owner, attr, value, what):
        sym = sig.function_map.get(attr)
        if sym is None or sym.role is not Role.ATTRIBUTE:
            out.append(Problem("UNKNOWN_SYMBOL", "%r is not an attribute"
                               % attr))
            return
        if owner is not None and not is_subtype(sig, owner, sym.domain[0]):
            out.append(Problem("TYPE_MISMATCH", "%s does not apply to %s"
                               % (attr, owner)))
        vt = term(value, what)
        if vt is not None and not conforms(sig, vt, sym.codomain):
            out.append(Problem("TYPE_MISMATCH", "%s: %s does not fit %s"
                               % (what, describe(vt), describe(sym.codomain))))

    for st in steps:
        if isinstance(st, SetStep):
            owner = element_type(st.target, "set target")
            check_attr(owner, st.attribute, st.value, "set %s" % st.attribute)
        elif isinstance(st, DeleteStep):
            element_type(st.target, "delete target")
        elif isinstance(st, CreateStep):
            kind = sig.kind_of(st.type_name)
            if kind not in (Kind.OBJECT, Kind.RELATION):
                out.append(Problem("UNKNOWN_SYMBOL", "cannot create %r"
                                   % st.type_name))
                continue
            ends = (st.source, st.target)
            if kind is Kind.RELATION:
                if None in ends:
                    out.append(Problem("MISSING_ENDPOINT", "create %s needs "
                                       "endpoints" % st.type_name))
                else:
                    for t, sym in zip(ends, (sig.source_of(st.type_name),
                                             sig.target_of(st.type_name))):
                        et = element_type(t, "endpoint")
                        if et is not None and not conforms(
                                sig, RefDomain(et), sym.codomain):
                            out.append(Problem("TYPE_MISMATCH",
                                               "endpoint %s does not fit %s"
                                               % (et, describe(sym.codomain))))
            elif ends != (None, None):
                out.append(Problem("TYPE_MISMATCH", "objects have no endpoints"))
            for attr, value in st.attributes:
                check_attr(st.type_name, attr, value, "create %s" % attr)
            scope[st.element] = st.type_name
        elif isinstance(st, ForeachStep):
            if st.type_name not in sig.type_map:
                out.append(Problem("UNKNOWN_SYMBOL", "unknown type %r"
                                   % st.type_name))
                continue
            inner = {**scope, st.var: st.type_name}
            try:
                typecheck_formula(sig, st.where, inner)
            except FormulaTypeError as exc:
                out.extend(Problem(i.code, "where: " + i.message)
                           for i in exc.errors)
            _steps_problems(sig, st.body, inner, out)
        else:
            out.append(Problem("UNKNOWN_SYMBOL", "unknown step %r" % (st,)))


def check_event(sig: SignatureDecl, ev: DomainEvent) -> list[Problem]:
    """Type problems of a domain event against ``sig``."""
    out: list[Problem] = []
    scope: dict[str, str] = {}
    for var, t in ev.params:
        if t not in sig.type_map:
            out.append(Problem("UNKNOWN_SYMBOL", "parameter %s has unknown "
                               "type %r" % (var, t)))
        elif var in scope:
            out.append(Problem("DUPLICATE_NAME", "parameter %s repeated" % var))
        else:
            scope[var] = t
    if out:
        return out
    # created elements stay in scope for later steps and the postcondition
    for label, f in (("pre", ev.pre), ("steps", None), ("post", ev.post)):
        if f is None:
            _steps_problems(sig, ev.body, scope, out)
            continue
        try:
            typecheck_formula(sig, f, scope)
        except FormulaTypeError as exc:
            out.extend(Problem(i.code, "%s: %s" % (label, i.message))
                       for i in exc.errors)
    return out


def _element(ev: Evaluator, t: Term, env) -> str:
    v = ev.value(t, env)
    if not isinstance(v, str):
        raise EventError("%r is not an element" % (v,), code="UNKNOWN_ELEMENT")
    return v


def _run(m: Structure, steps, env: dict, trace: list) -> Structure:
    """Apply ``steps``; a created element's id is bound in ``env`` so that
    later steps of the same block can refer to it."""
    for st in steps:
        ev = Evaluator(m.language, m)
        if isinstance(st, SetStep):
            e = SetAttr(_element(ev, st.target, env), st.attribute,
                        ev.value(st.value, env))
        elif isinstance(st, DeleteStep):
            e = Delete(_element(ev, st.target, env), st.cascade)
        elif isinstance(st, CreateStep):
            src = _element(ev, st.source, env) if st.source else None
            tgt = _element(ev, st.target, env) if st.target else None
            e = Create(st.type_name, st.element, src, tgt,
                       tuple((a, ev.value(v, env)) for a, v in st.attributes))
        elif isinstance(st, ForeachStep):
            matches = [v for v in ev.range_of(st.type_name)
                       if ev.holds(st.where, {**env, st.var: v})]
            for v in matches:
                m = _run(m, st.body, {**env, st.var: v}, trace)
            continue
        else:
            raise TypeError("not a step: %r" % (st,))
        m = apply_structural(m, e)
        trace.append(e)
        if isinstance(e, Create):
            env[e.element] = e.element
    return m


def _bind(m: Structure, d: DomainEvent, args) -> dict[str, Any]:
    if isinstance(args, Mapping):
        missing = [v for v, _ in d.params if v not in args]
        extra = sorted(set(args) - {v for v, _ in d.params})
        if missing or extra:
            raise EventError("%s expects parameters (%s)"
                             % (d.name, ", ".join(v for v, _ in d.params)),
                             code="BAD_ARGUMENT")
        values = [args[v] for v, _ in d.params]
    else:
        values = list(args)
        if len(values) != len(d.params):
            raise EventError("%s takes %d argument(s)"
                             % (d.name, len(d.params)), code="BAD_ARGUMENT")
    ev = Evaluator(m.language, m)
    env = {}
    for (var, t), value in zip(d.params, values):
        if value not in ev.range_of(t):
            raise EventError("%s=%s is not of type %s" % (var, value, t),
                             code="BAD_ARGUMENT")
        env[var] = value
    return env


def run_domain(m: Structure, d: DomainEvent, args
               ) -> tuple[Structure, list[StructuralEvent]]:
    """Like ``apply_domain`` but also returns the structural events applied."""
    report = check_conformance(m)
    if not report.conforms:
        raise EventError("input model does not conform (%s)" % report.summary(),
                         code="INPUT_NONCONFORMANT")
    env = _bind(m, d, args)
    try:
        if not Evaluator(m.language, m).holds(d.pre, env):
            raise EventError("precondition of %s does not hold for %s"
                             % (d.name, _fmt_env(env)),
                             code="PRECONDITION_FAILED")
        trace: list[StructuralEvent] = []
        out = _run(m, d.body, env, trace)
        if not Evaluator(out.language, out).holds(d.post, env):
            raise EventError("postcondition of %s does not hold for %s"
                             % (d.name, _fmt_env(env)),
                             code="POSTCONDITION_FAILED")
    except EvaluationError as exc:
        raise EventError(exc.args[0], code=exc.code) from exc
    result = check_conformance(out)
    if not result.conforms:
        bad = [r.name for r in result.failed()] + \
            [f.code for f in result.structural_findings]
        raise EventError("result violates %s" % ", ".join(bad),
                         code="RESULT_NONCONFORMANT")
    return out, trace


def apply_domain(m: Structure, d: DomainEvent, args) -> Structure:
    """Apply a domain event to a conforming model; the result conforms."""
    return run_domain(m, d, args)[0]


def enabled(m: Structure, d: DomainEvent) -> list[tuple]:
    """Argument tuples whose precondition holds, in sorted order."""
    ev = Evaluator(m.language, m)
    names = [v for v, _ in d.params]
    out = []
    for combo in itertools.product(*(ev.range_of(t) for _, t in d.params)):
        if ev.holds(d.pre, dict(zip(names, combo))):
            out.append(combo)
    return out


def _fmt_env(env: Mapping[str, Any]) -> str:
    return ", ".join("%s=%s" % kv for kv in env.items()) or "()"


def make_fire_event(sig: SignatureDecl) -> DomainEvent:
    """Token-game firing ``fire(t: Transition)`` for a Petri net language
    with types Place, Transition, Arc and a natural-valued Tokens on Place."""
    tokens = sig.function_map.get("Tokens")
    src, tgt = sig.source_of("Arc"), sig.target_of("Arc")
    ok = (sig.kind_of("Place") is Kind.OBJECT
          and sig.kind_of("Transition") is Kind.OBJECT
          and sig.kind_of("Arc") is Kind.RELATION
          and src is not None and tgt is not None
          and tokens is not None and tokens.role is Role.ATTRIBUTE
          and is_subtype(sig, "Place", tokens.domain[0])
          and isinstance(unfold(sig, tokens.codomain), NatDomain))
    if not ok:
        raise EventError("language lacks Place, Transition, Arc or Tokens",
                         code="SHAPE_MISMATCH")

    def link(a, b):
        return Exists("u", "Arc", And(Eq(Apply(src.name, (Var("u"),)), Var(a)),
                                      Eq(Apply(tgt.name, (Var("u"),)), Var(b))))

    tok = Apply("Tokens", (Var("p"),))
    pre = Forall("p", "Place", Implies(link("p", "t"),
                                       RelApp("lt", (NatLit(0), tok))))
    body = (
        ForeachStep("p", "Place", link("p", "t"),
                    (SetStep(Var("p"), "Tokens",
                             Apply("minus", (tok, NatLit(1)))),)),
        ForeachStep("p", "Place", link("t", "p"),
                    (SetStep(Var("p"), "Tokens",
                             Apply("plus", (tok, NatLit(1)))),)),
    )
    return DomainEvent("fire", (("t", "Transition"),), pre, body, Truth(True))


def event_for(sig: SignatureDecl, name: str) -> DomainEvent:
    """The language's declared event ``name``; ``fire`` falls back to the
    built-in Petri firing."""
    if name in sig.event_map:
        return sig.event_map[name]
    if name == "fire":
        return make_fire_event(sig)
    raise EventError("language %s declares no event %r" % (sig.name, name),
                     code="UNKNOWN_SYMBOL")
