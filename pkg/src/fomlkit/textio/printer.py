"""Canonical text for languages, models, formulas and values.

Output uses LF line endings and two-space indentation. Declarations are
sorted by kind and then by name, so equal inputs print byte-identically.
"""

from __future__ import annotations

from typing import Any

from ..formula import (
    And, Apply, Const, Eq, Exists, Forall, Formula, Implies, ListMake, NatLit,
    Not, Or, RelApp, SetLit, SetMember, Term, Truth, TupleMake, TupleProj, Var,
)
from ..sigcore import (
    EnumDomain, Kind, ListDomain, NatDomain, ProductDomain, RefDomain, Role,
    SetDomain, SignatureDecl, UnionDomain, ValueDomain, source_symbol,
    target_symbol,
)
from ..values import ListValue, Sym, value_sort_key

INDENT = "  "


# -- values and domains ------------------------------------------------------


def format_value(v: Any) -> str:
    if isinstance(v, Sym):
        return v.name
    if isinstance(v, bool):
        raise TypeError("booleans are not model values")
    if isinstance(v, (int, str)):
        return str(v)
    if isinstance(v, ListValue):
        return "[%s]" % ", ".join(format_value(x) for x in v)
    if isinstance(v, tuple):
        return "(%s)" % ", ".join(format_value(x) for x in v)
    if isinstance(v, frozenset):
        return "{%s}" % ", ".join(format_value(x)
                                  for x in sorted(v, key=value_sort_key))
    raise TypeError("not a model value: %r" % (v,))


def format_domain(d: ValueDomain) -> str:
    if isinstance(d, UnionDomain):
        return " | ".join(_domain_operand(a, union_ok=False)
                          for a in d.alternatives)
    if isinstance(d, ProductDomain):
        return " * ".join(_domain_operand(i, union_ok=False, product_ok=False)
                          for i in d.items)
    return _domain_atom(d)


def _domain_operand(d: ValueDomain, union_ok: bool,
                    product_ok: bool = True) -> str:
    if isinstance(d, UnionDomain) and not union_ok:
        return "(%s)" % format_domain(d)
    if isinstance(d, ProductDomain) and not product_ok:
        return "(%s)" % format_domain(d)
    return format_domain(d)


def _domain_atom(d: ValueDomain) -> str:
    if isinstance(d, NatDomain):
        return "nat"
    if isinstance(d, RefDomain):
        return "ref " + d.target
    if isinstance(d, EnumDomain):
        return "enum {%s}" % ", ".join(d.constants)
    if isinstance(d, (SetDomain, ListDomain)):
        word = "set" if isinstance(d, SetDomain) else "list"
        inner = d.inner
        text = format_domain(inner)
        if isinstance(inner, (UnionDomain, ProductDomain)):
            text = "(%s)" % text
        return "%s of %s" % (word, text)
    raise TypeError("cannot print domain %r" % (d,))


# -- formulas ------------------------------------------------------------------


def format_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, NatLit):
        return str(t.value)
    if isinstance(t, Apply):
        return "%s(%s)" % (t.fn, ", ".join(format_term(a) for a in t.args))
    if isinstance(t, TupleProj):
        return "%s.%d" % (format_term(t.term), t.index)
    if isinstance(t, TupleMake):
        return "(%s)" % ", ".join(format_term(a) for a in t.items)
    if isinstance(t, ListMake):
        return "[%s]" % ", ".join(format_term(a) for a in t.items)
    if isinstance(t, SetLit):
        return "{%s}" % ", ".join(format_term(a) for a in t.items)
    raise TypeError("not a term: %r" % (t,))


def _link(f: Formula) -> str | None:
    """``u: x -> y`` when ``f`` is the expansion of that shorthand."""
    if not (isinstance(f, And) and isinstance(f.left, Eq)
            and isinstance(f.right, Eq)):
        return None
    a, b = f.left.left, f.right.left
    if not (isinstance(a, Apply) and isinstance(b, Apply)
            and len(a.args) == 1 and len(b.args) == 1
            and isinstance(a.args[0], Var) and a.args[0] == b.args[0]
            and a.fn.startswith("src_") and b.fn.startswith("tgt_")
            and a.fn[4:] == b.fn[4:]
            and isinstance(f.left.right, Var) and isinstance(f.right.right, Var)):
        return None
    return "%s: %s -> %s" % (a.args[0].name, format_term(f.left.right),
                             format_term(f.right.right))


_PREC = {Implies: 1, Or: 2, And: 3}


def _prec(f: Formula) -> int:
    if _link(f) is not None:
        return 5
    return _PREC.get(type(f), 5 if not isinstance(f, Not) else 4)


def format_formula(f: Formula, min_prec: int = 0, tail: bool = True) -> str:
    """Print with the fewest parentheses that parse back to ``f``.

    ``tail`` says nothing follows within the current bracket, which is when a
    quantifier body may extend to the right without parentheses.
    """
    if isinstance(f, (Forall, Exists)) or (
            isinstance(f, Not) and isinstance(f.body, Exists)):
        text = _quantifier(f)
        return text if tail else "(%s)" % text
    link = _link(f)
    if link is not None:
        return link
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Eq):
        return "%s = %s" % (format_term(f.left), format_term(f.right))
    if isinstance(f, RelApp):
        return "%s(%s)" % (f.rel, ", ".join(format_term(a) for a in f.args))
    if isinstance(f, SetMember):
        return "%s in %s" % (format_term(f.elem), format_term(f.coll))
    if isinstance(f, Not):
        if isinstance(f.body, Eq):
            return "%s != %s" % (format_term(f.body.left),
                                 format_term(f.body.right))
        return "!" + _wrap(f.body, 4, tail)
    if isinstance(f, (And, Or, Implies)):
        p = _PREC[type(f)]
        op = {And: "&", Or: "|", Implies: "=>"}[type(f)]
        if isinstance(f, Implies):
            left = _wrap(f.left, p + 1, False)
            right = _wrap(f.right, p, tail)
        else:
            left = _wrap(f.left, p, False)
            right = _wrap(f.right, p + 1, tail)
        text = "%s %s %s" % (left, op, right)
        return text if p >= min_prec else "(%s)" % text
    raise TypeError("not a formula: %r" % (f,))


def _wrap(f: Formula, min_prec: int, tail: bool) -> str:
    quant = isinstance(f, (Forall, Exists)) or (
        isinstance(f, Not) and isinstance(f.body, Exists))
    if not quant and _prec(f) < min_prec:
        return "(%s)" % format_formula(f, 0, True)
    return format_formula(f, min_prec, tail)


def _quantifier(f: Formula) -> str:
    negated = isinstance(f, Not)
    if negated:
        f = f.body
    word = "nexists" if negated else ("forall" if isinstance(f, Forall)
                                      else "exists")
    kind = type(f)
    groups: list[tuple[list[str], str]] = []
    while isinstance(f, kind):
        if groups and groups[-1][1] == f.type:
            groups[-1][0].append(f.var)
        else:
            groups.append(([f.var], f.type))
        f = f.body
    binders = ", ".join("%s: %s" % (", ".join(vs), t) for vs, t in groups)
    return "%s %s . %s" % (word, binders, format_formula(f))


# -- signatures ----------------------------------------------------------------


def _builtin(sym) -> str:
    return " = builtin %s" % sym.builtin if sym.builtin else ""


def _steps(steps, depth: int) -> list[str]:
    from ..events import CreateStep, DeleteStep, ForeachStep, SetStep
    pad = INDENT * depth
    out = []
    for st in steps:
        if isinstance(st, SetStep):
            out.append("%sset %s.%s = %s;" % (pad, format_term(st.target),
                                              st.attribute,
                                              format_term(st.value)))
        elif isinstance(st, DeleteStep):
            out.append("%sdelete %s%s;" % (pad, format_term(st.target),
                                           " cascade" if st.cascade else ""))
        elif isinstance(st, CreateStep):
            text = "%screate %s %s" % (pad, st.type_name, st.element)
            if st.source is not None:
                text += " (%s -> %s)" % (format_term(st.source),
                                         format_term(st.target))
            if st.attributes:
                text += " with " + ", ".join("%s = %s" % (a, format_term(v))
                                             for a, v in st.attributes)
            out.append(text + ";")
        elif isinstance(st, ForeachStep):
            head = "%sforall %s: %s" % (pad, st.var, st.type_name)
            if st.where != Truth(True):
                head += " where " + format_formula(st.where)
            out.append(head + " {")
            out.extend(_steps(st.body, depth + 1))
            out.append(pad + "}")
    return out


def format_event(ev, depth: int = 1) -> list[str]:
    pad = INDENT * depth
    params = ", ".join("%s: %s" % p for p in ev.params)
    lines = ["%sevent %s(%s)" % (pad, ev.name, params),
             "%s%spre %s" % (pad, INDENT, format_formula(ev.pre)),
             "%s%sdo {" % (pad, INDENT)]
    lines.extend(_steps(ev.body, depth + 2))
    lines.append("%s%s}" % (pad, INDENT))
    lines.append("%s%spost %s;" % (pad, INDENT, format_formula(ev.post)))
    return lines


def declaration_lines(sig: SignatureDecl, depth: int = 1) -> list[str]:
    pad = INDENT * depth
    lines = []
    parents: dict[str, list[str]] = {}
    for a, b in sig.inh:
        parents.setdefault(a, []).append(b)
    for t in sig.types:
        if t.kind is Kind.OBJECT:
            sup = parents.get(t.name)
            lines.append("%sobject type %s%s;" % (
                pad, t.name, " < " + ", ".join(sorted(sup)) if sup else ""))
    for t in sig.types:
        if t.kind is Kind.RELATION:
            src, tgt = sig.source_of(t.name), sig.target_of(t.name)
            lines.append("%srelation type %s from %s to %s;" % (
                pad, t.name, src.codomain.target, tgt.codomain.target))
    for t in sig.types:
        if t.kind is Kind.DATA:
            lines.append("%sdata type %s = %s;" % (
                pad, t.name, format_domain(sig.domain_map[t.name])))
    for f in sig.functions:
        if f.role is Role.ATTRIBUTE:
            lines.append("%sattr %s : %s -> %s;" % (
                pad, f.name, f.domain[0], format_domain(f.codomain)))
    for f in sig.functions:
        if f.role is Role.AUXILIARY:
            lines.append("%sfunction %s(%s) -> %s%s;" % (
                pad, f.name, ", ".join(f.domain), format_domain(f.codomain),
                _builtin(f)))
    for r in sig.relations:
        lines.append("%srelation %s(%s)%s;" % (
            pad, r.name, ", ".join(format_domain(a) for a in r.args),
            _builtin(r)))
    for c in sig.constraints:
        lines.append("%sconstraint %s: %s;" % (pad, c.name,
                                               format_formula(c.formula)))
    for ev in sig.events:
        lines.extend(format_event(ev, depth))
    return lines


def serialize_language(sig: SignatureDecl) -> str:
    body = declaration_lines(sig)
    if not body:
        return "language %s {\n}\n" % sig.name
    return "language %s {\n%s\n}\n" % (sig.name, "\n".join(body))


def serialize_constraints(constraints) -> str:
    return "".join("constraint %s: %s;\n" % (c.name, format_formula(c.formula))
                   for c in constraints)


# -- models ------------------------------------------------------------------


def serialize_model(m) -> str:
    sig = m.language
    lines = []
    endpoint_syms: set[tuple[str, str]] = set()

    def kind_rank(t):
        return 0 if sig.kind_of(t) is Kind.OBJECT else 1

    for eid, t in sorted(m.elements.items(),
                         key=lambda kv: (kind_rank(kv[1]), kv[1], kv[0])):
        text = "%s%s %s" % (INDENT, t, eid)
        if sig.kind_of(t) is Kind.RELATION:
            src, tgt = sig.source_of(t), sig.target_of(t)
            s = m.functions.get(src.name, {}).get((eid,))
            g = m.functions.get(tgt.name, {}).get((eid,))
            if s is not None and g is not None:
                text += " (%s -> %s)" % (format_value(s), format_value(g))
                endpoint_syms.add((src.name, eid))
                endpoint_syms.add((tgt.name, eid))
        lines.append(text + ";")
    attrs = []
    others = []
    for name, entries in m.functions.items():
        sym = sig.function_map.get(name)
        for args, v in entries.items():
            if len(args) == 1 and (name, args[0]) in endpoint_syms:
                continue
            if sym is not None and sym.role is Role.ATTRIBUTE and \
                    len(args) == 1 and isinstance(args[0], str):
                attrs.append(((args[0], name), "%s%s.%s = %s;" % (
                    INDENT, args[0], name, format_value(v))))
            else:
                others.append(((name, value_sort_key(args)), "%s%s(%s) = %s;" % (
                    INDENT, name, ", ".join(format_value(a) for a in args),
                    format_value(v))))
    lines.extend(text for _, text in sorted(attrs))
    lines.extend(text for _, text in sorted(others))
    for name, tuples in m.relations.items():
        for tup in sorted(tuples, key=value_sort_key):
            lines.append("%s%s(%s);" % (INDENT, name,
                                        ", ".join(format_value(v) for v in tup)))
    head = "model %s : %s {" % (m.name, sig.name)
    if not lines:
        return head + "\n}\n"
    return "%s\n%s\n}\n" % (head, "\n".join(lines))
