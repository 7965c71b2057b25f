"""Typed first-order sentences: syntax tree, type checking and evaluation.

Sugar such as ``nexists``, ``!=`` and the ``u : x -> y`` link shorthand is
resolved by the parser; the tree below is the whole core language.

Evaluation is plain Tarskian satisfaction over finite universes with nested,
short-circuiting iteration. Quantifiers over an object type range over the
elements of that type and all of its subtypes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping

from .errors import EvaluationError, FormulaTypeError
from .sigcore import (
    EnumDomain, FunctionSymbol, Kind, ListDomain, NatDomain, NothingDomain,
    ProductDomain, RefDomain, RelationSymbol, SetDomain, SignatureDecl,
    UnionDomain, ValueDomain, is_subtype, supertypes,
)
from .values import ListValue, Sym, sorted_values


@dataclass(frozen=True)
class Node:
    span: Any = field(default=None, compare=False, repr=False, kw_only=True)


# -- terms -----------------------------------------------------------------


class Term(Node):
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class NatLit(Term):
    value: int


@dataclass(frozen=True)
class Apply(Term):
    fn: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class TupleProj(Term):
    """1-based component access."""

    term: Term
    index: int


@dataclass(frozen=True)
class TupleMake(Term):
    items: tuple[Term, ...]


@dataclass(frozen=True)
class ListMake(Term):
    items: tuple[Term, ...]


@dataclass(frozen=True)
class SetLit(Term):
    items: tuple[Term, ...]


# -- formulas --------------------------------------------------------------


class Formula(Node):
    pass


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class RelApp(Formula):
    rel: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class SetMember(Formula):
    elem: Term
    coll: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    type: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    type: str
    body: Formula


def forall(binders: Iterable[tuple[str, str]], body: Formula) -> Formula:
    for v, t in reversed(list(binders)):
        body = Forall(v, t, body)
    return body


def exists(binders: Iterable[tuple[str, str]], body: Formula) -> Formula:
    for v, t in reversed(list(binders)):
        body = Exists(v, t, body)
    return body


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return Truth(True)
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


# -- traversal -------------------------------------------------------------


def subterms(node: Node) -> Iterator[Node]:
    """Pre-order walk over a term or formula."""
    yield node
    if isinstance(node, (Apply, RelApp)):
        for a in node.args:
            yield from subterms(a)
    elif isinstance(node, TupleProj):
        yield from subterms(node.term)
    elif isinstance(node, (TupleMake, ListMake, SetLit)):
        for a in node.items:
            yield from subterms(a)
    elif isinstance(node, Eq):
        yield from subterms(node.left)
        yield from subterms(node.right)
    elif isinstance(node, SetMember):
        yield from subterms(node.elem)
        yield from subterms(node.coll)
    elif isinstance(node, Not):
        yield from subterms(node.body)
    elif isinstance(node, (And, Or, Implies)):
        yield from subterms(node.left)
        yield from subterms(node.right)
    elif isinstance(node, (Forall, Exists)):
        yield from subterms(node.body)


def free_variables(node: Node, bound: frozenset = frozenset()) -> set[str]:
    if isinstance(node, Var):
        return set() if node.name in bound else {node.name}
    if isinstance(node, (Forall, Exists)):
        return free_variables(node.body, bound | {node.var})
    out: set[str] = set()
    for child in _children(node):
        out |= free_variables(child, bound)
    return out


def _children(node: Node) -> tuple:
    if isinstance(node, (Apply, RelApp)):
        return node.args
    if isinstance(node, TupleProj):
        return (node.term,)
    if isinstance(node, (TupleMake, ListMake, SetLit)):
        return node.items
    if isinstance(node, Eq):
        return (node.left, node.right)
    if isinstance(node, SetMember):
        return (node.elem, node.coll)
    if isinstance(node, Not):
        return (node.body,)
    if isinstance(node, (And, Or, Implies)):
        return (node.left, node.right)
    if isinstance(node, (Forall, Exists)):
        return (node.body,)
    return ()


@dataclass(frozen=True)
class Mentions:
    types: frozenset[str]
    symbols: frozenset[str]
    constants: frozenset[str]


def mentions(node: Node) -> Mentions:
    """Types, symbols and constants a sentence refers to syntactically."""
    types, symbols, constants = set(), set(), set()
    for n in subterms(node):
        if isinstance(n, (Forall, Exists)):
            types.add(n.type)
        elif isinstance(n, Apply):
            symbols.add(n.fn)
        elif isinstance(n, RelApp):
            symbols.add(n.rel)
        elif isinstance(n, Const):
            constants.add(n.name)
    return Mentions(frozenset(types), frozenset(symbols), frozenset(constants))


def rename(node: Node, mapping: Mapping[str, str]) -> Node:
    """Rename types, symbols and constants (never variables)."""
    m = mapping.get
    if isinstance(node, Var) or isinstance(node, (NatLit, Truth)):
        return node
    if isinstance(node, Const):
        return Const(m(node.name, node.name), span=node.span)
    if isinstance(node, Apply):
        return Apply(m(node.fn, node.fn),
                     tuple(rename(a, mapping) for a in node.args),
                     span=node.span)
    if isinstance(node, RelApp):
        return RelApp(m(node.rel, node.rel),
                      tuple(rename(a, mapping) for a in node.args),
                      span=node.span)
    if isinstance(node, TupleProj):
        return TupleProj(rename(node.term, mapping), node.index, span=node.span)
    if isinstance(node, (TupleMake, ListMake, SetLit)):
        return type(node)(tuple(rename(a, mapping) for a in node.items),
                          span=node.span)
    if isinstance(node, Eq):
        return Eq(rename(node.left, mapping), rename(node.right, mapping),
                  span=node.span)
    if isinstance(node, SetMember):
        return SetMember(rename(node.elem, mapping),
                         rename(node.coll, mapping), span=node.span)
    if isinstance(node, Not):
        return Not(rename(node.body, mapping), span=node.span)
    if isinstance(node, (And, Or, Implies)):
        return type(node)(rename(node.left, mapping),
                          rename(node.right, mapping), span=node.span)
    if isinstance(node, (Forall, Exists)):
        return type(node)(node.var, m(node.type, node.type),
                          rename(node.body, mapping), span=node.span)
    raise TypeError("not a formula node: %r" % (node,))


# -- domain algebra --------------------------------------------------------


def unfold(sig: SignatureDecl, dom: ValueDomain) -> ValueDomain:
    """Replace references to data types by their domains (outermost only)."""
    seen = set()
    while isinstance(dom, RefDomain) and sig.kind_of(dom.target) is Kind.DATA:
        if dom.target in seen or dom.target not in sig.domain_map:
            break
        seen.add(dom.target)
        dom = sig.domain_map[dom.target]
    return dom


def conforms(sig: SignatureDecl, src: ValueDomain, dst: ValueDomain) -> bool:
    """Every value of ``src`` is a value of ``dst``."""
    src, dst = unfold(sig, src), unfold(sig, dst)
    if src == dst or isinstance(src, NothingDomain):
        return True
    if isinstance(src, UnionDomain):
        return all(conforms(sig, a, dst) for a in src.alternatives)
    if isinstance(dst, UnionDomain):
        return any(conforms(sig, src, a) for a in dst.alternatives)
    if isinstance(src, RefDomain) and isinstance(dst, RefDomain):
        if src.target in sig.type_map and dst.target in sig.type_map:
            return is_subtype(sig, src.target, dst.target)
        return False
    if isinstance(src, EnumDomain) and isinstance(dst, EnumDomain):
        return set(src.constants) <= set(dst.constants)
    if isinstance(src, ProductDomain) and isinstance(dst, ProductDomain):
        return len(src.items) == len(dst.items) and all(
            conforms(sig, a, b) for a, b in zip(src.items, dst.items))
    if isinstance(src, SetDomain) and isinstance(dst, SetDomain):
        return conforms(sig, src.inner, dst.inner)
    if isinstance(src, ListDomain) and isinstance(dst, ListDomain):
        return conforms(sig, src.inner, dst.inner)
    return False


def comparable(sig: SignatureDecl, a: ValueDomain, b: ValueDomain) -> bool:
    if conforms(sig, a, b) or conforms(sig, b, a):
        return True
    a, b = unfold(sig, a), unfold(sig, b)
    if isinstance(a, RefDomain) and isinstance(b, RefDomain):
        if sig.kind_of(a.target) is Kind.OBJECT and \
                sig.kind_of(b.target) is Kind.OBJECT:
            return bool(supertypes(sig, a.target) & supertypes(sig, b.target))
    if isinstance(a, EnumDomain) and isinstance(b, EnumDomain):
        return bool(set(a.constants) & set(b.constants))
    return False


def is_finite(sig: SignatureDecl, dom: ValueDomain) -> bool:
    dom = unfold(sig, dom)
    if isinstance(dom, (NatDomain, ListDomain)):
        return False
    if isinstance(dom, RefDomain):
        return dom.target in sig.type_map
    return all(is_finite(sig, c) for c in dom.children())


def _join(sig: SignatureDecl, types: list[ValueDomain]) -> ValueDomain:
    if not types:
        return NothingDomain()
    for cand in types:
        if all(conforms(sig, t, cand) for t in types):
            return cand
    distinct = []
    for t in types:
        if t not in distinct:
            distinct.append(t)
    return UnionDomain(tuple(distinct))


# -- type checking ---------------------------------------------------------


@dataclass(frozen=True)
class TypeIssue:
    code: str
    message: str
    span: Any = None

    def __str__(self) -> str:
        where = ""
        if self.span is not None:
            where = " at %s:%s" % (self.span.line, self.span.column)
        return "%s%s: %s" % (self.code, where, self.message)


@dataclass(frozen=True)
class TypedFormula:
    """A checked formula with the inferred type of every term node."""

    formula: Formula
    free: tuple[tuple[str, str], ...] = ()
    term_types: Mapping[int, ValueDomain] = field(
        default_factory=dict, compare=False, repr=False)

    def type_of(self, term: Term) -> ValueDomain:
        return self.term_types[id(term)]


def builtin_shape_issues(sig: SignatureDecl, sym) -> list[str]:
    """Problems with a declared symbol that borrows a built-in meaning."""
    if sym.builtin is None:
        return []
    if isinstance(sym, FunctionSymbol):
        dom = [unfold(sig, RefDomain(t)) for t in sym.domain]
        if sym.builtin in ("plus", "minus"):
            ok = len(dom) == 2 and all(isinstance(d, NatDomain) for d in dom) \
                and isinstance(unfold(sig, sym.codomain), NatDomain)
            return [] if ok else ["%s expects (nat, nat) -> nat" % sym.builtin]
        if sym.builtin == "last":
            if len(dom) == 1 and isinstance(dom[0], ProductDomain) and \
                    conforms(sig, dom[0].items[-1], sym.codomain):
                return []
            return ["last expects a product whose last component fits the "
                    "codomain"]
    if isinstance(sym, RelationSymbol):
        args = [unfold(sig, a) for a in sym.args]
        if sym.builtin == "lt":
            ok = len(args) == 2 and all(isinstance(a, NatDomain) for a in args)
            return [] if ok else ["lt expects (nat, nat)"]
        if sym.builtin == "member":
            if len(args) == 2 and isinstance(args[1], SetDomain) and \
                    comparable(sig, args[0], args[1].inner):
                return []
            return ["member expects (T, set of T)"]
    return []


class _Checker:
    def __init__(self, sig: SignatureDecl):
        self.sig = sig
        self.issues: list[TypeIssue] = []
        self.types: dict[int, ValueDomain] = {}

    def err(self, code: str, message: str, node: Node) -> None:
        self.issues.append(TypeIssue(code, message, node.span))

    def check_args(self, name: str, node: Node, args, expected,
                   scope) -> None:
        if len(args) != len(expected):
            self.err("ARITY_MISMATCH", "%s takes %d argument(s), got %d"
                     % (name, len(expected), len(args)), node)
            for a in args:
                self.term(a, scope)
            return
        for i, (a, want) in enumerate(zip(args, expected), 1):
            got = self.term(a, scope)
            if got is not None and not conforms(self.sig, got, want):
                self.err("TYPE_MISMATCH", "argument %d of %s: %s does not fit %s"
                         % (i, name, describe(got), describe(want)), a)

    def term(self, t: Term, scope: dict[str, str]) -> ValueDomain | None:
        ty = self._term(t, scope)
        if ty is not None:
            self.types[id(t)] = ty
        return ty

    def _term(self, t: Term, scope) -> ValueDomain | None:
        sig = self.sig
        if isinstance(t, Var):
            if t.name not in scope:
                self.err("UNKNOWN_SYMBOL", "unbound variable %r" % t.name, t)
                return None
            return RefDomain(scope[t.name])
        if isinstance(t, Const):
            if t.name not in sig.constant_map:
                self.err("UNKNOWN_SYMBOL", "unknown constant %r" % t.name, t)
                return None
            return EnumDomain((t.name,))
        if isinstance(t, NatLit):
            return NatDomain()
        if isinstance(t, Apply):
            return self._apply(t, scope)
        if isinstance(t, TupleProj):
            inner = self.term(t.term, scope)
            if inner is None:
                return None
            u = unfold(sig, inner)
            if not isinstance(u, ProductDomain):
                self.err("TYPE_MISMATCH", "projection from non-product %s"
                         % describe(inner), t)
                return None
            if not 1 <= t.index <= len(u.items):
                self.err("TYPE_MISMATCH", "index %d outside product of arity %d"
                         % (t.index, len(u.items)), t)
                return None
            return u.items[t.index - 1]
        if isinstance(t, TupleMake):
            items = [self.term(a, scope) for a in t.items]
            if len(items) < 2:
                self.err("ARITY_MISMATCH", "tuples need >= 2 components", t)
                return None
            if any(i is None for i in items):
                return None
            return ProductDomain(tuple(items))
        if isinstance(t, (ListMake, SetLit)):
            items = [self.term(a, scope) for a in t.items]
            if any(i is None for i in items):
                return None
            inner = _join(sig, items)
            return ListDomain(inner) if isinstance(t, ListMake) \
                else SetDomain(inner)
        raise TypeError("not a term: %r" % (t,))

    def _apply(self, t: Apply, scope) -> ValueDomain | None:
        sig = self.sig
        sym = sig.function_map.get(t.fn)
        if sym is not None:
            self.check_args(t.fn, t, t.args,
                            [RefDomain(d) for d in sym.domain], scope)
            return sym.codomain
        if t.fn in ("plus", "minus"):
            self.check_args(t.fn, t, t.args, [NatDomain(), NatDomain()],
                            scope)
            return NatDomain()
        if t.fn == "last":
            if len(t.args) != 1:
                self.err("ARITY_MISMATCH", "last takes 1 argument", t)
                return None
            inner = self.term(t.args[0], scope)
            u = unfold(sig, inner) if inner is not None else None
            if inner is not None and not isinstance(u, ProductDomain):
                self.err("TYPE_MISMATCH", "last of non-product", t)
                return None
            return u.items[-1] if u is not None else None
        self.err("UNKNOWN_SYMBOL", "unknown function %r" % t.fn, t)
        for a in t.args:
            self.term(a, scope)
        return None

    def formula(self, f: Formula, scope: dict[str, str]) -> None:
        sig = self.sig
        if isinstance(f, Truth):
            return
        if isinstance(f, Eq):
            a = self.term(f.left, scope)
            b = self.term(f.right, scope)
            if a is not None and b is not None and not comparable(sig, a, b):
                self.err("TYPE_MISMATCH", "cannot compare %s with %s"
                         % (describe(a), describe(b)), f)
            return
        if isinstance(f, RelApp):
            sym = sig.relation_map.get(f.rel)
            if sym is not None:
                self.check_args(f.rel, f, f.args, list(sym.args), scope)
            elif f.rel == "lt":
                self.check_args(f.rel, f, f.args, [NatDomain(), NatDomain()],
                                scope)
            elif f.rel == "member":
                if len(f.args) != 2:
                    self.err("ARITY_MISMATCH", "member takes 2 arguments", f)
                else:
                    self._member(f, f.args[0], f.args[1], scope)
            else:
                self.err("UNKNOWN_SYMBOL", "unknown relation %r" % f.rel, f)
                for a in f.args:
                    self.term(a, scope)
            return
        if isinstance(f, SetMember):
            self._member(f, f.elem, f.coll, scope)
            return
        if isinstance(f, Not):
            self.formula(f.body, scope)
            return
        if isinstance(f, (And, Or, Implies)):
            self.formula(f.left, scope)
            self.formula(f.right, scope)
            return
        if isinstance(f, (Forall, Exists)):
            kind = sig.kind_of(f.type)
            if kind is None:
                self.err("UNKNOWN_SYMBOL", "unknown type %r" % f.type, f)
            elif kind is Kind.DATA and not is_finite(sig, RefDomain(f.type)):
                self.err("QUANTIFIER_OVER_INFINITE_DOMAIN",
                         "cannot quantify over %s" % f.type, f)
            self.formula(f.body, {**scope, f.var: f.type})
            return
        raise TypeError("not a formula: %r" % (f,))

    def _member(self, node, elem, coll, scope) -> None:
        a = self.term(elem, scope)
        s = self.term(coll, scope)
        if s is None:
            return
        u = unfold(self.sig, s)
        if not isinstance(u, SetDomain):
            self.err("TYPE_MISMATCH", "membership needs a set, got %s"
                     % describe(s), node)
            return
        if a is not None and not comparable(self.sig, a, u.inner):
            self.err("TYPE_MISMATCH", "%s cannot be a member of %s"
                     % (describe(a), describe(s)), node)


def typecheck_formula(sig: SignatureDecl, f: Formula,
                      free: Mapping[str, str] | None = None) -> TypedFormula:
    """Check ``f`` with the given free-variable typing; raise on errors."""
    free = dict(free or {})
    chk = _Checker(sig)
    for v, t in free.items():
        if t not in sig.type_map:
            chk.issues.append(TypeIssue("UNKNOWN_SYMBOL",
                                        "unknown type %r for %s" % (t, v)))
    chk.formula(f, free)
    if chk.issues:
        raise FormulaTypeError(chk.issues)
    return TypedFormula(f, tuple(sorted(free.items())), chk.types)


def typecheck_term(sig: SignatureDecl, t: Term,
                   free: Mapping[str, str] | None = None) -> ValueDomain:
    chk = _Checker(sig)
    ty = chk.term(t, dict(free or {}))
    if chk.issues:
        raise FormulaTypeError(chk.issues)
    return ty


def describe(dom: ValueDomain) -> str:
    if isinstance(dom, RefDomain):
        return dom.target
    if isinstance(dom, NatDomain):
        return "nat"
    if isinstance(dom, EnumDomain):
        return "enum{%s}" % ",".join(dom.constants)
    if isinstance(dom, ProductDomain):
        return "(%s)" % " * ".join(describe(i) for i in dom.items)
    if isinstance(dom, UnionDomain):
        return "(%s)" % " | ".join(describe(i) for i in dom.alternatives)
    if isinstance(dom, SetDomain):
        return "set of %s" % describe(dom.inner)
    if isinstance(dom, ListDomain):
        return "list of %s" % describe(dom.inner)
    return "nothing"


# -- evaluation ------------------------------------------------------------


def domain_values(sig: SignatureDecl, model, dom: ValueDomain) -> list:
    """All values of a finite domain in ``model``, sorted."""
    dom = unfold(sig, dom)
    if isinstance(dom, RefDomain):
        return list(model.universe(dom.target))
    if isinstance(dom, EnumDomain):
        return [Sym(c) for c in sorted(dom.constants)]
    if isinstance(dom, ProductDomain):
        parts = [domain_values(sig, model, i) for i in dom.items]
        return sorted_values(tuple(p) for p in itertools.product(*parts))
    if isinstance(dom, UnionDomain):
        out = set()
        for a in dom.alternatives:
            out.update(domain_values(sig, model, a))
        return sorted_values(out)
    if isinstance(dom, SetDomain):
        base = domain_values(sig, model, dom.inner)
        subsets = itertools.chain.from_iterable(
            itertools.combinations(base, k) for k in range(len(base) + 1))
        return sorted_values(frozenset(s) for s in subsets)
    if isinstance(dom, NothingDomain):
        return []
    raise EvaluationError("domain %s is infinite" % describe(dom),
                          code="QUANTIFIER_OVER_INFINITE_DOMAIN")


class Evaluator:
    """Satisfaction of sentences in one model. Ranges are cached per type."""

    def __init__(self, sig: SignatureDecl, model):
        self.sig = sig
        self.model = model
        self._ranges: dict[str, list] = {}

    def range_of(self, type_name: str) -> list:
        r = self._ranges.get(type_name)
        if r is None:
            kind = self.sig.kind_of(type_name)
            if kind is Kind.DATA:
                r = domain_values(self.sig, self.model, RefDomain(type_name))
            else:
                r = list(self.model.universe(type_name))
            self._ranges[type_name] = r
        return r

    def holds(self, f: Formula, env: Mapping[str, Any]) -> bool:
        if isinstance(f, Truth):
            return f.value
        if isinstance(f, Eq):
            return self.value(f.left, env) == self.value(f.right, env)
        if isinstance(f, RelApp):
            args = tuple(self.value(a, env) for a in f.args)
            sym = self.sig.relation_map.get(f.rel)
            builtin = sym.builtin if sym is not None else f.rel
            if sym is None or builtin is not None:
                return _builtin_relation(builtin, args)
            return args in self.model.relation_tuples(f.rel)
        if isinstance(f, SetMember):
            return self.value(f.elem, env) in self.value(f.coll, env)
        if isinstance(f, Not):
            return not self.holds(f.body, env)
        if isinstance(f, And):
            return self.holds(f.left, env) and self.holds(f.right, env)
        if isinstance(f, Or):
            return self.holds(f.left, env) or self.holds(f.right, env)
        if isinstance(f, Implies):
            return (not self.holds(f.left, env)) or self.holds(f.right, env)
        if isinstance(f, Forall):
            inner = dict(env)
            for v in self.range_of(f.type):
                inner[f.var] = v
                if not self.holds(f.body, inner):
                    return False
            return True
        if isinstance(f, Exists):
            inner = dict(env)
            for v in self.range_of(f.type):
                inner[f.var] = v
                if self.holds(f.body, inner):
                    return True
            return False
        raise TypeError("not a formula: %r" % (f,))

    def value(self, t: Term, env: Mapping[str, Any]) -> Any:
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise EvaluationError("variable %r is unbound" % t.name,
                                      code="UNBOUND_VARIABLE") from None
        if isinstance(t, Const):
            return Sym(t.name)
        if isinstance(t, NatLit):
            return t.value
        if isinstance(t, Apply):
            args = tuple(self.value(a, env) for a in t.args)
            sym = self.sig.function_map.get(t.fn)
            if sym is None:
                return _builtin_function(t.fn, args)
            if sym.builtin is not None:
                return _builtin_function(sym.builtin, args)
            return self.model.function_value(t.fn, args)
        if isinstance(t, TupleProj):
            return self.value(t.term, env)[t.index - 1]
        if isinstance(t, TupleMake):
            return tuple(self.value(a, env) for a in t.items)
        if isinstance(t, ListMake):
            return ListValue(self.value(a, env) for a in t.items)
        if isinstance(t, SetLit):
            return frozenset(self.value(a, env) for a in t.items)
        raise TypeError("not a term: %r" % (t,))


def _builtin_function(name: str, args: tuple) -> Any:
    if name == "plus":
        return args[0] + args[1]
    if name == "minus":
        if args[1] > args[0]:
            raise EvaluationError("%d - %d is not a natural number" % args,
                                  code="VALUE_DOMAIN_MISMATCH")
        return args[0] - args[1]
    if name == "last":
        return args[0][-1]
    raise EvaluationError("unknown function %r" % name, code="UNKNOWN_SYMBOL")


def _builtin_relation(name: str, args: tuple) -> bool:
    if name == "lt":
        return args[0] < args[1]
    if name == "member":
        return args[0] in args[1]
    raise EvaluationError("unknown relation %r" % name, code="UNKNOWN_SYMBOL")


def evaluate(sig: SignatureDecl, model, f: TypedFormula | Formula,
             env: Mapping[str, Any] | None = None) -> bool:
    """Decide ``model |= f`` under ``env``.

    Raises EvaluationError with code UNBOUND_VARIABLE or PARTIAL_FUNCTION.
    """
    if isinstance(f, TypedFormula):
        f = f.formula
    return Evaluator(sig, model).holds(f, dict(env or {}))
