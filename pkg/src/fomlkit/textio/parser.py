"""Recursive-descent parsers for languages, models, bindings and constraint
files.

Parsing is total: a malformed declaration produces a diagnostic and the
parser resynchronises at the next ``;`` or closing brace, so one run reports
every problem in the file. The public functions raise :class:`ParseError`
carrying all diagnostics when anything went wrong.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from ..errors import FormulaTypeError, ParseError
from ..events import (
    CreateStep, DeleteStep, DomainEvent, ForeachStep, SetStep,
)
from ..formula import (
    And, Apply, Const, Eq, Exists, Forall, Formula, Implies, ListMake, NatLit,
    Not, Or, RelApp, SetLit, SetMember, Term, Truth, TupleMake, TupleProj, Var,
    typecheck_formula,
)
from ..sigcore import (
    Constraint, EnumDomain, FunctionSymbol, Kind, ListDomain, NatDomain,
    ProductDomain, RefDomain, RelationSymbol, Role, SetDomain, SignatureDecl,
    TypeName, UnionDomain, ValueDomain, is_subtype, source_symbol,
    target_symbol, validate_signature,
)
from ..values import ListValue, Sym
from .lexer import Diagnostic, SourceSpan, Token, tokenize

FORMULA_KEYWORDS = frozenset({"forall", "exists", "nexists", "in", "true",
                              "false"})


class _Fail(Exception):
    def __init__(self, code: str, message: str, span: SourceSpan):
        super().__init__(message)
        self.diag = Diagnostic(code, message, span)


@dataclass
class _Decl:
    kind: str
    name: str
    span: SourceSpan
    data: dict = field(default_factory=dict)


class _Parser:
    def __init__(self, text: str, file: str):
        self.tokens, self.diags = tokenize(text, file)
        self.pos = 0
        self.file = file

    # token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.pos += 1
        return t

    def fail(self, expected: str, tok: Token | None = None) -> _Fail:
        tok = tok or self.tok
        if tok.kind == "EOF":
            return _Fail("UNEXPECTED_EOF", "expected %s at end of input"
                         % expected, tok.span)
        return _Fail("SYNTAX_ERROR", "expected %s, found %r"
                     % (expected, tok.text), tok.span)

    def at(self, kind: str) -> bool:
        return self.tok.kind == kind

    def at_kw(self, word: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == "IDENT" and t.text == word

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            raise self.fail(repr(kind))
        return self.advance()

    def expect_kw(self, word: str) -> Token:
        if not self.at_kw(word):
            raise self.fail(repr(word))
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "IDENT":
            raise self.fail(what)
        return self.advance()

    def name(self, what: str = "name") -> Token:
        """An identifier that is not a formula keyword."""
        t = self.ident(what)
        if t.text in FORMULA_KEYWORDS:
            raise _Fail("SYNTAX_ERROR", "%r is a reserved word" % t.text,
                        t.span)
        return t

    def nat(self) -> int:
        return int(self.expect("NAT").text)

    def recover(self) -> None:
        """Skip to just after the next ``;`` at this nesting depth, or to a
        closing brace that ends the enclosing block."""
        depth = 0
        while not self.at("EOF"):
            k = self.tok.kind
            if k in ("(", "[", "{"):
                depth += 1
            elif k in (")", "]"):
                depth = max(0, depth - 1)
            elif k == "}":
                if depth == 0:
                    return
                depth -= 1
                if depth == 0 and self.peek().kind != ";":
                    self.advance()
                    return
            elif k == ";" and depth == 0:
                self.advance()
                return
            self.advance()

    def block(self, item: Callable[[], None]) -> None:
        """``{ item* }`` with per-item error recovery."""
        self.expect("{")
        while not self.at("}") and not self.at("EOF"):
            start = self.pos
            try:
                item()
            except _Fail as exc:
                self.diags.append(exc.diag)
                self.recover()
                if self.pos == start:
                    self.advance()
        if self.at("EOF"):
            self.diags.append(self.fail("'}'").diag)
        else:
            self.advance()

    def finish(self) -> None:
        if not self.at("EOF"):
            self.diags.append(Diagnostic(
                "SYNTAX_ERROR", "unexpected text after the closing brace",
                self.tok.span))

    # value domains -------------------------------------------------------

    def domain(self) -> ValueDomain:
        alts = [self.product()]
        while self.at("|"):
            self.advance()
            alts.append(self.product())
        return alts[0] if len(alts) == 1 else UnionDomain(tuple(alts))

    def product(self) -> ValueDomain:
        items = [self.domain_atom()]
        while self.at("*"):
            self.advance()
            items.append(self.domain_atom())
        return items[0] if len(items) == 1 else ProductDomain(tuple(items))

    def domain_atom(self) -> ValueDomain:
        if self.at("("):
            self.advance()
            d = self.domain()
            self.expect(")")
            return d
        t = self.ident("a value domain")
        if t.text == "nat":
            return NatDomain()
        if t.text == "ref":
            return RefDomain(self.ident("type name").text)
        if t.text == "enum":
            self.expect("{")
            names = [self.ident("constant").text]
            while self.at(","):
                self.advance()
                names.append(self.ident("constant").text)
            self.expect("}")
            return EnumDomain(tuple(names))
        if t.text in ("set", "list"):
            self.expect_kw("of")
            inner = self.domain_atom()
            return SetDomain(inner) if t.text == "set" else ListDomain(inner)
        raise self.fail("a value domain", t)

    # terms ------------------------------------------------------------------

    def term(self, scope: dict[str, str]) -> Term:
        t = self.term_primary(scope)
        while self.at(".") and self.peek().kind == "NAT":
            dot = self.advance()
            t = TupleProj(t, self.nat(), span=dot.span)
        return t

    def term_list(self, close: str, scope) -> tuple[Term, ...]:
        items: list[Term] = []
        if not self.at(close):
            items.append(self.term(scope))
            while self.at(","):
                self.advance()
                items.append(self.term(scope))
        self.expect(close)
        return tuple(items)

    def term_primary(self, scope: dict[str, str]) -> Term:
        tok = self.tok
        if tok.kind == "NAT":
            self.advance()
            return NatLit(int(tok.text), span=tok.span)
        if tok.kind == "(":
            self.advance()
            items = self.term_list(")", scope)
            if not items:
                raise self.fail("a term", tok)
            if len(items) == 1:
                return items[0]
            return TupleMake(items, span=tok.span)
        if tok.kind == "{":
            self.advance()
            return SetLit(self.term_list("}", scope), span=tok.span)
        if tok.kind == "[":
            self.advance()
            return ListMake(self.term_list("]", scope), span=tok.span)
        if tok.kind == "IDENT" and tok.text not in FORMULA_KEYWORDS:
            self.advance()
            if self.at("("):
                self.advance()
                return Apply(tok.text, self.term_list(")", scope),
                             span=tok.span)
            if tok.text in scope:
                return Var(tok.text, span=tok.span)
            return Const(tok.text, span=tok.span)
        raise self.fail("a term")

    # formulas -----------------------------------------------------------------

    def formula(self, scope: dict[str, str]) -> Formula:
        left = self.disjunction(scope)
        if self.at("=>"):
            op = self.advance()
            return Implies(left, self.formula(scope), span=op.span)
        return left

    def disjunction(self, scope) -> Formula:
        f = self.conjunction(scope)
        while self.at("|"):
            op = self.advance()
            f = Or(f, self.conjunction(scope), span=op.span)
        return f

    def conjunction(self, scope) -> Formula:
        f = self.unary(scope)
        while self.at("&"):
            op = self.advance()
            f = And(f, self.unary(scope), span=op.span)
        return f

    def binders(self) -> list[tuple[str, str, SourceSpan]]:
        out = []
        while True:
            names = [self.name("variable")]
            while self.at(","):
                self.advance()
                names.append(self.name("variable"))
            self.expect(":")
            ty = self.ident("type name").text
            out.extend((n.text, ty, n.span) for n in names)
            if not self.at(","):
                return out
            self.advance()

    def unary(self, scope) -> Formula:
        tok = self.tok
        if tok.kind == "!":
            self.advance()
            return Not(self.unary(scope), span=tok.span)
        if tok.kind == "IDENT" and tok.text in ("forall", "exists", "nexists"):
            self.advance()
            binders = self.binders()
            self.expect(".")
            inner = dict(scope)
            for v, t, _ in binders:
                inner[v] = t
            body = self.formula(inner)
            node = Forall if tok.text == "forall" else Exists
            for v, t, sp in reversed(binders):
                body = node(v, t, body, span=sp)
            if tok.text == "nexists":
                body = Not(body, span=tok.span)
            return body
        return self.atom(scope)

    def atom(self, scope) -> Formula:
        tok = self.tok
        if tok.kind == "IDENT" and tok.text in ("true", "false"):
            self.advance()
            return Truth(tok.text == "true", span=tok.span)
        if tok.kind == "IDENT" and self.peek().kind == ":":
            return self.link(scope)
        if tok.kind == "(":
            start = self.pos
            try:
                return self.comparison(scope)
            except _Fail:
                self.pos = start
            self.advance()
            f = self.formula(scope)
            self.expect(")")
            return f
        return self.comparison(scope)

    def link(self, scope) -> Formula:
        """``u : x -> y`` for ``src_T(u) = x & tgt_T(u) = y``."""
        tok = self.advance()
        rel = scope.get(tok.text)
        if rel is None:
            raise _Fail("UNKNOWN_SYMBOL", "link shorthand needs a bound "
                        "relation variable, %r is unbound" % tok.text,
                        tok.span)
        self.expect(":")
        x = self.term(scope)
        self.expect("->")
        y = self.term(scope)
        u = Var(tok.text, span=tok.span)
        return And(Eq(Apply(source_symbol(rel), (u,), span=tok.span), x,
                      span=tok.span),
                   Eq(Apply(target_symbol(rel), (u,), span=tok.span), y,
                      span=tok.span), span=tok.span)

    def comparison(self, scope) -> Formula:
        left = self.term(scope)
        tok = self.tok
        if tok.kind == "=":
            self.advance()
            return Eq(left, self.term(scope), span=tok.span)
        if tok.kind == "!=":
            self.advance()
            return Not(Eq(left, self.term(scope), span=tok.span),
                       span=tok.span)
        if tok.kind == "IDENT" and tok.text == "in":
            self.advance()
            return SetMember(left, self.term(scope), span=tok.span)
        if isinstance(left, Apply):
            return RelApp(left.fn, left.args, span=left.span)
        raise self.fail("'=', '!=' or 'in'")

    # declarations ---------------------------------------------------------

    def decl(self, out: list[_Decl], allow_binding: bool = False) -> None:
        tok = self.tok
        if tok.kind != "IDENT":
            raise self.fail("a declaration")
        word = tok.text
        if word == "object":
            self.advance()
            self.expect_kw("type")
            name = self.name("type name")
            parents = []
            if self.at("<"):
                self.advance()
                parents.append(self.ident("type name").text)
                while self.at(","):
                    self.advance()
                    parents.append(self.ident("type name").text)
            self.expect(";")
            out.append(_Decl("object", name.text, name.span,
                             {"parents": parents}))
        elif word == "relation" and self.at_kw("type", 1) and \
                self.peek(2).kind == "IDENT":
            self.advance()
            self.advance()
            name = self.name("type name")
            self.expect_kw("from")
            src = self.ident("type name").text
            self.expect_kw("to")
            tgt = self.ident("type name").text
            self.expect(";")
            out.append(_Decl("reltype", name.text, name.span,
                             {"source": src, "target": tgt}))
        elif word == "relation":
            self.advance()
            name = self.name("relation name")
            self.expect("(")
            args = [self.domain()]
            while self.at(","):
                self.advance()
                args.append(self.domain())
            self.expect(")")
            builtin = self.builtin()
            self.expect(";")
            out.append(_Decl("relation", name.text, name.span,
                             {"args": tuple(args), "builtin": builtin}))
        elif word == "data":
            self.advance()
            self.expect_kw("type")
            name = self.name("type name")
            self.expect("=")
            dom = self.domain()
            self.expect(";")
            out.append(_Decl("data", name.text, name.span, {"domain": dom}))
        elif word == "attr":
            self.advance()
            name = self.name("attribute name")
            self.expect(":")
            owner = self.ident("type name").text
            self.expect("->")
            dom = self.domain()
            self.expect(";")
            out.append(_Decl("attr", name.text, name.span,
                             {"owner": owner, "domain": dom}))
        elif word == "function":
            self.advance()
            name = self.name("function name")
            self.expect("(")
            args = [self.ident("type name").text]
            while self.at(","):
                self.advance()
                args.append(self.ident("type name").text)
            self.expect(")")
            self.expect("->")
            dom = self.domain()
            builtin = self.builtin()
            self.expect(";")
            out.append(_Decl("function", name.text, name.span,
                             {"args": tuple(args), "domain": dom,
                              "builtin": builtin}))
        elif word == "constraint":
            out.append(self.constraint())
        elif word == "event":
            out.append(self.event())
        elif allow_binding and word == "rename":
            self.advance()
            tag = self.ident("language tag").text
            self.expect(".")
            old = self.ident("name")
            self.expect_kw("to")
            new = self.name("name").text
            self.expect(";")
            out.append(_Decl("rename", old.text, old.span,
                             {"tag": tag, "new": new}))
        elif allow_binding and word == "bridge":
            self.advance()
            name = self.name("bridge name")
            self.expect(":")
            src = self.ident("type name").text
            self.expect("->")
            tgt = self.ident("type name").text
            self.expect(";")
            out.append(_Decl("bridge", name.text, name.span,
                             {"source": src, "target": tgt}))
        else:
            raise self.fail("a declaration")

    def builtin(self) -> str | None:
        if self.at("="):
            self.advance()
            self.expect_kw("builtin")
            return self.ident("built-in name").text
        return None

    def constraint(self) -> _Decl:
        self.expect_kw("constraint")
        name = self.name("constraint name")
        self.expect(":")
        f = self.formula({})
        self.expect(";")
        return _Decl("constraint", name.text, name.span, {"formula": f})

    def event(self) -> _Decl:
        self.expect_kw("event")
        name = self.name("event name")
        self.expect("(")
        params: list[tuple[str, str]] = []
        if not self.at(")"):
            params = [(v, t) for v, t, _ in self.binders()]
        self.expect(")")
        scope = dict(params)
        self.expect_kw("pre")
        pre = self.formula(scope)
        self.expect_kw("do")
        body = self.steps(scope)
        self.expect_kw("post")
        post = self.formula(scope)
        self.expect(";")
        ev = DomainEvent(name.text, tuple(params), pre, tuple(body), post)
        return _Decl("event", name.text, name.span, {"event": ev})

    def steps(self, scope) -> list:
        self.expect("{")
        out = []
        while not self.at("}"):
            out.append(self.step(scope))
        self.expect("}")
        return out

    def step(self, scope):
        tok = self.ident("an event step")
        if tok.text == "set":
            target = self.term(scope)
            self.expect(".")
            attr = self.ident("attribute name").text
            self.expect("=")
            value = self.term(scope)
            self.expect(";")
            return SetStep(target, attr, value)
        if tok.text == "delete":
            target = self.term(scope)
            cascade = False
            if self.at_kw("cascade"):
                self.advance()
                cascade = True
            self.expect(";")
            return DeleteStep(target, cascade)
        if tok.text == "create":
            type_name = self.ident("type name").text
            element = self.name("element id").text
            src = tgt = None
            if self.at("("):
                self.advance()
                src = self.term(scope)
                self.expect("->")
                tgt = self.term(scope)
                self.expect(")")
            attrs = []
            if self.at_kw("with"):
                self.advance()
                while True:
                    a = self.ident("attribute name").text
                    self.expect("=")
                    attrs.append((a, self.term(scope)))
                    if not self.at(","):
                        break
                    self.advance()
            self.expect(";")
            scope[element] = type_name
            return CreateStep(type_name, element, src, tgt, tuple(attrs))
        if tok.text == "forall":
            var = self.name("variable").text
            self.expect(":")
            type_name = self.ident("type name").text
            inner = {**scope, var: type_name}
            where: Formula = Truth(True)
            if self.at_kw("where"):
                self.advance()
                where = self.formula(inner)
            body = self.steps(inner)
            return ForeachStep(var, type_name, where, tuple(body))
        raise self.fail("'set', 'create', 'delete' or 'forall'", tok)

    def decls(self, allow_binding: bool = False) -> list[_Decl]:
        out: list[_Decl] = []
        self.block(lambda: self.decl(out, allow_binding))
        return out


# -- assembling signatures ---------------------------------------------------


def _build_signature(name: str, decls: list[_Decl]) -> SignatureDecl:
    types, domains, inh, functions, relations, constraints, events = \
        [], [], [], [], [], [], []
    for d in decls:
        x = d.data
        if d.kind == "object":
            types.append(TypeName(d.name, Kind.OBJECT))
            inh.extend((d.name, p) for p in x["parents"])
        elif d.kind == "reltype":
            types.append(TypeName(d.name, Kind.RELATION))
            functions.append(FunctionSymbol(source_symbol(d.name), (d.name,),
                                            RefDomain(x["source"]),
                                            Role.REL_SOURCE))
            functions.append(FunctionSymbol(target_symbol(d.name), (d.name,),
                                            RefDomain(x["target"]),
                                            Role.REL_TARGET))
        elif d.kind == "data":
            types.append(TypeName(d.name, Kind.DATA))
            domains.append((d.name, x["domain"]))
        elif d.kind == "attr":
            functions.append(FunctionSymbol(d.name, (x["owner"],), x["domain"],
                                            Role.ATTRIBUTE))
        elif d.kind == "function":
            functions.append(FunctionSymbol(d.name, x["args"], x["domain"],
                                            Role.AUXILIARY, x["builtin"]))
        elif d.kind == "relation":
            relations.append(RelationSymbol(d.name, x["args"], x["builtin"]))
        elif d.kind == "constraint":
            constraints.append(Constraint(d.name, x["formula"]))
        elif d.kind == "event":
            events.append(x["event"])
    return SignatureDecl(name, tuple(types), tuple(domains), tuple(inh),
                         tuple(functions), tuple(relations), tuple(constraints),
                         tuple(events))


def _validation_diagnostics(sig: SignatureDecl, decls: list[_Decl],
                            fallback: SourceSpan) -> list[Diagnostic]:
    spans: dict[str, SourceSpan] = {}
    for d in decls:
        spans.setdefault(d.name, d.span)
    out = []
    report = validate_signature(sig)
    precise: set[str] = set()
    for c in sig.constraints:
        try:
            typecheck_formula(sig, c.formula)
        except FormulaTypeError as exc:
            precise.add(c.name)
            for issue in exc.errors:
                out.append(Diagnostic(issue.code, "%s: %s" % (c.name,
                                                              issue.message),
                                      issue.span or spans.get(c.name,
                                                              fallback)))
        except Exception:
            pass
    for f in report.findings:
        if f.subject in precise and f.code in (
                "UNKNOWN_SYMBOL", "ARITY_MISMATCH", "TYPE_MISMATCH",
                "QUANTIFIER_OVER_INFINITE_DOMAIN"):
            continue
        out.append(Diagnostic(f.code, "%s: %s" % (f.subject, f.message),
                              spans.get(f.subject, fallback)))
    return out


def _raise_if(diags: list[Diagnostic]) -> None:
    if diags:
        raise ParseError(diags)


def parse_language(text: str, file: str = "<string>",
                   validate: bool = True) -> SignatureDecl:
    """Parse ``language NAME { ... }``; with ``validate`` every signature
    finding is reported as a diagnostic too."""
    p = _Parser(text, file)
    name = "L"
    decls: list[_Decl] = []
    try:
        p.expect_kw("language")
        name = p.name("language name").text
        decls = p.decls()
    except _Fail as exc:
        p.diags.append(exc.diag)
    p.finish()
    _raise_if(p.diags)
    sig = _build_signature(name, decls)
    if validate:
        _raise_if(_validation_diagnostics(sig, decls, p.tokens[0].span))
    return sig


def parse_constraints(text: str, file: str = "<string>") -> list[Constraint]:
    """A file holding only ``constraint NAME: formula;`` declarations."""
    p = _Parser(text, file)
    out = []
    while not p.at("EOF"):
        start = p.pos
        try:
            d = p.constraint()
            out.append(Constraint(d.name, d.data["formula"]))
        except _Fail as exc:
            p.diags.append(exc.diag)
            p.recover()
            if p.pos == start:
                p.advance()
    _raise_if(p.diags)
    return out


def parse_bindings(text: str, file: str = "<string>"):
    """Parse ``bindings [NAME] { ... }`` into a :class:`FusionBinding`."""
    from ..composition import Bridge, FusionBinding
    p = _Parser(text, file)
    name = None
    decls: list[_Decl] = []
    try:
        p.expect_kw("bindings")
        if p.at("IDENT"):
            name = p.name("binding name").text
        decls = p.decls(allow_binding=True)
    except _Fail as exc:
        p.diags.append(exc.diag)
    p.finish()
    _raise_if(p.diags)
    for d in decls:
        if d.kind == "reltype":
            p.diags.append(Diagnostic("SYNTAX_ERROR", "bindings cannot declare "
                                      "relation types", d.span))
    _raise_if(p.diags)
    part = _build_signature(name or "L", [d for d in decls if d.kind not in (
        "rename", "bridge")])
    return FusionBinding(
        name=name,
        renames=tuple((d.data["tag"], d.name, d.data["new"])
                      for d in decls if d.kind == "rename"),
        bridges=tuple(Bridge(d.name, d.data["source"], d.data["target"])
                      for d in decls if d.kind == "bridge"),
        types=part.types, domains=part.domains,
        functions=part.functions, relations=part.relations,
        constraints=part.constraints, events=part.events)


# -- models -------------------------------------------------------------------


def _value(sig: SignatureDecl, t: Term) -> Any:
    if isinstance(t, NatLit):
        return t.value
    if isinstance(t, (Const, Var)):
        return Sym(t.name) if t.name in sig.constant_map else t.name
    if isinstance(t, TupleMake):
        return tuple(_value(sig, i) for i in t.items)
    if isinstance(t, ListMake):
        return ListValue(_value(sig, i) for i in t.items)
    if isinstance(t, SetLit):
        return frozenset(_value(sig, i) for i in t.items)
    raise _Fail("SYNTAX_ERROR", "not a literal value", t.span)


def parse_model(text: str, sig: SignatureDecl, file: str = "<string>"):
    """Parse ``model NAME : LANG { ... }`` against ``sig``."""
    from ..structure import Structure
    p = _Parser(text, file)
    entries: list[tuple] = []

    def item():
        first = p.name("element type or id")
        if p.at("IDENT"):
            eid = p.name("element id")
            ends = None
            if p.at("("):
                p.advance()
                s = p.name("element id")
                p.expect("->")
                t = p.name("element id")
                p.expect(")")
                ends = (s, t)
            p.expect(";")
            entries.append(("element", first, eid, ends))
        elif p.at("."):
            p.advance()
            attr = p.ident("attribute name")
            p.expect("=")
            value = p.term({})
            p.expect(";")
            entries.append(("attr", first, attr, value))
        elif p.at("("):
            p.advance()
            args = p.term_list(")", {})
            value = None
            if p.at("="):
                p.advance()
                value = p.term({})
            p.expect(";")
            entries.append(("apply", first, args, value))
        else:
            raise p.fail("a model entry")

    name = "M"
    try:
        p.expect_kw("model")
        name = p.name("model name").text
        p.expect(":")
        lang = p.ident("language name")
        if lang.text != sig.name:
            p.diags.append(Diagnostic(
                "LANGUAGE_MISMATCH", "model is written in %s, not %s"
                % (lang.text, sig.name), lang.span))
        p.block(item)
    except _Fail as exc:
        p.diags.append(exc.diag)
    p.finish()
    _raise_if(p.diags)

    diags = p.diags
    elements: dict[str, str] = {}
    functions: dict[str, dict] = {}
    relations: dict[str, set] = {}
    for e in entries:
        if e[0] != "element":
            continue
        _, ty, eid, ends = e
        kind = sig.kind_of(ty.text)
        if kind not in (Kind.OBJECT, Kind.RELATION):
            diags.append(Diagnostic("UNDECLARED_TYPE", "%r is not an object "
                                    "or relation type" % ty.text, ty.span))
            continue
        if eid.text in elements:
            diags.append(Diagnostic("DUPLICATE_NAME", "element %r declared "
                                    "twice" % eid.text, eid.span))
            continue
        elements[eid.text] = ty.text
        if ends is not None:
            if kind is not Kind.RELATION:
                diags.append(Diagnostic("TYPE_MISMATCH", "%s elements have no "
                                        "endpoints" % ty.text, eid.span))
                continue
            for tok, sym in zip(ends, (sig.source_of(ty.text),
                                       sig.target_of(ty.text))):
                functions.setdefault(sym.name, {})[(eid.text,)] = tok.text
    for e in entries:
        if e[0] == "element":
            for tok in e[3] or ():
                if tok.text not in elements:
                    diags.append(Diagnostic("UNKNOWN_ELEMENT", "unknown "
                                            "element %r" % tok.text, tok.span))
        elif e[0] == "attr":
            _, owner, attr, value = e
            sym = sig.function_map.get(attr.text)
            if owner.text not in elements:
                diags.append(Diagnostic("UNKNOWN_ELEMENT", "unknown element %r"
                                        % owner.text, owner.span))
                continue
            if sym is None or sym.role is not Role.ATTRIBUTE:
                diags.append(Diagnostic("UNKNOWN_SYMBOL", "%r is not an "
                                        "attribute" % attr.text, attr.span))
                continue
            if not is_subtype(sig, elements[owner.text], sym.domain[0]):
                diags.append(Diagnostic(
                    "TYPE_MISMATCH", "%s belongs to %s, but %s is a %s"
                    % (attr.text, sym.domain[0], owner.text,
                       elements[owner.text]), attr.span))
                continue
            try:
                v = _value(sig, value)
            except _Fail as exc:
                diags.append(exc.diag)
                continue
            slot = functions.setdefault(attr.text, {})
            if (owner.text,) in slot:
                diags.append(Diagnostic("DUPLICATE_NAME", "%s.%s assigned "
                                        "twice" % (owner.text, attr.text),
                                        attr.span))
            slot[(owner.text,)] = v
        elif e[0] == "apply":
            _, sym_tok, args, value = e
            try:
                key = tuple(_value(sig, a) for a in args)
                v = None if value is None else _value(sig, value)
            except _Fail as exc:
                diags.append(exc.diag)
                continue
            if value is None:
                if sym_tok.text not in sig.relation_map:
                    diags.append(Diagnostic("UNKNOWN_SYMBOL", "%r is not a "
                                            "relation symbol" % sym_tok.text,
                                            sym_tok.span))
                    continue
                relations.setdefault(sym_tok.text, set()).add(key)
            else:
                if sym_tok.text not in sig.function_map:
                    diags.append(Diagnostic("UNKNOWN_SYMBOL", "%r is not a "
                                            "function symbol" % sym_tok.text,
                                            sym_tok.span))
                    continue
                slot = functions.setdefault(sym_tok.text, {})
                if key in slot:
                    diags.append(Diagnostic("DUPLICATE_NAME", "%s defined "
                                            "twice on the same arguments"
                                            % sym_tok.text, sym_tok.span))
                slot[key] = v
    _raise_if(diags)
    return Structure(sig, name, elements, functions, relations)
