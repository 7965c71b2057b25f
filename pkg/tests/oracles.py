"""Reference implementations used only by the tests.

Nothing here calls into the evaluator, the closure code or the conformance
checker of the package; only the AST and structure containers are shared.
"""

from __future__ import annotations

import itertools

from fomlkit.formula import (
    And, Apply, Const, Eq, Exists, Forall, Implies, ListMake, NatLit, Not,
    Or, RelApp, SetLit, SetMember, Truth, TupleMake, TupleProj, Var,
)
from fomlkit.sigcore import EnumDomain, Kind
from fomlkit.values import ListValue, Sym


# -- orders ----------------------------------------------------------------


def floyd_warshall(pairs):
    """Transitive closure by the textbook triple loop."""
    nodes = sorted({x for p in pairs for x in p})
    idx = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for a, b in pairs:
        reach[idx[a]][idx[b]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    return {(nodes[i], nodes[j]) for i in range(n) for j in range(n)
            if reach[i][j]}


def has_cycle(pairs) -> bool:
    """Three-colour depth-first search."""
    succ = {}
    for a, b in pairs:
        succ.setdefault(a, []).append(b)
    colour = {}

    def visit(n):
        colour[n] = 1
        for m in succ.get(n, ()):
            c = colour.get(m, 0)
            if c == 1 or (c == 0 and visit(m)):
                return True
        colour[n] = 2
        return False

    return any(colour.get(n, 0) == 0 and visit(n) for n in list(succ))


def universe(model, type_name):
    closure = floyd_warshall(model.language.inh)
    return sorted(e for e, t in model.elements.items()
                  if t == type_name or (t, type_name) in closure)


def quantifier_range(model, type_name):
    sig = model.language
    if sig.kind_of(type_name) is Kind.DATA:
        dom = sig.domain_map[type_name]
        assert isinstance(dom, EnumDomain), "oracle handles enum data only"
        return [Sym(c) for c in dom.constants]
    return universe(model, type_name)


# -- naive expansion evaluator ---------------------------------------------


def _subst_term(t, env):
    if isinstance(t, Var):
        return ("val", env[t.name])
    if isinstance(t, Const):
        return ("val", Sym(t.name))
    if isinstance(t, NatLit):
        return ("val", t.value)
    if isinstance(t, Apply):
        return ("app", t.fn, tuple(_subst_term(a, env) for a in t.args))
    if isinstance(t, TupleProj):
        return ("proj", _subst_term(t.term, env), t.index)
    if isinstance(t, (TupleMake, ListMake, SetLit)):
        return (type(t).__name__, tuple(_subst_term(a, env) for a in t.items))
    raise AssertionError(t)


def expand(model, f, env=None):
    """Replace every quantifier by the conjunction or disjunction of its
    instances over the finite range; return a ground tree."""
    env = env or {}
    if isinstance(f, Truth):
        return ("const", f.value)
    if isinstance(f, Eq):
        return ("eq", _subst_term(f.left, env), _subst_term(f.right, env))
    if isinstance(f, RelApp):
        return ("rel", f.rel, tuple(_subst_term(a, env) for a in f.args))
    if isinstance(f, SetMember):
        return ("in", _subst_term(f.elem, env), _subst_term(f.coll, env))
    if isinstance(f, Not):
        return ("not", expand(model, f.body, env))
    if isinstance(f, And):
        return ("and", (expand(model, f.left, env), expand(model, f.right, env)))
    if isinstance(f, Or):
        return ("or", (expand(model, f.left, env), expand(model, f.right, env)))
    if isinstance(f, Implies):
        return ("or", (("not", expand(model, f.left, env)),
                       expand(model, f.right, env)))
    if isinstance(f, (Forall, Exists)):
        parts = tuple(expand(model, f.body, {**env, f.var: v})
                      for v in quantifier_range(model, f.type))
        return ("and" if isinstance(f, Forall) else "or", parts)
    raise AssertionError(f)


def _ground_value(model, t):
    tag = t[0]
    if tag == "val":
        return t[1]
    if tag == "app":
        args = tuple(_ground_value(model, a) for a in t[2])
        sym = model.language.function_map.get(t[1])
        builtin = sym.builtin if sym is not None else t[1]
        if builtin == "plus":
            return args[0] + args[1]
        if builtin == "minus":
            return args[0] - args[1]
        if builtin == "last":
            return args[0][-1]
        return model.functions[t[1]][args]
    if tag == "proj":
        return _ground_value(model, t[1])[t[2] - 1]
    items = [_ground_value(model, a) for a in t[1]]
    if tag == "TupleMake":
        return tuple(items)
    if tag == "ListMake":
        return ListValue(items)
    return frozenset(items)


def ground_truth(model, g) -> bool:
    tag = g[0]
    if tag == "const":
        return g[1]
    if tag == "eq":
        return _ground_value(model, g[1]) == _ground_value(model, g[2])
    if tag == "rel":
        args = tuple(_ground_value(model, a) for a in g[2])
        sym = model.language.relation_map.get(g[1])
        builtin = sym.builtin if sym is not None else g[1]
        if builtin == "lt":
            return args[0] < args[1]
        if builtin == "member":
            return args[0] in args[1]
        return args in model.relations.get(g[1], frozenset())
    if tag == "in":
        return _ground_value(model, g[1]) in _ground_value(model, g[2])
    if tag == "not":
        return not ground_truth(model, g[1])
    values = [ground_truth(model, p) for p in g[1]]   # no short circuit
    return all(values) if tag == "and" else any(values)


def naive_holds(model, f, env=None) -> bool:
    return ground_truth(model, expand(model, f, env))


def brute_force_witnesses(model, binders, matrix):
    """Every assignment of ``binders`` under which ``matrix`` is false."""
    names = [v for v, _ in binders]
    ranges = [quantifier_range(model, t) for _, t in binders]
    return [dict(zip(names, combo)) for combo in itertools.product(*ranges)
            if not naive_holds(model, matrix, dict(zip(names, combo)))]
