import dataclasses

import pytest

from fomlkit.errors import EvaluationError, FormulaTypeError
from fomlkit.formula import (
    And, Apply, Const, Eq, Evaluator, Exists, Forall, Implies, NatLit, Not, Or, RelApp,
    SetLit, SetMember, Truth, TupleMake, TupleProj, Var, evaluate,
    free_variables, mentions, rename, typecheck_formula,
)
from fomlkit.structure import Structure
from fomlkit.textio import parse_constraints

from conftest import language, model
from generators import random_case
from oracles import naive_holds


def constraint(pn, name):
    return next(c.formula for c in pn.constraints if c.name == name)


def codes(exc):
    return [i.code for i in exc.value.errors]


def test_abstract_node_is_well_typed(pn):
    typecheck_formula(pn, constraint(pn, "abstract_node"))


def test_reflexive_equality_is_well_typed(pn):
    typecheck_formula(pn, Forall("x", "Place", Eq(Var("x"), Var("x"))))


def test_endpoint_symbol_on_place_is_a_type_mismatch(pn):
    f = Forall("x", "Place", Eq(Apply("src_Arc", (Var("x"),)), Var("x")))
    with pytest.raises(FormulaTypeError) as exc:
        typecheck_formula(pn, f)
    assert "TYPE_MISMATCH" in codes(exc)


@pytest.mark.parametrize("f,code", [
    (Forall("x", "Place", Eq(Apply("nope", (Var("x"),)), Var("x"))),
     "UNKNOWN_SYMBOL"),
    (Forall("x", "Arc", Eq(Apply("src_Arc", (Var("x"), Var("x"))), Var("x"))),
     "ARITY_MISMATCH"),
    (Forall("n", "Nat", Eq(Var("n"), Var("n"))),
     "QUANTIFIER_OVER_INFINITE_DOMAIN"),
    (Forall("x", "Ghost", Truth(True)), "UNKNOWN_SYMBOL"),
    (Forall("x", "Place", Eq(Apply("Tokens", (Var("x"),)), Var("x"))),
     "TYPE_MISMATCH"),
])
def test_type_errors(pn, f, code):
    with pytest.raises(FormulaTypeError) as exc:
        typecheck_formula(pn, f)
    assert code in codes(exc)


def test_free_variables_need_a_typing(pn):
    f = Eq(Apply("Tokens", (Var("p"),)), NatLit(0))
    typecheck_formula(pn, f, {"p": "Place"})
    with pytest.raises(FormulaTypeError):
        typecheck_formula(pn, f)


def test_constraints_hold_on_barber(pn, barber):
    for c in pn.constraints:
        assert evaluate(pn, barber, c.formula)


def test_empty_universe_quantifiers(pn):
    empty = Structure(pn, "empty")
    body = Eq(Var("x"), Var("x"))
    assert evaluate(pn, empty, Exists("x", "Place", body)) is False
    assert evaluate(pn, empty, Forall("x", "Place", body)) is True


def test_place_to_place_arc_breaks_alternation(pn):
    m = model("mutant_place_arc.m2m", pn)
    assert evaluate(pn, m, constraint(pn, "alternate_place")) is False
    assert naive_holds(m, constraint(pn, "alternate_place")) is False


def test_supertype_quantifier_visits_all_nodes(pn, barber):
    ev = Evaluator(pn, barber)
    assert sorted(ev.range_of("Node")) == sorted(
        ["wait", "busy", "idle", "enter", "serve", "done"])
    f = Forall("x", "Node", Or(Exists("p", "Place", Eq(Var("x"), Var("p"))),
                               Exists("t", "Transition",
                                      Eq(Var("x"), Var("t")))))
    assert evaluate(pn, barber, f)


def test_unbound_variable(pn, barber):
    with pytest.raises(EvaluationError) as exc:
        evaluate(pn, barber, Eq(Var("x"), Var("x")))
    assert exc.value.code == "UNBOUND_VARIABLE"


def test_partial_function(pn):
    m = Structure.build(pn, elements={"p": "Place"})
    with pytest.raises(EvaluationError) as exc:
        evaluate(pn, m, Forall("x", "Place",
                               Eq(Apply("Tokens", (Var("x"),)), NatLit(0))))
    assert exc.value.code == "PARTIAL_FUNCTION"


def test_data_terms():
    sig = language("uml_cd.m2l")
    m = Structure(sig)
    op = TupleMake((Const("Public"), SetLit(()), Const("Integer")))
    assert evaluate(sig, m, Eq(TupleProj(op, 3), Const("Integer")))
    assert evaluate(sig, m, SetMember(Const("Real"),
                                      SetLit((Const("Real"), Const("String")))))
    assert evaluate(sig, m, Exists("v", "Visibility",
                                   Eq(Var("v"), Const("Package"))))


def test_naturals(barber, pn):
    f = parse_constraints(
        "constraint c: forall p: Place . lt(Tokens(p), plus(Tokens(p), 1));")[0]
    typecheck_formula(pn, f.formula)
    assert evaluate(pn, barber, f.formula)


def test_mentions_and_free_variables(pn):
    f = constraint(pn, "single_arc")
    assert free_variables(f) == set()
    assert mentions(f).types == {"Arc"}
    assert mentions(f).symbols >= {"src_Arc", "tgt_Arc"}


def test_rename_leaves_bound_variables(pn):
    f = constraint(pn, "single_arc")
    g = rename(f, {"Arc": "Edge", "u": "zzz"})
    assert mentions(g).types == {"Edge"}
    assert free_variables(g) == set()
    assert "zzz" not in repr(g)


def test_evaluator_matches_naive_expansion_sample():
    for seed in range(200):
        sig, m, f = random_case(seed)
        assert evaluate(sig, m, f) == naive_holds(m, f), seed


def alpha(node, prefix):
    """Rename every variable consistently; sound for closed sentences whose
    binders all have distinct names."""
    if isinstance(node, Var):
        return Var(prefix + node.name)
    if isinstance(node, (Forall, Exists)):
        return type(node)(prefix + node.var, node.type, alpha(node.body, prefix))
    if not dataclasses.is_dataclass(node):
        return node
    changes = {}
    for fld in dataclasses.fields(node):
        v = getattr(node, fld.name)
        if isinstance(v, tuple):
            changes[fld.name] = tuple(alpha(x, prefix) for x in v)
        elif dataclasses.is_dataclass(v):
            changes[fld.name] = alpha(v, prefix)
    return dataclasses.replace(node, **changes)


def test_double_negation_and_alpha_renaming():
    for seed in range(200):
        sig, m, f = random_case(seed)
        assert evaluate(sig, m, Not(Not(f))) == evaluate(sig, m, f)
        g = alpha(f, "w_")
        assert g != f or not free_variables(f)
        assert evaluate(sig, m, g) == evaluate(sig, m, f)


def test_connectives_short_circuit_safely(pn, barber):
    # the right operand would be partial; short circuit keeps it unevaluated
    partial = Eq(Apply("Tokens", (Const("nowhere"),)), NatLit(0))
    assert evaluate(pn, barber, Or(Truth(True), partial))
    assert not evaluate(pn, barber, And(Truth(False), partial))
    assert evaluate(pn, barber, Implies(Truth(False), partial))
    assert not evaluate(pn, barber, RelApp("lt", (NatLit(2), NatLit(1))))
