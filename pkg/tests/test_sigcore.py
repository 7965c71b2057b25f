import random

import pytest
from hypothesis import given, settings, strategies as st

from fomlkit.errors import SignatureError
from fomlkit.sigcore import (
    Constraint, EnumDomain, FunctionSymbol, Kind, ProductDomain, RefDomain,
    RelationSymbol, Role, SignatureDecl, TypeName, UnionDomain, is_subtype,
    subtype_order, supertypes, transitive_closure, validate_signature,
)
from fomlkit.formula import Eq, Forall, Var

from generators import random_order
from oracles import floyd_warshall, has_cycle


def objects(*names, inh=()):
    return SignatureDecl(types=tuple(TypeName(n, Kind.OBJECT) for n in names),
                         inh=inh)


def test_petri_language_is_valid(pn):
    assert validate_signature(pn).findings == ()


def test_empty_signature_is_valid():
    assert validate_signature(SignatureDecl()).ok


def test_two_cycle_is_reported():
    sig = objects("A", "B", inh=(("A", "B"), ("B", "A")))
    assert "CYCLIC_INHERITANCE" in validate_signature(sig).codes()
    with pytest.raises(SignatureError):
        subtype_order(sig)


def test_subtype_order_examples(pn):
    assert subtype_order(pn) == {("Place", "Node"), ("Transition", "Node")}
    assert subtype_order(objects("A")) == frozenset()
    chain = objects("A", "B", "C", inh=(("A", "B"), ("B", "C")))
    assert subtype_order(chain) == {("A", "B"), ("B", "C"), ("A", "C")}


def test_is_subtype(pn):
    assert is_subtype(pn, "Place", "Node")
    assert is_subtype(pn, "Node", "Node")
    assert not is_subtype(pn, "Node", "Place")
    assert supertypes(pn, "Place") == {"Place", "Node"}


def test_declaration_order_does_not_matter(pn):
    shuffled = SignatureDecl(pn.name, tuple(reversed(pn.types)), pn.domains,
                             tuple(reversed(pn.inh)),
                             tuple(reversed(pn.functions)), pn.relations,
                             tuple(reversed(pn.constraints)))
    assert shuffled == pn


def test_relation_type_needs_endpoints():
    sig = SignatureDecl(types=(TypeName("A", Kind.OBJECT),
                               TypeName("R", Kind.RELATION)))
    assert validate_signature(sig).codes().count("MISSING_ENDPOINT") == 2


def test_endpoint_must_target_object_type():
    sig = SignatureDecl(
        types=(TypeName("A", Kind.OBJECT), TypeName("R", Kind.RELATION)),
        functions=(FunctionSymbol("src_R", ("R",), RefDomain("R"),
                                  Role.REL_SOURCE),
                   FunctionSymbol("tgt_R", ("R",), RefDomain("A"),
                                  Role.REL_TARGET)))
    assert validate_signature(sig).codes() == ["BAD_ROLE_SIGNATURE"]


@pytest.mark.parametrize("sig,code", [
    (SignatureDecl(types=(TypeName("1x", Kind.OBJECT),)), "INVALID_IDENTIFIER"),
    (SignatureDecl(types=(TypeName("A", Kind.OBJECT), TypeName("A", Kind.DATA)),
                   domains=(("A", EnumDomain(("a",))),)), "DUPLICATE_NAME"),
    (SignatureDecl(types=(TypeName("D", Kind.DATA),)), "MISSING_DOMAIN"),
    (SignatureDecl(types=(TypeName("D", Kind.DATA), TypeName("E", Kind.DATA)),
                   domains=(("D", EnumDomain(("x",))),
                            ("E", EnumDomain(("x", "y"))))),
     "DUPLICATE_CONSTANT"),
    (SignatureDecl(types=(TypeName("D", Kind.DATA),),
                   domains=(("D", UnionDomain((RefDomain("D"),
                                                EnumDomain(("a",))))),)),
     "RECURSIVE_DOMAIN"),
    (SignatureDecl(types=(TypeName("D", Kind.DATA),),
                   domains=(("D", ProductDomain((EnumDomain(("a",)),))),)),
     "BAD_ARITY"),
    (SignatureDecl(types=(TypeName("A", Kind.OBJECT),),
                   functions=(FunctionSymbol("f", ("A",), RefDomain("Z"),
                                             Role.ATTRIBUTE),)),
     "UNDECLARED_TYPE"),
    (SignatureDecl(types=(TypeName("A", Kind.OBJECT),),
                   relations=(RelationSymbol("r", (RefDomain("A"),)),)),
     "BAD_ARITY"),
    (SignatureDecl(types=(TypeName("A", Kind.OBJECT),),
                   relations=(RelationSymbol("lt", (RefDomain("A"),
                                                    RefDomain("A"))),)),
     "RESERVED_NAME"),
    (SignatureDecl(types=(TypeName("A", Kind.OBJECT),),
                   constraints=(Constraint("c", Eq(Var("x"), Var("x"))),)),
     "CONSTRAINT_NOT_CLOSED"),
    (SignatureDecl(types=(TypeName("A", Kind.OBJECT),
                          TypeName("D", Kind.DATA)),
                   domains=(("D", EnumDomain(("a",))),),
                   inh=(("A", "D"),)), "BAD_INHERITANCE"),
])
def test_findings(sig, code):
    assert code in validate_signature(sig).codes()


def test_ill_typed_constraint_is_a_finding(pn):
    bad = Forall("x", "Place", Eq(Var("x"), Var("y")))
    sig = pn.replace(constraints=pn.constraints + (Constraint("bad", bad),))
    assert validate_signature(sig).codes() == ["CONSTRAINT_NOT_CLOSED"]


def test_report_is_deterministic():
    sig = objects("B", "A", inh=(("A", "B"), ("B", "A")))
    assert str(validate_signature(sig)) == str(validate_signature(sig))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_closure_matches_floyd_warshall(n, seed):
    names, edges = random_order(random.Random(seed), n)
    sig = objects(*names, inh=tuple(edges))
    expected = floyd_warshall(edges)
    assert set(subtype_order(sig)) == expected
    assert set(transitive_closure(edges)) == expected
    assert all(a != b for a, b in subtype_order(sig))
    assert validate_signature(sig).ok


@settings(max_examples=60, deadline=None)
@given(st.sets(st.tuples(st.sampled_from("ABCDEF"), st.sampled_from("ABCDEF")),
               max_size=10))
def test_cycle_detection_matches_dfs(edges):
    sig = objects(*"ABCDEF", inh=tuple(edges))
    found = "CYCLIC_INHERITANCE" in validate_signature(sig).codes()
    assert found == has_cycle(edges)


def test_is_subtype_rejects_unknown_names(pn):
    with pytest.raises(SignatureError) as exc:
        is_subtype(pn, "Place", "Ghost")
    assert exc.value.code == "UNKNOWN_TYPE"
