import random

import pytest
from hypothesis import given, settings, strategies as st

from fomlkit.errors import StructureError
from fomlkit.structure import (
    Structure, check_conformance, relabel, universe_of, validate_structure,
)
from fomlkit.values import Sym

from conftest import model
from oracles import brute_force_witnesses, naive_holds, universe


def codes(findings):
    return [f.code for f in findings]


def without(m, attr, element):
    funcs = {k: dict(v) for k, v in m.functions.items()}
    del funcs[attr][(element,)]
    return m.replace(functions=funcs)


def test_barber_is_structurally_valid(barber):
    assert validate_structure(barber) == []


def test_empty_model_is_valid(pn):
    assert validate_structure(Structure(pn)) == []
    assert check_conformance(Structure(pn)).conforms


def test_missing_tokens_on_busy(barber):
    found = validate_structure(without(barber, "Tokens", "busy"))
    assert codes(found) == ["MISSING_INTERPRETATION"]
    assert found[0].subject == "Tokens"


def test_missing_endpoint(barber):
    assert "MISSING_INTERPRETATION" in codes(
        validate_structure(without(barber, "src_Arc", "a1")))


@pytest.mark.parametrize("change,code", [
    (lambda m: m.replace(elements={**m.elements, "x": "Ghost"}),
     "UNDECLARED_TYPE"),
    (lambda m: m.replace(elements={**m.elements, "9x": "Place"}),
     "INVALID_IDENTIFIER"),
    (lambda m: m.replace(functions={**m.functions,
                                    "Tokens": {**m.functions["Tokens"],
                                               ("busy",): Sym("red")}}),
     "BAD_CODOMAIN"),
    (lambda m: m.replace(functions={**m.functions,
                                    "src_Arc": {**m.functions["src_Arc"],
                                                ("a1",): "a2"}}),
     "BAD_CODOMAIN"),
    (lambda m: m.replace(functions={**m.functions, "ghost": {("busy",): 1}}),
     "UNKNOWN_SYMBOL"),
    (lambda m: m.replace(functions={**m.functions,
                                    "Tokens": {**m.functions["Tokens"],
                                               ("enter",): 1}}),
     "BAD_ARGUMENT"),
])
def test_structural_findings(barber, change, code):
    assert code in codes(validate_structure(change(barber)))


def test_conformance_of_barber(barber):
    report = check_conformance(barber)
    assert report.conforms
    assert report.summary() == "4/4 constraints hold"
    assert all(r.witness is None for r in report.constraint_results)


def test_double_arc_witness(pn):
    m = model("mutant_double_arc.m2m", pn)
    report = check_conformance(m)
    assert not report.conforms
    assert [r.name for r in report.failed()] == ["single_arc"]
    assert dict(report.result("single_arc").witness) == {"u": "a1", "v": "a7"}
    # pairwise arc scan: which pairs share endpoints but differ
    ends = {a: m.endpoints(a) for a in universe(m, "Arc")}
    pairs = sorted((u, v) for u in ends for v in ends
                   if u != v and ends[u] == ends[v])
    assert pairs[0] == ("a1", "a7")


def test_witness_is_first_brute_force_counterexample(pn):
    from fomlkit.structure import universal_prefix
    for name in ("mutant_place_arc.m2m", "mutant_double_arc.m2m",
                 "mutant_untyped_node.m2m"):
        m = model(name, pn)
        report = check_conformance(m)
        (failed,) = report.failed()
        f = next(c.formula for c in pn.constraints if c.name == failed.name)
        binders, matrix, polarity = universal_prefix(f)
        if not polarity:
            from fomlkit.formula import Not
            matrix = Not(matrix)
        expected = brute_force_witnesses(m, binders, matrix)
        assert expected and dict(failed.witness) == expected[0]


def test_universes(pn, barber):
    assert set(universe_of(barber, "Node")) == {
        "wait", "busy", "idle", "enter", "serve", "done"}
    assert universe_of(barber, "Arc") == tuple("a%d" % i for i in range(1, 7))
    assert universe_of(Structure(pn), "Place") == ()
    with pytest.raises(StructureError):
        universe_of(barber, "Ghost")


def test_subtype_universes_are_contained(barber):
    assert set(universe_of(barber, "Place")) <= set(universe_of(barber, "Node"))
    assert universe(barber, "Node") == list(universe_of(barber, "Node"))


def test_evaluation_error_becomes_failed_result(pn):
    m = Structure.build(pn, elements={"p": "Place", "t": "Transition"},
                        endpoints=None)
    report = check_conformance(m)
    assert "MISSING_INTERPRETATION" in codes(report.structural_findings)
    assert not report.conforms


def test_insertion_order_does_not_matter(barber):
    items = list(barber.elements.items())
    random.Random(3).shuffle(items)
    again = Structure(barber.language, barber.name, dict(items),
                      {k: dict(reversed(list(v.items())))
                       for k, v in barber.functions.items()})
    assert again == barber
    assert check_conformance(again) == check_conformance(barber)


@settings(max_examples=100, deadline=None)
@given(st.permutations(list(range(16))))
def test_conformance_invariant_under_renaming(perm):
    from conftest import language
    pn = language("petri.m2l")
    for name in ("barber.m2m", "mutant_double_arc.m2m"):
        m = model(name, pn)
        ids = sorted(m.elements)
        fresh = ["q%02d" % perm[i] for i in range(len(ids))]
        renamed = relabel(m, dict(zip(ids, fresh)))
        a, b = check_conformance(m), check_conformance(renamed)
        assert [r.holds for r in a.constraint_results] == \
            [r.holds for r in b.constraint_results]
        for c in pn.constraints:
            assert naive_holds(renamed, c.formula) == naive_holds(m, c.formula)
