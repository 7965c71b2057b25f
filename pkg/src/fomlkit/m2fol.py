"""The built-in metalanguage, deriving a language from a metamodel, and the
self-description check."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

from .composition import rename_signature, transitive_reduction
from .errors import DerivationError, FormulaTypeError
from .formula import typecheck_formula
from .sigcore import (
    Constraint, EnumDomain, FunctionSymbol, Kind, ListDomain, NatDomain,
    RefDomain, Role, SignatureDecl, TypeName, ValueDomain, product,
    source_symbol, target_symbol, transitive_closure, validate_signature,
)
from .structure import ConformanceReport, Structure, check_conformance

ORDER_RELATION = "lt_OT"
NAT_TYPE = "Nat"
LIST_PREFIX = "list_"

# Element ids of the self-describing metamodel -> names in the built-in.
M2FOL_RENAMES: Mapping[str, str] = {
    "ot": "OT", "rt": "RT", "at": "AT", "dt": "DT", "d": "D",
    "ort": "ORT", "dort": "DORT", "inh": "Inh", "fr": "Fr", "to": "To",
    "val_dom": "F_val", "ass_to": "F_type", "ass_dt": "F_DT",
    "list_dort": "T_DORT",
}

# Element ids of the Petri net metamodel -> names in the Petri net language.
PETRI_RENAMES: Mapping[str, str] = {
    "n": "Node", "p": "Place", "tr": "Transition", "a": "Arc", "tok": "Tokens",
}


def _data(name: str) -> str:
    return (resources.files("fomlkit") / "data" / name).read_text("utf-8")


@lru_cache(maxsize=None)
def m2fol_signature() -> SignatureDecl:
    from .textio import parse_language
    return parse_language(_data("m2fol.m2l"), "m2fol.m2l")


def m2fol_metamodel() -> Structure:
    """The metamodel of the metalanguage itself, as one of its models."""
    from .textio import parse_model
    return parse_model(_data("m2fol_meta.m2m"), m2fol_signature(),
                       "m2fol_meta.m2m")


def bootstrap_check() -> ConformanceReport:
    return check_conformance(m2fol_metamodel())


# -- closure of the inheritance order --------------------------------------


def inh_edges(mm: Structure) -> set[tuple[str, str]]:
    src = mm.functions.get(source_symbol("Inh"), {})
    tgt = mm.functions.get(target_symbol("Inh"), {})
    return {(src[(u,)], tgt[(u,)]) for u in mm.universe("Inh")
            if (u,) in src and (u,) in tgt}


def complete_closure(mm: Structure) -> Structure:
    """Return ``mm`` with the order relation set to the closure of Inh."""
    closure = transitive_closure(inh_edges(mm))
    loops = sorted(a for a, b in closure if a == b)
    if loops:
        raise DerivationError("inheritance cycle through %s" % ", ".join(loops),
                              code="CYCLIC_INHERITANCE")
    relations = {k: set(v) for k, v in mm.relations.items()}
    relations[ORDER_RELATION] = closure
    return mm.replace(relations=relations)


# -- derivation ------------------------------------------------------------


def _data_domain(dt: str, constants: list[str]) -> ValueDomain:
    if dt == NAT_TYPE:
        return NatDomain()
    if dt.startswith(LIST_PREFIX) and len(dt) > len(LIST_PREFIX):
        return ListDomain(RefDomain(dt[len(LIST_PREFIX):]))
    return EnumDomain(tuple(constants))


def _value_domain(a: str, value) -> ValueDomain:
    refs = [RefDomain(x) for x in value] if isinstance(value, tuple) else []
    if not refs:
        raise DerivationError("attribute %r has an empty value domain" % a,
                              code="NONCONFORMANT_METAMODEL")
    return product(refs)


def _check_injective(sig: SignatureDecl) -> None:
    seen: dict[str, str] = {}
    names = ([("type", t.name) for t in sig.types]
             + [("symbol", f.name) for f in sig.functions]
             + [("constant", c) for _, d in sig.domains
                if isinstance(d, EnumDomain) for c in d.constants])
    for what, n in names:
        if n in seen:
            raise DerivationError(
                "%s %r collides with a %s of the same name" % (what, n, seen[n]),
                code="NAME_COLLISION")
        seen[n] = what


def derive_signature(mm: Structure, extra_constraints: Iterable[Constraint] = (),
                     rename: Mapping[str, str] | None = None) -> SignatureDecl:
    """Deduce a language signature from a conforming metamodel.

    Object, relation and data types come from the OT, RT and DT elements;
    inheritance is the reduction of the order relation; attributes come from
    the AT elements. ``rename`` maps element ids to the names to declare, and
    ``extra_constraints`` are type-checked against the renamed result.
    """
    report = check_conformance(mm)
    if not report.conforms:
        bad = [str(f) for f in report.structural_findings]
        bad += [r.name for r in report.failed()]
        raise DerivationError("metamodel does not conform: " + "; ".join(bad),
                              code="NONCONFORMANT_METAMODEL")
    fn = mm.functions

    def f(sym, x):
        return fn.get(sym, {}).get((x,))

    types = [TypeName(x, Kind.OBJECT) for x in mm.universe("OT")]
    types += [TypeName(x, Kind.RELATION) for x in mm.universe("RT")]
    inh = transitive_reduction(mm.relation_tuples(ORDER_RELATION))

    functions = []
    for rel in mm.universe("RT"):
        ends = {}
        for kind in ("Fr", "To"):
            found = [u for u in mm.universe(kind) if f("src_" + kind, u) == rel]
            ends[kind] = f("tgt_" + kind, found[0])
        functions.append(FunctionSymbol(source_symbol(rel), (rel,),
                                        RefDomain(ends["Fr"]), Role.REL_SOURCE))
        functions.append(FunctionSymbol(target_symbol(rel), (rel,),
                                        RefDomain(ends["To"]), Role.REL_TARGET))

    domains = []
    for dt in mm.universe("DT"):
        consts = [d for d in mm.universe("D") if f("F_DT", d) == dt]
        types.append(TypeName(dt, Kind.DATA))
        domains.append((dt, _data_domain(dt, consts)))

    for a in mm.universe("AT"):
        functions.append(FunctionSymbol(a, (f("F_type", a),),
                                        _value_domain(a, f("F_val", a)),
                                        Role.ATTRIBUTE))

    sig = SignatureDecl(name=mm.name, types=tuple(types), domains=tuple(domains),
                        inh=tuple(inh), functions=tuple(functions))
    if rename:
        sig = rename_signature(sig, rename)
    _check_injective(sig)

    constraints = tuple(extra_constraints)
    for c in constraints:
        try:
            typecheck_formula(sig, c.formula)
        except FormulaTypeError as exc:
            raise DerivationError("constraint %s: %s" % (c.name, exc),
                                  code="ILL_TYPED_EXTRA_CONSTRAINT") from None
    sig = sig.replace(constraints=constraints)
    findings = validate_signature(sig)
    if not findings.ok:
        raise DerivationError(str(findings), code="INVALID_RESULT")
    return sig


def signature_core(sig: SignatureDecl) -> SignatureDecl:
    """``sig`` without postulates, events and the order relation: the part a
    derivation can reproduce."""
    return sig.replace(
        constraints=(), events=(),
        relations=tuple(r for r in sig.relations if r.name != ORDER_RELATION))


def self_description() -> tuple[SignatureDecl, SignatureDecl]:
    """(derived from the self-describing metamodel, built-in core)."""
    derived = derive_signature(m2fol_metamodel(), rename=M2FOL_RENAMES)
    return derived, signature_core(m2fol_signature())
