"""End-to-end acceptance checks.

Each test prints one ``PASS``/``FAIL`` line. Run with ``pytest -v`` or
directly with ``python3 tests/test_acceptance.py``.
"""

import io
import random
import sys
import time
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fomlkit.cli import main
from fomlkit.composition import FusionBinding, fuse_signatures, restrict_signature
from fomlkit.formula import evaluate
from fomlkit.m2fol import (
    PETRI_RENAMES, bootstrap_check, derive_signature, m2fol_signature,
    self_description,
)
from fomlkit.sigcore import (
    Constraint, Kind, SignatureDecl, TypeName, subtype_order, transitive_closure,
    validate_signature,
)
from fomlkit.structure import check_conformance, relabel
from fomlkit.textio import (
    parse_bindings, parse_constraints, parse_language, parse_model,
    serialize_language, serialize_model,
)

from conftest import FIXTURES, language, model, read
from generators import random_case, random_model, random_order, random_sentence, random_signature
from oracles import floyd_warshall, naive_holds

PN = str(FIXTURES / "petri.m2l")
_printer = None


def report(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = "%s  criterion %d: %s" % ("PASS" if ok else "FAIL", number, title)
    if detail:
        line += " (%s)" % detail
    if _printer is not None:
        with _printer():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


@pytest.fixture(autouse=True)
def _visible(capsys):
    global _printer
    _printer = capsys.disabled
    yield
    _printer = None


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    cli.stderr = err.getvalue()
    return code, out.getvalue()


def test_1_barber_conforms():
    start = time.perf_counter()
    code, out = cli("check", PN, str(FIXTURES / "barber.m2m"))
    elapsed = time.perf_counter() - start
    ok = code == 0 and "4/4 constraints hold" in out and elapsed < 1.0
    report(1, "barber shop conforms", ok, "exit %d, %.3f s" % (code, elapsed))


def test_2_mutant_witnesses():
    expected = {
        "mutant_place_arc": ("alternate_place", "x=wait, y=idle, u=a7"),
        "mutant_double_arc": ("single_arc", "u=a1, v=a7"),
        "mutant_untyped_node": ("abstract_node", "x=stray"),
    }
    bad = []
    for name, (constraint, witness) in expected.items():
        code, out = cli("check", PN, str(FIXTURES / (name + ".m2m")))
        fails = [l for l in out.splitlines() if l.startswith("  FAIL")]
        _, json_out = cli("--format", "json", "check", PN,
                          str(FIXTURES / (name + ".m2m")))
        if (code != 1
                or fails != ["  FAIL  %s  witness: %s" % (constraint, witness)]
                or json_out != read("golden/check_%s.json" % name)):
            bad.append(name)
    report(2, "mutants fail with the expected witnesses", not bad,
           ", ".join(bad) or "3 mutants")


def test_3_petri_derivation():
    pn = language("petri.m2l")
    meta = model("petri_meta.m2m", m2fol_signature())
    extra = parse_constraints(read("petri_constraints.m2c"))
    derived = derive_signature(meta, extra, PETRI_RENAMES)
    text = serialize_language(derived)
    report(3, "derivation reproduces the Petri net language",
           derived == pn and text == read("petri.m2l"))


def test_4_bootstrap():
    m2fol_signature.cache_clear()
    start = time.perf_counter()
    conf = bootstrap_check()
    derived, builtin = self_description()
    elapsed = time.perf_counter() - start
    ok = conf.conforms and derived == builtin and elapsed < 1.0
    report(4, "metalanguage describes itself", ok,
           "%s, %.3f s" % (conf.summary(), elapsed))


def test_5_uml_fusion():
    cd, sd = language("uml_cd.m2l"), language("uml_sd.m2l")
    uml = fuse_signatures(cd, sd, parse_bindings(read("uml.m2b")))
    counts = [len(uml.names_of(k)) for k in (Kind.OBJECT, Kind.RELATION,
                                              Kind.DATA)]
    shape = (counts, len(uml.functions), len(uml.relations),
             len(uml.constraints))
    bad = check_conformance(model("uml_bad.m2m", uml))
    good = check_conformance(model("uml_good.m2m", uml))
    ok = (shape == ([2, 3, 6], 15, 2, 4)
          and serialize_language(uml) == read("golden/uml_fused.m2l")
          and [r.name for r in bad.failed()] == ["called_operation_owned"]
          and good.conforms
          and good.result("sequential_messages").holds
          and good.result("synchronous_replies").holds)
    report(5, "UML fusion", ok, "types %s, %d functions, %d relations, "
           "%d constraints" % shape)


def test_6_firing():
    code, out = cli("event", PN, str(FIXTURES / "barber.m2m"), "fire",
                    "t=serve")
    pn = language("petri.m2l")
    after = parse_model(out, pn)
    tokens = {p: after.attribute(p, "Tokens") for p in ("wait", "busy", "idle")}
    done_code, _ = cli("event", PN, str(FIXTURES / "barber.m2m"), "fire",
                       "t=done")
    rejected = done_code == 1 and "PRECONDITION_FAILED" in cli.stderr
    _, before_en = cli("event", PN, str(FIXTURES / "barber.m2m"), "fire",
                       "--enabled")
    _, after_en = cli("event", PN, str(FIXTURES / "golden/barber_after_serve.m2m"),
                      "fire", "--enabled")
    ok = (code == 0 and tokens == {"wait": 1, "busy": 1, "idle": 0}
          and rejected
          and before_en == "t=enter\nt=serve\n"
          and after_en == "t=done\nt=enter\n")
    report(6, "firing serve", ok, "tokens %s" % tokens)


def test_7_oracle_equivalence():
    start = time.perf_counter()
    disagreements, largest = [], 0
    n = 1000
    for seed in range(n):
        sig, m, f = random_case(seed)
        largest = max(largest, len(m.elements))
        if evaluate(sig, m, f) != naive_holds(m, f):
            disagreements.append(seed)
    elapsed = time.perf_counter() - start
    ok = not disagreements and largest <= 8 and elapsed < 60
    report(7, "evaluator agrees with naive expansion", ok,
           "%d pairs, %d disagreements, largest universe %d, %.2f s"
           % (n, len(disagreements), largest, elapsed))


def _closure_ok(rng):
    for n in range(1, 21):
        names, edges = random_order(rng, n)
        sig = SignatureDecl(name="O", types=tuple(
            TypeName(x, Kind.OBJECT) for x in names), inh=tuple(edges))
        expected = floyd_warshall(edges)
        if (set(subtype_order(sig)) != expected
                or set(transitive_closure(edges)) != expected):
            return False
    return True


def _restriction_ok(rng):
    for _ in range(50):
        sig = random_signature(rng, max_objects=4)
        names = [t.name for t in sig.types]
        keep = rng.sample(names, rng.randint(0, len(names)))
        once = restrict_signature(sig, keep)
        kept = [t.name for t in once.types]
        if restrict_signature(once, kept) != once or not validate_signature(once).ok:
            return False
    return True


def _fusion_ok(rng):
    sigs = [language(n) for n in ("petri.m2l", "uml_cd.m2l", "uml_sd.m2l")]
    sigs += [random_signature(rng) for _ in range(20)]
    empty = SignatureDecl(name="E")
    return all(fuse_signatures(s, empty, FusionBinding()) == s for s in sigs)


def _renaming_ok(rng):
    pn = language("petri.m2l")
    models = [model(n, pn) for n in ("barber.m2m", "mutant_place_arc.m2m",
                                     "mutant_double_arc.m2m",
                                     "mutant_untyped_node.m2m")]
    for i in range(100):
        m = models[i % len(models)]
        ids = sorted(m.elements)
        fresh = ["e%03d" % k for k in rng.sample(range(1000), len(ids))]
        renamed = relabel(m, dict(zip(ids, fresh)))
        a, b = check_conformance(m), check_conformance(renamed)
        if [r.holds for r in a.constraint_results] != \
                [r.holds for r in b.constraint_results]:
            return False
    return True


def _round_trip_ok(rng):
    for _ in range(100):
        sig = random_signature(rng, max_objects=4, max_relations=3,
                               max_attributes=3)
        sig = sig.replace(constraints=tuple(
            Constraint("c%d" % i, random_sentence(rng, sig, depth=5))
            for i in range(3)))
        text = serialize_language(sig)
        back = parse_language(text, validate=False)
        m = random_model(rng, sig)
        mtext = serialize_model(m)
        if (back != sig or serialize_language(back) != text
                or parse_model(mtext, sig) != m):
            return False
    return True


def test_8_property_suites():
    rng = random.Random(20261016)
    results = {
        "closure": _closure_ok(rng),
        "restriction": _restriction_ok(rng),
        "fusion identity": _fusion_ok(rng),
        "renaming": _renaming_ok(rng),
        "round trip": _round_trip_ok(rng),
    }
    failed = [k for k, v in results.items() if not v]
    report(8, "property suites", not failed,
           "failed: " + ", ".join(failed) if failed else "5 suites")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
