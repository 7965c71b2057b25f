"""Command-line interface: ``fomlkit check|derive|fuse|restrict|event|bootstrap``.

Exit status: 0 success, 1 nonconformance or failed operation, 2 usage or
parse error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from .composition import fuse_signatures, restrict_signature
from .errors import KernelError, ParseError
from .events import enabled, event_for, run_domain
from .m2fol import (
    bootstrap_check, derive_signature, m2fol_signature, self_description,
)
from .structure import ConformanceReport, check_conformance
from .textio import (
    format_value, parse_bindings, parse_constraints, parse_language,
    parse_model, serialize_language, serialize_model,
)
from .values import Sym

log = logging.getLogger("fomlkit")

OK, FAILED, USAGE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError("cannot read %s: %s" % (path, exc.strerror)) from None


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8", newline="\n")
    log.info("wrote %s", path)


def _pairs(items: Sequence[str], what: str) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise UsageError("%s must look like key=value, got %r" % (what, item))
        out[key.strip()] = value.strip()
    return out


# -- reports ---------------------------------------------------------------


def report_dict(model_name: str, language: str,
                report: ConformanceReport) -> dict[str, Any]:
    """Stable JSON-ready view of a conformance report."""
    return {
        "model": model_name,
        "language": language,
        "conforms": report.conforms,
        "summary": report.summary(),
        "structural_findings": [
            {"code": f.code, "subject": f.subject, "message": f.message}
            for f in report.structural_findings],
        "constraints": [
            {"name": r.name, "holds": r.holds,
             "witness": [[v, format_value(x)] for v, x in r.witness or ()],
             "error": r.error}
            for r in report.constraint_results],
    }


def report_text(model_name: str, language: str, report: ConformanceReport,
                verbose: bool = False) -> str:
    lines = ["model %s : %s" % (model_name, language)]
    for f in report.structural_findings:
        lines.append("  finding %s" % f)
    for r in report.constraint_results:
        if r.holds:
            if verbose:
                lines.append("  ok    %s" % r.name)
            continue
        line = "  FAIL  %s" % r.name
        if r.witness:
            line += "  witness: " + r.witness_text()
        if r.error:
            line += "  (%s)" % r.error
        lines.append(line)
    lines.append(report.summary())
    lines.append("conforms" if report.conforms else "does not conform")
    return "\n".join(lines) + "\n"


def _emit(args, data: dict[str, Any], text: str) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)


# -- commands --------------------------------------------------------------


def cmd_check(args) -> int:
    sig = parse_language(_read(args.language), args.language)
    model = parse_model(_read(args.model), sig, args.model)
    report = check_conformance(model)
    _emit(args, report_dict(model.name, sig.name, report),
          report_text(model.name, sig.name, report, args.verbose))
    return OK if report.conforms else FAILED


def cmd_derive(args) -> int:
    mm = parse_model(_read(args.metamodel), m2fol_signature(), args.metamodel)
    extra = []
    if args.constraints:
        extra = parse_constraints(_read(args.constraints), args.constraints)
    rename = _pairs([p for p in (args.rename or "").split(",") if p], "rename")
    sig = derive_signature(mm, extra, rename)
    _write(args.out, serialize_language(sig))
    return OK


def cmd_fuse(args) -> int:
    a = parse_language(_read(args.left), args.left)
    b = parse_language(_read(args.right), args.right)
    binding = parse_bindings(_read(args.bindings), args.bindings)
    _write(args.out, serialize_language(fuse_signatures(a, b, binding)))
    return OK


def cmd_restrict(args) -> int:
    sig = parse_language(_read(args.language), args.language)
    keep = [t.strip() for t in args.types.split(",") if t.strip()]
    _write(args.out, serialize_language(
        restrict_signature(sig, keep, reclose=args.reclose)))
    return OK


def _argument(sig, text: str):
    if text.isdigit():
        return int(text)
    if text in sig.constant_map:
        return Sym(text)
    return text


def cmd_event(args) -> int:
    sig = parse_language(_read(args.language), args.language)
    model = parse_model(_read(args.model), sig, args.model)
    ev = event_for(sig, args.event)
    if args.enabled:
        rows = [[format_value(x) for x in combo] for combo in enabled(model, ev)]
        params = [v for v, _ in ev.params]
        text = "".join(", ".join("%s=%s" % kv for kv in zip(params, row)) + "\n"
                       for row in rows)
        _emit(args, {"event": ev.name, "params": params, "enabled": rows}, text)
        return OK
    values = {k: _argument(sig, v)
              for k, v in _pairs(args.args, "argument").items()}
    out, trace = run_domain(model, ev, values)
    for step in trace:
        log.info("%s", step)
    _write(args.out, serialize_model(out))
    return OK


def cmd_bootstrap(args) -> int:
    report = bootstrap_check()
    derived, builtin = self_description()
    closed = derived == builtin
    data = report_dict("M2FOL", "M2FOL", report)
    data["self_describing"] = closed
    text = report_text("M2FOL", "M2FOL", report, args.verbose)
    text += ("derived signature matches the built-in\n" if closed
             else "derived signature differs from the built-in\n")
    _emit(args, data, text)
    return OK if report.conforms and closed else FAILED


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fomlkit",
        description="Check, derive, compose and operate on typed "
                    "first-order modeling languages.")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="output format for reports (default: text)")
    p.add_argument("--verbose", action="store_true",
                   help="list passing constraints and log progress")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    c = sub.add_parser("check", help="check a model against its language")
    c.add_argument("language")
    c.add_argument("model")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("derive", help="derive a language from a metamodel")
    d.add_argument("metamodel")
    d.add_argument("out", help="output .m2l file, or - for stdout")
    d.add_argument("--constraints", help=".m2c file with the language's "
                   "constraints")
    d.add_argument("--rename", help="comma separated old=new pairs applied "
                   "to element ids")
    d.set_defaults(func=cmd_derive)

    f = sub.add_parser("fuse", help="fuse two languages")
    f.add_argument("left")
    f.add_argument("right")
    f.add_argument("bindings")
    f.add_argument("out")
    f.set_defaults(func=cmd_fuse)

    r = sub.add_parser("restrict", help="restrict a language to some types")
    r.add_argument("language")
    r.add_argument("types", help="comma separated type names to keep")
    r.add_argument("out")
    r.add_argument("--reclose", action="store_true",
                   help="keep inheritance through dropped types")
    r.set_defaults(func=cmd_restrict)

    e = sub.add_parser("event", help="apply a domain event to a model")
    e.add_argument("language")
    e.add_argument("model")
    e.add_argument("event")
    e.add_argument("args", nargs="*", metavar="NAME=VALUE")
    e.add_argument("--out", default="-", help="output .m2m file "
                   "(default: stdout)")
    e.add_argument("--enabled", action="store_true",
                   help="list the argument tuples the event is enabled for")
    e.set_defaults(func=cmd_event)

    b = sub.add_parser("bootstrap", help="check the metalanguage against "
                       "its own metamodel")
    b.set_defaults(func=cmd_bootstrap)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return USAGE
    except ParseError as exc:
        for diag in exc.diagnostics:
            print(diag, file=sys.stderr)
        return USAGE
    except KernelError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return FAILED
    except Exception as exc:  # noqa: BLE001 - last line of defence
        log.debug("internal error", exc_info=True)
        print("internal error: %r" % exc, file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
