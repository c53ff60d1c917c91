"""Command line front end.

Exit codes: 0 for a positive verdict, 1 when a formula is falsified or
a derivation rejected, 2 when the evaluator cannot determine an answer
within its caps, 3 for malformed input.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .corpus import Corpus, UnknownEntry, paper_suite
from .formula import FRAGMENTS
from .hilbert import UnknownLogic, check, get_logic
from .parser import (
    ParseError,
    SourceSpan,
    parse_derivation,
    parse_formula,
    parse_poset_model,
    parse_real_system,
    print_formula,
    print_poset_model,
)
from .poset import (
    ContinuityRequired,
    DomainNotInvariant,
    MalformedOrder,
    MalformedStep,
    MalformedValuation,
    eval_formula,
)
from .realline import (
    EvalCaps,
    MalformedMap,
    MalformedSystem,
    Status,
    eval_real,
)
from .search import (
    BoundTooLarge,
    Countermodel,
    CorpusMissing,
    SemanticClass,
    Undetermined,
    ValidUpTo,
    build_separation_matrix,
    validity,
)

INPUT_ERRORS = (
    ParseError,
    MalformedOrder,
    MalformedStep,
    MalformedValuation,
    MalformedMap,
    MalformedSystem,
    ContinuityRequired,
    DomainNotInvariant,
    UnknownLogic,
    UnknownEntry,
    CorpusMissing,
    BoundTooLarge,
    FileNotFoundError,
    IsADirectoryError,
)


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists() and not p.is_absolute() and path.startswith("corpus/"):
        bundled = Path(__file__).parent / path
        if bundled.exists():
            return bundled
    return p


def _emit(args, plain: str, records: list[tuple[str, str]]):
    if args.format == "records":
        for key, value in records:
            print(f"{key}={value}")
    else:
        print(plain)


def _parse_caps(spec: str, base: EvalCaps) -> EvalCaps:
    fields = {}
    span = SourceSpan(0, len(spec))
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in ("iter", "restart", "orbit", "window"):
            raise ParseError(f"bad caps item {item!r}", span)
        try:
            fields[key] = int(value)
        except ValueError:
            raise ParseError(f"bad caps value {value!r}", span) from None
    return replace(base, **fields)


def _cmd_parse(args) -> int:
    phi = parse_formula(args.formula)
    member = [code for code, frag in FRAGMENTS.items() if frag.allows(phi)]
    _emit(
        args,
        f"{print_formula(phi)}\nfragments: {' '.join(member) or '-'}",
        [("formula", print_formula(phi)), ("fragments", " ".join(member))],
    )
    return 0


def _cmd_check(args) -> int:
    model, valuation = parse_poset_model(_resolve(args.model).read_text())
    phi = parse_formula(args.formula)
    extension = eval_formula(model, valuation, phi)
    listed = "{" + ", ".join(w for w in model.worlds if w in extension) + "}"
    failing = [w for w in model.worlds if w not in extension]
    if failing:
        _emit(
            args,
            f"extension: {listed}\nfalsified at: {failing[0]}",
            [("extension", listed), ("verdict", "falsified"), ("world", failing[0])],
        )
        return 1
    _emit(args, f"extension: {listed}\nvalid", [("extension", listed), ("verdict", "valid")])
    return 0


def _cmd_real_check(args) -> int:
    system = parse_real_system(_resolve(args.system).read_text())
    if args.caps:
        system = replace(system, caps=_parse_caps(args.caps, system.caps))
    phi = parse_formula(args.formula)
    outcome = eval_real(system, phi, system.caps)
    status = outcome.status.name.lower()
    if outcome.status is Status.UNDETERMINED or outcome.value is None:
        _emit(
            args,
            f"status: {status}\nundetermined",
            [("status", status), ("verdict", "undetermined")],
        )
        return 2
    from .realline import REALS

    verdict = "valid" if outcome.value == REALS else "not valid"
    _emit(
        args,
        f"extension: {outcome.value}\nstatus: {status}\n{verdict}",
        [("extension", str(outcome.value)), ("status", status), ("verdict", verdict)],
    )
    return 0 if verdict == "valid" else 1


def _cmd_validate(args) -> int:
    phi = parse_formula(args.formula)
    verdict = validity(phi, SemanticClass(args.semclass, args.bound))
    if isinstance(verdict, ValidUpTo):
        _emit(
            args,
            f"valid in class {args.semclass} up to {verdict.bound} worlds",
            [("verdict", "valid"), ("bound", str(verdict.bound))],
        )
        return 0
    if isinstance(verdict, Countermodel):
        rendered = print_poset_model(verdict.model, verdict.valuation)
        _emit(
            args,
            f"countermodel:\n{rendered}\nfalsified at: {verdict.world}",
            [("verdict", "falsified"), ("world", verdict.world), ("model", repr(rendered))],
        )
        return 1
    assert isinstance(verdict, Undetermined)
    _emit(args, f"undetermined: {verdict.reason}", [("verdict", "undetermined")])
    return 2


def _cmd_prove(args) -> int:
    logic = get_logic(args.logic)
    derivation = parse_derivation(_resolve(args.path).read_text())
    result = check(derivation, logic)
    if result.ok:
        theorem = print_formula(derivation.theorem)
        _emit(
            args,
            f"accepted ({result.line_count} lines)\ntheorem: {theorem}",
            [("verdict", "accepted"), ("lines", str(result.line_count)), ("theorem", theorem)],
        )
        return 0
    _emit(
        args,
        f"rejected at line {result.failed_line}: {result.reason}",
        [
            ("verdict", "rejected"),
            ("line", str(result.failed_line)),
            ("reason", result.reason),
        ],
    )
    return 1


def _cmd_paper_suite(args) -> int:
    corpus = Corpus(args.corpus)
    results = paper_suite(corpus, args.filter)
    if not results:
        print(f"no facts match {args.filter!r}", file=sys.stderr)
        return 3
    failures = 0
    for fact, result in results:
        word = "PASS" if result.ok else "FAIL"
        failures += 0 if result.ok else 1
        if args.format == "records":
            print(f"fact={fact.id}; ok={str(result.ok).lower()}; detail={result.detail}")
        else:
            print(f"{word} {fact.id}: {result.detail}")
    if args.format != "records":
        print(f"{len(results) - failures}/{len(results)} facts hold")
    return 1 if failures else 0


def _cmd_separate(args) -> int:
    corpus = Corpus(args.corpus)
    reports = build_separation_matrix(corpus)
    bad = 0
    for report in reports:
        edge = report.edge
        word = "OK" if report.ok else "FAIL"
        bad += 0 if report.ok else 1
        if args.format == "records":
            print(
                f"from={edge.source}; to={edge.target}; style={edge.style}; "
                f"label={edge.label}; ok={str(report.ok).lower()}; detail={report.detail}"
            )
        else:
            print(
                f"{word} {edge.source} -> {edge.target} [{edge.style}, {edge.label}]: "
                f"{report.detail}"
            )
    if args.format != "records":
        print(f"{len(reports) - bad}/{len(reports)} edges verified")
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itlmc",
        description="Model checking and derivation checking for intuitionistic temporal logics.",
    )
    parser.add_argument(
        "--format", choices=("plain", "records"), default="plain",
        help="output style: human-readable or key=value records",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="normalize a formula and show its fragments")
    p.add_argument("formula")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("check", help="evaluate a formula on a dynamic poset model")
    p.add_argument("--model", required=True)
    p.add_argument("formula")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("real-check", help="evaluate a formula on a real-line system")
    p.add_argument("--system", required=True)
    p.add_argument("--caps", help="override budgets, e.g. iter=32,restart=4")
    p.add_argument("formula")
    p.set_defaults(func=_cmd_real_check)

    p = sub.add_parser("validate", help="search bounded posets for a countermodel")
    p.add_argument(
        "--class", dest="semclass", choices=("e", "p"), required=True,
        help="e: continuous steps; p: continuous open steps",
    )
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("formula")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("prove", help="check a Hilbert-style derivation file")
    p.add_argument("--logic", required=True)
    p.add_argument("path")
    p.set_defaults(func=_cmd_prove)

    p = sub.add_parser("paper-suite", help="re-verify the anchored corpus facts")
    p.add_argument("--filter", help="only run facts whose id mentions this string")
    p.add_argument("--corpus", help="corpus directory (default: bundled)")
    p.set_defaults(func=_cmd_paper_suite)

    p = sub.add_parser("separate", help="verify the logic-separation edge certificates")
    p.add_argument("--corpus", help="corpus directory (default: bundled)")
    p.set_defaults(func=_cmd_separate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
