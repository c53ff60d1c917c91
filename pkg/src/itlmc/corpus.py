"""Bundled example corpus: models, derivations, and edge certificates.

The package ships a small corpus under ``corpus/`` with a JSON index.
Each entry has a stable id, a kind, and an anchor sentence recording
the behavior the entry is meant to exhibit.  `paper_suite` re-checks
every anchored fact against the engines, so the corpus doubles as a
regression suite for the numbers quoted in the README.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from .formula import Atom, Formula, cem, cd, bi, fs_dia, fs_next
from .hilbert import LOGICS, check, get_logic, instantiate
from .parser import (
    parse_derivation,
    parse_formula,
    parse_poset_model,
    parse_real_system,
)
from .poset import eval_formula
from .realline import EMPTY, REALS, Status, eval_real, interval
from .search import EdgeSpec, build_separation_matrix


class UnknownEntry(KeyError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    kind: str  # poset-model | real-system | derivation | edge
    path: str
    anchor: str
    logic: Optional[str] = None


_EDGE_KEYS = (
    "from", "to", "style", "label", "formula",
    "witness", "point", "derivation", "logic", "inclusion",
)


def _parse_edge_line(body: str) -> EdgeSpec:
    fields = {}
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        key, _, value = part.partition("=")
        fields[key.strip()] = value.strip()
    missing = [k for k in _EDGE_KEYS if k not in fields]
    if missing:
        raise ValueError(f"edge line is missing fields: {', '.join(missing)}")
    inclusion = []
    if fields["inclusion"]:
        for item in fields["inclusion"].split(","):
            axiom, _, deriv = item.strip().partition(":")
            inclusion.append((axiom, deriv))
    return EdgeSpec(
        source=fields["from"],
        target=fields["to"],
        style=fields["style"],
        label=fields["label"],
        formula=parse_formula(fields["formula"]),
        witness=fields["witness"],
        point=fields["point"],
        derivation=fields["derivation"],
        logic=fields["logic"],
        inclusion=tuple(inclusion),
    )


class Corpus:
    """Loader for the bundled (or an externally supplied) corpus tree."""

    def __init__(self, root: Optional[os.PathLike | str] = None):
        if root is None:
            root = os.environ.get("ITL_CORPUS") or Path(__file__).parent / "corpus"
        self.root = Path(root)
        index_path = self.root / "index.json"
        try:
            raw = json.loads(index_path.read_text())
        except FileNotFoundError:
            raise UnknownEntry(f"no corpus index at {index_path}") from None
        self._entries = {item["id"]: CorpusEntry(**item) for item in raw}
        self._cache: dict[str, object] = {}

    def entries(self) -> list[CorpusEntry]:
        return list(self._entries.values())

    def get(self, entry_id: str) -> CorpusEntry:
        try:
            return self._entries[entry_id]
        except KeyError:
            raise UnknownEntry(f"no corpus entry named {entry_id!r}") from None

    def kind_of(self, entry_id: str) -> str:
        return self.get(entry_id).kind

    def text_of(self, entry_id: str) -> str:
        return (self.root / self.get(entry_id).path).read_text()

    def load(self, entry_id: str):
        if entry_id in self._cache:
            return self._cache[entry_id]
        entry = self.get(entry_id)
        text = self.text_of(entry_id)
        if entry.kind == "poset-model":
            value = parse_poset_model(text)
        elif entry.kind == "real-system":
            value = parse_real_system(text)
        elif entry.kind == "derivation":
            value = parse_derivation(text)
        elif entry.kind == "edge":
            value = [
                _parse_edge_line(body)
                for body in text.splitlines()
                if body.strip() and not body.lstrip().startswith("#")
            ]
        else:
            raise UnknownEntry(f"entry {entry_id!r} has unknown kind {entry.kind!r}")
        self._cache[entry_id] = value
        return value

    def edges(self) -> list[EdgeSpec]:
        return self.load("fig6-edges")


@dataclass(frozen=True)
class FactResult:
    ok: bool
    detail: str


@dataclass(frozen=True)
class Fact:
    id: str
    entry_id: str
    description: str
    run: Callable[[Corpus], FactResult]


def _worlds(model, valuation, text: str) -> frozenset[str]:
    return eval_formula(model, valuation, parse_formula(text))


def _expect(got, want, label: str) -> FactResult:
    if got == want:
        return FactResult(True, f"{label} = {want}")
    return FactResult(False, f"{label}: expected {want}, got {got}")


def _expect_real(outcome, want_value, want_status, label: str) -> FactResult:
    if outcome.value != want_value:
        return FactResult(False, f"{label}: expected {want_value}, got {outcome.value}")
    if want_status is not None and outcome.status is not want_status:
        return FactResult(
            False, f"{label}: expected status {want_status.name}, got {outcome.status.name}"
        )
    suffix = f" [{outcome.status.name.lower()}]" if want_status else ""
    return FactResult(True, f"{label} = {outcome.value}{suffix}")


def _fact_fig4_shift(corpus: Corpus) -> FactResult:
    model, valuation = corpus.load("fig4-fs")
    want = frozenset({"v", "u"})
    for name, phi in (
        ("eventually-shift", fs_dia(Atom("p"), Atom("q"))),
        ("next-shift", fs_next(Atom("p"), Atom("q"))),
    ):
        got = eval_formula(model, valuation, phi)
        if got != want:
            return FactResult(False, f"{name}: expected {set(want)}, got {set(got)}")
    if not model.is_continuous or model.is_open:
        return FactResult(False, "expected a continuous, non-open step")
    return FactResult(True, "both shift schemas hold exactly on {v, u}")


def _fact_fig5_cem(corpus: Corpus) -> FactResult:
    model, valuation = corpus.load("fig5-cem")
    got = eval_formula(model, valuation, cem(Atom("p"), Atom("q")))
    want = frozenset({"w1", "v0", "v1", "v2"})
    if got != want:
        return FactResult(False, f"expected {set(want)}, got {set(got)}")
    return FactResult(True, "next-excluded-middle fails exactly at w0")


def _fact_fsgap(corpus: Corpus) -> FactResult:
    model, valuation = corpus.load("fs-gap")
    unboxed = eval_formula(
        model,
        valuation,
        parse_formula("((O <>p -> O []q) -> O(<>p -> []q)) -> ((<>p -> []q) -> [](p -> q))"),
    )
    if unboxed != frozenset({"a", "b", "u"}):
        return FactResult(False, f"unboxed implication: got {set(unboxed)}")
    boxed = eval_formula(model, valuation, corpus.load("d-fs").theorem)
    if boxed != frozenset(model.worlds):
        return FactResult(False, f"boxed repair: got {set(boxed)}")
    return FactResult(True, "unboxed shift implication fails at x; boxed repair is valid")


def _fact_r_double(corpus: Corpus) -> FactResult:
    system = corpus.load("r-double")
    punctured = interval(None, 0).union(interval(0, None))
    checks = [
        ("[]p", interval(None, 0), Status.EXTRAPOLATED),
        ("[*]p", interval(None, 0), Status.EXTRAPOLATED),
        ("<>q", interval(0, None), Status.EXACT),
        ("[](p | q) -> []p | <>q", punctured, None),
        ("[](p | q) & [](O q -> q) -> []p | q", punctured, None),
        ("~O p & O~~p -> O q | ~O q", REALS, None),
    ]
    for text, want, status in checks:
        res = _expect_real(eval_real(system, parse_formula(text)), want, status, text)
        if not res.ok:
            return res
    return FactResult(True, "distribution fails only at 0; henceforth extrapolates to (-inf, 0)")


def _fact_r_kinked(corpus: Corpus) -> FactResult:
    system = corpus.load("r-kinked")
    neg = interval(None, 0)
    pos = interval(0, None)
    checks = [
        ("[*]p", neg, Status.EXTRAPOLATED),
        ("[]p", EMPTY, None),
        ("O [*]p", EMPTY, None),
        ("[*]O p", neg, None),
        ("[*][*]p", EMPTY, Status.EXTRAPOLATED),
        ("[*]p -> O [*]p", pos, None),
        ("[*]O p -> O [*]p", pos, None),
        ("[*]p -> [*][*]p", pos, None),
        ("~O p & O~~p -> O q | ~O q", REALS, Status.EXACT),
        ("[](p -> O p) -> (p -> []p)", REALS, None),
    ]
    for text, want, status in checks:
        res = _expect_real(eval_real(system, parse_formula(text)), want, status, text)
        if not res.ok:
            return res
    return FactResult(True, "weak and strong henceforth split; the weak flavor is not forward-stable")


def _fact_r_const(corpus: Corpus) -> FactResult:
    system = corpus.load("r-const")
    checks = [
        ("(<>p -> []q) -> [](p -> q)", interval(0, None), Status.EXACT),
        ("(O p -> O q) -> O(p -> q)", EMPTY, Status.EXACT),
    ]
    for text, want, status in checks:
        res = _expect_real(eval_real(system, parse_formula(text)), want, status, text)
        if not res.ok:
            return res
    return FactResult(True, "next-shift fails everywhere, eventually-shift only on the closed left ray")


def _fact_r_shift(corpus: Corpus) -> FactResult:
    system = corpus.load("r-shift")
    checks = [
        ("<>p", interval(None, 0), Status.EXACT),
        ("[]p", EMPTY, Status.EXTRAPOLATED),
        ("[*]p", EMPTY, Status.EXTRAPOLATED),
        ("[](p -> O p) -> (p -> []p)", REALS, None),
    ]
    for text, want, status in checks:
        res = _expect_real(eval_real(system, parse_formula(text)), want, status, text)
        if not res.ok:
            return res
    return FactResult(True, "translation drains the left ray: henceforth is empty by endpoint drift")


def _derivation_fact(entry_id: str) -> Callable[[Corpus], FactResult]:
    def run(corpus: Corpus) -> FactResult:
        entry = corpus.get(entry_id)
        derivation = corpus.load(entry_id)
        result = check(derivation, get_logic(entry.logic))
        if not result.ok:
            return FactResult(
                False, f"rejected at line {result.failed_line}: {result.reason}"
            )
        return FactResult(True, f"accepted ({result.line_count} lines)")

    return run


def _fact_edges(corpus: Corpus) -> FactResult:
    reports = build_separation_matrix(corpus)
    bad = [r for r in reports if not r.ok]
    if bad:
        first = bad[0]
        return FactResult(
            False,
            f"{len(bad)} edge(s) failed, first {first.edge.source}->{first.edge.target}: {first.detail}",
        )
    solid = sum(1 for r in reports if r.edge.style == "solid")
    return FactResult(
        True, f"all {len(reports)} edges verified ({solid} solid, {len(reports) - solid} dashed)"
    )


def _axiom_spot_fact(entry_id: str) -> Callable[[Corpus], FactResult]:
    # Soundness spot check: random axiom instances of the core system
    # must be valid (and determinable) on each bundled real system.
    def run(corpus: Corpus) -> FactResult:
        system = corpus.load(entry_id)
        names = sorted(system.atoms()) or ["p"]
        logic = LOGICS["ITL.db"]
        rng = random.Random(20260813)
        schemas = sorted(logic.axioms.values(), key=lambda s: s.name)
        for i in range(20):
            schema = rng.choice(schemas)
            subst = {mv: Atom(rng.choice(names)) for mv in schema.metavars}
            phi = instantiate(schema, subst)
            outcome = eval_real(system, phi)
            if outcome.status is Status.UNDETERMINED or outcome.value != REALS:
                return FactResult(
                    False,
                    f"draw {i}: axiom {schema.name} gave {outcome.value} "
                    f"[{outcome.status.name.lower()}]",
                )
        return FactResult(True, "20 random core-axiom instances all valid")

    return run


def _build_facts() -> list[Fact]:
    facts = [
        Fact(
            "fig4-fs/shift-schemas",
            "fig4-fs",
            "both shift schemas hold exactly on the two ordered worlds",
            _fact_fig4_shift,
        ),
        Fact(
            "fig5-cem/failure-at-root",
            "fig5-cem",
            "next-excluded-middle fails exactly at the root w0",
            _fact_fig5_cem,
        ),
        Fact(
            "fs-gap/boxed-repair",
            "fs-gap",
            "the unboxed shift implication fails while its boxed form is valid",
            _fact_fsgap,
        ),
        Fact(
            "r-double/distribution-gap",
            "r-double",
            "constant-domain distribution and backward induction fail only at 0",
            _fact_r_double,
        ),
        Fact(
            "r-kinked/weak-box-split",
            "r-kinked",
            "weak henceforth is nonempty while strong henceforth collapses",
            _fact_r_kinked,
        ),
        Fact(
            "r-const/shift-failure",
            "r-const",
            "the next-shift schema has empty extension",
            _fact_r_const,
        ),
        Fact(
            "r-shift/endpoint-drift",
            "r-shift",
            "henceforth of the left ray is empty, flagged as extrapolated",
            _fact_r_shift,
        ),
        Fact(
            "fig6-edges/all-verified",
            "fig6-edges",
            "every strictness edge certificate verifies",
            _fact_edges,
        ),
    ]
    deriv_ids = [
        "d-wh", "d-fs", "d-fs-plus", "d-cd-bi", "d-bi-cd", "d-yuse-1",
        "d-yuse-2", "d-cem-itl+", "d-cdm-from-cd", "d-ax-fs", "d-ax-cd",
        "d-ax-cdm", "d-ax-cem",
    ]
    for entry_id in deriv_ids:
        facts.append(
            Fact(
                f"{entry_id}/accepted",
                entry_id,
                "bundled derivation checks in its stated logic",
                _derivation_fact(entry_id),
            )
        )
    for entry_id in ("r-double", "r-kinked", "r-const", "r-shift"):
        facts.append(
            Fact(
                f"{entry_id}/axiom-spot-check",
                entry_id,
                "random core-axiom instances are valid on this system",
                _axiom_spot_fact(entry_id),
            )
        )
    return facts


FACTS: list[Fact] = _build_facts()


def paper_suite(
    corpus: Optional[Corpus] = None, filter: Optional[str] = None
) -> list[tuple[Fact, FactResult]]:
    """Run every anchored corpus fact; optionally filter by id substring."""
    if corpus is None:
        corpus = Corpus()
    results = []
    for fact in FACTS:
        if filter and filter != fact.entry_id and filter not in fact.id:
            continue
        try:
            result = fact.run(corpus)
        except Exception as err:  # anchored checks must not crash the suite
            result = FactResult(False, f"{type(err).__name__}: {err}")
        results.append((fact, result))
    return results
