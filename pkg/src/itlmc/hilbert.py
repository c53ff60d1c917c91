"""Hilbert-style derivation checking for the temporal logic family.

A logic is a named set of axiom schemas plus inference rules over one of
the language fragments.  Derivations are line sequences; every line must
be an axiom instance, an intuitionistic tautology, or follow from earlier
lines by a rule.  Propositional reasoning is discharged by a decision
procedure for intuitionistic propositional logic that treats maximal
tensed subformulas as opaque atoms.

Axiom schema names (metavariables ``phi``, ``psi``):

    ii        ~O false
    iii       O(phi & psi) <-> O phi & O psi
    iv        O(phi | psi) <-> O phi | O psi
    v         O(phi -> psi) -> (O phi -> O psi)
    vi        [](phi -> psi) -> ([]phi -> []psi)
    vii       [](phi -> psi) -> (<>phi -> <>psi)
    viii      []phi -> phi
    ix        []phi -> O[]phi
    x         phi -> <>phi
    xi        O<>phi -> <>phi
    xii       [](phi -> O phi) -> (phi -> []phi)
    xiii      [](O phi -> phi) -> (<>phi -> phi)
    wh        []phi -> []O phi
    fs-next   (O phi -> O psi) -> O(phi -> psi)
    cd        [](phi | psi) -> []phi | <>psi
    cd-minus  [](~phi | phi) -> []~phi | <>phi
    bi        []( phi | psi) & [](O psi -> psi) -> []phi | psi
    cem       (~O phi & O~~phi) -> (O psi | ~O psi)

Plus a finite basis for fully explicit propositional steps: ipc-k, ipc-s,
ipc-and-intro, ipc-and-left, ipc-and-right, ipc-or-left, ipc-or-right,
ipc-or-elim, ipc-efq.

Rules: mp, nec-next, nec-box, and (in the next/eventually fragment)
dia-mono and dia-ind.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING, Optional, Union

from .formula import (
    FRAGMENTS,
    And,
    Atom,
    Bottom,
    Eventually,
    Formula,
    Iff,
    Implies,
    LanguageFragment,
    Next,
    Not,
    Or,
    StrongBox,
    WeakBox,
    atoms,
    bi,
    cd,
    cd_minus,
    cem,
    fs_next,
    subformulas,
    translate_strong,
    wh,
)

if TYPE_CHECKING:
    from .parser import SourceSpan


class MissingMetavariable(ValueError):
    pass


class MixedBoxes(ValueError):
    """Raised when a weak-box derivation also uses the strong box."""


class UnknownLogic(KeyError):
    pass


# --------------------------------------------------------------------------
# schemas, rules, logics

@dataclass(frozen=True)
class Schema:
    """An axiom template; every atom occurring in it is a metavariable."""

    name: str
    template: Formula

    @property
    def metavars(self) -> tuple[str, ...]:
        return tuple(atoms(self.template))


@dataclass(frozen=True)
class Rule:
    name: str
    premises: tuple[Formula, ...]
    conclusion: Formula


@dataclass(frozen=True)
class LogicSpec:
    """A named axiomatic system over one language fragment.

    Weak-rendered logics (suffixes .dw and .w) store their schemas over
    the strong box; derivations in them are written with the weak box and
    are checked after translation.
    """

    name: str
    fragment_code: str
    axioms: dict[str, Schema]
    rules: dict[str, Rule]
    weak_rendered: bool = False

    @property
    def fragment(self) -> LanguageFragment:
        return FRAGMENTS[self.fragment_code]

    @property
    def base_name(self) -> str:
        return self.name.split(".", 1)[0]


# --------------------------------------------------------------------------
# derivations

@dataclass(frozen=True)
class AxiomJust:
    schema: str
    subst: Optional[dict[str, Formula]]


@dataclass(frozen=True)
class RuleJust:
    rule: str
    premises: tuple[int, ...]


@dataclass(frozen=True)
class IpcTaut:
    pass


Justification = Union[AxiomJust, RuleJust, IpcTaut]


@dataclass(frozen=True)
class DerivationLine:
    number: int
    formula: Formula
    justification: Justification
    span: Optional["SourceSpan"] = field(default=None, compare=False)


@dataclass(frozen=True)
class Derivation:
    lines: tuple[DerivationLine, ...]

    @property
    def theorem(self) -> Formula:
        return self.lines[-1].formula


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    failed_line: Optional[int]
    reason: Optional[str]
    line_count: int


# --------------------------------------------------------------------------
# matching and instantiation

def _match_into(template: Formula, target: Formula, binding: dict) -> bool:
    if isinstance(template, Atom):
        bound = binding.get(template.name)
        if bound is None:
            binding[template.name] = target
            return True
        return bound == target
    if type(template) is not type(target):
        return False
    if isinstance(template, Bottom):
        return True
    if isinstance(template, (And, Or, Implies)):
        return _match_into(template.left, target.left, binding) and _match_into(
            template.right, target.right, binding
        )
    return _match_into(template.child, target.child, binding)


def match_template(template: Formula, target: Formula) -> Optional[dict]:
    binding: dict[str, Formula] = {}
    if _match_into(template, target, binding):
        return binding
    return None


def _substitute(template: Formula, binding: dict[str, Formula]) -> Formula:
    if isinstance(template, Atom):
        return binding[template.name]
    if isinstance(template, Bottom):
        return template
    if isinstance(template, (And, Or, Implies)):
        kind = type(template)
        return kind(
            _substitute(template.left, binding),
            _substitute(template.right, binding),
        )
    kind = type(template)
    return kind(_substitute(template.child, binding))


def instantiate(schema: Schema, subst: dict[str, Formula]) -> Formula:
    metavars = set(schema.metavars)
    for name in subst:
        if name not in metavars:
            raise ValueError(
                f"axiom {schema.name!r} has no metavariable {name!r}"
            )
    for name in metavars:
        if name not in subst:
            raise MissingMetavariable(
                f"metavariable {name!r} of axiom {schema.name!r} is not assigned"
            )
    return _substitute(schema.template, subst)


# --------------------------------------------------------------------------
# intuitionistic propositional tautology decision
#
# Contraction-free sequent search (Dyckhoff's calculus): all rules below
# strictly decrease sequent weight, so plain recursion terminates; results
# are memoized on (context, goal).

_FALSE = Bottom()


def _abstract_tenses(phi: Formula) -> Formula:
    """Replace maximal tensed subformulas by fresh placeholder atoms."""
    table: dict[Formula, Atom] = {}

    def walk(f: Formula) -> Formula:
        if isinstance(f, (Next, Eventually, StrongBox, WeakBox)):
            atom = table.get(f)
            if atom is None:
                atom = Atom(f"#{len(table)}")
                table[f] = atom
            return atom
        if isinstance(f, (And, Or, Implies)):
            kind = type(f)
            return kind(walk(f.left), walk(f.right))
        return f

    return walk(phi)


@lru_cache(maxsize=None)
def _prove(gamma: frozenset, goal: Formula) -> bool:
    if _FALSE in gamma or goal in gamma:
        return True
    for f in gamma:
        if isinstance(f, And):
            return _prove((gamma - {f}) | {f.left, f.right}, goal)
        if isinstance(f, Or):
            rest = gamma - {f}
            return _prove(rest | {f.left}, goal) and _prove(rest | {f.right}, goal)
        if isinstance(f, Implies):
            head = f.left
            if isinstance(head, Bottom):
                return _prove(gamma - {f}, goal)
            if isinstance(head, Atom) and head in gamma:
                return _prove((gamma - {f}) | {f.right}, goal)
            if isinstance(head, And):
                curried = Implies(head.left, Implies(head.right, f.right))
                return _prove((gamma - {f}) | {curried}, goal)
            if isinstance(head, Or):
                split = {
                    Implies(head.left, f.right),
                    Implies(head.right, f.right),
                }
                return _prove((gamma - {f}) | split, goal)
    if isinstance(goal, And):
        return _prove(gamma, goal.left) and _prove(gamma, goal.right)
    if isinstance(goal, Implies):
        return _prove(gamma | {goal.left}, goal.right)
    if isinstance(goal, Or) and (
        _prove(gamma, goal.left) or _prove(gamma, goal.right)
    ):
        return True
    for f in gamma:
        if isinstance(f, Implies) and isinstance(f.left, Implies):
            inner = f.left
            rest = gamma - {f}
            if _prove(rest | {Implies(inner.right, f.right)}, inner) and _prove(
                rest | {f.right}, goal
            ):
                return True
    return False


def is_ipc_tautology(phi: Formula) -> bool:
    """Decide intuitionistic validity, tensed subformulas read as atoms."""
    return _prove(frozenset(), _abstract_tenses(phi))


# --------------------------------------------------------------------------
# the logic registry

_PHI = Atom("phi")
_PSI = Atom("psi")
_CHI = Atom("chi")

_CORE_TEMPLATES = {
    "ii": Not(Next(Bottom())),
    "iii": Iff(Next(And(_PHI, _PSI)), And(Next(_PHI), Next(_PSI))),
    "iv": Iff(Next(Or(_PHI, _PSI)), Or(Next(_PHI), Next(_PSI))),
    "v": Implies(Next(Implies(_PHI, _PSI)), Implies(Next(_PHI), Next(_PSI))),
    "vi": Implies(
        StrongBox(Implies(_PHI, _PSI)), Implies(StrongBox(_PHI), StrongBox(_PSI))
    ),
    "vii": Implies(
        StrongBox(Implies(_PHI, _PSI)), Implies(Eventually(_PHI), Eventually(_PSI))
    ),
    "viii": Implies(StrongBox(_PHI), _PHI),
    "ix": Implies(StrongBox(_PHI), Next(StrongBox(_PHI))),
    "x": Implies(_PHI, Eventually(_PHI)),
    "xi": Implies(Next(Eventually(_PHI)), Eventually(_PHI)),
    "xii": Implies(
        StrongBox(Implies(_PHI, Next(_PHI))), Implies(_PHI, StrongBox(_PHI))
    ),
    "xiii": Implies(
        StrongBox(Implies(Next(_PHI), _PHI)), Implies(Eventually(_PHI), _PHI)
    ),
}

_EXTRA_TEMPLATES = {
    "wh": wh(_PHI),
    "fs-next": fs_next(_PHI, _PSI),
    "cd": cd(_PHI, _PSI),
    "cd-minus": cd_minus(_PHI),
    "bi": bi(_PHI, _PSI),
    "cem": cem(_PHI, _PSI),
}

_IPC_BASIS_TEMPLATES = {
    "ipc-k": Implies(_PHI, Implies(_PSI, _PHI)),
    "ipc-s": Implies(
        Implies(_PHI, Implies(_PSI, _CHI)),
        Implies(Implies(_PHI, _PSI), Implies(_PHI, _CHI)),
    ),
    "ipc-and-intro": Implies(_PHI, Implies(_PSI, And(_PHI, _PSI))),
    "ipc-and-left": Implies(And(_PHI, _PSI), _PHI),
    "ipc-and-right": Implies(And(_PHI, _PSI), _PSI),
    "ipc-or-left": Implies(_PHI, Or(_PHI, _PSI)),
    "ipc-or-right": Implies(_PSI, Or(_PHI, _PSI)),
    "ipc-or-elim": Implies(
        Implies(_PHI, _CHI),
        Implies(Implies(_PSI, _CHI), Implies(Or(_PHI, _PSI), _CHI)),
    ),
    "ipc-efq": Implies(Bottom(), _PHI),
}

ALL_SCHEMAS: dict[str, Schema] = {
    name: Schema(name, template)
    for name, template in {
        **_CORE_TEMPLATES,
        **_EXTRA_TEMPLATES,
        **_IPC_BASIS_TEMPLATES,
    }.items()
}

IPC_BASIS_NAMES = tuple(_IPC_BASIS_TEMPLATES)

_CORE_NAMES = tuple(_CORE_TEMPLATES)

_BASE_AXIOMS: dict[str, tuple[str, ...]] = {
    "ITL": _CORE_NAMES,
    "ITL0": tuple(n for n in _CORE_NAMES if n != "ix") + ("wh",),
    "ETL": _CORE_NAMES + ("cd-minus",),
    "RTL": _CORE_NAMES + ("cd-minus", "cem"),
    "CDTL": _CORE_NAMES + ("cd",),
    "ITL+": _CORE_NAMES + ("fs-next",),
    "ETL+": _CORE_NAMES + ("fs-next", "cd-minus"),
    "CDTL+": _CORE_NAMES + ("fs-next", "cd"),
}

BASE_NAMES = tuple(_BASE_AXIOMS)
SUFFIXES = ("db", "dw", "b", "w", "d")

_RULE_MP = Rule("mp", (_PHI, Implies(_PHI, _PSI)), _PSI)
_RULE_NEC_NEXT = Rule("nec-next", (_PHI,), Next(_PHI))
_RULE_NEC_BOX = Rule("nec-box", (_PHI,), StrongBox(_PHI))
_RULE_DIA_MONO = Rule(
    "dia-mono", (Implies(_PHI, _PSI),), Implies(Eventually(_PHI), Eventually(_PSI))
)
_RULE_DIA_IND = Rule(
    "dia-ind", (Implies(Next(_PHI), _PHI),), Implies(Eventually(_PHI), _PHI)
)

_BOX_RULES = {r.name: r for r in (_RULE_MP, _RULE_NEC_NEXT, _RULE_NEC_BOX)}
_DIA_RULES = {
    r.name: r for r in (_RULE_MP, _RULE_NEC_NEXT, _RULE_DIA_MONO, _RULE_DIA_IND)
}


def _mentions(name: str, kinds: tuple) -> bool:
    return any(isinstance(s, kinds) for s in subformulas(ALL_SCHEMAS[name].template))


def _weak_base(names: tuple[str, ...]) -> tuple[str, ...]:
    # Henceforth in its weak reading loses the next-step axiom; the
    # weak-henceforth axiom takes its place.  Sets already built that way
    # (or containing the functional-step or constant-domain axioms, whose
    # systems keep the strong reading) are unchanged.
    if "ix" not in names or "fs-next" in names or "cd" in names:
        return names
    return tuple(n for n in names if n != "ix") + ("wh",)


def _drop_eventually(names: tuple[str, ...]) -> tuple[str, ...]:
    kept = tuple(n for n in names if not _mentions(n, (Eventually,)))
    if "cd" in names:
        kept += ("bi",)
    return kept


def _drop_henceforth(names: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(n for n in names if not _mentions(n, (StrongBox,)))


def _spec(name: str, code: str, axiom_names: tuple[str, ...], rules, weak=False):
    axioms = {n: ALL_SCHEMAS[n] for n in axiom_names}
    for n in IPC_BASIS_NAMES:
        axioms[n] = ALL_SCHEMAS[n]
    return LogicSpec(name, code, axioms, dict(rules), weak)


def build_logics() -> dict[str, LogicSpec]:
    logics: dict[str, LogicSpec] = {}
    for base, names in _BASE_AXIOMS.items():
        weak_names = _weak_base(names)
        logics[f"{base}.db"] = _spec(f"{base}.db", "db", names, _BOX_RULES)
        logics[f"{base}.dw"] = _spec(
            f"{base}.dw", "dw", weak_names, _BOX_RULES, weak=True
        )
        logics[f"{base}.b"] = _spec(
            f"{base}.b", "b", _drop_eventually(names), _BOX_RULES
        )
        logics[f"{base}.w"] = _spec(
            f"{base}.w", "w", _drop_eventually(weak_names), _BOX_RULES, weak=True
        )
        logics[f"{base}.d"] = _spec(
            f"{base}.d", "d", _drop_henceforth(names), _DIA_RULES
        )
    return logics


LOGICS: dict[str, LogicSpec] = build_logics()


def get_logic(name: str) -> LogicSpec:
    spec = LOGICS.get(name)
    if spec is None:
        raise UnknownLogic(
            f"unknown logic {name!r}; available: {', '.join(sorted(LOGICS))}"
        )
    return spec


# --------------------------------------------------------------------------
# checking

def _check_core(
    lines: tuple[DerivationLine, ...],
    logic: LogicSpec,
    fragment: LanguageFragment,
) -> CheckResult:
    total = len(lines)

    def reject(number: int, reason: str) -> CheckResult:
        return CheckResult(False, number, reason, total)

    expected = 1
    for line in lines:
        if line.number != expected:
            return reject(line.number, f"expected line number {expected}")
        expected += 1

    for line in lines:
        phi = line.formula
        if not fragment.allows(phi):
            return reject(line.number, "formula outside the logic's language")
        just = line.justification
        if isinstance(just, IpcTaut):
            if not is_ipc_tautology(phi):
                return reject(line.number, "not an intuitionistic tautology")
        elif isinstance(just, AxiomJust):
            schema = logic.axioms.get(just.schema)
            if schema is None:
                return reject(
                    line.number,
                    f"axiom {just.schema!r} is not part of {logic.name}",
                )
            if just.subst is not None:
                try:
                    instance = instantiate(schema, just.subst)
                except (MissingMetavariable, ValueError) as err:
                    return reject(line.number, str(err))
                if instance != phi:
                    return reject(
                        line.number,
                        f"formula is not the stated instance of axiom {just.schema!r}",
                    )
            elif match_template(schema.template, phi) is None:
                return reject(
                    line.number, f"formula does not match axiom {just.schema!r}"
                )
        elif isinstance(just, RuleJust):
            rule = logic.rules.get(just.rule)
            if rule is None:
                return reject(
                    line.number, f"rule {just.rule!r} is not part of {logic.name}"
                )
            if len(just.premises) != len(rule.premises):
                return reject(
                    line.number,
                    f"rule {just.rule!r} takes {len(rule.premises)} premise(s)",
                )
            if any(i < 1 or i >= line.number for i in just.premises):
                return reject(
                    line.number, "premise references must point at earlier lines"
                )
            binding: dict[str, Formula] = {}
            matched = all(
                _match_into(template, lines[i - 1].formula, binding)
                for template, i in zip(rule.premises, just.premises)
            )
            if not matched or _substitute(rule.conclusion, binding) != phi:
                return reject(
                    line.number,
                    f"rule {just.rule!r} does not derive this line "
                    "from the cited premises",
                )
        else:
            return reject(line.number, "unknown justification")
    return CheckResult(True, None, None, total)


def check_weak(derivation: Derivation, logic: LogicSpec) -> CheckResult:
    """Check a weak-box derivation against a weak-rendered logic."""
    if not logic.weak_rendered:
        raise ValueError(f"{logic.name} is not weak-rendered")
    has_strong = has_weak = False
    for line in derivation.lines:
        for sub in subformulas(line.formula):
            if isinstance(sub, StrongBox):
                has_strong = True
            elif isinstance(sub, WeakBox):
                has_weak = True
    if has_strong and has_weak:
        raise MixedBoxes("derivation mixes both henceforth flavors")

    total = len(derivation.lines)
    fragment = logic.fragment
    for line in derivation.lines:
        if not fragment.allows(line.formula):
            return CheckResult(
                False, line.number, "formula outside the logic's language", total
            )

    translated = []
    for line in derivation.lines:
        try:
            phi = translate_strong(line.formula)
            just = line.justification
            if isinstance(just, AxiomJust) and just.subst is not None:
                just = AxiomJust(
                    just.schema,
                    {k: translate_strong(v) for k, v in just.subst.items()},
                )
        except ValueError as err:
            return CheckResult(False, line.number, str(err), total)
        translated.append(DerivationLine(line.number, phi, just, line.span))

    strong_code = "db" if logic.fragment_code == "dw" else "b"
    return _check_core(tuple(translated), logic, FRAGMENTS[strong_code])


def check(derivation: Derivation, logic: LogicSpec) -> CheckResult:
    """Check a derivation; returns the first failing line on rejection."""
    if not derivation.lines:
        return CheckResult(False, None, "empty derivation", 0)
    if logic.weak_rendered:
        return check_weak(derivation, logic)
    return _check_core(derivation.lines, logic, logic.fragment)
