"""Bounded countermodel search over finite dynamic posets.

Models are enumerated exhaustively up to a world bound: all partial
orders on labeled carriers, all monotone step maps (plus the open-map
filter for class p), and all up-set valuations of the requested atoms.
Enumeration order is deterministic, so the first countermodel found for
a formula is stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterator, Optional, Union

from .formula import Atom, Formula, atoms as formula_atoms, translate_weak
from .hilbert import LogicSpec, check, get_logic, instantiate
from .poset import DynamicPoset, Valuation, eval_formula, eval_masks
from .realline import Status, eval_real

MAX_BOUND = 5

_FRESH = ("p", "q", "r", "s")


class BoundTooLarge(ValueError):
    pass


class CorpusMissing(KeyError):
    """A corpus entry referenced by the separation matrix is unavailable."""


@dataclass(frozen=True)
class SemanticClass:
    """Search space: 'e' = continuous step, 'p' = continuous and open."""

    kind: str
    bound: int

    def __post_init__(self):
        if self.kind not in ("e", "p"):
            raise ValueError(f"unknown semantic class {self.kind!r}")
        if self.bound < 1:
            raise ValueError("bound must be at least 1")
        if self.bound > MAX_BOUND:
            raise BoundTooLarge(
                f"bound {self.bound} exceeds the configured maximum {MAX_BOUND}"
            )


@dataclass(frozen=True)
class ValidUpTo:
    bound: int


@dataclass(frozen=True)
class Countermodel:
    model: DynamicPoset
    valuation: Valuation
    world: str
    formula: Formula


@dataclass(frozen=True)
class Undetermined:
    reason: str


Verdict = Union[ValidUpTo, Countermodel, Undetermined]


# --------------------------------------------------------------------------
# enumeration

def _orders(n: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """All partial orders on n labeled points, as strict pair lists.

    Each unordered index pair independently takes one of three states
    (incomparable, i below j, j below i); non-transitive combinations are
    filtered out.
    """
    index_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for states in product((0, 1, 2), repeat=len(index_pairs)):
        leq = [1 << i for i in range(n)]  # row i = mask of j with i <= j
        for (i, j), s in zip(index_pairs, states):
            if s == 1:
                leq[i] |= 1 << j
            elif s == 2:
                leq[j] |= 1 << i
        ok = True
        for i in range(n):
            row = leq[i]
            acc = row
            k_bits = row
            while k_bits:
                k = (k_bits & -k_bits).bit_length() - 1
                k_bits &= k_bits - 1
                acc |= leq[k]
            if acc != row:
                ok = False
                break
        if ok:
            yield tuple(
                (i, j)
                for i in range(n)
                for j in range(n)
                if i != j and (leq[i] >> j) & 1
            )


def count_posets(n: int) -> int:
    """Number of partial orders on n labeled points (enumeration oracle)."""
    return sum(1 for _ in _orders(n))


def _canonical_key(n, order_mask_rows, step, val_masks_tuple):
    best = None
    for perm in permutations(range(n)):
        rows = [0] * n
        for i in range(n):
            src = order_mask_rows[i]
            row = 0
            for j in range(n):
                if (src >> j) & 1:
                    row |= 1 << perm[j]
            rows[perm[i]] = row
        step_img = [0] * n
        for i in range(n):
            step_img[perm[i]] = perm[step[i]]
        vals = tuple(
            sum(((m >> j) & 1) << perm[j] for j in range(n)) for m in val_masks_tuple
        )
        key = (tuple(rows), tuple(step_img), vals)
        if best is None or key < best:
            best = key
    return best


def _enumerate_masked(
    semclass: SemanticClass, atom_names: tuple[str, ...], dedup: bool = False
) -> Iterator[tuple[DynamicPoset, dict[str, int]]]:
    seen: set = set()
    for n in range(1, semclass.bound + 1):
        worlds = tuple(f"w{i}" for i in range(n))
        identity = {w: w for w in worlds}
        for pairs in _orders(n):
            carrier = DynamicPoset(
                worlds,
                tuple((worlds[i], worlds[j]) for i, j in pairs),
                identity,
            )
            upsets = [m for m in range(1 << n) if carrier.is_up_set_mask(m)]
            for step in product(range(n), repeat=n):
                model = carrier.replace_step(
                    {worlds[i]: worlds[step[i]] for i in range(n)}
                )
                if not model.is_continuous:
                    continue
                if semclass.kind == "p" and not model.is_open:
                    continue
                for assignment in product(upsets, repeat=len(atom_names)):
                    if dedup:
                        key = _canonical_key(n, model.up_masks, step, assignment)
                        if key in seen:
                            continue
                        seen.add(key)
                    yield model, dict(zip(atom_names, assignment))


def enumerate_models(
    semclass: SemanticClass,
    atom_names: tuple[str, ...] = (),
    dedup: bool = False,
) -> Iterator[tuple[DynamicPoset, Valuation]]:
    """All (model, valuation) pairs of the class, up to the bound."""
    for model, masks in _enumerate_masked(semclass, tuple(atom_names), dedup):
        yield model, {a: model.worlds_of(m) for a, m in masks.items()}


# --------------------------------------------------------------------------
# validity search

def validity(phi: Formula, semclass: SemanticClass) -> Verdict:
    """First falsifying model in enumeration order, or validity up to bound."""
    names = tuple(formula_atoms(phi))
    for model, masks in _enumerate_masked(semclass, names):
        ext = eval_masks(model, masks, phi)[phi]
        if ext != model.full_mask:
            world = next(
                w for i, w in enumerate(model.worlds) if not (ext >> i) & 1
            )
            valuation = {a: model.worlds_of(m) for a, m in masks.items()}
            confirmed = eval_formula(model, valuation, phi)
            if world in confirmed:
                raise AssertionError(
                    "mask evaluator and public evaluator disagree"
                )
            return Countermodel(model, valuation, world, phi)
    return ValidUpTo(semclass.bound)


def soundness_sweep(
    logic: LogicSpec, semclass: SemanticClass
) -> dict[str, Verdict]:
    """Check every axiom schema of the logic over the class.

    Schemas are instantiated with distinct fresh atoms; weak-rendered
    logics are swept in their weak-box reading.
    """
    results: dict[str, Verdict] = {}
    for name in sorted(logic.axioms):
        schema = logic.axioms[name]
        subst = {mv: Atom(_FRESH[i]) for i, mv in enumerate(schema.metavars)}
        inst = instantiate(schema, subst)
        if logic.weak_rendered:
            inst = translate_weak(inst)
        results[name] = validity(inst, semclass)
    return results


# --------------------------------------------------------------------------
# separation matrix

# Structures each base logic is sound for.  poset-e: continuous step;
# poset-p: continuous and open; real: any piecewise affine continuous map;
# real-open: invertible such maps.
SOUND_STRUCTURES: dict[str, frozenset[str]] = {
    "ITL": frozenset({"poset-e", "poset-p", "real", "real-open"}),
    "ITL0": frozenset({"poset-e", "poset-p", "real", "real-open"}),
    "ETL": frozenset({"poset-e", "poset-p", "real", "real-open"}),
    "RTL": frozenset({"poset-p", "real", "real-open"}),
    "CDTL": frozenset({"poset-e", "poset-p"}),
    "ITL+": frozenset({"poset-p", "real-open"}),
    "ETL+": frozenset({"poset-p", "real-open"}),
    "CDTL+": frozenset({"poset-p"}),
}

OUT_OF_SCOPE_PREFIX = "out-of-scope:"


@dataclass(frozen=True)
class EdgeSpec:
    """One arrow of the logic-inclusion diagram.

    Solid edges claim proper inclusion (source strictly below target);
    dashed edges only claim the target is not below the source.  The
    formula belongs to the target and fails somewhere the source is
    sound; `witness` names the falsifying corpus model ("out-of-scope:"
    entries document witnesses outside the mechanized structure classes).
    """

    source: str
    target: str
    style: str
    label: str
    formula: Formula
    witness: str
    point: str
    derivation: str
    logic: str
    inclusion: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class EdgeReport:
    edge: EdgeSpec
    derivation_ok: bool
    witness_status: str  # verified | out-of-scope | failed
    inclusion_ok: Optional[bool]  # None for dashed edges
    detail: str

    @property
    def ok(self) -> bool:
        return (
            self.derivation_ok
            and self.witness_status != "failed"
            and self.inclusion_ok is not False
        )


def _verify_witness(edge: EdgeSpec, corpus) -> tuple[str, str]:
    if edge.witness.startswith(OUT_OF_SCOPE_PREFIX):
        return "out-of-scope", edge.witness[len(OUT_OF_SCOPE_PREFIX):]
    kind = corpus.kind_of(edge.witness)
    sound_for = SOUND_STRUCTURES[edge.source]
    if kind == "poset-model":
        model, valuation = corpus.load(edge.witness)
        tag = "poset-p" if model.is_open else "poset-e"
        if tag not in sound_for:
            return "failed", f"witness structure {tag} is not sound for {edge.source}"
        ext = eval_formula(model, valuation, edge.formula)
        if edge.point in ext:
            return "failed", f"formula holds at {edge.point}"
        return "verified", f"falsified at {edge.point} on {edge.witness} ({tag})"
    if kind == "real-system":
        system = corpus.load(edge.witness)
        tag = "real-open" if system.map.is_open() else "real"
        if tag not in sound_for:
            return "failed", f"witness structure {tag} is not sound for {edge.source}"
        outcome = eval_real(system, edge.formula)
        if outcome.status is Status.UNDETERMINED or outcome.value is None:
            return "failed", "witness evaluation is undetermined"
        point = Fraction(edge.point)
        if outcome.value.contains(point):
            return "failed", f"formula holds at {edge.point}"
        return "verified", f"falsified at {edge.point} on {edge.witness} ({tag})"
    return "failed", f"witness {edge.witness} has unusable kind {kind}"


def _verify_inclusion(edge: EdgeSpec, corpus) -> tuple[Optional[bool], str]:
    if edge.style != "solid":
        return None, ""
    src = get_logic(f"{edge.source}.db")
    dst = get_logic(f"{edge.target}.db")
    if not set(src.rules) <= set(dst.rules):
        return False, "rules are not included"
    evidence = dict(edge.inclusion)
    notes = []
    for name in sorted(src.axioms):
        if name in dst.axioms:
            continue
        deriv_id = evidence.get(name)
        if deriv_id is None:
            return False, f"no evidence that {edge.target} derives axiom {name}"
        derivation = corpus.load(deriv_id)
        result = check(derivation, dst)
        schema = src.axioms[name]
        subst = {mv: Atom(_FRESH[i]) for i, mv in enumerate(schema.metavars)}
        wanted = instantiate(schema, subst)
        if not result.ok:
            return False, f"evidence {deriv_id} rejected: {result.reason}"
        if derivation.theorem != wanted:
            return False, f"evidence {deriv_id} proves the wrong formula"
        notes.append(f"{name} via {deriv_id}")
    return True, "; ".join(notes) if notes else "axioms included"


def build_separation_matrix(corpus) -> list[EdgeReport]:
    """Verify every edge certificate of the bundled inclusion diagram."""
    try:
        edges = corpus.edges()
    except (KeyError, FileNotFoundError) as err:
        raise CorpusMissing(str(err)) from err
    reports = []
    for edge in edges:
        try:
            derivation = corpus.load(edge.derivation)
        except KeyError as err:
            raise CorpusMissing(str(err)) from err
        logic = get_logic(edge.logic)
        result = check(derivation, logic)
        derivation_ok = (
            result.ok
            and logic.base_name == edge.target
            and derivation.theorem == edge.formula
        )
        details = []
        if not result.ok:
            details.append(f"derivation rejected: {result.reason}")
        elif not derivation_ok:
            details.append("derivation does not certify this edge")
        try:
            witness_status, note = _verify_witness(edge, corpus)
        except KeyError as err:
            raise CorpusMissing(str(err)) from err
        if note:
            details.append(note)
        inclusion_ok, inc_note = _verify_inclusion(edge, corpus)
        if inc_note:
            details.append(inc_note)
        reports.append(
            EdgeReport(
                edge, derivation_ok, witness_status, inclusion_ok, "; ".join(details)
            )
        )
    return reports
