"""Finite dynamic posets and model checking over them.

A model is a finite poset carrying a step function. Opens are the up-sets;
the step must be monotone for evaluation to make sense (continuity), and is
additionally open when every step value below a point lifts to a step value
of a point above.

World sets are represented internally as integer bitmasks over the world
tuple, which keeps exhaustive search cheap.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping

from .formula import (
    And,
    Atom,
    Bottom,
    Eventually,
    Formula,
    Implies,
    Next,
    Or,
    StrongBox,
    WeakBox,
    subformulas,
)


class MalformedOrder(ValueError):
    """Order relation fails a poset law; .violations lists every failure."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class MalformedStep(ValueError):
    """Step function is not a total map on the declared worlds."""


class ContinuityRequired(ValueError):
    """Raised when evaluating over a model whose step is not monotone."""


class DomainNotInvariant(ValueError):
    """Raised when a morphism domain is not closed under the source step."""


class MalformedValuation(ValueError):
    """Valuation assigns a non-up-set or mentions unknown worlds."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class DynamicPoset:
    """Finite poset with a step function, precomputed as bitmasks.

    ``order`` lists pairs (a, b) meaning a is below b. Reflexive pairs may be
    omitted; transitivity must be written out and is validated, never closed
    over. ``step`` maps every world to its successor.
    """

    __slots__ = (
        "worlds",
        "index",
        "n",
        "full_mask",
        "order_pairs",
        "up_masks",
        "step",
        "step_arr",
        "is_continuous",
        "is_open",
    )

    def __init__(
        self,
        worlds: Iterable[str],
        order: Iterable[tuple[str, str]],
        step: Mapping[str, str],
    ):
        self.worlds = tuple(worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise MalformedOrder(["duplicate world names"])
        if not self.worlds:
            raise MalformedOrder(["a model needs at least one world"])
        self.index = {w: i for i, w in enumerate(self.worlds)}
        self.n = len(self.worlds)
        self.full_mask = (1 << self.n) - 1

        violations: list[str] = []
        pairs: set[tuple[str, str]] = {(w, w) for w in self.worlds}
        for a, b in order:
            if a not in self.index or b not in self.index:
                violations.append(f"order pair {a}<={b} mentions unknown world")
                continue
            pairs.add((a, b))
        for a, b in sorted(pairs):
            if a != b and (b, a) in pairs:
                violations.append(f"antisymmetry fails on {a} and {b}")
        for a, b in sorted(pairs):
            for c in self.worlds:
                if (b, c) in pairs and (a, c) not in pairs:
                    violations.append(
                        f"transitivity fails: {a}<={b} and {b}<={c} "
                        f"but {a}<={c} is not declared"
                    )
        if violations:
            raise MalformedOrder(violations)
        self.order_pairs = frozenset(pairs)

        self.up_masks = [0] * self.n
        for a, b in pairs:
            self.up_masks[self.index[a]] |= 1 << self.index[b]

        self.step = dict(step)
        missing = [w for w in self.worlds if w not in self.step]
        unknown = sorted(set(self.step) - set(self.worlds))
        bad_targets = sorted(
            w for w, v in self.step.items() if v not in self.index
        )
        if missing or unknown or bad_targets:
            parts = []
            if missing:
                parts.append(f"step undefined on {', '.join(missing)}")
            if unknown:
                parts.append(f"step defined on unknown {', '.join(unknown)}")
            if bad_targets:
                parts.append(f"step maps into unknown worlds at {', '.join(bad_targets)}")
            raise MalformedStep("; ".join(parts))
        self.step_arr = [self.index[self.step[w]] for w in self.worlds]

        self.is_continuous = self._check_continuous()
        self.is_open = self._check_open()

    def _check_continuous(self) -> bool:
        for a, b in self.order_pairs:
            sa = self.step_arr[self.index[a]]
            sb = self.step_arr[self.index[b]]
            if not (self.up_masks[sa] >> sb) & 1:
                return False
        return True

    def _check_open(self) -> bool:
        # Lift condition: everything above S(w) is hit by S on points above w.
        for i in range(self.n):
            hit = 0
            up = self.up_masks[i]
            for j in range(self.n):
                if (up >> j) & 1:
                    hit |= 1 << self.step_arr[j]
            if self.up_masks[self.step_arr[i]] & ~hit:
                return False
        return True

    def replace_step(self, step: Mapping[str, str]) -> "DynamicPoset":
        """New model on the same poset with a different step function."""
        other = object.__new__(DynamicPoset)
        other.worlds = self.worlds
        other.index = self.index
        other.n = self.n
        other.full_mask = self.full_mask
        other.order_pairs = self.order_pairs
        other.up_masks = self.up_masks
        other.step = dict(step)
        if sorted(other.step) != sorted(self.worlds):
            raise MalformedStep("step must be a total map on the worlds")
        if any(v not in self.index for v in other.step.values()):
            raise MalformedStep("step maps into unknown worlds")
        other.step_arr = [other.index[other.step[w]] for w in other.worlds]
        other.is_continuous = other._check_continuous()
        other.is_open = other._check_open()
        return other

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.order_pairs

    def mask_of(self, worlds: Iterable[str]) -> int:
        m = 0
        for w in worlds:
            m |= 1 << self.index[w]
        return m

    def worlds_of(self, mask: int) -> frozenset[str]:
        return frozenset(w for i, w in enumerate(self.worlds) if (mask >> i) & 1)

    def is_up_set_mask(self, mask: int) -> bool:
        return all(
            self.up_masks[i] & ~mask == 0
            for i in range(self.n)
            if (mask >> i) & 1
        )

    def interior_mask(self, mask: int) -> int:
        out = 0
        for i in range(self.n):
            if self.up_masks[i] & ~mask == 0:
                out |= 1 << i
        return out

    def preimage_mask(self, mask: int) -> int:
        out = 0
        for i in range(self.n):
            if (mask >> self.step_arr[i]) & 1:
                out |= 1 << i
        return out


Valuation = dict[str, frozenset[str]]


def is_up_set(model: DynamicPoset, worlds: Iterable[str]) -> bool:
    return model.is_up_set_mask(model.mask_of(worlds))


def interior(model: DynamicPoset, worlds: Iterable[str]) -> frozenset[str]:
    return model.worlds_of(model.interior_mask(model.mask_of(worlds)))


def validate_valuation(model: DynamicPoset, valuation: Mapping[str, Iterable[str]]) -> list[str]:
    violations = []
    for atom, ws in valuation.items():
        ws = set(ws)
        unknown = ws - set(model.worlds)
        if unknown:
            violations.append(f"val {atom} mentions unknown worlds {sorted(unknown)}")
            continue
        if not is_up_set(model, ws):
            violations.append(f"val {atom} is not an up-set")
    return violations


def _valuation_masks(model: DynamicPoset, valuation: Mapping[str, Iterable[str]]) -> dict[str, int]:
    violations = validate_valuation(model, valuation)
    if violations:
        raise MalformedValuation(violations)
    return {atom: model.mask_of(ws) for atom, ws in valuation.items()}


def eval_masks(model: DynamicPoset, val_masks: Mapping[str, int], phi: Formula) -> dict[Formula, int]:
    """Low-level evaluator over bitmasks; returns the full subformula table.

    Atoms missing from the valuation denote the empty set. Requires a
    continuous step.
    """
    if not model.is_continuous:
        raise ContinuityRequired("evaluation requires a continuous (monotone) step")
    table: dict[Formula, int] = {}
    for f in subformulas(phi):
        if isinstance(f, Bottom):
            v = 0
        elif isinstance(f, Atom):
            v = val_masks.get(f.name, 0)
        elif isinstance(f, And):
            v = table[f.left] & table[f.right]
        elif isinstance(f, Or):
            v = table[f.left] | table[f.right]
        elif isinstance(f, Implies):
            v = model.interior_mask(
                (model.full_mask & ~table[f.left]) | table[f.right]
            )
        elif isinstance(f, Next):
            v = model.preimage_mask(table[f.child])
        elif isinstance(f, Eventually):
            v = table[f.child]
            while True:
                nv = v | model.preimage_mask(v)
                if nv == v:
                    break
                v = nv
        elif isinstance(f, (StrongBox, WeakBox)):
            # Decreasing chain to the greatest fixpoint below the child set.
            # Continuity keeps every iterate open, so the strong box is the
            # limit itself and the weak box is its (identical) interior.
            v = table[f.child]
            while True:
                nv = table[f.child] & model.preimage_mask(v)
                if nv == v:
                    break
                v = nv
            if isinstance(f, WeakBox):
                v = model.interior_mask(v)
        else:
            raise TypeError(f"unknown formula node {f!r}")
        table[f] = v
    return table


def eval_table(
    model: DynamicPoset,
    valuation: Mapping[str, Iterable[str]],
    phi: Formula,
) -> dict[Formula, frozenset[str]]:
    masks = eval_masks(model, _valuation_masks(model, valuation), phi)
    return {f: model.worlds_of(m) for f, m in masks.items()}


def eval_formula(
    model: DynamicPoset,
    valuation: Mapping[str, Iterable[str]],
    phi: Formula,
) -> frozenset[str]:
    """Extension of phi: the set of worlds where phi holds."""
    return eval_table(model, valuation, phi)[phi]


def eval_box_by_orbit(
    model: DynamicPoset,
    valuation: Mapping[str, Iterable[str]],
    phi: Formula,
) -> frozenset[str]:
    """Henceforth phi computed by walking orbits, not by the fixpoint chain.

    Independent oracle: a world satisfies the box iff its entire forward
    orbit (finite, detected by revisit) stays inside the extension of phi.
    """
    child = eval_masks(model, _valuation_masks(model, valuation), phi)[phi]
    out = 0
    for i in range(model.n):
        j = i
        seen: set[int] = set()
        ok = True
        while j not in seen:
            if not (child >> j) & 1:
                ok = False
                break
            seen.add(j)
            j = model.step_arr[j]
        if ok:
            out |= 1 << i
    return model.worlds_of(out)


def check_morphism(
    src: DynamicPoset,
    dst: DynamicPoset,
    domain: Iterable[str],
    mapping: Mapping[str, str],
) -> list[str]:
    """Violations of the dynamic poset morphism laws; empty means verified.

    The domain must be a step-invariant up-set of the source; the map must be
    monotone, satisfy the lift condition within the domain, and commute with
    the step functions.
    """
    dom = set(domain)
    violations: list[str] = []
    unknown = dom - set(src.worlds)
    if unknown:
        return [f"domain mentions unknown worlds {sorted(unknown)}"]
    for w in sorted(dom):
        if w not in mapping:
            violations.append(f"map undefined on domain world {w}")
        elif mapping[w] not in dst.index:
            violations.append(f"map sends {w} outside the target model")
    if violations:
        return violations
    if not is_up_set(src, dom):
        violations.append("domain is not an up-set")
    bad = [w for w in sorted(dom) if src.step[w] not in dom]
    if bad:
        raise DomainNotInvariant(
            f"domain not closed under the step at {', '.join(bad)}"
        )
    for a in sorted(dom):
        for b in sorted(dom):
            if src.leq(a, b) and not dst.leq(mapping[a], mapping[b]):
                violations.append(f"monotonicity fails on {a}<={b}")
    for w in sorted(dom):
        for v in dst.worlds:
            if dst.leq(mapping[w], v):
                if not any(
                    src.leq(w, u) and u in dom and mapping[u] == v
                    for u in src.worlds
                ):
                    violations.append(
                        f"lift fails at {w}: {v} above its image is never hit"
                    )
    for w in sorted(dom):
        if src.step[w] in dom and mapping[src.step[w]] != dst.step[mapping[w]]:
            violations.append(f"step equivariance fails at {w}")
    return violations


def pull_back_valuation(
    dst_valuation: Mapping[str, Iterable[str]],
    domain: Iterable[str],
    mapping: Mapping[str, str],
) -> Valuation:
    """Valuation on the source induced by a morphism: preimages of the target sets."""
    out: Valuation = {}
    dom = set(domain)
    for atom, ws in dst_valuation.items():
        ws = set(ws)
        out[atom] = frozenset(w for w in dom if mapping[w] in ws)
    return out
