"""Shared strategies and deterministic random generators for the tests."""

from __future__ import annotations

import random
from fractions import Fraction

import hypothesis.strategies as st

from itlmc import (
    And,
    Atom,
    Bottom,
    DynamicPoset,
    Eventually,
    Implies,
    Interval,
    IntervalSet,
    Next,
    Or,
    StrongBox,
    WeakBox,
    make_interval,
)


def formulas(
    atom_names=("p", "q", "r"),
    max_leaves: int = 10,
    allow_dia: bool = True,
    allow_strong: bool = True,
    allow_weak: bool = False,
):
    """Hypothesis strategy for random formulas in a chosen fragment."""
    leaves = st.one_of(
        st.just(Bottom()),
        st.sampled_from([Atom(a) for a in atom_names]),
    )
    unary = [Next]
    if allow_dia:
        unary.append(Eventually)
    if allow_strong:
        unary.append(StrongBox)
    if allow_weak:
        unary.append(WeakBox)

    def extend(children):
        options = [st.builds(op, children) for op in unary]
        options += [
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Implies, children, children),
        ]
        return st.one_of(*options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def random_poset(rng: random.Random, n: int) -> list[tuple[int, int]]:
    """A random strict partial order on range(n), as closed pair list."""
    leq = [[i == j for j in range(n)] for i in range(n)]
    for _ in range(rng.randint(0, n * n)):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j or leq[j][i]:
            continue
        leq[i][j] = True
        for a in range(n):
            for b in range(n):
                if leq[a][i] and leq[j][b]:
                    leq[a][b] = True
    return [(i, j) for i in range(n) for j in range(n) if i != j and leq[i][j]]


def random_model(
    rng: random.Random,
    max_worlds: int = 8,
    atom_names=("p", "q"),
    require_open: bool = False,
) -> tuple[DynamicPoset, dict[str, frozenset[str]]]:
    """A random continuous dynamic poset model with up-set valuation."""
    while True:
        n = rng.randint(1, max_worlds)
        worlds = tuple(f"w{i}" for i in range(n))
        pairs = random_poset(rng, n)
        order = tuple((worlds[i], worlds[j]) for i, j in pairs)
        carrier = DynamicPoset(worlds, order, {w: w for w in worlds})
        for _ in range(40):
            step = {w: worlds[rng.randrange(n)] for w in worlds}
            model = carrier.replace_step(step)
            if model.is_continuous and (not require_open or model.is_open):
                break
        else:
            model = carrier  # identity step is continuous and open
        valuation = {}
        for atom in atom_names:
            seed = {w for w in worlds if rng.random() < 0.4}
            closed = {
                v for v in worlds for w in seed if w == v or model.leq(w, v)
            }
            valuation[atom] = frozenset(closed)
        return model, valuation


def random_interval_set(rng: random.Random, max_pieces: int = 4) -> IntervalSet:
    """A random finite union of rational intervals (possibly unbounded)."""
    pieces = []
    for _ in range(rng.randint(0, max_pieces)):
        a = Fraction(rng.randint(-24, 24), rng.randint(1, 8))
        b = Fraction(rng.randint(-24, 24), rng.randint(1, 8))
        lo, hi = (a, b) if a <= b else (b, a)
        if rng.random() < 0.15:
            lo = None
        if rng.random() < 0.15:
            hi = None
        piece = make_interval(
            lo,
            lo is not None and rng.random() < 0.5,
            hi,
            hi is not None and rng.random() < 0.5,
        )
        if piece is not None:
            pieces.append(piece)
    if not pieces and rng.random() < 0.3:
        return IntervalSet((Interval(None, False, None, False),))
    return IntervalSet.of(pieces)


def random_point(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-60, 60), rng.randint(1, 12))
