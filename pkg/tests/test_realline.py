import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from itlmc import (
    EMPTY,
    EvalCaps,
    Interval,
    IntervalSet,
    MalformedMap,
    MalformedSystem,
    PiecewiseAffineMap,
    REALS,
    RealSystem,
    Status,
    UndeterminedExtension,
    check_pointwise,
    eval_real,
    interval,
    make_interval,
    parse_formula,
    point,
)
from conftest import random_interval_set, random_point

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=6)


@st.composite
def interval_sets(draw):
    pieces = []
    for _ in range(draw(st.integers(0, 3))):
        a = draw(rationals)
        b = draw(rationals)
        lo, hi = min(a, b), max(a, b)
        if draw(st.booleans()) and draw(st.integers(0, 4)) == 0:
            lo = None
        if draw(st.booleans()) and draw(st.integers(0, 4)) == 0:
            hi = None
        pieces.append(
            make_interval(
                lo,
                lo is not None and draw(st.booleans()),
                hi,
                hi is not None and draw(st.booleans()),
            )
        )
    return IntervalSet.of(p for p in pieces if p is not None)


# -- set algebra --------------------------------------------------------------

def test_canonicalization_merges_touching_pieces():
    a = IntervalSet.of(
        [
            Interval(Fraction(0), False, Fraction(1), True),
            Interval(Fraction(1), False, Fraction(2), False),
            make_interval(Fraction(5), False, Fraction(4), False),
        ]
    )
    assert a == interval(0, 2)
    # open pieces that only share an endpoint do not merge
    b = interval(0, 1).union(interval(1, 2))
    assert len(b.components) == 2
    assert not b.contains(1)


def test_string_forms():
    assert str(EMPTY) == "{}"
    assert str(interval(None, 0).union(interval(1, 2, True, True))) in (
        "(-inf, 0) u [1, 2]",
    )


@given(interval_sets(), interval_sets())
def test_de_morgan(a, b):
    assert a.union(b).complement() == a.complement().intersection(b.complement())
    assert a.intersection(b).complement() == a.complement().union(b.complement())


@given(interval_sets())
def test_interior_closure_duality(a):
    assert a.interior() == a.complement().closure().complement()
    assert a.closure() == a.complement().interior().complement()
    assert a.interior().is_open()
    assert a.interior().is_subset(a)
    assert a.is_subset(a.closure())


@given(interval_sets(), interval_sets())
def test_difference_and_subset(a, b):
    assert a.difference(b) == a.intersection(b.complement())
    assert a.intersection(b).is_subset(a)
    assert a.is_subset(a.union(b))


@given(interval_sets(), interval_sets(), rationals)
def test_membership_coherence(a, b, x):
    assert a.union(b).contains(x) == (a.contains(x) or b.contains(x))
    assert a.intersection(b).contains(x) == (a.contains(x) and b.contains(x))
    assert a.complement().contains(x) == (not a.contains(x))


def test_point_and_interval_helpers():
    assert point(3).contains(3)
    assert not point(3).interior().contains(3)
    assert point(3).interior() == EMPTY
    assert interval(0, 1, True, True).closure() == interval(0, 1, True, True)


# -- piecewise affine maps ----------------------------------------------------

def test_map_validation():
    with pytest.raises(MalformedMap, match="discontinuous"):
        PiecewiseAffineMap.from_pieces([0], [(0, 0), (1, 5)])
    with pytest.raises(MalformedMap):
        PiecewiseAffineMap.from_pieces([1, 0], [(1, 0), (1, 0), (1, 0)])
    with pytest.raises(MalformedMap):
        PiecewiseAffineMap.from_pieces([0], [(1, 0)])


def test_openness_flag():
    assert PiecewiseAffineMap.affine(2, 0).is_open()
    assert PiecewiseAffineMap.affine(1, 1).is_open()
    assert not PiecewiseAffineMap.affine(0, 0).is_open()
    kinked = PiecewiseAffineMap.from_pieces([0], [(0, 0), (2, 0)])
    assert not kinked.is_open()
    vee = PiecewiseAffineMap.from_pieces([0], [(-1, 0), (1, 0)])
    assert not vee.is_open()  # folds, hence not interior


def test_image_and_preimage():
    double = PiecewiseAffineMap.affine(2, 0)
    assert double.image(interval(0, 1)) == interval(0, 2)
    assert double.preimage(interval(0, 2)) == interval(0, 1)
    flat = PiecewiseAffineMap.affine(0, 3)
    assert flat.image(interval(-9, 9)) == point(3)
    assert flat.preimage(interval(2, 4)) == REALS
    assert flat.preimage(interval(5, 6)) == EMPTY


def test_preimage_vs_point_sampling_bulk():
    rng = random.Random(13)
    maps = [
        PiecewiseAffineMap.affine(2, 0),
        PiecewiseAffineMap.affine(0, 0),
        PiecewiseAffineMap.affine(1, 1),
        PiecewiseAffineMap.affine(-1, 2),
        PiecewiseAffineMap.from_pieces([0], [(0, 0), (2, 0)]),
        PiecewiseAffineMap.from_pieces([-1, 1], [(1, 1), (0, 0), (3, -3)]),
    ]
    for _ in range(2000):
        f = rng.choice(maps)
        a = random_interval_set(rng)
        x = random_point(rng)
        assert f.preimage(a).contains(x) == a.contains(f.apply(x))


# -- formula evaluation -------------------------------------------------------

def _system(pwmap, **valuation):
    return RealSystem(pwmap, {k: v for k, v in valuation.items()})


def test_valuations_must_be_open():
    with pytest.raises(MalformedSystem):
        RealSystem(PiecewiseAffineMap.affine(1, 0), {"p": point(0)})


def test_box_exact_on_invariant_ray():
    # doubling keeps (1, inf) invariant, so the chain closes in one step
    system = _system(PiecewiseAffineMap.affine(2, 0), p=interval(1, None))
    out = eval_real(system, parse_formula("[]p"))
    assert out.value == interval(1, None)
    assert out.status is Status.EXACT
    weak = eval_real(system, parse_formula("[*]p"))
    assert weak.value == interval(1, None)


def test_box_extrapolates_shrinking_chain():
    system = _system(PiecewiseAffineMap.affine(2, 0), p=interval(None, 1))
    out = eval_real(system, parse_formula("[]p"))
    assert out.value == interval(None, 0)
    assert out.status is Status.EXTRAPOLATED


def test_eventually_least_fixpoint():
    system = _system(PiecewiseAffineMap.affine(2, 0), q=interval(0, None))
    out = eval_real(system, parse_formula("<>q"))
    assert out.value == interval(0, None)
    assert out.status is Status.EXACT


def test_next_is_preimage():
    system = _system(
        PiecewiseAffineMap.from_pieces([0], [(0, 0), (2, 0)]),
        p=interval(None, 1),
    )
    out = eval_real(system, parse_formula("O p"))
    assert out.value == interval(None, Fraction(1, 2))
    assert out.status is Status.EXACT


def test_strict_caps_give_undetermined():
    system = RealSystem(
        PiecewiseAffineMap.affine(2, 0),
        {"p": interval(None, 1)},
        EvalCaps(iter=2, restart=1, window=2),
    )
    out = eval_real(system, parse_formula("[]p"))
    assert out.status is Status.UNDETERMINED
    assert out.value is None


def test_status_propagates_worst():
    system = _system(PiecewiseAffineMap.affine(2, 0), p=interval(None, 1))
    out = eval_real(system, parse_formula("[]p | p"))
    assert out.status is Status.EXTRAPOLATED


def test_check_pointwise():
    system = _system(PiecewiseAffineMap.affine(2, 0), p=interval(None, 1))
    got = check_pointwise(
        system, parse_formula("[]p"), [Fraction(-1), Fraction(0), Fraction(1)]
    )
    assert got == [(Fraction(-1), True), (Fraction(0), False), (Fraction(1), False)]


def test_check_pointwise_raises_when_undetermined():
    system = RealSystem(
        PiecewiseAffineMap.affine(2, 0),
        {"p": interval(None, 1)},
        EvalCaps(iter=2, restart=1, window=2),
    )
    with pytest.raises(UndeterminedExtension):
        check_pointwise(system, parse_formula("[]p"), [Fraction(0)])
