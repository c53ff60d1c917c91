import random
from fractions import Fraction

import pytest

from itlmc import (
    And,
    MalformedStep,
    Atom,
    Bottom,
    Eventually,
    Implies,
    Next,
    Not,
    Or,
    ParseError,
    StrongBox,
    WeakBox,
    interval,
    parse_derivation,
    parse_formula,
    parse_interval_set,
    parse_poset_model,
    parse_real_system,
    print_formula,
    print_poset_model,
)

P, Q, R = Atom("p"), Atom("q"), Atom("r")


# -- formulas ---------------------------------------------------------------

def test_precedence_and_associativity():
    assert parse_formula("p -> q -> r") == Implies(P, Implies(Q, R))
    assert parse_formula("p | q & r") == Or(P, And(Q, R))
    assert parse_formula("p & q | r") == Or(And(P, Q), R)
    assert parse_formula("p & q & r") == And(And(P, Q), R)
    assert parse_formula("~p | q") == Or(Not(P), Q)
    assert parse_formula("O <> [] [*] p") == Next(
        Eventually(StrongBox(WeakBox(P)))
    )


def test_iff_expands_and_refuses_chains():
    assert parse_formula("p <-> q") == And(Implies(P, Q), Implies(Q, P))
    with pytest.raises(ParseError, match="non-associative"):
        parse_formula("p <-> q <-> r")
    # explicit parens are fine
    parse_formula("(p <-> q) <-> r")


def test_unicode_aliases():
    a = parse_formula("□(p ∨ ¬q) → ◇⊡p ∧ ○⊥")
    b = parse_formula("[](p | ~q) -> <>[*]p & O false")
    assert a == b


def test_parse_error_spans():
    with pytest.raises(ParseError) as err:
        parse_formula("p -> (q & )")
    assert "at" in str(err.value)
    assert err.value.span.start >= 8


def test_unbalanced_and_trailing():
    for bad in ["(p", "p)", "p q", "", "&", "p ->"]:
        with pytest.raises(ParseError):
            parse_formula(bad)


def _rand_formula(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([Bottom(), P, Q, R])
    kind = rng.randrange(7)
    if kind < 4:
        op = [Next, Eventually, StrongBox, WeakBox][kind]
        return op(_rand_formula(rng, depth - 1))
    op = [And, Or, Implies][kind - 4]
    return op(_rand_formula(rng, depth - 1), _rand_formula(rng, depth - 1))


def test_print_parse_roundtrip_bulk():
    rng = random.Random(7)
    for _ in range(10_000):
        phi = _rand_formula(rng, 5)
        assert parse_formula(print_formula(phi)) == phi


# -- poset model files ------------------------------------------------------

FIG4 = """
worlds: w v u
order: v<=u
step: w->v  v->v  u->u
val p: u
val q:
"""


def test_parse_poset_model_roundtrip():
    model, valuation = parse_poset_model(FIG4)
    assert model.worlds == ("w", "v", "u")
    assert model.leq("v", "u") and not model.leq("u", "v")
    assert valuation == {"p": frozenset({"u"}), "q": frozenset()}
    again, val2 = parse_poset_model(print_poset_model(model, valuation))
    assert again.worlds == model.worlds
    assert again.order_pairs == model.order_pairs
    assert again.step == model.step
    assert val2 == valuation


def test_poset_model_errors():
    with pytest.raises(ParseError, match="at least one world"):
        parse_poset_model("order:\nstep:\n")
    with pytest.raises(MalformedStep):
        parse_poset_model("worlds: a\nstep: a->b\n")
    with pytest.raises(ParseError, match="duplicate"):
        parse_poset_model("worlds: a\nworlds: a\nstep: a->a\n")
    with pytest.raises(MalformedStep):
        parse_poset_model("worlds: a b\norder: a<=b\n")  # no step section
    with pytest.raises(ParseError, match="unknown world"):
        parse_poset_model("worlds: a\nstep: a->a\nval p: b\n")


def test_poset_model_comments_ignored():
    model, _ = parse_poset_model(
        "# header\nworlds: a  # trailing\nstep: a->a\n"
    )
    assert model.worlds == ("a",)


# -- interval sets ----------------------------------------------------------

def test_parse_interval_set_forms():
    assert parse_interval_set("(0, 1)") == interval(0, 1)
    assert parse_interval_set("[1/2, 3/2]") == interval(
        Fraction(1, 2), Fraction(3, 2), True, True
    )
    assert parse_interval_set("(-inf, 0) u (1, inf)") == interval(None, 0).union(
        interval(1, None)
    )
    assert parse_interval_set("{}").is_empty()
    assert parse_interval_set("").is_empty()
    assert parse_interval_set("[2, 2]") == parse_interval_set("[2,2]")


def test_parse_interval_set_errors():
    with pytest.raises(ParseError):
        parse_interval_set("[-inf, 0)")  # infinity cannot be closed
    with pytest.raises(ParseError):
        parse_interval_set("(1, 0)")  # empty interval literal
    with pytest.raises(ParseError):
        parse_interval_set("(0 1)")


# -- real system files ------------------------------------------------------

def test_parse_real_system_piecewise():
    system = parse_real_system(
        "map: piecewise x <= 0 : 0 ; x > 0 : 2*x\n"
        "val p: (-inf, 1)\n"
        "caps: iter=32 restart=4\n"
    )
    assert system.map.apply(Fraction(-3)) == 0
    assert system.map.apply(Fraction(2)) == 4
    assert system.caps.iter == 32 and system.caps.restart == 4
    assert system.caps.orbit == 128  # unset fields keep defaults


def test_parse_real_system_affine_forms():
    for text, x, want in [
        ("x + 1", 2, 3),
        ("3 - x", 1, 2),
        ("1/2*x", 4, 2),
        ("x/2", 5, Fraction(5, 2)),
        ("-x", 3, -3),
        ("0", 9, 0),
    ]:
        system = parse_real_system(f"map: {text}\n")
        assert system.map.apply(Fraction(x)) == Fraction(want)


def test_parse_real_system_must_tile_the_line():
    with pytest.raises(ParseError):
        parse_real_system("map: piecewise x <= 0 : 0 ; x > 1 : x\n")
    with pytest.raises(ParseError):
        parse_real_system("map: piecewise x < 0 : 0 ; x > 0 : x\n")  # 0 uncovered
    with pytest.raises(ParseError):
        parse_real_system("map: piecewise x <= 0 : 0 ; x >= 0 : x\n")  # 0 twice


def test_parse_real_system_rejects_discontinuous_pieces():
    with pytest.raises(ValueError):
        parse_real_system("map: piecewise x <= 0 : 0 ; x > 0 : x + 5\n")


# -- derivation files -------------------------------------------------------

GOOD = """
1. p -> p | q        ; ipc-taut
2. O(p -> p | q)     ; nec-next 1
"""


def test_parse_derivation():
    deriv = parse_derivation(GOOD)
    assert len(deriv.lines) == 2
    assert deriv.theorem == Next(Implies(P, Or(P, Q)))
    just = deriv.lines[1].justification
    assert just.rule == "nec-next" and just.premises == (1,)


def test_derivation_numbering_must_be_consecutive():
    with pytest.raises(ParseError, match="expected line number 2"):
        parse_derivation("1. p -> p ; ipc-taut\n3. p -> p ; ipc-taut\n")


def test_derivation_premises_must_precede():
    with pytest.raises(ParseError, match="does not precede"):
        parse_derivation("1. p ; mp 1 2\n")
    with pytest.raises(ParseError, match="does not precede"):
        parse_derivation("1. p -> p ; ipc-taut\n2. p ; mp 2 1\n")


def test_derivation_missing_separator():
    with pytest.raises(ParseError, match=";"):
        parse_derivation("1. p -> p ipc-taut\n")


def test_derivation_substitution_parse():
    deriv = parse_derivation("1. []p -> O []p ; axiom ix {phi:=p}\n")
    just = deriv.lines[0].justification
    assert just.schema == "ix"
    assert just.subst == {"phi": P}
    bare = parse_derivation("1. O false -> false ; axiom ii\n")
    assert bare.lines[0].justification.subst is None
