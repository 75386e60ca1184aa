import pytest
from hypothesis import given
from hypothesis import strategies as st

from aspsigma.errors import ParseError
from aspsigma.parsing import parse_formula, parse_ground_atom, parse_program
from aspsigma.syntax import (
    Atom,
    AtomF,
    Forall,
    Impl,
    Program,
    const,
    fmt_formula,
    var,
)


def test_basic_program():
    p = parse_program("p(c). q(x) :- not p(x).")
    assert len(p.clauses) == 2
    assert p.domain == frozenset({"c"})
    assert p.clauses[1].body[0].negated


def test_arity_conflict():
    with pytest.raises(ParseError):
        parse_program("p(c,d). p(c).")


def test_domain_declaration():
    p = parse_program("#domain c, d. r(x) :- s(x).")
    assert p.domain == frozenset({"c", "d"})
    assert len(p.clauses) == 1


def test_comments_and_blank_lines():
    p = parse_program("% a comment\np.\n\nq :- not p. % trailing\n")
    assert len(p.clauses) == 2


def test_variable_lexical_space():
    p = parse_program("e(x, c) :- f(x).")
    head = p.clauses[0].head
    assert head.args[0].var and not head.args[1].var


def test_safe_mode_rejects_head_only_variables():
    parse_program("p(x, y) :- q(x). #domain c.")  # fine by default
    with pytest.raises(ParseError):
        parse_program("p(x, y) :- q(x). #domain c.", safe=True)


def test_syntax_error_position():
    with pytest.raises(ParseError) as e:
        parse_program("p :- \n q r.")
    assert e.value.line == 2


def test_ground_atom():
    a = parse_ground_atom("p(c,d)")
    assert a == Atom("p", (const("c"), const("d")))
    with pytest.raises(ParseError):
        parse_ground_atom("p(x)")


def test_formula_basic():
    f = parse_formula("forall x. (P(x) -> Q(x))")
    assert isinstance(f, Forall)
    assert f.body == Impl(AtomF("P", (var("x"),)), AtomF("Q", (var("x"),)))


def test_formula_right_associativity():
    f = parse_formula("P -> Q -> R")
    assert f == Impl(AtomF("P"), Impl(AtomF("Q"), AtomF("R")))


def test_forall_scopes_to_end():
    f = parse_formula("forall x. P(x) -> Q(x)")
    assert f == Forall("x", Impl(AtomF("P", (var("x"),)), AtomF("Q", (var("x"),))))


def test_paren_closes_scope():
    f = parse_formula("(forall x. P(x)) -> Q")
    assert isinstance(f, Impl) and isinstance(f.lhs, Forall)


def test_free_identifiers_are_constants():
    f = parse_formula("P(c) -> P(d)")
    assert f == Impl(AtomF("P", (const("c"),)), AtomF("P", (const("d"),)))


def test_rectification_on_parse():
    f = parse_formula("(forall x. P(x)) -> (forall x. P(x))")
    lhs, rhs = f.lhs, f.rhs
    assert lhs.var != rhs.var


def test_formula_arity_conflict():
    with pytest.raises(ParseError):
        parse_formula("P(c) -> P(c,d)")


# ---------------------------------------------------------------------------
# Round trips
# ---------------------------------------------------------------------------

_atoms = st.sampled_from(
    [
        AtomF("P", (var("x"),)),
        AtomF("P", (const("c"),)),
        AtomF("Q", (var("y"), const("d"))),
        AtomF("R"),
    ]
)

_formulas = st.recursive(
    _atoms,
    lambda sub: st.one_of(
        st.tuples(sub, sub).map(lambda t: Impl(*t)),
        st.tuples(st.sampled_from(["x", "y", "z"]), sub).map(
            lambda t: Forall(t[0], t[1])
        ),
    ),
    max_leaves=10,
)


@given(_formulas)
def test_formula_print_parse_round_trip(f):
    from aspsigma.syntax import free_vars, rectify, substitute

    f = rectify(f)
    # the parser reads unbound identifiers as constants, so close the formula
    f = substitute(f, {v: const(v) for v in free_vars(f)})
    assert parse_formula(fmt_formula(f)) == f


_terms = st.sampled_from([var("x"), var("y"), const("c"), const("d")])
_patoms = st.builds(
    Atom,
    st.sampled_from(["p", "q"]),
    st.tuples(_terms),
    st.booleans(),
)


@given(st.lists(st.tuples(_patoms, st.lists(_patoms, max_size=3)), min_size=1, max_size=4))
def test_program_print_parse_round_trip(raw):
    from aspsigma.syntax import Clause, make_program

    clauses = []
    for head, body in raw:
        clauses.append(Clause(head.positive(), tuple(body)))
    try:
        p = make_program(clauses, {"c"})
    except Exception:
        return
    q = parse_program(str(p))
    assert q.domain == p.domain
    assert set(q.clauses) == set(p.clauses)
