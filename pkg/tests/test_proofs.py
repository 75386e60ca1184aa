import pytest

from aspsigma.errors import FormulaError
from aspsigma.parsing import parse_formula
from aspsigma.proofs import (
    Environment,
    OAbs,
    OApp,
    PAbs,
    PApp,
    PVar,
    check,
    check_explain,
    context_environment,
    fmt_term,
    infer,
    is_lnf,
    parse_term,
    prove,
    prove_sigma1,
)
from aspsigma.syntax import AtomF, Forall, Impl, const, fmt_formula, var

a = AtomF("a")
b = AtomF("b")


def P(t):
    return AtomF("P", (t,))


# ---------------------------------------------------------------------------
# Checker
# ---------------------------------------------------------------------------


def test_check_axiom():
    env = Environment((("X", a),))
    assert check(env, PVar("X"), a)
    assert not check(env, PVar("X"), b)


def test_check_identity_abstraction():
    t = PAbs("X", a, PVar("X"))
    assert check(Environment(), t, Impl(a, a))


def test_check_object_rules():
    # X : forall x. P(x)  |-  \y. X y : forall y. P(y)
    env = Environment((("X", Forall("x", P(var("x")))),))
    t = OAbs("y", OApp(PVar("X"), var("y")))
    assert check(env, t, Forall("y", P(var("y"))))


def test_check_eigenvariable_violation():
    # the abstracted variable occurs free in a declaration
    env = Environment((("X", Forall("x", P(var("x")))), ("Y", P(var("y")))))
    t = OAbs("y", OApp(PVar("X"), var("y")))
    ok, trail = check_explain(env, t, Forall("y", P(var("y"))))
    assert not ok and any("eigenvariable" in line for line in trail)


def test_check_application():
    env = Environment((("F", Impl(a, b)), ("X", a)))
    assert check(env, PApp(PVar("F"), PVar("X")), b)
    assert not check(env, PApp(PVar("X"), PVar("F")), b)


def test_check_alpha_equivalence_of_goal():
    env = Environment((("X", Forall("x", P(var("x")))),))
    assert check(env, PVar("X"), Forall("z", P(var("z"))))


def test_environment_rejects_duplicates():
    with pytest.raises(FormulaError):
        Environment((("X", a), ("X", b)))


# ---------------------------------------------------------------------------
# Long normal forms
# ---------------------------------------------------------------------------


def test_lnf_identity():
    t = PAbs("X", a, PVar("X"))
    assert is_lnf(Environment(), t, Impl(a, a))


def test_lnf_rejects_eta_short():
    env = Environment((("X", Impl(a, a)),))
    assert check(env, PVar("X"), Impl(a, a))
    assert not is_lnf(env, PVar("X"), Impl(a, a))


def test_lnf_spine():
    env = Environment((("X", Impl(a, b)), ("N", a)))
    assert is_lnf(env, PApp(PVar("X"), PVar("N")), b)


def test_lnf_object_spine():
    env = Environment((("X", Forall("x", P(var("x")))),))
    assert is_lnf(env, OApp(PVar("X"), const("c")), P(const("c")))


# ---------------------------------------------------------------------------
# Term syntax round trip
# ---------------------------------------------------------------------------


def test_term_print_parse_round_trip():
    f = parse_formula("(forall x. P(x) -> Q(x)) -> P(c) -> Q(c)")
    t = prove_sigma1(f)
    assert parse_term(fmt_term(t)) == t


def test_term_parse_nested():
    t = parse_term("\\X:(a -> b). \\Y:a. X Y")
    assert t == PAbs("X", Impl(a, b), PAbs("Y", a, PApp(PVar("X"), PVar("Y"))))


def test_term_parse_object_abstraction():
    t = parse_term("\\x. F x c")
    assert t == OAbs("x", OApp(OApp(PVar("F"), var("x")), const("c")))


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def test_prove_hypothesis():
    t = prove([a], a)
    assert t == PVar("H1")
    assert check(context_environment([a]), t, a)


def test_prove_generation_step():
    ctx = [parse_formula("forall x. P(x) -> Q(x)"), parse_formula("P(c)")]
    goal = parse_formula("Q(c)")
    t = prove(ctx, goal)
    assert t is not None
    env = context_environment(ctx)
    assert check(env, t, goal)
    assert is_lnf(env, t, goal)


def test_prove_peirce_fails():
    assert prove([], parse_formula("((a -> b) -> a) -> a")) is None


def test_prove_sigma1_examples():
    assert fmt_term(prove_sigma1(parse_formula("a -> a"))) == "\\X1:a. X1"
    assert prove_sigma1(parse_formula("b -> a")) is None
    t = prove_sigma1(parse_formula("(forall x. P(x) -> Q(x)) -> P(c) -> Q(c)"))
    assert t is not None


def test_prove_sigma1_rejects_pi1_only():
    with pytest.raises(FormulaError):
        prove_sigma1(parse_formula("forall x. P(x)"))


def test_prove_instantiates_trailing_quantifiers():
    # forall x. P(x) proves P(c) by instantiation
    t = prove([parse_formula("forall x. P(x)")], parse_formula("P(c)"))
    assert t == OApp(PVar("H1"), const("c"))


def test_prove_loops_terminate():
    # circular support gives no proof
    ctx = [parse_formula("a -> b"), parse_formula("b -> a")]
    assert prove(ctx, parse_formula("a")) is None


def test_prove_mutual_recursion_with_progress():
    ctx = [
        parse_formula("(b -> a) -> a"),
        parse_formula("b -> a"),
    ]
    t = prove(ctx, parse_formula("a"))
    assert t is not None
    env = context_environment(ctx)
    assert check(env, t, parse_formula("a"))


def test_prove_needs_nested_hypothesis():
    # ((a -> b) -> c) with a -> b available only via lambda
    f = parse_formula("(a -> b) -> (b -> c) -> a -> c")
    t = prove_sigma1(f)
    assert t is not None
    assert check(Environment(), t, f)
    assert is_lnf(Environment(), t, f)


def test_weakening():
    ctx = [parse_formula("a -> b"), parse_formula("a")]
    goal = parse_formula("b")
    assert prove(ctx, goal) is not None
    extra = ctx + [parse_formula("forall x. R(x) -> R(x)")]
    assert prove(extra, goal) is not None


def test_weakening_over_generated_instances():
    from aspsigma.corpus import CorpusSpec, gen_formulas

    extras = [
        parse_formula("forall x. R(x) -> R(x)"),
        parse_formula("w -> w"),
        parse_formula("forall x. W(x)"),
    ]
    for phi in gen_formulas(CorpusSpec(count=40, seed=21, formula_max_size=7)):
        from aspsigma.syntax import peel_sigma1

        premises, target = peel_sigma1(phi)
        if prove(list(premises), target) is None:
            continue
        for k in (1, 2, 3):
            assert prove(list(premises) + extras[:k], target) is not None


def test_certificates_contain_no_object_abstraction():
    formulas = [
        "a -> a",
        "(forall x. P(x) -> Q(x)) -> P(c) -> Q(c)",
        "(a -> b) -> (b -> c) -> a -> c",
        "(forall x. P(x)) -> P(c)",
    ]
    for text in formulas:
        t = prove_sigma1(parse_formula(text))
        assert t is not None
        assert not _contains_oabs(t)


def _contains_oabs(t):
    if isinstance(t, OAbs):
        return True
    if isinstance(t, PAbs):
        return _contains_oabs(t.body)
    if isinstance(t, PApp):
        return _contains_oabs(t.fn) or _contains_oabs(t.arg)
    if isinstance(t, OApp):
        return _contains_oabs(t.fn)
    return False


def test_empty_pool_gets_fresh_constant():
    # a closed formula without constants still searches: needs one instantiation
    f = parse_formula("(forall x. P(x)) -> (forall y. P(y) -> q) -> q")
    t = prove_sigma1(f)
    assert t is not None
    assert check(Environment(), t, f)
