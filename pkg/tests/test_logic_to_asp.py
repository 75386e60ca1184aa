import pytest

from aspsigma.corpus import CorpusSpec, gen_formulas
from aspsigma.engine import has_stable_model, is_stable
from aspsigma.errors import CapExceeded, FormulaError
from aspsigma.logic_to_asp import (
    _answers_first,
    analysis,
    analyze,
    certified_addr_len,
    decide_by_translation,
    reachable_cone,
    translate,
)
from aspsigma.parsing import parse_formula
from aspsigma.proofs import prove_sigma1
from aspsigma.syntax import Atom, AtomF, const, fmt_formula


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def test_analyze_identity_formula():
    sig, schemas = analyze(parse_formula("a -> a"))
    assert sig.target == AtomF("a")
    assert len(sig.premises) == 1
    (schema,) = schemas
    assert schema.top_vars == () and schema.steps == ()
    assert schema.head == AtomF("a")


def test_analyze_nested_quantifier_blocks():
    # adapted from an arity-consistent nesting: head uses the second top
    # variable and a free-variable constant
    phi = parse_formula(
        "(forall y1. R(y1, c2) -> (forall y2. P(y1, c1) -> S(c1, y2, y3))) -> S(c1, c4, y3)"
    )
    sig, schemas = analyze(phi)
    (schema,) = [s for s in schemas if s.top_vars]
    assert len(schema.top_vars) == 2
    assert schema.head.pred == "S"
    assert [s.vars_visible for s in schema.steps] == [1, 2]
    # the head mentions the second top variable and the free constant
    head_args = {t.name for t in schema.head.args}
    assert schema.top_vars[1] in head_args
    assert "y3" in {t.name for t in schema.head.args if not t.var}


def test_analyze_rejects_non_sigma1():
    with pytest.raises(FormulaError):
        analyze(parse_formula("forall x. P(x)"))


def test_atom_universe_is_polynomial():
    phi = parse_formula("(forall x. forall y. P(x, y) -> Q(c1, c2)) -> Q(c1, c2)")
    sig, _ = analyze(phi)
    names = len(sig.pool) + len(sig.bound_vars)
    bound = sum(names**arity for arity in (2, 2))
    universe = sig.atom_universe()
    assert len(universe) == bound
    assert len(universe) <= sig.n ** 3


# ---------------------------------------------------------------------------
# translate, structurally
# ---------------------------------------------------------------------------


def test_every_question_answered_clause_shape():
    t = translate(parse_formula("b -> a"), addr_len=1)
    shapes = {
        str(c)
        for c in t.program.clauses
        if c.head.pred == "f" and any(a.pred == "q" for a in c.body)
    }
    # F <= not Y(...), Q(...), not F
    for s in shapes:
        assert s.startswith("f :- not y(")
        assert ", q(" in s and s.endswith("not f.")


def test_unique_goal_clauses_are_self_blocking():
    t = translate(parse_formula("((a -> b) -> a) -> a"), addr_len=1)
    rows = [
        c
        for c in t.program.clauses
        if c.head.pred == "f"
        and sum(a.pred.startswith("goal_") for a in c.body) == 2
    ]
    assert rows
    for c in rows:
        assert any(a.negated and a.pred == "f" for a in c.body)


def test_initial_facts_pin_the_first_address():
    t = translate(parse_formula("b -> a"), addr_len=2)
    facts = {str(c) for c in t.program.clauses if not c.body}
    assert "goal_a(0,0)." in facts
    assert any(s.startswith("env(f1,") and s.endswith("0,0).") for s in facts)


def test_full_facts_enumerates_star_positions():
    # with two constants, the irrelevant substitution slot of the head fact
    # ranges over both of them under --full-facts
    phi = parse_formula("(forall x. P(x) -> Q(d)) -> P(c) -> g")
    lazy = translate(phi, addr_len=1, full_facts=False)
    full = translate(phi, addr_len=1, full_facts=True)
    lazy_heads = [c for c in lazy.program.clauses if c.head.pred.startswith("hd_")]
    full_heads = [c for c in full.program.clauses if c.head.pred.startswith("hd_")]
    assert len(full_heads) > len(lazy_heads)
    # both variants decide existence the same way
    lazy_model = has_stable_model(lazy.ground_program, branch_priority=_answers_first)
    full_model = has_stable_model(full.ground_program, branch_priority=_answers_first)
    assert (lazy_model is None) == (full_model is None)


def test_emission_cap_reports_feasible_length():
    phi = parse_formula("(forall x. P(x) -> Q(x)) -> P(c) -> Q(d)")
    with pytest.raises(CapExceeded) as e:
        translate(phi, addr_len=8, emission_cap=2000)
    assert e.value.feasible is not None and e.value.feasible < 8


def test_header_records_sizes():
    t = translate(parse_formula("b -> a"), addr_len=1)
    header = t.header()
    assert "n=3" in header and "r=0" in header and "length 1" in header


# ---------------------------------------------------------------------------
# decisions
# ---------------------------------------------------------------------------


def test_decide_examples():
    assert decide_by_translation(parse_formula("b -> a")).refutable
    assert not decide_by_translation(parse_formula("a -> a")).refutable
    assert decide_by_translation(parse_formula("a")).refutable


def test_soundness_at_any_addr_len():
    spec = CorpusSpec(count=25, seed=17, formula_max_size=7)
    for phi in gen_formulas(spec):
        provable = prove_sigma1(phi) is not None
        for l in (1, 2, 3):
            try:
                t = translate(phi, addr_len=l)
            except CapExceeded:
                continue
            witness = has_stable_model(
                t.ground_program, branch_priority=_answers_first
            )
            if witness is not None:
                assert not provable, fmt_formula(phi)
                assert is_stable(t.ground_program, witness)
                # no two goals share an address, and the false atom is absent
                assert Atom("f") not in witness
                for bits in t.builder.all_addresses():
                    goals = [
                        g
                        for g in t.analysis.goal_universe
                        if t.builder.goal_atom(g, bits) in witness
                    ]
                    assert len(goals) <= 1


def test_descendant_substitutions_mix_member_and_top_variables():
    # the inner premise R(x,y) inherits x from its member's own substitution
    # and y from the question's top-variable instantiation
    phi = parse_formula(
        "(forall x. ((forall y. (R(x, y) -> g) -> g) -> g) -> g) -> R(c, d) -> g"
    )
    an = analysis(phi)
    # the member 'forall y. (R(x,y) -> g) -> g' has instances for x:=c and x:=d
    keyed = {}
    for p in an.instances:
        if dict(p.assign).keys() == {"x"}:
            keyed[dict(p.assign)["x"]] = p
    assert set(keyed) == {"c", "d"}
    for x_val, member in keyed.items():
        for q in an.questions:
            if q.inst != member.index or not q.answers:
                continue
            t_map = dict(q.t_assign)
            (opt,) = q.answers
            (tau_idx,) = opt.taus
            tau = an.instances[tau_idx]
            tau_assign = dict(tau.assign)
            assert tau_assign["x"] == x_val  # inherited from the member
            assert tau_assign["y"] == t_map["y"]  # set by the question


def test_certified_length_covers_cone():
    phi = parse_formula("((a -> b) -> c) -> ((b -> a) -> c) -> c")
    an = analysis(phi)
    cone = reachable_cone(an)
    l = certified_addr_len(an)
    assert 2**l >= len(cone)
    # this formula needs three distinct judgments, so one bit cannot be enough
    assert l >= 2
