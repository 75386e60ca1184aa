from aspsigma.corpus import CorpusSpec, fresh_goal_atom, gen_formulas, gen_programs
from aspsigma.syntax import MintsClass, classify, formula_length


def test_programs_deterministic_and_bounded():
    spec = CorpusSpec(count=80, seed=12)
    a = gen_programs(spec)
    b = gen_programs(spec)
    assert [str(p) for p in a] == [str(p) for p in b]
    for p in a:
        table = p.predicates()
        assert len(table) <= spec.max_predicates + 2  # choice pair may add none
        assert all(arity <= spec.max_arity for arity in table.values())
        assert len(p.domain) <= spec.max_domain + 1  # default domain marker
        assert len(p.clauses) <= spec.max_clauses


def test_formulas_deterministic_and_bounded():
    spec = CorpusSpec(count=60, seed=12, formula_max_size=8)
    a = gen_formulas(spec)
    assert a == gen_formulas(spec)
    for f in a:
        assert formula_length(f) <= 8
        assert classify(f) in (MintsClass.SIGMA1, MintsClass.BOTH)


def test_different_seeds_differ():
    a = gen_programs(CorpusSpec(count=30, seed=1))
    b = gen_programs(CorpusSpec(count=30, seed=2))
    assert [str(p) for p in a] != [str(p) for p in b]


def test_fresh_goal_avoids_program_predicates():
    p = gen_programs(CorpusSpec(count=1, seed=0))[0]
    goal = fresh_goal_atom(p)
    assert goal.pred not in p.predicates()
    assert goal.arity == 0
