"""Compile a Sigma1 formula into a program whose stable models are exactly the
formula's refutation soups over a fixed address space.

A soup is a set of addressed disjudgments ``Gamma |/- a`` in which every
question (a context member whose instantiated target matches the goal) is
answered by challenging one of its premise targets.  The program encodes one
disjudgment per bit-string address: environment membership is a free choice
per (subformula instance, address), questions are recognized from goals and
heads, answer choices propagate environments and goals, and a self-blocking
false atom forces every question to receive an answer.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

from .engine import GroundProgram, Model, has_stable_model
from .errors import BudgetExceeded, CapExceeded, CrossCheckError, FormulaError
from .proofs import prove_sigma1
from .syntax import (
    Atom,
    AtomF,
    Clause,
    Forall,
    Formula,
    Impl,
    MintsClass,
    Occurrence,
    Program,
    Term,
    alpha_canon,
    binder_names,
    classify,
    const,
    fmt_atomf,
    fmt_formula,
    formula_constants,
    formula_length,
    formula_predicates,
    free_vars,
    occurrences,
    substitute,
)

DEFAULT_ADDR_LEN_CAP = 4
EMISSION_CAP = 10_000_000
INSTANCE_CAP = 200_000


def _check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded("translation budget exhausted")


# ---------------------------------------------------------------------------
# Signature and question schemas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubgoalInfo:
    index: int  # 1-based premise position
    subgoal: AtomF
    descendants: tuple[int, ...]  # occurrence ids of the premise's own premises
    vars_visible: int


@dataclass(frozen=True)
class QuestionSchema:
    occ: int
    top_vars: tuple[str, ...]
    head: AtomF
    steps: tuple[SubgoalInfo, ...]


@dataclass(frozen=True)
class SoupSignature:
    phi: Formula
    occs: tuple[Occurrence, ...]
    pool: tuple[str, ...]
    n: int  # formula length
    r: int  # maximum predicate arity
    bound_vars: tuple[str, ...]  # all binder names, in preorder
    premises: tuple[int, ...]  # occurrence ids of the top-level premises
    target: AtomF
    env_occs: tuple[int, ...]  # occurrences that can appear in environments
    schemas: dict[int, QuestionSchema]

    def atom_universe(self) -> tuple[AtomF, ...]:
        """All atoms over the signature's names; polynomially many."""
        from .syntax import var

        terms = [const(c) for c in self.pool] + [var(v) for v in self.bound_vars]
        out: list[AtomF] = []
        for pred, arity in sorted(formula_predicates(self.phi).items()):
            for combo in itertools.product(terms, repeat=arity):
                out.append(AtomF(pred, tuple(combo)))
        return tuple(out)


def _freeze(phi: Formula) -> Formula:
    fv = free_vars(phi)
    if fv:
        phi = substitute(phi, {v: const(v) for v in fv})
    return phi


def _question_schema(occs: tuple[Occurrence, ...], idx: int) -> QuestionSchema:
    top_vars: list[str] = []
    steps: list[SubgoalInfo] = []
    cur = idx
    while True:
        f = occs[cur].formula
        if isinstance(f, Forall):
            top_vars.append(f.var)
            cur += 1
        elif isinstance(f, AtomF):
            schema = QuestionSchema(idx, tuple(top_vars), f, tuple(steps))
            _validate_schema(occs, schema)
            return schema
        else:
            assert isinstance(f, Impl)
            sigma = cur + 1
            rhs = sigma + occs[sigma].size
            taus: list[int] = []
            s = sigma
            while isinstance(occs[s].formula, Impl):
                taus.append(s + 1)
                s = s + 1 + occs[s + 1].size
            subgoal = occs[s].formula
            if not isinstance(subgoal, AtomF):
                raise FormulaError(
                    f"premise is not Sigma1: {fmt_formula(occs[sigma].formula)}"
                )
            steps.append(
                SubgoalInfo(len(steps) + 1, subgoal, tuple(taus), len(top_vars))
            )
            cur = rhs


def _validate_schema(occs, schema: QuestionSchema) -> None:
    psi_fv = free_vars(occs[schema.occ].formula)
    for step in schema.steps:
        visible = psi_fv | set(schema.top_vars[: step.vars_visible])
        assert free_vars(step.subgoal) <= visible
        for tau in step.descendants:
            assert free_vars(occs[tau].formula) <= visible
    assert free_vars(schema.head) <= psi_fv | set(schema.top_vars)


def analyze(phi: Formula) -> tuple[SoupSignature, tuple[QuestionSchema, ...]]:
    """Decompose a Sigma1 formula for the soup machinery.

    Returns the signature (domain data, constant pool, sizes) and the question
    schema of every subformula occurrence that can appear in an environment:
    the top-level premises and, transitively, all their premise descendants.
    """
    phi = _freeze(phi)
    if classify(phi) not in (MintsClass.SIGMA1, MintsClass.BOTH):
        raise FormulaError(f"not a Sigma1 formula: {fmt_formula(phi)}")
    occs = occurrences(phi)
    n = formula_length(phi)
    preds = formula_predicates(phi)
    r = max(preds.values(), default=0)
    pool = sorted(formula_constants(phi))
    if not pool:
        fresh = "c0"
        pool = [fresh]
    premises: list[int] = []
    cur = 0
    while isinstance(occs[cur].formula, Impl):
        premises.append(cur + 1)
        cur = cur + 1 + occs[cur + 1].size
    target = occs[cur].formula
    assert isinstance(target, AtomF)
    schemas: dict[int, QuestionSchema] = {}
    worklist = list(premises)
    env_occs: list[int] = []
    while worklist:
        idx = worklist.pop(0)
        if idx in schemas:
            continue
        schema = _question_schema(occs, idx)
        schemas[idx] = schema
        env_occs.append(idx)
        for step in schema.steps:
            worklist.extend(step.descendants)
    sig = SoupSignature(
        phi,
        occs,
        tuple(pool),
        n,
        r,
        tuple(binder_names(phi)),
        tuple(premises),
        target,
        tuple(env_occs),
        schemas,
    )
    return sig, tuple(schemas[i] for i in sig.env_occs)


# ---------------------------------------------------------------------------
# Instance and question tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InstancePattern:
    index: int
    occ: int
    assign: tuple[tuple[str, str], ...]  # variable -> constant, restricted to FV
    formula: Formula
    key: Formula  # alpha-canonical form, the semantic identity


@dataclass(frozen=True)
class AnswerOption:
    index: int  # 1-based premise position
    subgoal: AtomF  # ground subgoal instance
    taus: tuple[int, ...]  # instance indices added to the context


@dataclass(frozen=True)
class QuestionPattern:
    index: int
    inst: int  # instance index of the member psi[S]
    t_assign: tuple[tuple[str, str], ...]
    head: AtomF  # ground head instance
    answers: tuple[AnswerOption, ...]

    def semantic_key(self, analysis: "Analysis") -> tuple:
        inst = analysis.instances[self.inst]
        schema = analysis.sig.schemas[inst.occ]
        t = dict(self.t_assign)
        return (inst.key, tuple(t[v] for v in schema.top_vars))


@dataclass(frozen=True)
class Analysis:
    sig: SoupSignature
    instances: tuple[InstancePattern, ...]
    questions: tuple[QuestionPattern, ...]
    goal_universe: tuple[AtomF, ...]
    initial_instances: tuple[int, ...]  # instance indices of the premises
    initial_keys: frozenset

    def distinct_added_keys(self) -> frozenset:
        keys = {p.key for p in self.instances}
        return frozenset(keys) - self.initial_keys

    def instance_lookup(self) -> dict[tuple[int, tuple], int]:
        return {(p.occ, p.assign): p.index for p in self.instances}


def analysis(phi: Formula, instance_cap: int = INSTANCE_CAP) -> Analysis:
    sig, _ = analyze(phi)
    occs, pool = sig.occs, list(sig.pool)
    instances: list[InstancePattern] = []
    lookup: dict[tuple[int, tuple], int] = {}
    for occ in sig.env_occs:
        fv = sorted(free_vars(occs[occ].formula))
        if len(pool) ** len(fv) + len(instances) > instance_cap:
            raise CapExceeded(
                f"instance table would exceed {instance_cap}", feasible=instance_cap
            )
        for combo in itertools.product(pool, repeat=len(fv)):
            assign = tuple(zip(fv, combo))
            inst_formula = substitute(
                occs[occ].formula, {v: const(c) for v, c in assign}
            )
            p = InstancePattern(
                len(instances), occ, assign, inst_formula, alpha_canon(inst_formula)
            )
            instances.append(p)
            lookup[(occ, assign)] = p.index

    questions: list[QuestionPattern] = []
    goals: set[AtomF] = {sig.target}
    for p in instances:
        schema = sig.schemas[p.occ]
        s_map = {v: const(c) for v, c in p.assign}
        for combo in itertools.product(pool, repeat=len(schema.top_vars)):
            t_assign = tuple(zip(schema.top_vars, combo))
            full = dict(s_map)
            full.update({v: const(c) for v, c in t_assign})
            head = substitute(schema.head, full)
            assert isinstance(head, AtomF) and not free_vars(head)
            answers: list[AnswerOption] = []
            for step in schema.steps:
                subgoal = substitute(step.subgoal, full)
                assert isinstance(subgoal, AtomF) and not free_vars(subgoal)
                taus = []
                for tau_occ in step.descendants:
                    tau_fv = sorted(free_vars(occs[tau_occ].formula))
                    u_assign = tuple(
                        (v, full[v].name) for v in tau_fv
                    )
                    taus.append(lookup[(tau_occ, u_assign)])
                answers.append(AnswerOption(step.index, subgoal, tuple(taus)))
                goals.add(subgoal)
            questions.append(
                QuestionPattern(
                    len(questions), p.index, t_assign, head, tuple(answers)
                )
            )

    initial_instances = []
    for occ in sig.premises:
        fv = sorted(free_vars(occs[occ].formula))
        assert not fv  # top-level premises of a closed formula are closed
        initial_instances.append(lookup[(occ, ())])
    initial_keys = frozenset(instances[i].key for i in initial_instances)
    return Analysis(
        sig,
        tuple(instances),
        tuple(questions),
        tuple(sorted(goals, key=fmt_atomf)),
        tuple(initial_instances),
        initial_keys,
    )


def reachable_cone(
    an: Analysis, cap: int = 200_000, deadline: float | None = None
) -> set[tuple[frozenset, AtomF]]:
    """All judgments reachable from the initial one via minimal answers.

    A judgment is a (context keys, goal) pair; a minimal answer to a question
    extends the context by exactly the instantiated premises of the challenged
    premise and moves to its target.  Every soup can be reshaped to live
    inside this cone, so its size certifies a sufficient address space.
    """
    by_key: dict[Formula, list[QuestionPattern]] = {}
    for q in an.questions:
        by_key.setdefault(an.instances[q.inst].key, []).append(q)
    initial = (an.initial_keys, an.sig.target)
    seen: set[tuple[frozenset, AtomF]] = {initial}
    work = [initial]
    while work:
        _check_deadline(deadline)
        ctx, goal = work.pop()
        for key in ctx:
            for q in by_key.get(key, ()):
                if q.head != goal:
                    continue
                for opt in q.answers:
                    added = frozenset(an.instances[i].key for i in opt.taus)
                    nxt = (ctx | added, opt.subgoal)
                    if nxt not in seen:
                        if len(seen) >= cap:
                            raise CapExceeded(
                                f"judgment cone exceeds {cap}", feasible=cap
                            )
                        seen.add(nxt)
                        work.append(nxt)
    return seen


def certified_addr_len(an: Analysis, deadline: float | None = None) -> int:
    """An address length at which a soup exists whenever one exists at all.

    Every soup can be reshaped into the minimal-answer cone, so addressing
    that cone is complete; the quoted bound n^r (with nullary signatures read
    at arity one) is taken when smaller.
    """
    cone = len(reachable_cone(an, deadline=deadline))
    mine = max(1, math.ceil(math.log2(max(2, cone))))
    paper = an.sig.n ** max(1, an.sig.r)
    return max(1, min(mine, paper))


# ---------------------------------------------------------------------------
# Program emission
# ---------------------------------------------------------------------------


class AtomBuilder:
    """Constructs the translated program's ground atoms from pattern indices.

    Addresses are given as bit strings; substitution blocks are flattened over
    the formula's binder list with irrelevant positions pinned to the first
    pool constant.
    """

    def __init__(self, an: Analysis, names: "_Names", addr_len: int):
        self.an = an
        self.names = names
        self.addr_len = addr_len
        sig = an.sig
        pin = const(names.pin)
        self._bvars = sig.bound_vars

        def block(assign: dict[str, str]) -> tuple[Term, ...]:
            return tuple(
                const(assign[v]) if v in assign else pin for v in self._bvars
            )

        self.inst_args = [
            (names.occ_const(p.occ),) + block(dict(p.assign)) for p in an.instances
        ]
        self.q_args = [
            (names.occ_const(an.instances[q.inst].occ),)
            + block(dict(an.instances[q.inst].assign))
            + block(dict(q.t_assign))
            for q in an.questions
        ]
        self._block = block
        self._addr_cache: dict[str, tuple[Term, ...]] = {}

    def addr(self, bits: str) -> tuple[Term, ...]:
        cached = self._addr_cache.get(bits)
        if cached is None:
            cached = tuple(const(self.names.bits[int(b)]) for b in bits)
            self._addr_cache[bits] = cached
        return cached

    def all_addresses(self) -> list[str]:
        return [
            "".join(bits)
            for bits in itertools.product("01", repeat=self.addr_len)
        ]

    def env_atom(self, inst: int, bits: str) -> Atom:
        return Atom("env", self.inst_args[inst] + self.addr(bits))

    def nenv_atom(self, inst: int, bits: str) -> Atom:
        return Atom("nenv", self.inst_args[inst] + self.addr(bits))

    def q_atom(self, qi: int, bits: str) -> Atom:
        return Atom("q", self.q_args[qi] + self.addr(bits))

    def y_atom(self, qi: int, bits: str) -> Atom:
        return Atom("y", self.q_args[qi] + self.addr(bits))

    def ans_atom(self, i: int, qi: int, bits_from: str, bits_to: str) -> Atom:
        return Atom(f"ans{i}", self.q_args[qi] + self.addr(bits_from) + self.addr(bits_to))

    def nans_atom(self, i: int, qi: int, bits_from: str, bits_to: str) -> Atom:
        return Atom(f"nans{i}", self.q_args[qi] + self.addr(bits_from) + self.addr(bits_to))

    def goal_atom(self, g: AtomF, bits: str) -> Atom:
        return Atom(self.names.goal_pred(g), self.addr(bits))


@dataclass(frozen=True)
class FormulaTranslation:
    phi: Formula
    analysis: Analysis
    addr_len: int
    full_facts: bool
    program: Program
    ground_program: GroundProgram
    counts: dict[str, int]
    names: "_Names"
    builder: AtomBuilder
    syntax_facts: frozenset[Atom]

    @property
    def sig(self) -> SoupSignature:
        return self.analysis.sig

    def header(self) -> str:
        sig = self.sig
        lines = [
            f"% source formula: {fmt_formula(sig.phi)}",
            f"% length n={sig.n}, max arity r={sig.r}, addresses of length {self.addr_len}",
            f"% symbols: f<k> = subformula occurrence k; substitution arguments"
            f" follow the binder order {', '.join(sig.bound_vars) or '(none)'}",
        ]
        for family in sorted(self.counts):
            lines.append(f"% clauses {family}: {self.counts[family]}")
        return "\n".join(lines)


class _Names:
    """Deterministic, collision-free naming for the emitted vocabulary."""

    def __init__(self, an: Analysis):
        sig = an.sig
        pool = set(sig.pool)
        self.occ_prefix = "f"
        while any(_looks_like(c, self.occ_prefix) for c in pool):
            self.occ_prefix += "f"
        self.bits = ("0", "1") if not ({"0", "1"} & pool) else _fresh_bits(pool)
        self.pin = sig.pool[0]
        self.atom_keys: dict[AtomF, str] = {}
        taken: set[str] = set()
        heads = {q.head for q in an.questions}
        for g in sorted(set(an.goal_universe) | heads, key=fmt_atomf):
            key = g.pred.lower() + "".join("_" + t.name for t in g.args)
            while key in taken:
                key += "_"
            taken.add(key)
            self.atom_keys[g] = key

    def occ_const(self, occ: int) -> Term:
        return const(f"{self.occ_prefix}{occ}")

    def goal_pred(self, g: AtomF) -> str:
        return "goal_" + self.atom_keys[g]

    def head_pred(self, g: AtomF) -> str:
        return "hd_" + self.atom_keys[g]

    def subgoal_pred(self, i: int, g: AtomF) -> str:
        return f"sg{i}_" + self.atom_keys[g]


def _looks_like(name: str, prefix: str) -> bool:
    return name.startswith(prefix) and name[len(prefix):].isdigit()


def _fresh_bits(pool: set[str]) -> tuple[str, str]:
    b = "b"
    while {b + "0", b + "1"} & pool:
        b += "b"
    return (b + "0", b + "1")


def estimate_emission(an: Analysis, addr_len: int, full_facts: bool = False) -> int:
    a = 2**addr_len
    n_inst = len(an.instances)
    goal_set = set(an.goal_universe)
    active = [q for q in an.questions if q.head in goal_set]
    ans_pairs = sum(len(q.answers) for q in active) * a * a
    total = 0
    # facts 1-3
    for q in an.questions:
        k = len(q.answers)
        taus = sum(len(opt.taus) for opt in q.answers)
        mult = 1
        if full_facts:
            inst = an.instances[q.inst]
            schema = an.sig.schemas[inst.occ]
            irrelevant = (
                2 * len(an.sig.bound_vars)
                - len(inst.assign)
                - len(schema.top_vars)
            )
            mult = len(an.sig.pool) ** irrelevant
        total += (taus + k + 1) * mult
    total += 1 + len(an.initial_instances) + (n_inst - len(an.initial_instances))
    total += ans_pairs * (n_inst + 1 + 1 + 2 + 1)  # families 7, 8-ish, 9, 12, 15
    total += n_inst * a * 3  # families 10, 11
    total += len(active) * a * 2  # families 13, 14
    g = len(an.goal_universe)
    total += (g * (g - 1) // 2) * a  # family 16
    return total


def translate(
    phi: Formula,
    addr_len: int | None = None,
    full_facts: bool = False,
    emission_cap: int = EMISSION_CAP,
    deadline: float | None = None,
    an: Analysis | None = None,
) -> FormulaTranslation:
    """Emit the ground program for ``phi`` over addresses of length ``addr_len``.

    Any address length is sound (a stable model yields a soup); completeness
    holds from ``certified_addr_len`` up.  The default is the capped length
    ``min(certified, 4)``.
    """
    if an is None:
        an = analysis(phi)
    if addr_len is None:
        addr_len = min(certified_addr_len(an), DEFAULT_ADDR_LEN_CAP)
    if addr_len < 1:
        raise FormulaError("address length must be at least 1")
    est = estimate_emission(an, addr_len, full_facts)
    if est > emission_cap:
        feasible = None
        for l in range(addr_len - 1, 0, -1):
            if estimate_emission(an, l, full_facts) <= emission_cap:
                feasible = l
                break
        raise CapExceeded(
            f"emission of ~{est} clauses exceeds the cap {emission_cap} "
            f"at address length {addr_len}",
            feasible=feasible,
        )
    names = _Names(an)
    sig = an.sig
    pool = sig.pool
    bvars = sig.bound_vars
    occs = sig.occs
    b = AtomBuilder(an, names, addr_len)

    addresses = b.all_addresses()
    zero_bits = addresses[0]

    env, nenv = b.env_atom, b.nenv_atom
    q_atom, y_atom = b.q_atom, b.y_atom
    ans, nans = b.ans_atom, b.nans_atom
    goal_atom = b.goal_atom
    q_args = b.q_args

    def block(assign: dict[str, str]) -> tuple[Term, ...]:
        return b._block(assign)

    f_atom = Atom("f")
    not_f = Atom("f", (), True)

    clauses: list[Clause] = []
    counts: dict[str, int] = {}
    syntax_facts: set[Atom] = set()

    def emit(family: str, clause: Clause) -> None:
        clauses.append(clause)
        counts[family] = counts.get(family, 0) + 1
        if family[:2] in ("01", "02", "03"):
            syntax_facts.add(clause.head)
        if len(clauses) % 4096 == 0:
            _check_deadline(deadline)

    goal_set = set(an.goal_universe)
    active = [q for q in an.questions if q.head in goal_set]

    # families 1-3: syntax facts (descendants, subgoals, heads)
    def filled_blocks(p: InstancePattern, t_assign) -> list[tuple[dict, dict]]:
        if not full_facts:
            return [(dict(p.assign), dict(t_assign))]
        schema = sig.schemas[p.occ]
        s_rel = {v for v, _ in p.assign}
        t_rel = set(schema.top_vars)
        s_free = [v for v in bvars if v not in s_rel]
        t_free = [v for v in bvars if v not in t_rel]
        out = []
        for s_fill in itertools.product(pool, repeat=len(s_free)):
            for t_fill in itertools.product(pool, repeat=len(t_free)):
                s = dict(p.assign)
                s.update(zip(s_free, s_fill))
                t = dict(t_assign)
                t.update(zip(t_free, t_fill))
                out.append((s, t))
        return out

    for q in an.questions:
        p = an.instances[q.inst]
        for s_map, t_map in filled_blocks(p, q.t_assign):
            s_blk, t_blk = block(s_map), block(t_map)
            base_args = (names.occ_const(p.occ),) + s_blk + t_blk
            for opt in q.answers:
                for tau_idx in opt.taus:
                    tau = an.instances[tau_idx]
                    u_blk = block(dict(tau.assign))
                    emit(
                        "01_descendant",
                        Clause(
                            Atom(
                                f"di{opt.index}",
                                (names.occ_const(tau.occ), names.occ_const(p.occ))
                                + s_blk
                                + t_blk
                                + u_blk,
                            )
                        ),
                    )
                emit(
                    "02_subgoal",
                    Clause(Atom(names.subgoal_pred(opt.index, opt.subgoal), base_args)),
                )
            emit("03_head", Clause(Atom(names.head_pred(q.head), base_args)))

    # families 4-6: the initial judgment at address 0...0
    emit("04_initial_goal", Clause(goal_atom(sig.target, zero_bits)))
    initial_set = set(an.initial_instances)
    for i in an.initial_instances:
        emit("05_initial_env", Clause(env(i, zero_bits)))
    for p in an.instances:
        if p.index not in initial_set:
            emit("06_initial_nenv", Clause(nenv(p.index, zero_bits)))

    # families 7-9: answers propagate environments and set goals
    for q in active:
        qi = q.index
        for opt in q.answers:
            for a_from in addresses:
                for a_to in addresses:
                    a_atom = ans(opt.index, qi, a_from, a_to)
                    for p in an.instances:
                        emit(
                            "07_env_propagation",
                            Clause(
                                env(p.index, a_to),
                                (a_atom, env(p.index, a_from)),
                            ),
                        )
                    for tau_idx in opt.taus:
                        tau = an.instances[tau_idx]
                        d_atom = Atom(
                            f"di{opt.index}",
                            (
                                names.occ_const(tau.occ),
                                names.occ_const(an.instances[q.inst].occ),
                            )
                            + q_args[qi][1:]
                            + block(dict(tau.assign)),
                        )
                        emit(
                            "08_env_descendants",
                            Clause(env(tau_idx, a_to), (a_atom, d_atom)),
                        )
                    emit(
                        "09_goal_of_answer",
                        Clause(
                            goal_atom(opt.subgoal, a_to),
                            (
                                a_atom,
                                Atom(
                                    names.subgoal_pred(opt.index, opt.subgoal),
                                    q_args[qi],
                                ),
                            ),
                        ),
                    )

    # families 10-11: environment choice and its exclusivity
    for p in an.instances:
        for addr in addresses:
            e, ne = env(p.index, addr), nenv(p.index, addr)
            emit("10_env_choice", Clause(e, (ne.negate(),)))
            emit("10_env_choice", Clause(ne, (e.negate(),)))
            emit("11_env_conflict", Clause(f_atom, (e, ne, not_f)))

    # family 12: answer choice, guarded by the question
    for q in active:
        for opt in q.answers:
            for a_from in addresses:
                guard = q_atom(q.index, a_from)
                for a_to in addresses:
                    a_atom = ans(opt.index, q.index, a_from, a_to)
                    na_atom = nans(opt.index, q.index, a_from, a_to)
                    emit("12_answer_choice", Clause(a_atom, (na_atom.negate(), guard)))
                    emit("12_answer_choice", Clause(na_atom, (a_atom.negate(), guard)))

    # families 13-15: question recognition and the everything-answered rule
    for q in active:
        head_pred = names.head_pred(q.head)
        for addr in addresses:
            emit(
                "13_question",
                Clause(
                    q_atom(q.index, addr),
                    (
                        env(q.inst, addr),
                        Atom(head_pred, q_args[q.index]),
                        goal_atom(q.head, addr),
                    ),
                ),
            )
            emit(
                "14_must_answer",
                Clause(
                    f_atom,
                    (y_atom(q.index, addr).negate(), q_atom(q.index, addr), not_f),
                ),
            )
        for opt in q.answers:
            for a_from in addresses:
                for a_to in addresses:
                    emit(
                        "15_answered",
                        Clause(
                            y_atom(q.index, a_from),
                            (ans(opt.index, q.index, a_from, a_to),),
                        ),
                    )

    # family 16: at most one goal per address
    for g1, g2 in itertools.combinations(an.goal_universe, 2):
        for addr in addresses:
            emit(
                "16_unique_goal",
                Clause(f_atom, (goal_atom(g1, addr), goal_atom(g2, addr), not_f)),
            )

    domain = {names.bits[0], names.bits[1]}
    domain.update(pool)
    for occ in range(len(occs)):
        domain.add(f"{names.occ_prefix}{occ}")
    program = Program(tuple(clauses), frozenset(domain))
    occurring = {a.positive() for c in clauses for a in c.atoms()}
    gp = GroundProgram(tuple(clauses), frozenset(occurring))
    return FormulaTranslation(
        sig.phi, an, addr_len, full_facts, program, gp, counts, names, b,
        frozenset(syntax_facts),
    )


# ---------------------------------------------------------------------------
# The decision procedure by translation
# ---------------------------------------------------------------------------


def _answers_first(a: Atom) -> int:
    """Branch the contradiction atom first (activating constraint propagation),
    then answer selection, and the free environment choices last."""
    if a.pred == "f":
        return 0
    if a.pred == "y" or a.pred.startswith(("ans", "nans")):
        return 1
    return 2


@dataclass(frozen=True)
class TranslationVerdict:
    refutable: bool
    addr_len: int
    witness: Model | None
    clause_count: int

    @property
    def provable(self) -> bool:
        return not self.refutable


def decide_by_translation(
    phi: Formula,
    deadline: float | None = None,
    emission_cap: int = EMISSION_CAP,
    cross_check: bool = True,
) -> TranslationVerdict:
    """Refutability of ``phi`` via stable-model existence of its program.

    Uses the full (certified) address length, and asserts the verdict against
    direct proof search unless ``cross_check`` is disabled.
    """
    an = analysis(phi)
    addr_len = certified_addr_len(an, deadline=deadline)
    t = translate(
        phi, addr_len=addr_len, emission_cap=emission_cap, deadline=deadline, an=an
    )
    witness = has_stable_model(
        t.ground_program, deadline=deadline, branch_priority=_answers_first
    )
    refutable = witness is not None
    if cross_check:
        cert = prove_sigma1(phi, deadline=deadline)
        if (cert is None) != refutable:
            raise CrossCheckError(
                f"translation says refutable={refutable} but proof search "
                f"says provable={cert is not None} for {fmt_formula(phi)}"
            )
    return TranslationVerdict(refutable, addr_len, witness, len(t.program.clauses))
