"""Lambda proof terms, the type-assignment checker, and Sigma1 proof search.

The search decides judgments ``ctx |- c`` with Pi1 contexts and atomic goals:
pick a context member, instantiate its quantified variables from the constant
pool, and recursively prove the target of every premise.  Contexts only grow
along the recursion, so weakening holds and solved/failed results subsume by
inclusion.  Positive results are found as a least fixpoint: depth-first passes
that treat in-progress judgments as failed are repeated until the solved table
stops growing, which is sound for negative answers as well.

Every positive answer is returned as a long-normal-form certificate that the
checker accepts.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .errors import BudgetExceeded, CapExceeded, FormulaError, ParseError
from .syntax import (
    AtomF,
    Forall,
    Formula,
    Impl,
    MintsClass,
    Pi1Scheme,
    Term,
    alpha_canon,
    alpha_eq,
    classify,
    const,
    decompose_pi1,
    fmt_formula,
    formula_constants,
    free_vars,
    peel_sigma1,
    substitute,
    var,
)

MAX_JUDGMENTS = 200_000


# ---------------------------------------------------------------------------
# Proof terms
# ---------------------------------------------------------------------------


class ProofTerm:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class PVar(ProofTerm):
    name: str


@dataclass(frozen=True, slots=True)
class PAbs(ProofTerm):
    var: str
    annot: Formula
    body: ProofTerm


@dataclass(frozen=True, slots=True)
class OAbs(ProofTerm):
    var: str
    body: ProofTerm


@dataclass(frozen=True, slots=True)
class PApp(ProofTerm):
    fn: ProofTerm
    arg: ProofTerm


@dataclass(frozen=True, slots=True)
class OApp(ProofTerm):
    fn: ProofTerm
    arg: Term


@dataclass(frozen=True)
class Environment:
    """Ordered proof-variable declarations, at most one per variable."""

    decls: tuple[tuple[str, Formula], ...] = ()

    def __post_init__(self) -> None:
        names = [n for n, _ in self.decls]
        if len(names) != len(set(names)):
            raise FormulaError("environment declares a variable twice")

    def lookup(self, name: str) -> Formula | None:
        for n, f in self.decls:
            if n == name:
                return f
        return None

    def bind(self, name: str, f: Formula) -> "Environment":
        kept = tuple((n, g) for n, g in self.decls if n != name)
        return Environment(kept + ((name, f),))

    def formulas(self) -> tuple[Formula, ...]:
        return tuple(f for _, f in self.decls)


@dataclass(frozen=True)
class Judgment:
    """A context of closed Pi1 instances with a ground atomic goal."""

    context: tuple[Formula, ...]
    goal: AtomF

    def __post_init__(self) -> None:
        for f in self.context:
            if classify(f) not in (MintsClass.PI1, MintsClass.BOTH):
                raise FormulaError(
                    f"context member is not Pi1: {fmt_formula(f)}"
                )
        if any(t.var for t in self.goal.args):
            raise FormulaError(f"goal is not ground: {fmt_formula(self.goal)}")


# ---------------------------------------------------------------------------
# Type checking
# ---------------------------------------------------------------------------


class _CheckFailure(Exception):
    def __init__(self, trail: list[str]):
        self.trail = trail
        super().__init__("; ".join(trail))


def infer(env: Environment, term: ProofTerm) -> Formula:
    """Type of ``term`` under ``env``; raises with a diagnostic trail."""
    if isinstance(term, PVar):
        f = env.lookup(term.name)
        if f is None:
            raise _CheckFailure([f"unbound proof variable {term.name}"])
        return f
    if isinstance(term, PAbs):
        body = infer(env.bind(term.var, term.annot), term.body)
        return Impl(term.annot, body)
    if isinstance(term, OAbs):
        for name, f in env.decls:
            if term.var in free_vars(f):
                raise _CheckFailure(
                    [
                        f"eigenvariable violation: {term.var} is free in the "
                        f"declaration of {name}"
                    ]
                )
        body = infer(env, term.body)
        return Forall(term.var, body)
    if isinstance(term, PApp):
        fn = infer(env, term.fn)
        if not isinstance(fn, Impl):
            raise _CheckFailure(
                [f"applied a term of non-implication type {fmt_formula(fn)}"]
            )
        arg = infer(env, term.arg)
        if not alpha_eq(arg, fn.lhs):
            raise _CheckFailure(
                [
                    f"argument type {fmt_formula(arg)} does not match the "
                    f"expected premise {fmt_formula(fn.lhs)}"
                ]
            )
        return fn.rhs
    if isinstance(term, OApp):
        fn = infer(env, term.fn)
        if not isinstance(fn, Forall):
            raise _CheckFailure(
                [f"object-applied a term of non-universal type {fmt_formula(fn)}"]
            )
        return substitute(fn.body, {fn.var: term.arg})
    raise TypeError(term)


def check_explain(
    env: Environment, term: ProofTerm, goal: Formula
) -> tuple[bool, list[str]]:
    try:
        got = infer(env, term)
    except _CheckFailure as e:
        return False, e.trail
    if alpha_eq(got, goal):
        return True, []
    return False, [
        f"term has type {fmt_formula(got)} but the goal is {fmt_formula(goal)}"
    ]


def check(env: Environment, term: ProofTerm, goal: Formula) -> bool:
    return check_explain(env, term, goal)[0]


def is_lnf(env: Environment, term: ProofTerm, typ: Formula) -> bool:
    """The long-normal-form predicate, evaluated structurally against ``typ``."""
    if isinstance(typ, Forall):
        if not isinstance(term, OAbs):
            return False
        body_typ = substitute(typ.body, {typ.var: var(term.var)})
        return is_lnf(env, term.body, body_typ)
    if isinstance(typ, Impl):
        if not isinstance(term, PAbs):
            return False
        return is_lnf(env.bind(term.var, term.annot), term.body, typ.rhs)
    # atom type: the term must be a head variable applied to lnf arguments
    spine: list[ProofTerm | Term] = []
    head = term
    while isinstance(head, (PApp, OApp)):
        spine.append(head.arg)
        head = head.fn
    if not isinstance(head, PVar):
        return False
    head_typ = env.lookup(head.name)
    if head_typ is None:
        return False
    for arg in reversed(spine):
        if isinstance(arg, Term):
            if not isinstance(head_typ, Forall):
                return False
            head_typ = substitute(head_typ.body, {head_typ.var: arg})
        else:
            if not isinstance(head_typ, Impl):
                return False
            if not is_lnf(env, arg, head_typ.lhs):
                return False
            head_typ = head_typ.rhs
    return isinstance(head_typ, AtomF)


# ---------------------------------------------------------------------------
# Printing and parsing certificates
# ---------------------------------------------------------------------------


def fmt_term(t: ProofTerm) -> str:
    if isinstance(t, PVar):
        return t.name
    if isinstance(t, PAbs):
        annot = fmt_formula(t.annot)
        if not isinstance(t.annot, AtomF):
            annot = f"({annot})"
        return f"\\{t.var}:{annot}. {fmt_term(t.body)}"
    if isinstance(t, OAbs):
        return f"\\{t.var}. {fmt_term(t.body)}"
    # application spine, left associated
    parts: list[str] = []
    head = t
    while isinstance(head, (PApp, OApp)):
        arg = head.arg
        if isinstance(arg, Term):
            parts.append(arg.name)
        elif isinstance(arg, PVar):
            parts.append(arg.name)
        else:
            parts.append(f"({fmt_term(arg)})")
        head = head.fn
    if isinstance(head, PVar):
        parts.append(head.name)
    else:
        parts.append(f"({fmt_term(head)})")
    return " ".join(reversed(parts))


def parse_term(text: str) -> ProofTerm:
    from .parsing import _Cursor, tokenize

    cur = _Cursor(tokenize(text))

    def parse_abs(bound_obj: tuple[str, ...]) -> ProofTerm:
        if cur.at("\\"):
            cur.next()
            name = cur.expect_ident("binder")
            if cur.at(":"):
                if not name.value[0].isupper():
                    raise ParseError(
                        "proof variables start uppercase", name.line, name.col
                    )
                cur.next()
                annot = _parse_annot(bound_obj)
                cur.expect(".")
                return PAbs(name.value, annot, parse_abs(bound_obj))
            if name.value[0].isupper():
                raise ParseError(
                    "object variables start lowercase", name.line, name.col
                )
            cur.expect(".")
            return OAbs(name.value, parse_abs(bound_obj + (name.value,)))
        return parse_app(bound_obj)

    def _parse_annot(bound_obj: tuple[str, ...]) -> Formula:
        from .parsing import _parse_formula, _parse_formula_unit

        if cur.at("("):
            cur.next()
            f = _parse_formula(cur, bound_obj, {})
            cur.expect(")")
            return f
        return _parse_formula_unit(cur, bound_obj, {})

    def parse_app(bound_obj: tuple[str, ...]) -> ProofTerm:
        out = parse_atom(bound_obj)
        while True:
            if cur.at("("):
                cur.next()
                arg = parse_abs(bound_obj)
                cur.expect(")")
                out = PApp(out, arg)
            elif cur.at_ident():
                tok = cur.next()
                if tok.value[0].isupper():
                    out = PApp(out, PVar(tok.value))
                elif tok.value in bound_obj:
                    out = OApp(out, var(tok.value))
                else:
                    out = OApp(out, const(tok.value))
            else:
                return out

    def parse_atom(bound_obj: tuple[str, ...]) -> ProofTerm:
        if cur.at("("):
            cur.next()
            t = parse_abs(bound_obj)
            cur.expect(")")
            return t
        tok = cur.expect_ident("proof variable")
        if not tok.value[0].isupper():
            raise ParseError(
                f"expected a proof variable, found {tok.value!r}", tok.line, tok.col
            )
        return PVar(tok.value)

    t = parse_abs(())
    tail = cur.peek()
    if tail.kind != "eof":
        raise ParseError(f"trailing input after term: {tail.value!r}", tail.line, tail.col)
    return t


# ---------------------------------------------------------------------------
# Proof search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Entry:
    index: int
    formula: Formula
    scheme: Pi1Scheme


class _Prover:
    def __init__(
        self,
        base: list[Formula],
        pool: list[Term],
        max_judgments: int,
        deadline: float | None,
    ):
        self.pool = pool
        self.max_judgments = max_judgments
        self.deadline = deadline
        self.entries: dict[Formula, _Entry] = {}
        # predicates that head a non-atomic member; their atoms may be proved
        # by a generation step, all other atoms only by context membership
        self.flexible_preds: set[str] = set()
        self.base_keys: list[Formula] = []
        for f in base:
            key = self.intern(f)
            if key not in self.base_keys:
                self.base_keys.append(key)
        self.base_set = frozenset(self.base_keys)
        # solved[goal] -> list of (added_set, record); insertion order matters
        self.solved: dict[AtomF, list[tuple[frozenset, tuple]]] = {}
        self.failed: dict[AtomF, list[frozenset]] = {}
        self.judgments_seen: set[tuple[frozenset, AtomF]] = set()

    def intern(self, f: Formula) -> Formula:
        key = alpha_canon(f)
        if key not in self.entries:
            cls = classify(f)
            if cls not in (MintsClass.PI1, MintsClass.BOTH):
                raise FormulaError(
                    f"context members must be Pi1 formulas: {fmt_formula(f)}"
                )
            scheme = decompose_pi1(f)
            self.entries[key] = _Entry(len(self.entries), f, scheme)
            if scheme.steps or scheme.top_vars:
                self.flexible_preds.add(scheme.target.pred)
        return key

    # -- matching ----------------------------------------------------------

    @staticmethod
    def _match_atom(
        pattern: AtomF, concrete: AtomF, tv: set[str], binding: dict[str, Term]
    ) -> dict[str, Term] | None:
        """Extend ``binding`` so the pattern becomes the concrete atom."""
        if pattern.pred != concrete.pred or len(pattern.args) != len(concrete.args):
            return None
        out = binding
        for p_arg, c_arg in zip(pattern.args, concrete.args):
            if p_arg.var and p_arg.name in tv:
                old = out.get(p_arg.name)
                if old is None:
                    if out is binding:
                        out = dict(binding)
                    out[p_arg.name] = c_arg
                elif old != c_arg:
                    return None
            elif p_arg != c_arg:
                return None
        return out if out is not binding else dict(binding)

    def instantiations(self, scheme: Pi1Scheme, goal: AtomF, atom_members):
        """Top-variable assignments matching the target against the goal.

        Atomic premises over membership-only predicates are joined against the
        context's atom members, which both binds their variables and prunes
        instantiations that could never be completed.
        """
        binding = self._match_atom(scheme.target, goal, set(scheme.top_vars), {})
        if binding is None:
            return
        tv = set(scheme.top_vars)
        rigid = [
            s.sigma
            for s in scheme.steps
            if isinstance(s.sigma, AtomF) and s.sigma.pred not in self.flexible_preds
        ]

        def join(i: int, b: dict[str, Term]):
            if i == len(rigid):
                rest = [v for v in scheme.top_vars if v not in b]
                for combo in itertools.product(self.pool, repeat=len(rest)):
                    full = dict(b)
                    full.update(zip(rest, combo))
                    yield full
                return
            pattern = rigid[i]
            if all(not (a.var and a.name in tv) or a.name in b for a in pattern.args):
                # fully bound: a bare membership test, no branching
                concrete = AtomF(
                    pattern.pred,
                    tuple(
                        b[a.name] if a.var and a.name in b else a
                        for a in pattern.args
                    ),
                )
                if concrete in atom_members.get(pattern.pred, ()):
                    yield from join(i + 1, b)
                return
            seen: set[tuple] = set()
            for cand in atom_members.get(pattern.pred, ()):
                nb = self._match_atom(pattern, cand, tv, b)
                if nb is not None:
                    sig = tuple(sorted((k, v.name) for k, v in nb.items()))
                    if sig not in seen:
                        seen.add(sig)
                        yield from join(i + 1, nb)

        yield from join(0, binding)

    def attempts(self, added: frozenset, goal: AtomF):
        members = list(self.base_keys)
        members.extend(sorted(added, key=lambda k: self.entries[k].index))
        atom_members: dict[str, set[AtomF]] = {}
        for key in members:
            entry = self.entries[key]
            if isinstance(entry.formula, AtomF):
                atom_members.setdefault(entry.formula.pred, set()).add(entry.formula)
        for key in members:
            entry = self.entries[key]
            for t_assign in self.instantiations(entry.scheme, goal, atom_members):
                child_data = []
                for i in range(1, entry.scheme.premise_count + 1):
                    sigma = substitute(entry.scheme.steps[i - 1].sigma, t_assign)
                    taus, a_i = peel_sigma1(sigma)
                    tau_keys = []
                    for tau in taus:
                        tk = self.intern(tau)
                        tau_keys.append(tk)
                    child_added = added | (
                        frozenset(tau_keys) - self.base_set
                    )
                    child_data.append((taus, tuple(tau_keys), child_added, a_i))
                yield key, t_assign, child_data

    # -- search ------------------------------------------------------------

    def solved_lookup(self, added: frozenset, goal: AtomF):
        for added2, record in self.solved.get(goal, ()):
            if added2 <= added:
                return record
        return None

    def failed_lookup(self, added: frozenset, goal: AtomF) -> bool:
        return any(added <= added2 for added2 in self.failed.get(goal, ()))

    def dfs(self, added: frozenset, goal: AtomF, stack: set) -> bool:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("proof search budget exhausted")
        if self.solved_lookup(added, goal) is not None:
            return True
        if self.failed_lookup(added, goal):
            return False
        j = (added, goal)
        if j in stack:
            return False
        self.judgments_seen.add(j)
        if len(self.judgments_seen) > self.max_judgments:
            raise CapExceeded(
                f"judgment space exceeded {self.max_judgments}",
                feasible=self.max_judgments,
            )
        stack = stack | {j}
        for key, t_assign, child_data in self.attempts(added, goal):
            ok = True
            for _, _, child_added, a_i in child_data:
                if not self.dfs(child_added, a_i, stack):
                    ok = False
                    break
            if ok:
                record = (key, t_assign, child_data)
                self.solved.setdefault(goal, []).append((added, record))
                return True
        self.failed.setdefault(goal, []).append(added)
        return False

    def run(self, goal: AtomF) -> bool:
        added0: frozenset = frozenset()
        while True:
            size_before = sum(len(v) for v in self.solved.values())
            self.failed = {}
            if self.dfs(added0, goal, set()):
                return True
            if sum(len(v) for v in self.solved.values()) == size_before:
                return False

    # -- certificate extraction --------------------------------------------

    def extract(self, added: frozenset, goal: AtomF, names: dict, counter) -> ProofTerm:
        record = self.solved_lookup(added, goal)
        assert record is not None, "extraction requires a solved judgment"
        key, t_assign, child_data = record
        entry = self.entries[key]
        scheme = entry.scheme
        term: ProofTerm = PVar(names[key])
        seen_vars = 0
        for i, step in enumerate(scheme.steps, start=1):
            for v in scheme.top_vars[seen_vars : step.vars_visible]:
                term = OApp(term, t_assign[v])
            seen_vars = step.vars_visible
            taus, tau_keys, child_added, a_i = child_data[i - 1]
            sub_names = dict(names)
            abs_info: list[tuple[str, Formula]] = []
            for tau, tk in zip(taus, tau_keys):
                tau_inst = substitute(tau, t_assign)
                name = f"X{next(counter)}"
                abs_info.append((name, tau_inst))
                sub_names[tk] = name
            body = self.extract(child_added, a_i, sub_names, counter)
            for name, annot in reversed(abs_info):
                body = PAbs(name, annot, body)
            term = PApp(term, body)
        for v in scheme.top_vars[seen_vars:]:
            term = OApp(term, t_assign[v])
        return term


def _freeze_free_vars(f: Formula) -> Formula:
    """Read free variables as constants, the convention for closed search."""
    fv = free_vars(f)
    if not fv:
        return f
    return substitute(f, {v: const(v) for v in fv})


def _constant_pool(formulas: list[Formula]) -> list[Term]:
    names: set[str] = set()
    for f in formulas:
        names |= formula_constants(f)
    if not names:
        names = {"c0"}
    return [const(n) for n in sorted(names)]


def context_environment(ctx) -> Environment:
    """The hypothesis naming ``prove`` uses for free assumptions."""
    decls = []
    seen: dict[Formula, str] = {}
    for i, f in enumerate(ctx, start=1):
        key = alpha_canon(f)
        if key in seen:
            continue
        name = f"H{len(seen) + 1}"
        seen[key] = name
        decls.append((name, f))
    return Environment(tuple(decls))


def prove(
    ctx,
    goal: Formula,
    pool: list[Term] | None = None,
    max_judgments: int = MAX_JUDGMENTS,
    deadline: float | None = None,
) -> ProofTerm | None:
    """A long-normal-form proof of ``goal`` from ``ctx``, or None.

    ``ctx`` members must classify Pi1 or Both; the goal must classify Sigma1
    or Both.  Free proof variables of the result are named as in
    ``context_environment``.
    """
    ctx = [_freeze_free_vars(f) for f in ctx]
    goal = _freeze_free_vars(goal)
    if classify(goal) not in (MintsClass.SIGMA1, MintsClass.BOTH):
        raise FormulaError(f"goal must be a Sigma1 formula: {fmt_formula(goal)}")
    premises, target = peel_sigma1(goal)
    if pool is None:
        pool = _constant_pool(ctx + [goal])
    counter = itertools.count(1)
    peeled_names: list[tuple[str, Formula]] = []
    for p in premises:
        peeled_names.append((f"X{next(counter)}", p))
    prover = _Prover(ctx + [p for _, p in peeled_names], pool, max_judgments, deadline)
    if not prover.run(target):
        return None
    names: dict[Formula, str] = {}
    env = context_environment(ctx)
    for name, f in env.decls:
        names[alpha_canon(f)] = name
    for name, f in peeled_names:
        names[alpha_canon(f)] = name
    term = prover.extract(frozenset(), target, names, counter)
    for name, annot in reversed(peeled_names):
        term = PAbs(name, annot, term)
    return term


def prove_sigma1(
    phi: Formula,
    max_judgments: int = MAX_JUDGMENTS,
    deadline: float | None = None,
) -> ProofTerm | None:
    """A closed long-normal-form proof of the Sigma1 formula ``phi``, or None."""
    if classify(phi) not in (MintsClass.SIGMA1, MintsClass.BOTH):
        raise FormulaError(
            f"prove_sigma1 takes Sigma1 formulas, got {classify(phi).value}"
        )
    return prove([], phi, max_judgments=max_judgments, deadline=deadline)
