"""Shared syntax: logic programs, minimal predicate-logic formulas, Mints classes.

Programs are finite clause sets over a finite constant domain.  Formulas use
only implication and universal quantification.  Everything here is immutable;
all operations are pure functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping

from .errors import ArityError, FormulaError

# Identifiers that start with one of these letters are clause variables in
# program syntax; every other identifier in term position is a constant.
PROGRAM_VARIABLE_PREFIXES = ("u", "v", "w", "x", "y", "z")


def is_program_variable_name(name: str) -> bool:
    return name[:1] in PROGRAM_VARIABLE_PREFIXES


# ---------------------------------------------------------------------------
# Terms and program syntax
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True, order=True)
class Term:
    name: str
    var: bool = False

    @property
    def kind(self) -> str:
        return "variable" if self.var else "constant"

    def __str__(self) -> str:
        return self.name


def const(name: str) -> Term:
    return Term(name, False)


def var(name: str) -> Term:
    return Term(name, True)


@dataclass(frozen=True, slots=True, order=True)
class Atom:
    """A predicate applied to terms; ``negated`` marks body occurrences ``not a``."""

    pred: str
    args: tuple[Term, ...] = ()
    negated: bool = False

    @property
    def arity(self) -> int:
        return len(self.args)

    def positive(self) -> "Atom":
        return Atom(self.pred, self.args) if self.negated else self

    def negate(self) -> "Atom":
        return Atom(self.pred, self.args, not self.negated)

    def is_ground(self) -> bool:
        return all(not t.var for t in self.args)

    def variables(self) -> set[str]:
        return {t.name for t in self.args if t.var}

    def constants(self) -> set[str]:
        return {t.name for t in self.args if not t.var}

    def apply(self, binding: Mapping[str, str]) -> "Atom":
        args = tuple(
            const(binding[t.name]) if t.var and t.name in binding else t
            for t in self.args
        )
        return Atom(self.pred, args, self.negated)

    def __str__(self) -> str:
        body = self.pred if not self.args else (
            self.pred + "(" + ",".join(t.name for t in self.args) + ")"
        )
        return ("not " + body) if self.negated else body


@dataclass(frozen=True, slots=True)
class Clause:
    head: Atom
    body: tuple[Atom, ...] = ()

    def __post_init__(self) -> None:
        if self.head.negated:
            raise FormulaError(f"clause head must be positive: {self.head}")

    def atoms(self) -> Iterator[Atom]:
        yield self.head
        yield from self.body

    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.atoms():
            out |= a.variables()
        return out

    def constants(self) -> set[str]:
        out: set[str] = set()
        for a in self.atoms():
            out |= a.constants()
        return out

    def is_ground(self) -> bool:
        return all(a.is_ground() for a in self.atoms())

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- " + ", ".join(str(a) for a in self.body) + "."


@dataclass(frozen=True, slots=True)
class Program:
    """Clauses plus the finite constant domain (a superset of the constants used)."""

    clauses: tuple[Clause, ...]
    domain: frozenset[str]

    def __post_init__(self) -> None:
        if not self.domain:
            raise FormulaError("program domain must be nonempty")
        used = set()
        for c in self.clauses:
            used |= c.constants()
        missing = used - self.domain
        if missing:
            raise FormulaError(f"constants outside the domain: {sorted(missing)}")

    def predicates(self) -> dict[str, int]:
        """Predicate -> arity symbol table; raises on conflicting arities."""
        table: dict[str, int] = {}
        for c in self.clauses:
            for a in c.atoms():
                old = table.setdefault(a.pred, a.arity)
                if old != a.arity:
                    raise ArityError(
                        f"predicate {a.pred} used with arities {old} and {a.arity}"
                    )
        return table

    def __str__(self) -> str:
        lines = []
        extra = self.domain - {c for cl in self.clauses for c in cl.constants()}
        if extra:
            lines.append("#domain " + ", ".join(sorted(extra)) + ".")
        lines.extend(str(c) for c in self.clauses)
        return "\n".join(lines) + ("\n" if lines else "")


def make_program(clauses: Iterable[Clause], extra_constants: Iterable[str] = ()) -> Program:
    """Build a program whose domain is the used constants plus ``extra_constants``.

    Variable-free programs with no constants at all get a default one-element
    domain, since the domain is irrelevant to them but must be nonempty.
    """
    cl = tuple(clauses)
    used: set[str] = set()
    has_vars = False
    for c in cl:
        used |= c.constants()
        has_vars = has_vars or bool(c.variables())
    dom = used | set(extra_constants)
    if not dom:
        if has_vars:
            raise FormulaError(
                "program has variables but no constants; declare some with #domain"
            )
        dom = {"d0"}
    return Program(cl, frozenset(dom))


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class AtomF(Formula):
    pred: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True, slots=True)
class Impl(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


def impl_chain(premises: Iterable[Formula], target: Formula) -> Formula:
    out = target
    for p in reversed(list(premises)):
        out = Impl(p, out)
    return out


def forall_chain(names: Iterable[str], body: Formula) -> Formula:
    out = body
    for x in reversed(list(names)):
        out = Forall(x, out)
    return out


def formula_length(f: Formula) -> int:
    """Symbol count: predicates, argument occurrences, arrows and quantifiers."""
    total = 0
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, AtomF):
            total += 1 + len(g.args)
        elif isinstance(g, Impl):
            total += 1
            stack.append(g.lhs)
            stack.append(g.rhs)
        elif isinstance(g, Forall):
            total += 1
            stack.append(g.body)
        else:
            raise TypeError(g)
    return total


def free_vars(f: Formula) -> set[str]:
    out: set[str] = set()
    stack: list[tuple[Formula, frozenset[str]]] = [(f, frozenset())]
    while stack:
        g, bound = stack.pop()
        if isinstance(g, AtomF):
            out |= {t.name for t in g.args if t.var and t.name not in bound}
        elif isinstance(g, Impl):
            stack.append((g.lhs, bound))
            stack.append((g.rhs, bound))
        elif isinstance(g, Forall):
            stack.append((g.body, bound | {g.var}))
        else:
            raise TypeError(g)
    return out


def formula_constants(f: Formula) -> set[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, AtomF):
            out |= {t.name for t in g.args if not t.var}
        elif isinstance(g, Impl):
            stack.append(g.lhs)
            stack.append(g.rhs)
        elif isinstance(g, Forall):
            stack.append(g.body)
        else:
            raise TypeError(g)
    return out


def binder_names(f: Formula) -> list[str]:
    """All quantifier variable names, in preorder."""
    out: list[str] = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Impl):
            stack.append(g.rhs)
            stack.append(g.lhs)
        elif isinstance(g, Forall):
            out.append(g.var)
            stack.append(g.body)
    return out


def formula_predicates(f: Formula, table: dict[str, int] | None = None) -> dict[str, int]:
    if table is None:
        table = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, AtomF):
            old = table.setdefault(g.pred, g.arity)
            if old != g.arity:
                raise ArityError(
                    f"predicate {g.pred} used with arities {old} and {g.arity}"
                )
        elif isinstance(g, Impl):
            stack.append(g.lhs)
            stack.append(g.rhs)
        elif isinstance(g, Forall):
            stack.append(g.body)
        else:
            raise TypeError(g)
    return table


def is_rectified(f: Formula) -> bool:
    """No free name also bound, no name bound twice."""
    names = binder_names(f)
    return len(names) == len(set(names)) and not (set(names) & free_vars(f))


def _fresh_name(base: str, taken: set[str]) -> str:
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def rectify(f: Formula) -> Formula:
    """Rename binders so no free name is bound and no name is bound twice.

    Already-rectified formulas come back unchanged, which keeps printing and
    re-parsing stable.  Implication spines are walked iteratively so long
    premise chains do not exhaust the call stack.
    """
    taken = free_vars(f) | formula_constants(f)
    used_binders: set[str] = set()

    def walk(g: Formula, ren: dict[str, str]) -> Formula:
        premises: list[Formula] = []
        binder_runs: list[list[str]] = [[]]
        ren = dict(ren)
        while True:
            if isinstance(g, Forall):
                name = g.var
                if name in taken or name in used_binders:
                    name = _fresh_name("x", taken | used_binders)
                used_binders.add(name)
                if name != g.var:
                    ren[g.var] = name
                else:
                    ren.pop(g.var, None)
                binder_runs[-1].append(name)
                g = g.body
            elif isinstance(g, Impl):
                premises.append(walk(g.lhs, ren))
                binder_runs.append([])
                g = g.rhs
            elif isinstance(g, AtomF):
                args = tuple(
                    var(ren[t.name]) if t.var and t.name in ren else t
                    for t in g.args
                )
                out: Formula = AtomF(g.pred, args)
                for run, prem in zip(
                    reversed(binder_runs), itertools.chain([None], reversed(premises))
                ):
                    if prem is not None:
                        out = Impl(prem, out)
                    out = forall_chain(run, out)
                return out
            else:
                raise TypeError(g)

    return walk(f, {})


def substitute(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution of free variable occurrences."""

    def walk(g: Formula, m: dict[str, Term]) -> Formula:
        premises: list[Formula] = []
        binder_runs: list[list[str]] = [[]]
        while True:
            if not m:
                out = g
                break
            if isinstance(g, Forall):
                m = {k: v for k, v in m.items() if k != g.var}
                name = g.var
                if any(v.var and v.name == name for v in m.values()):
                    fresh = _fresh_name(
                        "x",
                        free_vars(g.body)
                        | {v.name for v in m.values()}
                        | set(binder_names(g.body)),
                    )
                    g = walk(g.body, {name: var(fresh)})
                    name = fresh
                else:
                    g = g.body
                binder_runs[-1].append(name)
            elif isinstance(g, Impl):
                premises.append(walk(g.lhs, m))
                binder_runs.append([])
                g = g.rhs
            elif isinstance(g, AtomF):
                args = tuple(
                    m[t.name] if t.var and t.name in m else t for t in g.args
                )
                out = AtomF(g.pred, args)
                break
            else:
                raise TypeError(g)
        for run, prem in zip(
            reversed(binder_runs), itertools.chain([None], reversed(premises))
        ):
            if prem is not None:
                out = Impl(prem, out)
            out = forall_chain(run, out)
        return out

    return walk(f, dict(mapping))


def alpha_canon(f: Formula) -> Formula:
    """Rename binders to a canonical sequence; alpha-equal formulas coincide."""
    counter = [0]

    def walk(g: Formula, ren: dict[str, str]) -> Formula:
        premises: list[Formula] = []
        binder_runs: list[list[str]] = [[]]
        ren = dict(ren)
        while True:
            if isinstance(g, Forall):
                counter[0] += 1
                name = f"${counter[0]}"
                ren[g.var] = name
                binder_runs[-1].append(name)
                g = g.body
            elif isinstance(g, Impl):
                premises.append(walk(g.lhs, ren))
                binder_runs.append([])
                g = g.rhs
            elif isinstance(g, AtomF):
                args = tuple(
                    var(ren[t.name]) if t.var and t.name in ren else t
                    for t in g.args
                )
                out: Formula = AtomF(g.pred, args)
                break
            else:
                raise TypeError(g)
        for run, prem in zip(
            reversed(binder_runs), itertools.chain([None], reversed(premises))
        ):
            if prem is not None:
                out = Impl(prem, out)
            out = forall_chain(run, out)
        return out

    return walk(f, {})


def alpha_eq(f: Formula, g: Formula) -> bool:
    return alpha_canon(f) == alpha_canon(g)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def fmt_atomf(f: AtomF) -> str:
    if not f.args:
        return f.pred
    return f.pred + "(" + ",".join(t.name for t in f.args) + ")"


def fmt_formula(f: Formula) -> str:
    parts: list[str] = []
    while True:
        if isinstance(f, AtomF):
            parts.append(fmt_atomf(f))
            return "".join(parts)
        if isinstance(f, Impl):
            lhs = fmt_formula(f.lhs)
            if not isinstance(f.lhs, AtomF):
                lhs = f"({lhs})"
            parts.append(f"{lhs} -> ")
            f = f.rhs
        elif isinstance(f, Forall):
            parts.append(f"forall {f.var}. ")
            f = f.body
        else:
            raise TypeError(f)


# ---------------------------------------------------------------------------
# Mints classification and structural decompositions
# ---------------------------------------------------------------------------


class MintsClass(Enum):
    SIGMA1 = "Sigma1"
    PI1 = "Pi1"
    BOTH = "Both"
    NEITHER = "Neither"


def _in_sigma1(f: Formula) -> bool:
    while isinstance(f, Impl):
        if not _in_pi1(f.lhs):
            return False
        f = f.rhs
    return isinstance(f, AtomF)


def _in_pi1(f: Formula) -> bool:
    while True:
        if isinstance(f, AtomF):
            return True
        if isinstance(f, Forall):
            f = f.body
        elif isinstance(f, Impl):
            if not _in_sigma1(f.lhs):
                return False
            f = f.rhs
        else:
            return False


def classify(f: Formula) -> MintsClass:
    s, p = _in_sigma1(f), _in_pi1(f)
    if s and p:
        return MintsClass.BOTH
    if s:
        return MintsClass.SIGMA1
    if p:
        return MintsClass.PI1
    return MintsClass.NEITHER


def peel_sigma1(f: Formula) -> tuple[tuple[Formula, ...], AtomF]:
    """Split ``t1 -> ... -> tq -> c`` into premises and the target atom."""
    if not _in_sigma1(f):
        raise FormulaError(f"not a Sigma1 formula: {fmt_formula(f)}")
    premises: list[Formula] = []
    g = f
    while isinstance(g, Impl):
        premises.append(g.lhs)
        g = g.rhs
    assert isinstance(g, AtomF)
    return tuple(premises), g


@dataclass(frozen=True, slots=True)
class Pi1Step:
    """One premise of a Pi1 formula with the quantifier prefix visible at it."""

    sigma: Formula
    vars_visible: int  # how many top variables are in scope for this premise


@dataclass(frozen=True, slots=True)
class Pi1Scheme:
    """Alternating quantifier blocks and premises, ending in the target atom."""

    top_vars: tuple[str, ...]
    steps: tuple[Pi1Step, ...]
    target: AtomF

    @property
    def premise_count(self) -> int:
        return len(self.steps)

    def subgoal(self, i: int) -> AtomF:
        """Target atom of the i-th premise (1-based)."""
        _, tgt = peel_sigma1(self.steps[i - 1].sigma)
        return tgt

    def descendants(self, i: int) -> tuple[Formula, ...]:
        prem, _ = peel_sigma1(self.steps[i - 1].sigma)
        return prem


def decompose_pi1(f: Formula) -> Pi1Scheme:
    if not _in_pi1(f):
        raise FormulaError(f"not a Pi1 formula: {fmt_formula(f)}")
    top: list[str] = []
    steps: list[Pi1Step] = []
    g = f
    while True:
        while isinstance(g, Forall):
            top.append(g.var)
            g = g.body
        if isinstance(g, AtomF):
            return Pi1Scheme(tuple(top), tuple(steps), g)
        assert isinstance(g, Impl)
        steps.append(Pi1Step(g.lhs, len(top)))
        g = g.rhs


def target_of(f: Formula) -> AtomF:
    """Rightmost atom after peeling premises and quantifiers."""
    cls = classify(f)
    if cls in (MintsClass.SIGMA1, MintsClass.BOTH):
        return peel_sigma1(f)[1]
    if cls is MintsClass.PI1:
        return decompose_pi1(f).target
    raise FormulaError(f"formula is neither Sigma1 nor Pi1: {fmt_formula(f)}")


# ---------------------------------------------------------------------------
# Subformula occurrences
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Occurrence:
    """A subformula occurrence, identified by its preorder index."""

    idx: int
    formula: Formula
    size: int  # node count of the subtree, for index arithmetic


def occurrences(f: Formula) -> tuple[Occurrence, ...]:
    out: list[Occurrence] = []

    def walk(g: Formula) -> int:
        my = len(out)
        out.append(None)  # type: ignore[arg-type]
        if isinstance(g, AtomF):
            size = 1
        elif isinstance(g, Impl):
            size = 1 + walk(g.lhs) + walk(g.rhs)
        elif isinstance(g, Forall):
            size = 1 + walk(g.body)
        else:
            raise TypeError(g)
        out[my] = Occurrence(my, g, size)
        return size

    walk(f)
    return tuple(out)


def child_indices(occs: tuple[Occurrence, ...], idx: int) -> tuple[int, ...]:
    node = occs[idx].formula
    if isinstance(node, AtomF):
        return ()
    if isinstance(node, Forall):
        return (idx + 1,)
    assert isinstance(node, Impl)
    lhs = idx + 1
    return (lhs, lhs + occs[lhs].size)


def atom_to_formula(a: Atom) -> AtomF:
    if a.negated:
        raise FormulaError(f"cannot view a negated atom as a formula: {a}")
    return AtomF(a.pred, a.args)


def formula_to_atom(f: AtomF) -> Atom:
    return Atom(f.pred, f.args)
