"""Stable model semantics: grounding, reducts, fixpoints, enumeration,
entailment, the overline transform, refutation trees and return-free
derivations.

``stable_models`` is a deliberately brute-force subset enumerator so it can
serve as an oracle; ``has_stable_model`` is an exact existence decision that
propagates bounds over the negated atoms and branches only where forced, which
scales to the large ground programs produced by the formula translation.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .errors import BudgetExceeded, CapExceeded, FormulaError
from .syntax import Atom, Clause, Program, const

Model = frozenset[Atom]

GROUND_CAP = 10**6
ENUM_CAP = 22


def _check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded("wall-clock budget exhausted")


# ---------------------------------------------------------------------------
# Grounding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroundProgram:
    clauses: tuple[Clause, ...]
    base: frozenset[Atom]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_compiled", None)

    def compiled(self) -> "_Compiled":
        c = getattr(self, "_compiled")
        if c is None:
            c = _Compiled(self.clauses)
            object.__setattr__(self, "_compiled", c)
        return c


def program_base(p: Program) -> frozenset[Atom]:
    atoms: set[Atom] = set()
    dom = sorted(p.domain)
    for pred, arity in sorted(p.predicates().items()):
        for combo in itertools.product(dom, repeat=arity):
            atoms.add(Atom(pred, tuple(const(c) for c in combo)))
    return frozenset(atoms)


def ground(p: Program, cap: int = GROUND_CAP) -> GroundProgram:
    """All substitution instances of the clauses over the program domain."""
    dom = sorted(p.domain)
    out: list[Clause] = []
    seen: set[Clause] = set()
    count = 0
    for clause in p.clauses:
        cvars = sorted(clause.variables())
        n_inst = len(dom) ** len(cvars)
        count += n_inst
        if count > cap:
            raise CapExceeded(
                f"grounding would exceed {cap} clauses", feasible=cap
            )
        for combo in itertools.product(dom, repeat=len(cvars)):
            binding = dict(zip(cvars, combo))
            g = Clause(
                clause.head.apply(binding),
                tuple(a.apply(binding) for a in clause.body),
            )
            if g not in seen:
                seen.add(g)
                out.append(g)
    return GroundProgram(tuple(out), program_base(p))


def _as_ground(p: Program | GroundProgram) -> GroundProgram:
    return p if isinstance(p, GroundProgram) else ground(p)


# ---------------------------------------------------------------------------
# Compiled clause form for fast fixpoints
# ---------------------------------------------------------------------------


class _Compiled:
    """Integer-indexed clause arrays with Dowling-Gallier style derivation."""

    def __init__(self, clauses: tuple[Clause, ...]):
        self.atom_ids: dict[Atom, int] = {}
        self.atoms: list[Atom] = []

        def intern(a: Atom) -> int:
            a = a.positive()
            i = self.atom_ids.get(a)
            if i is None:
                i = len(self.atoms)
                self.atom_ids[a] = i
                self.atoms.append(a)
            return i

        self.heads: list[int] = []
        self.pos: list[tuple[int, ...]] = []
        self.neg: list[tuple[int, ...]] = []
        for c in clauses:
            self.heads.append(intern(c.head))
            self.pos.append(tuple(intern(a) for a in c.body if not a.negated))
            self.neg.append(tuple(intern(a) for a in c.body if a.negated))
        self.n_atoms = len(self.atoms)
        self.watch: list[list[int]] = [[] for _ in range(self.n_atoms)]
        for ci, body in enumerate(self.pos):
            for a in set(body):
                self.watch[a].append(ci)
        # positive-body counts use distinct atoms so the watch lists fire once
        self.pos_need: list[int] = [len(set(b)) for b in self.pos]
        self.neg_sets: list[frozenset[int]] = [frozenset(ns) for ns in self.neg]

    def lfp(
        self,
        usable: list[bool],
        seeds: set[int] | None = None,
        excluded: set[int] | None = None,
    ) -> set[int]:
        """Least model of the positive parts of the usable clauses.

        ``seeds`` are taken as given facts; atoms in ``excluded`` are never
        derived (and so never feed positive bodies).
        """
        counts = self.pos_need[:]
        derived: set[int] = set(seeds or ())
        queue: list[int] = list(derived)
        for ci in range(len(self.heads)):
            if usable[ci] and counts[ci] == 0:
                h = self.heads[ci]
                if h not in derived and (excluded is None or h not in excluded):
                    derived.add(h)
                    queue.append(h)
        while queue:
            a = queue.pop()
            for ci in self.watch[a]:
                counts[ci] -= 1
                if counts[ci] == 0 and usable[ci]:
                    h = self.heads[ci]
                    if h not in derived and (excluded is None or h not in excluded):
                        derived.add(h)
                        queue.append(h)
        return derived

    def usable_for_model(self, model_ids: set[int]) -> list[bool]:
        return [not (ns & model_ids) for ns in self.neg_sets]

    def model_ids(self, m: Model) -> set[int]:
        return {self.atom_ids[a] for a in m if a in self.atom_ids}

    def ids_to_atoms(self, ids: set[int]) -> frozenset[Atom]:
        return frozenset(self.atoms[i] for i in ids)


# ---------------------------------------------------------------------------
# Reduct, interpretation, stability
# ---------------------------------------------------------------------------


def reduct(g: GroundProgram, m: Model) -> GroundProgram:
    """The negation-free transform relative to ``m``."""
    out: list[Clause] = []
    for c in g.clauses:
        if any(a.negated and a.positive() in m for a in c.body):
            continue
        out.append(Clause(c.head, tuple(a for a in c.body if not a.negated)))
    return GroundProgram(tuple(out), g.base)


def interpretation(p: Program | GroundProgram, m: Model) -> Model:
    """Least fixpoint of the one-step consequence operator of the reduct."""
    g = _as_ground(p)
    comp = g.compiled()
    usable = comp.usable_for_model(comp.model_ids(m))
    return comp.ids_to_atoms(comp.lfp(usable))


def is_stable(p: Program | GroundProgram, m: Model) -> bool:
    return frozenset(m) == interpretation(p, m)


def stable_models(
    p: Program | GroundProgram,
    cap: int = ENUM_CAP,
    deadline: float | None = None,
) -> tuple[Model, ...]:
    """All stable models, by exhaustive subset enumeration over the base."""
    g = _as_ground(p)
    base = sorted(g.base)
    if len(base) > cap:
        raise CapExceeded(
            f"base has {len(base)} atoms, beyond the enumeration cap {cap}",
            feasible=cap,
        )
    comp = g.compiled()
    base_ids = [comp.atom_ids.get(a) for a in base]
    found: list[Model] = []
    for k, bits in enumerate(itertools.product((False, True), repeat=len(base))):
        if deadline is not None and k % 1024 == 0:
            _check_deadline(deadline)
        m_atoms = frozenset(a for a, b in zip(base, bits) if b)
        m_ids = {i for i, b in zip(base_ids, bits) if b and i is not None}
        derived = comp.lfp(comp.usable_for_model(m_ids))
        if comp.ids_to_atoms(derived) == m_atoms:
            found.append(m_atoms)
    found.sort(key=lambda m: (len(m), sorted(str(a) for a in m)))
    return tuple(found)


def sms_entails(
    p: Program | GroundProgram,
    a: Atom,
    cap: int = ENUM_CAP,
    deadline: float | None = None,
) -> bool:
    """True when every stable model satisfies ``a`` (vacuously if none exists)."""
    if a.negated or not a.is_ground():
        raise FormulaError(f"entailment queries take positive ground atoms: {a}")
    return all(a in m for m in stable_models(p, cap=cap, deadline=deadline))


# ---------------------------------------------------------------------------
# Existence decision by propagation and branching
# ---------------------------------------------------------------------------


def has_stable_model(
    p: Program | GroundProgram,
    deadline: float | None = None,
    branch_priority=None,
) -> Model | None:
    """An exact stable-model existence check returning a witness.

    The search assigns truth values only to atoms that occur negated.  A
    partial assignment yields a lower fixpoint (clauses whose negative bodies
    are all assigned false, seeded with the true-assigned atoms) and an upper
    fixpoint (clauses whose negative bodies are not assigned true, with
    false-assigned atoms underivable); conflicts prune, entailed literals
    propagate, and complete assignments are verified with the plain
    reduct-fixpoint check, so every answer is exact.

    ``branch_priority`` optionally maps an Atom to a sort key deciding which
    unassigned atoms to branch on first.
    """
    g = _as_ground(p)
    comp = g.compiled()
    neg_atoms = sorted({a for ns in comp.neg_sets for a in ns})
    if branch_priority is not None:
        neg_atoms.sort(key=lambda a: (branch_priority(comp.atoms[a]), a))
    UNKNOWN, TRUE, FALSE = 0, 1, 2

    def lower_upper(assign: dict[int, int]) -> tuple[set[int], set[int]]:
        sure = [True] * len(comp.heads)
        poss = [True] * len(comp.heads)
        for ci, ns in enumerate(comp.neg_sets):
            for a in ns:
                v = assign[a]
                if v != FALSE:
                    sure[ci] = False
                if v == TRUE:
                    poss[ci] = False
                    break
        seeds = {a for a, v in assign.items() if v == TRUE}
        excluded = {a for a, v in assign.items() if v == FALSE}
        return comp.lfp(sure, seeds), comp.lfp(poss, None, excluded)

    clauses_by_head: dict[int, list[int]] = {}
    for ci, h in enumerate(comp.heads):
        clauses_by_head.setdefault(h, []).append(ci)

    def propagate(assign: dict[int, int]) -> tuple[set[int], set[int]] | None:
        while True:
            _check_deadline(deadline)
            lower, upper = lower_upper(assign)
            changed = False
            for a in neg_atoms:
                v = assign[a]
                inl, inu = a in lower, a in upper
                if v == TRUE and not inu:
                    return None
                if v == FALSE and inl:
                    return None
                if v == UNKNOWN:
                    if inl:
                        assign[a] = TRUE
                        changed = True
                    elif not inu:
                        assign[a] = FALSE
                        changed = True
            # a clause whose head is excluded must not fire: if its positive
            # body is already certain, the one open negative literal is forced
            for a in neg_atoms:
                if assign[a] != FALSE:
                    continue
                for ci in clauses_by_head.get(a, ()):
                    if not all(b in lower for b in comp.pos[ci]):
                        continue
                    open_negs = [
                        b for b in comp.neg_sets[ci] if assign[b] == UNKNOWN
                    ]
                    if len(open_negs) == 1 and all(
                        assign[b] == FALSE
                        for b in comp.neg_sets[ci]
                        if b != open_negs[0]
                    ):
                        if assign[open_negs[0]] == UNKNOWN:
                            assign[open_negs[0]] = TRUE
                            changed = True
            if not changed:
                return lower, upper

    def leaf_model(assign: dict[int, int]) -> Model | None:
        usable = [
            all(assign[a] == FALSE for a in ns) for ns in comp.neg_sets
        ]
        derived = comp.lfp(usable)
        for a in neg_atoms:
            if (a in derived) != (assign[a] == TRUE):
                return None
        return comp.ids_to_atoms(derived)

    def choose(assign, lower, upper) -> tuple[int, tuple[int, int]] | None:
        # a true-assigned atom that is not yet derivable needs a support
        # clause; decide one of the open literals in a candidate support first
        for t in neg_atoms:
            if assign[t] != TRUE or t in lower:
                continue
            for ci in clauses_by_head.get(t, ()):
                if any(assign[b] == TRUE for b in comp.neg_sets[ci]):
                    continue
                if not all(b in upper for b in comp.pos[ci]):
                    continue
                for b in comp.pos[ci]:
                    if b in assign and assign[b] == UNKNOWN:
                        return b, (TRUE, FALSE)
                for b in comp.neg_sets[ci]:
                    if assign[b] == UNKNOWN:
                        return b, (FALSE, TRUE)
        pick = next((a for a in neg_atoms if assign[a] == UNKNOWN), None)
        if pick is None:
            return None
        return pick, (FALSE, TRUE)

    def search(assign: dict[int, int]) -> Model | None:
        bounds = propagate(assign)
        if bounds is None:
            return None
        choice = choose(assign, *bounds)
        if choice is None:
            return leaf_model(assign)
        pick, values = choice
        for value in values:
            child = dict(assign)
            child[pick] = value
            found = search(child)
            if found is not None:
                return found
        return None

    return search({a: UNKNOWN for a in neg_atoms})


# ---------------------------------------------------------------------------
# Overline transform and Horn derivability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OverlineProgram:
    """The ground program with negative atoms replaced by fresh bar predicates."""

    program: GroundProgram
    bar_names: dict[str, str]
    source_base: frozenset[Atom]

    def bar(self, a: Atom) -> Atom:
        return Atom(self.bar_names[a.pred], a.args)

    def complement(self, m: Model) -> frozenset[Atom]:
        """The bar-atoms of everything in the base that is missing from ``m``."""
        return frozenset(self.bar(b) for b in self.source_base - m)


def overline(p: Program | GroundProgram) -> OverlineProgram:
    g = _as_ground(p)
    preds = {a.pred for c in g.clauses for a in c.atoms()} | {
        a.pred for a in g.base
    }
    bar_names: dict[str, str] = {}
    for name in sorted(preds):
        candidate = name + "_bar"
        while candidate in preds or candidate in bar_names.values():
            candidate += "_"
        bar_names[name] = candidate
    out = []
    for c in g.clauses:
        body = tuple(
            Atom(bar_names[a.pred], a.args) if a.negated else a for a in c.body
        )
        out.append(Clause(c.head, body))
    barred = GroundProgram(
        tuple(out),
        g.base | frozenset(Atom(bar_names[a.pred], a.args) for a in g.base),
    )
    return OverlineProgram(barred, bar_names, g.base)


def horn_derives(
    horn: GroundProgram, facts: frozenset[Atom] | set[Atom], goal: Atom
) -> bool:
    """Forward-chaining derivability of ``goal`` from ``facts`` under ``horn``."""
    for c in horn.clauses:
        if any(a.negated for a in c.body):
            raise FormulaError("horn_derives requires a negation-free program")
    comp = horn.compiled()
    seeds = comp.model_ids(frozenset(facts))
    derived = comp.lfp([True] * len(comp.heads), seeds)
    gid = comp.atom_ids.get(goal.positive())
    return goal.positive() in frozenset(facts) or (gid is not None and gid in derived)


# ---------------------------------------------------------------------------
# Refutation trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefNode:
    node_id: int
    label: Atom
    overlined: bool
    children: tuple[int, ...]
    back_edge: int | None
    history: frozenset[tuple[Atom, Atom]]


@dataclass(frozen=True)
class RefutationTree:
    """A regular tree witnessing that an atom lies outside the interpretation.

    Every internal node labeled ``a`` has one child per ground clause whose
    head is ``a``; repeated labels on a path become back edges.  ``history``
    carries the transition pairs accumulated from the root.
    """

    root: int
    nodes: dict[int, RefNode]

    def node(self, node_id: int) -> RefNode:
        return self.nodes[node_id]


def find_refutation(
    p: Program | GroundProgram, m: Model, a: Atom
) -> RefutationTree | None:
    g = _as_ground(p)
    interp = interpretation(g, m)
    a = a.positive()
    if a in interp:
        return None
    by_head: dict[Atom, list[Clause]] = {}
    for c in g.clauses:
        by_head.setdefault(c.head, []).append(c)

    nodes: dict[int, RefNode] = {}
    counter = itertools.count()

    def build(
        label: Atom,
        path: dict[Atom, int],
        history: frozenset[tuple[Atom, Atom]],
    ) -> int:
        nid = next(counter)
        if label in path:
            nodes[nid] = RefNode(nid, label, False, (), path[label], history)
            return nid
        child_ids: list[int] = []
        path = dict(path)
        path[label] = nid
        for clause in by_head.get(label, []):
            neg_hit = next(
                (b for b in clause.body if b.negated and b.positive() in m), None
            )
            if neg_hit is not None:
                leaf = next(counter)
                nodes[leaf] = RefNode(
                    leaf, neg_hit.positive(), True, (), None, history
                )
                child_ids.append(leaf)
                continue
            witness = next(
                (b for b in clause.body if not b.negated and b not in interp),
                None,
            )
            if witness is None:
                raise AssertionError(
                    f"no failing body atom for {clause}; interpretation is wrong"
                )
            child_hist = history | {(label, witness)}
            child_ids.append(build(witness, path, child_hist))
        nodes[nid] = RefNode(nid, label, False, tuple(child_ids), None, history)
        return nid

    root = build(a, {}, frozenset())
    return RefutationTree(root, nodes)


# ---------------------------------------------------------------------------
# Derivations without returns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivNode:
    node_id: int
    clause: Clause | None  # None for bar-atom leaves
    leaf_atom: Atom | None
    derived: Atom | None  # the head this subtree derives, for clause nodes
    children: tuple[int, ...]


@dataclass(frozen=True)
class DerivationTree:
    """A finite derivation over the overline program and the complement facts."""

    root: int
    nodes: dict[int, DerivNode]

    def node(self, node_id: int) -> DerivNode:
        return self.nodes[node_id]


def find_derivation_no_returns(
    p: Program | GroundProgram, m: Model, a: Atom
) -> DerivationTree | None:
    """A derivation whose derived head atoms never repeat along a path.

    Exists exactly when ``a`` is in the interpretation; the search works on
    the overline program directly and never consults the fixpoint.
    """
    over = overline(p)
    mbar = over.complement(m)
    by_head: dict[Atom, list[Clause]] = {}
    for c in over.program.clauses:
        by_head.setdefault(c.head, []).append(c)
    bar_preds = set(over.bar_names.values())

    def derive(goal: Atom, forbidden: frozenset[Atom]) -> tuple | None:
        for clause in by_head.get(goal, []):
            bar_leaves = [b for b in clause.body if b.pred in bar_preds]
            if any(b not in mbar for b in bar_leaves):
                continue
            pos_goals = [b for b in clause.body if b.pred not in bar_preds]
            if any(b in forbidden for b in pos_goals):
                continue
            subs: list[tuple] = []
            ok = True
            for b in pos_goals:
                sub = derive(b, forbidden | {goal})
                if sub is None:
                    ok = False
                    break
                subs.append(sub)
            if not ok:
                continue
            subs.extend(("leaf", b) for b in bar_leaves)
            return ("node", clause, goal, subs)
        return None

    tmp = derive(a.positive(), frozenset())
    if tmp is None:
        return None

    nodes: dict[int, DerivNode] = {}
    counter = itertools.count()

    def materialize(t: tuple) -> int:
        if t[0] == "leaf":
            nid = next(counter)
            nodes[nid] = DerivNode(nid, None, t[1], None, ())
            return nid
        _, clause, goal, subs = t
        child_ids = tuple(materialize(s) for s in subs)
        nid = next(counter)
        nodes[nid] = DerivNode(nid, clause, None, goal, child_ids)
        return nid

    root = materialize(tmp)
    return DerivationTree(root, nodes)
