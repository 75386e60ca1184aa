"""Refutation soups as first-class objects: checking, searching, and the two
conversions between soups and stable models of the translated program.

A soup stores addressed disjudgments plus an explicit answer map.  The map is
a checkable witness; validity itself only requires that every asked question
has some valid answer among the members, and the checker falls back to that
existence reading when map entries are missing or malformed.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass

from .engine import Model, is_stable
from .errors import BudgetExceeded, CapExceeded, CrossCheckError, FormulaError
from .logic_to_asp import (
    Analysis,
    FormulaTranslation,
    QuestionPattern,
    SoupSignature,
    analysis,
    analyze,
    certified_addr_len,
    translate,
)
from .parsing import parse_formula
from .syntax import (
    Atom,
    AtomF,
    Formula,
    alpha_canon,
    const,
    fmt_atomf,
    fmt_formula,
    free_vars,
    substitute,
)

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Disjudgment:
    context: frozenset[Formula]  # closed Pi1 instances
    goal: AtomF  # ground atom
    addresses: tuple[str, ...]  # bit strings, all of the soup's length

    def context_keys(self) -> frozenset:
        return frozenset(alpha_canon(f) for f in self.context)


@dataclass(frozen=True)
class Question:
    occ: int  # subformula occurrence of the member
    s_assign: tuple[tuple[str, str], ...]
    t_assign: tuple[tuple[str, str], ...]
    asked_at: Disjudgment


@dataclass(frozen=True)
class AnswerEntry:
    occ: int
    s_assign: tuple[tuple[str, str], ...]
    t_assign: tuple[tuple[str, str], ...]
    from_addr: str
    index: int  # which premise is challenged, 1-based
    to_addr: str


@dataclass(frozen=True)
class Soup:
    addr_len: int
    judgments: tuple[Disjudgment, ...]
    answers: tuple[AnswerEntry, ...]

    def by_address(self) -> dict[str, Disjudgment]:
        out: dict[str, Disjudgment] = {}
        for d in self.judgments:
            for a in d.addresses:
                out[a] = d
        return out

    def initial(self) -> Disjudgment | None:
        return self.by_address().get("0" * self.addr_len)


@dataclass(frozen=True)
class SoupReport:
    ok: bool
    diagnostics: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# Questions and answers
# ---------------------------------------------------------------------------


def _instance_key(sig: SoupSignature, occ: int, s_assign) -> Formula:
    f = substitute(sig.occs[occ].formula, {v: const(c) for v, c in s_assign})
    return alpha_canon(f)


def _semantic_question_key(sig: SoupSignature, occ: int, s_assign, t_assign):
    schema = sig.schemas[occ]
    t = dict(t_assign)
    return (_instance_key(sig, occ, s_assign), tuple(t[v] for v in schema.top_vars))


def questions_at(d: Disjudgment, sig: SoupSignature) -> tuple[Question, ...]:
    """All triples (member occurrence, S, T) whose instantiated head is the goal."""
    keys = d.context_keys()
    out: list[Question] = []
    pool = sig.pool
    for occ in sig.env_occs:
        schema = sig.schemas[occ]
        fv = sorted(free_vars(sig.occs[occ].formula))
        for s_combo in itertools.product(pool, repeat=len(fv)):
            s_assign = tuple(zip(fv, s_combo))
            if _instance_key(sig, occ, s_assign) not in keys:
                continue
            s_map = {v: const(c) for v, c in s_assign}
            for t_combo in itertools.product(pool, repeat=len(schema.top_vars)):
                t_assign = tuple(zip(schema.top_vars, t_combo))
                full = dict(s_map)
                full.update({v: const(c) for v, c in t_assign})
                head = substitute(schema.head, full)
                if head == d.goal:
                    out.append(Question(occ, s_assign, t_assign, d))
    return tuple(out)


def answer_requirements(
    sig: SoupSignature, q: Question, index: int
) -> tuple[AtomF, frozenset]:
    """The challenged subgoal instance and the context keys an answer must add."""
    schema = sig.schemas[q.occ]
    if not (1 <= index <= len(schema.steps)):
        raise FormulaError(f"no premise {index} in occurrence {q.occ}")
    step = schema.steps[index - 1]
    full = {v: const(c) for v, c in q.s_assign}
    full.update({v: const(c) for v, c in q.t_assign})
    subgoal = substitute(step.subgoal, full)
    tau_keys = set()
    for tau_occ in step.descendants:
        tau_fv = sorted(free_vars(sig.occs[tau_occ].formula))
        tau_assign = tuple((v, full[v].name) for v in tau_fv)
        tau_keys.add(_instance_key(sig, tau_occ, tau_assign))
    assert isinstance(subgoal, AtomF)
    return subgoal, frozenset(tau_keys)


def _is_valid_answer(
    sig: SoupSignature, q: Question, index: int, target: Disjudgment
) -> bool:
    schema = sig.schemas[q.occ]
    if not (1 <= index <= len(schema.steps)):
        return False
    subgoal, tau_keys = answer_requirements(sig, q, index)
    if target.goal != subgoal:
        return False
    return q.asked_at.context_keys() | tau_keys <= target.context_keys()


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------


def _instance_universe_keys(sig: SoupSignature) -> frozenset:
    keys = set()
    for occ in sig.env_occs:
        fv = sorted(free_vars(sig.occs[occ].formula))
        for combo in itertools.product(sig.pool, repeat=len(fv)):
            keys.add(_instance_key(sig, occ, tuple(zip(fv, combo))))
    return frozenset(keys)


def check_soup(z: Soup, phi: Formula) -> SoupReport:
    """Verify the three soup invariants; diagnostics name the first failure."""
    sig, _ = analyze(phi)
    diags: list[str] = []
    seen_addr: set[str] = set()
    for d in z.judgments:
        if not d.addresses:
            diags.append("a judgment carries no address")
        for a in d.addresses:
            if len(a) != z.addr_len or set(a) - {"0", "1"}:
                diags.append(f"malformed address {a!r}")
            elif a in seen_addr:
                diags.append(f"address {a} used by two judgments")
            seen_addr.add(a)
    if diags:
        return SoupReport(False, tuple(diags))

    universe = _instance_universe_keys(sig)
    for d in z.judgments:
        foreign = d.context_keys() - universe
        if foreign:
            diags.append(
                "context member is not an instantiated subformula: "
                + ", ".join(sorted(fmt_formula(f) for f in foreign))
            )
            return SoupReport(False, tuple(diags))

    initial = z.initial()
    if initial is None:
        return SoupReport(False, ("no judgment at the initial address",))
    init_keys = frozenset(
        alpha_canon(sig.occs[occ].formula) for occ in sig.premises
    )
    if initial.goal != sig.target:
        diags.append(
            f"initial goal is {fmt_atomf(initial.goal)}, expected "
            f"{fmt_atomf(sig.target)}"
        )
    if initial.context_keys() != init_keys:
        diags.append("initial context is not exactly the premise set")
    if diags:
        return SoupReport(False, tuple(diags))

    entry_index: dict[tuple, list[AnswerEntry]] = {}
    for e in z.answers:
        try:
            key = _semantic_question_key(sig, e.occ, e.s_assign, e.t_assign)
        except Exception:
            diags.append(f"answer entry references a bad occurrence: {e}")
            continue
        entry_index.setdefault((key, e.from_addr), []).append(e)

    by_addr = z.by_address()
    for d in z.judgments:
        for q in questions_at(d, sig):
            key = _semantic_question_key(sig, q.occ, q.s_assign, q.t_assign)
            answered = False
            for a in d.addresses:
                for e in entry_index.get((key, a), ()):
                    target = by_addr.get(e.to_addr)
                    if target is not None and _is_valid_answer(
                        sig, q, e.index, target
                    ):
                        answered = True
                        break
                    diags.append(
                        f"map entry {e} is not a valid answer"
                    )
                if answered:
                    break
            if not answered:
                schema = sig.schemas[q.occ]
                for other in z.judgments:
                    if any(
                        _is_valid_answer(sig, q, i, other)
                        for i in range(1, len(schema.steps) + 1)
                    ):
                        answered = True
                        break
            if not answered:
                diags.append(
                    f"unanswered question (psi{q.occ}, "
                    f"{_fmt_assign(q.s_assign)}, {_fmt_assign(q.t_assign)}) "
                    f"at goal {fmt_atomf(d.goal)}"
                )
                return SoupReport(False, tuple(diags))
    return SoupReport(True, tuple(diags))


# ---------------------------------------------------------------------------
# Searching: a greatest fixpoint over candidate disjudgments
# ---------------------------------------------------------------------------


def _question_options(an: Analysis):
    """Per member instance key: deduplicated question heads with answer data."""
    sig = an.sig
    grouped: dict[Formula, dict[tuple, QuestionPattern]] = {}
    for q in an.questions:
        key = an.instances[q.inst].key
        sem = q.semantic_key(an)
        grouped.setdefault(key, {}).setdefault(sem, q)
    out: dict[Formula, list[tuple[QuestionPattern, tuple]]] = {}
    for key, sems in grouped.items():
        entries = []
        for q in sems.values():
            opts = []
            for opt in q.answers:
                tau_keys = frozenset(
                    an.instances[i].key for i in opt.taus
                ) - an.initial_keys
                opts.append((opt.index, opt.subgoal, tau_keys))
            entries.append((q, tuple(opts)))
        out[key] = entries
    return out


def survivor_antichains(
    an: Analysis,
    max_judgments: int = 100_000,
    deadline: float | None = None,
    schedule: str = "forward",
) -> dict[AtomF, list[frozenset]]:
    """Maximal surviving context extensions per goal.

    Candidates are (initial context + X, goal); a candidate survives while all
    its questions have surviving answers.  Survivors are downward closed in X,
    so each goal keeps an antichain of maximal extension sets.  The deletion
    order must not matter; ``schedule`` picks a scan order for tests.
    """
    options = _question_options(an)
    added_universe = frozenset(an.distinct_added_keys())
    chains: dict[AtomF, list[frozenset]] = {
        g: [added_universe] for g in an.goal_universe
    }
    work = 0

    def answered(x: frozenset, opts) -> bool:
        for index, subgoal, tau_keys in opts:
            need = x | tau_keys
            if any(need <= m for m in chains.get(subgoal, ())):
                return True
        return False

    def survives(x: frozenset, goal: AtomF) -> bool:
        ctx = an.initial_keys | x
        for key in ctx:
            for q, opts in options.get(key, ()):
                if q.head != goal:
                    continue
                if not answered(x, opts):
                    return False
        return True

    changed = True
    while changed:
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("soup search budget exhausted")
        changed = False
        goals = list(chains)
        if schedule == "reverse":
            goals.reverse()
        for g in goals:
            row = chains[g]
            if schedule == "reverse":
                row = list(reversed(row))
            for x in list(row):
                if x not in chains[g]:
                    continue
                if survives(x, g):
                    continue
                chains[g].remove(x)
                changed = True
                for e in sorted(x, key=fmt_formula):
                    sub = x - {e}
                    if not any(sub <= m for m in chains[g]):
                        chains[g].append(sub)
                        work += 1
                        if work > max_judgments:
                            raise CapExceeded(
                                f"soup candidate space exceeded {max_judgments}",
                                feasible=max_judgments,
                            )
    return chains


def find_soup(
    phi: Formula,
    max_judgments: int = 100_000,
    addr_len: int | None = None,
    deadline: float | None = None,
    schedule: str = "forward",
) -> Soup | None:
    """A refutation soup for ``phi``, or None when the formula is provable.

    Deletes unsupportable candidate disjudgments until the survivors are
    self-supporting, then realizes the reachable part with minimal answers.
    """
    an = analysis(phi)
    sig = an.sig
    if addr_len is None:
        addr_len = certified_addr_len(an, deadline=deadline)
    chains = survivor_antichains(an, max_judgments, deadline, schedule)
    if not any(frozenset() <= m for m in chains.get(sig.target, ())):
        return None

    options = _question_options(an)
    key_repr: dict[Formula, Formula] = {}
    for p in an.instances:
        key_repr.setdefault(p.key, p.formula)
    for occ in sig.premises:
        f = sig.occs[occ].formula
        key_repr.setdefault(alpha_canon(f), f)

    # realize reachable judgments with minimal answers
    nodes: dict[tuple[frozenset, AtomF], int] = {}
    order: list[tuple[frozenset, AtomF]] = []
    entries: list[tuple[int, AnswerEntry]] = []

    def node_id(x: frozenset, goal: AtomF) -> int:
        j = (x, goal)
        if j not in nodes:
            if len(nodes) >= 2**addr_len:
                raise CapExceeded(
                    f"soup needs more than 2^{addr_len} addresses",
                    feasible=addr_len,
                )
            nodes[j] = len(order)
            order.append(j)
        return nodes[j]

    root = node_id(frozenset(), sig.target)
    queue = [root]
    processed: set[int] = set()
    while queue:
        nid = queue.pop(0)
        if nid in processed:
            continue
        processed.add(nid)
        x, goal = order[nid]
        ctx = an.initial_keys | x
        for key in sorted(ctx, key=fmt_formula):
            for q, opts in options.get(key, ()):
                if q.head != goal:
                    continue
                chosen = None
                for index, subgoal, tau_keys in opts:
                    need = x | tau_keys
                    if any(need <= m for m in chains.get(subgoal, ())):
                        chosen = (index, subgoal, need)
                        break
                assert chosen is not None, "survivor question lost its answer"
                index, subgoal, need = chosen
                to_id = node_id(need, subgoal)
                queue.append(to_id)
                inst = an.instances[q.inst]
                entries.append(
                    (
                        nid,
                        AnswerEntry(
                            inst.occ,
                            inst.assign,
                            q.t_assign,
                            "",  # addresses are assigned below
                            index,
                            "",
                        ),
                    )
                )
                entries[-1] = (nid, entries[-1][1], to_id)  # type: ignore[misc]

    def addr(i: int) -> str:
        return format(i, f"0{addr_len}b")

    judgments = []
    for i, (x, goal) in enumerate(order):
        ctx = frozenset(key_repr[k] for k in (an.initial_keys | x))
        judgments.append(Disjudgment(ctx, goal, (addr(i),)))
    final_entries = []
    for nid, e, to_id in entries:  # type: ignore[misc]
        final_entries.append(
            AnswerEntry(e.occ, e.s_assign, e.t_assign, addr(nid), e.index, addr(to_id))
        )
    return Soup(addr_len, tuple(judgments), tuple(final_entries))


# ---------------------------------------------------------------------------
# Conversions between models and soups
# ---------------------------------------------------------------------------


def soup_from_model(m: Model, t: FormulaTranslation) -> Soup:
    """Read the soup a stable model of the translated program describes."""
    if not is_stable(t.ground_program, m):
        raise FormulaError("the given model is not stable for the translation")
    an = t.analysis
    b = t.builder
    judgment_data: dict[str, tuple[frozenset, AtomF]] = {}
    for bits in b.all_addresses():
        goals = [g for g in an.goal_universe if b.goal_atom(g, bits) in m]
        if len(goals) > 1:
            raise CrossCheckError(f"two goals at address {bits}")
        keys = set()
        for p in an.instances:
            e_in = b.env_atom(p.index, bits) in m
            ne_in = b.nenv_atom(p.index, bits) in m
            if e_in == ne_in:
                raise CrossCheckError(
                    f"environment choice for instance {p.index} at {bits} "
                    f"is inconsistent"
                )
            if e_in:
                keys.add(p.key)
        if goals:
            judgment_data[bits] = (frozenset(keys), goals[0])

    key_repr: dict[Formula, Formula] = {}
    for p in an.instances:
        key_repr.setdefault(p.key, p.formula)

    grouped: dict[tuple[frozenset, AtomF], list[str]] = {}
    for bits, jd in sorted(judgment_data.items()):
        grouped.setdefault(jd, []).append(bits)
    judgments = tuple(
        Disjudgment(
            frozenset(key_repr[k] for k in keys), goal, tuple(addresses)
        )
        for (keys, goal), addresses in grouped.items()
    )

    entries: list[AnswerEntry] = []
    goal_set = set(an.goal_universe)
    for q in an.questions:
        if q.head not in goal_set:
            continue
        inst = an.instances[q.inst]
        for opt in q.answers:
            for a_from in b.all_addresses():
                for a_to in b.all_addresses():
                    if b.ans_atom(opt.index, q.index, a_from, a_to) in m:
                        entries.append(
                            AnswerEntry(
                                inst.occ,
                                inst.assign,
                                q.t_assign,
                                a_from,
                                opt.index,
                                a_to,
                            )
                        )
    return Soup(t.addr_len, judgments, tuple(entries))


def model_from_soup(
    z: Soup,
    phi: Formula,
    addr_len: int | None = None,
    translation: FormulaTranslation | None = None,
) -> Model:
    """Realize a soup as a stable model of the translated program.

    Untrimmed soups are trimmed to the part reachable from the initial
    judgment (with a notice); unused addresses repeat the last judgment.
    """
    if translation is None:
        translation = translate(phi, addr_len=addr_len or z.addr_len)
    t = translation
    if t.addr_len != z.addr_len:
        raise FormulaError(
            f"soup uses addresses of length {z.addr_len} but the translation "
            f"has {t.addr_len}"
        )
    report = check_soup(z, phi)
    if not report.ok:
        raise FormulaError(
            "not a valid soup: " + "; ".join(report.diagnostics)
        )
    an = t.analysis
    sig = an.sig
    known_keys = {p.key for p in an.instances}

    # trim to the judgments reachable from the initial one through answers
    kept: list[Disjudgment] = []
    initial = z.initial()
    assert initial is not None
    work = [initial]
    while work:
        d = work.pop()
        if d in kept:
            continue
        kept.append(d)
        missing = d.context_keys() - known_keys
        if missing:
            raise FormulaError(
                "context member outside the translation universe: "
                + ", ".join(sorted(str(k) for k in missing))
            )
        for q in questions_at(d, sig):
            schema = sig.schemas[q.occ]
            for other in z.judgments:
                for i in range(1, len(schema.steps) + 1):
                    if _is_valid_answer(sig, q, i, other):
                        if other not in kept and other not in work:
                            work.append(other)
    if len(kept) < len(z.judgments):
        log.warning(
            "soup has %d unreachable judgments; trimming them",
            len(z.judgments) - len(kept),
        )

    ctx_cache = {id(d): d.context_keys() for d in kept}

    def answers_something(d: Disjudgment) -> bool:
        for d2 in kept:
            for q in questions_at(d2, sig):
                schema = sig.schemas[q.occ]
                if any(
                    _is_valid_answer(sig, q, i, d)
                    for i in range(1, len(schema.steps) + 1)
                ):
                    return True
        return False

    by_addr: dict[str, Disjudgment] = {}
    for d in kept:
        for a in d.addresses:
            by_addr[a] = d
    # fill spare addresses by repeating the last judgment that answers some
    # question; a judgment without that property cannot support a goal atom
    filler = None
    for d in sorted(kept, key=lambda d: d.addresses[0], reverse=True):
        if answers_something(d):
            filler = d
            break
    all_addrs = t.builder.all_addresses()
    if filler is not None:
        for bits in all_addrs:
            by_addr.setdefault(bits, filler)

    b = t.builder
    atoms: set[Atom] = set(t.syntax_facts)

    for bits in all_addrs:
        d = by_addr.get(bits)
        if d is None:
            # dead address: empty environment, no goal
            for p in an.instances:
                atoms.add(b.nenv_atom(p.index, bits))
            continue
        atoms.add(b.goal_atom(d.goal, bits))
        keys = ctx_cache[id(d)]
        for p in an.instances:
            if p.key in keys:
                atoms.add(b.env_atom(p.index, bits))
            else:
                atoms.add(b.nenv_atom(p.index, bits))

    goal_set = set(an.goal_universe)
    for q in an.questions:
        if q.head not in goal_set:
            continue
        inst = an.instances[q.inst]
        for bits in all_addrs:
            d = by_addr.get(bits)
            if d is None or inst.key not in ctx_cache[id(d)] or q.head != d.goal:
                continue
            atoms.add(b.q_atom(q.index, bits))
            any_answer = False
            for opt in q.answers:
                tau_keys = frozenset(an.instances[i].key for i in opt.taus)
                need = ctx_cache[id(d)] | tau_keys
                for bits2 in all_addrs:
                    d2 = by_addr.get(bits2)
                    if (
                        d2 is not None
                        and d2.goal == opt.subgoal
                        and need <= ctx_cache[id(d2)]
                    ):
                        atoms.add(b.ans_atom(opt.index, q.index, bits, bits2))
                        any_answer = True
                    else:
                        atoms.add(b.nans_atom(opt.index, q.index, bits, bits2))
            if any_answer:
                atoms.add(b.y_atom(q.index, bits))
    model = frozenset(atoms)
    if not is_stable(t.ground_program, model):
        raise CrossCheckError("realized model is not stable; translation bug")
    return model


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _fmt_assign(assign) -> str:
    return "[" + ", ".join(f"{v}:={c}" for v, c in assign) + "]"


def _parse_assign(text: str) -> tuple[tuple[str, str], ...]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise FormulaError(f"bad substitution {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return ()
    out = []
    for part in inner.split(","):
        v, _, c = part.partition(":=")
        out.append((v.strip(), c.strip()))
    return tuple(out)


def write_soup(z: Soup) -> str:
    lines = [f"addr-len: {z.addr_len}"]
    for d in z.judgments:
        lines.append("judgment:")
        lines.append("  addresses: " + ", ".join(d.addresses))
        lines.append("  goal: " + fmt_atomf(d.goal))
        lines.append("  context:")
        for f in sorted(d.context, key=fmt_formula):
            lines.append("    " + fmt_formula(f))
    for e in z.answers:
        lines.append(
            f"answer: (psi{e.occ}, {_fmt_assign(e.s_assign)}, "
            f"{_fmt_assign(e.t_assign)}, {e.from_addr}) -> "
            f"({e.index}, {e.to_addr})"
        )
    return "\n".join(lines) + "\n"


def parse_soup(text: str) -> Soup:
    addr_len: int | None = None
    judgments: list[Disjudgment] = []
    answers: list[AnswerEntry] = []
    cur_addrs: list[str] | None = None
    cur_goal: AtomF | None = None
    cur_ctx: list[Formula] = []
    in_context = False

    def flush() -> None:
        nonlocal cur_addrs, cur_goal, cur_ctx, in_context
        if cur_addrs is not None:
            if cur_goal is None:
                raise FormulaError("judgment block without a goal")
            judgments.append(
                Disjudgment(frozenset(cur_ctx), cur_goal, tuple(cur_addrs))
            )
        cur_addrs, cur_goal, cur_ctx, in_context = None, None, [], False

    for raw in text.splitlines():
        line = raw.split("%", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("addr-len:"):
            addr_len = int(stripped.split(":", 1)[1])
        elif stripped == "judgment:":
            flush()
            cur_addrs = []
        elif stripped.startswith("addresses:"):
            assert cur_addrs is not None
            cur_addrs.extend(
                a.strip() for a in stripped.split(":", 1)[1].split(",") if a.strip()
            )
        elif stripped.startswith("goal:"):
            goal = parse_formula(stripped.split(":", 1)[1])
            if not isinstance(goal, AtomF):
                raise FormulaError(f"goal is not an atom: {stripped}")
            cur_goal = goal
        elif stripped == "context:":
            in_context = True
        elif stripped.startswith("answer:"):
            flush()
            body = stripped.split(":", 1)[1].strip()
            left, _, right = body.partition("->")
            left = left.strip()
            right = right.strip()
            if not (left.startswith("(") and left.endswith(")")):
                raise FormulaError(f"bad answer entry: {stripped}")
            psi, s_txt, t_txt, from_addr = _split_entry(left[1:-1])
            if not psi.startswith("psi"):
                raise FormulaError(f"bad member id {psi!r}")
            if not (right.startswith("(") and right.endswith(")")):
                raise FormulaError(f"bad answer entry: {stripped}")
            idx_txt, to_addr = (s.strip() for s in right[1:-1].split(","))
            answers.append(
                AnswerEntry(
                    int(psi[3:]),
                    _parse_assign(s_txt),
                    _parse_assign(t_txt),
                    from_addr.strip(),
                    int(idx_txt),
                    to_addr.strip(),
                )
            )
        elif in_context:
            cur_ctx.append(parse_formula(stripped))
        else:
            raise FormulaError(f"unexpected soup line: {stripped!r}")
    flush()
    if addr_len is None:
        raise FormulaError("soup file lacks an addr-len header")
    return Soup(addr_len, tuple(judgments), tuple(answers))


def _split_entry(inner: str) -> tuple[str, str, str, str]:
    parts: list[str] = []
    depth = 0
    cur = ""
    for ch in inner:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    parts.append(cur.strip())
    if len(parts) != 4:
        raise FormulaError(f"bad answer tuple: ({inner})")
    return parts[0], parts[1], parts[2], parts[3]
