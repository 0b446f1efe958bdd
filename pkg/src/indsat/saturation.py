"""Discount-style given-clause saturation with induction and rewriting.

The loop keeps a passive priority structure (alternating age / weight
picks), an active set with a top-symbol index over unit equations, and
drives: forward simplification, induction at activation (with certified
skipping), generation under the configured calculus, and backward
demodulation by newly activated unit equations.

Clauses produced by rewrite inferences are exempt from destructive
forward demodulation: their induction candidates are enumerated first,
the demodulated form is pushed as an additional clause, and the original
stays active so rewrite chains (the whole point of the calculus) survive.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Optional

from . import inference as inf
from .clauses import (
    Clause,
    Direction,
    InferenceRecord,
    Literal,
    TAUTOLOGY,
    select_literals,
    simplify_trivia,
)
from .induction import (
    apply_structural_induction,
    candidate_induction_terms,
    find_skip_certificate,
)
from .inference import Conclusion
from .orderings import KBO, LPO, Order, Precedence, TermOrdering
from .terms import EPSILON, Signature, term_vars


@dataclass
class ProverConfig:
    calculus: str = inf.REC
    chaining: bool = True
    induction: bool = True
    ind_redundancy: bool = True
    induct_complex_terms: bool = True
    ordering: str = "lpo"
    precedence_mode: Optional[str] = None  # default: decl for lpo, arity for kbo
    precedence_list: Optional[list[str]] = None
    kbo_weights: Optional[dict[str, int]] = None
    max_rw_depth: int = 3
    clause_limit: Optional[int] = None
    time_limit: Optional[float] = None
    age_weight_ratio: tuple[int, int] = (1, 4)
    goal_oriented_rw: bool = True
    max_ind_depth: int = 3
    selection_mode: str = "negative"

    def resolved_precedence_mode(self) -> str:
        if self.precedence_mode:
            return self.precedence_mode
        return "decl" if self.ordering == "lpo" else "arity"


def build_ordering(config: ProverConfig, signature: Signature) -> TermOrdering:
    prec = Precedence.from_signature(
        signature,
        mode="explicit" if config.precedence_list else config.resolved_precedence_mode(),
        explicit=config.precedence_list,
    )
    if config.ordering == "kbo":
        return KBO(prec, weights=config.kbo_weights)
    if config.ordering == "lpo":
        return LPO(prec)
    raise ValueError(f"unknown ordering {config.ordering!r}")


REFUTATION = "refutation"
SATURATED = "saturated"
RESOURCE_OUT = "resource-out"


@dataclass
class ProverResult:
    status: str
    reason: str = ""
    empty_clause: Optional[int] = None
    clauses: dict[int, Clause] = field(default_factory=dict)
    stats: dict[str, int] = field(default_factory=dict)
    certificates: list = field(default_factory=list)

    @property
    def found_refutation(self) -> bool:
        return self.status == REFUTATION


class _Passive:
    """Age/weight priority structure with lazy deletion."""

    def __init__(self, ratio: tuple[int, int]):
        self.by_age: list[tuple[int, int]] = []
        self.by_weight: list[tuple[int, int, int]] = []
        self.members: dict[int, Clause] = {}
        self.ratio = ratio
        self._tick = 0

    def push(self, clause: Clause) -> None:
        self.members[clause.cid] = clause
        heapq.heappush(self.by_age, (clause.cid, clause.cid))
        # input clauses are processed first (in input order, so the
        # negated conjecture meets a fully active axiom set); after that,
        # weight picks prefer goal lineage, since rewriting and induction
        # are goal-oriented and the conjecture's descendants carry proofs
        if clause.record.rule == "Input":
            key = (-1, clause.cid)
        else:
            key = (0 if clause.is_goal else 1, clause.weight)
        heapq.heappush(self.by_weight, (key, clause.cid, clause.cid))

    def pop(self) -> Optional[Clause]:
        age_picks, weight_picks = self.ratio
        cycle = age_picks + weight_picks
        use_age = (self._tick % cycle) < age_picks
        self._tick += 1
        heap = self.by_age if use_age else self.by_weight
        other = self.by_weight if use_age else self.by_age
        while heap:
            cid = heapq.heappop(heap)[-1]
            if cid in self.members:
                return self.members.pop(cid)
        while other:
            cid = heapq.heappop(other)[-1]
            if cid in self.members:
                return self.members.pop(cid)
        return None

    def remove(self, cid: int) -> Optional[Clause]:
        return self.members.pop(cid, None)

    def __len__(self):
        return len(self.members)


class ProverState:
    def __init__(self, signature: Signature, config: ProverConfig, order: TermOrdering):
        self.signature = signature
        self.config = config
        self.order = order
        self.passive = _Passive(config.age_weight_ratio)
        self.active: dict[int, Clause] = {}
        self.active_keys: set = set()
        self.unit_eq_index: dict[int, Clause] = {}  # cid -> unit equation clause
        self.demod_index: dict[str, list] = {}  # head symbol -> (eq, l, r)
        self.clauses: dict[int, Clause] = {}
        self.seen: dict = {}
        self.next_cid = 1
        self.stats = {
            "generated": 0,
            "activated": 0,
            "ind_performed": 0,
            "ind_skipped": 0,
            "ind_candidates": 0,
            "rw_down": 0,
            "rw_up": 0,
            "chain1": 0,
            "chain2": 0,
            "demodulated": 0,
        }
        self.certificates: list = []
        self.skolem_names: set[str] = set()
        self.goal_constants: set[str] = set()
        self.ind_seen: set = set()
        self.subsume_units: list = []  # (positive, left, right) of active units
        self._effective_cache: dict[int, bool] = {}

    def state_key(self, literals, direction, last_rw):
        from .clauses import clause_key

        base = clause_key(literals)
        if self.config.calculus in (inf.REC, inf.SUP):
            return base
        return (base, direction, last_rw)

    def new_clause(self, concl: Conclusion, is_goal: bool, produced_by_rw: bool) -> Clause:
        depth = max(
            (self.clauses[p].ind_depth for p in concl.premises if p in self.clauses),
            default=0,
        )
        if concl.rule == "Ind":
            depth += 1
        c = Clause(
            concl.literals,
            cid=self.next_cid,
            direction=concl.direction,
            last_rw=concl.last_rw,
            rw_depth=concl.rw_depth,
            record=InferenceRecord(concl.rule, concl.premises, concl.detail or None),
            is_goal=is_goal,
            produced_by_rw=produced_by_rw,
            ind_depth=depth,
        )
        self.next_cid += 1
        self.clauses[c.cid] = c
        return c

    def eq_effective(self, eq: Clause) -> bool:
        val = self._effective_cache.get(eq.cid)
        if val is None:
            val = inf.classify_effectiveness(eq.literals[0], self.order)
            self._effective_cache[eq.cid] = val
        return val


def goal_oriented_filter(state: ProverState, main: Clause, concl: Conclusion) -> bool:
    """True when the rewrite inference is allowed.

    Blocks rewrites whose main premise is not goal lineage, that rewrite
    outside the subgoal (negative) literals, that would introduce Skolem
    constants absent from the main premise, or that would introduce
    variables into a goal clause.
    """
    if not main.is_goal:
        return False
    pos = concl.detail.get("pos")
    if pos and main.literals[pos[0] - 1].positive:
        return False
    if not set(v.name for v in _concl_vars(concl)) <= set(v.name for v in main.vars()):
        return False
    new_consts = _concl_constants(concl) - main.constant_names()
    if new_consts & state.skolem_names:
        return False
    return True


def skolem_confined(state: ProverState, main: Clause, concl: Conclusion) -> bool:
    """No Skolem constants absent from the main premise enter the clause.

    Keeps every induction branch confined to its own Skolems: merging
    unrelated branches multiplies hopeless subgoals combinatorially.
    """
    new_consts = _concl_constants(concl) - main.constant_names()
    return not (new_consts & state.skolem_names)


def _selection(clause: Clause, order, config) -> tuple[int, ...]:
    if clause._sel is None:
        clause._sel = select_literals(clause, order, config.selection_mode)
    return clause._sel


def _unit_subsumed(state: ProverState, clause: Clause) -> bool:
    """True when some literal is an instance of an active unit clause's
    literal with the same polarity; such a clause is a weakening of the
    unit and can be dropped. Kills the constructor-clash case literals
    (instances of the freeness axioms) that otherwise breed junk."""
    from .terms import match_term

    for lit in clause.literals:
        for pos, ul, ur in state.subsume_units:
            if pos != lit.positive:
                continue
            theta = match_term(ul, lit.left)
            if theta is not None and match_term(ur, lit.right, theta) is not None:
                return True
            theta = match_term(ul, lit.right)
            if theta is not None and match_term(ur, lit.left, theta) is not None:
                return True
    return False


def _positive_indices(clause: Clause) -> tuple[int, ...]:
    return tuple(i for i, l in enumerate(clause.literals) if l.positive)


def _ind_dedup_key(state: ProverState, clause: Clause, cand) -> tuple:
    """Key identifying an induction application up to renaming of
    induction Skolem constants."""
    from .terms import Var as _Var

    ind_sks = state.skolem_names - state.goal_constants
    mapping: dict[str, str] = {}

    def ren(t):
        if isinstance(t, _Var):
            return ("v", t.name)
        if not t.args and t.fn.name in ind_sks:
            return ("c", mapping.setdefault(t.fn.name, f"@{len(mapping)}"))
        return (t.fn.name,) + tuple(ren(a) for a in t.args)

    from collections import Counter as _Counter

    lits = frozenset(
        _Counter(
            (l.positive, ren(l.left), ren(l.right)) for l in clause.literals
        ).items()
    )
    return (lits, ren(cand.term))


def _clause_constants(clause: Clause) -> set[str]:
    return clause.constant_names()


def _term_constants(term) -> set[str]:
    from .terms import positions as _tpos, Var as _Var

    out: set[str] = set()
    for _, t in _tpos(term):
        if not isinstance(t, _Var) and not t.args:
            out.add(t.fn.name)
    return out


def _concl_vars(concl: Conclusion):
    out = set()
    for lit in concl.literals:
        out |= term_vars(lit.left)
        out |= term_vars(lit.right)
    return out


def _concl_constants(concl: Conclusion) -> set[str]:
    out: set[str] = set()
    from .terms import positions as term_positions, Var

    for lit in concl.literals:
        for side in (lit.left, lit.right):
            for _, t in term_positions(side):
                if not isinstance(t, Var) and not t.args:
                    out.add(t.fn.name)
    return out


def saturate(problem, config: ProverConfig) -> ProverResult:
    """Run the given-clause loop on a parsed problem."""
    signature = problem.signature
    order = build_ordering(config, signature)
    state = ProverState(signature, config, order)
    state.skolem_names = set(problem.skolem_names)
    for lits, is_goal, _label in problem.clauses:
        if is_goal:
            for lit in lits:
                for side in (lit.left, lit.right):
                    from .terms import positions as _tpos, Var as _Var

                    for _, t in _tpos(side):
                        if not isinstance(t, _Var) and not t.args:
                            state.goal_constants.add(t.fn.name)

    from .clauses import canonical_literals

    for lits, is_goal, label in problem.clauses:
        simplified = simplify_trivia(lits)
        if simplified is TAUTOLOGY:
            continue
        concl = Conclusion(canonical_literals(simplified), "Input", ())
        c = state.new_clause(concl, is_goal, produced_by_rw=False)
        c.record = InferenceRecord("Input", (), {"label": label} if label else None)
        state.seen[state.state_key(c.literals, c.direction, c.last_rw)] = c.cid
        state.passive.push(c)
        if c.is_empty:
            return _result(REFUTATION, state, empty=c.cid)

    deadline = time.monotonic() + config.time_limit if config.time_limit else None

    while True:
        if deadline is not None and time.monotonic() > deadline:
            return _result(RESOURCE_OUT, state, reason="time-limit")
        if config.clause_limit is not None and state.stats["generated"] > config.clause_limit:
            return _result(RESOURCE_OUT, state, reason="clause-limit")

        given = state.passive.pop()
        if given is None:
            return _result(SATURATED, state)
        if given.is_empty:
            return _result(REFUTATION, state, empty=given.cid)

        # forward simplification; rewrite products defer demodulation
        if not given.produced_by_rw:
            reduced = _forward_demodulate(state, given)
            if reduced is None:
                continue
            given = reduced
        if _is_redundant_trivia(given):
            continue
        if given.is_empty:
            return _result(REFUTATION, state, empty=given.cid)
        akey = state.state_key(given.literals, given.direction, given.last_rw)
        if akey in state.active_keys:
            continue
        if len(given.literals) > 1 and _unit_subsumed(state, given):
            continue

        new_clauses: list[Clause] = []

        if config.induction:
            new_clauses.extend(_run_induction(state, given))

        if given.produced_by_rw:
            reduced = _forward_demodulate(state, given)
            if (
                reduced is not None
                and reduced is not given
                and state.state_key(reduced.literals, reduced.direction, reduced.last_rw)
                not in state.active_keys
            ):
                new_clauses.append(reduced)

        state.active[given.cid] = given
        state.active_keys.add(akey)
        state.stats["activated"] += 1
        if len(given.literals) == 1 and given.record.rule == "Input":
            # axiom units only: the freeness axioms kill the constructor-
            # clash case literals without touching derived goal equations
            lit = given.literals[0]
            state.subsume_units.append((lit.positive, lit.left, lit.right))
        if inf.unit_equation(given) is not None:
            state.unit_eq_index[given.cid] = given
            for head, entries in inf.build_demod_index([given], order).items():
                state.demod_index.setdefault(head, []).extend(entries)

        new_clauses.extend(_generate(state, given))
        new_clauses.extend(_backward_simplify(state, given))

        for c in new_clauses:
            if c.is_empty:
                return _result(REFUTATION, state, empty=c.cid)
            state.passive.push(c)


def _is_redundant_trivia(clause: Clause) -> bool:
    from .clauses import is_tautology

    return is_tautology(clause.literals)


def _forward_demodulate(state: ProverState, clause: Clause) -> Optional[Clause]:
    """Simplify to normal form: demodulation against active unit equations
    interleaved with resolving falsified literals (t != t) away.

    Each single step is materialized as its own clause (for proof replay);
    only the final form is returned. None when the clause simplifies to a
    tautology (it is redundant then).
    """
    current = clause
    while True:
        step = None
        for i, lit in enumerate(current.literals):
            if not lit.positive and lit.left == lit.right:
                step = Conclusion(
                    current.literals[:i] + current.literals[i + 1 :],
                    "EqRes",
                    (current.cid,),
                    direction=current.direction,
                    last_rw=current.last_rw,
                    rw_depth=current.rw_depth,
                )
                break
        if step is None:
            step = inf.demodulation_step(current, None, state.order, state.demod_index)
        if step is None:
            return current
        simplified = simplify_trivia(step.literals)
        if simplified is TAUTOLOGY:
            return None
        step = Conclusion(
            simplified,
            step.rule,
            step.premises,
            direction=step.direction,
            last_rw=step.last_rw,
            rw_depth=step.rw_depth,
            detail=step.detail,
        )
        state.stats["generated"] += 1
        state.stats["demodulated"] += 1
        current = state.new_clause(step, clause.is_goal, produced_by_rw=False)


def _run_induction(state: ProverState, given: Clause) -> list[Clause]:
    out: list[Clause] = []
    order = state.order
    config = state.config
    eqs = list(state.unit_eq_index.values())
    if config.goal_oriented_rw and given.ind_depth >= config.max_ind_depth:
        return out
    for cand in candidate_induction_terms(given, config.induct_complex_terms):
        if (
            config.goal_oriented_rw
            and state.goal_constants
            and not (_term_constants(cand.term) & state.goal_constants)
        ):
            continue
        key = _ind_dedup_key(state, given, cand)
        if key in state.ind_seen:
            # the same induction modulo renaming of induction Skolems was
            # applied before; its conclusions are equivalent (Example-3
            # style duplicates) and need not be re-derived
            continue
        state.ind_seen.add(key)
        state.stats["ind_candidates"] += 1
        if config.ind_redundancy:
            cert = find_skip_certificate(given, cand, eqs, order)
            if cert is not None:
                state.stats["ind_skipped"] += 1
                state.certificates.append(cert)
                continue
        state.stats["ind_performed"] += 1
        for concl in apply_structural_induction(given, cand, state.signature):
            state.skolem_names.update(concl.detail.get("skolems", ()))
            c = _admit(state, concl, is_goal=given.is_goal, produced_by_rw=False)
            if c is not None:
                out.append(c)
    return out


def _admit(state: ProverState, concl: Conclusion, is_goal: bool, produced_by_rw: bool) -> Optional[Clause]:
    from .clauses import canonical_literals

    state.stats["generated"] += 1
    simplified = simplify_trivia(concl.literals)
    if simplified is TAUTOLOGY:
        return None
    concl = Conclusion(
        canonical_literals(simplified),
        concl.rule,
        concl.premises,
        direction=concl.direction,
        last_rw=concl.last_rw,
        rw_depth=concl.rw_depth,
        detail=concl.detail,
    )
    key = state.state_key(concl.literals, concl.direction, concl.last_rw)
    if key in state.seen:
        return None
    c = state.new_clause(concl, is_goal, produced_by_rw)
    state.seen[key] = c.cid
    return c


def _generate(state: ProverState, given: Clause) -> list[Clause]:
    out: list[Clause] = []
    order = state.order
    config = state.config
    sel_given = _selection(given, order, config)

    for concl in inf.equality_resolution(given, order, sel_given):
        c = _admit(state, concl, given.is_goal, False)
        if c is not None:
            out.append(c)
    for concl in inf.equality_factoring(given, order, sel_given):
        c = _admit(state, concl, given.is_goal, False)
        if c is not None:
            out.append(c)

    # side premises expose every positive literal: induction products keep
    # their hypothesis equation next to unresolved (negative) case literals,
    # and those hypotheses must be usable as rewrite sources
    pos_given = _positive_indices(given)
    for other in list(state.active.values()):
        if other.cid == given.cid:
            pairs = ((given, given, sel_given, pos_given),)
        else:
            sel_other = _selection(other, order, config)
            pairs = (
                (given, other, sel_given, _positive_indices(other)),
                (other, given, sel_other, pos_given),
            )
        for main, side, sel_m, sel_s in pairs:
            if config.goal_oriented_rw:
                leaked = (side.constant_names() & state.skolem_names) - main.constant_names()
                check_each = bool(leaked)
            else:
                check_each = False
            for concl in inf.superposition(main, side, order, sel_m, sel_s):
                if check_each and not skolem_confined(state, main, concl):
                    continue
                c = _admit(state, concl, main.is_goal or side.is_goal, False)
                if c is not None:
                    out.append(c)

    if config.calculus != inf.SUP:
        out.extend(_generate_rewrites(state, given))
        if config.chaining:
            out.extend(_generate_chains(state, given))
    return out


def _generate_rewrites(state: ProverState, given: Clause) -> list[Clause]:
    out: list[Clause] = []
    config = state.config
    order = state.order
    pairs: list[tuple[Clause, Clause]] = []
    for eq in state.unit_eq_index.values():
        if eq.cid != given.cid:
            pairs.append((given, eq))
    if inf.unit_equation(given) is not None:
        for main in state.active.values():
            if main.cid != given.cid:
                pairs.append((main, given))
    ind_skolems = state.skolem_names - state.goal_constants
    for main, eq in pairs:
        if (
            config.goal_oriented_rw
            and main.ind_depth > 0
            and not (_clause_constants(eq) & ind_skolems)
        ):
            # axiom equations rewrite the conjecture line only; inside an
            # induction branch, rewriting is for hypothesis equations
            continue
        for concl in inf.rewrite(
            main,
            eq,
            config.calculus,
            order,
            max_depth=config.max_rw_depth,
            chaining=config.chaining,
            eq_effective=state.eq_effective(eq) if config.chaining else None,
        ):
            if config.goal_oriented_rw and not goal_oriented_filter(state, main, concl):
                continue
            c = _admit(state, concl, main.is_goal, produced_by_rw=True)
            if c is not None:
                if concl.direction is Direction.UP:
                    state.stats["rw_up"] += 1
                else:
                    state.stats["rw_down"] += 1
                out.append(c)
    return out


def _generate_chains(state: ProverState, given: Clause) -> list[Clause]:
    out: list[Clause] = []
    order = state.order
    if inf.unit_equation(given) is None:
        return out
    for other in list(state.unit_eq_index.values()):
        if other.cid == given.cid:
            continue
        for a, b in ((given, other), (other, given)):
            for concl in inf.chain1(a, b, order):
                c = _admit(state, concl, a.is_goal or b.is_goal, False)
                if c is not None:
                    state.stats["chain1"] += 1
                    out.append(c)
            for concl in inf.chain2(a, b, order):
                c = _admit(state, concl, a.is_goal or b.is_goal, False)
                if c is not None:
                    state.stats["chain2"] += 1
                    out.append(c)
    return out


def _backward_simplify(state: ProverState, given: Clause) -> list[Clause]:
    """Demodulate active clauses by a newly activated unit equation."""
    out: list[Clause] = []
    if inf.unit_equation(given) is None:
        return out
    order = state.order
    given_index = inf.build_demod_index([given], order)
    if not given_index:
        return out
    for cid in list(state.active):
        target = state.active[cid]
        if cid == given.cid or target.produced_by_rw:
            continue
        step = inf.demodulation_step(target, None, order, given_index)
        if step is None:
            continue
        del state.active[cid]
        if state.unit_eq_index.pop(cid, None) is not None:
            for entries in state.demod_index.values():
                entries[:] = [e for e in entries if e[0].cid != cid]
        reduced = _forward_demodulate_from(state, target, step)
        if reduced is not None:
            out.append(reduced)
    return out


def _forward_demodulate_from(state: ProverState, target: Clause, first_step) -> Optional[Clause]:
    simplified = simplify_trivia(first_step.literals)
    if simplified is TAUTOLOGY:
        return None
    state.stats["generated"] += 1
    state.stats["demodulated"] += 1
    concl = Conclusion(
        simplified,
        first_step.rule,
        first_step.premises,
        direction=first_step.direction,
        last_rw=first_step.last_rw,
        rw_depth=first_step.rw_depth,
        detail=first_step.detail,
    )
    c = state.new_clause(concl, target.is_goal, produced_by_rw=False)
    return _forward_demodulate(state, c)


def _result(status: str, state: ProverState, empty: Optional[int] = None, reason: str = "") -> ProverResult:
    return ProverResult(
        status,
        reason=reason,
        empty_clause=empty,
        clauses=state.clauses,
        stats=dict(state.stats),
        certificates=list(state.certificates),
    )
