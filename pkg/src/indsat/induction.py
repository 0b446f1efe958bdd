"""Structural induction over algebraic datatypes and its redundancy checks.

The induction inference targets a ground negative literal, abstracts every
occurrence of the induction term, instantiates the constructor-based
schema for the term's datatype with fresh Skolem constants, and emits the
clausified negation resolved against the premise. Two sufficient
conditions let the saturation loop skip inferences that a smaller clause
already covers; every skip carries a replayable certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

from .clauses import Clause, Literal, dedup_literals
from .inference import Conclusion, classify_effectiveness, demodulation_step, unit_equation, _orientations
from .orderings import Order, TermOrdering
from .terms import (
    App,
    FunctionSymbol,
    Position,
    Signature,
    Term,
    Var,
    match_term,
    nonvar_positions,
    positions,
    replace_at,
    substitute,
)


def in_ind_t(t: Term) -> bool:
    """Membership in Ind(T): ground, inductive sort, not a constructor
    application.

    Constructor-headed terms are excluded outright (not only the base
    constructors): inducting on suc(u)-shaped terms spawns an unbounded
    cascade of degenerate instances, and the useful induction targets are
    Skolem constants and defined-function terms.
    """
    return t.ground and t.sort.inductive and not (isinstance(t, App) and t.fn.constructor)


@dataclass(frozen=True)
class InductionCandidate:
    lit_index: int
    term: Term
    occurrences: tuple[tuple[int, ...], ...]  # (side 1|2, *path) per occurrence


def candidate_induction_terms(
    clause: Clause, complex_terms: bool = True
) -> list[InductionCandidate]:
    """All (ground negative literal, induction term) pairs of a clause.

    Complex (non-constant) terms are admitted unless ``complex_terms`` is
    off, in which case only constants qualify.
    """
    out: list[InductionCandidate] = []
    for i, lit in enumerate(clause.literals):
        if lit.positive or not lit.ground:
            continue
        occ: dict[Term, list[tuple[int, ...]]] = {}
        for si, side in ((1, lit.left), (2, lit.right)):
            for p, t in positions(side):
                if in_ind_t(t) and (complex_terms or not t.args):
                    occ.setdefault(t, []).append((si,) + p)
        for t, ps in occ.items():
            # a term whose single occurrence is a whole literal side would
            # abstract to x = u / x != u: that schema instance tries to
            # prove every datatype value equal to u and never contributes
            if len(ps) == 1 and len(ps[0]) == 1:
                continue
            out.append(InductionCandidate(i, t, tuple(ps)))
    return out


def abstract_literal(lit: Literal, t: Term, x: Var) -> Literal:
    """The literal with every occurrence of ``t`` replaced by ``x``."""
    return Literal(_abstract(lit.left, t, x), _abstract(lit.right, t, x), lit.positive)


def _abstract(term: Term, t: Term, x: Var) -> Term:
    if term == t:
        return x
    if isinstance(term, Var) or not term.args:
        return term
    return App(term.fn, tuple(_abstract(a, t, x) for a in term.args))


def apply_structural_induction(
    clause: Clause,
    cand: InductionCandidate,
    signature: Signature,
    skolem_prefix: str = "c",
    fresh=None,
) -> list[Conclusion]:
    """Instantiate the structural schema for the candidate's datatype.

    One application allocates one batch of fresh Skolem constants shared
    by all emitted clauses: for each constructor, one constant per
    argument. Emitted clauses are the CNF of the negated schema instance
    disjoined with the premise residue; for a datatype with one base and
    one recursive constructor this is exactly the familiar two-clause
    pattern (negated base case with the hypothesis, and with the negated
    step conclusion).
    """
    t = cand.term
    ctors = signature.constructors(t.sort)
    if not ctors:
        return []
    if fresh is None:
        fresh = lambda sort: signature.fresh_constant(sort, skolem_prefix)
    lit = clause.literals[cand.lit_index]
    residue = clause.literals[: cand.lit_index] + clause.literals[cand.lit_index + 1 :]
    x = Var("_ind", t.sort)
    neg_abs = abstract_literal(lit, t, x)  # same polarity as premise: not L[x]
    pos_abs = neg_abs.complement()

    skolems: list[str] = []
    base_literals: list[Literal] = []
    step_groups: list[list[Literal]] = []
    for ctor in ctors:
        args: list[Term] = []
        hyps: list[Literal] = []
        for s in ctor.arg_sorts:
            sk = fresh(s)
            skolems.append(sk.name)
            arg = App(sk)
            args.append(arg)
            if s == t.sort:
                hyps.append(pos_abs.substitute({x: arg}))
        applied = App(ctor, tuple(args))
        if ctor.base_constructor:
            base_literals.append(neg_abs.substitute({x: applied}))
        else:
            step_groups.append(hyps + [neg_abs.substitute({x: applied})])

    out = []
    for combo in product(*step_groups):
        lits = tuple(base_literals) + tuple(combo) + residue
        out.append(
            Conclusion(
                dedup_literals(lits),
                "Ind",
                (clause.cid,),
                detail={"term": t, "skolems": tuple(skolems)},
            )
        )
    return out


@dataclass
class SkipCertificate:
    """Replayable witness that an induction inference is redundant."""

    rule: str  # "IndSkip-I" | "IndSkip-II"
    clause_id: int
    lit_index: int
    term: Term
    equation_id: int
    eq_left: Term  # orientation of the equation used, as (l, r)
    eq_right: Term
    theta: dict[Var, Term]

    def as_record(self, render) -> dict:
        return {
            "rule": self.rule,
            "clause": self.clause_id,
            "term": render(self.term),
            "equation": self.equation_id,
            "theta": {v.name: render(t) for v, t in self.theta.items()},
        }


def ind_redundant_condition1(
    clause: Clause, cand: InductionCandidate, eq: Clause, order: TermOrdering
) -> Optional[SkipCertificate]:
    """Lemma-style Condition I: some instance of the equation's larger side
    sits strictly inside the abstracted literal and stays oriented after
    substituting the induction term back in."""
    elit = unit_equation(eq)
    if elit is None:
        return None
    lit = clause.literals[cand.lit_index]
    x = Var("_ind", cand.term.sort)
    abs_lit = abstract_literal(lit, cand.term, x)
    back = {x: cand.term}
    for l, r in _orientations(elit):
        for side in (abs_lit.left, abs_lit.right):
            for _, sub in nonvar_positions(side):
                theta = match_term(l, sub)
                if theta is None:
                    continue
                l_sigma = substitute(sub, back)
                r_sigma = substitute(substitute(r, theta), back)
                if order.compare(l_sigma, r_sigma) is Order.GT:
                    return SkipCertificate(
                        "IndSkip-I",
                        clause.cid,
                        cand.lit_index,
                        cand.term,
                        eq.cid,
                        l,
                        r,
                        theta,
                    )
    return None


def ind_redundant_condition2(
    clause: Clause, cand: InductionCandidate, eq: Clause, order: TermOrdering
) -> Optional[SkipCertificate]:
    """Condition II: some instance of the equation's larger side is a
    subterm of the induction term itself."""
    elit = unit_equation(eq)
    if elit is None:
        return None
    for l, r in _orientations(elit):
        for _, sub in nonvar_positions(cand.term):
            theta = match_term(l, sub)
            if theta is None:
                continue
            if order.compare(sub, substitute(r, theta)) is Order.GT:
                return SkipCertificate(
                    "IndSkip-II",
                    clause.cid,
                    cand.lit_index,
                    cand.term,
                    eq.cid,
                    l,
                    r,
                    theta,
                )
    return None


def find_skip_certificate(
    clause: Clause,
    cand: InductionCandidate,
    equations: Iterable[Clause],
    order: TermOrdering,
) -> Optional[SkipCertificate]:
    for eq in equations:
        cert = ind_redundant_condition1(clause, cand, eq, order)
        if cert is not None:
            return cert
        cert = ind_redundant_condition2(clause, cand, eq, order)
        if cert is not None:
            return cert
    return None


def validate_certificate(
    cert: SkipCertificate, clause: Clause, eq: Clause, order: TermOrdering
) -> bool:
    """Independent replay of a skip certificate.

    Re-applies the recorded substitution to the recorded equation
    orientation and re-checks the subterm and ordering conditions from
    scratch; never trusts the engine's accept decision.
    """
    elit = unit_equation(eq)
    if elit is None:
        return False
    if {cert.eq_left, cert.eq_right} != {elit.left, elit.right}:
        return False
    if cert.lit_index >= len(clause.literals):
        return False
    lit = clause.literals[cert.lit_index]
    if lit.positive or not lit.ground:
        return False
    l_inst = substitute(cert.eq_left, cert.theta)
    r_inst = substitute(cert.eq_right, cert.theta)
    if cert.rule == "IndSkip-II":
        if not any(sub == l_inst for _, sub in positions(cert.term)):
            return False
        return order.compare(l_inst, r_inst) is Order.GT
    if cert.rule == "IndSkip-I":
        x = Var("_ind", cert.term.sort)
        abs_lit = abstract_literal(lit, cert.term, x)
        occurs = any(
            sub == l_inst
            for side in (abs_lit.left, abs_lit.right)
            for _, sub in positions(side)
        )
        if not occurs:
            return False
        back = {x: cert.term}
        return (
            order.compare(substitute(l_inst, back), substitute(r_inst, back))
            is Order.GT
        )
    return False


def is_inductively_redundant(
    clause: Clause,
    equations: list[Clause],
    order: TermOrdering,
    via_rewrite: Optional[tuple[Clause, Term, Term]] = None,
) -> bool:
    """First-order redundant and every induction inference on it redundant.

    ``via_rewrite`` enables the fast path for conclusions of ineffective
    upward rewrites: (equation clause, replaced instance, replacement);
    such a clause is inductively redundant outright when it exceeds the
    equation instance.
    """
    if via_rewrite is not None:
        eq, l_inst, r_inst = via_rewrite
        elit = unit_equation(eq)
        if elit is not None and not classify_effectiveness(elit, order):
            inst = Literal(l_inst, r_inst, True)
            if order.clause_compare(clause.literals, [inst]) is Order.GT:
                return True
    if demodulation_step(clause, equations, order) is None:
        return False
    for cand in candidate_induction_terms(clause):
        if find_skip_certificate(clause, cand, equations, order) is None:
            return False
    return True
