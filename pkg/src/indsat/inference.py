"""Generating and simplifying inference rules.

Superposition / equality resolution / equality factoring, the rewrite
family with its per-variant side conditions (plain, peak-avoiding,
left-to-right, combined, and the chaining-restricted forms), equation
effectiveness classification, the two chaining rules, and demodulation.

All rules are pure: premises + ordering in, conclusion drafts out. The
saturation loop and the proof replay kernel both consume them, so the
side conditions live here and nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .clauses import (
    Clause,
    ClausePosition,
    Direction,
    Literal,
    dedup_literals,
    replace_in_clause,
)
from .orderings import Order, TermOrdering
from .terms import (
    EPSILON,
    App,
    Subst,
    Term,
    Var,
    left_of,
    match_term,
    mgu,
    nonvar_positions,
    rename_apart,
    substitute,
    term_vars,
    var_counts,
)

SUP = "sup"
REC = "rec"
REC_PEAK = "rec_peak"
REC_LTR = "rec_ltr"
REC_PEAK_LTR = "rec_peak_ltr"

CALCULI = (SUP, REC, REC_PEAK, REC_LTR, REC_PEAK_LTR)


@dataclass
class Conclusion:
    """A derived clause before it is admitted to the search state."""

    literals: tuple[Literal, ...]
    rule: str
    premises: tuple[int, ...]
    direction: Direction = Direction.DOWN
    last_rw: ClausePosition = EPSILON
    rw_depth: int = 0
    detail: dict = field(default_factory=dict)


def _rename_clause_apart(clause: Clause) -> tuple[Literal, ...]:
    """Variable-disjoint copy of the clause's literals, cached per clause.

    Admitted clauses use canonical x0, x1, ... names, and the cached copy
    uses globally fresh names, so reusing one copy against many partners
    (including the clause itself) is capture-safe.
    """
    cached = clause._renamed
    if cached is not None:
        return cached
    mapping: dict = {}
    out = []
    for lit in clause.literals:
        l, mapping = rename_apart(lit.left, mapping)
        r, mapping = rename_apart(lit.right, mapping)
        out.append(Literal(l, r, lit.positive))
    clause._renamed = tuple(out)
    return clause._renamed


def _orientations(lit: Literal):
    yield lit.left, lit.right
    if lit.left != lit.right:
        yield lit.right, lit.left


def _sup_sources(side: Clause, sel_side: tuple[int, ...]) -> dict[str, list]:
    """Oriented, renamed-apart rewrite sources of a side premise, indexed
    by top symbol and cached per (clause, selection)."""
    cached = side._sources
    if cached is not None and cached[0] == sel_side:
        return cached[1]
    side_lits = _rename_clause_apart(side)
    # a bare-variable side would unify with everything; never a source
    sources: dict[str, list] = {}
    for i_s in sel_side:
        slit = side_lits[i_s]
        if not slit.positive:
            continue
        side_residue = side_lits[:i_s] + side_lits[i_s + 1 :]
        for l, r in _orientations(slit):
            if isinstance(l, Var):
                continue
            sources.setdefault(l.fn.name, []).append((l, r, side_residue))
    side._sources = (sel_side, sources)
    return sources


def superposition(
    main: Clause,
    side: Clause,
    order: TermOrdering,
    sel_main: tuple[int, ...],
    sel_side: tuple[int, ...],
) -> list[Conclusion]:
    """Fig.-2 superposition of ``side`` (the equation premise) into ``main``.

    Emits one conclusion per non-variable subterm u of a selected literal
    of ``main`` unifiable with a selected positive equation side l, when
    r.theta not>= l.theta and t.theta not>= s.theta.
    """
    out: list[Conclusion] = []
    sources = _sup_sources(side, sel_side)
    if not sources or not (sources.keys() & main.head_names()):
        return out
    from .terms import replace_at

    plists = main.position_lists()
    for i_m in sel_main:
        mlit = main.literals[i_m]
        main_residue = main.literals[:i_m] + main.literals[i_m + 1 :]
        for si, p, u in plists[i_m]:
            s_term = mlit.side(si)
            t_term = mlit.side(1 - si)
            if True:
                for l, r, side_residue in sources.get(u.fn.name, ()):
                    if l.ground:
                        if l != u:
                            continue
                        theta = {}
                    elif u.ground and l.size > u.size:
                        continue
                    else:
                        theta = mgu(l, u)
                        if theta is None:
                            continue
                    if order.compare(substitute(r, theta), substitute(l, theta)) in (
                        Order.GT,
                        Order.EQ,
                    ):
                        continue
                    s_theta = substitute(s_term, theta)
                    t_theta = substitute(t_term, theta)
                    if order.compare(t_theta, s_theta) in (Order.GT, Order.EQ):
                        continue
                    new_main_side = replace_at(s_term, p, r)
                    new_lit = Literal(
                        substitute(new_main_side, theta), t_theta, mlit.positive
                    )
                    lits = (
                        (new_lit,)
                        + tuple(x.substitute(theta) for x in main_residue)
                        + tuple(x.substitute(theta) for x in side_residue)
                    )
                    out.append(
                        Conclusion(
                            dedup_literals(lits),
                            "Sup",
                            (main.cid, side.cid),
                            detail={"pos": (i_m + 1, si + 1) + p},
                        )
                    )
    return out


def equality_resolution(
    clause: Clause, order: TermOrdering, sel: tuple[int, ...]
) -> list[Conclusion]:
    out = []
    for i in sel:
        lit = clause.literals[i]
        if lit.positive:
            continue
        theta = mgu(lit.left, lit.right)
        if theta is None:
            continue
        residue = clause.literals[:i] + clause.literals[i + 1 :]
        lits = tuple(x.substitute(theta) for x in residue)
        out.append(Conclusion(dedup_literals(lits), "EqRes", (clause.cid,)))
    return out


def equality_factoring(
    clause: Clause, order: TermOrdering, sel: tuple[int, ...]
) -> list[Conclusion]:
    out = []
    for i in sel:
        li = clause.literals[i]
        if not li.positive:
            continue
        for j in sel:
            if i == j or not clause.literals[j].positive:
                continue
            lj = clause.literals[j]
            residue = tuple(
                x for k, x in enumerate(clause.literals) if k not in (i, j)
            )
            for s, t in _orientations(li):
                for u, w in _orientations(lj):
                    theta = mgu(s, u)
                    if theta is None:
                        continue
                    if order.compare(substitute(t, theta), substitute(s, theta)) in (
                        Order.GT,
                        Order.EQ,
                    ):
                        continue
                    if order.compare(substitute(w, theta), substitute(t, theta)) in (
                        Order.GT,
                        Order.EQ,
                    ):
                        continue
                    lits = (
                        Literal(substitute(s, theta), substitute(t, theta), True),
                        Literal(substitute(t, theta), substitute(w, theta), False),
                    ) + tuple(x.substitute(theta) for x in residue)
                    out.append(
                        Conclusion(dedup_literals(lits), "EqFac", (clause.cid,))
                    )
    return out


def unit_equation(clause: Clause) -> Optional[Literal]:
    """The literal of a unit positive equation clause, else None."""
    if len(clause.literals) == 1 and clause.literals[0].positive:
        return clause.literals[0]
    return None


def classify_effectiveness(lit: Literal, order: TermOrdering) -> bool:
    """True when the equation is effective.

    Ineffective: orientable l > r, l linear, and no strict non-variable
    subterm of l can instantiate into Ind(T) (inductive sort, head not a
    base constructor). Unorientable equations are effective.
    """
    cache = getattr(order, "_eff_cache", None)
    if cache is None:
        cache = order._eff_cache = {}
    hit = cache.get(lit)
    if hit is None:
        hit = _classify_effectiveness(lit, order)
        cache[lit] = hit
    return hit


def _classify_effectiveness(lit: Literal, order: TermOrdering) -> bool:
    for l, r in _orientations(lit):
        if order.compare(l, r) is not Order.GT:
            continue
        if any(k > 1 for k in var_counts(l).values()):
            return True
        for p, s in nonvar_positions(l):
            if p == EPSILON:
                continue
            if s.sort.inductive and not (isinstance(s, App) and s.fn.base_constructor):
                return True
        return False
    return True


def rewrite(
    main: Clause,
    eq: Clause,
    variant: str,
    order: TermOrdering,
    max_depth: Optional[int] = None,
    chaining: bool = False,
    eq_effective: Optional[bool] = None,
) -> list[Conclusion]:
    """The Rw family: rewrite instances of a unit equation inside ``main``.

    Side conditions depend on the calculus variant:
      rec           no ordering condition
      rec_peak      Rw-down needs the instance not <=, main and equation
                    annotated down; Rw-up needs the instance not >=
      rec_ltr       the rewritten position must not lie left of the main
                    premise's last rewrite position
      rec_peak_ltr  both, with the up rule relaxed on down-annotated mains
    With chaining, upward rewrites with ineffective equations are refused
    (the CRw condition) and conclusions are recorded as CRw.
    """
    elit = unit_equation(eq)
    if elit is None or variant == SUP:
        return []
    if max_depth is not None and main.rw_depth >= max_depth:
        return []
    if chaining and eq_effective is None:
        eq_effective = classify_effectiveness(elit, order)
    out: list[Conclusion] = []
    eq_lit_renamed = _rename_clause_apart(eq)[0]
    for l, r in _orientations(eq_lit_renamed):
        if isinstance(l, Var):
            # a bare-variable side matches every position; such rewrites
            # only pad terms and are never needed for the consequences
            continue
        plists = main.position_lists()
        l_ground = l.ground
        for li, lit in enumerate(main.literals):
            for si, p, u in plists[li]:
                if True:
                    if u.fn != l.fn:
                        continue
                    if l_ground:
                        if l != u:
                            continue
                        theta = {}
                    else:
                        theta = match_term(l, u)
                        if theta is None:
                            continue
                    r_inst = substitute(r, theta)
                    cmp = order.compare(u, r_inst)  # l.theta vs r.theta
                    if cmp is Order.EQ:
                        continue
                    qpos: ClausePosition = (li + 1, si + 1) + p
                    options = _rewrite_variant_conditions(
                        variant, main, eq, cmp, qpos, chaining, eq_effective
                    )
                    if not options:
                        continue
                    new_lits = dedup_literals(
                        replace_in_clause(main.literals, qpos, r_inst)
                    )
                    for rule, direction in options:
                        out.append(
                            Conclusion(
                                new_lits,
                                rule,
                                (main.cid, eq.cid),
                                direction=direction,
                                last_rw=qpos,
                                rw_depth=main.rw_depth + 1,
                                detail={"pos": qpos},
                            )
                        )
    return out


def _rewrite_variant_conditions(
    variant: str,
    main: Clause,
    eq: Clause,
    cmp: Order,
    qpos: ClausePosition,
    chaining: bool,
    eq_effective: Optional[bool],
) -> list[tuple[str, Direction]]:
    """Admissible (rule name, conclusion direction) options for one redex.

    Incomparable instances can satisfy both the down and the up rule of
    the peak variants; both inferences are emitted then.
    """
    down_inst = cmp not in (Order.LT, Order.EQ)  # l.theta not<= r.theta
    up_inst = cmp not in (Order.GT, Order.EQ)  # l.theta not>= r.theta
    crw_ok = (cmp is not Order.LT) or bool(eq_effective)  # l.theta not< r.theta or effective
    rule = "CRw" if chaining else "Rw"

    if variant == REC:
        if chaining and not crw_ok:
            return []
        return [(rule, Direction.DOWN if cmp is Order.GT else Direction.UP)]

    if variant == REC_LTR:
        if left_of(qpos, main.last_rw):
            return []
        if chaining and not crw_ok:
            return []
        return [(rule, Direction.DOWN if cmp is Order.GT else Direction.UP)]

    options: list[tuple[str, Direction]] = []
    if variant == REC_PEAK:
        # down rule: both premises down; up rule: any main, equation down
        if eq.direction is Direction.DOWN:
            if down_inst and main.direction is Direction.DOWN:
                options.append((rule if chaining else "RwDown", Direction.DOWN))
            if up_inst and (not chaining or crw_ok):
                options.append((rule if chaining else "RwUp", Direction.UP))
        return options

    if variant == REC_PEAK_LTR:
        if eq.direction is Direction.DOWN:
            if (
                down_inst
                and main.direction is Direction.DOWN
                and not left_of(qpos, main.last_rw)
            ):
                options.append((rule if chaining else "RwDown", Direction.DOWN))
            if (
                up_inst
                and (main.direction is Direction.DOWN or not left_of(qpos, main.last_rw))
                and (not chaining or crw_ok)
            ):
                options.append((rule if chaining else "RwUp", Direction.UP))
        return options

    raise ValueError(f"unknown calculus variant {variant!r}")


def chain1(ineff: Clause, eff: Clause, order: TermOrdering) -> list[Conclusion]:
    """Pre-compose an ineffective equation s[l']=t with an effective l=r.

    Conditions: theta = mgu(l, l'), s[l']=t ineffective, l.theta not>=
    r.theta and l=r effective. Conclusion (s[r]=t).theta, annotated down.
    """
    ilit = unit_equation(ineff)
    elit_clause = unit_equation(eff)
    if ilit is None or elit_clause is None:
        return []
    if classify_effectiveness(ilit, order):
        return []
    if not classify_effectiveness(elit_clause, order):
        return []
    s_big, t_small = _oriented(ilit, order)
    elit = _rename_clause_apart(eff)[0]
    out = []
    from .terms import replace_at

    for l, r in _orientations(elit):
        for p, lp in nonvar_positions(s_big):
            theta = mgu(l, lp)
            if theta is None:
                continue
            if order.compare(substitute(l, theta), substitute(r, theta)) in (
                Order.GT,
                Order.EQ,
            ):
                continue
            new_s = substitute(replace_at(s_big, p, r), theta)
            new_t = substitute(t_small, theta)
            out.append(
                Conclusion(
                    dedup_literals((Literal(new_s, new_t, True),)),
                    "Chain1",
                    (ineff.cid, eff.cid),
                    detail={"pos": p},
                )
            )
    return out


def chain2(eff: Clause, ineff: Clause, order: TermOrdering) -> list[Conclusion]:
    """Rewrite inside the smaller side of an effective equation with an
    ineffective one, downward.

    Conditions: theta = mgu(l, l'), l=r ineffective, t[l'].theta not>=
    s.theta and s=t[l'] effective.
    """
    elit = unit_equation(eff)
    ilit_clause = unit_equation(ineff)
    if elit is None or ilit_clause is None:
        return []
    if not classify_effectiveness(elit, order):
        return []
    if classify_effectiveness(ilit_clause, order):
        return []
    ilit = _rename_clause_apart(ineff)[0]
    l_big, r_small = _oriented(ilit, order)
    out = []
    from .terms import replace_at

    for s, t in _orientations(elit):
        for p, lp in nonvar_positions(t):
            theta = mgu(l_big, lp)
            if theta is None:
                continue
            t_inst = substitute(t, theta)
            s_inst = substitute(s, theta)
            if order.compare(t_inst, s_inst) in (Order.GT, Order.EQ):
                continue
            new_t = substitute(replace_at(t, p, r_small), theta)
            out.append(
                Conclusion(
                    dedup_literals((Literal(s_inst, new_t, True),)),
                    "Chain2",
                    (eff.cid, ineff.cid),
                    detail={"pos": p},
                )
            )
    return out


def _oriented(lit: Literal, order: TermOrdering) -> tuple[Term, Term]:
    if order.compare(lit.left, lit.right) is Order.GT:
        return lit.left, lit.right
    return lit.right, lit.left


def build_demod_index(equations, order: TermOrdering) -> dict[str, list]:
    """Top-symbol index over globally oriented unit equations.

    Maps the head symbol of each equation's larger side to (equation
    clause, larger side, smaller side); unorientable equations are not
    demodulators.
    """
    index: dict[str, list] = {}
    for eq in equations:
        elit = unit_equation(eq)
        if elit is None:
            continue
        for l, r in _orientations(elit):
            if isinstance(l, Var):
                continue
            if order.compare(l, r) is Order.GT:
                index.setdefault(l.fn.name, []).append((eq, l, r))
                break
    return index


def all_demodulation_steps(
    clause: Clause, eq: Clause, order: TermOrdering
) -> list[Conclusion]:
    """Every single demodulation step of ``clause`` by ``eq`` (replay use)."""
    out = []
    elit = unit_equation(eq)
    if elit is None or eq.cid == clause.cid:
        return out
    for li, lit in enumerate(clause.literals):
        for si in (0, 1):
            for p, u in nonvar_positions(lit.side(si)):
                for l, r in _orientations(elit):
                    if order.compare(l, r) is not Order.GT:
                        continue
                    theta = match_term(l, u)
                    if theta is None:
                        continue
                    r_inst = substitute(r, theta)
                    if not p and (
                        order.clause_compare([Literal(u, r_inst, True)], clause.literals)
                        is not Order.LT
                    ):
                        continue
                    qpos = (li + 1, si + 1) + p
                    out.append(
                        Conclusion(
                            dedup_literals(replace_in_clause(clause.literals, qpos, r_inst)),
                            "Demod",
                            (clause.cid, eq.cid),
                            direction=clause.direction,
                            last_rw=clause.last_rw,
                            rw_depth=clause.rw_depth,
                            detail={"pos": qpos},
                        )
                    )
    return out


def demodulation_step(
    clause: Clause,
    equations: Optional[list[Clause]],
    order: TermOrdering,
    index: Optional[dict[str, list]] = None,
) -> Optional[Conclusion]:
    """One simplifying rewrite of ``clause`` by an oriented unit equation.

    Picks the first (leftmost-outermost) position where some equation
    l > r matches with (l=r).theta smaller than the clause. Returns None
    when the clause is in normal form for the given equations. Callers in
    the saturation loop pass a prebuilt top-symbol ``index``.
    """
    if index is None:
        index = build_demod_index(equations or [], order)
    for li, lit in enumerate(clause.literals):
        for si in (0, 1):
            side_term = lit.side(si)
            for p, u in nonvar_positions(side_term):
                for eq, l, r in index.get(u.fn.name, ()):
                    if eq.cid == clause.cid:
                        continue
                    theta = match_term(l, u)
                    if theta is None:
                        continue
                    r_inst = substitute(r, theta)
                    # strictly inside a side, the instance equation is
                    # below the clause automatically (subterm property)
                    if not p and (
                        order.clause_compare(
                            [Literal(u, r_inst, True)], clause.literals
                        )
                        is not Order.LT
                    ):
                        continue
                    qpos = (li + 1, si + 1) + p
                    new_lits = replace_in_clause(clause.literals, qpos, r_inst)
                    return Conclusion(
                        dedup_literals(new_lits),
                        "Demod",
                        (clause.cid, eq.cid),
                        direction=clause.direction,
                        last_rw=clause.last_rw,
                        rw_depth=clause.rw_depth,
                        detail={"pos": qpos},
                    )
    return None
