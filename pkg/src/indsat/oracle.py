"""Brute-force oracles backing the property and acceptance tests.

Nothing here is used by the prover itself: reference orderings are
independent textbook transcriptions, entailment goes through a naive
congruence closure, and derivability questions are answered by bounded
rewrite closures instead of the saturation machinery.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Optional

from . import inference as inf
from .clauses import Clause, Direction, Literal
from .induction import is_inductively_redundant
from .orderings import Order, TermOrdering
from .terms import (
    App,
    EPSILON,
    Term,
    Var,
    match_term,
    nonvar_positions,
    substitute,
)


# ---------------------------------------------------------------------------
# reference orderings (boolean "greater" transcriptions of the definitions)


def naive_kbo_gt(s: Term, t: Term, ranks: dict[str, int], weights: Optional[dict[str, int]] = None) -> bool:
    weights = weights or {}

    def w(u: Term) -> int:
        if isinstance(u, Var):
            return 1
        return weights.get(u.fn.name, 1) + sum(w(a) for a in u.args)

    def vc(u: Term) -> Counter:
        if isinstance(u, Var):
            return Counter([u])
        c: Counter = Counter()
        for a in u.args:
            c += vc(a)
        return c

    if s == t:
        return False
    cs, ct = vc(s), vc(t)
    if any(cs[v] < k for v, k in ct.items()):
        return False
    ws, wt = w(s), w(t)
    if ws > wt:
        return True
    if ws < wt:
        return False
    if isinstance(s, Var) or isinstance(t, Var):
        # equal weight, s covers t's variables: s > x only when x occurs in s
        return isinstance(t, Var) and not isinstance(s, Var)
    if ranks[s.fn.name] > ranks[t.fn.name]:
        return True
    if s.fn.name != t.fn.name:
        return False
    for a, b in zip(s.args, t.args):
        if a == b:
            continue
        return naive_kbo_gt(a, b, ranks, weights)
    return False


def naive_lpo_gt(s: Term, t: Term, ranks: dict[str, int]) -> bool:
    if s == t:
        return False
    if isinstance(t, Var):
        return _occurs(t, s)
    if isinstance(s, Var):
        return False
    if any(a == t or naive_lpo_gt(a, t, ranks) for a in s.args):
        return True
    if not all(naive_lpo_gt(s, b, ranks) for b in t.args):
        return False
    if ranks[s.fn.name] > ranks[t.fn.name]:
        return True
    if s.fn.name != t.fn.name:
        return False
    for a, b in zip(s.args, t.args):
        if a == b:
            continue
        return naive_lpo_gt(a, b, ranks)
    return False


def _occurs(v: Var, t: Term) -> bool:
    if t == v:
        return True
    if isinstance(t, Var):
        return False
    return any(_occurs(v, a) for a in t.args)


def naive_multiset_gt(m: list, n: list, gt) -> bool:
    """Definition-direct bag extension: remove common elements, then every
    remaining n-element must be dominated by some remaining m-element."""
    m, n = list(m), list(n)
    for x in list(m):
        if x in n:
            m.remove(x)
            n.remove(x)
    if not m:
        return False
    return all(any(gt(x, y) for x in m) for y in n)


# ---------------------------------------------------------------------------
# ground entailment by congruence closure


class CongruenceClosure:
    """Naive congruence closure over ground terms (oracle scale)."""

    def __init__(self):
        self.terms: set[Term] = set()
        self.rep: dict[Term, Term] = {}

    def add_term(self, t: Term) -> None:
        if t in self.terms:
            return
        self.terms.add(t)
        self.rep[t] = t
        for a in getattr(t, "args", ()):
            self.add_term(a)

    def find(self, t: Term) -> Term:
        while self.rep[t] != t:
            self.rep[t] = self.rep[self.rep[t]]
            t = self.rep[t]
        return t

    def merge(self, s: Term, t: Term) -> None:
        self.add_term(s)
        self.add_term(t)
        rs, rt = self.find(s), self.find(t)
        if rs != rt:
            self.rep[rs] = rt
        self._propagate()

    def _propagate(self) -> None:
        changed = True
        while changed:
            changed = False
            apps = [t for t in self.terms if isinstance(t, App) and t.args]
            for i, a in enumerate(apps):
                for b in apps[i + 1 :]:
                    if a.fn != b.fn or self.find(a) == self.find(b):
                        continue
                    if all(self.find(x) == self.find(y) for x, y in zip(a.args, b.args)):
                        self.rep[self.find(a)] = self.find(b)
                        changed = True

    def equal(self, s: Term, t: Term) -> bool:
        self.add_term(s)
        self.add_term(t)
        self._propagate()
        return self.find(s) == self.find(t)


def ground_entails(premises: list[tuple[Literal, ...]], conclusion: tuple[Literal, ...]) -> bool:
    """premises |= conclusion for ground unit premises and a ground clause.

    Checks unsatisfiability of premises + negated conclusion: positive
    facts go into a congruence closure, and any disequality whose sides
    collapse witnesses unsatisfiability.
    """
    cc = CongruenceClosure()
    diseqs: list[tuple[Term, Term]] = []
    for lits in premises:
        if len(lits) != 1:
            raise ValueError("ground_entails expects unit premises")
        lit = lits[0]
        if lit.positive:
            cc.merge(lit.left, lit.right)
        else:
            diseqs.append((lit.left, lit.right))
    for lit in conclusion:
        if lit.positive:
            diseqs.append((lit.left, lit.right))
        else:
            cc.merge(lit.left, lit.right)
    return any(cc.equal(s, t) for s, t in diseqs)


# ---------------------------------------------------------------------------
# bounded rewrite closures


def _state_key(clause: Clause):
    return (clause.literals, clause.direction, clause.last_rw)


def _clause_key(literals) -> frozenset:
    return frozenset(Counter(literals).items())


def ground_closure(
    seed: Clause,
    equations: list[Clause],
    k: int,
    variant: str = inf.REC,
    order: Optional[TermOrdering] = None,
    chaining: bool = False,
    cap: int = 20000,
    count_productions: bool = False,
):
    """All clauses reachable from ``seed`` within ``k`` rewrite steps.

    Returns (states, produced) where states is a dict state-key -> Clause
    and produced counts how many times each literal-multiset was emitted
    (for the diamond-duplication assertions).
    """
    if k > 6 and seed.ground:
        raise ValueError("closure depth capped at 6 for ground specs")
    states: dict = {_state_key(seed): seed}
    produced: Counter = Counter()
    frontier = [seed]
    for _ in range(k):
        nxt = []
        for c in frontier:
            for eq in equations:
                for concl in inf.rewrite(c, eq, variant, order, None, chaining=chaining):
                    nc = Clause(
                        concl.literals,
                        cid=0,
                        direction=concl.direction,
                        last_rw=concl.last_rw,
                        rw_depth=c.rw_depth + 1,
                    )
                    produced[_clause_key(nc.literals)] += 1
                    key = _state_key(nc)
                    if key in states or len(states) >= cap:
                        continue
                    states[key] = nc
                    nxt.append(nc)
        frontier = nxt
        if not frontier:
            break
    return states, produced


def closure_clause_keys(states: dict) -> set:
    return {_clause_key(lits) for (lits, _d, _p) in states}


def sup_saturate_equations(
    equations: list[Clause], order: TermOrdering, cap: int = 200
) -> list[Clause]:
    """Close a unit-equation set under superposition among the equations.

    Restricted calculi may need these superposition conclusions to cut
    peaks; the closure adds them as extra rewrite equations.
    """
    pool = list(equations)
    keys = {_clause_key(c.literals) for c in pool}
    i = 0
    while i < len(pool):
        a = pool[i]
        i += 1
        for b in pool[: i]:
            for main, side in ((a, b), (b, a)):
                if inf.unit_equation(main) is None or inf.unit_equation(side) is None:
                    continue
                for concl in inf.superposition(main, side, order, (0,), (0,)):
                    if len(concl.literals) != 1 or not concl.literals[0].positive:
                        continue
                    key = _clause_key(concl.literals)
                    if key in keys or len(pool) >= cap + len(equations):
                        continue
                    keys.add(key)
                    pool.append(Clause(concl.literals, cid=0))
    return pool[len(equations) :]


def chain_saturate_equations(
    equations: list[Clause], order: TermOrdering, cap: int = 200
) -> list[Clause]:
    """Close a unit-equation set under the two chaining rules."""
    pool = list(equations)
    keys = {_clause_key(c.literals) for c in pool}
    i = 0
    while i < len(pool):
        a = pool[i]
        i += 1
        for b in pool[:i]:
            for x, y in ((a, b), (b, a)):
                for concl in inf.chain1(x, y, order) + inf.chain2(x, y, order):
                    key = _clause_key(concl.literals)
                    if key in keys or len(pool) >= cap + len(equations):
                        continue
                    keys.add(key)
                    pool.append(Clause(concl.literals, cid=0))
    return pool[len(equations) :]


def ed_check(
    equations: list[Clause],
    seed: Clause,
    extra: Literal,
    k: int,
    order: TermOrdering,
    variant: str,
    K: Optional[int] = None,
    chaining: bool = False,
):
    """Bounded equational-derivability check.

    For every D in the unrestricted rewrite closure at depth <= k and
    every occurrence of an instance of ``extra``'s left side in D, the
    rewritten clause must lie in the variant-filtered closure (with
    ``extra`` added, and superposition-derived equations available) at
    depth <= K. Returns None, or the first violating (from, to) pair
    after re-checking with extra slack.
    """
    unrestricted, _ = ground_closure(seed, equations, k, inf.REC, order)
    extra_clause = Clause((extra,), cid=0)
    eqs_plus = equations + [extra_clause]
    sup_new = sup_saturate_equations(eqs_plus, order, cap=60)
    if K is None:
        K = 2 * k + len(sup_new)
    K = min(K, 10)

    def restricted_keys(depth: int) -> set:
        states, _ = ground_closure(
            seed, eqs_plus + sup_new, depth, variant, order, chaining=chaining
        )
        return closure_clause_keys(states)

    rkeys = restricted_keys(K)
    missing: list[tuple[Clause, tuple[Literal, ...]]] = []
    for (lits, _d, _p), clause in list(unrestricted.items()):
        for li, lit in enumerate(clause.literals):
            for si in (0, 1):
                for p, u in nonvar_positions(lit.side(si)):
                    theta = match_term(extra.left, u)
                    if theta is None:
                        continue
                    target = _rewritten(clause.literals, li, si, p, substitute(extra.right, theta))
                    if _clause_key(target) not in rkeys:
                        missing.append((clause, target))
    if not missing:
        return None
    rkeys = restricted_keys(min(K + 2, 12))
    for clause, target in missing:
        if _clause_key(target) not in rkeys:
            return (clause.literals, target)
    return None


def _rewritten(literals, li, si, p, replacement):
    from .clauses import replace_in_clause

    return replace_in_clause(literals, (li + 1, si + 1) + p, replacement)


def chain_cover_check(
    equations: list[Clause],
    seed: Clause,
    k: int,
    order: TermOrdering,
    K: Optional[int] = None,
):
    """Theorem-5-style check: every inductively non-redundant clause of the
    plain rewrite closure appears in the CRw/Chain closure."""
    unrestricted, _ = ground_closure(seed, equations, k, inf.REC, order)
    chains = chain_saturate_equations(equations, order, cap=80)
    if K is None:
        K = 2 * k + len(chains)
    K = min(K, 10)
    covered_states, _ = ground_closure(
        seed, equations + chains, K, inf.REC, order, chaining=True
    )
    covered = closure_clause_keys(covered_states)
    violations = []
    for (lits, _d, _p), clause in unrestricted.items():
        if _clause_key(lits) in covered:
            continue
        if is_inductively_redundant(clause, equations, order):
            continue
        violations.append(clause.literals)
    return violations
