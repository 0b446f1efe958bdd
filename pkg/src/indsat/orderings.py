"""Simplification orderings: KBO with constant weights, LPO, bag extensions.

Both orderings return a four-valued result; incomparable is first-class
because the calculus side conditions are phrased with "not >=" / "not <="
and incomparable instances must satisfy them.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional

from .terms import App, FunctionSymbol, Signature, Term, Var, occurs_in, var_counts


class Order(Enum):
    GT = "greater"
    LT = "less"
    EQ = "equal"
    INC = "incomparable"


def flip(o: Order) -> Order:
    if o is Order.GT:
        return Order.LT
    if o is Order.LT:
        return Order.GT
    return o


class Precedence:
    """Total strict order on function symbols.

    Built from a signature in one of three modes; symbols declared after
    construction (Skolems) get ranks above everything seen before, in
    first-use order, so runs stay deterministic.
    """

    def __init__(self, ranks: dict[str, int]):
        self._ranks = dict(ranks)
        self._next = max(self._ranks.values(), default=-1) + 1

    @classmethod
    def from_signature(cls, sig: Signature, mode: str = "decl", explicit: Optional[list[str]] = None) -> "Precedence":
        names = list(sig.declaration_order)
        if mode == "decl":
            ordered = names
        elif mode == "arity":
            ordered = sorted(names, key=lambda n: (sig.symbols[n].arity, names.index(n)))
        elif mode == "explicit":
            if explicit is None:
                raise ValueError("explicit precedence needs a symbol list")
            missing = [n for n in names if n not in explicit]
            unknown = [n for n in explicit if n not in sig.symbols]
            if unknown:
                raise ValueError(f"explicit precedence names undeclared symbols: {unknown}")
            ordered = list(explicit) + missing
        else:
            raise ValueError(f"unknown precedence mode {mode!r}")
        return cls({n: i for i, n in enumerate(ordered)})

    def rank(self, fn: FunctionSymbol) -> int:
        r = self._ranks.get(fn.name)
        if r is None:
            r = self._next
            self._ranks[fn.name] = r
            self._next += 1
        return r

    def greater(self, f: FunctionSymbol, g: FunctionSymbol) -> bool:
        return self.rank(f) > self.rank(g)


class TermOrdering:
    """Common surface: four-valued compare plus literal/clause extensions.

    Results are memoized per ordering instance; term pairs recur heavily
    in saturation (demodulation retries, condition checks).
    """

    def __init__(self):
        self._cache: dict = {}

    def compare(self, s: Term, t: Term) -> Order:
        key = (s, t)
        res = self._cache.get(key)
        if res is None:
            res = self._compare(s, t)
            self._cache[key] = res
            self._cache[(t, s)] = flip(res)
        return res

    def _compare(self, s: Term, t: Term) -> Order:
        raise NotImplementedError

    def greater(self, s: Term, t: Term) -> bool:
        return self.compare(s, t) is Order.GT

    def literal_compare(self, l1, l2) -> Order:
        return multiset_compare(_literal_multiset(l1), _literal_multiset(l2), self.compare)

    def clause_compare(self, lits1, lits2) -> Order:
        return multiset_compare(list(lits1), list(lits2), self.literal_compare)


def _literal_multiset(lit) -> list[Term]:
    # standard encoding: s=t as {s,t}; s!=t as {s,s,t,t}
    if lit.positive:
        return [lit.left, lit.right]
    return [lit.left, lit.left, lit.right, lit.right]


def multiset_compare(m: list, n: list, cmp) -> Order:
    """Dershowitz-Manna bag extension of a (possibly partial) strict order."""
    m_rest = list(m)
    n_rest = list(n)
    for x in list(m_rest):
        for y in n_rest:
            if x in m_rest and cmp(x, y) is Order.EQ:
                m_rest.remove(x)
                n_rest.remove(y)
                break
    if not m_rest and not n_rest:
        return Order.EQ
    gt = bool(m_rest) and all(
        any(cmp(x, y) is Order.GT for x in m_rest) for y in n_rest
    )
    if gt:
        return Order.GT
    lt = bool(n_rest) and all(
        any(cmp(y, x) is Order.GT for y in n_rest) for x in m_rest
    )
    if lt:
        return Order.LT
    return Order.INC


class KBO(TermOrdering):
    """Knuth-Bendix ordering with per-symbol weights (constant 1 by default).

    Admissibility is enforced at the default parameters: all weights >= 1
    and variable weight 1, so the unary-zero-weight corner never arises.
    """

    def __init__(self, precedence: Precedence, weights: Optional[dict[str, int]] = None, var_weight: int = 1):
        super().__init__()
        self.precedence = precedence
        self.weights = weights or {}
        self.var_weight = var_weight
        if var_weight < 1 or any(w < 1 for w in self.weights.values()):
            raise ValueError("KBO weights must be positive")

    def weight(self, t: Term) -> int:
        if isinstance(t, Var):
            return self.var_weight
        if not self.weights and self.var_weight == 1:
            return t.size  # constant weight 1 everywhere: weight = node count
        return self.weights.get(t.fn.name, 1) + sum(self.weight(a) for a in t.args)

    def _compare(self, s: Term, t: Term) -> Order:
        if s == t:
            return Order.EQ
        if isinstance(s, Var):
            return Order.LT if occurs_in(s, t) else Order.INC
        if isinstance(t, Var):
            return Order.GT if occurs_in(t, s) else Order.INC
        sc = var_counts(s)
        tc = var_counts(t)
        s_covers = all(sc.get(v, 0) >= k for v, k in tc.items())
        t_covers = all(tc.get(v, 0) >= k for v, k in sc.items())
        ws, wt = self.weight(s), self.weight(t)
        if ws > wt:
            return Order.GT if s_covers else Order.INC
        if ws < wt:
            return Order.LT if t_covers else Order.INC
        if s.fn != t.fn:
            if self.precedence.greater(s.fn, t.fn):
                return Order.GT if s_covers else Order.INC
            return Order.LT if t_covers else Order.INC
        for a, b in zip(s.args, t.args):
            if a == b:
                continue
            c = self.compare(a, b)
            if c is Order.GT:
                return Order.GT if s_covers else Order.INC
            if c is Order.LT:
                return Order.LT if t_covers else Order.INC
            return Order.INC
        return Order.EQ


class LPO(TermOrdering):
    """Lexicographic path ordering with left-to-right argument status.

    Recursion goes through the memoized compare so repeated subterm pairs
    (ubiquitous during saturation) are answered from the cache.
    """

    def __init__(self, precedence: Precedence):
        super().__init__()
        self.precedence = precedence

    def _compare(self, s: Term, t: Term) -> Order:
        if s == t:
            return Order.EQ
        if isinstance(s, Var):
            return Order.LT if occurs_in(s, t) else Order.INC
        if isinstance(t, Var):
            return Order.GT if occurs_in(t, s) else Order.INC
        if self._gt(s, t):
            return Order.GT
        if self._gt(t, s):
            return Order.LT
        return Order.INC

    def _gt(self, s: Term, t: Term) -> bool:
        # both sides are applications and s != t
        for a in s.args:
            if self.compare(a, t) in (Order.GT, Order.EQ):
                return True
        if self.precedence.greater(s.fn, t.fn):
            return all(self.compare(s, b) is Order.GT for b in t.args)
        if s.fn == t.fn:
            for i, (a, b) in enumerate(zip(s.args, t.args)):
                if a == b:
                    continue
                return self.compare(a, b) is Order.GT and all(
                    self.compare(s, b2) is Order.GT for b2 in t.args[i + 1 :]
                )
        return False
