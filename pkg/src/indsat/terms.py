"""Sorts, signatures, first-order terms, positions, substitutions.

Terms are immutable. Structural sharing is allowed but never observable:
equality is structural, and every node caches its hash, node count and
groundness at construction so the hot paths (ordering comparisons, clause
dedup) stay cheap.

Positions are 1-based tuples of ints; the empty tuple is the root.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional


class PositionError(Exception):
    """A position does not address a node of the term."""


class SortError(Exception):
    """A term is not well-sorted for the requested operation."""


@dataclass(frozen=True)
class Sort:
    name: str
    inductive: bool = False

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class FunctionSymbol:
    """A declared function symbol.

    ``base_constructor`` marks constructors with no recursive argument
    (zero, nil); it implies ``constructor``, which in turn requires an
    inductive result sort.
    """

    name: str
    arg_sorts: tuple[Sort, ...]
    result_sort: Sort
    constructor: bool = False
    base_constructor: bool = False

    def __post_init__(self):
        if self.base_constructor and not self.constructor:
            raise ValueError(f"{self.name}: base_constructor implies constructor")
        if self.constructor and not self.result_sort.inductive:
            raise ValueError(f"{self.name}: constructor of non-inductive sort")

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __repr__(self):
        return self.name


class Term:
    __slots__ = ("_hash", "size", "ground")

    sort: Sort

    def __hash__(self):
        return self._hash


class Var(Term):
    __slots__ = ("name", "sort")

    def __init__(self, name: str, sort: Sort):
        self.name = name
        self.sort = sort
        self.size = 1
        self.ground = False
        self._hash = hash(("v", name, sort.name))

    def __eq__(self, other):
        return (
            self is other
            or (isinstance(other, Var) and self.name == other.name and self.sort == other.sort)
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"?{self.name}"


class App(Term):
    __slots__ = ("fn", "args", "sort")

    def __init__(self, fn: FunctionSymbol, args: tuple[Term, ...] = ()):
        if len(args) != fn.arity:
            raise SortError(f"{fn.name} expects {fn.arity} arguments, got {len(args)}")
        for a, s in zip(args, fn.arg_sorts):
            if a.sort != s:
                raise SortError(f"{fn.name}: argument {a!r} has sort {a.sort}, expected {s}")
        self.fn = fn
        self.args = args
        self.sort = fn.result_sort
        self.size = 1 + sum(a.size for a in args)
        self.ground = all(a.ground for a in args)
        self._hash = hash((fn.name, args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.fn == other.fn
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.args:
            return self.fn.name
        return f"{self.fn.name}({', '.join(map(repr, self.args))})"


Position = tuple[int, ...]
Subst = dict[Var, Term]

EPSILON: Position = ()


def subterm_at(t: Term, p: Position) -> Term:
    """Subterm of ``t`` at position ``p`` (1-based); inverse of replace_at."""
    for i in p:
        if isinstance(t, Var) or i < 1 or i > len(t.args):
            raise PositionError(f"position {p} out of range in {t!r}")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, s: Term) -> Term:
    """Replace the subterm of ``t`` at ``p`` with ``s`` (sorts must agree)."""
    if not p:
        if s.sort != t.sort:
            raise SortError(f"cannot replace {t!r} ({t.sort}) with {s!r} ({s.sort})")
        return s
    if isinstance(t, Var) or p[0] < 1 or p[0] > len(t.args):
        raise PositionError(f"position {p} out of range in {t!r}")
    i = p[0] - 1
    new_args = list(t.args)
    new_args[i] = replace_at(t.args[i], p[1:], s)
    return App(t.fn, tuple(new_args))


def positions(t: Term, prefix: Position = ()) -> Iterator[tuple[Position, Term]]:
    """All positions of ``t`` in leftmost-outermost (pre-)order."""
    yield prefix, t
    if isinstance(t, App):
        for i, a in enumerate(t.args, start=1):
            yield from positions(a, prefix + (i,))


def nonvar_positions(t: Term, prefix: Position = ()) -> Iterator[tuple[Position, Term]]:
    """Positions of non-variable subterms, leftmost-outermost."""
    if isinstance(t, Var):
        return
    yield prefix, t
    for i, a in enumerate(t.args, start=1):
        yield from nonvar_positions(a, prefix + (i,))


def term_vars(t: Term) -> set[Var]:
    out: set[Var] = set()
    _collect_vars(t, out)
    return out


def _collect_vars(t: Term, out: set[Var]) -> None:
    if isinstance(t, Var):
        out.add(t)
    else:
        for a in t.args:
            if not a.ground:
                _collect_vars(a, out)


def var_counts(t: Term, counts: Optional[dict[Var, int]] = None) -> dict[Var, int]:
    if counts is None:
        counts = {}
    if isinstance(t, Var):
        counts[t] = counts.get(t, 0) + 1
    else:
        for a in t.args:
            if not a.ground:
                var_counts(a, counts)
    return counts


def substitute(t: Term, sub: Subst) -> Term:
    if not sub or t.ground:
        return t
    if isinstance(t, Var):
        return sub.get(t, t)
    new_args = tuple(substitute(a, sub) for a in t.args)
    if all(a is b for a, b in zip(new_args, t.args)):
        return t
    return App(t.fn, new_args)


def occurs_in(v: Var, t: Term) -> bool:
    if isinstance(t, Var):
        return v == t
    if t.ground:
        return False
    return any(occurs_in(v, a) for a in t.args)


def mgu(s: Term, t: Term) -> Optional[Subst]:
    """Most general unifier of ``s`` and ``t``, or None.

    Callers must rename the two sides apart beforehand; the result is
    idempotent (no bound variable occurs in any range term). Full occurs
    check, sort preserving.
    """
    sub: Subst = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a = _walk(a, sub)
        b = _walk(b, sub)
        if a == b:
            continue
        if isinstance(a, Var):
            if a.sort != b.sort or occurs_in(a, substitute(b, sub)):
                return None
            _bind(sub, a, substitute(b, sub))
        elif isinstance(b, Var):
            if b.sort != a.sort or occurs_in(b, substitute(a, sub)):
                return None
            _bind(sub, b, substitute(a, sub))
        else:
            if a.fn != b.fn:
                return None
            stack.extend(zip(a.args, b.args))
    return sub


def _walk(t: Term, sub: Subst) -> Term:
    while isinstance(t, Var) and t in sub:
        t = sub[t]
    return t


def _bind(sub: Subst, v: Var, t: Term) -> None:
    single = {v: t}
    for w in list(sub):
        sub[w] = substitute(sub[w], single)
    sub[v] = t


def match_term(pattern: Term, subject: Term, sub: Optional[Subst] = None) -> Optional[Subst]:
    """One-sided unification: find theta with pattern*theta == subject.

    The subject is treated as rigid; its variables are never bound.
    """
    if sub is None:
        sub = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sub.get(p)
            if bound is None:
                if p.sort != s.sort:
                    return None
                sub[p] = s
            elif bound != s:
                return None
        else:
            if isinstance(s, Var) or p.fn != s.fn:
                return None
            stack.extend(zip(p.args, s.args))
    return sub


class PositionRelation(Enum):
    ABOVE = "above"
    BELOW = "below"
    EQUAL = "equal"
    PARALLEL_LEFT = "parallel-left"
    PARALLEL_RIGHT = "parallel-right"


def left_of(p: Position, q: Position) -> bool:
    """p <_l q: p and q diverge at some index where p goes further left."""
    for a, b in zip(p, q):
        if a != b:
            return a < b
    return False


def position_relation(p: Position, q: Position) -> PositionRelation:
    if p == q:
        return PositionRelation.EQUAL
    if p == q[: len(p)]:
        return PositionRelation.ABOVE
    if q == p[: len(q)]:
        return PositionRelation.BELOW
    if left_of(p, q):
        return PositionRelation.PARALLEL_LEFT
    return PositionRelation.PARALLEL_RIGHT


class Signature:
    """Declared sorts and function symbols, in declaration order.

    Declaration order matters: it seeds precedence construction, and
    fresh (Skolem) symbols introduced during search are appended after
    all existing declarations.
    """

    def __init__(self):
        self.sorts: dict[str, Sort] = {}
        self.symbols: dict[str, FunctionSymbol] = {}
        self.declaration_order: list[str] = []
        self.datatypes: dict[str, list[FunctionSymbol]] = {}
        self._fresh_counter = 0

    def declare_sort(self, name: str, inductive: bool = False) -> Sort:
        if name in self.sorts:
            raise SortError(f"sort {name} already declared")
        s = Sort(name, inductive)
        self.sorts[name] = s
        if inductive:
            self.datatypes[name] = []
        return s

    def declare_fun(
        self,
        name: str,
        arg_sorts: tuple[Sort, ...],
        result_sort: Sort,
        constructor: bool = False,
        base_constructor: bool = False,
    ) -> FunctionSymbol:
        if name in self.symbols:
            raise SortError(f"symbol {name} already declared")
        fn = FunctionSymbol(name, arg_sorts, result_sort, constructor, base_constructor)
        self.symbols[name] = fn
        self.declaration_order.append(name)
        if constructor:
            self.datatypes[result_sort.name].append(fn)
        return fn

    def constructors(self, sort: Sort) -> list[FunctionSymbol]:
        return self.datatypes.get(sort.name, [])

    def fresh_constant(self, sort: Sort, prefix: str = "c") -> FunctionSymbol:
        """A new constant whose name collides with nothing declared so far."""
        while True:
            self._fresh_counter += 1
            name = f"{prefix}{self._fresh_counter}"
            if name not in self.symbols:
                return self.declare_fun(name, (), sort)


_fresh_var_counter = 0


def fresh_var(sort: Sort, hint: str = "x") -> Var:
    global _fresh_var_counter
    _fresh_var_counter += 1
    return Var(f"{hint}_{_fresh_var_counter}", sort)


def rename_apart(t: Term, mapping: Optional[dict[Var, Var]] = None) -> tuple[Term, dict[Var, Var]]:
    """Rename all variables of ``t`` to globally fresh ones."""
    if mapping is None:
        mapping = {}
    for v in term_vars(t):
        if v not in mapping:
            mapping[v] = fresh_var(v.sort, v.name.split("_")[0] or "x")
    return substitute(t, mapping), mapping
