"""Literals, annotated clauses, selection, trivia simplification, rendering.

A clause freezes its literal order at creation (the left-to-right position
discipline of the rewrite calculi presupposes a stable layout) and carries
the calculus annotations: rewrite direction, position of the last rewrite,
and rewrite depth, plus a derivation record.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .orderings import Order, TermOrdering
from .terms import EPSILON, Position, Subst, Term, Var, positions, substitute, term_vars


@dataclass(frozen=True)
class Literal:
    left: Term
    right: Term
    positive: bool

    def __post_init__(self):
        if self.left.sort != self.right.sort:
            raise ValueError(f"literal sides have different sorts: {self.left!r}, {self.right!r}")

    def complement(self) -> "Literal":
        return Literal(self.left, self.right, not self.positive)

    @property
    def ground(self) -> bool:
        return self.left.ground and self.right.ground

    def side(self, i: int) -> Term:
        return self.left if i == 0 else self.right

    def with_side(self, i: int, t: Term) -> "Literal":
        if i == 0:
            return Literal(t, self.right, self.positive)
        return Literal(self.left, t, self.positive)

    def substitute(self, sub: Subst) -> "Literal":
        return Literal(substitute(self.left, sub), substitute(self.right, sub), self.positive)

    def __repr__(self):
        op = "=" if self.positive else "!="
        return f"{self.left!r} {op} {self.right!r}"


class Direction(Enum):
    DOWN = "down"
    UP = "up"


# A clause-level position: (literal index + 1, side 1|2, *path into the term).
ClausePosition = tuple[int, ...]


@dataclass(frozen=True)
class InferenceRecord:
    rule: str
    premises: tuple[int, ...] = ()
    detail: Optional[dict] = None


TAUTOLOGY = object()


def canonical_literals(lits: tuple[Literal, ...]) -> tuple[Literal, ...]:
    """Rename variables to x0, x1, ... in first-occurrence order.

    Makes alpha-equivalent conclusions structurally identical so duplicate
    detection works across renamed-apart derivations.
    """
    from .terms import App, substitute

    mapping: dict[Var, Var] = {}

    def canon(t: Term) -> Term:
        if isinstance(t, Var):
            v = mapping.get(t)
            if v is None:
                v = Var(f"x{len(mapping)}", t.sort)
                mapping[t] = v
            return v
        if t.ground:
            return t
        return App(t.fn, tuple(canon(a) for a in t.args))

    out = tuple(Literal(canon(l.left), canon(l.right), l.positive) for l in lits)
    return lits if not mapping else out


def literal_key(l: Literal):
    """Orientation-insensitive literal key for duplicate detection."""
    return (l.positive, frozenset((l.left, l.right)))


def clause_key(lits) -> frozenset:
    return frozenset(Counter(map(literal_key, lits)).items())


def dedup_literals(lits: tuple[Literal, ...]) -> tuple[Literal, ...]:
    """Remove duplicate literals, keeping first occurrences in layout order."""
    seen = set()
    out = []
    for l in lits:
        if l not in seen:
            seen.add(l)
            out.append(l)
    return tuple(out)


def is_tautology(lits: tuple[Literal, ...]) -> bool:
    pos = {l for l in lits if l.positive}
    for l in lits:
        if l.positive and l.left == l.right:
            return True
        if not l.positive and l.complement() in pos:
            return True
    return False


def simplify_trivia(lits: tuple[Literal, ...]):
    """Duplicate-literal removal plus tautology detection.

    Returns the deduplicated literal tuple, or the TAUTOLOGY sentinel when
    the clause contains t=t or a complementary pair.
    """
    if is_tautology(lits):
        return TAUTOLOGY
    return dedup_literals(lits)


class Clause:
    __slots__ = (
        "literals",
        "cid",
        "direction",
        "last_rw",
        "rw_depth",
        "record",
        "is_goal",
        "produced_by_rw",
        "ind_depth",
        "_key",
        "_weight",
        "_renamed",
        "_consts",
        "_sel",
        "_plists",
        "_sources",
        "_heads",
    )

    def __init__(
        self,
        literals: tuple[Literal, ...],
        cid: int = 0,
        direction: Direction = Direction.DOWN,
        last_rw: ClausePosition = EPSILON,
        rw_depth: int = 0,
        record: InferenceRecord = InferenceRecord("Input"),
        is_goal: bool = False,
        produced_by_rw: bool = False,
        ind_depth: int = 0,
    ):
        self.literals = literals
        self.cid = cid
        self.direction = direction
        self.last_rw = last_rw
        self.rw_depth = rw_depth
        self.record = record
        self.is_goal = is_goal
        self.produced_by_rw = produced_by_rw
        self.ind_depth = ind_depth
        self._key = None
        self._weight = None
        self._renamed = None
        self._consts = None
        self._sel = None
        self._plists = None
        self._sources = None
        self._heads = None

    @property
    def is_empty(self) -> bool:
        return not self.literals

    @property
    def ground(self) -> bool:
        return all(l.ground for l in self.literals)

    def key(self):
        """Dedup key: the literal multiset (layout- and side-insensitive)."""
        if self._key is None:
            self._key = clause_key(self.literals)
        return self._key

    @property
    def weight(self) -> int:
        if self._weight is None:
            self._weight = sum(l.left.size + l.right.size for l in self.literals)
        return self._weight

    def position_lists(self):
        """Per-literal cached (side index, path, subterm) triples over the
        non-variable positions."""
        if self._plists is None:
            from .terms import nonvar_positions

            self._plists = tuple(
                tuple(
                    (si, p, u)
                    for si in (0, 1)
                    for p, u in nonvar_positions(lit.side(si))
                )
                for lit in self.literals
            )
        return self._plists

    def head_names(self) -> frozenset:
        if self._heads is None:
            self._heads = frozenset(
                u.fn.name for plist in self.position_lists() for _si, _p, u in plist
            )
        return self._heads

    def vars(self) -> set[Var]:
        out: set[Var] = set()
        for l in self.literals:
            out |= term_vars(l.left)
            out |= term_vars(l.right)
        return out

    def constant_names(self) -> set[str]:
        if self._consts is None:
            out: set[str] = set()
            for l in self.literals:
                for _, t in positions(l.left):
                    if not isinstance(t, Var) and not t.args:
                        out.add(t.fn.name)
                for _, t in positions(l.right):
                    if not isinstance(t, Var) and not t.args:
                        out.add(t.fn.name)
            self._consts = out
        return self._consts

    def __repr__(self):
        if not self.literals:
            return "$false"
        return " | ".join(map(repr, self.literals))


def select_literals(clause: Clause, order: TermOrdering, mode: str = "negative") -> tuple[int, ...]:
    """Indices of the selected literals of a nonempty clause.

    mode="negative": all negative literals when any exist, else all
    literals. mode="maximal": one maximal negative literal when a
    negative literal is maximal, else all maximal literals. Both satisfy
    the standard selection condition.
    """
    if not clause.literals:
        raise ValueError("cannot select from the empty clause")
    lits = clause.literals
    if mode == "negative":
        neg = tuple(i for i, l in enumerate(lits) if not l.positive)
        return neg if neg else tuple(range(len(lits)))
    if mode != "maximal":
        raise ValueError(f"unknown selection mode {mode!r}")
    maximal = []
    for i, l in enumerate(lits):
        if all(
            order.literal_compare(other, l) is not Order.GT
            for j, other in enumerate(lits)
            if j != i
        ):
            maximal.append(i)
    for i in maximal:
        if not lits[i].positive:
            return (i,)
    return tuple(maximal)


def clause_positions(clause: Clause):
    """All (clause position, subterm) pairs, in left-to-right layout order."""
    for li, lit in enumerate(clause.literals):
        for si, side in ((1, lit.left), (2, lit.right)):
            for p, t in positions(side):
                yield (li + 1, si) + p, t


def term_at(clause: Clause, cpos: ClausePosition) -> Term:
    li, si = cpos[0] - 1, cpos[1]
    side = clause.literals[li].side(si - 1)
    from .terms import subterm_at

    return subterm_at(side, cpos[2:])


def replace_in_clause(clause_lits: tuple[Literal, ...], cpos: ClausePosition, t: Term) -> tuple[Literal, ...]:
    from .terms import replace_at

    li, si = cpos[0] - 1, cpos[1]
    lit = clause_lits[li]
    new_side = replace_at(lit.side(si - 1), cpos[2:], t)
    new_lit = lit.with_side(si - 1, new_side)
    return clause_lits[:li] + (new_lit,) + clause_lits[li + 1 :]
