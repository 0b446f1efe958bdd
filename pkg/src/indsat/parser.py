"""Problem-format frontend: an s-expression dialect close to SMT-LIB.

Supported commands:

    (declare-sort elem)
    (declare-datatype lst ((nil) (cons (head nat) (tail lst))))
    (declare-fun app (lst lst) lst)
    (declare-const c lst)
    (assert (forall ((x lst)) (= (app nil x) x)))
    (assert (or (not (= s t)) (= u v)))
    (conjecture (forall ((x lst) (y lst)) (= lhs rhs)))
    (goal (!= lhs rhs))           ; already-negated, already-skolemized form

The conjecture is negated and Skolemized by the frontend (fresh constants
sk0, sk1, ...). All errors carry line and column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .clauses import Literal
from .terms import App, FunctionSymbol, Signature, Sort, Term, Var


class ProblemError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class SortInferenceError(ProblemError):
    """Sort of a bare variable or new constant could not be inferred."""


@dataclass
class Token:
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append(Token(ch, line, col))
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            tokens.append(Token(text[start:i], line, start_col))
    return tokens


SExpr = Union[Token, list]


def read_sexprs(tokens: list[Token]) -> list[SExpr]:
    exprs: list[SExpr] = []
    stack: list[list] = []
    for tok in tokens:
        if tok.text == "(":
            stack.append([])
        elif tok.text == ")":
            if not stack:
                raise ProblemError("unbalanced ')'", tok.line, tok.col)
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                exprs.append(done)
        else:
            if stack:
                stack[-1].append(tok)
            else:
                exprs.append(tok)
    if stack:
        raise ProblemError("unbalanced '('", tokens[-1].line if tokens else 0, 0)
    return exprs


def _head(sexpr: SExpr) -> str:
    if isinstance(sexpr, list) and sexpr and isinstance(sexpr[0], Token):
        return sexpr[0].text
    return ""


def _pos(sexpr: SExpr) -> tuple[int, int]:
    if isinstance(sexpr, Token):
        return sexpr.line, sexpr.col
    if sexpr and isinstance(sexpr[0], Token):
        return sexpr[0].line, sexpr[0].col
    return 0, 0


@dataclass
class Problem:
    signature: Signature
    clauses: list[tuple[tuple[Literal, ...], bool, Optional[str]]] = field(default_factory=list)
    skolem_names: list[str] = field(default_factory=list)
    decl_sequence: list[tuple[str, str]] = field(default_factory=list)  # (kind, name) in parse order

    @property
    def axioms(self):
        return [c for c in self.clauses if not c[1]]

    @property
    def goals(self):
        return [c for c in self.clauses if c[1]]


def parse_problem(text: str) -> Problem:
    """Parse, sort-check and Skolemize a problem file."""
    sig = Signature()
    problem = Problem(sig)
    sk_counter = 0
    for form in read_sexprs(tokenize(text)):
        head = _head(form)
        line, col = _pos(form)
        if head == "declare-sort":
            name = _symbol_text(form, 1)
            sig_declare_sort(sig, name, inductive=False, line=line, col=col)
            problem.decl_sequence.append(("sort", name))
        elif head == "declare-datatype":
            _parse_datatype(sig, problem, form)
        elif head == "declare-fun":
            if len(form) != 4 or not isinstance(form[2], list):
                raise ProblemError("declare-fun expects (declare-fun name (sorts) sort)", line, col)
            name = _symbol_text(form, 1)
            arg_sorts = tuple(_resolve_sort(sig, t) for t in form[2])
            res = _resolve_sort(sig, form[3])
            _declare(sig, name, arg_sorts, res, line, col)
            problem.decl_sequence.append(("fun", name))
        elif head == "declare-const":
            name = _symbol_text(form, 1)
            res = _resolve_sort(sig, form[2])
            _declare(sig, name, (), res, line, col)
            problem.decl_sequence.append(("fun", name))
        elif head == "declare-skolem":
            name = _symbol_text(form, 1)
            res = _resolve_sort(sig, form[2])
            _declare(sig, name, (), res, line, col)
            problem.skolem_names.append(name)
            problem.decl_sequence.append(("skolem", name))
        elif head == "assert":
            lits = _parse_clause_formula(sig, form[1], {})
            problem.clauses.append((tuple(lits), False, None))
        elif head == "goal":
            lits = _parse_clause_formula(sig, form[1], {})
            problem.clauses.append((tuple(lits), True, None))
        elif head == "conjecture":
            lits, sk_counter = _skolemize_conjecture(sig, problem, form[1], sk_counter)
            problem.clauses.append((tuple(lits), True, None))
        else:
            raise ProblemError(f"unknown command {head!r}", line, col)
    return problem


def sig_declare_sort(sig: Signature, name: str, inductive: bool, line: int, col: int) -> Sort:
    try:
        return sig.declare_sort(name, inductive)
    except Exception as e:
        raise ProblemError(str(e), line, col)


def _declare(sig, name, arg_sorts, res, line, col, constructor=False, base=False):
    try:
        return sig.declare_fun(name, arg_sorts, res, constructor, base)
    except Exception as e:
        raise ProblemError(str(e), line, col)


def _symbol_text(form: list, index: int) -> str:
    if index >= len(form) or not isinstance(form[index], Token):
        line, col = _pos(form)
        raise ProblemError("expected a symbol", line, col)
    return form[index].text


def _resolve_sort(sig: Signature, sexpr: SExpr) -> Sort:
    if not isinstance(sexpr, Token):
        line, col = _pos(sexpr)
        raise ProblemError("expected a sort name", line, col)
    s = sig.sorts.get(sexpr.text)
    if s is None:
        raise ProblemError(f"undeclared sort {sexpr.text!r}", sexpr.line, sexpr.col)
    return s


def _parse_datatype(sig: Signature, problem: Problem, form: list) -> None:
    line, col = _pos(form)
    if len(form) != 3 or not isinstance(form[2], list):
        raise ProblemError("declare-datatype expects (declare-datatype name (ctors))", line, col)
    name = _symbol_text(form, 1)
    sort = sig_declare_sort(sig, name, inductive=True, line=line, col=col)
    problem.decl_sequence.append(("datatype", name))
    ctor_specs = []
    for ctor in form[2]:
        if isinstance(ctor, Token):
            ctor = [ctor]
        cname = ctor[0].text
        arg_sorts = []
        for sel in ctor[1:]:
            if not isinstance(sel, list) or len(sel) != 2:
                raise ProblemError(
                    f"constructor argument must be (selector sort)", *_pos(ctor)
                )
            arg_sorts.append(_resolve_sort(sig, sel[1]))
        ctor_specs.append((cname, tuple(arg_sorts), _pos(ctor)))
    saw_base = False
    for cname, arg_sorts, (cline, ccol) in ctor_specs:
        base = all(s != sort for s in arg_sorts)
        saw_base = saw_base or base
        _declare(sig, cname, arg_sorts, sort, cline, ccol, constructor=True, base=base)
    if not saw_base:
        raise ProblemError(f"datatype {name} has no base constructor", line, col)


def parse_term(
    sig: Signature,
    sexpr: SExpr,
    varmap: dict[str, Var],
    expected: Optional[Sort] = None,
    allow_new: Optional[dict[str, Sort]] = None,
) -> Term:
    """Build a term from an s-expression.

    ``varmap`` holds the in-scope variables. ``allow_new``, when given,
    collects unknown constants instead of rejecting them (used by the
    proof-script reader, where induction steps introduce Skolems).
    """
    if isinstance(sexpr, Token):
        name = sexpr.text
        if name.startswith("?"):
            vname = name[1:]
            if ":" in vname:
                vname, sort_name = vname.split(":", 1)
                s = sig.sorts.get(sort_name)
                if s is None:
                    raise ProblemError(f"undeclared sort {sort_name!r}", sexpr.line, sexpr.col)
                if expected is not None and s != expected:
                    raise ProblemError(f"variable ?{vname} annotated {s}, expected {expected}", sexpr.line, sexpr.col)
                expected = s
            v = varmap.get(vname)
            if v is None:
                if expected is None:
                    raise SortInferenceError(f"cannot infer sort of variable {name}", sexpr.line, sexpr.col)
                v = Var(vname, expected)
                varmap[vname] = v
            if expected is not None and v.sort != expected:
                raise ProblemError(f"variable {name} used at sort {expected}, declared {v.sort}", sexpr.line, sexpr.col)
            return v
        if name in varmap:
            return varmap[name]
        fn = sig.symbols.get(name)
        if fn is None:
            if allow_new is not None:
                known = allow_new.get(name, expected)
                if known is None:
                    raise SortInferenceError(f"cannot infer sort of new constant {name}", sexpr.line, sexpr.col)
                prior = allow_new.setdefault(name, known)
                if prior != known:
                    raise ProblemError(f"constant {name} used at two sorts", sexpr.line, sexpr.col)
                return App(FunctionSymbol(name, (), known))
            raise ProblemError(f"undeclared symbol {name!r}", sexpr.line, sexpr.col)
        if fn.arity != 0:
            raise ProblemError(f"{name} expects {fn.arity} arguments", sexpr.line, sexpr.col)
        if expected is not None and fn.result_sort != expected:
            raise ProblemError(f"{name} has sort {fn.result_sort}, expected {expected}", sexpr.line, sexpr.col)
        return App(fn)
    if not sexpr or not isinstance(sexpr[0], Token):
        line, col = _pos(sexpr)
        raise ProblemError("malformed term", line, col)
    head = sexpr[0]
    fn = sig.symbols.get(head.text)
    if fn is None:
        raise ProblemError(f"undeclared symbol {head.text!r}", head.line, head.col)
    if fn.arity != len(sexpr) - 1:
        raise ProblemError(
            f"{head.text} expects {fn.arity} arguments, got {len(sexpr) - 1}", head.line, head.col
        )
    if expected is not None and fn.result_sort != expected:
        raise ProblemError(f"{head.text} has sort {fn.result_sort}, expected {expected}", head.line, head.col)
    args = tuple(
        parse_term(sig, a, varmap, s, allow_new) for a, s in zip(sexpr[1:], fn.arg_sorts)
    )
    return App(fn, args)


def _parse_equation(sig, sexpr, varmap, positive, allow_new=None) -> Literal:
    line, col = _pos(sexpr)
    if not isinstance(sexpr, list) or len(sexpr) != 3:
        raise ProblemError("expected (= t u) or (!= t u)", line, col)
    try:
        snapshot = dict(varmap)
        snapshot_new = dict(allow_new) if allow_new is not None else None
        left = parse_term(sig, sexpr[1], varmap, None, allow_new)
        right = parse_term(sig, sexpr[2], varmap, left.sort, allow_new)
    except SortInferenceError:
        # the left side was a bare variable/constant: infer from the right
        varmap.clear()
        varmap.update(snapshot)
        if allow_new is not None:
            allow_new.clear()
            allow_new.update(snapshot_new)
        right = parse_term(sig, sexpr[2], varmap, None, allow_new)
        left = parse_term(sig, sexpr[1], varmap, right.sort, allow_new)
    return Literal(left, right, positive)


def parse_literal(sig, sexpr, varmap, allow_new=None) -> Literal:
    head = _head(sexpr)
    if head == "=":
        return _parse_equation(sig, sexpr, varmap, True, allow_new)
    if head == "!=":
        return _parse_equation(sig, sexpr, varmap, False, allow_new)
    if head == "not":
        inner = sexpr[1]
        if _head(inner) == "=":
            return _parse_equation(sig, inner, varmap, False, allow_new)
        if _head(inner) == "!=":
            return _parse_equation(sig, inner, varmap, True, allow_new)
    line, col = _pos(sexpr)
    raise ProblemError("expected an equational literal", line, col)


def _parse_clause_formula(sig, sexpr, varmap) -> list[Literal]:
    head = _head(sexpr)
    if head == "forall":
        new_vars = dict(varmap)
        for binding in sexpr[1]:
            if not isinstance(binding, list) or len(binding) != 2:
                raise ProblemError("bad binder", *_pos(sexpr))
            vname = binding[0].text
            vsort = _resolve_sort(sig, binding[1])
            new_vars[vname] = Var(vname, vsort)
        return _parse_clause_formula(sig, sexpr[2], new_vars)
    if head == "or":
        out = []
        for part in sexpr[1:]:
            out.extend(_parse_clause_formula(sig, part, varmap))
        return out
    return [parse_literal(sig, sexpr, varmap)]


def _skolemize_conjecture(sig: Signature, problem: Problem, sexpr, sk_counter: int):
    """Negate and Skolemize a universally closed equational conjecture.

    forall xs. e1 and ... and en  becomes the single clause
    not e1' or ... or not en' with each x replaced by a fresh constant.
    """
    varmap: dict[str, Var] = {}
    binders: list[tuple[str, Sort]] = []
    body = sexpr
    while _head(body) == "forall":
        for binding in body[1]:
            vname = binding[0].text
            vsort = _resolve_sort(sig, binding[1])
            binders.append((vname, vsort))
        body = body[2]
    skmap: dict[str, Term] = {}
    for vname, vsort in binders:
        name = f"sk{sk_counter}"
        sk_counter += 1
        fn = sig.declare_fun(name, (), vsort)
        problem.skolem_names.append(name)
        skmap[vname] = App(fn)
        varmap[vname] = Var(vname, vsort)

    def negate(formula) -> list[Literal]:
        head = _head(formula)
        if head == "and":
            out = []
            for part in formula[1:]:
                out.extend(negate(part))
            return out
        lit = parse_literal(sig, formula, varmap)
        return [lit.complement()]

    lits = negate(body)
    sub = {varmap[v]: t for v, t in skmap.items()}
    return [l.substitute(sub) for l in lits], sk_counter


def print_problem(problem: Problem) -> str:
    """Render a problem so that reparsing gives a structurally identical one.

    Conjectures are printed in their already-negated (goal ...) form with
    their Skolems declared via declare-skolem, so goal flags and Skolem
    bookkeeping survive the round trip.
    """
    lines = []
    sig = problem.signature
    for kind, name in problem.decl_sequence:
        if kind == "sort":
            lines.append(f"(declare-sort {name})")
        elif kind == "datatype":
            parts = []
            for c in sig.datatypes[name]:
                if not c.arg_sorts:
                    parts.append(f"({c.name})")
                else:
                    args = " ".join(f"(a{i} {s.name})" for i, s in enumerate(c.arg_sorts))
                    parts.append(f"({c.name} {args})")
            lines.append(f"(declare-datatype {name} ({' '.join(parts)}))")
        else:
            fn = sig.symbols[name]
            head = "declare-skolem" if kind == "skolem" else None
            if head is None and fn.arity > 0:
                args = " ".join(s.name for s in fn.arg_sorts)
                lines.append(f"(declare-fun {name} ({args}) {fn.result_sort.name})")
            else:
                lines.append(f"({head or 'declare-const'} {name} {fn.result_sort.name})")
    for name in problem.skolem_names:
        if ("skolem", name) not in problem.decl_sequence:
            fn = sig.symbols[name]
            lines.append(f"(declare-skolem {name} {fn.result_sort.name})")
    for lits, is_goal, _label in problem.clauses:
        head = "goal" if is_goal else "assert"
        lines.append(f"({head} {_formula_text(lits)})")
    return "\n".join(lines) + "\n"


def _formula_text(lits) -> str:
    from .proofs import literal_to_text

    vars_seen = sorted(
        {v for l in lits for v in _literal_vars(l)}, key=lambda v: v.name
    )
    body = (
        literal_to_text(lits[0])
        if len(lits) == 1
        else "(or " + " ".join(literal_to_text(l) for l in lits) + ")"
    )
    if vars_seen:
        binders = " ".join(f"({v.name} {v.sort.name})" for v in vars_seen)
        return f"(forall ({binders}) {body})"
    return body


def _literal_vars(lit: Literal):
    from .terms import term_vars

    return term_vars(lit.left) | term_vars(lit.right)
