"""Proof scripts: serialization, parsing, and the replay kernel.

Script format (one step per line, bit-exact contract):

    <id>. <clause> [<Rule> <premise-ids>]

with literals joined by " | ", equality "=", disequality "!=", terms in
prefix s-expression form, variables prefixed "?", and "$false" for the
empty clause. The kernel re-derives every step from its premises under
the named rule, re-checking all side conditions for the configured
calculus and ordering, and reports the earliest failing step.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import inference as inf
from .clauses import Clause, Direction, InferenceRecord, Literal
from .induction import apply_structural_induction, candidate_induction_terms
from .parser import (
    Problem,
    ProblemError,
    Token,
    parse_literal,
    read_sexprs,
    tokenize,
)
from .saturation import ProverConfig, ProverResult, build_ordering
from .terms import App, Signature, Term, Var


def term_to_text(t: Term) -> str:
    if isinstance(t, Var):
        return f"?{t.name}"
    if not t.args:
        return t.fn.name
    return f"({t.fn.name} {' '.join(term_to_text(a) for a in t.args)})"


def literal_to_text(lit: Literal) -> str:
    op = "=" if lit.positive else "!="
    left = _side_text(lit.left)
    right = _side_text(lit.right)
    return f"({op} {left} {right})"


def _side_text(t: Term) -> str:
    # a bare variable at a literal root carries its sort for reparsing
    if isinstance(t, Var):
        return f"?{t.name}:{t.sort.name}"
    return term_to_text(t)


def clause_to_text(lits) -> str:
    if not lits:
        return "$false"
    return " | ".join(literal_to_text(l) for l in lits)


def proof_steps(result: ProverResult) -> list[tuple[int, Clause, tuple[int, ...]]]:
    """The derivation DAG below the empty clause, renumbered 1..n."""
    if result.empty_clause is None:
        return []
    want: set[int] = set()
    stack = [result.empty_clause]
    while stack:
        cid = stack.pop()
        if cid in want:
            continue
        want.add(cid)
        stack.extend(result.clauses[cid].record.premises)
    ordered = sorted(want)
    renumber = {cid: i + 1 for i, cid in enumerate(ordered)}
    out = []
    for cid in ordered:
        c = result.clauses[cid]
        out.append((renumber[cid], c, tuple(renumber[p] for p in c.record.premises)))
    return out


def render_proof_script(result: ProverResult) -> str:
    lines = []
    for sid, clause, premises in proof_steps(result):
        rule = clause.record.rule
        suffix = f"[{rule} {','.join(map(str, premises))}]" if premises else f"[{rule}]"
        lines.append(f"{sid}. {clause_to_text(clause.literals)} {suffix}")
    return "\n".join(lines) + ("\n" if lines else "")


def render_proof_text(result: ProverResult) -> str:
    steps = proof_steps(result)
    if not steps:
        return "no proof found\n"
    width = len(str(steps[-1][0]))
    lines = [f"Refutation found, {len(steps)} steps."]
    for sid, clause, premises in steps:
        rule = clause.record.rule
        suffix = f"[{rule} {','.join(map(str, premises))}]" if premises else f"[{rule}]"
        lines.append(f"{str(sid).rjust(width)}. {clause_to_text(clause.literals)} {suffix}")
    return "\n".join(lines) + "\n"


@dataclass
class RawStep:
    sid: int
    clause_text: str
    rule: str
    premises: tuple[int, ...]
    line: int


_STEP_RE = re.compile(r"^(\d+)\.\s+(.*\S)\s+\[(\w+)((?:\s+[\d,]+)?)\]\s*$")


def parse_script(text: str) -> list[RawStep]:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        m = _STEP_RE.match(line)
        if m is None:
            raise ProblemError(f"malformed proof step: {line!r}", lineno, 1)
        sid = int(m.group(1))
        premises = tuple(
            int(p) for p in m.group(4).strip().split(",") if p
        ) if m.group(4).strip() else ()
        steps.append(RawStep(sid, m.group(2), m.group(3), premises, lineno))
    return steps


@dataclass
class CheckResult:
    ok: bool
    failing_step: Optional[int] = None
    message: str = ""

    def __bool__(self):
        return self.ok


def _parse_script_clause(sig: Signature, text: str, allow_new: Optional[dict]):
    if text == "$false":
        return ()
    varmap: dict[str, Var] = {}
    lits = []
    for part in text.split(" | "):
        exprs = read_sexprs(tokenize(part))
        if len(exprs) != 1:
            raise ProblemError(f"malformed literal {part!r}")
        lits.append(parse_literal(sig, exprs[0], varmap, allow_new))
    return tuple(lits)


def _tmatch(a: Term, b: Term, vmap: dict, cmap: dict, mappable: set, targets: set) -> bool:
    if isinstance(a, Var):
        if not isinstance(b, Var) or a.sort != b.sort:
            return False
        if a in vmap:
            return vmap[a] == b
        if b in vmap.values():
            return False
        vmap[a] = b
        return True
    if isinstance(b, Var):
        return False
    if not a.args and a.fn.name in mappable:
        if b.args or b.sort != a.sort:
            return False
        if a.fn.name in cmap:
            return cmap[a.fn.name] == b.fn.name
        if b.fn.name in cmap.values() or b.fn.name not in targets:
            return False
        cmap[a.fn.name] = b.fn.name
        return True
    if a.fn != b.fn:
        return False
    return all(_tmatch(x, y, vmap, cmap, mappable, targets) for x, y in zip(a.args, b.args))


def _lmatch(a: Literal, b: Literal, vmap, cmap, mappable, targets) -> bool:
    return (
        a.positive == b.positive
        and _tmatch(a.left, b.left, vmap, cmap, mappable, targets)
        and _tmatch(a.right, b.right, vmap, cmap, mappable, targets)
    )


def match_clause(
    gen_lits, script_lits, mappable: set = frozenset(), targets: set = frozenset()
) -> Optional[tuple[dict, dict]]:
    """Multiset equality modulo a variable bijection and a bijection from
    (generated) fresh constants to the allowed target names."""
    if len(gen_lits) != len(script_lits):
        return None

    def go(i, used, vmap, cmap):
        if i == len(gen_lits):
            return vmap, cmap
        for j, b in enumerate(script_lits):
            if j in used:
                continue
            vm, cm = dict(vmap), dict(cmap)
            if _lmatch(gen_lits[i], b, vm, cm, mappable, targets):
                res = go(i + 1, used | {j}, vm, cm)
                if res is not None:
                    return res
        return None

    return go(0, frozenset(), {}, {})


def check_proof(
    problem: Problem,
    script_text: str,
    config: Optional[ProverConfig] = None,
    require_refutation: bool = True,
) -> CheckResult:
    """Replay a proof script against a problem.

    Every step is re-derived from its premises under the named rule with
    the configured calculus's side conditions re-checked; the first step
    that cannot be re-derived is reported.
    """
    config = config or ProverConfig()
    sig = _copy_signature(problem.signature)
    order = build_ordering(config, sig)
    try:
        steps = parse_script(script_text)
    except ProblemError as e:
        return CheckResult(False, None, str(e))
    if not steps:
        return CheckResult(False, None, "empty script")

    known: dict[int, Clause] = {}
    introduced: dict[str, tuple[str, tuple[int, ...]]] = {}
    last_sid = 0
    for step in steps:
        if step.sid <= last_sid:
            return CheckResult(False, step.sid, "step ids must strictly increase")
        last_sid = step.sid
        for p in step.premises:
            if p not in known:
                return CheckResult(False, step.sid, f"premise {p} not (yet) present")
        allow_new: Optional[dict] = {} if step.rule == "Ind" else None
        try:
            lits = _parse_script_clause(sig, step.clause_text, allow_new)
        except ProblemError as e:
            return CheckResult(False, step.sid, str(e))
        new_consts = dict(allow_new or {})
        verdict = _check_step(
            problem, sig, order, config, known, introduced, step, lits, new_consts
        )
        if verdict is not None:
            return CheckResult(False, step.sid, verdict)
    if require_refutation and known[steps[-1].sid].literals:
        return CheckResult(False, steps[-1].sid, "final step is not the empty clause")
    return CheckResult(True)


def _copy_signature(sig: Signature) -> Signature:
    out = Signature()
    out.sorts = dict(sig.sorts)
    out.symbols = dict(sig.symbols)
    out.declaration_order = list(sig.declaration_order)
    out.datatypes = {k: list(v) for k, v in sig.datatypes.items()}
    out._fresh_counter = sig._fresh_counter
    return out


def _check_step(problem, sig, order, config, known, introduced, step, lits, new_consts):
    """Returns an error message, or None and records the accepted step."""
    rule = step.rule

    if rule == "Input":
        if step.premises:
            return "Input steps take no premises"
        for plits, _is_goal, _label in problem.clauses:
            if match_clause(plits, lits) is not None:
                known[step.sid] = Clause(lits, cid=step.sid)
                return None
        return "clause is not part of the problem"

    if new_consts and rule != "Ind":
        return f"undeclared constants {sorted(new_consts)} outside an Ind step"

    premises = [known[p] for p in step.premises]

    if rule == "Ind":
        if len(premises) != 1:
            return "Ind takes one premise"
        return _check_ind_step(sig, config, known, introduced, step, lits, new_consts, premises[0])

    conclusions: list[inf.Conclusion] = []
    if rule == "Sup":
        if len(premises) != 2:
            return "Sup takes two premises"
        main, side = premises
        conclusions = inf.superposition(
            main, side, order, _all_indices(main), _all_indices(side)
        )
    elif rule == "EqRes":
        if len(premises) != 1:
            return "EqRes takes one premise"
        conclusions = inf.equality_resolution(premises[0], order, _all_indices(premises[0]))
    elif rule == "EqFac":
        if len(premises) != 1:
            return "EqFac takes one premise"
        conclusions = inf.equality_factoring(premises[0], order, _all_indices(premises[0]))
    elif rule in ("Rw", "RwDown", "RwUp", "CRw"):
        if len(premises) != 2:
            return f"{rule} takes two premises"
        main, eq = premises
        conclusions = [
            c
            for c in inf.rewrite(
                main, eq, config.calculus, order, None, chaining=(rule == "CRw")
            )
            if c.rule == rule
        ]
    elif rule == "Demod":
        if len(premises) != 2:
            return "Demod takes two premises"
        main, eq = premises
        conclusions = inf.all_demodulation_steps(main, eq, order)
    elif rule == "Chain1":
        if len(premises) != 2:
            return "Chain1 takes two premises"
        conclusions = inf.chain1(premises[0], premises[1], order)
    elif rule == "Chain2":
        if len(premises) != 2:
            return "Chain2 takes two premises"
        conclusions = inf.chain2(premises[0], premises[1], order)
    else:
        return f"unknown rule {rule!r}"

    for concl in conclusions:
        if match_clause(concl.literals, lits) is not None:
            known[step.sid] = Clause(
                lits,
                cid=step.sid,
                direction=concl.direction,
                last_rw=concl.last_rw,
                rw_depth=concl.rw_depth,
                record=InferenceRecord(rule, step.premises),
            )
            return None
    return f"conclusion is not derivable from its premises by {rule}"


def _check_ind_step(sig, config, known, introduced, step, lits, new_consts, main):
    allowed = set(new_consts)
    for name, (_r, prem) in introduced.items():
        if prem == step.premises:
            allowed.add(name)
    for cand in candidate_induction_terms(main, config.induct_complex_terms):
        scratch_names: list[str] = []

        def factory(sort, _names=scratch_names):
            from .terms import FunctionSymbol

            name = f"@sk{len(_names)}"
            _names.append(name)
            return FunctionSymbol(name, (), sort)

        for concl in apply_structural_induction(main, cand, sig, fresh=factory):
            res = match_clause(concl.literals, lits, set(scratch_names), allowed)
            if res is not None:
                _vmap, cmap = res
                for name, sort in new_consts.items():
                    if name in cmap.values():
                        sig.declare_fun(name, (), sort)
                        introduced[name] = ("Ind", step.premises)
                if any(n not in sig.symbols for n in new_consts):
                    # new constants that did not participate in the match
                    return "Ind step introduces constants it does not use"
                known[step.sid] = Clause(
                    lits, cid=step.sid, record=InferenceRecord("Ind", step.premises)
                )
                return None
    return "no induction candidate yields this clause with fresh Skolems"


def _all_indices(clause: Clause) -> tuple[int, ...]:
    return tuple(range(len(clause.literals)))
