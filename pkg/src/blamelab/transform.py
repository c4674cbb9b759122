"""Source-to-source passes and a behavior differ.

Both passes are purely syntactic, with no effect analysis: on the
contract-free fragment (and on programs whose only contracts are flat
predicates) they preserve behavior, while stateful union checking can make
them observably unsound.  The differ makes that divergence checkable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .connectives import Strategy
from .runtime.interp import Interp, prelude_env
from .runtime.values import (
    Blame, BlameSignal, Crash, CrashSignal, ExportError, Outcome, Success,
)
from .syntax import ast
from .syntax.ast import Span, Term


@dataclass(frozen=True)
class TransformReport:
    original: Term
    transformed: Term
    sites: tuple[Span, ...]  # disjoint spans of the rewritten occurrences


@dataclass(frozen=True)
class DiffVerdict:
    outcome_a: Outcome
    outcome_b: Outcome
    verdict: str  # "agree" | "diverge"
    detail: str

    @property
    def agree(self) -> bool:
        return self.verdict == "agree"


class UnknownBinding(Exception):
    pass


# ---------------------------------------------------------------------------
# Generic rebuilding


def transform_children(t: Term, f) -> Term:
    if isinstance(t, ast.ArrayLit):
        return ast.ArrayLit(t.span, tuple(f(e) for e in t.elements))
    if isinstance(t, ast.RecordLit):
        return ast.RecordLit(t.span, tuple((n, f(e)) for n, e in t.fields))
    if isinstance(t, ast.FieldAccess):
        return ast.FieldAccess(t.span, f(t.record), t.name)
    if isinstance(t, ast.Fun):
        return ast.Fun(t.span, t.params, f(t.body))
    if isinstance(t, ast.Let):
        contract = f(t.contract) if t.contract is not None else None
        return ast.Let(t.span, t.name, contract, f(t.bound), f(t.body))
    if isinstance(t, ast.If):
        return ast.If(t.span, f(t.cond), f(t.then), f(t.orelse))
    if isinstance(t, ast.App):
        return ast.App(t.span, f(t.fn), f(t.arg))
    if isinstance(t, ast.BinOp):
        return ast.BinOp(t.span, t.op, f(t.lhs), f(t.rhs))
    if isinstance(t, ast.Annot):
        return ast.Annot(t.span, f(t.expr), f(t.contract))
    if isinstance(t, ast.FromPred):
        return ast.FromPred(t.span, f(t.pred))
    if isinstance(t, ast.ArrowCtor):
        return ast.ArrowCtor(t.span, f(t.domain), f(t.codomain))
    if isinstance(t, ast.UnionCtor):
        return ast.UnionCtor(t.span, f(t.left), f(t.right))
    if isinstance(t, ast.IntersectionCtor):
        return ast.IntersectionCtor(t.span, f(t.left), f(t.right))
    if isinstance(t, ast.CaseCtor):
        return ast.CaseCtor(t.span, tuple(f(b) for b in t.branches))
    if isinstance(t, ast.RecordOfCtor):
        return ast.RecordOfCtor(t.span, tuple((n, f(c)) for n, c in t.fields))
    if isinstance(t, ast.ArrayOfCtor):
        return ast.ArrayOfCtor(t.span, f(t.element))
    return t  # leaves


def alpha_key(t: Term, bound: tuple[str, ...] = ()) -> str:
    """Structural key; alpha-equivalent terms share a key."""
    if isinstance(t, ast.Var):
        for depth, name in enumerate(reversed(bound)):
            if name == t.name:
                return f"b{depth}"
        return f"v:{t.name}"
    if isinstance(t, ast.NumLit):
        return f"n:{t.value!r}"
    if isinstance(t, ast.StrLit):
        return f"s:{t.value!r}"
    if isinstance(t, ast.BoolLit):
        return f"B:{t.value}"
    if isinstance(t, ast.Fun):
        return f"(fun{len(t.params)} {alpha_key(t.body, bound + t.params)})"
    if isinstance(t, ast.Let):
        parts = [alpha_key(t.bound, bound)]
        if t.contract is not None:
            parts.append(alpha_key(t.contract, bound))
        parts.append(alpha_key(t.body, bound + (t.name,)))
        return f"(let {' '.join(parts)})"
    tag = type(t).__name__
    if isinstance(t, ast.BinOp):
        tag += t.op
    if isinstance(t, ast.FieldAccess):
        tag += f".{t.name}"
    if isinstance(t, ast.BuiltinContract):
        tag += t.kind
    if isinstance(t, (ast.RecordLit, ast.RecordOfCtor)):
        tag += ",".join(n for n, _ in t.fields)
    inner = " ".join(alpha_key(c, bound) for c in ast.children(t))
    return f"({tag} {inner})"


# ---------------------------------------------------------------------------
# Capture-avoiding substitution


class _Names:
    def __init__(self, taken: set[str]):
        self._taken = set(taken)
        self._counter = itertools.count()

    def fresh(self, hint: str) -> str:
        while True:
            name = f"{hint}_{next(self._counter)}"
            if name not in self._taken:
                self._taken.add(name)
                return name


def _all_names(t: Term) -> set[str]:
    names = set()
    if isinstance(t, ast.Var):
        names.add(t.name)
    if isinstance(t, ast.Fun):
        names.update(t.params)
    if isinstance(t, ast.Let):
        names.add(t.name)
    for c in ast.children(t):
        names |= _all_names(c)
    return names


def substitute(t: Term, name: str, replacement: Term, names: _Names,
               sites: list[Span] | None = None) -> Term:
    """Replace free occurrences of `name` by `replacement`, renaming binders
    that would capture its free variables."""
    rep_free = ast.free_vars(replacement)

    def go(node: Term) -> Term:
        if isinstance(node, ast.Var):
            if node.name == name:
                if sites is not None:
                    sites.append(node.span)
                return replacement
            return node
        if isinstance(node, ast.Fun):
            if name in node.params:
                return node
            params, body = node.params, node.body
            clashing = [p for p in params if p in rep_free and name in ast.free_vars(body)]
            for p in clashing:
                new = names.fresh(p)
                body = substitute(body, p, ast.Var(node.span, new), names)
                params = tuple(new if q == p else q for q in params)
            return ast.Fun(node.span, params, go(body))
        if isinstance(node, ast.Let):
            contract = go(node.contract) if node.contract is not None else None
            bound = go(node.bound)
            binder, body = node.name, node.body
            if binder == name:
                return ast.Let(node.span, binder, contract, bound, body)
            if binder in rep_free and name in ast.free_vars(body):
                new = names.fresh(binder)
                body = substitute(body, binder, ast.Var(node.span, new), names)
                binder = new
            return ast.Let(node.span, binder, contract, bound, go(body))
        return transform_children(node, go)

    return go(t)


# ---------------------------------------------------------------------------
# Inlining


def inline(t: Term, name: str) -> TransformReport:
    """Substitute the first let-binding of `name` at each use site.

    An annotated definition travels as `(value | C)`.  When substitution
    puts a literal function at the head of an application, the call is
    reduced in place, which is what makes the pass an inliner rather than
    a mere expander.  The binding itself is dropped.
    """
    names = _Names(_all_names(t))
    sites: list[Span] = []
    found: list[ast.Let] = []

    def drop(node: Term) -> Term:
        if found:
            return node
        if isinstance(node, ast.Let) and node.name == name:
            found.append(node)
            bound = node.bound
            if node.contract is not None:
                bound = ast.Annot(node.contract.span.cover(bound.span),
                                  bound, node.contract)
            body = substitute(node.body, name, bound, names, sites)
            return _beta_inlined(body, bound)
        return transform_children(node, drop)

    out = drop(t)
    if not found:
        raise UnknownBinding(f"no let-binding for {name!r}")
    return TransformReport(t, out, tuple(sites))


def _beta_inlined(t: Term, inlined: Term) -> Term:
    """Reduce applications whose head is the just-inlined definition."""
    if not isinstance(inlined, ast.Fun):
        return t

    def go(node: Term) -> Term:
        if isinstance(node, ast.App):
            head, args = _unroll_spine(node)
            if head is inlined and args:
                head2 = go(head)
                args2 = [go(a) for a in args]
                return _apply_fun(node.span, head2, args2)
        return transform_children(node, go)

    return go(t)


def _unroll_spine(t: ast.App) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    cur: Term = t
    while isinstance(cur, ast.App):
        args.append(cur.arg)
        cur = cur.fn
    args.reverse()
    return cur, args


def _apply_fun(span: Span, fn: Term, args: list[Term]) -> Term:
    names = _Names(_all_names(fn) | set().union(*(_all_names(a) for a in args)))
    cur = fn
    for i, arg in enumerate(args):
        if not isinstance(cur, ast.Fun):
            for rest in args[i:]:
                cur = ast.App(span, cur, rest)
            return cur
        body = substitute(cur.body, cur.params[0], arg, names)
        cur = body if len(cur.params) == 1 else ast.Fun(cur.span, cur.params[1:], body)
    return cur


# ---------------------------------------------------------------------------
# Common subexpression elimination


_MIN_NODES = 3  # hoisting literals and bare variables is never worth a let


def cse(t: Term) -> TransformReport:
    """Hoist repeated subexpressions into fresh lets, largest first.

    Two occurrences count as repeats when they are alpha-equivalent, sit
    under the same binder scope, and mention no variable bound below that
    scope.  Purely syntactic: with stateful union contracts in play this is
    exactly the transformation that can change a program's verdict.
    """
    names = _Names(_all_names(t))
    sites: list[Span] = []
    out = t
    while True:
        found = _best_candidate(out)
        if found is None:
            break
        scope_body, key, definition = found
        fresh = names.fresh("shared")
        out = _hoist(out, scope_body, key, definition, fresh, sites)
    return TransformReport(t, out, tuple(sites))


def _scopes(t: Term) -> list[Term]:
    """Scope bodies, innermost first: every fun/let body plus the root."""
    found: list[tuple[int, int, Term]] = []
    order = itertools.count()

    def walk(node: Term, depth: int) -> None:
        if isinstance(node, (ast.Fun, ast.Let)):
            found.append((depth + 1, next(order), node.body))
        for c in ast.children(node):
            walk(c, depth + 1)

    walk(t, 0)
    found.append((0, next(order), t))
    found.sort(key=lambda item: (-item[0], item[1]))
    return [body for _, _, body in found]


def _collect(scope_body: Term) -> dict[str, list[Term]]:
    occurrences: dict[str, list[Term]] = {}

    def walk(node: Term, bound: frozenset[str]) -> None:
        if ast.size(node) >= _MIN_NODES and not (ast.free_vars(node) & bound):
            occurrences.setdefault(alpha_key(node), []).append(node)
        if isinstance(node, ast.Fun):
            walk(node.body, bound | frozenset(node.params))
            return
        if isinstance(node, ast.Let):
            if node.contract is not None:
                walk(node.contract, bound)
            walk(node.bound, bound)
            walk(node.body, bound | frozenset((node.name,)))
            return
        for c in ast.children(node):
            walk(c, bound)

    walk(scope_body, frozenset())
    return occurrences


def _best_candidate(t: Term) -> tuple[Term, str, Term] | None:
    # Innermost scope wins so the new let sits as tight as possible;
    # within a scope, prefer the largest repeated expression.
    best: tuple[int, Term, str, Term] | None = None
    for scope_body in _scopes(t):
        for key, occ in _collect(scope_body).items():
            distinct = _drop_nested(occ)
            if len(distinct) < 2:
                continue
            sz = ast.size(distinct[0])
            if best is None or sz > best[0]:
                best = (sz, scope_body, key, distinct[0])
        if best is not None:
            return best[1:]
    return None


def _drop_nested(occ: list[Term]) -> list[Term]:
    # An occurrence nested inside another (identical) one is not a separate
    # rewrite site.
    out: list[Term] = []
    for node in occ:
        if not any(_contains(kept, node) for kept in out):
            out.append(node)
    return out


def _contains(parent: Term, node: Term) -> bool:
    if parent is node:
        return True
    return any(_contains(c, node) for c in ast.children(parent))


def _hoist(t: Term, scope_body: Term, key: str, definition: Term,
           fresh: str, sites: list[Span]) -> Term:
    def replace(node: Term, bound: frozenset[str]) -> Term:
        if (node is not scope_body and alpha_key(node) == key
                and not (ast.free_vars(node) & bound)):
            sites.append(node.span)
            return ast.Var(node.span, fresh)
        if isinstance(node, ast.Fun):
            return ast.Fun(node.span, node.params,
                           replace(node.body, bound | frozenset(node.params)))
        if isinstance(node, ast.Let):
            contract = (replace(node.contract, bound)
                        if node.contract is not None else None)
            return ast.Let(node.span, node.name, contract,
                           replace(node.bound, bound),
                           replace(node.body, bound | frozenset((node.name,))))
        return transform_children(node, lambda c: replace(c, bound))

    def rebuild(node: Term) -> Term:
        if node is scope_body:
            new_body = replace(node, frozenset())
            return ast.Let(node.span, fresh, None, definition, new_body)
        return transform_children(node, rebuild)

    return rebuild(t)


# ---------------------------------------------------------------------------
# Behavior differ


def run_term(t: Term, strategy: Strategy) -> tuple[Outcome, str | None]:
    """Evaluate in a fresh run; also export the result when possible."""
    interp = Interp(strategy)
    try:
        value = interp.eval_term(t, prelude_env())
    except BlameSignal as b:
        return Blame(b.report), None
    except CrashSignal as c:
        return Crash(c.kind, c.span, c.message), None
    try:
        return Success(value), interp.export_json(value)
    except BlameSignal as b:
        return Blame(b.report), None
    except CrashSignal as c:
        return Crash(c.kind, c.span, c.message), None
    except ExportError:
        return Success(value), None


def describe_outcome(outcome: Outcome, exported: str | None) -> str:
    if isinstance(outcome, Success):
        return f"success {exported}" if exported is not None else "success <unexportable>"
    if isinstance(outcome, Blame):
        return f"blame ({outcome.report.label.polarity})"
    return f"crash ({outcome.kind})"


def compare_behaviors(a: Term, b: Term, strategy: Strategy) -> DiffVerdict:
    """Evaluate two closed programs in isolated runs and compare verdicts.

    Programs agree when both succeed with structurally equal JSON exports
    (or both produce unexportable values), both blame the same party, or
    both crash with the same kind.
    """
    oa, ja = run_term(a, strategy)
    ob, jb = run_term(b, strategy)
    da, db = describe_outcome(oa, ja), describe_outcome(ob, jb)
    if isinstance(oa, Success) and isinstance(ob, Success):
        agree = ja == jb
    elif isinstance(oa, Blame) and isinstance(ob, Blame):
        agree = oa.report.label.polarity == ob.report.label.polarity
    elif isinstance(oa, Crash) and isinstance(ob, Crash):
        agree = oa.kind == ob.kind
    else:
        agree = False
    if agree:
        return DiffVerdict(oa, ob, "agree", f"both: {da}")
    return DiffVerdict(oa, ob, "diverge", f"left: {da}; right: {db}")
