"""Canonical single-line pretty-printer.

The output re-parses to the same tree (modulo spans), so printing is a fixed
point after one round trip.
"""
from __future__ import annotations

import json

from .ast import (
    Annot, App, ArrayLit, ArrayOfCtor, ArrowCtor, BinOp, BoolLit,
    BuiltinContract, CaseCtor, FieldAccess, FromPred, Fun, If,
    IntersectionCtor, Let, NullLit, NumLit, RecordLit, RecordOfCtor, StrLit,
    Term, UnionCtor, Var,
)

# Precedence levels; higher binds tighter.
_EXPR, _ANNOT, _UNION, _INTER, _ARROW = 0, 1, 2, 3, 4
_OR, _AND, _CMP, _CONCAT, _ADD, _MUL, _APP, _ATOM = 5, 6, 7, 8, 9, 10, 11, 12

_BINOP_LEVEL = {
    "||": _OR, "&&": _AND,
    "==": _CMP, "<=": _CMP, "<": _CMP, ">=": _CMP, ">": _CMP,
    "++": _CONCAT, "+": _ADD, "-": _ADD, "*": _MUL, "/": _MUL,
}
_RIGHT_ASSOC = {"++"}


def format_number(value: float) -> str:
    if value != value or value in (float("inf"), float("-inf")):
        return repr(value)
    if value == int(value) and abs(value) < 1e18:
        return str(int(value))
    return repr(value)


def pretty(t: Term) -> str:
    """Render a term as canonical source text."""
    return _render(t, _EXPR)


def _render(t: Term, want: int) -> str:
    text, level = _pp(t)
    if level < want:
        return f"({text})"
    return text


def _pp(t: Term) -> tuple[str, int]:
    if isinstance(t, NumLit):
        text = format_number(t.value)
        return text, (_APP if text.startswith("-") else _ATOM)
    if isinstance(t, StrLit):
        return json.dumps(t.value), _ATOM
    if isinstance(t, BoolLit):
        return ("true" if t.value else "false"), _ATOM
    if isinstance(t, NullLit):
        return "null", _ATOM
    if isinstance(t, Var):
        return t.name, _ATOM
    if isinstance(t, ArrayLit):
        return "[" + ", ".join(_render(e, _EXPR) for e in t.elements) + "]", _ATOM
    if isinstance(t, RecordLit):
        inner = ", ".join(f"{n} = {_render(v, _EXPR)}" for n, v in t.fields)
        return "{" + inner + "}", _ATOM
    if isinstance(t, FieldAccess):
        return f"{_render(t.record, _ATOM)}.{t.name}", _ATOM
    if isinstance(t, Fun):
        return f"fun {' '.join(t.params)} => {_render(t.body, _EXPR)}", _EXPR
    if isinstance(t, Let):
        head = f"let {t.name}"
        bound = t.bound
        if t.contract is not None:
            head += f" | {_render(t.contract, _UNION)}"
        elif isinstance(bound, Annot):
            # Prefer the sugared form for annotated definitions.
            head += f" | {_render(bound.contract, _UNION)}"
            bound = bound.expr
        return f"{head} = {_render(bound, _EXPR)} in {_render(t.body, _EXPR)}", _EXPR
    if isinstance(t, If):
        return (f"if {_render(t.cond, _EXPR)} then {_render(t.then, _EXPR)} "
                f"else {_render(t.orelse, _EXPR)}"), _EXPR
    if isinstance(t, App):
        return f"{_render(t.fn, _APP)} {_render(t.arg, _ATOM)}", _APP
    if isinstance(t, BinOp):
        level = _BINOP_LEVEL[t.op]
        if t.op in _RIGHT_ASSOC:
            lhs, rhs = _render(t.lhs, level + 1), _render(t.rhs, level)
        else:
            lhs, rhs = _render(t.lhs, level), _render(t.rhs, level + 1)
        return f"{lhs} {t.op} {rhs}", level
    if isinstance(t, Annot):
        return f"{_render(t.expr, _ANNOT)} | {_render(t.contract, _UNION)}", _ANNOT
    if isinstance(t, BuiltinContract):
        return t.kind, _ATOM
    if isinstance(t, FromPred):
        return f"contracts.fromPred {_render(t.pred, _ATOM)}", _APP
    if isinstance(t, ArrowCtor):
        return f"{_render(t.domain, _ARROW + 1)} -> {_render(t.codomain, _ARROW)}", _ARROW
    if isinstance(t, UnionCtor):
        return f"{_render(t.left, _UNION + 1)} @| {_render(t.right, _UNION)}", _UNION
    if isinstance(t, IntersectionCtor):
        return f"{_render(t.left, _INTER + 1)} @& {_render(t.right, _INTER)}", _INTER
    if isinstance(t, CaseCtor):
        return "Case [" + ", ".join(_render(b, _EXPR) for b in t.branches) + "]", _APP
    if isinstance(t, RecordOfCtor):
        inner = ", ".join(f"{n} | {_render(c, _UNION)}" for n, c in t.fields)
        return "{" + inner + "}", _ATOM
    if isinstance(t, ArrayOfCtor):
        return f"List {_render(t.element, _ATOM)}", _APP
    raise TypeError(f"cannot pretty-print {type(t).__name__}")
