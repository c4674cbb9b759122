"""Abstract syntax for the object language.

Every node carries a Span pointing back into the source file; spans are the
anchor for all diagnostics, including blame reports.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """Half-open byte range [start, end) in a named source file."""

    file: str
    start: int
    end: int
    line_start: int
    col_start: int
    line_end: int
    col_end: int

    def cover(self, other: Span) -> Span:
        """Smallest span containing both self and other (same file)."""
        lo, hi = self, other
        if other.start < self.start:
            lo = other
        if other.end > self.end:
            hi = other
        return Span(self.file, lo.start, hi.end,
                    lo.line_start, lo.col_start, hi.line_end, hi.col_end)

    def contains(self, other: Span) -> bool:
        return self.start <= other.start and other.end <= self.end

    def location(self) -> str:
        return f"{self.file}:{self.line_start}:{self.col_start}"


@dataclass(frozen=True)
class Term:
    span: Span = field(repr=False)


# ---------------------------------------------------------------------------
# Literals and data


@dataclass(frozen=True)
class NumLit(Term):
    value: float


@dataclass(frozen=True)
class StrLit(Term):
    value: str


@dataclass(frozen=True)
class BoolLit(Term):
    value: bool


@dataclass(frozen=True)
class NullLit(Term):
    pass


@dataclass(frozen=True)
class ArrayLit(Term):
    elements: tuple[Term, ...]


@dataclass(frozen=True)
class RecordLit(Term):
    # Field names are pairwise distinct (checked by the parser); fields do
    # not see their siblings (non-recursive scope).
    fields: tuple[tuple[str, Term], ...]


@dataclass(frozen=True)
class FieldAccess(Term):
    record: Term
    name: str


# ---------------------------------------------------------------------------
# Binding and control


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Fun(Term):
    params: tuple[str, ...]  # at least one
    body: Term


@dataclass(frozen=True)
class Let(Term):
    name: str
    contract: Term | None  # always None in parsed trees: `let x | C = v`
    bound: Term            # desugars to bound = Annot(v, C)
    body: Term


@dataclass(frozen=True)
class If(Term):
    cond: Term
    then: Term
    orelse: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class BinOp(Term):
    op: str
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Annot(Term):
    """`expr | contract` - attach a contract check to an expression."""

    expr: Term
    contract: Term


# ---------------------------------------------------------------------------
# Contract constructors.  These are ordinary terms: they evaluate to
# first-class contract values at runtime.


@dataclass(frozen=True)
class ContractCtor(Term):
    pass


@dataclass(frozen=True)
class BuiltinContract(ContractCtor):
    kind: str  # "Num" | "Str" | "Bool" | "Dyn"


@dataclass(frozen=True)
class FromPred(ContractCtor):
    pred: Term


@dataclass(frozen=True)
class ArrowCtor(ContractCtor):
    domain: Term
    codomain: Term


@dataclass(frozen=True)
class UnionCtor(ContractCtor):
    # Binary in the syntax; n-ary unions are right-nested binaries.
    left: Term
    right: Term


@dataclass(frozen=True)
class IntersectionCtor(ContractCtor):
    left: Term
    right: Term


@dataclass(frozen=True)
class CaseCtor(ContractCtor):
    # Children must evaluate to arrow contracts; checked at evaluation.
    branches: tuple[Term, ...]


@dataclass(frozen=True)
class RecordOfCtor(ContractCtor):
    fields: tuple[tuple[str, Term], ...]


@dataclass(frozen=True)
class ArrayOfCtor(ContractCtor):
    element: Term


def children(t: Term) -> tuple[Term, ...]:
    """Direct sub-terms of a node, in source order."""
    if isinstance(t, ArrayLit):
        return t.elements
    if isinstance(t, RecordLit):
        return tuple(v for _, v in t.fields)
    if isinstance(t, FieldAccess):
        return (t.record,)
    if isinstance(t, Fun):
        return (t.body,)
    if isinstance(t, Let):
        parts: list[Term] = []
        if t.contract is not None:
            parts.append(t.contract)
        parts.extend((t.bound, t.body))
        return tuple(parts)
    if isinstance(t, If):
        return (t.cond, t.then, t.orelse)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, BinOp):
        return (t.lhs, t.rhs)
    if isinstance(t, Annot):
        return (t.expr, t.contract)
    if isinstance(t, FromPred):
        return (t.pred,)
    if isinstance(t, ArrowCtor):
        return (t.domain, t.codomain)
    if isinstance(t, (UnionCtor, IntersectionCtor)):
        return (t.left, t.right)
    if isinstance(t, CaseCtor):
        return t.branches
    if isinstance(t, RecordOfCtor):
        return tuple(v for _, v in t.fields)
    if isinstance(t, ArrayOfCtor):
        return (t.element,)
    return ()


def size(t: Term) -> int:
    """Number of nodes in the subtree rooted at t."""
    return 1 + sum(size(c) for c in children(t))


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Fun):
        return free_vars(t.body) - frozenset(t.params)
    if isinstance(t, Let):
        inner = free_vars(t.body) - frozenset((t.name,))
        outer = free_vars(t.bound)
        if t.contract is not None:
            outer |= free_vars(t.contract)
        return inner | outer
    out: frozenset[str] = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out
