"""Union and intersection checking under three pluggable strategies.

NAIVE     - purely eager: a union picks the first branch that passes an
            immediate check (functions pass on shape alone, with no delayed
            obligations); an intersection attaches its branches one after
            the other, so `x | A @& B` behaves exactly like `(x | A) | B`.
ARITY     - like NAIVE, except a union over function contracts dispatches on
            the function's declared parameter count; branches with equal
            arity are rejected outright when the contract is attached.
STATEFUL  - union attachments allocate a shared viability cell: each call
            can kill branches whose codomain the result violates, and blame
            fires only when no branch remains alive.  Intersections choose a
            branch per call: the caller is blamed only when the argument
            fails every branch domain, the implementation when the result
            fails a branch the argument satisfied.

Strategy choice only affects union/intersection attachments; flat, arrow,
record, array and case contracts behave identically everywhere.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .contracts import (
    Arrow, ArrayOf, BlameReport, CaseArrow, CODOMAIN, Contract, DOMAIN, Dyn,
    Flat, Intersection, Label, RecordOf, Union, attach, blame_report,
    check_flat, describe, intersection_branch, negate, raise_blame,
    render_value, union_branch, wrap_arrow,
)
from .runtime.values import (
    AMBIGUOUS_UNION, ArrayV, BlameSignal, Blame, BoolV, CrashSignal,
    GuardedFnV, RecordV, Thunk, Value, applicable, declared_arity,
)
from .syntax import ast
from .syntax.ast import Span, Term

if TYPE_CHECKING:
    from .runtime.interp import Interp


class Strategy(enum.Enum):
    NAIVE = "naive"
    ARITY = "arity"
    STATEFUL = "stateful"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown strategy {name!r}; "
                             f"choose from {', '.join(s.value for s in cls)}") from None


# ---------------------------------------------------------------------------
# Shared viability state


@dataclass
class ViabilityCell:
    """Per-attachment bookkeeping for one union or intersection.

    `alive` flags only ever go from True to False; when the last one drops,
    blame on the owning label has been raised, carrying every recorded
    witness.
    """

    kind: str  # "union" | "intersection"
    alive: list[bool]
    witnesses: list[list[BlameReport]]
    owner: Label | None = None

    @classmethod
    def fresh(cls, kind: str, n: int) -> "ViabilityCell":
        return cls(kind, [True] * n, [[] for _ in range(n)])

    @property
    def all_dead(self) -> bool:
        return not any(self.alive)


def mark_branch_dead(cell: ViabilityCell, index: int, witness: BlameReport) -> Blame | None:
    """Kill branch `index` (0-based), recording its witness.

    Returns a blame outcome on the owner label iff no branch remains alive;
    the verdict does not depend on the order in which branches died.
    """
    if not cell.alive[index]:
        raise ValueError(f"branch {index} is already dead")
    cell.alive[index] = False
    cell.witnesses[index].append(witness)
    if cell.all_dead:
        owner = cell.owner if cell.owner is not None else witness.label
        summary = "; ".join(
            f"branch {i + 1}: {w.witness}"
            for i, ws in enumerate(cell.witnesses) for w in ws)
        return Blame(blame_report(owner, f"every branch has failed ({summary})"))
    return None


def _kill(cell: ViabilityCell, index: int, witness: BlameReport) -> None:
    outcome = mark_branch_dead(cell, index, witness)
    if outcome is not None:
        raise BlameSignal(outcome.report)


# ---------------------------------------------------------------------------
# Eager satisfaction probes

_FN_LIKE = (Arrow, CaseArrow)


def satisfies_eagerly(interp: "Interp", contract: Contract, value: Value) -> bool:
    """Decidable-now approximation of `value` satisfying `contract`.

    Flat predicates run for real (blame raised inside a predicate's own
    evaluation propagates); function contracts are approximated by shape,
    since their obligations are inherently delayed.  Used for union/
    intersection branch trials, where an alternative must be accepted or
    rejected immediately.
    """
    if isinstance(contract, Dyn):
        return True
    if isinstance(contract, Flat):
        verdict = interp.apply(contract.pred, Thunk.from_value(value), _nowhere())
        if not isinstance(verdict, BoolV):
            raise CrashSignal("TypeError", None,
                              f"contract predicate returned {type(verdict).__name__}")
        return verdict.value
    if isinstance(contract, _FN_LIKE):
        return applicable(value)
    if isinstance(contract, Union):
        return any(satisfies_eagerly(interp, b, value) for b in contract.branches)
    if isinstance(contract, Intersection):
        return all(satisfies_eagerly(interp, b, value) for b in contract.branches)
    if isinstance(contract, ArrayOf):
        if not isinstance(value, ArrayV):
            return False
        return all(satisfies_eagerly(interp, contract.element, interp.force(t))
                   for t in value.elements)
    if isinstance(contract, RecordOf):
        if not isinstance(value, RecordV):
            return False
        if any(n not in value.fields for n in contract.fields):
            return False
        if contract.exhaustive and any(n not in contract.fields for n in value.fields):
            return False
        return all(satisfies_eagerly(interp, fc, interp.force(value.fields[n]))
                   for n, fc in contract.fields.items())
    raise TypeError(type(contract).__name__)


_NOWHERE: Span | None = None


def _nowhere() -> Span:
    global _NOWHERE
    if _NOWHERE is None:
        _NOWHERE = Span("<internal>", 0, 0, 1, 1, 1, 1)
    return _NOWHERE


def _accepting_codomain(interp: "Interp", branch: Contract, arg: Value) -> Contract | None:
    """Residual codomain if `branch` can be exercised with `arg`, else None."""
    if isinstance(branch, Arrow):
        if satisfies_eagerly(interp, branch.domain, arg):
            return branch.codomain
        return None
    if isinstance(branch, CaseArrow):
        for case in branch.branches:
            if satisfies_eagerly(interp, case.domain, arg):
                return case.codomain
        return None
    return None


# ---------------------------------------------------------------------------
# Contract arity


def contract_arity(c: Contract) -> int:
    """Length of the right spine of arrows; 0 for non-arrow contracts."""
    n = 0
    while isinstance(c, Arrow):
        n += 1
        c = c.codomain
    return n


# ---------------------------------------------------------------------------
# Union


def check_union(interp: "Interp", thunk: Thunk, branches: tuple[Contract, ...],
                label: Label, strategy: Strategy) -> Thunk:
    """Attach a union of `branches` to `thunk` under the given strategy."""
    if len(branches) < 2:
        raise ValueError("a union needs at least two branches")

    def compute() -> Value:
        value = interp.force(thunk)
        if strategy is Strategy.NAIVE:
            return _union_naive(interp, value, branches, label)
        if strategy is Strategy.ARITY:
            return _union_arity(interp, value, branches, label)
        return _union_stateful(interp, value, branches, label)

    return Thunk.from_compute(compute, term=thunk.term)


def _union_naive(interp: "Interp", value: Value, branches, label: Label) -> Value:
    for b in branches:
        if satisfies_eagerly(interp, b, value):
            # First passing branch wins; no delayed obligations installed.
            return value
    raise_blame(label, f"{render_value(value)} satisfies no branch")
    raise AssertionError  # unreachable


def _union_arity(interp: "Interp", value: Value, branches, label: Label) -> Value:
    arrows: list[tuple[int, Arrow]] = []
    for i, b in enumerate(branches):
        if isinstance(b, Arrow):
            arrows.append((i, b))
        elif satisfies_eagerly(interp, b, value):
            return value
    if not arrows or not applicable(value):
        raise_blame(label, f"{render_value(value)} satisfies no branch")
    arities = [contract_arity(b) for _, b in arrows]
    if len(set(arities)) != len(arities):
        raise CrashSignal(
            AMBIGUOUS_UNION, label.span,
            "union branches are not distinguishable by arity: "
            + ", ".join(f"({describe(b)})" for _, b in arrows))
    want = declared_arity(value)
    for (i, b), arity in zip(arrows, arities):
        if arity == want:
            return wrap_arrow(value, b.domain, b.codomain,
                              label.push(union_branch(i + 1)))
    raise_blame(label, f"no branch has arity {want} "
                       f"(function declares {want} parameter(s))")
    raise AssertionError


def _union_stateful(interp: "Interp", value: Value, branches, label: Label) -> Value:
    cell = ViabilityCell.fresh("union", len(branches))
    owner = label.with_cell(cell)
    cell.owner = owner
    guarded: list[tuple[int, Contract]] = []
    for i, b in enumerate(branches):
        if isinstance(b, _FN_LIKE):
            if applicable(value):
                guarded.append((i, b))
            else:
                _kill(cell, i, blame_report(owner.push(union_branch(i + 1)),
                                            f"{render_value(value)} is not a function"))
        elif satisfies_eagerly(interp, b, value):
            # The union is satisfied outright; guards would be redundant.
            return value
        else:
            _kill(cell, i, blame_report(owner.push(union_branch(i + 1)),
                                        render_value(value)))
    return GuardedFnV(value, UnionGuard(tuple(guarded), cell, owner))


@dataclass(frozen=True)
class UnionGuard:
    """Per-call protocol for a stateful union over function contracts.

    A branch whose domain rejects the current argument is merely
    inapplicable for this call and stays alive: a caller-side failure is no
    evidence against the implementation.  A codomain failure kills the
    branch; blame fires when the last one dies.
    """

    branches: tuple[tuple[int, Contract], ...]
    cell: ViabilityCell
    label: Label

    def apply(self, interp: "Interp", inner: Value, arg: Thunk, call_span: Span) -> Value:
        if self.cell.all_dead:
            raise_blame(self.label, "every branch has failed")
        arg_value = interp.force(arg)
        usable: list[tuple[int, Contract]] = []
        for i, b in self.branches:
            if not self.cell.alive[i]:
                continue
            codomain = _accepting_codomain(interp, b, arg_value)
            if codomain is not None:
                usable.append((i, codomain))
        if not usable:
            raise_blame(negate(self.label).push(DOMAIN),
                        f"no live branch accepts argument {render_value(arg_value)}")
        result = interp.apply(inner, arg, call_span)
        for i, codomain in usable:
            if not satisfies_eagerly(interp, codomain, result):
                witness = blame_report(
                    self.label.push(union_branch(i + 1)).push(CODOMAIN),
                    render_value(result))
                _kill(self.cell, i, witness)
        return result


# ---------------------------------------------------------------------------
# Intersection


def check_intersection(interp: "Interp", thunk: Thunk, branches: tuple[Contract, ...],
                       label: Label, strategy: Strategy) -> Thunk:
    """Attach an intersection of `branches` to `thunk` under the strategy."""
    if len(branches) < 2:
        raise ValueError("an intersection needs at least two branches")

    def compute() -> Value:
        if strategy in (Strategy.NAIVE, Strategy.ARITY):
            # `x | A @& B` behaves exactly like `(x | A) | B`; this models
            # sequential combinators and does not support overloading.
            out = thunk
            for i, b in enumerate(branches):
                out = attach(interp, out, _tolerant(b),
                             label.push(intersection_branch(i + 1)))
            return interp.force(out)
        return _intersection_stateful(interp, thunk, branches, label)

    return Thunk.from_compute(compute, term=thunk.term)


def _tolerant(c: Contract) -> Contract:
    # Each record branch of an intersection must tolerate the fields that
    # the other branches contribute.
    if isinstance(c, RecordOf) and c.exhaustive:
        return RecordOf(c.fields, exhaustive=False)
    return c


def _intersection_stateful(interp: "Interp", thunk: Thunk, branches,
                           label: Label) -> Value:
    cell = ViabilityCell.fresh("intersection", len(branches))
    owner = label.with_cell(cell)
    cell.owner = owner
    value = interp.force(thunk)
    arrows = [(i, b) for i, b in enumerate(branches) if isinstance(b, _FN_LIKE)]
    current = value
    if arrows:
        if not applicable(value):
            raise_blame(owner, f"{render_value(value)} is not a function")
        current = GuardedFnV(value, IntersectionGuard(tuple(arrows), cell, owner))
    for i, b in enumerate(branches):
        if isinstance(b, _FN_LIKE):
            continue
        branch_label = owner.push(intersection_branch(i + 1))
        if isinstance(b, Flat):
            # The predicate sees the value as wrapped by the other branches,
            # so probing calls inside the predicate hit their guards.
            check_flat(interp, b.pred, current, branch_label)
        elif isinstance(b, Dyn):
            continue
        else:
            wrapped = attach(interp, Thunk.from_value(current), _tolerant(b),
                             branch_label)
            current = interp.force(wrapped)
    return current


@dataclass(frozen=True)
class IntersectionGuard:
    """Per-call protocol for a stateful intersection over functions.

    Branch choice happens independently at every application, so the check
    distributes through currying.  No branch is ever killed across calls:
    the caller is blamed when the argument fails every branch domain, the
    implementation when the result fails a branch the argument satisfied.
    """

    branches: tuple[tuple[int, Contract], ...]
    cell: ViabilityCell
    label: Label

    def apply(self, interp: "Interp", inner: Value, arg: Thunk, call_span: Span) -> Value:
        arg_value = interp.force(arg)
        accepted: list[tuple[int, Contract]] = []
        for i, b in self.branches:
            codomain = _accepting_codomain(interp, b, arg_value)
            if codomain is not None:
                accepted.append((i, codomain))
        if not accepted:
            raise_blame(negate(self.label).push(DOMAIN),
                        f"argument {render_value(arg_value)} fails every branch")
        result = interp.apply(inner, arg, call_span)
        delayed: list[tuple[int, Contract]] = []
        for i, codomain in accepted:
            if isinstance(codomain, (Flat, Dyn)):
                if not satisfies_eagerly(interp, codomain, result):
                    raise_blame(self.label.push(intersection_branch(i + 1)).push(CODOMAIN),
                                render_value(result))
            else:
                delayed.append((i, codomain))
        if not delayed:
            return result
        if len(delayed) == 1:
            i, codomain = delayed[0]
            out = attach(interp, Thunk.from_value(result), codomain,
                         self.label.push(intersection_branch(i + 1)).push(CODOMAIN))
        else:
            residual = Intersection(tuple(c for _, c in delayed))
            out = attach(interp, Thunk.from_value(result), residual,
                         self.label.push(CODOMAIN))
        return interp.force(out)


# ---------------------------------------------------------------------------
# Case combinator


def case_arrow(interp: "Interp", thunk: Thunk, branches: tuple[Arrow, ...],
               label: Label) -> Thunk:
    """Dispatching function contract: the branch is chosen per call.

    The first branch whose domain accepts the argument is selected; its
    codomain keeps guarding the curried remainder of the call.
    """
    for b in branches:
        if not isinstance(b, Arrow):
            raise CrashSignal("TypeError", label.span,
                              "Case branches must be arrow contracts")

    def compute() -> Value:
        value = interp.force(thunk)
        if not applicable(value):
            raise_blame(label, f"{render_value(value)} is not a function")
        return GuardedFnV(value, CaseGuard(branches, label))

    return Thunk.from_compute(compute, term=thunk.term)


@dataclass(frozen=True)
class CaseGuard:
    branches: tuple[Arrow, ...]
    label: Label

    def apply(self, interp: "Interp", inner: Value, arg: Thunk, call_span: Span) -> Value:
        arg_value = interp.force(arg)
        for i, b in enumerate(self.branches):
            if not satisfies_eagerly(interp, b.domain, arg_value):
                continue
            result = interp.apply(inner, arg, call_span)
            branch_label = self.label.push(union_branch(i + 1)).push(CODOMAIN)
            if isinstance(b.codomain, (Flat, Dyn)):
                if not satisfies_eagerly(interp, b.codomain, result):
                    raise_blame(branch_label, render_value(result))
                return result
            out = attach(interp, Thunk.from_value(result), b.codomain, branch_label)
            return interp.force(out)
        raise_blame(negate(self.label).push(DOMAIN),
                    f"no branch accepts argument {render_value(arg_value)}")
        raise AssertionError


# ---------------------------------------------------------------------------
# Disjunctive normal form (source-level analysis)


def dnf_normalize(contract: Term) -> Term:
    """Rewrite nested unions/intersections to a union of intersections.

    Distributes `A @& (B @| C)` to `(A @& B) @| (A @& C)`; anything that is
    not a union or intersection node is treated as an opaque leaf.  The
    rewrite preserves first-order checking semantics and is exposed as an
    analysis only; checking never normalizes.
    """
    disjuncts = _dnf(contract)
    return _rebuild_union([_rebuild_intersection(conj) for conj in disjuncts])


def _dnf(t: Term) -> list[list[Term]]:
    if isinstance(t, ast.UnionCtor):
        return _dnf(t.left) + _dnf(t.right)
    if isinstance(t, ast.IntersectionCtor):
        return [a + b for a in _dnf(t.left) for b in _dnf(t.right)]
    return [[t]]


def _rebuild_intersection(parts: list[Term]) -> Term:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = ast.IntersectionCtor(p.span.cover(out.span), p, out)
    return out


def _rebuild_union(parts: list[Term]) -> Term:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = ast.UnionCtor(p.span.cover(out.span), p, out)
    return out
