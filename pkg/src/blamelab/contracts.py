"""First-class contracts, blame labels and the delayed-check wrappers.

A contract attaches to a thunk and produces a new thunk; forcing the result
performs the eager part of the check and installs guards for the delayed
part (calls for arrows, fields for records, elements for arrays).  Blame
labels track the annotation site, the responsible party, and the path of
contract constructors traversed, so a violation can name the caller or the
implementation precisely.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Any

from .runtime.values import (
    NEGATIVE, POSITIVE, TYPE_ERROR, ArrayV, BlameSignal, BoolV, ClosureV,
    ContractV, CrashSignal, GuardedFnV, NullV, NumV, PrimV, RecordV, StrV,
    Thunk, Value, applicable, type_name,
)
from .syntax.ast import Span

if TYPE_CHECKING:
    from .runtime.interp import Interp

WITNESS_DEPTH = 8  # value rendering depth cap in blame reports


# ---------------------------------------------------------------------------
# Contract values


class Contract:
    __slots__ = ()


@dataclass(slots=True)
class Flat(Contract):
    """Predicate contract; checked eagerly on a forced value."""

    pred: Value
    name: str | None = None


@dataclass(frozen=True, slots=True)
class Arrow(Contract):
    domain: Contract
    codomain: Contract


@dataclass(frozen=True, slots=True)
class RecordOf(Contract):
    fields: dict[str, Contract]
    exhaustive: bool = True


@dataclass(frozen=True, slots=True)
class ArrayOf(Contract):
    element: Contract


@dataclass(frozen=True, slots=True)
class Union(Contract):
    branches: tuple[Contract, ...]


@dataclass(frozen=True, slots=True)
class Intersection(Contract):
    branches: tuple[Contract, ...]


@dataclass(frozen=True, slots=True)
class CaseArrow(Contract):
    branches: tuple[Arrow, ...]


@dataclass(frozen=True, slots=True)
class Dyn(Contract):
    pass


DYN = Dyn()

_LOOSE, _CONNECTIVE, _ARROW_LEVEL, _LEAF = range(4)


def describe(c: Contract) -> str:
    """Concrete-syntax rendering of a contract for reports."""
    return _describe(c, _LOOSE)


def _describe(c: Contract, want: int) -> str:
    if isinstance(c, Flat):
        return c.name or "<predicate>"
    if isinstance(c, Dyn):
        return "Dyn"
    if isinstance(c, Arrow):
        text = f"{_describe(c.domain, _LEAF)} -> {_describe(c.codomain, _ARROW_LEVEL)}"
        return f"({text})" if want > _ARROW_LEVEL else text
    if isinstance(c, Union):
        text = " @| ".join(_describe(b, _CONNECTIVE + 1) for b in c.branches)
        return f"({text})" if want > _CONNECTIVE else text
    if isinstance(c, Intersection):
        text = " @& ".join(_describe(b, _CONNECTIVE + 1) for b in c.branches)
        return f"({text})" if want > _CONNECTIVE else text
    if isinstance(c, CaseArrow):
        return "Case [" + ", ".join(_describe(b, _LOOSE) for b in c.branches) + "]"
    if isinstance(c, RecordOf):
        return "{" + ", ".join(f"{n} | {_describe(fc, _LOOSE)}" for n, fc in c.fields.items()) + "}"
    if isinstance(c, ArrayOf):
        return f"List {_describe(c.element, _LEAF)}"
    raise TypeError(type(c).__name__)


# ---------------------------------------------------------------------------
# Labels


@dataclass(frozen=True, slots=True)
class PathStep:
    kind: str  # "domain" | "codomain" | "union-branch" | "intersection-branch" | "field" | "element"
    index: int | None = None
    name: str | None = None

    def render(self) -> str:
        if self.kind == "union-branch":
            return f"branch {self.index} of union"
        if self.kind == "intersection-branch":
            return f"branch {self.index} of intersection"
        if self.kind == "field":
            return f"field `{self.name}`"
        return self.kind


DOMAIN = PathStep("domain")
CODOMAIN = PathStep("codomain")
ELEMENT = PathStep("element")


def union_branch(i: int) -> PathStep:
    return PathStep("union-branch", index=i)


def intersection_branch(i: int) -> PathStep:
    return PathStep("intersection-branch", index=i)


def field_step(name: str) -> PathStep:
    return PathStep("field", name=name)


@dataclass(frozen=True)
class Label:
    """Blame provenance for one contract attachment."""

    span: Span
    polarity: str = POSITIVE
    path: tuple[PathStep, ...] = ()
    contract_repr: str = ""
    cell: Any = None  # ViabilityCell for union/intersection attachments

    def push(self, step: PathStep) -> "Label":
        return replace(self, path=self.path + (step,))

    def with_cell(self, cell: Any) -> "Label":
        return replace(self, cell=cell)

    def domain_steps(self) -> int:
        return sum(1 for s in self.path if s.kind == "domain")


def negate(label: Label) -> Label:
    """Flip the blamed party; everything else is preserved (involutive)."""
    flipped = NEGATIVE if label.polarity == POSITIVE else POSITIVE
    return replace(label, polarity=flipped)


# ---------------------------------------------------------------------------
# Blame reports


@dataclass(frozen=True)
class BlameReport:
    label: Label
    witness: str

    @property
    def party(self) -> str:
        return "implementation" if self.label.polarity == POSITIVE else "caller"

    def path_text(self) -> str:
        if not self.label.path:
            return "whole contract"
        return ", ".join(step.render() for step in self.label.path)

    def headline(self) -> str:
        return f"blame error: contract broken by the {self.party}"

    def render(self, source: str | None = None) -> str:
        lines = [
            self.headline(),
            f" --> {self.label.span.location()}",
            f"  contract: {self.label.contract_repr or '<contract>'}",
            f"  path: {self.path_text()}",
            f"  witness: {self.witness}",
        ]
        if source is not None:
            lines[2:2] = _excerpt(self.label.span, source)
        cell = self.label.cell
        if cell is not None:
            for i, ws in enumerate(cell.witnesses, start=1):
                for w in ws:
                    lines.append(
                        f"  branch {i} failed: {w.witness} ({w.path_text()})")
        return "\n".join(lines)

    def __str__(self) -> str:
        return f"{self.headline()} [{self.path_text()}] witness: {self.witness}"


def _excerpt(span: Span, source: str) -> list[str]:
    lines = source.splitlines()
    if not (1 <= span.line_start <= len(lines)):
        return []
    text = lines[span.line_start - 1]
    start = span.col_start - 1
    end = span.col_end - 1 if span.line_end == span.line_start else len(text)
    end = max(end, start + 1)
    gutter = f"{span.line_start} | "
    underline = " " * (len(gutter) + start) + "^" * max(1, end - start)
    return [f"  {gutter}{text}", f"  {underline}"]


def render_value(v: Value, depth: int = WITNESS_DEPTH) -> str:
    """Bounded-depth rendering of a runtime value for witnesses."""
    if isinstance(v, NumV):
        from .syntax.pretty import format_number
        return format_number(v.value)
    if isinstance(v, StrV):
        return f'"{v.value}"'
    if isinstance(v, BoolV):
        return "true" if v.value else "false"
    if isinstance(v, NullV):
        return "null"
    if isinstance(v, ArrayV):
        if depth <= 0:
            return "[…]"
        parts = [_render_thunk(t, depth - 1) for t in v.elements]
        return "[" + ", ".join(parts) + "]"
    if isinstance(v, RecordV):
        if depth <= 0:
            return "{…}"
        parts = [f"{n} = {_render_thunk(t, depth - 1)}" for n, t in sorted(v.fields.items())]
        return "{" + ", ".join(parts) + "}"
    if isinstance(v, ClosureV):
        return f"<fun/{len(v.params)}>"
    if isinstance(v, PrimV):
        return f"<primitive {v.name}>"
    if isinstance(v, GuardedFnV):
        return f"<contracted {render_value(v.inner, depth)}>"
    if isinstance(v, ContractV):
        return f"<contract {describe(v.contract)}>"
    return "<value>"


def _render_thunk(t: Thunk, depth: int) -> str:
    if t.is_evaluated:
        return render_value(t.value, depth)  # type: ignore[arg-type]
    return "…"


def blame_report(label: Label, witness: str) -> BlameReport:
    return BlameReport(label, witness)


def raise_blame(label: Label, witness: str) -> None:
    """Abort the current check with a blame error on `label`."""
    raise BlameSignal(BlameReport(label, witness))


# ---------------------------------------------------------------------------
# Attachment


def attach(interp: "Interp", thunk: Thunk, contract: Contract, label: Label) -> Thunk:
    """Wrap `thunk` so that forcing it enforces `contract` under `label`.

    The wrapper is itself lazy: nothing is forced at attach time, so record
    fields and array elements keep their delayed semantics.
    """
    if isinstance(contract, Dyn):
        return thunk
    if isinstance(contract, Flat):
        return Thunk.from_compute(lambda: _force_flat(interp, thunk, contract, label),
                                  term=thunk.term)
    if isinstance(contract, Arrow):
        return Thunk.from_compute(lambda: _force_arrow(interp, thunk, contract, label),
                                  term=thunk.term)
    if isinstance(contract, RecordOf):
        return Thunk.from_compute(lambda: _force_record(interp, thunk, contract, label),
                                  term=thunk.term)
    if isinstance(contract, ArrayOf):
        return Thunk.from_compute(lambda: _force_array(interp, thunk, contract, label),
                                  term=thunk.term)
    from . import connectives
    if isinstance(contract, Union):
        return connectives.check_union(interp, thunk, contract.branches, label,
                                       interp.strategy)
    if isinstance(contract, Intersection):
        return connectives.check_intersection(interp, thunk, contract.branches, label,
                                              interp.strategy)
    if isinstance(contract, CaseArrow):
        return connectives.case_arrow(interp, thunk, contract.branches, label)
    raise TypeError(type(contract).__name__)


def check_flat(interp: "Interp", pred: Value, value: Value, label: Label) -> Value:
    """Run a flat predicate; blame `label` on false, crash on a non-Bool.

    Blame raised inside the predicate's own evaluation propagates as-is:
    predicates may apply contracted functions, and those failures belong to
    the label of the contract the predicate poked, not to this one.
    """
    verdict = interp.apply(pred, Thunk.from_value(value), label.span)
    if isinstance(verdict, BoolV):
        if verdict.value:
            return value
        raise_blame(label, render_value(value))
    raise CrashSignal(TYPE_ERROR, label.span,
                      f"contract predicate returned {type_name(verdict)}, expected Bool")


def _force_flat(interp: "Interp", thunk: Thunk, contract: Flat, label: Label) -> Value:
    value = interp.force(thunk)
    return check_flat(interp, contract.pred, value, label)


def wrap_arrow(fnv: Value, domain: Contract, codomain: Contract, label: Label) -> Value:
    """Wrap an applicable value with a function-contract guard.

    Each call checks the argument against the domain under the negated label
    (a bad argument is the caller's fault) and the result against the
    codomain under the original label.
    """
    if not applicable(fnv):
        raise_blame(label, f"{render_value(fnv)} is not a function")
    return GuardedFnV(fnv, ArrowGuard(domain, codomain, label))


def _force_arrow(interp: "Interp", thunk: Thunk, contract: Arrow, label: Label) -> Value:
    value = interp.force(thunk)
    return wrap_arrow(value, contract.domain, contract.codomain, label)


@dataclass(frozen=True)
class ArrowGuard:
    domain: Contract
    codomain: Contract
    label: Label

    def apply(self, interp: "Interp", inner: Value, arg: Thunk, call_span: Span) -> Value:
        guarded_arg = attach(interp, arg, self.domain, negate(self.label).push(DOMAIN))
        result = interp.apply(inner, guarded_arg, call_span)
        out = attach(interp, Thunk.from_value(result), self.codomain,
                     self.label.push(CODOMAIN))
        return interp.force(out)


def _force_record(interp: "Interp", thunk: Thunk, contract: RecordOf, label: Label) -> Value:
    value = interp.force(thunk)
    if not isinstance(value, RecordV):
        raise_blame(label, f"expected a record, got {render_value(value)}")
    missing = [n for n in contract.fields if n not in value.fields]
    if missing:
        raise_blame(label.push(field_step(missing[0])), "required field is missing")
    if contract.exhaustive:
        extra = [n for n in value.fields if n not in contract.fields]
        if extra:
            raise_blame(label.push(field_step(extra[0])),
                        "field is not allowed by the contract")
    wrapped: dict[str, Thunk] = {}
    for name, t in value.fields.items():
        fc = contract.fields.get(name)
        if fc is None:
            wrapped[name] = t
        else:
            wrapped[name] = attach(interp, t, fc, label.push(field_step(name)))
    return RecordV(wrapped)


def _force_array(interp: "Interp", thunk: Thunk, contract: ArrayOf, label: Label) -> Value:
    value = interp.force(thunk)
    if not isinstance(value, ArrayV):
        raise_blame(label, f"expected an array, got {render_value(value)}")
    element_label = label.push(ELEMENT)
    return ArrayV(tuple(attach(interp, t, contract.element, element_label)
                        for t in value.elements))
